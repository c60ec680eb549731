//! Rule-annotated natural-deduction arguments over NJ extended by an atomic base.
//!
//! Discharge is by explicit labels with lexical scope: a labelled leaf is bound
//! by the nearest enclosing binder slot carrying the same label. Open
//! (undischarged) leaves carry no label.

mod format;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bases::{AtomicRule, Base, Level};
use crate::syntax::{Atom, Formula, Sequent};

pub use format::{proof_from_json, proof_to_json, to_dot, ProofFormatError};

pub type Label = u32;

/// Node address: premise indices from the root.
pub type Path = Vec<usize>;

pub fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "/".to_string()
    } else {
        path.iter().map(|i| format!("/{i}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Assume,
    AndI,
    AndE1,
    AndE2,
    OrI1,
    OrI2,
    OrE,
    ImpI,
    ImpE,
    BotE,
    Base(AtomicRule),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Assume => "assume",
            Rule::AndI => "and-i",
            Rule::AndE1 => "and-e1",
            Rule::AndE2 => "and-e2",
            Rule::OrI1 => "or-i1",
            Rule::OrI2 => "or-i2",
            Rule::OrE => "or-e",
            Rule::ImpI => "imp-i",
            Rule::ImpE => "imp-e",
            Rule::BotE => "bot-e",
            Rule::Base(_) => "base",
        }
    }

    pub fn is_intro(&self) -> bool {
        matches!(self, Rule::AndI | Rule::OrI1 | Rule::OrI2 | Rule::ImpI)
    }

    pub fn is_elim(&self) -> bool {
        matches!(
            self,
            Rule::AndE1 | Rule::AndE2 | Rule::OrE | Rule::ImpE | Rule::BotE
        )
    }

    /// Index of the major premise of an elimination.
    pub fn major_premise(&self) -> Option<usize> {
        match self {
            Rule::ImpE => Some(1),
            Rule::AndE1 | Rule::AndE2 | Rule::OrE | Rule::BotE => Some(0),
            _ => None,
        }
    }

    fn arity(&self) -> Option<usize> {
        match self {
            Rule::Assume => Some(0),
            Rule::AndE1 | Rule::AndE2 | Rule::OrI1 | Rule::OrI2 | Rule::ImpI | Rule::BotE => Some(1),
            Rule::AndI | Rule::ImpE => Some(2),
            Rule::OrE => Some(3),
            Rule::Base(r) => Some(r.premises().len()),
        }
    }

    fn binds(&self) -> bool {
        match self {
            Rule::ImpI | Rule::OrE => true,
            Rule::Base(r) => r.level() == Level::Two,
            _ => false,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Base(r) => write!(f, "base[{r}]"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CalculusMode {
    /// NJ with ⊥-elimination.
    Efq,
    /// Minimal logic: no ⊥-elimination, ⊥ behaves as an atom.
    NoEfq,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Argument {
    pub conclusion: Formula,
    pub rule: Rule,
    pub premises: Vec<Argument>,
    /// Only on `Assume` leaves: the binder this leaf refers to.
    pub label: Option<Label>,
    /// Empty, or one slot per premise naming the label that premise discharges.
    pub discharges: Vec<Option<Label>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("label {0} is not bound by any enclosing discharge")]
    UnboundLabel(Label),
    #[error("{rule}: {reason}")]
    Schema { rule: &'static str, reason: String },
    #[error("label {0} is already bound on this path")]
    LabelReuse(Label),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {}: {reason}", path_string(.path))]
pub struct Defect {
    pub path: Path,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("closure concludes `{found}` but targets `{target}`")]
    Mismatch { target: Formula, found: Formula },
    #[error("`{0}` occurs only as a discharged assumption")]
    TargetsDischarged(Formula),
    #[error("`{0}` is not an assumption of the argument")]
    NotAnAssumption(Formula),
    #[error(transparent)]
    Malformed(#[from] ProofError),
}

impl Argument {
    pub fn assume(f: Formula) -> Self {
        Argument {
            conclusion: f,
            rule: Rule::Assume,
            premises: Vec::new(),
            label: None,
            discharges: Vec::new(),
        }
    }

    pub fn hypothesis(f: Formula, label: Label) -> Self {
        Argument {
            label: Some(label),
            ..Argument::assume(f)
        }
    }

    pub fn node(rule: Rule, conclusion: Formula, premises: Vec<Argument>) -> Self {
        Argument {
            conclusion,
            rule,
            premises,
            label: None,
            discharges: Vec::new(),
        }
    }

    pub fn binder(
        rule: Rule,
        conclusion: Formula,
        premises: Vec<Argument>,
        discharges: Vec<Option<Label>>,
    ) -> Self {
        Argument {
            conclusion,
            rule,
            premises,
            label: None,
            discharges,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.rule == Rule::Assume
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Argument::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Argument::height).max().unwrap_or(0)
    }

    pub fn slot(&self, i: usize) -> Option<Label> {
        self.discharges.get(i).copied().flatten()
    }

    pub fn at(&self, path: &[usize]) -> Option<&Argument> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get(i)?.at(rest),
        }
    }

    /// Copy of `self` with the subtree at `path` replaced.
    pub fn replace_at(&self, path: &[usize], new: Argument) -> Argument {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let mut out = self.clone();
                out.premises[i] = self.premises[i].replace_at(rest, new);
                out
            }
        }
    }

    pub fn uses_rule(&self, pred: &dyn Fn(&Rule) -> bool) -> bool {
        pred(&self.rule) || self.premises.iter().any(|p| p.uses_rule(pred))
    }

    /// Formulas at undischarged leaves.
    pub fn open_assumptions(&self) -> Result<BTreeSet<Formula>, ProofError> {
        let mut out = BTreeSet::new();
        let mut scope = Vec::new();
        self.collect_open(&mut scope, &mut out)?;
        Ok(out)
    }

    fn collect_open(
        &self,
        scope: &mut Vec<Label>,
        out: &mut BTreeSet<Formula>,
    ) -> Result<(), ProofError> {
        if self.is_leaf() {
            match self.label {
                None => {
                    out.insert(self.conclusion.clone());
                }
                Some(l) if !scope.contains(&l) => return Err(ProofError::UnboundLabel(l)),
                Some(_) => {}
            }
            return Ok(());
        }
        for (i, p) in self.premises.iter().enumerate() {
            let bound = self.slot(i);
            if let Some(l) = bound {
                scope.push(l);
            }
            let r = p.collect_open(scope, out);
            if bound.is_some() {
                scope.pop();
            }
            r?;
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.open_assumptions().is_ok_and(|s| s.is_empty())
    }

    /// Renumbers binder slots in preorder starting at `next`, returning the
    /// renamed argument and the next unused label. Slots that bind nothing
    /// keep a number; all-`None` discharge lists become empty.
    pub fn relabel_from(&self, next: Label) -> Result<(Argument, Label), ProofError> {
        let mut counter = next;
        let mut scope: Vec<(Label, Label)> = Vec::new();
        let out = self.relabel_inner(&mut scope, &mut counter)?;
        Ok((out, counter))
    }

    /// Canonical representative of the α-equivalence class.
    pub fn canonical(&self) -> Result<Argument, ProofError> {
        self.relabel_from(1).map(|(a, _)| a)
    }

    pub fn alpha_eq(&self, other: &Argument) -> bool {
        match (self.canonical(), other.canonical()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    fn relabel_inner(
        &self,
        scope: &mut Vec<(Label, Label)>,
        counter: &mut Label,
    ) -> Result<Argument, ProofError> {
        if self.is_leaf() {
            let label = match self.label {
                None => None,
                Some(l) => Some(
                    scope
                        .iter()
                        .rev()
                        .find(|(old, _)| *old == l)
                        .map(|(_, new)| *new)
                        .ok_or(ProofError::UnboundLabel(l))?,
                ),
            };
            return Ok(Argument {
                label,
                ..self.clone()
            });
        }
        let mut discharges: Vec<Option<Label>> = self
            .discharges
            .iter()
            .map(|slot| {
                slot.map(|_| {
                    let l = *counter;
                    *counter += 1;
                    l
                })
            })
            .collect();
        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, p) in self.premises.iter().enumerate() {
            let binding = self.slot(i).map(|old| (old, discharges[i].unwrap()));
            if let Some(b) = binding {
                scope.push(b);
            }
            let r = p.relabel_inner(scope, counter);
            if binding.is_some() {
                scope.pop();
            }
            premises.push(r?);
        }
        if discharges.iter().all(Option::is_none) {
            discharges.clear();
        }
        Ok(Argument {
            conclusion: self.conclusion.clone(),
            rule: self.rule.clone(),
            premises,
            label: None,
            discharges,
        })
    }

    /// Largest label used anywhere in the tree.
    pub fn max_label(&self) -> Label {
        let own = self
            .label
            .into_iter()
            .chain(self.discharges.iter().flatten().copied())
            .max()
            .unwrap_or(0);
        self.premises
            .iter()
            .map(Argument::max_label)
            .fold(own, Label::max)
    }

    /// Replaces the leaves bound to `label` at this scope (i.e. not shadowed
    /// by an inner binder) with `replacement`.
    pub fn substitute_label(&self, label: Label, replacement: &Argument) -> Argument {
        if self.is_leaf() {
            return if self.label == Some(label) {
                replacement.clone()
            } else {
                self.clone()
            };
        }
        let premises = self
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if self.slot(i) == Some(label) {
                    p.clone()
                } else {
                    p.substitute_label(label, replacement)
                }
            })
            .collect();
        Argument {
            premises,
            ..self.clone()
        }
    }

    /// Replaces every open leaf concluding `target` with `replacement`.
    pub fn substitute_open(&self, target: &Formula, replacement: &Argument) -> Argument {
        if self.is_leaf() {
            return if self.label.is_none() && &self.conclusion == target {
                replacement.clone()
            } else {
                self.clone()
            };
        }
        Argument {
            premises: self
                .premises
                .iter()
                .map(|p| p.substitute_open(target, replacement))
                .collect(),
            ..self.clone()
        }
    }

    fn has_discharged_leaf(&self, target: &Formula) -> bool {
        if self.is_leaf() {
            return self.label.is_some() && &self.conclusion == target;
        }
        self.premises.iter().any(|p| p.has_discharged_leaf(target))
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(a: &Argument, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}{} by {}", "", a.conclusion, a.rule, indent = depth * 2)?;
            if let Some(l) = a.label {
                write!(f, " [{l}]")?;
            }
            if !a.discharges.is_empty() {
                let slots: Vec<String> = a
                    .discharges
                    .iter()
                    .map(|s| s.map_or("-".to_string(), |l| l.to_string()))
                    .collect();
                write!(f, " discharging {}", slots.join(","))?;
            }
            writeln!(f)?;
            for p in &a.premises {
                go(p, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// `a` witnesses `s`: its open assumptions lie in the context and it concludes the extract.
pub fn witnesses(a: &Argument, s: &Sequent) -> bool {
    a.conclusion == s.extract
        && a
            .open_assumptions()
            .is_ok_and(|open| open.is_subset(&s.context))
}

/// Parameters that rules cannot read off their inputs.
#[derive(Debug, Clone, Default)]
pub struct RuleParams {
    /// One slot per premise (ImpI: slot 0; OrE: slots 1 and 2; level-2 base rules).
    pub discharge: Vec<Option<Label>>,
    /// The conclusion, where the rule does not determine it (∨I, ⊥E, vacuous →I).
    pub conclusion: Option<Formula>,
}

fn schema(rule: &Rule, reason: impl Into<String>) -> ProofError {
    ProofError::Schema {
        rule: rule.name(),
        reason: reason.into(),
    }
}

/// One application of `rule` to `inputs`. Every rule yields at most one
/// argument once `params` fix the discharged labels and any free conclusion;
/// vacuous and labelled →I are the only sources of choice and are resolved
/// by `params`.
pub fn apply_rule(
    rule: &Rule,
    inputs: Vec<Argument>,
    params: RuleParams,
) -> Result<Vec<Argument>, ProofError> {
    if Some(inputs.len()) != rule.arity() {
        return Err(schema(
            rule,
            format!("expected {} premises, got {}", rule.arity().unwrap_or(0), inputs.len()),
        ));
    }
    if !params.discharge.is_empty() && !rule.binds() {
        return Err(schema(rule, "rule discharges nothing"));
    }
    if !params.discharge.is_empty() && params.discharge.len() != inputs.len() {
        return Err(schema(rule, "one discharge slot per premise expected"));
    }
    let mut seen = BTreeSet::new();
    for l in params.discharge.iter().flatten() {
        if !seen.insert(*l) {
            return Err(ProofError::LabelReuse(*l));
        }
    }
    let c = |i: usize| inputs[i].conclusion.clone();
    let conclusion = match rule {
        Rule::Assume => return Err(schema(rule, "assumptions are leaves")),
        Rule::AndI => Formula::and(c(0), c(1)),
        Rule::AndE1 | Rule::AndE2 => match &inputs[0].conclusion {
            Formula::And(l, r) => {
                if *rule == Rule::AndE1 {
                    (**l).clone()
                } else {
                    (**r).clone()
                }
            }
            other => return Err(schema(rule, format!("`{other}` is not a conjunction"))),
        },
        Rule::OrI1 | Rule::OrI2 => {
            let target = params
                .conclusion
                .clone()
                .ok_or_else(|| schema(rule, "disjunction to introduce must be given"))?;
            let ok = match &target {
                Formula::Or(l, r) => {
                    if *rule == Rule::OrI1 {
                        **l == c(0)
                    } else {
                        **r == c(0)
                    }
                }
                _ => false,
            };
            if !ok {
                return Err(schema(rule, format!("`{target}` does not fit the premise")));
            }
            target
        }
        Rule::OrE => {
            if !matches!(inputs[0].conclusion, Formula::Or(..)) {
                return Err(schema(rule, "major premise is not a disjunction"));
            }
            if c(1) != c(2) {
                return Err(schema(rule, "minor premises differ"));
            }
            if params.discharge.first().copied().flatten().is_some() {
                return Err(schema(rule, "major premise discharges nothing"));
            }
            c(1)
        }
        Rule::ImpI => {
            let label = params.discharge.first().copied().flatten();
            match (&params.conclusion, label) {
                (Some(target @ Formula::Imp(_, body)), _) if **body == c(0) => target.clone(),
                (Some(target), _) => {
                    return Err(schema(rule, format!("`{target}` does not fit the premise")))
                }
                (None, Some(l)) => {
                    let mut leaves = BTreeSet::new();
                    bound_leaves(&inputs[0], l, &mut leaves);
                    match leaves.len() {
                        1 => Formula::imp(leaves.into_iter().next().unwrap(), c(0)),
                        0 => return Err(schema(rule, "vacuous discharge needs a conclusion")),
                        _ => return Err(schema(rule, "discharged leaves disagree")),
                    }
                }
                (None, None) => return Err(schema(rule, "antecedent must be given")),
            }
        }
        Rule::ImpE => match &inputs[1].conclusion {
            Formula::Imp(a, b) if **a == c(0) => (**b).clone(),
            other => {
                return Err(schema(rule, format!("`{other}` is not an implication from the minor premise")))
            }
        },
        Rule::BotE => {
            if inputs[0].conclusion != Formula::Bot {
                return Err(schema(rule, "premise is not bot"));
            }
            params
                .conclusion
                .clone()
                .ok_or_else(|| schema(rule, "conclusion must be given"))?
        }
        Rule::Base(r) => {
            for (i, p) in r.premises().iter().enumerate() {
                if inputs[i].conclusion != Formula::Atom(p.atom.clone()) {
                    return Err(schema(rule, format!("premise {i} must conclude `{}`", p.atom)));
                }
            }
            Formula::Atom(r.conclusion().clone())
        }
    };
    let discharges = if params.discharge.iter().all(Option::is_none) {
        Vec::new()
    } else {
        params.discharge
    };
    let out = Argument::binder(rule.clone(), conclusion, inputs, discharges);
    check_shape(&out).map_err(|reason| schema(rule, reason))?;
    Ok(vec![out])
}

fn bound_leaves(a: &Argument, label: Label, out: &mut BTreeSet<Formula>) {
    if a.is_leaf() {
        if a.label == Some(label) {
            out.insert(a.conclusion.clone());
        }
        return;
    }
    for (i, p) in a.premises.iter().enumerate() {
        if a.slot(i) != Some(label) {
            bound_leaves(p, label, out);
        }
    }
}

/// What a binder slot admits at the leaves it binds.
#[derive(Clone)]
enum Binding<'a> {
    Formula(&'a Formula),
    Atoms(&'a BTreeSet<Atom>),
}

/// Local well-formedness of one node: arity, conclusion schema and the
/// shape of its discharge slots. Leaf/binder agreement is checked by the walk.
fn check_shape(a: &Argument) -> Result<(), String> {
    let rule = &a.rule;
    let arity = rule.arity().unwrap();
    if a.premises.len() != arity {
        return Err(format!("expected {arity} premises, found {}", a.premises.len()));
    }
    if a.label.is_some() && !a.is_leaf() {
        return Err("only assumptions carry labels".into());
    }
    if !a.discharges.is_empty() {
        if !rule.binds() {
            return Err("rule discharges nothing".into());
        }
        if a.discharges.len() != arity {
            return Err("one discharge slot per premise expected".into());
        }
    }
    let c = |i: usize| &a.premises[i].conclusion;
    let concl = &a.conclusion;
    let ok = match rule {
        Rule::Assume => true,
        Rule::AndI => *concl == Formula::and(c(0).clone(), c(1).clone()),
        Rule::AndE1 => matches!(c(0), Formula::And(l, _) if **l == *concl),
        Rule::AndE2 => matches!(c(0), Formula::And(_, r) if **r == *concl),
        Rule::OrI1 => matches!(concl, Formula::Or(l, _) if **l == *c(0)),
        Rule::OrI2 => matches!(concl, Formula::Or(_, r) if **r == *c(0)),
        Rule::OrE => {
            if a.slot(0).is_some() {
                return Err("major premise of or-e discharges nothing".into());
            }
            matches!(c(0), Formula::Or(..)) && c(1) == concl && c(2) == concl
        }
        Rule::ImpI => matches!(concl, Formula::Imp(_, b) if **b == *c(0)),
        Rule::ImpE => matches!(c(1), Formula::Imp(x, y) if **x == *c(0) && **y == *concl),
        Rule::BotE => *c(0) == Formula::Bot,
        Rule::Base(r) => {
            for (i, p) in r.premises().iter().enumerate() {
                if p.hypotheses.is_empty() && a.slot(i).is_some() {
                    return Err(format!("premise {i} of the base rule discharges nothing"));
                }
            }
            *concl == Formula::Atom(r.conclusion().clone())
                && r
                    .premises()
                    .iter()
                    .enumerate()
                    .all(|(i, p)| *c(i) == Formula::Atom(p.atom.clone()))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("conclusion `{concl}` does not follow by {}", rule.name()))
    }
}

/// Checks that `a` is built from assumptions and the rules of NJ (⊥E only
/// under `Efq`) together with the rules of `base`.
pub fn check_derivation(a: &Argument, base: &Base, mode: CalculusMode) -> Result<(), Defect> {
    let mut path = Vec::new();
    let mut scope: Vec<(Label, Binding<'_>)> = Vec::new();
    check_walk(a, base, mode, &mut path, &mut scope)
}

fn check_walk<'a>(
    a: &'a Argument,
    base: &Base,
    mode: CalculusMode,
    path: &mut Path,
    scope: &mut Vec<(Label, Binding<'a>)>,
) -> Result<(), Defect> {
    let defect = |path: &Path, reason: String| Defect {
        path: path.clone(),
        reason,
    };
    check_shape(a).map_err(|r| defect(path, r))?;
    match &a.rule {
        Rule::Assume => {
            if let Some(l) = a.label {
                let binding = scope.iter().rev().find(|(b, _)| *b == l);
                match binding {
                    None => return Err(defect(path, format!("label {l} is not bound"))),
                    Some((_, Binding::Formula(f))) if *f != &a.conclusion => {
                        return Err(defect(
                            path,
                            format!("leaf `{}` is bound by a discharge of `{f}`", a.conclusion),
                        ))
                    }
                    Some((_, Binding::Atoms(atoms)))
                        if !a.conclusion.as_atom().is_some_and(|x| atoms.contains(x)) =>
                    {
                        return Err(defect(
                            path,
                            format!("leaf `{}` is not a hypothesis of the base-rule premise", a.conclusion),
                        ))
                    }
                    _ => {}
                }
            }
            return Ok(());
        }
        Rule::BotE if mode == CalculusMode::NoEfq => {
            return Err(defect(path, "bot-e is not admitted without ex falso".into()))
        }
        Rule::Base(r) if !base.contains(r) => {
            return Err(defect(path, format!("rule `{r}` is not in the base")))
        }
        _ => {}
    }
    for (i, p) in a.premises.iter().enumerate() {
        let binding = a.slot(i).map(|l| {
            let b = match &a.rule {
                Rule::ImpI => match &a.conclusion {
                    Formula::Imp(x, _) => Binding::Formula(x),
                    _ => unreachable!("shape checked"),
                },
                Rule::OrE => match &a.premises[0].conclusion {
                    Formula::Or(x, y) => Binding::Formula(if i == 1 { x } else { y }),
                    _ => unreachable!("shape checked"),
                },
                Rule::Base(r) => Binding::Atoms(&r.premises()[i].hypotheses),
                _ => unreachable!("shape checked"),
            };
            (l, b)
        });
        let pushed = binding.is_some();
        if let Some(b) = binding {
            scope.push(b);
        }
        path.push(i);
        let r = check_walk(p, base, mode, path, scope);
        path.pop();
        if pushed {
            scope.pop();
        }
        r?;
    }
    Ok(())
}

/// Grafts each closure above every open leaf concluding its target formula.
pub fn cut(closures: &[(Formula, Argument)], a: &Argument) -> Result<Argument, CutError> {
    let open = a.open_assumptions()?;
    let mut out = a.clone();
    for (target, closure) in closures {
        if &closure.conclusion != target {
            return Err(CutError::Mismatch {
                target: target.clone(),
                found: closure.conclusion.clone(),
            });
        }
        closure.open_assumptions()?;
        if !open.contains(target) {
            return Err(if a.has_discharged_leaf(target) {
                CutError::TargetsDischarged(target.clone())
            } else {
                CutError::NotAnAssumption(target.clone())
            });
        }
    }
    // Grafting in one pass over the original leaves keeps closures from being
    // re-targeted by later entries.
    let table: HashMap<&Formula, &Argument> = closures.iter().map(|(t, c)| (t, c)).collect();
    out = graft(&out, &table);
    Ok(out.canonical()?)
}

fn graft(a: &Argument, table: &HashMap<&Formula, &Argument>) -> Argument {
    if a.is_leaf() {
        if a.label.is_none() {
            if let Some(c) = table.get(&a.conclusion) {
                return (*c).clone();
            }
        }
        return a.clone();
    }
    Argument {
        premises: a.premises.iter().map(|p| graft(p, table)).collect(),
        ..a.clone()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::bases::parse_base;
    use crate::syntax::parse_formula;

    pub fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn empty() -> Base {
        Base::empty(Level::One)
    }

    /// `p, q ⊢ p` via ∧I then ∧E¹.
    pub fn conjunction_detour() -> Argument {
        let pq = Argument::node(
            Rule::AndI,
            f("p & q"),
            vec![Argument::assume(f("p")), Argument::assume(f("q"))],
        );
        Argument::node(Rule::AndE1, f("p"), vec![pq])
    }

    /// `p|q, ~p ⊢ q` with ⊥E in the left branch.
    pub fn disjunctive_syllogism() -> Argument {
        let left = Argument::node(
            Rule::BotE,
            f("q"),
            vec![Argument::node(
                Rule::ImpE,
                f("bot"),
                vec![Argument::hypothesis(f("p"), 1), Argument::assume(f("~p"))],
            )],
        );
        Argument::binder(
            Rule::OrE,
            f("q"),
            vec![Argument::assume(f("p | q")), left, Argument::hypothesis(f("q"), 2)],
            vec![None, Some(1), Some(2)],
        )
    }

    pub fn bot_imp_bot() -> Argument {
        Argument::binder(
            Rule::ImpI,
            f("bot -> bot"),
            vec![Argument::hypothesis(f("bot"), 1)],
            vec![Some(1)],
        )
    }

    #[test]
    fn open_assumption_sets() {
        assert_eq!(
            Argument::assume(f("p")).open_assumptions().unwrap(),
            [f("p")].into_iter().collect()
        );
        let id = Argument::binder(Rule::ImpI, f("p -> p"), vec![Argument::hypothesis(f("p"), 1)], vec![Some(1)]);
        assert!(id.open_assumptions().unwrap().is_empty());
        assert!(bot_imp_bot().is_closed());
        let dangling = Argument::hypothesis(f("p"), 7);
        assert_eq!(dangling.open_assumptions(), Err(ProofError::UnboundLabel(7)));
    }

    #[test]
    fn witnessing() {
        let s = |t: &str| t.parse::<Sequent>().unwrap();
        assert!(witnesses(&Argument::assume(f("p")), &s("p, q : p")));
        assert!(!witnesses(&Argument::assume(f("p")), &s(" : p")));
        assert!(witnesses(&disjunctive_syllogism(), &s("p | q, ~p : q")));
    }

    #[test]
    fn checking() {
        check_derivation(&conjunction_detour(), &empty(), CalculusMode::NoEfq).unwrap();
        check_derivation(&disjunctive_syllogism(), &empty(), CalculusMode::Efq).unwrap();
        let e = check_derivation(&disjunctive_syllogism(), &empty(), CalculusMode::NoEfq).unwrap_err();
        assert_eq!(e.path, vec![1]);
        let bogus = Argument::node(Rule::AndE1, f("q"), vec![Argument::assume(f("p"))]);
        assert!(check_derivation(&bogus, &empty(), CalculusMode::Efq).is_err());
        let base = parse_base("p => c", None).unwrap();
        let r = base.rules().next().unwrap().clone();
        let app = Argument::node(Rule::Base(r), f("c"), vec![Argument::assume(f("p"))]);
        check_derivation(&app, &base, CalculusMode::NoEfq).unwrap();
        assert!(check_derivation(&app, &empty(), CalculusMode::NoEfq).is_err());
    }

    #[test]
    fn binder_formula_mismatch() {
        let bad = Argument::binder(Rule::ImpI, f("p -> p"), vec![Argument::hypothesis(f("q"), 1)], vec![Some(1)]);
        let wrong = Argument::binder(Rule::ImpI, f("q -> q"), vec![bad.premises[0].clone()], vec![Some(1)]);
        assert!(check_derivation(&bad, &empty(), CalculusMode::Efq).is_err());
        check_derivation(&wrong, &empty(), CalculusMode::Efq).unwrap();
        let base = parse_base("(p > q) => c", None).unwrap();
        let r = base.rules().next().unwrap().clone();
        let leaf_ok = Argument::binder(Rule::Base(r.clone()), f("c"), vec![Argument::hypothesis(f("q"), 1)], vec![Some(1)]);
        // q is the premise atom, not a hypothesis
        assert!(check_derivation(&leaf_ok, &base, CalculusMode::Efq).is_err());
    }

    #[test]
    fn shadowing_is_lexical() {
        // λ1. λ1. x₁ : p -> q -> q, inner binder wins
        let inner = Argument::binder(Rule::ImpI, f("q -> q"), vec![Argument::hypothesis(f("q"), 1)], vec![Some(1)]);
        let outer = Argument::binder(Rule::ImpI, f("p -> q -> q"), vec![inner], vec![Some(1)]);
        check_derivation(&outer, &empty(), CalculusMode::NoEfq).unwrap();
        let canon = outer.canonical().unwrap();
        assert_eq!(canon.discharges, vec![Some(1)]);
        assert_eq!(canon.premises[0].discharges, vec![Some(2)]);
        assert_eq!(canon.premises[0].premises[0].label, Some(2));
    }

    #[test]
    fn alpha_equivalence() {
        let a = disjunctive_syllogism();
        let mut b = a.clone();
        b.discharges = vec![None, Some(40), Some(9)];
        b.premises[1].premises[0].premises[0].label = Some(40);
        b.premises[2].label = Some(9);
        assert!(a.alpha_eq(&b));
        assert_eq!(a.canonical().unwrap(), b.canonical().unwrap());
    }

    #[test]
    fn rule_application() {
        let p = Argument::assume(f("p"));
        let q = Argument::assume(f("q"));
        let out = apply_rule(&Rule::AndI, vec![p.clone(), q], RuleParams::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].conclusion, f("p & q"));
        let out = apply_rule(&Rule::ImpE, vec![p.clone(), Argument::assume(f("p -> q"))], RuleParams::default()).unwrap();
        assert_eq!(out[0].conclusion, f("q"));
        let params = RuleParams {
            conclusion: Some(f("p | q")),
            ..Default::default()
        };
        let out = apply_rule(&Rule::OrI1, vec![p.clone()], params).unwrap();
        assert_eq!(out[0].conclusion, f("p | q"));
        assert!(apply_rule(&Rule::ImpE, vec![p.clone(), Argument::assume(f("q"))], RuleParams::default()).is_err());
        let params = RuleParams {
            discharge: vec![Some(3)],
            conclusion: None,
        };
        let out = apply_rule(&Rule::ImpI, vec![Argument::hypothesis(f("p"), 3)], params).unwrap();
        assert_eq!(out[0].conclusion, f("p -> p"));
        assert!(out[0].is_closed());
        let reuse = RuleParams {
            discharge: vec![None, Some(1), Some(1)],
            conclusion: None,
        };
        let ds = disjunctive_syllogism();
        assert_eq!(
            apply_rule(&Rule::OrE, ds.premises.clone(), reuse),
            Err(ProofError::LabelReuse(1))
        );
    }

    #[test]
    fn cut_grafts_open_leaves() {
        let p = Argument::assume(f("p"));
        let base = parse_base("=> p", None).unwrap();
        let ax = Argument::node(Rule::Base(base.rules().next().unwrap().clone()), f("p"), vec![]);
        assert_eq!(cut(&[(f("p"), ax.clone())], &p).unwrap(), ax);
        assert!(matches!(
            cut(&[(f("q"), ax.clone())], &p),
            Err(CutError::Mismatch { .. })
        ));
        let id = Argument::binder(Rule::ImpI, f("p -> p"), vec![Argument::hypothesis(f("p"), 1)], vec![Some(1)]);
        assert!(matches!(
            cut(&[(f("p"), ax)], &id),
            Err(CutError::TargetsDischarged(_))
        ));
    }

    #[test]
    fn cut_closes_disjunctive_syllogism() {
        let base = parse_base("=> q", None).unwrap();
        let ax_q = Argument::node(Rule::Base(base.rules().next().unwrap().clone()), f("q"), vec![]);
        let pq = Argument::node(Rule::OrI2, f("p | q"), vec![ax_q]);
        let not_p = Argument::binder(
            Rule::ImpI,
            f("~p"),
            vec![Argument::node(
                Rule::ImpE,
                f("bot"),
                vec![Argument::hypothesis(f("p"), 5), Argument::hypothesis(f("~p"), 6)],
            )],
            vec![Some(5)],
        );
        // not_p uses an unbound label: cut must refuse it
        assert!(cut(&[(f("~p"), not_p)], &disjunctive_syllogism()).is_err());
        let ds = disjunctive_syllogism();
        let closed = cut(&[(f("p | q"), pq)], &ds).unwrap();
        assert_eq!(closed.conclusion, f("q"));
        assert_eq!(closed.open_assumptions().unwrap(), [f("~p")].into_iter().collect());
        check_derivation(&closed, &base, CalculusMode::Efq).unwrap();
    }
}
