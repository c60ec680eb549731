//! Atomic bases: finite systems of rules over atoms, at level 1 (flat premises)
//! or level 2 (premises carrying dischargeable atomic hypotheses).

mod extensions;
mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::proofs::{Argument, Label, Rule};
use crate::syntax::{Atom, Formula};

pub use extensions::{candidate_rules, enumerate_extensions, ExtensionBounds, Extensions};
pub use format::{parse_base, parse_rule, print_base, BaseFormatError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("rule `{0}` discharges hypotheses and cannot be added to a level-1 base")]
    LevelMismatch(AtomicRule),
    #[error("too many distinct atoms ({0}); at most 64 are supported")]
    TooManyAtoms(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    One,
    Two,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::One => f.write_str("1"),
            Level::Two => f.write_str("2"),
        }
    }
}

/// One premise `[Σ] p` of an atomic rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Premise {
    pub atom: Atom,
    pub hypotheses: BTreeSet<Atom>,
}

impl Premise {
    pub fn flat(atom: Atom) -> Self {
        Premise {
            atom,
            hypotheses: BTreeSet::new(),
        }
    }

    pub fn with_hypotheses(atom: Atom, hypotheses: impl IntoIterator<Item = Atom>) -> Self {
        Premise {
            atom,
            hypotheses: hypotheses.into_iter().collect(),
        }
    }
}

/// `Σ₁ p₁, …, Σₙ pₙ ⇒ c`. Premises are kept sorted and duplicate-free, so
/// rules are identified up to premise order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicRule {
    premises: Vec<Premise>,
    conclusion: Atom,
}

impl AtomicRule {
    pub fn new(premises: impl IntoIterator<Item = Premise>, conclusion: Atom) -> Self {
        let premises: BTreeSet<Premise> = premises.into_iter().collect();
        AtomicRule {
            premises: premises.into_iter().collect(),
            conclusion,
        }
    }

    pub fn axiom(conclusion: Atom) -> Self {
        AtomicRule::new([], conclusion)
    }

    /// A level-1 rule from premise atoms.
    pub fn flat(premises: impl IntoIterator<Item = Atom>, conclusion: Atom) -> Self {
        AtomicRule::new(premises.into_iter().map(Premise::flat), conclusion)
    }

    pub fn premises(&self) -> &[Premise] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Atom {
        &self.conclusion
    }

    pub fn level(&self) -> Level {
        if self.premises.iter().all(|p| p.hypotheses.is_empty()) {
            Level::One
        } else {
            Level::Two
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        out.insert(self.conclusion.clone());
        for p in &self.premises {
            out.insert(p.atom.clone());
            out.extend(p.hypotheses.iter().cloned());
        }
        out
    }

    /// The rule read as a formula: `(Σ̂₁ → p₁) ∧ … → c`, curried.
    pub fn as_formula(&self) -> Formula {
        self.premises
            .iter()
            .rev()
            .fold(Formula::Atom(self.conclusion.clone()), |acc, prem| {
                let body = prem
                    .hypotheses
                    .iter()
                    .rev()
                    .fold(Formula::Atom(prem.atom.clone()), |b, h| {
                        Formula::imp(Formula::Atom(h.clone()), b)
                    });
                Formula::imp(body, acc)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Base {
    rules: BTreeSet<AtomicRule>,
    level: Level,
}

impl Base {
    pub fn empty(level: Level) -> Self {
        Base {
            rules: BTreeSet::new(),
            level,
        }
    }

    pub fn new(level: Level, rules: impl IntoIterator<Item = AtomicRule>) -> Result<Self, BaseError> {
        let mut base = Base::empty(level);
        for rule in rules {
            base.insert(rule)?;
        }
        Ok(base)
    }

    pub fn insert(&mut self, rule: AtomicRule) -> Result<bool, BaseError> {
        if self.level == Level::One && rule.level() == Level::Two {
            return Err(BaseError::LevelMismatch(rule));
        }
        Ok(self.rules.insert(rule))
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Same rules, tagged as a level-2 base.
    pub fn lifted(&self) -> Base {
        Base {
            rules: self.rules.clone(),
            level: Level::Two,
        }
    }

    pub fn rules(&self) -> impl Iterator<Item = &AtomicRule> + '_ {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, rule: &AtomicRule) -> bool {
        self.rules.contains(rule)
    }

    pub fn is_subset_of(&self, other: &Base) -> bool {
        self.rules.is_subset(&other.rules)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.atoms());
        }
        out
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_base(self))
    }
}

/// Bitmask index over a finite set of atoms.
#[derive(Debug, Clone, Default)]
pub struct AtomIndex {
    atoms: Vec<Atom>,
    positions: HashMap<Atom, usize>,
}

impl AtomIndex {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Self, BaseError> {
        let set: BTreeSet<Atom> = atoms.into_iter().collect();
        if set.len() > 64 {
            return Err(BaseError::TooManyAtoms(set.len()));
        }
        let atoms: Vec<Atom> = set.into_iter().collect();
        let positions = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(AtomIndex { atoms, positions })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn position(&self, atom: &Atom) -> Option<usize> {
        self.positions.get(atom).copied()
    }

    pub fn bit(&self, atom: &Atom) -> u64 {
        self.position(atom).map(|i| 1u64 << i).unwrap_or(0)
    }

    pub fn mask<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> u64 {
        atoms.into_iter().fold(0, |m, a| m | self.bit(a))
    }

    pub fn atoms_of(&self, mask: u64) -> BTreeSet<Atom> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    premises: Vec<(u64, usize)>,
    conclusion: usize,
}

/// Memoised least fixed point `S ↦ D(S)` of derivability under hypotheses.
///
/// `D(S)` is the least set containing `S` and closed under: if `pᵢ ∈ D(S ∪ Σᵢ)`
/// for every premise of a rule, its conclusion is in `D(S)`. `D(T)` for `T ⊋ S`
/// never depends on `D(S)`, so supersets are solved first by recursion.
#[derive(Debug, Clone)]
pub struct BaseClosure {
    index: AtomIndex,
    rules: Vec<CompiledRule>,
    memo: HashMap<u64, u64>,
}

impl BaseClosure {
    pub fn new(base: &Base, extra: impl IntoIterator<Item = Atom>) -> Result<Self, BaseError> {
        let mut atoms = base.atoms();
        atoms.extend(extra);
        let index = AtomIndex::new(atoms)?;
        let rules = base
            .rules()
            .map(|r| CompiledRule {
                premises: r
                    .premises()
                    .iter()
                    .map(|p| (index.mask(&p.hypotheses), index.position(&p.atom).unwrap()))
                    .collect(),
                conclusion: index.position(r.conclusion()).unwrap(),
            })
            .collect();
        Ok(BaseClosure {
            index,
            rules,
            memo: HashMap::new(),
        })
    }

    pub fn index(&self) -> &AtomIndex {
        &self.index
    }

    pub fn closure(&mut self, hyps: u64) -> u64 {
        if let Some(&d) = self.memo.get(&hyps) {
            return d;
        }
        let mut derived = hyps;
        loop {
            let mut changed = false;
            for ri in 0..self.rules.len() {
                let c = self.rules[ri].conclusion;
                if derived & (1 << c) != 0 {
                    continue;
                }
                let mut fires = true;
                for pi in 0..self.rules[ri].premises.len() {
                    let (sigma, p) = self.rules[ri].premises[pi];
                    let ext = hyps | sigma;
                    let avail = if ext == hyps { derived } else { self.closure(ext) };
                    if avail & (1 << p) == 0 {
                        fires = false;
                        break;
                    }
                }
                if fires {
                    derived |= 1 << c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.memo.insert(hyps, derived);
        derived
    }

    pub fn derives(&mut self, hyps: &BTreeSet<Atom>, goal: &Atom) -> bool {
        if hyps.contains(goal) {
            return true;
        }
        let Some(g) = self.index.position(goal) else {
            return false;
        };
        let mask = self.index.mask(hyps);
        self.closure(mask) & (1 << g) != 0
    }
}

/// `hypotheses ⊢_B goal`.
pub fn derivable_atom(base: &Base, hypotheses: &BTreeSet<Atom>, goal: &Atom) -> bool {
    let extra = hypotheses.iter().cloned().chain([goal.clone()]);
    match BaseClosure::new(base, extra) {
        Ok(mut c) => c.derives(hypotheses, goal),
        Err(_) => slow_derivable(base, hypotheses, goal),
    }
}

// Fallback for bases with more than 64 atoms: same fixed point over sets.
fn slow_derivable(base: &Base, hypotheses: &BTreeSet<Atom>, goal: &Atom) -> bool {
    fn closure(
        base: &Base,
        s: &BTreeSet<Atom>,
        memo: &mut BTreeMap<BTreeSet<Atom>, BTreeSet<Atom>>,
    ) -> BTreeSet<Atom> {
        if let Some(d) = memo.get(s) {
            return d.clone();
        }
        let mut d = s.clone();
        loop {
            let mut changed = false;
            for r in base.rules() {
                if d.contains(r.conclusion()) {
                    continue;
                }
                let fires = r.premises().iter().all(|p| {
                    if p.hypotheses.is_subset(s) {
                        d.contains(&p.atom)
                    } else {
                        let ext: BTreeSet<Atom> = s.union(&p.hypotheses).cloned().collect();
                        closure(base, &ext, memo).contains(&p.atom)
                    }
                });
                if fires {
                    d.insert(r.conclusion().clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        memo.insert(s.clone(), d.clone());
        d
    }
    closure(base, hypotheses, &mut BTreeMap::new()).contains(goal)
}

/// All atoms of the base and hypotheses derivable from `hypotheses`.
pub fn derivable_atoms(base: &Base, hypotheses: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let mut c = BaseClosure::new(base, hypotheses.iter().cloned())
        .expect("derivable_atoms: too many atoms");
    let mask = c.index().mask(hypotheses);
    let d = c.closure(mask);
    c.index().atoms_of(d)
}

/// A derivation of `goal` from `hypotheses` built from base rules only.
pub fn derivation_in_base(
    base: &Base,
    hypotheses: &BTreeSet<Atom>,
    goal: &Atom,
) -> Option<Argument> {
    let extra = hypotheses.iter().cloned().chain([goal.clone()]);
    let mut closure = BaseClosure::new(base, extra).ok()?;
    if !closure.derives(hypotheses, goal) {
        return None;
    }
    let rules: Vec<AtomicRule> = base.rules().cloned().collect();
    let scope: BTreeMap<Atom, Option<Label>> =
        hypotheses.iter().map(|h| (h.clone(), None)).collect();
    let mut builder = BaseWitness {
        rules: &rules,
        closure,
        next_label: 1,
        failed: HashMap::new(),
    };
    let mut depth = 0;
    loop {
        if let Some(arg) = builder.build(&scope, goal, depth) {
            return Some(arg.canonical().expect("fresh labels are well scoped"));
        }
        depth += 1;
    }
}

struct BaseWitness<'a> {
    rules: &'a [AtomicRule],
    closure: BaseClosure,
    next_label: Label,
    failed: HashMap<(u64, usize, usize), ()>,
}

impl BaseWitness<'_> {
    fn build(
        &mut self,
        scope: &BTreeMap<Atom, Option<Label>>,
        goal: &Atom,
        depth: usize,
    ) -> Option<Argument> {
        if let Some(label) = scope.get(goal) {
            let mut leaf = Argument::assume(Formula::Atom(goal.clone()));
            leaf.label = *label;
            return Some(leaf);
        }
        if depth == 0 {
            return None;
        }
        let hyps = self.closure.index().mask(scope.keys());
        let g = self.closure.index().position(goal)?;
        if self.closure.closure(hyps) & (1 << g) == 0 {
            return None;
        }
        if self.failed.contains_key(&(hyps, g, depth)) {
            return None;
        }
        for rule in self.rules.iter().filter(|r| r.conclusion() == goal) {
            let mut premises = Vec::new();
            let mut slots = Vec::new();
            for prem in rule.premises() {
                let label = if prem.hypotheses.is_empty() {
                    None
                } else {
                    let l = self.next_label;
                    self.next_label += 1;
                    Some(l)
                };
                let mut inner = scope.clone();
                for h in &prem.hypotheses {
                    inner.insert(h.clone(), label);
                }
                match self.build(&inner, &prem.atom, depth - 1) {
                    Some(sub) => {
                        premises.push(sub);
                        slots.push(label);
                    }
                    None => break,
                }
            }
            if premises.len() == rule.premises().len() {
                let discharges = if slots.iter().any(Option::is_some) {
                    slots
                } else {
                    Vec::new()
                };
                return Some(Argument {
                    conclusion: Formula::Atom(goal.clone()),
                    rule: Rule::Base(rule.clone()),
                    premises,
                    label: None,
                    discharges,
                });
            }
        }
        self.failed.insert((hyps, g, depth), ());
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::{check_derivation, CalculusMode};

    fn a(n: &str) -> Atom {
        Atom::named(n)
    }

    fn set(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| a(n)).collect()
    }

    #[test]
    fn chained_axioms() {
        let b = parse_base("=> p\np => q\n", None).unwrap();
        assert!(derivable_atom(&b, &BTreeSet::new(), &a("q")));
        assert!(!derivable_atom(&Base::empty(Level::One), &BTreeSet::new(), &a("p")));
    }

    #[test]
    fn level_two_discharge() {
        let b = parse_base("(p > q) => c\np => q\n", None).unwrap();
        assert_eq!(b.level(), Level::Two);
        assert!(derivable_atom(&b, &BTreeSet::new(), &a("c")));
        let w = derivation_in_base(&b, &BTreeSet::new(), &a("c")).unwrap();
        check_derivation(&w, &b, CalculusMode::NoEfq).unwrap();
        assert!(w.open_assumptions().unwrap().is_empty());
        assert_eq!(w.discharges, vec![Some(1)]);
    }

    #[test]
    fn witness_with_open_hypothesis() {
        let b = parse_base("p => q\n", None).unwrap();
        let w = derivation_in_base(&b, &set(&["p"]), &a("q")).unwrap();
        assert_eq!(w.size(), 2);
        assert_eq!(
            w.open_assumptions().unwrap(),
            [Formula::atom("p")].into_iter().collect()
        );
        let ax = parse_base("=> p\n", None).unwrap();
        let w = derivation_in_base(&ax, &BTreeSet::new(), &a("p")).unwrap();
        assert_eq!(w.size(), 1);
        assert!(matches!(w.rule, Rule::Base(_)));
        assert!(derivation_in_base(&b, &BTreeSet::new(), &a("q")).is_none());
    }

    #[test]
    fn level_mismatch_rejected() {
        let r = parse_rule("(p > q) => c").unwrap();
        assert!(Base::new(Level::One, [r.clone()]).is_err());
        assert!(Base::new(Level::Two, [r]).is_ok());
    }

    #[test]
    fn premise_sets() {
        let r1 = AtomicRule::flat([a("q"), a("p"), a("p")], a("c"));
        let r2 = AtomicRule::flat([a("p"), a("q")], a("c"));
        assert_eq!(r1, r2);
        assert_eq!(r1.premises().len(), 2);
    }

    // Independent top-down search, bounded by derivation height.
    fn derivable_by_depth(base: &Base, s: &BTreeSet<Atom>, goal: &Atom, depth: usize) -> bool {
        if s.contains(goal) {
            return true;
        }
        if depth == 0 {
            return false;
        }
        base.rules().filter(|r| r.conclusion() == goal).any(|r| {
            r.premises().iter().all(|p| {
                let ext: BTreeSet<Atom> = s.union(&p.hypotheses).cloned().collect();
                derivable_by_depth(base, &ext, &p.atom, depth - 1)
            })
        })
    }

    #[test]
    fn fixpoint_matches_bounded_search() {
        let alphabet = set(&["p", "q", "r"]);
        let bounds = ExtensionBounds {
            max_rules: 2,
            max_premises: 2,
            max_hyps: 1,
            level: Level::Two,
        };
        let empty = Base::empty(Level::Two);
        let mut checked = 0;
        for base in enumerate_extensions(&empty, &alphabet, bounds).step_by(7) {
            for s in [set(&[]), set(&["p"]), set(&["q", "r"])] {
                for g in &alphabet {
                    let fast = derivable_atom(&base, &s, g);
                    assert_eq!(fast, derivable_by_depth(&base, &s, g, 6), "{base} {s:?} {g}");
                    assert_eq!(fast, slow_derivable(&base, &s, g));
                    let w = derivation_in_base(&base, &s, g);
                    assert_eq!(w.is_some(), fast);
                    if let Some(w) = w {
                        check_derivation(&w, &base, CalculusMode::NoEfq).unwrap();
                        let open = w.open_assumptions().unwrap();
                        assert!(open.iter().all(|f| f.as_atom().is_some_and(|x| s.contains(x))));
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn monotone_in_base_and_hypotheses() {
        let alphabet = set(&["p", "q"]);
        let bounds = ExtensionBounds {
            max_rules: 2,
            max_premises: 1,
            max_hyps: 1,
            level: Level::Two,
        };
        let bases: Vec<Base> =
            enumerate_extensions(&Base::empty(Level::Two), &alphabet, bounds).collect();
        for b in &bases {
            for c in bases.iter().filter(|c| b.is_subset_of(c)) {
                for g in &alphabet {
                    for s in [set(&[]), set(&["p"])] {
                        if derivable_atom(b, &s, g) {
                            assert!(derivable_atom(c, &s, g));
                            assert!(derivable_atom(b, &set(&["p", "q"]), g));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rule_as_formula() {
        let r = parse_rule("(p > q), (> r) => c").unwrap();
        assert_eq!(r.as_formula().to_string(), "(p -> q) -> r -> c");
    }
}
