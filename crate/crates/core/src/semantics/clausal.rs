use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{SemanticsError, SemanticsMode, SupportOracle, Universe, WorkingAlphabet};
use crate::bases::{Base, ExtensionBounds, Level};
use crate::prover::default_budget;
use crate::syntax::{Atom, Formula};

/// The support clause whose body a counterexample falsifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    Atom,
    Bot,
    And,
    Imp,
    Or,
    /// `Γ ⊩ φ` with non-empty `Γ`.
    Context,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::Atom => "atom",
            Clause::Bot => "bot",
            Clause::And => "and",
            Clause::Imp => "imp",
            Clause::Or => "or",
            Clause::Context => "context",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// The extension at which the clause body is unmet.
    pub extension: Base,
    /// The atom instantiating the clause, where there is one.
    pub atom: Option<Atom>,
    pub clause: Clause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseVerdict {
    Holds,
    Fails(Counterexample),
    /// No counterexample within the bound, but the prover does not confirm.
    Inconclusive(String),
}

impl ClauseVerdict {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, ClauseVerdict::Inconclusive(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClauseVerdict::Holds => "holds",
            ClauseVerdict::Fails(_) => "fails",
            ClauseVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

impl fmt::Display for ClauseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseVerdict::Holds => f.write_str("holds"),
            ClauseVerdict::Fails(c) => {
                let rules: Vec<String> = c.extension.rules().map(|r| r.to_string()).collect();
                write!(f, "fails ({} clause at {{{}}}", c.clause.name(), rules.join("; "))?;
                if let Some(a) = &c.atom {
                    write!(f, ", atom {a}")?;
                }
                f.write_str(")")
            }
            ClauseVerdict::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Cell {
    Holds,
    Fails { ext: u32, atom: Option<Atom>, clause: Clause },
    Open,
}

/// Evaluates the support clauses over a [`Universe`], memoising one column
/// (a value per member) per formula.
///
/// A universally quantified clause that survives the bound is reported as
/// holding only if the support oracle agrees; otherwise it is left open.
pub struct Evaluator<'u> {
    pub(super) u: &'u Universe,
    pub(super) mode: SemanticsMode,
    budget: u64,
    oracles: Vec<Option<SupportOracle>>,
    ids: HashMap<Formula, usize>,
    forms: Vec<Formula>,
    columns: Vec<Vec<Cell>>,
    entails_atom: HashMap<(usize, usize), Vec<Cell>>,
    pub(super) witnesses: HashMap<(u32, Formula), Option<crate::proofs::Argument>>,
    pub(super) valid: HashMap<(u32, crate::proofs::Argument), bool>,
    /// Satisfaction checks look at extensions adding at most this many rules.
    pub sat_extra: u32,
}

impl<'u> Evaluator<'u> {
    pub fn new(u: &'u Universe, mode: SemanticsMode) -> Result<Self, SemanticsError> {
        if mode == SemanticsMode::PtV && u.level() == Level::Two {
            return Err(SemanticsError::ModeMismatch { mode, level: Level::Two });
        }
        Ok(Evaluator {
            u,
            mode,
            budget: default_budget(),
            oracles: (0..u.len()).map(|_| None).collect(),
            ids: HashMap::new(),
            forms: Vec::new(),
            columns: Vec::new(),
            entails_atom: HashMap::new(),
            witnesses: HashMap::new(),
            valid: HashMap::new(),
            sat_extra: u32::MAX,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn universe(&self) -> &'u Universe {
        self.u
    }

    pub fn oracle(&mut self, i: usize) -> &mut SupportOracle {
        let (u, mode, budget) = (self.u, self.mode, self.budget);
        self.oracles[i].get_or_insert_with(|| {
            SupportOracle::new(u.base(i), mode, u.atoms())
                .expect("universe level checked against mode")
                .with_budget(budget)
        })
    }

    /// The support oracle's answer; a budget overrun counts as "no".
    pub(super) fn bridge(&mut self, i: usize, gamma: &BTreeSet<Formula>, phi: &Formula) -> bool {
        self.oracle(i).supports(gamma, phi).unwrap_or(false)
    }

    fn id(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.ids.get(f) {
            return i;
        }
        let column = self.compute(f);
        let i = self.columns.len();
        self.columns.push(column);
        self.forms.push(f.clone());
        self.ids.insert(f.clone(), i);
        i
    }

    fn compute(&mut self, f: &Formula) -> Vec<Cell> {
        let u = self.u;
        let n = u.len();
        match f {
            Formula::Atom(a) => (0..n)
                .map(|d| {
                    if self.u.derived(d).contains(a) {
                        Cell::Holds
                    } else {
                        Cell::Fails { ext: d as u32, atom: Some(a.clone()), clause: Clause::Atom }
                    }
                })
                .collect(),
            Formula::Bot => (0..n)
                .map(|d| match self.mode {
                    SemanticsMode::PtV => Cell::Fails { ext: d as u32, atom: None, clause: Clause::Bot },
                    SemanticsMode::Sandqvist => match self.u.atoms().iter().find(|a| !self.u.derived(d).contains(*a)) {
                        None => Cell::Holds,
                        Some(a) => Cell::Fails { ext: d as u32, atom: Some(a.clone()), clause: Clause::Bot },
                    },
                })
                .collect(),
            Formula::And(a, b) => {
                let (ia, ib) = (self.id(a), self.id(b));
                (0..n)
                    .map(|d| match (&self.columns[ia][d], &self.columns[ib][d]) {
                        (Cell::Holds, Cell::Holds) => Cell::Holds,
                        (Cell::Fails { ext, atom, .. }, _) | (_, Cell::Fails { ext, atom, .. }) => {
                            Cell::Fails { ext: *ext, atom: atom.clone(), clause: Clause::And }
                        }
                        _ => Cell::Open,
                    })
                    .collect()
            }
            Formula::Imp(a, b) => {
                let (ia, ib) = (self.id(a), self.id(b));
                let gamma: BTreeSet<Formula> = [(**a).clone()].into_iter().collect();
                (0..n)
                    .map(|d| self.context_clause(d, &[ia], ib, &gamma, b, Clause::Imp))
                    .collect()
            }
            Formula::Or(a, b) => {
                let (ia, ib) = (self.id(a), self.id(b));
                let mut atoms: Vec<Atom> = self.u.atoms().iter().cloned().collect();
                atoms.push(self.u.sink().clone());
                let mut ids = Vec::new();
                for p in &atoms {
                    let ip = self.id(&Formula::Atom(p.clone()));
                    self.entails_atom(ia, ip);
                    self.entails_atom(ib, ip);
                    ids.push(ip);
                }
                (0..n)
                    .map(|d| {
                        for &e in u.supersets(d) {
                            let e = e as usize;
                            for (k, &ip) in ids.iter().enumerate() {
                                let met = self.columns[ip][e] == Cell::Holds;
                                if !met
                                    && self.entails_atom[&(ia, ip)][e] == Cell::Holds
                                    && self.entails_atom[&(ib, ip)][e] == Cell::Holds
                                {
                                    return Cell::Fails {
                                        ext: e as u32,
                                        atom: Some(atoms[k].clone()),
                                        clause: Clause::Or,
                                    };
                                }
                            }
                        }
                        if self.bridge(d, &BTreeSet::new(), f) {
                            Cell::Holds
                        } else {
                            Cell::Open
                        }
                    })
                    .collect()
            }
        }
    }

    /// The column of `{a} ⊩ p`, computed once.
    fn entails_atom(&mut self, ia: usize, ip: usize) {
        if self.entails_atom.contains_key(&(ia, ip)) {
            return;
        }
        let a = self.formula(ia);
        let p = self.formula(ip);
        let gamma: BTreeSet<Formula> = [a].into_iter().collect();
        let column = (0..self.u.len())
            .map(|d| self.context_clause(d, &[ia], ip, &gamma, &p, Clause::Context))
            .collect();
        self.entails_atom.insert((ia, ip), column);
    }

    fn formula(&self, i: usize) -> Formula {
        self.forms[i].clone()
    }

    /// `Γ ⊩_D φ` for non-empty `Γ`: every member above `D` supporting all of
    /// `Γ` supports `φ`.
    fn context_clause(
        &mut self,
        d: usize,
        ants: &[usize],
        cons: usize,
        gamma: &BTreeSet<Formula>,
        phi: &Formula,
        clause: Clause,
    ) -> Cell {
        let u = self.u;
        for &e in u.supersets(d) {
            let e = e as usize;
            if ants.iter().all(|&a| self.columns[a][e] == Cell::Holds) {
                if let Cell::Fails { atom, .. } = &self.columns[cons][e] {
                    return Cell::Fails { ext: e as u32, atom: atom.clone(), clause };
                }
            }
        }
        if self.bridge(d, gamma, phi) {
            Cell::Holds
        } else {
            Cell::Open
        }
    }

    /// `Γ ⊩_{C_i} φ` for member `i`.
    pub fn evaluate(&mut self, i: usize, gamma: &BTreeSet<Formula>, phi: &Formula) -> ClauseVerdict {
        let cons = self.id(phi);
        let cell = if gamma.is_empty() {
            self.columns[cons][i].clone()
        } else {
            let ants: Vec<usize> = gamma.iter().map(|g| self.id(g)).collect();
            self.context_clause(i, &ants, cons, gamma, phi, Clause::Context)
        };
        self.verdict(cell)
    }

    fn verdict(&self, cell: Cell) -> ClauseVerdict {
        match cell {
            Cell::Holds => ClauseVerdict::Holds,
            Cell::Fails { ext, atom, clause } => ClauseVerdict::Fails(Counterexample {
                extension: self.u.base(ext as usize).clone(),
                atom,
                clause,
            }),
            Cell::Open => ClauseVerdict::Inconclusive(format!(
                "{} extensions over {} atoms",
                self.u.len(),
                self.u.atoms().len()
            )),
        }
    }
}

/// Evaluates `Γ ⊩_B φ` clause by clause, with every ∀C ranging over the
/// extensions of `base` within `bounds`.
pub fn supports_clausal(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: SemanticsMode,
    bounds: ExtensionBounds,
    alphabet: &WorkingAlphabet,
) -> Result<ClauseVerdict, SemanticsError> {
    let atoms = alphabet.resolve(base, gamma.iter().chain([phi]));
    let bounds = ExtensionBounds {
        level: bounds.level.max(mode.level()),
        ..bounds
    };
    let u = Universe::new(base, atoms, bounds)?;
    let mut ev = Evaluator::new(&u, mode)?;
    Ok(ev.evaluate(0, gamma, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{enumerate_extensions, parse_base};
    use crate::semantics::supports;
    use crate::syntax::{formulas_up_to_depth, parse_sequent};

    fn pq() -> WorkingAlphabet {
        WorkingAlphabet::new([Atom::named("p"), Atom::named("q")], 0)
    }

    fn clausal(base: &Base, s: &str, bounds: ExtensionBounds) -> ClauseVerdict {
        let s = parse_sequent(s).unwrap();
        supports_clausal(base, &s.context, &s.extract, SemanticsMode::PtV, bounds, &pq()).unwrap()
    }

    #[test]
    fn quantifier_free_clauses() {
        let b = parse_base("=> p\n=> q\n", None).unwrap();
        let tiny = ExtensionBounds::level1(0, 0);
        assert_eq!(clausal(&b, " : p & q", tiny), ClauseVerdict::Holds);
        assert_eq!(clausal(&b, " : p -> p", tiny), ClauseVerdict::Holds);
        let e = Base::empty(Level::One);
        match clausal(&e, " : p & q", tiny) {
            ClauseVerdict::Fails(c) => {
                assert_eq!(c.clause, Clause::And);
                assert_eq!(c.atom, Some(Atom::named("p")));
            }
            v => panic!("{v}"),
        }
    }

    #[test]
    fn disjunction_refuted_in_empty_base() {
        let e = Base::empty(Level::One);
        // nothing to extend with: the body is never met
        assert!(!clausal(&e, " : p | q", ExtensionBounds::level1(1, 0)).is_decisive());
        // {p => q} supports q from p and from q, but not q (or symmetrically)
        match clausal(&e, " : p | q", ExtensionBounds::level1(1, 1)) {
            ClauseVerdict::Fails(c) => {
                assert_eq!(c.clause, Clause::Or);
                let a = c.atom.unwrap();
                let other = if a.name() == "p" { "q" } else { "p" };
                assert_eq!(c.extension.to_string(), format!("{other} => {a}\n"));
            }
            v => panic!("{v}"),
        }
    }

    #[test]
    fn sink_blocks_vacuous_disjunctions() {
        // every extension derives p, so ~p is never supported anywhere above {=> p}
        let b = parse_base("=> p", None).unwrap();
        assert!(matches!(
            clausal(&b, " : ~p | ~p", ExtensionBounds::level1(1, 1)),
            ClauseVerdict::Fails(Counterexample { clause: Clause::Or, .. })
        ));
    }

    #[test]
    fn context_clause() {
        let e = Base::empty(Level::One);
        let b = ExtensionBounds::level1(1, 1);
        assert_eq!(clausal(&e, "bot : p", b), ClauseVerdict::Holds);
        assert_eq!(clausal(&e, "p | q, ~p : q", b), ClauseVerdict::Holds);
        match clausal(&e, "p : q", b) {
            ClauseVerdict::Fails(c) => assert_eq!(c.extension.to_string(), "=> p\n"),
            v => panic!("{v}"),
        }
    }

    #[test]
    fn decisive_verdicts_agree_with_support() {
        let ab: BTreeSet<Atom> = pq().declared().clone();
        let forms = formulas_up_to_depth(&ab.iter().cloned().collect::<Vec<_>>(), true, 1);
        let u = Universe::new(&Base::empty(Level::One), ab.clone(), ExtensionBounds::level1(8, 2)).unwrap();
        let mut ev = Evaluator::new(&u, SemanticsMode::PtV).unwrap();
        let none = BTreeSet::new();
        let mut decisive = 0;
        for b in enumerate_extensions(&Base::empty(Level::One), &ab, ExtensionBounds::level1(2, 2)) {
            let i = u.position(&b).unwrap();
            for x in &forms {
                for y in &forms {
                    let phi = Formula::or(x.clone(), y.clone());
                    let v = ev.evaluate(i, &none, &phi);
                    let s = supports(&b, &none, &phi, SemanticsMode::PtV, &pq()).unwrap();
                    match v {
                        ClauseVerdict::Holds => assert!(s, "{b}{phi}"),
                        ClauseVerdict::Fails(_) => assert!(!s, "{b}{phi}"),
                        ClauseVerdict::Inconclusive(_) => continue,
                    }
                    decisive += 1;
                }
            }
        }
        assert!(decisive > 0);
    }

    #[test]
    fn sandqvist_bot_clause() {
        let bounds = ExtensionBounds {
            max_rules: 1,
            max_premises: 1,
            max_hyps: 1,
            level: Level::Two,
        };
        let b = parse_base("=> p\n=> q\n", None).unwrap();
        let s = parse_sequent(" : bot").unwrap();
        let v = supports_clausal(&b, &s.context, &s.extract, SemanticsMode::Sandqvist, bounds, &pq()).unwrap();
        assert_eq!(v, ClauseVerdict::Holds);
        let e = Base::empty(Level::Two);
        let v = supports_clausal(&e, &s.context, &s.extract, SemanticsMode::Sandqvist, bounds, &pq()).unwrap();
        assert!(matches!(v, ClauseVerdict::Fails(Counterexample { clause: Clause::Bot, .. })));
    }
}
