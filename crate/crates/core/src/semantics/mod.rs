//! Support and satisfaction in a base.
//!
//! `supports` is decided through the prover; the clause-level evaluator in
//! [`clausal`] evaluates the support clauses literally over a bounded universe
//! of base extensions and exists to test that delegation.

mod clausal;
mod coherence;
mod universe;
mod validity;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bases::{Base, BaseError, Level};
use crate::proofs::CalculusMode;
use crate::prover::{Prover, ProverError};
use crate::syntax::{conjoin, Atom, Formula};

pub use clausal::{supports_clausal, Clause, ClauseVerdict, Counterexample, Evaluator};
pub use coherence::{check_clause_coherence, CoherenceConfig, CoherenceReport, InstanceRecord, Verdict};
pub use universe::Universe;
pub use validity::satisfies;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemanticsMode {
    /// Level-1 bases, ⊥ is never supported.
    PtV,
    /// Level-2 bases, ⊥ is supported where every atom of the alphabet is.
    Sandqvist,
}

impl SemanticsMode {
    pub fn level(self) -> Level {
        match self {
            SemanticsMode::PtV => Level::One,
            SemanticsMode::Sandqvist => Level::Two,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SemanticsMode::PtV => "ptv",
            SemanticsMode::Sandqvist => "sandqvist",
        }
    }
}

impl fmt::Display for SemanticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemanticsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ptv" => Ok(SemanticsMode::PtV),
            "sandqvist" => Ok(SemanticsMode::Sandqvist),
            other => Err(format!("unknown mode `{other}` (expected ptv or sandqvist)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("{mode} semantics does not admit a level-{level} base")]
    ModeMismatch { mode: SemanticsMode, level: Level },
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error("extension universe too large: {0}")]
    UniverseTooLarge(String),
    #[error("malformed argument: {0}")]
    Malformed(String),
}

fn check_mode(base: &Base, mode: SemanticsMode) -> Result<(), SemanticsError> {
    if mode == SemanticsMode::PtV && base.level() == Level::Two {
        return Err(SemanticsError::ModeMismatch {
            mode,
            level: base.level(),
        });
    }
    Ok(())
}

/// The finite stand-in for the ambient atom set: declared atoms plus `reserve`
/// fresh atoms. Instance and base atoms are added when a judgment is made.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkingAlphabet {
    declared: BTreeSet<Atom>,
    reserve: usize,
}

const RESERVE_NAMES: &[&str] = &["r", "s", "t", "u", "v", "w", "x", "y", "z"];

fn fresh_atoms(used: &BTreeSet<Atom>, n: usize) -> Vec<Atom> {
    let mut out = Vec::new();
    let mut round = 0usize;
    while out.len() < n {
        for name in RESERVE_NAMES {
            let name = if round == 0 {
                name.to_string()
            } else {
                format!("{name}{round}")
            };
            let a = Atom::named(&name);
            if !used.contains(&a) && !out.contains(&a) {
                out.push(a);
                if out.len() == n {
                    break;
                }
            }
        }
        round += 1;
    }
    out
}

impl WorkingAlphabet {
    pub fn new(declared: impl IntoIterator<Item = Atom>, reserve: usize) -> Self {
        WorkingAlphabet {
            declared: declared.into_iter().collect(),
            reserve,
        }
    }

    /// Reserve defaults to 0 when atoms are declared and to 1 otherwise.
    pub fn with_default_reserve(declared: Option<BTreeSet<Atom>>, reserve: Option<usize>) -> Self {
        match declared {
            Some(atoms) => WorkingAlphabet::new(atoms, reserve.unwrap_or(0)),
            None => WorkingAlphabet::new([], reserve.unwrap_or(1)),
        }
    }

    pub fn declared(&self) -> &BTreeSet<Atom> {
        &self.declared
    }

    pub fn reserve(&self) -> usize {
        self.reserve
    }

    /// Declared ∪ instance atoms, followed by the reserve atoms.
    pub fn resolve<'a>(
        &self,
        base: &Base,
        formulas: impl IntoIterator<Item = &'a Formula>,
    ) -> BTreeSet<Atom> {
        let mut atoms = self.declared.clone();
        atoms.extend(base.atoms());
        for f in formulas {
            f.collect_atoms(&mut atoms);
        }
        let extra = fresh_atoms(&atoms, self.reserve);
        atoms.extend(extra);
        atoms
    }
}

/// An atom outside `atoms`, standing for the rest of the ambient atom set.
pub fn sink_atom(atoms: &BTreeSet<Atom>) -> Atom {
    let mut i = 0;
    loop {
        let name = if i == 0 { "sink".to_string() } else { format!("sink{i}") };
        let a = Atom::named(&name);
        if !atoms.contains(&a) {
            return a;
        }
        i += 1;
    }
}

/// Decides support for one fixed base, reusing prover memo tables.
pub struct SupportOracle {
    mode: SemanticsMode,
    bot: Formula,
    prover: Prover,
}

impl SupportOracle {
    /// `atoms` is the resolved working alphabet (only used in Sandqvist mode).
    pub fn new(base: &Base, mode: SemanticsMode, atoms: &BTreeSet<Atom>) -> Result<Self, SemanticsError> {
        check_mode(base, mode)?;
        let bot = conjoin(atoms.iter().map(|a| Formula::Atom(a.clone())).collect::<Vec<_>>().iter());
        Ok(SupportOracle {
            mode,
            bot,
            prover: Prover::new(base, CalculusMode::Efq),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.prover = self.prover.with_budget(budget);
        self
    }

    fn translate(&self, f: &Formula) -> Formula {
        match self.mode {
            SemanticsMode::PtV => f.clone(),
            SemanticsMode::Sandqvist => f.replace_bot(&self.bot),
        }
    }

    pub fn supports(&mut self, gamma: &BTreeSet<Formula>, phi: &Formula) -> Result<bool, ProverError> {
        match self.mode {
            SemanticsMode::PtV => self.prover.proves(gamma, phi),
            SemanticsMode::Sandqvist => {
                let g = gamma.iter().map(|f| self.translate(f)).collect();
                let p = self.translate(phi);
                self.prover.proves(&g, &p)
            }
        }
    }

    /// A natural-deduction witness (ex falso admitted) for `Γ : φ`.
    pub fn witness(
        &mut self,
        gamma: &BTreeSet<Formula>,
        phi: &Formula,
    ) -> Result<Option<crate::proofs::Argument>, ProverError> {
        self.prover.derive(gamma, phi)
    }
}

/// `Γ ⊩_B φ`.
pub fn supports(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: SemanticsMode,
    alphabet: &WorkingAlphabet,
) -> Result<bool, SemanticsError> {
    let atoms = alphabet.resolve(base, gamma.iter().chain([phi]));
    Ok(SupportOracle::new(base, mode, &atoms)?.supports(gamma, phi)?)
}

/// Support in every base, i.e. in the empty base.
pub fn entails(
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: SemanticsMode,
    alphabet: &WorkingAlphabet,
) -> Result<bool, SemanticsError> {
    supports(&Base::empty(mode.level()), gamma, phi, mode, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{derivable_atom, enumerate_extensions, parse_base, ExtensionBounds};
    use crate::syntax::{formulas_up_to_depth, parse_formula, parse_sequent};

    fn sup(base: &Base, s: &str, mode: SemanticsMode, alphabet: &WorkingAlphabet) -> bool {
        let s = parse_sequent(s).unwrap();
        supports(base, &s.context, &s.extract, mode, alphabet).unwrap()
    }

    fn pq() -> WorkingAlphabet {
        WorkingAlphabet::new([Atom::named("p"), Atom::named("q")], 0)
    }

    #[test]
    fn bot_clauses() {
        let empty1 = Base::empty(Level::One);
        assert!(!sup(&empty1, " : bot", SemanticsMode::PtV, &pq()));
        let b = parse_base("=> p\n=> q\n", None).unwrap().lifted();
        assert!(sup(&b, " : bot", SemanticsMode::Sandqvist, &pq()));
        // one reserve atom is enough to make ⊥ unsupported again
        let wide = WorkingAlphabet::new([Atom::named("p"), Atom::named("q")], 1);
        assert!(!sup(&b, " : bot", SemanticsMode::Sandqvist, &wide));
    }

    #[test]
    fn disjunctive_syllogism_in_both_modes() {
        let a = WorkingAlphabet::with_default_reserve(None, None);
        assert!(sup(&Base::empty(Level::One), "p | q, ~p : q", SemanticsMode::PtV, &a));
        assert!(sup(&Base::empty(Level::Two), "p | q, ~p : q", SemanticsMode::Sandqvist, &a));
    }

    #[test]
    fn mode_mismatch() {
        let b = parse_base("(p > q) => c", None).unwrap();
        let s = parse_sequent(" : c").unwrap();
        assert!(matches!(
            supports(&b, &s.context, &s.extract, SemanticsMode::PtV, &pq()),
            Err(SemanticsError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn entailment() {
        let a = WorkingAlphabet::default();
        let f = |s: &str| parse_formula(s).unwrap();
        let none = BTreeSet::new();
        assert!(entails(&none, &f("p -> p"), SemanticsMode::PtV, &a).unwrap());
        assert!(!entails(&none, &f("p | ~p"), SemanticsMode::PtV, &a).unwrap());
        let bot: BTreeSet<Formula> = [Formula::Bot].into_iter().collect();
        assert!(entails(&bot, &f("p"), SemanticsMode::PtV, &a).unwrap());
        assert!(entails(&bot, &f("p"), SemanticsMode::Sandqvist, &a).unwrap());
    }

    #[test]
    fn sandqvist_bot_matches_atom_derivability() {
        let ab: BTreeSet<Atom> = pq().declared().clone();
        let bounds = ExtensionBounds {
            max_rules: 2,
            max_premises: 1,
            max_hyps: 1,
            level: Level::Two,
        };
        for b in enumerate_extensions(&Base::empty(Level::Two), &ab, bounds) {
            let expected = ab.iter().all(|a| derivable_atom(&b, &BTreeSet::new(), a));
            assert_eq!(sup(&b, " : bot", SemanticsMode::Sandqvist, &pq()), expected, "{b}");
        }
    }

    #[test]
    fn clause_properties_in_ptv() {
        let atoms = [Atom::named("p"), Atom::named("q")];
        let formulas = formulas_up_to_depth(&atoms, true, 1);
        let ab: BTreeSet<Atom> = atoms.iter().cloned().collect();
        let none = BTreeSet::new();
        for b in enumerate_extensions(&Base::empty(Level::One), &ab, ExtensionBounds::level1(1, 2)) {
            let atoms = pq().resolve(&b, formulas.iter());
            let mut o = SupportOracle::new(&b, SemanticsMode::PtV, &atoms).unwrap();
            for x in &formulas {
                for y in formulas.iter().step_by(3) {
                    let both = o.supports(&none, &Formula::and(x.clone(), y.clone())).unwrap();
                    assert_eq!(both, o.supports(&none, x).unwrap() && o.supports(&none, y).unwrap());
                    let ctx: BTreeSet<Formula> = [x.clone()].into_iter().collect();
                    assert_eq!(
                        o.supports(&none, &Formula::imp(x.clone(), y.clone())).unwrap(),
                        o.supports(&ctx, y).unwrap()
                    );
                }
                if let Some(a) = x.as_atom() {
                    assert_eq!(o.supports(&none, x).unwrap(), derivable_atom(&b, &none.iter().filter_map(|f: &Formula| f.as_atom().cloned()).collect(), a));
                }
            }
        }
    }

    #[test]
    fn reserve_names_skip_used_atoms() {
        let used: BTreeSet<Atom> = ["p", "r", "t"].iter().map(|n| Atom::named(n)).collect();
        let names: Vec<String> = fresh_atoms(&used, 3).iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["s", "u", "v"]);
        assert_eq!(sink_atom(&used).name(), "sink");
    }
}
