//! Validity of arguments in a base.
//!
//! Closed arguments are normalised and decomposed by their last introduction;
//! open ones are closed off with prover witnesses for their assumptions in
//! every extension (within the bound) supporting those assumptions.

use std::collections::BTreeSet;

use super::{Evaluator, SemanticsError, SemanticsMode, Universe, WorkingAlphabet};
use crate::bases::{Base, ExtensionBounds};
use crate::proofs::{check_derivation, cut, Argument, CalculusMode, Label, Rule};
use crate::reduction::{normalize, DEFAULT_STEP_BUDGET};
use crate::syntax::Formula;

fn is_base_derivation(a: &Argument) -> bool {
    !a.uses_rule(&|r| !matches!(r, Rule::Base(_) | Rule::Assume))
}

/// The premise subtree with the leaves bound by slot `i` turned into open assumptions.
fn opened(a: &Argument, i: usize) -> Argument {
    fn unbind(a: &Argument, label: Label) -> Argument {
        if a.is_leaf() {
            return if a.label == Some(label) {
                Argument::assume(a.conclusion.clone())
            } else {
                a.clone()
            };
        }
        Argument {
            premises: a
                .premises
                .iter()
                .enumerate()
                .map(|(k, p)| if a.slot(k) == Some(label) { p.clone() } else { unbind(p, label) })
                .collect(),
            ..a.clone()
        }
    }
    match a.slot(i) {
        Some(l) => unbind(&a.premises[i], l),
        None => a.premises[i].clone(),
    }
}

impl Evaluator<'_> {
    fn witness(&mut self, e: usize, f: &Formula) -> Option<Argument> {
        let key = (e as u32, f.clone());
        if let Some(w) = self.witnesses.get(&key) {
            return w.clone();
        }
        let w = self.oracle(e).witness(&BTreeSet::new(), f).ok().flatten();
        self.witnesses.insert(key, w.clone());
        w
    }

    fn near(&self, d: usize) -> Vec<usize> {
        let u = self.u;
        u.supersets(d)
            .iter()
            .map(|&e| e as usize)
            .filter(|&e| u.distance(d, e) <= self.sat_extra)
            .collect()
    }

    /// `arg` is valid for `hyps : arg.conclusion` at member `d`: in every
    /// nearby extension supporting `hyps`, closing `arg` off with witnesses
    /// yields a valid closed argument.
    fn open_valid(&mut self, d: usize, arg: &Argument, hyps: &BTreeSet<Formula>) -> bool {
        let Ok(open) = arg.open_assumptions() else {
            return false;
        };
        for e in self.near(d) {
            if !hyps.iter().all(|h| self.bridge(e, &BTreeSet::new(), h)) {
                continue;
            }
            let mut closures = Vec::new();
            for h in &open {
                match self.witness(e, h) {
                    Some(w) => closures.push((h.clone(), w)),
                    None => break,
                }
            }
            if closures.len() < open.len() {
                // supported without a witness: nothing to cut in
                continue;
            }
            let Ok(closed) = cut(&closures, arg) else {
                return false;
            };
            if !self.closed_valid(e, &closed) {
                return false;
            }
        }
        true
    }

    fn closed_valid(&mut self, e: usize, a: &Argument) -> bool {
        let key = (e as u32, a.clone());
        if let Some(&v) = self.valid.get(&key) {
            return v;
        }
        let v = self.closed_valid_uncached(e, a);
        self.valid.insert(key, v);
        v
    }

    fn closed_valid_uncached(&mut self, e: usize, a: &Argument) -> bool {
        let Ok(n) = normalize(a, DEFAULT_STEP_BUDGET) else {
            return false;
        };
        if is_base_derivation(&n) {
            return check_derivation(&n, self.u.base(e), CalculusMode::Efq).is_ok();
        }
        match (&n.rule, &n.conclusion) {
            (Rule::AndI, _) => self.closed_valid(e, &n.premises[0]) && self.closed_valid(e, &n.premises[1]),
            (Rule::OrI1 | Rule::OrI2, _) => self.closed_valid(e, &n.premises[0]),
            (Rule::ImpI, Formula::Imp(ante, _)) => {
                let body = opened(&n, 0);
                let hyps = [(**ante).clone()].into_iter().collect();
                self.open_valid(e, &body, &hyps)
            }
            (Rule::Base(r), _) => {
                let prems = r.premises().to_vec();
                prems.iter().enumerate().all(|(i, p)| {
                    let body = opened(&n, i);
                    let hyps = p.hypotheses.iter().cloned().map(Formula::Atom).collect();
                    self.open_valid(e, &body, &hyps)
                })
            }
            _ => false,
        }
    }

    /// `arg` is a valid argument for `Γ : φ` in member `i`.
    pub fn satisfies_at(
        &mut self,
        i: usize,
        arg: &Argument,
        gamma: &BTreeSet<Formula>,
        phi: &Formula,
    ) -> Result<bool, SemanticsError> {
        let open = arg
            .open_assumptions()
            .map_err(|e| SemanticsError::Malformed(e.to_string()))?;
        if &arg.conclusion != phi || !open.is_subset(gamma) {
            return Ok(false);
        }
        if check_derivation(arg, self.u.base(i), CalculusMode::Efq).is_err() {
            return Ok(false);
        }
        let arg = arg
            .canonical()
            .map_err(|e| SemanticsError::Malformed(e.to_string()))?;
        Ok(if open.is_empty() {
            self.closed_valid(i, &arg)
        } else {
            self.open_valid(i, &arg, &open)
        })
    }
}

/// `arg` is a `base`-valid argument for `Γ : φ`, falsification being
/// searched among the extensions within `bounds`.
pub fn satisfies(
    arg: &Argument,
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: SemanticsMode,
    alphabet: &WorkingAlphabet,
    bounds: ExtensionBounds,
) -> Result<bool, SemanticsError> {
    let atoms = alphabet.resolve(base, gamma.iter().chain([phi]));
    let bounds = ExtensionBounds {
        level: bounds.level.max(mode.level()),
        ..bounds
    };
    let u = Universe::new(base, atoms, bounds)?;
    let mut ev = Evaluator::new(&u, mode)?;
    ev.satisfies_at(0, arg, gamma, phi)
}
