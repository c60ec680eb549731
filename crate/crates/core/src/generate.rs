//! Seeded random derivations in NJ plus base rules, rich in detours of every
//! kind (∧, →, ∨, permutative, ⊥). Used to exercise normalisation.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bases::{parse_base, Base};
use crate::proofs::{Argument, CalculusMode, Label, Rule};
use crate::prover::Prover;
use crate::syntax::{Atom, Formula};

/// A small base with axioms, so that closed derivations exist:
/// `=> p`, `=> q`, `p, q => r`, `s => r`.
pub fn generator_base() -> Base {
    parse_base("=> p\n=> q\np, q => r\ns => r\n", None).expect("fixed base parses")
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_nodes: usize,
    /// Recursion depth before falling back to leaves and prover witnesses.
    pub fuel: usize,
    /// Every leaf is discharged (or the derivation is a pure witness).
    pub closed: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nodes: 200,
            fuel: 5,
            closed: false,
        }
    }
}

pub struct DerivationGenerator {
    rng: ChaCha8Rng,
    base: Base,
    prover: Prover,
    atoms: Vec<Atom>,
    next_label: Label,
    config: GenConfig,
}

type Env = Vec<(Formula, Label)>;

impl DerivationGenerator {
    pub fn new(seed: u64, base: Base, config: GenConfig) -> Self {
        let mut atoms: Vec<Atom> = base.atoms().into_iter().collect();
        if atoms.is_empty() {
            atoms = vec![Atom::named("p"), Atom::named("q")];
        }
        DerivationGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            prover: Prover::new(&base, CalculusMode::Efq).with_budget(20_000),
            base,
            atoms,
            next_label: 1,
            config,
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    fn fresh(&mut self) -> Label {
        self.next_label += 1;
        self.next_label
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            if self.rng.gen_bool(0.05) {
                return Formula::Bot;
            }
            return Formula::Atom(self.atoms.choose(&mut self.rng).unwrap().clone());
        }
        let a = self.formula(depth - 1);
        let b = self.formula(depth - 1);
        match self.rng.gen_range(0..3) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::imp(a, b),
        }
    }

    fn env_set(env: &Env) -> BTreeSet<Formula> {
        env.iter().map(|(f, _)| f.clone()).collect()
    }

    /// A leaf or a prover witness whose open leaves are bound to `env`.
    fn close(&mut self, goal: &Formula, env: &Env) -> Option<Argument> {
        if let Some((f, l)) = env.iter().rev().find(|(f, _)| f == goal) {
            return Some(Argument::hypothesis(f.clone(), *l));
        }
        if !self.config.closed && self.rng.gen_bool(0.5) {
            return Some(Argument::assume(goal.clone()));
        }
        let w = self.prover.derive(&Self::env_set(env), goal).ok().flatten();
        match w {
            Some(mut w) => {
                // the witness uses labels from 1; move them clear of ours
                let (shifted, next) = w.relabel_from(self.next_label + 1).ok()?;
                self.next_label = next;
                w = shifted;
                for (f, l) in env.iter().rev() {
                    w = w.substitute_open(f, &Argument::hypothesis(f.clone(), *l));
                }
                Some(w)
            }
            None if !self.config.closed => Some(Argument::assume(goal.clone())),
            None => None,
        }
    }

    /// An auxiliary formula available in `env` (for closed derivations).
    fn side_formula(&mut self, env: &Env) -> Formula {
        for _ in 0..6 {
            let f = self.formula(1);
            if !self.config.closed || self.prover.proves(&Self::env_set(env), &f).unwrap_or(false) {
                return f;
            }
        }
        Formula::Atom(Atom::named("p"))
    }

    fn gen(&mut self, goal: &Formula, env: &Env, fuel: usize) -> Option<Argument> {
        if fuel == 0 {
            return self.close(goal, env);
        }
        let choice = self.rng.gen_range(0..10);
        let f = fuel - 1;
        let out = match (choice, goal) {
            // introductions on the goal's shape
            (0 | 1, Formula::And(a, b)) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                let l = self.gen(&a, env, f)?;
                let r = self.gen(&b, env, f)?;
                Argument::node(Rule::AndI, goal.clone(), vec![l, r])
            }
            (0 | 1, Formula::Or(a, b)) => {
                let left = self.rng.gen_bool(0.5);
                let side = if left { (**a).clone() } else { (**b).clone() };
                let rule = if left { Rule::OrI1 } else { Rule::OrI2 };
                match self.gen(&side, env, f) {
                    Some(p) => Argument::node(rule, goal.clone(), vec![p]),
                    None => return self.close(goal, env),
                }
            }
            (0 | 1, Formula::Imp(a, b)) => {
                let l = self.fresh();
                let mut inner = env.clone();
                inner.push(((**a).clone(), l));
                let body = self.gen(b, &inner, f)?;
                Argument::binder(Rule::ImpI, goal.clone(), vec![body], vec![Some(l)])
            }
            // ∧ detour
            (2, _) => {
                let side = self.side_formula(env);
                let l = self.gen(goal, env, f)?;
                let r = self.gen(&side, env, f)?;
                let pair = Argument::node(Rule::AndI, Formula::and(goal.clone(), side), vec![l, r]);
                Argument::node(Rule::AndE1, goal.clone(), vec![pair])
            }
            // → detour
            (3, _) => {
                let side = self.side_formula(env);
                let l = self.fresh();
                let mut inner = env.clone();
                inner.push((side.clone(), l));
                let body = self.gen(goal, &inner, f)?;
                let lam = Argument::binder(
                    Rule::ImpI,
                    Formula::imp(side.clone(), goal.clone()),
                    vec![body],
                    vec![Some(l)],
                );
                let arg = self.gen(&side, env, f)?;
                Argument::node(Rule::ImpE, goal.clone(), vec![arg, lam])
            }
            // ∨ detour
            (4, _) => {
                let side = self.side_formula(env);
                let other = self.formula(1);
                let disj = Formula::or(side.clone(), other.clone());
                let inj = Argument::node(Rule::OrI1, disj.clone(), vec![self.gen(&side, env, f)?]);
                self.or_elim(goal, inj, side, other, env, f)?
            }
            // permutative: an elimination below ∨E
            (5, _) => {
                let side = self.side_formula(env);
                let other = self.formula(1);
                let disj = Formula::or(side.clone(), other.clone());
                let major = match self.gen(&disj, env, f) {
                    Some(m) => m,
                    None => return self.close(goal, env),
                };
                let extra = self.side_formula(env);
                let conj = Formula::and(goal.clone(), extra);
                let case = self.or_elim(&conj, major, side, other, env, f)?;
                Argument::node(Rule::AndE1, goal.clone(), vec![case])
            }
            // ⊥ elimination below an elimination
            (6, _) if !self.config.closed => {
                let bot = self.gen(&Formula::Bot, env, f)?;
                let extra = self.formula(1);
                let conj = Formula::and(goal.clone(), extra);
                let efq = Argument::node(Rule::BotE, conj, vec![bot]);
                Argument::node(Rule::AndE1, goal.clone(), vec![efq])
            }
            // base rule
            (7 | 8, Formula::Atom(c)) => {
                let rules: Vec<_> = self.base.rules().filter(|r| r.conclusion() == c).cloned().collect();
                let Some(rule) = rules.choose(&mut self.rng).cloned() else {
                    return self.close(goal, env);
                };
                let mut premises = Vec::new();
                let mut slots = Vec::new();
                for p in rule.premises() {
                    let mut inner = env.clone();
                    let slot = (!p.hypotheses.is_empty()).then(|| self.fresh());
                    for h in &p.hypotheses {
                        inner.push((Formula::Atom(h.clone()), slot.unwrap()));
                    }
                    slots.push(slot);
                    premises.push(self.gen(&Formula::Atom(p.atom.clone()), &inner, f)?);
                }
                if slots.iter().all(Option::is_none) {
                    slots.clear();
                }
                Argument::binder(Rule::Base(rule), goal.clone(), premises, slots)
            }
            _ => return self.close(goal, env),
        };
        Some(out)
    }

    fn or_elim(
        &mut self,
        goal: &Formula,
        major: Argument,
        left: Formula,
        right: Formula,
        env: &Env,
        fuel: usize,
    ) -> Option<Argument> {
        let (l1, l2) = (self.fresh(), self.fresh());
        let mut e1 = env.clone();
        e1.push((left, l1));
        let mut e2 = env.clone();
        e2.push((right, l2));
        let b1 = self.gen(goal, &e1, fuel)?;
        let b2 = self.gen(goal, &e2, fuel)?;
        Some(Argument::binder(
            Rule::OrE,
            goal.clone(),
            vec![major, b1, b2],
            vec![None, Some(l1), Some(l2)],
        ))
    }

    /// A derivation of at most `max_nodes` nodes (open unless configured closed).
    pub fn derivation(&mut self) -> Argument {
        loop {
            let goal = self.formula(2);
            if self.config.closed && !self.prover.proves(&BTreeSet::new(), &goal).unwrap_or(false) {
                continue;
            }
            let fuel = self.rng.gen_range(1..=self.config.fuel);
            self.next_label = 0;
            if let Some(a) = self.gen(&goal, &Vec::new(), fuel) {
                if a.size() <= self.config.max_nodes {
                    return a.canonical().expect("generated labels are bound");
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::check_derivation;
    use crate::reduction::find_detours;

    #[test]
    fn derivations_are_well_formed() {
        let mut g = DerivationGenerator::new(7, generator_base(), GenConfig::default());
        let mut detours = 0;
        for _ in 0..200 {
            let a = g.derivation();
            check_derivation(&a, g.base(), CalculusMode::Efq).unwrap_or_else(|d| panic!("{d}\n{a}"));
            assert!(a.size() <= 200);
            detours += find_detours(&a).len();
        }
        assert!(detours > 100);
    }

    #[test]
    fn closed_mode_is_closed() {
        let config = GenConfig {
            closed: true,
            ..Default::default()
        };
        let mut g = DerivationGenerator::new(3, generator_base(), config);
        for _ in 0..100 {
            let a = g.derivation();
            assert!(a.is_closed(), "{a}");
            check_derivation(&a, g.base(), CalculusMode::Efq).unwrap();
        }
    }

    #[test]
    fn deterministic() {
        let mut a = DerivationGenerator::new(11, generator_base(), GenConfig::default());
        let mut b = DerivationGenerator::new(11, generator_base(), GenConfig::default());
        for _ in 0..20 {
            assert_eq!(a.derivation(), b.derivation());
        }
    }
}
