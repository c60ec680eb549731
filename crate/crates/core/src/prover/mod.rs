//! Decision procedure for `Γ ⊢_B φ` in NJ extended by an atomic base.
//!
//! Backward search in a contraction-free sequent calculus (G4ip). Level-1 base
//! rules fire forwards as invertible steps; level-2 rules are left rules with
//! obligations `Γ ∪ Σᵢ ⊢ pᵢ`, guarded by a loop check on pending obligations.
//! Successful searches are replayed into natural-deduction witnesses.

mod kripke;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::bases::{AtomicRule, Base, Level};
use crate::proofs::{Argument, CalculusMode, Label, Rule};
use crate::syntax::Formula;

pub use kripke::{refute, KripkeModel};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// The node budget, overridable through `PTSEM_BUDGET`.
pub fn default_budget() -> u64 {
    std::env::var("PTSEM_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("search budget of {0} nodes exceeded")]
    Budget(u64),
}

#[derive(Debug, Clone)]
pub struct ProverVerdict {
    pub decided: bool,
    pub witness: Option<Argument>,
    pub countermodel: Option<KripkeModel>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecideOptions {
    pub witness: bool,
    pub countermodel: bool,
    /// World bound for countermodel search.
    pub bound: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            witness: false,
            countermodel: false,
            bound: 4,
        }
    }
}

type P = Rc<Step>;

#[derive(Debug)]
enum Step {
    Init,
    BotL,
    /// `⊥ → B` under ex falso: never needed, dropped.
    Drop(P),
    AndL(Formula, P),
    OrL(Formula, P, P),
    ImpAtomL(Formula, P),
    ImpAndL(Formula, P),
    ImpOrL(Formula, P),
    ImpImpL(Formula, P, P),
    AndR(P, P),
    OrR1(P),
    OrR2(P),
    ImpR(P),
    BaseFire(AtomicRule, P),
    BaseL(AtomicRule, Vec<P>, P),
}

type Ctx = BTreeSet<Formula>;
type Key = (Vec<Formula>, Formula);
/// Search result plus whether a failure depended on the loop check.
type Found = (Option<P>, bool);
/// A left rule on an implication: the new context and how to wrap the subproof.
type ImpStep = (Ctx, fn(Formula, P) -> Step);

fn key(ctx: &Ctx, goal: &Formula) -> Key {
    (ctx.iter().cloned().collect(), goal.clone())
}

fn with(ctx: &Ctx, remove: &Formula, add: &[Formula]) -> Ctx {
    let mut out = ctx.clone();
    out.remove(remove);
    out.extend(add.iter().cloned());
    out
}

/// A search engine bound to one base and calculus; reuse it across queries
/// to share its memo table.
pub struct Prover {
    mode: CalculusMode,
    flat_rules: Vec<AtomicRule>,
    deep_rules: Vec<AtomicRule>,
    budget: u64,
    nodes: u64,
    memo: HashMap<Key, P>,
    refuted: std::collections::HashSet<Key>,
    pending: Vec<Key>,
}

impl Prover {
    pub fn new(base: &Base, mode: CalculusMode) -> Self {
        let (flat_rules, deep_rules) = base
            .rules()
            .cloned()
            .partition(|r| r.level() == Level::One);
        Prover {
            mode,
            flat_rules,
            deep_rules,
            budget: default_budget(),
            nodes: 0,
            memo: HashMap::new(),
            refuted: Default::default(),
            pending: Vec::new(),
        }
    }

    /// Budget per query, in search nodes.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn mode(&self) -> CalculusMode {
        self.mode
    }

    fn run(&mut self, gamma: &BTreeSet<Formula>, phi: &Formula) -> Result<Option<P>, ProverError> {
        self.nodes = 0;
        self.pending.clear();
        let r = self.search(gamma, phi);
        self.pending.clear();
        Ok(r?.0)
    }

    pub fn proves(&mut self, gamma: &BTreeSet<Formula>, phi: &Formula) -> Result<bool, ProverError> {
        Ok(self.run(gamma, phi)?.is_some())
    }

    /// A witness for `Γ : φ`, with open assumptions drawn from `Γ`.
    pub fn derive(
        &mut self,
        gamma: &BTreeSet<Formula>,
        phi: &Formula,
    ) -> Result<Option<Argument>, ProverError> {
        let Some(step) = self.run(gamma, phi)? else {
            return Ok(None);
        };
        let env: HashMap<Formula, Argument> = gamma
            .iter()
            .map(|f| (f.clone(), Argument::assume(f.clone())))
            .collect();
        let mut fresh = 1;
        let arg = reconstruct(&step, phi, &env, &mut fresh);
        Ok(Some(arg.canonical().expect("reconstruction binds every label")))
    }

    fn search(&mut self, ctx: &Ctx, goal: &Formula) -> Result<Found, ProverError> {
        let k = key(ctx, goal);
        if let Some(p) = self.memo.get(&k) {
            return Ok((Some(p.clone()), false));
        }
        if self.refuted.contains(&k) {
            return Ok((None, false));
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(ProverError::Budget(self.budget));
        }
        let (res, tainted) = self.search_inner(ctx, goal)?;
        match &res {
            Some(p) => {
                self.memo.insert(k, p.clone());
            }
            None if !tainted => {
                self.refuted.insert(k);
            }
            None => {}
        }
        Ok((res, tainted))
    }

    fn search_inner(&mut self, ctx: &Ctx, goal: &Formula) -> Result<Found, ProverError> {
        let efq = self.mode == CalculusMode::Efq;
        if ctx.contains(goal) {
            return Ok((Some(Rc::new(Step::Init)), false));
        }
        if efq && ctx.contains(&Formula::Bot) {
            return Ok((Some(Rc::new(Step::BotL)), false));
        }

        // Invertible left rules.
        for f in ctx {
            match f {
                Formula::And(a, b) => {
                    let next = with(ctx, f, &[(**a).clone(), (**b).clone()]);
                    let (r, t) = self.search(&next, goal)?;
                    return Ok((r.map(|p| Rc::new(Step::AndL(f.clone(), p))), t));
                }
                Formula::Or(a, b) => {
                    let left = with(ctx, f, &[(**a).clone()]);
                    let (r1, t1) = self.search(&left, goal)?;
                    let Some(p1) = r1 else { return Ok((None, t1)) };
                    let right = with(ctx, f, &[(**b).clone()]);
                    let (r2, t2) = self.search(&right, goal)?;
                    return Ok((
                        r2.map(|p2| Rc::new(Step::OrL(f.clone(), p1, p2))),
                        t1 || t2,
                    ));
                }
                Formula::Imp(a, b) => {
                    let step: Option<ImpStep> = match &**a {
                        Formula::Bot if efq => Some((with(ctx, f, &[]), |_, p| Step::Drop(p))),
                        Formula::Atom(_) | Formula::Bot if ctx.contains(a) => {
                            Some((with(ctx, f, &[(**b).clone()]), Step::ImpAtomL))
                        }
                        Formula::And(c, d) => Some((
                            with(
                                ctx,
                                f,
                                &[Formula::imp((**c).clone(), Formula::imp((**d).clone(), (**b).clone()))],
                            ),
                            Step::ImpAndL,
                        )),
                        Formula::Or(c, d) => Some((
                            with(
                                ctx,
                                f,
                                &[
                                    Formula::imp((**c).clone(), (**b).clone()),
                                    Formula::imp((**d).clone(), (**b).clone()),
                                ],
                            ),
                            Step::ImpOrL,
                        )),
                        _ => None,
                    };
                    if let Some((next, make)) = step {
                        let (r, t) = self.search(&next, goal)?;
                        return Ok((r.map(|p| Rc::new(make(f.clone(), p))), t));
                    }
                }
                _ => {}
            }
        }

        // Level-1 base rules fire forwards.
        for ri in 0..self.flat_rules.len() {
            let rule = &self.flat_rules[ri];
            let c = Formula::Atom(rule.conclusion().clone());
            if !ctx.contains(&c)
                && rule
                    .premises()
                    .iter()
                    .all(|p| ctx.contains(&Formula::Atom(p.atom.clone())))
            {
                let rule = rule.clone();
                let next = with(ctx, &c, std::slice::from_ref(&c));
                let (r, t) = self.search(&next, goal)?;
                return Ok((r.map(|p| Rc::new(Step::BaseFire(rule, p))), t));
            }
        }

        // Invertible right rules.
        match goal {
            Formula::And(a, b) => {
                let (r1, t1) = self.search(ctx, a)?;
                let Some(p1) = r1 else { return Ok((None, t1)) };
                let (r2, t2) = self.search(ctx, b)?;
                return Ok((r2.map(|p2| Rc::new(Step::AndR(p1, p2))), t1 || t2));
            }
            Formula::Imp(a, b) => {
                let mut next = ctx.clone();
                next.insert((**a).clone());
                let (r, t) = self.search(&next, b)?;
                return Ok((r.map(|p| Rc::new(Step::ImpR(p))), t));
            }
            _ => {}
        }

        let mut tainted = false;

        // Level-2 base rules: once the obligations hold the conclusion may be
        // added without loss, so a success commits.
        for ri in 0..self.deep_rules.len() {
            let rule = self.deep_rules[ri].clone();
            let c = Formula::Atom(rule.conclusion().clone());
            if ctx.contains(&c) {
                continue;
            }
            let mut obligations = Vec::new();
            for prem in rule.premises() {
                let mut octx = ctx.clone();
                octx.extend(prem.hypotheses.iter().cloned().map(Formula::Atom));
                let goal_p = Formula::Atom(prem.atom.clone());
                let k = key(&octx, &goal_p);
                if self.pending.contains(&k) {
                    tainted = true;
                    break;
                }
                self.pending.push(k);
                let res = self.search(&octx, &goal_p);
                self.pending.pop();
                let (r, t) = res?;
                tainted |= t;
                match r {
                    Some(p) => obligations.push(p),
                    None => break,
                }
            }
            if obligations.len() == rule.premises().len() {
                let next = with(ctx, &c, std::slice::from_ref(&c));
                let (r, t) = self.search(&next, goal)?;
                return Ok((
                    r.map(|p| Rc::new(Step::BaseL(rule, obligations, p))),
                    tainted || t,
                ));
            }
        }

        if let Formula::Or(a, b) = goal {
            let (r, t) = self.search(ctx, a)?;
            tainted |= t;
            if let Some(p) = r {
                return Ok((Some(Rc::new(Step::OrR1(p))), tainted));
            }
            let (r, t) = self.search(ctx, b)?;
            tainted |= t;
            if let Some(p) = r {
                return Ok((Some(Rc::new(Step::OrR2(p))), tainted));
            }
        }

        for f in ctx {
            let Formula::Imp(cd, b) = f else { continue };
            let Formula::Imp(_, d) = &**cd else { continue };
            let first_ctx = with(ctx, f, &[Formula::imp((**d).clone(), (**b).clone())]);
            let (r1, t1) = self.search(&first_ctx, cd)?;
            tainted |= t1;
            let Some(p1) = r1 else { continue };
            // B entails (C→D)→B, so Γ ⊢ G iff this premise holds.
            let second_ctx = with(ctx, f, &[(**b).clone()]);
            let (r2, t2) = self.search(&second_ctx, goal)?;
            tainted |= t2;
            return Ok((
                r2.map(|p2| Rc::new(Step::ImpImpL(f.clone(), p1, p2))),
                tainted,
            ));
        }

        Ok((None, tainted))
    }
}

fn fresh(counter: &mut Label) -> Label {
    let l = *counter;
    *counter += 1;
    l
}

fn parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => (a, b),
        _ => unreachable!("step applied to a compound formula"),
    }
}

fn imp_e(minor: Argument, major: Argument) -> Argument {
    let concl = parts(&major.conclusion).1.clone();
    Argument::node(Rule::ImpE, concl, vec![minor, major])
}

fn imp_i(antecedent: &Formula, label: Option<Label>, body: Argument) -> Argument {
    let concl = Formula::imp(antecedent.clone(), body.conclusion.clone());
    let discharges = label.map(|l| vec![Some(l)]).unwrap_or_default();
    Argument::binder(Rule::ImpI, concl, vec![body], discharges)
}

/// Replays a search tree as a natural-deduction argument. `env` maps each
/// formula of the current context to an argument for it.
fn reconstruct(
    step: &Step,
    goal: &Formula,
    env: &HashMap<Formula, Argument>,
    counter: &mut Label,
) -> Argument {
    let get = |f: &Formula| env.get(f).cloned().expect("context formula has a derivation");
    let extend = |pairs: Vec<(Formula, Argument)>| {
        let mut e = env.clone();
        e.extend(pairs);
        e
    };
    match step {
        Step::Init => get(goal),
        Step::BotL => Argument::node(Rule::BotE, goal.clone(), vec![get(&Formula::Bot)]),
        Step::Drop(next) => reconstruct(next, goal, env, counter),
        Step::AndL(f, next) => {
            let (a, b) = parts(f);
            let d = get(f);
            let e = extend(vec![
                (a.clone(), Argument::node(Rule::AndE1, a.clone(), vec![d.clone()])),
                (b.clone(), Argument::node(Rule::AndE2, b.clone(), vec![d])),
            ]);
            reconstruct(next, goal, &e, counter)
        }
        Step::OrL(f, left, right) => {
            let (a, b) = parts(f);
            let (l1, l2) = (fresh(counter), fresh(counter));
            let e1 = extend(vec![(a.clone(), Argument::hypothesis(a.clone(), l1))]);
            let e2 = extend(vec![(b.clone(), Argument::hypothesis(b.clone(), l2))]);
            let r1 = reconstruct(left, goal, &e1, counter);
            let r2 = reconstruct(right, goal, &e2, counter);
            Argument::binder(
                Rule::OrE,
                goal.clone(),
                vec![get(f), r1, r2],
                vec![None, Some(l1), Some(l2)],
            )
        }
        Step::ImpAtomL(f, next) => {
            let (a, b) = parts(f);
            let e = extend(vec![(b.clone(), imp_e(get(a), get(f)))]);
            reconstruct(next, goal, &e, counter)
        }
        Step::ImpAndL(f, next) => {
            // C→(D→B) from (C∧D)→B
            let (cd, _) = parts(f);
            let (c, d) = parts(cd);
            let (lc, ld) = (fresh(counter), fresh(counter));
            let pair = Argument::node(
                Rule::AndI,
                cd.clone(),
                vec![Argument::hypothesis(c.clone(), lc), Argument::hypothesis(d.clone(), ld)],
            );
            let curried = imp_i(c, Some(lc), imp_i(d, Some(ld), imp_e(pair, get(f))));
            let e = extend(vec![(curried.conclusion.clone(), curried)]);
            reconstruct(next, goal, &e, counter)
        }
        Step::ImpOrL(f, next) => {
            let (cd, _) = parts(f);
            let (c, d) = parts(cd);
            let (lc, ld) = (fresh(counter), fresh(counter));
            let via_c = imp_i(
                c,
                Some(lc),
                imp_e(
                    Argument::node(Rule::OrI1, cd.clone(), vec![Argument::hypothesis(c.clone(), lc)]),
                    get(f),
                ),
            );
            let via_d = imp_i(
                d,
                Some(ld),
                imp_e(
                    Argument::node(Rule::OrI2, cd.clone(), vec![Argument::hypothesis(d.clone(), ld)]),
                    get(f),
                ),
            );
            let e = extend(vec![
                (via_c.conclusion.clone(), via_c),
                (via_d.conclusion.clone(), via_d),
            ]);
            reconstruct(next, goal, &e, counter)
        }
        Step::ImpImpL(f, first, second) => {
            let (cd, _) = parts(f);
            let (c, d) = parts(cd);
            // D→B := λy. f (λ_. y)
            let y = fresh(counter);
            let const_fn = imp_i(c, None, Argument::hypothesis(d.clone(), y));
            let db = imp_i(d, Some(y), imp_e(const_fn, get(f)));
            let e1 = extend(vec![(db.conclusion.clone(), db)]);
            let proof_cd = reconstruct(first, cd, &e1, counter);
            let b_arg = imp_e(proof_cd, get(f));
            let e2 = extend(vec![(b_arg.conclusion.clone(), b_arg)]);
            reconstruct(second, goal, &e2, counter)
        }
        Step::AndR(l, r) => {
            let (a, b) = parts(goal);
            let pa = reconstruct(l, a, env, counter);
            let pb = reconstruct(r, b, env, counter);
            Argument::node(Rule::AndI, goal.clone(), vec![pa, pb])
        }
        Step::OrR1(next) | Step::OrR2(next) => {
            let (a, b) = parts(goal);
            let (rule, sub) = match step {
                Step::OrR1(_) => (Rule::OrI1, a),
                _ => (Rule::OrI2, b),
            };
            let p = reconstruct(next, sub, env, counter);
            Argument::node(rule, goal.clone(), vec![p])
        }
        Step::ImpR(next) => {
            let (a, b) = parts(goal);
            let l = fresh(counter);
            let e = extend(vec![(a.clone(), Argument::hypothesis(a.clone(), l))]);
            let body = reconstruct(next, b, &e, counter);
            imp_i(a, Some(l), body)
        }
        Step::BaseFire(rule, next) => {
            let premises = rule
                .premises()
                .iter()
                .map(|p| get(&Formula::Atom(p.atom.clone())))
                .collect();
            let c = Formula::Atom(rule.conclusion().clone());
            let node = Argument::node(Rule::Base(rule.clone()), c.clone(), premises);
            reconstruct(next, goal, &extend(vec![(c, node)]), counter)
        }
        Step::BaseL(rule, obligations, next) => {
            let mut premises = Vec::new();
            let mut slots = Vec::new();
            for (prem, ob) in rule.premises().iter().zip(obligations) {
                let label = (!prem.hypotheses.is_empty()).then(|| fresh(counter));
                let e = extend(
                    prem.hypotheses
                        .iter()
                        .map(|h| {
                            let hf = Formula::Atom(h.clone());
                            (hf.clone(), Argument::hypothesis(hf, label.unwrap()))
                        })
                        .collect(),
                );
                premises.push(reconstruct(ob, &Formula::Atom(prem.atom.clone()), &e, counter));
                slots.push(label);
            }
            if slots.iter().all(Option::is_none) {
                slots.clear();
            }
            let c = Formula::Atom(rule.conclusion().clone());
            let node = Argument::binder(Rule::Base(rule.clone()), c.clone(), premises, slots);
            reconstruct(next, goal, &extend(vec![(c, node)]), counter)
        }
    }
}

pub fn proves(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: CalculusMode,
) -> Result<bool, ProverError> {
    Prover::new(base, mode).proves(gamma, phi)
}

pub fn derivation_for(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: CalculusMode,
) -> Result<Option<Argument>, ProverError> {
    Prover::new(base, mode).derive(gamma, phi)
}

/// Decision plus the requested certificate: a witness when provable, a
/// countermodel (within `opts.bound` worlds) when not.
pub fn decide(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    mode: CalculusMode,
    opts: DecideOptions,
) -> Result<ProverVerdict, ProverError> {
    let mut prover = Prover::new(base, mode);
    if opts.witness {
        let witness = prover.derive(gamma, phi)?;
        let decided = witness.is_some();
        let countermodel = if !decided && opts.countermodel {
            refute(base, gamma, phi, opts.bound, mode)
        } else {
            None
        };
        return Ok(ProverVerdict {
            decided,
            witness,
            countermodel,
        });
    }
    let decided = prover.proves(gamma, phi)?;
    let countermodel = if !decided && opts.countermodel {
        refute(base, gamma, phi, opts.bound, mode)
    } else {
        None
    };
    Ok(ProverVerdict {
        decided,
        witness: None,
        countermodel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{derivable_atom, enumerate_extensions, parse_base, ExtensionBounds};
    use crate::proofs::{check_derivation, witnesses};
    use crate::syntax::{formulas_up_to_depth, parse_formula, parse_sequent, Atom};

    fn seq(s: &str) -> (BTreeSet<Formula>, Formula) {
        let s = parse_sequent(s).unwrap();
        (s.context, s.extract)
    }

    fn empty() -> Base {
        Base::empty(Level::One)
    }

    fn check(base: &Base, s: &str, mode: CalculusMode) -> bool {
        let (g, phi) = seq(s);
        let w = derivation_for(base, &g, &phi, mode).unwrap();
        if let Some(w) = &w {
            check_derivation(w, base, mode).unwrap_or_else(|e| panic!("{s}: {e}\n{w}"));
            assert!(witnesses(w, &parse_sequent(s).unwrap()), "{s}");
        }
        w.is_some()
    }

    #[test]
    fn classic_instances() {
        let e = empty();
        let efq = CalculusMode::Efq;
        assert!(check(&e, "p | q, ~p : q", efq));
        assert!(!check(&e, "p | q, ~p : q", CalculusMode::NoEfq));
        assert!(!check(&e, " : ((p -> q) -> p) -> p", efq));
        assert!(!check(&e, " : p | ~p", efq));
        assert!(check(&e, " : ~~(p | ~p)", efq));
        assert!(check(&e, " : ~~(p | ~p)", CalculusMode::NoEfq));
        assert!(check(&e, " : p -> p", efq));
        assert!(check(&e, "bot : p", efq));
        assert!(!check(&e, "bot : p", CalculusMode::NoEfq));
        assert!(check(&e, " : (p -> q) -> (q -> r) -> p -> r", efq));
        assert!(check(&e, " : ~~~p -> ~p", efq));
        assert!(!check(&e, " : ~~p -> p", efq));
        assert!(check(&e, " : (p | q -> r) -> (p -> r) & (q -> r)", efq));
    }

    #[test]
    fn base_rules_in_witnesses() {
        let b = parse_base("=> p\np => q\n", None).unwrap();
        assert!(check(&b, " : q", CalculusMode::NoEfq));
        assert!(check(&b, " : p | q", CalculusMode::NoEfq));
        let w = derivation_for(&b, &BTreeSet::new(), &parse_formula("q").unwrap(), CalculusMode::NoEfq)
            .unwrap()
            .unwrap();
        assert_eq!(w.size(), 2);
        let l2 = parse_base("(p > q) => c\np => q\n", None).unwrap();
        assert!(check(&l2, " : c", CalculusMode::Efq));
        let tricky = parse_base("(p > q) => q\n", None).unwrap();
        assert!(!check(&tricky, " : q", CalculusMode::Efq));
        assert!(check(&tricky, "p -> q : q", CalculusMode::Efq));
    }

    #[test]
    fn identity_witness_shape() {
        let (g, phi) = seq(" : p -> p");
        let w = derivation_for(&empty(), &g, &phi, CalculusMode::Efq).unwrap().unwrap();
        assert_eq!(w.rule, Rule::ImpI);
        assert_eq!(w.premises[0], Argument::hypothesis(parse_formula("p").unwrap(), 1));
    }

    #[test]
    fn budget_exhaustion() {
        let (g, phi) = seq(" : ((p -> q) -> p) -> p");
        let mut prover = Prover::new(&empty(), CalculusMode::Efq).with_budget(2);
        assert_eq!(prover.proves(&g, &phi), Err(ProverError::Budget(2)));
    }

    #[test]
    fn atom_conservativity() {
        let alphabet: BTreeSet<Atom> = ["p", "q"].iter().map(|n| Atom::named(n)).collect();
        let bounds = ExtensionBounds {
            max_rules: 2,
            max_premises: 2,
            max_hyps: 1,
            level: Level::Two,
        };
        for b in enumerate_extensions(&Base::empty(Level::Two), &alphabet, bounds) {
            let mut prover = Prover::new(&b, CalculusMode::Efq);
            for a in &alphabet {
                assert_eq!(
                    prover.proves(&BTreeSet::new(), &Formula::Atom(a.clone())).unwrap(),
                    derivable_atom(&b, &BTreeSet::new(), a),
                    "{b}"
                );
            }
        }
    }

    #[test]
    fn agrees_with_countermodel_search() {
        let atoms = [Atom::named("p"), Atom::named("q")];
        let formulas = formulas_up_to_depth(&atoms, true, 2);
        let bases = [
            empty(),
            parse_base("p => q", None).unwrap(),
            parse_base("(q > p) => p", None).unwrap(),
        ];
        for base in &bases {
            for mode in [CalculusMode::Efq, CalculusMode::NoEfq] {
                let mut prover = Prover::new(base, mode);
                for phi in formulas.iter().step_by(5) {
                    let g = BTreeSet::new();
                    let provable = prover.proves(&g, phi).unwrap();
                    let counter = refute(base, &g, phi, 3, mode);
                    assert!(
                        provable != counter.is_some(),
                        "{base}{phi} {mode:?}: provable={provable}"
                    );
                    if let Some(m) = counter {
                        assert!(m.refutes(base, &g, phi, mode));
                    } else {
                        let w = prover.derive(&g, phi).unwrap().unwrap();
                        check_derivation(&w, base, mode).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn deduction_and_conjunction_properties() {
        let atoms = [Atom::named("p"), Atom::named("q")];
        let formulas = formulas_up_to_depth(&atoms, true, 1);
        let mut prover = Prover::new(&empty(), CalculusMode::Efq);
        for a in &formulas {
            for b in &formulas {
                let ctx: BTreeSet<Formula> = [a.clone()].into_iter().collect();
                assert_eq!(
                    prover.proves(&ctx, b).unwrap(),
                    prover.proves(&BTreeSet::new(), &Formula::imp(a.clone(), b.clone())).unwrap()
                );
                let both = prover.proves(&BTreeSet::new(), &Formula::and(a.clone(), b.clone())).unwrap();
                let each = prover.proves(&BTreeSet::new(), a).unwrap()
                    && prover.proves(&BTreeSet::new(), b).unwrap();
                assert_eq!(both, each);
            }
        }
    }
}
