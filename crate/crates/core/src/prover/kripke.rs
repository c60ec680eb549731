//! Finite Kripke countermodels over rooted trees, closed under a base.
//!
//! Used as an oracle independent of the search: a model refuting `Γ : φ` at its
//! root certifies unprovability, since NJ plus base rules is sound for
//! base-closed models.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bases::{Base, Premise};
use crate::proofs::CalculusMode;
use crate::syntax::{Atom, Formula};

/// Worlds `0..n` form a tree rooted at 0 with `parent[i] < i`; the order is
/// reachability. `bot` lists the worlds where ⊥ holds as an ordinary atom
/// (minimal logic only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    pub parent: Vec<Option<usize>>,
    pub valuation: Vec<BTreeSet<Atom>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bot: Vec<usize>,
    pub base_closed: bool,
}

impl KripkeModel {
    pub fn worlds(&self) -> usize {
        self.parent.len()
    }

    /// `w ≤ v`: `w` is `v` or one of its ancestors.
    pub fn leq(&self, w: usize, v: usize) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == w {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }

    fn above(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.worlds()).filter(move |&v| self.leq(w, v))
    }

    pub fn is_tree(&self) -> bool {
        !self.parent.is_empty()
            && self.parent[0].is_none()
            && self.parent.iter().enumerate().skip(1).all(|(i, p)| p.is_some_and(|p| p < i))
            && self.valuation.len() == self.parent.len()
    }

    pub fn is_persistent(&self) -> bool {
        (1..self.worlds()).all(|i| {
            let p = self.parent[i].unwrap();
            self.valuation[p].is_subset(&self.valuation[i])
                && (!self.bot.contains(&p) || self.bot.contains(&i))
        })
    }

    fn premise_holds(&self, w: usize, prem: &Premise) -> bool {
        self.above(w).all(|v| {
            !prem.hypotheses.is_subset(&self.valuation[v]) || self.valuation[v].contains(&prem.atom)
        })
    }

    /// Every world is closed under every rule of `base`; a level-2 premise
    /// `Σ ⇒ p` holds at `w` when every `v ≥ w` containing `Σ` contains `p`.
    pub fn is_base_closed(&self, base: &Base) -> bool {
        (0..self.worlds()).all(|w| {
            base.rules().all(|r| {
                !r.premises().iter().all(|p| self.premise_holds(w, p))
                    || self.valuation[w].contains(r.conclusion())
            })
        })
    }

    pub fn forces(&self, w: usize, f: &Formula, mode: CalculusMode) -> bool {
        match f {
            Formula::Atom(a) => self.valuation[w].contains(a),
            Formula::Bot => mode == CalculusMode::NoEfq && self.bot.contains(&w),
            Formula::And(a, b) => self.forces(w, a, mode) && self.forces(w, b, mode),
            Formula::Or(a, b) => self.forces(w, a, mode) || self.forces(w, b, mode),
            Formula::Imp(a, b) => self
                .above(w)
                .all(|v| !self.forces(v, a, mode) || self.forces(v, b, mode)),
        }
    }

    /// The model is a well-formed base-closed tree whose root forces `Γ` but not `φ`.
    pub fn refutes(&self, base: &Base, gamma: &BTreeSet<Formula>, phi: &Formula, mode: CalculusMode) -> bool {
        self.is_tree()
            && self.is_persistent()
            && self.is_base_closed(base)
            && gamma.iter().all(|g| self.forces(0, g, mode))
            && !self.forces(0, phi, mode)
    }
}

struct Frame {
    parent: Vec<Option<usize>>,
    up: Vec<u64>,
    upsets: Vec<u64>,
}

impl Frame {
    fn new(parent: Vec<Option<usize>>) -> Self {
        let n = parent.len();
        let mut up = vec![0u64; n];
        for v in 0..n {
            let mut cur = Some(v);
            while let Some(c) = cur {
                up[c] |= 1 << v;
                cur = parent[c];
            }
        }
        let upsets = (0..1u64 << n)
            .filter(|&m| (0..n).all(|w| m & (1 << w) == 0 || up[w] & !m == 0))
            .collect();
        Frame { parent, up, upsets }
    }

    fn imp(&self, a: u64, b: u64) -> u64 {
        (0..self.up.len())
            .filter(|&w| self.up[w] & a & !b == 0)
            .fold(0, |m, w| m | 1 << w)
    }
}

fn trees(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![vec![None]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..i).map(move |p| {
                    let mut t = t.clone();
                    t.push(Some(p));
                    t
                })
            })
            .collect();
    }
    out
}

struct Search<'a> {
    atoms: Vec<Atom>,
    base: &'a Base,
    mode: CalculusMode,
}

impl Search<'_> {
    fn index(&self, a: &Atom) -> usize {
        self.atoms.binary_search(a).expect("atom collected")
    }

    fn eval(&self, frame: &Frame, masks: &[u64], f: &Formula) -> u64 {
        match f {
            Formula::Atom(a) => masks[self.index(a)],
            Formula::Bot => match self.mode {
                CalculusMode::Efq => 0,
                CalculusMode::NoEfq => masks[self.atoms.len()],
            },
            Formula::And(a, b) => self.eval(frame, masks, a) & self.eval(frame, masks, b),
            Formula::Or(a, b) => self.eval(frame, masks, a) | self.eval(frame, masks, b),
            Formula::Imp(a, b) => frame.imp(self.eval(frame, masks, a), self.eval(frame, masks, b)),
        }
    }

    fn closed(&self, frame: &Frame, masks: &[u64]) -> bool {
        let all = (1u64 << frame.up.len()) - 1;
        self.base.rules().all(|r| {
            let mut holds = all;
            for p in r.premises() {
                let sigma = p
                    .hypotheses
                    .iter()
                    .fold(all, |m, h| m & masks[self.index(h)]);
                let bad = sigma & !masks[self.index(&p.atom)];
                holds &= (0..frame.up.len())
                    .filter(|&w| frame.up[w] & bad == 0)
                    .fold(0, |m, w| m | 1 << w);
            }
            holds & !masks[self.index(r.conclusion())] == 0
        })
    }
}

/// Searches trees of at most `bound` worlds for a base-closed model whose
/// root forces `gamma` and not `phi`. Smaller models are found first.
pub fn refute(
    base: &Base,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    bound: usize,
    mode: CalculusMode,
) -> Option<KripkeModel> {
    let mut atoms = base.atoms();
    for g in gamma {
        g.collect_atoms(&mut atoms);
    }
    phi.collect_atoms(&mut atoms);
    let search = Search {
        atoms: atoms.into_iter().collect(),
        base,
        mode,
    };
    let slots = search.atoms.len() + usize::from(mode == CalculusMode::NoEfq);
    for n in 1..=bound.min(6) {
        for parent in trees(n) {
            let frame = Frame::new(parent);
            let mut masks = vec![0u64; slots];
            if let Some(m) = assign(&search, &frame, gamma, phi, &mut masks, 0) {
                return Some(m);
            }
        }
    }
    None
}

fn assign(
    s: &Search<'_>,
    frame: &Frame,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    masks: &mut Vec<u64>,
    i: usize,
) -> Option<KripkeModel> {
    if i == masks.len() {
        let root = |f: &Formula| s.eval(frame, masks, f) & 1 != 0;
        if !s.closed(frame, masks) || !gamma.iter().all(root) || root(phi) {
            return None;
        }
        let n = frame.up.len();
        let valuation = (0..n)
            .map(|w| {
                s.atoms
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| masks[*k] & (1 << w) != 0)
                    .map(|(_, a)| a.clone())
                    .collect()
            })
            .collect();
        let bot = if s.mode == CalculusMode::NoEfq {
            (0..n).filter(|w| masks[s.atoms.len()] & (1 << w) != 0).collect()
        } else {
            Vec::new()
        };
        return Some(KripkeModel {
            parent: frame.parent.clone(),
            valuation,
            bot,
            base_closed: true,
        });
    }
    for &m in &frame.upsets {
        masks[i] = m;
        if let Some(model) = assign(s, frame, gamma, phi, masks, i + 1) {
            return Some(model);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{parse_base, Level};
    use crate::syntax::parse_sequent;

    fn run(base: &Base, s: &str, bound: usize, mode: CalculusMode) -> Option<KripkeModel> {
        let s = parse_sequent(s).unwrap();
        let m = refute(base, &s.context, &s.extract, bound, mode);
        if let Some(m) = &m {
            assert!(m.refutes(base, &s.context, &s.extract, mode));
        }
        m
    }

    #[test]
    fn excluded_middle_needs_two_worlds() {
        let e = Base::empty(Level::One);
        assert!(run(&e, " : p | ~p", 1, CalculusMode::Efq).is_none());
        let m = run(&e, " : p | ~p", 2, CalculusMode::Efq).unwrap();
        assert_eq!(m.worlds(), 2);
        assert!(m.valuation[0].is_empty());
        assert_eq!(m.valuation[1], [Atom::named("p")].into_iter().collect());
    }

    #[test]
    fn peirce_refuted() {
        let e = Base::empty(Level::One);
        let m = run(&e, " : ((p -> q) -> p) -> p", 3, CalculusMode::Efq).unwrap();
        assert_eq!(m.worlds(), 2);
    }

    #[test]
    fn no_countermodel_for_theorems() {
        let e = Base::empty(Level::One);
        assert!(run(&e, " : bot -> p", 4, CalculusMode::Efq).is_none());
        let b = parse_base("=> p", None).unwrap();
        assert!(run(&b, " : p", 4, CalculusMode::Efq).is_none());
    }

    #[test]
    fn minimal_logic_treats_bot_as_atom() {
        let e = Base::empty(Level::One);
        let m = run(&e, "bot : p", 1, CalculusMode::NoEfq).unwrap();
        assert_eq!(m.bot, vec![0]);
    }

    #[test]
    fn level_two_closure_is_semantic() {
        // (p > q) => c: c holds wherever p → q is forced
        let b = parse_base("(p > q) => c", None).unwrap();
        assert!(run(&b, "p -> q : c", 3, CalculusMode::Efq).is_none());
        assert!(run(&b, " : c", 3, CalculusMode::Efq).is_some());
    }

    #[test]
    fn forcing_by_hand() {
        let m = KripkeModel {
            parent: vec![None, Some(0)],
            valuation: vec![BTreeSet::new(), [Atom::named("p")].into_iter().collect()],
            bot: vec![],
            base_closed: true,
        };
        let f = |s: &str| crate::syntax::parse_formula(s).unwrap();
        assert!(!m.forces(0, &f("p | ~p"), CalculusMode::Efq));
        assert!(m.forces(0, &f("~~p"), CalculusMode::Efq));
        assert!(m.forces(1, &f("p"), CalculusMode::Efq));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<KripkeModel>(&json).unwrap(), m);
    }

    #[test]
    fn tree_counts() {
        assert_eq!(trees(1).len(), 1);
        assert_eq!(trees(3).len(), 2);
        assert_eq!(trees(4).len(), 6);
    }
}
