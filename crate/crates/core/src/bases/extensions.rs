use std::collections::BTreeSet;

use super::{AtomicRule, Base, Level, Premise};
use crate::syntax::Atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtensionBounds {
    pub max_rules: usize,
    pub max_premises: usize,
    pub max_hyps: usize,
    pub level: Level,
}

impl ExtensionBounds {
    pub fn level1(max_rules: usize, max_premises: usize) -> Self {
        ExtensionBounds {
            max_rules,
            max_premises,
            max_hyps: 0,
            level: Level::One,
        }
    }
}

fn subsets_up_to<T: Clone + Ord>(items: &[T], max: usize) -> Vec<BTreeSet<T>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier = vec![(BTreeSet::new(), 0usize)];
    for _ in 0..max {
        let mut next = Vec::new();
        for (set, start) in &frontier {
            for (i, item) in items.iter().enumerate().skip(*start) {
                let mut s: BTreeSet<T> = set.clone();
                s.insert(item.clone());
                out.push(s.clone());
                next.push((s, i + 1));
            }
        }
        frontier = next;
    }
    out
}

/// Every rule over `alphabet` within the bounds, sorted.
///
/// Level-2 premises whose atom is among their own hypotheses are left out:
/// such a premise is always met and the rule is equivalent to one without it.
pub fn candidate_rules(alphabet: &BTreeSet<Atom>, bounds: ExtensionBounds) -> Vec<AtomicRule> {
    let atoms: Vec<Atom> = alphabet.iter().cloned().collect();
    let max_hyps = match bounds.level {
        Level::One => 0,
        Level::Two => bounds.max_hyps,
    };
    let hyp_sets = subsets_up_to(&atoms, max_hyps);
    let mut premises = Vec::new();
    for p in &atoms {
        for sigma in &hyp_sets {
            if !sigma.contains(p) {
                premises.push(Premise {
                    atom: p.clone(),
                    hypotheses: sigma.clone(),
                });
            }
        }
    }
    premises.sort();
    let mut rules = BTreeSet::new();
    for prem_set in subsets_up_to(&premises, bounds.max_premises) {
        for c in &atoms {
            rules.insert(AtomicRule::new(prem_set.iter().cloned(), c.clone()));
        }
    }
    rules.into_iter().collect()
}

/// The bases `C ⊇ base` obtained by adding at most `max_rules` candidate rules:
/// `base` itself first, then by number of added rules, lexicographically.
#[derive(Debug, Clone)]
pub struct Extensions {
    base: Base,
    candidates: Vec<AtomicRule>,
    max_rules: usize,
    size: usize,
    combo: Vec<usize>,
    done: bool,
}

pub fn enumerate_extensions(
    base: &Base,
    alphabet: &BTreeSet<Atom>,
    bounds: ExtensionBounds,
) -> Extensions {
    let candidates: Vec<AtomicRule> = candidate_rules(alphabet, bounds)
        .into_iter()
        .filter(|r| !base.contains(r))
        .collect();
    let level = base.level().max(bounds.level);
    let base = if level == base.level() {
        base.clone()
    } else {
        base.lifted()
    };
    Extensions {
        base,
        candidates,
        max_rules: bounds.max_rules,
        size: 0,
        combo: Vec::new(),
        done: false,
    }
}

impl Extensions {
    pub fn candidates(&self) -> &[AtomicRule] {
        &self.candidates
    }

    fn advance(&mut self) {
        let n = self.candidates.len();
        let k = self.size;
        // Next k-combination of 0..n in lexicographic order.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.combo[i] < n - k + i {
                self.combo[i] += 1;
                for j in i + 1..k {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return;
            }
        }
        self.size += 1;
        if self.size > self.max_rules || self.size > n {
            self.done = true;
        } else {
            self.combo = (0..self.size).collect();
        }
    }
}

impl Iterator for Extensions {
    type Item = Base;

    fn next(&mut self) -> Option<Base> {
        if self.done {
            return None;
        }
        let mut out = self.base.clone();
        for &i in &self.combo {
            out.insert(self.candidates[i].clone())
                .expect("candidate level within base level");
        }
        self.advance();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| Atom::named(n)).collect()
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn single_axiom() {
        let bases: Vec<Base> = enumerate_extensions(
            &Base::empty(Level::One),
            &alphabet(&["p"]),
            ExtensionBounds::level1(1, 0),
        )
        .collect();
        assert_eq!(bases.len(), 2);
        assert!(bases[0].is_empty());
        assert_eq!(bases[1].to_string(), "=> p\n");
    }

    #[test]
    fn counts_match_combinatorics() {
        let ab = alphabet(&["p", "q"]);
        let empty = Base::empty(Level::One);
        assert_eq!(enumerate_extensions(&empty, &ab, ExtensionBounds::level1(1, 1)).count(), 7);
        // premise sets of size ≤ 2 over 2 atoms: 4, times 2 conclusions
        assert_eq!(candidate_rules(&ab, ExtensionBounds::level1(2, 2)).len(), 8);
        let n = enumerate_extensions(&empty, &ab, ExtensionBounds::level1(2, 2)).count();
        assert_eq!(n, 1 + binomial(8, 1) + binomial(8, 2));
        let three = alphabet(&["p", "q", "r"]);
        // 1 + 3 + 3 premise sets, times 3 conclusions
        assert_eq!(candidate_rules(&three, ExtensionBounds::level1(1, 2)).len(), 21);
        let l2 = ExtensionBounds {
            max_rules: 1,
            max_premises: 1,
            max_hyps: 1,
            level: Level::Two,
        };
        // premises: p, q, (q > p), (p > q); sets ≤ 1: 5, times 2
        assert_eq!(candidate_rules(&ab, l2).len(), 10);
    }

    #[test]
    fn starts_with_base_and_is_duplicate_free() {
        let ab = alphabet(&["p", "q"]);
        let start = Base::new(Level::One, [AtomicRule::axiom(Atom::named("p"))]).unwrap();
        let all: Vec<Base> = enumerate_extensions(&start, &ab, ExtensionBounds::level1(2, 1)).collect();
        assert_eq!(all[0], start);
        let distinct: BTreeSet<&Base> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.iter().all(|b| start.is_subset_of(b)));
        // 5 candidates remain after removing => p
        assert_eq!(all.len(), 1 + 5 + 10);
    }

    #[test]
    fn restartable() {
        let ab = alphabet(&["p", "q"]);
        let it = enumerate_extensions(&Base::empty(Level::One), &ab, ExtensionBounds::level1(2, 1));
        let a: Vec<Base> = it.clone().collect();
        let b: Vec<Base> = it.collect();
        assert_eq!(a, b);
    }
}
