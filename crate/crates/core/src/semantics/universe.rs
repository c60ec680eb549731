use std::collections::{BTreeSet, HashMap};

use super::{sink_atom, SemanticsError};
use crate::bases::{candidate_rules, derivable_atoms, AtomicRule, Base, ExtensionBounds, Level};
use crate::syntax::Atom;

const MAX_MEMBERS: usize = 50_000;

/// A finite family of extensions `root ∪ S`, closed under nothing in
/// particular: the ∀C quantifiers of the support clauses range over its
/// members above the current base.
///
/// Members are bitmasks over a fixed candidate list. In a level-2 universe the
/// axioms `=> a` are added freely and do not count toward `max_rules`.
#[derive(Debug, Clone)]
pub struct Universe {
    atoms: BTreeSet<Atom>,
    sink: Atom,
    level: Level,
    candidates: Vec<AtomicRule>,
    members: Vec<u128>,
    index: HashMap<u128, usize>,
    bases: Vec<Base>,
    derived: Vec<BTreeSet<Atom>>,
    supersets: Vec<Vec<u32>>,
}

fn combinations(n: usize, k_max: usize, mut f: impl FnMut(&[usize])) {
    let mut combo = Vec::new();
    fn go(start: usize, n: usize, k_max: usize, combo: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(combo);
        if combo.len() == k_max {
            return;
        }
        for i in start..n {
            combo.push(i);
            go(i + 1, n, k_max, combo, f);
            combo.pop();
        }
    }
    go(0, n, k_max, &mut combo, &mut f);
}

impl Universe {
    /// `atoms` is the resolved working alphabet; candidate rules range over it.
    pub fn new(root: &Base, atoms: BTreeSet<Atom>, bounds: ExtensionBounds) -> Result<Self, SemanticsError> {
        let level = root.level().max(bounds.level);
        let root = if level == root.level() { root.clone() } else { root.lifted() };
        let candidates: Vec<AtomicRule> = candidate_rules(&atoms, ExtensionBounds { level, ..bounds })
            .into_iter()
            .filter(|r| !root.contains(r))
            .collect();
        if candidates.len() > 128 {
            return Err(SemanticsError::UniverseTooLarge(format!(
                "{} candidate rules (at most 128)",
                candidates.len()
            )));
        }
        let free: Vec<usize> = match level {
            Level::One => Vec::new(),
            Level::Two => (0..candidates.len()).filter(|&i| candidates[i].premises().is_empty()).collect(),
        };
        let counted: Vec<usize> = (0..candidates.len()).filter(|i| !free.contains(i)).collect();
        let mut members = Vec::new();
        let mut too_many = false;
        combinations(counted.len(), bounds.max_rules, |c| {
            let m = c.iter().fold(0u128, |m, &i| m | 1 << counted[i]);
            combinations(free.len(), free.len(), |x| {
                if members.len() >= MAX_MEMBERS {
                    too_many = true;
                    return;
                }
                members.push(x.iter().fold(m, |m, &i| m | 1 << free[i]));
            });
        });
        if too_many {
            return Err(SemanticsError::UniverseTooLarge(format!("more than {MAX_MEMBERS} extensions")));
        }
        // root first, then by number of added rules
        members.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        let index = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let bases: Vec<Base> = members
            .iter()
            .map(|&m| {
                let mut b = root.clone();
                for (i, r) in candidates.iter().enumerate() {
                    if m & (1 << i) != 0 {
                        b.insert(r.clone()).expect("candidate level within universe level");
                    }
                }
                b
            })
            .collect();
        let none = BTreeSet::new();
        let derived = bases.iter().map(|b| derivable_atoms(b, &none)).collect();
        let supersets = members
            .iter()
            .map(|&c| {
                (0..members.len())
                    .filter(|&d| members[d] & c == c)
                    .map(|d| d as u32)
                    .collect()
            })
            .collect();
        Ok(Universe {
            sink: sink_atom(&atoms),
            atoms,
            level,
            candidates,
            members,
            index,
            bases,
            derived,
            supersets,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn sink(&self) -> &Atom {
        &self.sink
    }

    pub fn candidates(&self) -> &[AtomicRule] {
        &self.candidates
    }

    pub fn base(&self, i: usize) -> &Base {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    /// Atoms derivable from no hypotheses in member `i`.
    pub fn derived(&self, i: usize) -> &BTreeSet<Atom> {
        &self.derived[i]
    }

    /// Members `D ⊇ C_i`, including `i` itself.
    pub fn supersets(&self, i: usize) -> &[u32] {
        &self.supersets[i]
    }

    /// Number of candidate rules in `j` but not in `i`.
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        (self.members[j] & !self.members[i]).count_ones()
    }

    /// The member equal to `base`, if any.
    pub fn position(&self, base: &Base) -> Option<usize> {
        let mut mask = 0u128;
        for r in base.rules() {
            match self.candidates.iter().position(|c| c == r) {
                Some(i) => mask |= 1 << i,
                None if self.bases[0].contains(r) => {}
                None => return None,
            }
        }
        let i = *self.index.get(&mask)?;
        (self.bases[i].rules().count() == base.rules().count()).then_some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> BTreeSet<Atom> {
        [Atom::named("p"), Atom::named("q")].into_iter().collect()
    }

    #[test]
    fn level_one_powerset() {
        let u = Universe::new(&Base::empty(Level::One), pq(), ExtensionBounds::level1(8, 2)).unwrap();
        assert_eq!(u.candidates().len(), 8);
        assert_eq!(u.len(), 256);
        assert!(u.base(0).is_empty());
        assert_eq!(u.supersets(0).len(), 256);
        for i in 0..u.len() {
            assert_eq!(u.position(u.base(i)), Some(i));
            for &j in u.supersets(i) {
                assert!(u.base(i).is_subset_of(u.base(j as usize)));
            }
        }
    }

    #[test]
    fn matches_enumeration() {
        let root = Base::new(Level::One, [AtomicRule::flat([Atom::named("p")], Atom::named("q"))]).unwrap();
        let b = ExtensionBounds::level1(2, 1);
        let u = Universe::new(&root, pq(), b).unwrap();
        let listed: BTreeSet<Base> = crate::bases::enumerate_extensions(&root, &pq(), b).collect();
        let ours: BTreeSet<Base> = u.bases().iter().cloned().collect();
        assert_eq!(listed, ours);
    }

    #[test]
    fn free_axioms_at_level_two() {
        let bounds = ExtensionBounds {
            max_rules: 1,
            max_premises: 1,
            max_hyps: 1,
            level: Level::Two,
        };
        let u = Universe::new(&Base::empty(Level::Two), pq(), bounds).unwrap();
        // premises p, q, (q > p), (p > q); rules with ≤ 1 premise: 5 sets × 2 conclusions
        assert_eq!(u.candidates().len(), 10);
        // 8 counted candidates, at most one of them, times 4 axiom subsets
        assert_eq!(u.len(), 9 * 4);
        assert!(u.bases().iter().any(|b| b.len() == 3));
    }
}
