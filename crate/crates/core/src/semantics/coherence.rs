//! Sweeps bases and sequents, cross-checking `supports` against the clause
//! evaluator, witness validity and monotonicity.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ClauseVerdict, Evaluator, SemanticsError, SemanticsMode, Universe, WorkingAlphabet};
use crate::bases::{enumerate_extensions, print_base, Base, ExtensionBounds};
use crate::proofs::{proof_to_json, Argument};
use crate::syntax::{formulas_up_to_depth, Atom, Formula, Sequent};

#[derive(Debug, Clone)]
pub struct CoherenceConfig {
    pub mode: SemanticsMode,
    pub alphabet: BTreeSet<Atom>,
    pub reserve: usize,
    /// The swept bases: extensions of the empty base within these bounds.
    pub bases: ExtensionBounds,
    /// Rules the clause evaluator may add on top of a swept base.
    pub extra_rules: usize,
    /// Satisfaction checks look at extensions adding at most this many rules.
    pub sat_extra: u32,
    /// Every sequent with formulas of at most this many connectives...
    pub depth: usize,
    /// ...and at most this many context formulas.
    pub context: usize,
    /// Random sequents over formulas with `sample_depth` connectives, per base.
    pub samples: usize,
    pub sample_depth: usize,
    pub seed: u64,
    /// Flip the support decision on atomic extracts (harness self-test).
    pub inject_fault: bool,
    pub budget: u64,
}

impl Default for CoherenceConfig {
    /// Level 1 over {p}, at most one rule, one connective, one context formula.
    fn default() -> Self {
        CoherenceConfig {
            mode: SemanticsMode::PtV,
            alphabet: [Atom::named("p")].into_iter().collect(),
            reserve: 0,
            bases: ExtensionBounds::level1(1, 1),
            extra_rules: 2,
            sat_extra: 1,
            depth: 1,
            context: 1,
            samples: 0,
            sample_depth: 2,
            seed: 0,
            inject_fault: false,
            budget: crate::prover::default_budget(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A decisive clause verdict contradicts `supports`.
    Disagreement,
    /// Supported, but the prover produced no witness.
    NoWitness,
    /// The witness is not a valid argument.
    Unsatisfied,
    /// Supported in a base but not in a larger one.
    NonMonotone,
    /// The prover ran out of budget.
    Budget,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Disagreement => "disagreement",
            Verdict::NoWitness => "no-witness",
            Verdict::Unsatisfied => "unsatisfied",
            Verdict::NonMonotone => "non-monotone",
            Verdict::Budget => "budget",
        }
    }
}

/// One violation: `instance | judgment | verdict | witness-ref`.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub base: String,
    pub sequent: String,
    pub judgment: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

fn inline_base(b: &Base) -> String {
    let rules: Vec<String> = b.rules().map(|r| r.to_string()).collect();
    format!("{{{}}}", rules.join("; "))
}

impl InstanceRecord {
    fn new(base: &Base, s: &Sequent, judgment: String, verdict: Verdict, witness: Option<&Argument>) -> Self {
        InstanceRecord {
            base: print_base(base),
            sequent: s.to_string(),
            judgment,
            verdict,
            witness: witness.map(proof_to_json),
        }
    }

    /// A base file reproducing the instance; the sequent and verdict ride
    /// along as comments, followed by the witness if there is one.
    pub fn counterexample_file(&self) -> String {
        let mut out = format!(
            "# violation: {}\n# sequent: {}\n# judgment: {}\n",
            self.verdict.name(),
            self.sequent,
            self.judgment
        );
        out.push_str(&self.base);
        if let Some(w) = &self.witness {
            out.push_str("# witness:\n");
            for line in w.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for InstanceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rules: Vec<&str> = self.base.lines().collect();
        write!(
            f,
            "{{{}}} {} | {} | {} | {}",
            rules.join("; "),
            self.sequent,
            self.judgment,
            self.verdict.name(),
            if self.witness.is_some() { "witness" } else { "-" }
        )
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CoherenceReport {
    pub bases: usize,
    pub sequents: usize,
    pub instances: usize,
    pub supported: usize,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
    pub witnesses_checked: usize,
    pub satisfied: usize,
    /// Supported only through the ⊥ clause, hence without an NJ witness.
    pub efq_gap: usize,
    pub monotonicity_pairs: usize,
    pub violations: Vec<InstanceRecord>,
}

impl CoherenceReport {
    /// Counts add and violations concatenate; associative.
    pub fn merge(mut self, other: CoherenceReport) -> CoherenceReport {
        self.bases += other.bases;
        self.instances += other.instances;
        self.supported += other.supported;
        self.holds += other.holds;
        self.fails += other.fails;
        self.inconclusive += other.inconclusive;
        self.witnesses_checked += other.witnesses_checked;
        self.satisfied += other.satisfied;
        self.efq_gap += other.efq_gap;
        self.monotonicity_pairs += other.monotonicity_pairs;
        self.sequents = self.sequents.max(other.sequents);
        self.violations.extend(other.violations);
        self
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Summary lines, then one record per violation.
    pub fn render(&self) -> String {
        let mut out = format!(
            "bases {}\nsequents {}\ninstances {}\nsupported {}\nclausal holds {} fails {} inconclusive {}\n\
             witnesses {} satisfied {}\nefq-gap {}\nmonotonicity pairs {}\nviolations {}\n",
            self.bases,
            self.sequents,
            self.instances,
            self.supported,
            self.holds,
            self.fails,
            self.inconclusive,
            self.witnesses_checked,
            self.satisfied,
            self.efq_gap,
            self.monotonicity_pairs,
            self.violations.len()
        );
        for v in &self.violations {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

fn subsets(items: &[Formula], max: usize) -> Vec<BTreeSet<Formula>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier = vec![(BTreeSet::new(), 0usize)];
    for _ in 0..max {
        let mut next = Vec::new();
        for (set, start) in &frontier {
            for (i, f) in items.iter().enumerate().skip(*start) {
                let mut s: BTreeSet<Formula> = set.clone();
                s.insert(f.clone());
                out.push(s.clone());
                next.push((s, i + 1));
            }
        }
        frontier = next;
    }
    out
}

/// The exhaustive sequents, then the seeded random ones.
fn sequents(config: &CoherenceConfig) -> Vec<Sequent> {
    let atoms: Vec<Atom> = config.alphabet.iter().cloned().collect();
    let forms = formulas_up_to_depth(&atoms, true, config.depth);
    let mut out = Vec::new();
    for ctx in subsets(&forms, config.context) {
        for phi in &forms {
            out.push(Sequent {
                context: ctx.clone(),
                extract: phi.clone(),
            });
        }
    }
    if config.samples > 0 {
        let deep = formulas_up_to_depth(&atoms, true, config.sample_depth);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.samples {
            let k = rng.gen_range(0..=config.context);
            let context = (0..k).map(|_| deep.choose(&mut rng).unwrap().clone()).collect();
            let extract = deep.choose(&mut rng).unwrap().clone();
            out.push(Sequent { context, extract });
        }
    }
    out
}

struct Chunk {
    report: CoherenceReport,
    /// supported[base][sequent]
    supported: Vec<Vec<bool>>,
}

fn sweep_chunk(
    u: &Universe,
    config: &CoherenceConfig,
    bases: &[(usize, Base)],
    seqs: &[Sequent],
) -> Result<Chunk, SemanticsError> {
    let mut ev = Evaluator::new(u, config.mode)?.with_budget(config.budget);
    ev.sat_extra = config.sat_extra;
    let mut report = CoherenceReport::default();
    let mut table = Vec::new();
    for (i, base) in bases {
        let i = *i;
        report.bases += 1;
        let mut row = Vec::with_capacity(seqs.len());
        for s in seqs {
            report.instances += 1;
            let mut sup = match ev.oracle(i).supports(&s.context, &s.extract) {
                Ok(v) => v,
                Err(_) => {
                    report
                        .violations
                        .push(InstanceRecord::new(base, s, "supports".into(), Verdict::Budget, None));
                    row.push(false);
                    continue;
                }
            };
            if config.inject_fault && s.extract.is_atomic() {
                sup = !sup;
            }
            row.push(sup);
            let clausal = ev.evaluate(i, &s.context, &s.extract);
            let disagree = match &clausal {
                ClauseVerdict::Holds => {
                    report.holds += 1;
                    !sup
                }
                ClauseVerdict::Fails(_) => {
                    report.fails += 1;
                    sup
                }
                ClauseVerdict::Inconclusive(_) => {
                    report.inconclusive += 1;
                    false
                }
            };
            if disagree {
                let j = format!("supports {sup}, clausal {clausal}");
                report
                    .violations
                    .push(InstanceRecord::new(base, s, j, Verdict::Disagreement, None));
            }
            if !sup {
                continue;
            }
            report.supported += 1;
            let witness = ev.oracle(i).witness(&s.context, &s.extract).ok().flatten();
            let Some(w) = witness else {
                if config.mode == SemanticsMode::Sandqvist && !config.inject_fault {
                    report.efq_gap += 1;
                } else {
                    report
                        .violations
                        .push(InstanceRecord::new(base, s, "derivation_for".into(), Verdict::NoWitness, None));
                }
                continue;
            };
            report.witnesses_checked += 1;
            if ev.satisfies_at(i, &w, &s.context, &s.extract)? {
                report.satisfied += 1;
            } else {
                report
                    .violations
                    .push(InstanceRecord::new(base, s, "satisfies".into(), Verdict::Unsatisfied, Some(&w)));
            }
        }
        table.push(row);
    }
    Ok(Chunk {
        report,
        supported: table,
    })
}

/// Runs the sweep described by `config`. Bases are split across the rayon
/// pool; the report is identical whatever the number of workers.
pub fn check_clause_coherence(config: &CoherenceConfig) -> Result<CoherenceReport, SemanticsError> {
    let root = Base::empty(config.bases.level.max(config.mode.level()));
    let bounds = ExtensionBounds {
        level: root.level(),
        ..config.bases
    };
    let alphabet = WorkingAlphabet::new(config.alphabet.iter().cloned(), config.reserve);
    let atoms = alphabet.resolve(&root, []);
    let universe_bounds = ExtensionBounds {
        max_rules: config.bases.max_rules + config.extra_rules,
        ..bounds
    };
    let u = Universe::new(&root, atoms, universe_bounds)?;
    let swept: Vec<(usize, Base)> = enumerate_extensions(&root, &config.alphabet, bounds)
        .map(|b| {
            let i = u.position(&b).expect("swept base lies in the universe");
            (i, b)
        })
        .collect();
    let seqs = sequents(config);
    let workers = rayon::current_num_threads().max(1);
    let size = swept.len().div_ceil(workers).max(1);
    let chunks: Vec<Chunk> = swept
        .par_chunks(size)
        .map(|c| sweep_chunk(&u, config, c, &seqs))
        .collect::<Result<_, _>>()?;
    let mut table = Vec::new();
    let mut report = CoherenceReport {
        sequents: seqs.len(),
        ..Default::default()
    };
    for c in chunks {
        report = report.merge(c.report);
        table.extend(c.supported);
    }
    for (a, (_, ba)) in swept.iter().enumerate() {
        for (b, (_, bb)) in swept.iter().enumerate() {
            if a == b || !ba.is_subset_of(bb) {
                continue;
            }
            report.monotonicity_pairs += 1;
            for (k, s) in seqs.iter().enumerate() {
                if table[a][k] && !table[b][k] {
                    report.violations.push(InstanceRecord::new(
                        bb,
                        s,
                        format!("supported in {}", inline_base(ba)),
                        Verdict::NonMonotone,
                        None,
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::Level;

    #[test]
    fn tiny_sweep_is_clean() {
        let r = check_clause_coherence(&CoherenceConfig::default()).unwrap();
        assert!(r.is_clean(), "{}", r.render());
        // bases {}, {=> p}, {p => p}
        assert_eq!(r.bases, 3);
        assert_eq!(r.instances, 3 * r.sequents);
        assert_eq!(r.witnesses_checked, r.supported);
        assert_eq!(r.satisfied, r.supported);
        assert!(r.holds + r.fails > 0);
    }

    #[test]
    fn injected_fault_is_detected() {
        let config = CoherenceConfig {
            inject_fault: true,
            ..Default::default()
        };
        let r = check_clause_coherence(&config).unwrap();
        assert!(!r.is_clean());
        let v = &r.violations[0];
        let file = v.counterexample_file();
        assert!(file.starts_with("# violation: "));
        assert!(crate::bases::parse_base(&file, None).is_ok());
    }

    #[test]
    fn sandqvist_efq_family() {
        let config = CoherenceConfig {
            mode: SemanticsMode::Sandqvist,
            alphabet: [Atom::named("p"), Atom::named("q")].into_iter().collect(),
            bases: ExtensionBounds {
                max_rules: 1,
                max_premises: 1,
                max_hyps: 1,
                level: Level::Two,
            },
            extra_rules: 0,
            ..Default::default()
        };
        let r = check_clause_coherence(&config).unwrap();
        assert!(r.is_clean(), "{}", r.render());
        assert!(r.efq_gap > 0);
    }

    #[test]
    fn merge_is_associative() {
        let mk = |n: usize| CoherenceReport {
            bases: n,
            instances: 2 * n,
            ..Default::default()
        };
        let left = mk(1).merge(mk(2)).merge(mk(3));
        let right = mk(1).merge(mk(2).merge(mk(3)));
        assert_eq!(left.render(), right.render());
    }
}
