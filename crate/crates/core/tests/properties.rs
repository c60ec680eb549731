use std::collections::BTreeSet;

use proptest::prelude::*;

use ptsem_core::bases::{parse_base, print_base, Base, Level};
use ptsem_core::generate::{generator_base, DerivationGenerator, GenConfig};
use ptsem_core::proofs::{check_derivation, cut, proof_from_json, proof_to_json};
use ptsem_core::prover::{proves, refute};
use ptsem_core::reduction::{is_canonical, normalize, DEFAULT_STEP_BUDGET};
use ptsem_core::semantics::{supports, SemanticsMode, WorkingAlphabet};
use ptsem_core::syntax::{conjoin, parse_formula, print_formula};
use ptsem_core::{AtomicRule, Atom, CalculusMode, Formula};

fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r", "p1", "long_name"]).prop_map(Formula::atom),
        1 => Just(Formula::Bot),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            inner.prop_map(Formula::not),
        ]
    })
}

fn small_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => prop::sample::select(vec!["p", "q"]).prop_map(Formula::atom),
        1 => Just(Formula::Bot),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

fn level1_base() -> impl Strategy<Value = Base> {
    let atom = prop::sample::select(vec!["p", "q"]).prop_map(Atom::named);
    let rule = (prop::collection::btree_set(atom.clone(), 0..=2), atom)
        .prop_map(|(ps, c)| AtomicRule::flat(ps, c));
    prop::collection::vec(rule, 0..=2).prop_map(|rs| Base::new(Level::One, rs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(f in formula(8)) {
        prop_assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
    }

    #[test]
    fn conjoin_ignores_order_and_duplicates(fs in prop::collection::vec(formula(2), 0..5)) {
        let mut rev = fs.clone();
        rev.reverse();
        rev.extend(fs.iter().cloned());
        prop_assert_eq!(conjoin(fs.iter()), conjoin(rev.iter()));
    }

    #[test]
    fn base_files_round_trip(b in level1_base()) {
        let text = print_base(&b);
        let back = parse_base(&text, Some(Level::One)).unwrap();
        prop_assert_eq!(print_base(&back), text);
        prop_assert_eq!(back, b);
    }

    #[test]
    fn generated_derivations_normalize(seed in any::<u64>()) {
        let mut g = DerivationGenerator::new(seed, generator_base(), GenConfig::default());
        let a = g.derivation();
        let n = normalize(&a, DEFAULT_STEP_BUDGET).unwrap();
        prop_assert!(is_canonical(&n));
        prop_assert_eq!(&n.conclusion, &a.conclusion);
        prop_assert!(n.open_assumptions().unwrap().is_subset(&a.open_assumptions().unwrap()));
        prop_assert!(check_derivation(&n, g.base(), CalculusMode::Efq).is_ok());
        // the proof document round-trips through JSON
        prop_assert_eq!(proof_from_json(&proof_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn prover_and_countermodels_are_exclusive(
        ctx in prop::collection::btree_set(small_formula(), 0..=2),
        phi in small_formula(),
        base in level1_base(),
    ) {
        let proved = proves(&base, &ctx, &phi, CalculusMode::Efq).unwrap();
        let model = refute(&base, &ctx, &phi, 3, CalculusMode::Efq);
        prop_assert!(!(proved && model.is_some()));
        if let Some(m) = model {
            prop_assert!(m.refutes(&base, &ctx, &phi, CalculusMode::Efq));
        }
    }

    #[test]
    fn support_clauses(base in level1_base(), a in small_formula(), b in small_formula()) {
        let al = WorkingAlphabet::new([Atom::named("p"), Atom::named("q")], 0);
        let none = BTreeSet::new();
        let sup = |g: &BTreeSet<Formula>, f: &Formula| supports(&base, g, f, SemanticsMode::PtV, &al).unwrap();
        prop_assert_eq!(sup(&none, &Formula::and(a.clone(), b.clone())), sup(&none, &a) && sup(&none, &b));
        let ctx: BTreeSet<Formula> = [a.clone()].into_iter().collect();
        prop_assert_eq!(sup(&none, &Formula::imp(a.clone(), b.clone())), sup(&ctx, &b));
        prop_assert!(!sup(&none, &Formula::Bot));
    }

    #[test]
    fn cut_composes_witnesses(base in level1_base(), a in small_formula(), b in small_formula()) {
        // a witness for a, b ⊢ a ∧ b closed off by witnesses for a and b
        let gamma: BTreeSet<Formula> = [a.clone(), b.clone()].into_iter().collect();
        let goal = Formula::and(a.clone(), b.clone());
        let w = ptsem_core::prover::derivation_for(&base, &gamma, &goal, CalculusMode::Efq).unwrap().unwrap();
        let none = BTreeSet::new();
        let wa = ptsem_core::prover::derivation_for(&base, &none, &a, CalculusMode::Efq).unwrap();
        let wb = ptsem_core::prover::derivation_for(&base, &none, &b, CalculusMode::Efq).unwrap();
        if let (Some(wa), Some(wb)) = (wa, wb) {
            let open = w.open_assumptions().unwrap();
            let closures: Vec<_> = [(a, wa), (b, wb)].into_iter().filter(|(f, _)| open.contains(f)).collect();
            let closed = cut(&closures, &w).unwrap();
            prop_assert!(closed.is_closed());
            prop_assert!(check_derivation(&closed, &base, CalculusMode::Efq).is_ok());
            prop_assert_eq!(closed.conclusion, goal);
        }
    }
}
