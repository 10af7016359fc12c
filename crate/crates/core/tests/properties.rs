use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use xplain_core::explain_rules::ds_to_dl;
use xplain_core::format::{model_from_value, model_to_value};
use xplain_core::random::{self, seeded};
use xplain_core::verify::{verify_brute, verify_dt, verify_with};
use xplain_core::{
    BruteCaps, Candidate, Example, ExplanationKind, ExplanationQuery, FeatureUniverse, Model,
    ModelKind, PartialExample, Target,
};

fn all_examples(n: usize) -> impl Iterator<Item = Example> {
    (0..1u64 << n).map(move |m| Example::from_mask(n, m))
}

fn model(seed: u64, n: usize) -> Model {
    let mut rng = seeded(seed);
    let kind = match seed % 5 {
        0 => ModelKind::Tree(random::tree(&mut rng, n, 5)),
        1 => ModelKind::Set(random::set(&mut rng, n, 5, 3)),
        2 => ModelKind::List(random::list(&mut rng, n, 5, 3)),
        3 => {
            let fam = [
                xplain_core::Family::Tree,
                xplain_core::Family::Set,
                xplain_core::Family::List,
            ][rng.gen_range(0..3)];
            ModelKind::Ensemble(random::ensemble(&mut rng, fam, n, 3))
        }
        _ => ModelKind::Circuit(random::circuit(&mut rng, n, 5)),
    };
    Model::new(Arc::new(FeatureUniverse::indexed(n)), kind).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalize_keeps_the_function(seed in any::<u64>(), n in 1usize..8) {
        let t = random::tree(&mut seeded(seed), n, 6);
        let u = t.normalize();
        prop_assert!(u.is_normalized());
        prop_assert!(u.leaf_count() <= t.leaf_count());
        for e in all_examples(n) {
            prop_assert_eq!(t.classify(e.bits()), u.classify(e.bits()));
        }
    }

    #[test]
    fn flipping_twice_is_identity(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = seeded(seed);
        let e = random::example(&mut rng, n);
        let set: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
        prop_assert_eq!(e.flipped(&set).flipped(&set), e);
    }

    #[test]
    fn negation_flips_every_class(seed in any::<u64>(), n in 1usize..7) {
        let m = model(seed, n);
        if let Some(neg) = m.negated() {
            for e in all_examples(n) {
                prop_assert_ne!(m.classify_bits(e.bits()), neg.classify_bits(e.bits()));
            }
        }
    }

    #[test]
    fn set_to_list_keeps_the_function(seed in any::<u64>(), n in 1usize..8) {
        let s = random::set(&mut seeded(seed), n, 6, 3);
        let l = ds_to_dl(&s);
        for e in all_examples(n) {
            prop_assert_eq!(s.classify(e.bits()), l.classify(e.bits()));
        }
    }

    #[test]
    fn explanations_are_monotone(seed in any::<u64>(), n in 1usize..7) {
        let m = model(seed, n);
        let mut rng = seeded(seed ^ 0x55);
        let e = random::example(&mut rng, n);
        let set: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
        let extra = rng.gen_range(0..n);
        let mut bigger = set.clone();
        if !bigger.contains(&extra) {
            bigger.push(extra);
            bigger.sort();
        }
        let caps = BruteCaps::default();
        for kind in [ExplanationKind::LAxp, ExplanationKind::LCxp] {
            let small = verify_brute(&m, &ExplanationQuery::local(kind, e.clone(), set.clone()).unwrap(), &caps).unwrap();
            let big = verify_brute(&m, &ExplanationQuery::local(kind, e.clone(), bigger.clone()).unwrap(), &caps).unwrap();
            prop_assert!(!small || big, "{kind} not closed under supersets");
        }
        let c: bool = rng.gen();
        let tau = random::partial(&mut rng, n);
        let mut more = tau.clone();
        if more.get(extra).is_none() {
            more.assign(extra, rng.gen());
        }
        for kind in [ExplanationKind::GAxp, ExplanationKind::GCxp] {
            let small = verify_brute(&m, &ExplanationQuery::global(kind, c, tau.clone()).unwrap(), &caps).unwrap();
            let big = verify_brute(&m, &ExplanationQuery::global(kind, c, more.clone()).unwrap(), &caps).unwrap();
            prop_assert!(!small || big, "{kind} not closed under extension");
        }
    }

    #[test]
    fn tree_verifier_matches_brute_force(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = seeded(seed);
        let t = random::tree(&mut rng, n, 5);
        let m = Model::tree(Arc::new(FeatureUniverse::indexed(n)), t.clone()).unwrap();
        let e = random::example(&mut rng, n);
        let set: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
        let caps = BruteCaps::default();
        for kind in [ExplanationKind::LAxp, ExplanationKind::LCxp] {
            let q = ExplanationQuery::local(kind, e.clone(), set.clone()).unwrap();
            let brute = verify_brute(&m, &q, &caps).unwrap();
                prop_assert_eq!(verify_dt(&t.normalize(), &q), brute);
                prop_assert_eq!(verify_with(&m, &q, &caps).unwrap(), brute);
        }
        let tau = random::partial(&mut rng, n);
        for kind in [ExplanationKind::GAxp, ExplanationKind::GCxp] {
            for c in [false, true] {
                let q = ExplanationQuery::global(kind, c, tau.clone()).unwrap();
                let brute = verify_brute(&m, &q, &caps).unwrap();
                prop_assert_eq!(verify_dt(&t.normalize(), &q), brute);
                prop_assert_eq!(verify_with(&m, &q, &caps).unwrap(), brute);
            }
        }
    }

    #[test]
    fn json_roundtrip(seed in any::<u64>(), n in 1usize..6) {
        let m = model(seed, n);
        let back = model_from_value(model_to_value(&m)).unwrap();
        for e in all_examples(n) {
            prop_assert_eq!(m.classify_bits(e.bits()), back.classify_bits(e.bits()));
        }
        prop_assert_eq!(model_to_value(&back), model_to_value(&m));
    }
}

#[test]
fn global_query_rejects_mismatched_length() {
    let q = ExplanationQuery::new(
        ExplanationKind::GAxp,
        Target::Class(true),
        Candidate::Partial(PartialExample::empty(2)),
    );
    let m = model(0, 3);
    if let Ok(q) = q {
        assert!(verify_brute(&m, &q, &BruteCaps::default()).is_err());
    }
}
