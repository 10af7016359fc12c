use std::sync::Arc;

use rand::Rng;
use xplain_core::ensemble::Family;
use xplain_core::random::{self, seeded};
use xplain_core::translate::{
    dl_to_circuit, dlmaj_to_circuit, dt_to_circuit, dtmaj_to_circuit, BoundFormula,
};
use xplain_core::verify::verify_dt;
use xplain_core::{
    CircuitBuilder, DecisionList, Ensemble, Example, ExplanationKind, ExplanationQuery,
    FeatureUniverse, GateKind, Model, Rule, Term,
};

fn all_examples(n: usize) -> impl Iterator<Item = Example> {
    (0..1u64 << n).map(move |m| Example::from_mask(n, m))
}

fn fig1() -> DecisionList {
    let t = |p: &[(usize, bool)]| Term::from_pairs(p.iter().copied()).unwrap();
    DecisionList::new(vec![
        Rule::new(t(&[(0, true), (1, true)]), false),
        Rule::new(t(&[(0, false), (2, false)]), true),
        Rule::new(t(&[(1, false), (2, true)]), false),
        Rule::new(Term::empty(), true),
    ])
    .unwrap()
}

#[test]
fn majority_threshold_two_of_three() {
    let mut b = CircuitBuilder::new();
    let ins: Vec<usize> = (0..3).map(|f| b.input(f)).collect();
    let out = b.add(GateKind::Maj(2), ins);
    let c = b.finish(out).unwrap();
    assert!(c.eval(&[true, true, false]));
    assert!(!c.eval(&[true, false, false]));
    assert_eq!(c.maj_count(), 1);
}

#[test]
fn fig1_list_circuit_for_class_zero() {
    let l = fig1();
    let tr = dl_to_circuit(&l, false, 3).unwrap();
    let accepted: Vec<u64> = (0..8u64)
        .filter(|&m| tr.circuit.eval(Example::from_mask(3, m).bits()))
        .collect();
    let zeros: Vec<u64> = (0..8u64)
        .filter(|&m| !l.classify(Example::from_mask(3, m).bits()))
        .collect();
    assert_eq!(accepted.len(), 4);
    assert_eq!(accepted, zeros);
    assert!(tr.certificate.deletion.len() <= 3 * l.len());
    assert_eq!(tr.certificate.formula, BoundFormula::List);
    assert_eq!(tr.certificate.bound(), Some(3 << 12));
}

#[test]
fn constant_list_and_missing_class() {
    for b in [false, true] {
        let l = DecisionList::constant(b);
        let same = dl_to_circuit(&l, b, 2).unwrap();
        let other = dl_to_circuit(&l, !b, 2).unwrap();
        for e in all_examples(2) {
            assert!(same.circuit.eval(e.bits()));
            assert!(!other.circuit.eval(e.bits()));
        }
    }
}

#[test]
fn tree_certificate_matches_mnl() {
    let mut rng = seeded(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let t = random::tree(&mut rng, n, 6).normalize();
        let c = rng.gen();
        let tr = dt_to_circuit(&t, c, n).unwrap();
        assert_eq!(tr.certificate.deletion.len(), t.mnl());
        assert_eq!(tr.certificate.exponent, t.mnl());
        assert_eq!(tr.circuit.maj_count(), 0);
        assert!(tr.certificate.leaves_forest(&tr.circuit));
    }
}

#[test]
fn stump_translates_to_its_feature() {
    let t = xplain_core::DecisionTree::stump(1, false, true);
    let tr = dt_to_circuit(&t, true, 3).unwrap();
    for e in all_examples(3) {
        assert_eq!(tr.circuit.eval(e.bits()), e.get(1));
    }
}

#[test]
fn singleton_and_identical_ensembles() {
    let mut rng = seeded(11);
    for _ in 0..50 {
        let n = rng.gen_range(1..=7);
        let t = random::tree(&mut rng, n, 5);
        let single = dt_to_circuit(&t, true, n).unwrap();
        let one = dtmaj_to_circuit(&Ensemble::trees(vec![t.clone()]).unwrap(), true, n).unwrap();
        let three =
            dtmaj_to_circuit(&Ensemble::trees(vec![t.clone(); 3]).unwrap(), true, n).unwrap();
        assert_eq!(three.certificate.exponent, 3 * t.normalize().mnl());
        assert_eq!(three.certificate.formula, BoundFormula::TreeEnsemble);
        let l = random::list(&mut rng, n, 5, 3);
        let list_single = dl_to_circuit(&l, false, n).unwrap();
        let lists = Ensemble::lists(vec![l.clone()]).unwrap();
        let list_one = dlmaj_to_circuit(&lists, false, n).unwrap();
        assert_eq!(list_one.certificate.exponent, 3 * l.len());
        for e in all_examples(n) {
            let b = e.bits();
            assert_eq!(single.circuit.eval(b), one.circuit.eval(b));
            assert_eq!(single.circuit.eval(b), three.circuit.eval(b));
            assert_eq!(list_single.circuit.eval(b), list_one.circuit.eval(b));
        }
    }
}

#[test]
fn majority_threshold_follows_ensemble_size() {
    let mut rng = seeded(12);
    for size in [1, 3, 5, 7] {
        let ens = random::ensemble(&mut rng, Family::List, 4, size);
        let tr = dlmaj_to_circuit(&ens, true, 4).unwrap();
        let maj: Vec<usize> = tr
            .circuit
            .gates()
            .iter()
            .filter_map(|g| match g.kind {
                GateKind::Maj(t) => Some(t),
                _ => None,
            })
            .collect();
        assert_eq!(maj, vec![size / 2 + 1]);
    }
}

#[test]
fn global_check_matches_tree_verifier() {
    let mut rng = seeded(13);
    for _ in 0..300 {
        let n = rng.gen_range(1..=7);
        let t = random::tree(&mut rng, n, 5).normalize();
        let c = rng.gen();
        let tr = dt_to_circuit(&t, c, n).unwrap();
        let tau = random::partial(&mut rng, n);
        let q = ExplanationQuery::global(ExplanationKind::GAxp, c, tau.clone()).unwrap();
        assert_eq!(
            tr.circuit.global_check(&tau, true, 24).unwrap(),
            verify_dt(&t, &q)
        );
        let total = random::example(&mut rng, n).as_partial();
        let x = rng.gen();
        let e = Example::new((0..n).map(|f| total.get(f).unwrap()).collect());
        assert_eq!(
            tr.circuit.global_check(&total, x, 24).unwrap(),
            tr.circuit.eval(e.bits()) == x
        );
    }
}

#[test]
fn hom_checks_match_enumeration() {
    let mut rng = seeded(14);
    for _ in 0..300 {
        let n = rng.gen_range(1..=8);
        let inner = rng.gen_range(1..=8);
        let c = random::circuit(&mut rng, n, inner);
        let base = c.eval(&vec![false; n]);
        let differs: Vec<Example> = all_examples(n)
            .filter(|e| c.eval(e.bits()) != base)
            .collect();
        assert_eq!(c.hom_check(n, 24).unwrap(), !differs.is_empty());
        for k in 0..=n {
            let want = differs.iter().any(|e| e.weight() <= k);
            assert_eq!(c.phom_check(n, k, 24).unwrap(), want);
        }
    }
    let mut b = CircuitBuilder::new();
    let x = b.input(0);
    let out = b.add(GateKind::Or, vec![x]);
    let identity = b.finish(out).unwrap();
    assert!(identity.hom_check(2, 24).unwrap());
    assert!(identity.phom_check(2, 1, 24).unwrap());
    assert!(!identity.phom_check(2, 0, 24).unwrap());
    let m = Model::circuit(Arc::new(FeatureUniverse::indexed(2)), identity).unwrap();
    assert!(m.classify_bits(&[true, false]));
}
