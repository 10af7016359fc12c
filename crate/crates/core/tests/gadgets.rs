use std::collections::BTreeMap;

use rand::Rng;
use xplain_core::gadgets::*;
use xplain_core::model::ModelKind;
use xplain_core::random::seeded;
use xplain_core::{BruteCaps, Example, Members};

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn all_answers(g: &GadgetInstance) -> Vec<bool> {
    let caps = BruteCaps::default();
    g.queries
        .iter()
        .map(|q| answer(&g.model, q, &caps).unwrap())
        .collect()
}

#[test]
fn odt_from_examples_contract() {
    let t = odt_from_examples(&[0, 1], &[]).unwrap();
    assert_eq!(t.leaf_count(), 1);
    assert!(!t.classify(&[false, false]));

    let t = odt_from_examples(&[0, 1], &[vec![false, false]]).unwrap();
    assert_eq!(t.class_count(true), 1);
    for mask in 0..4u64 {
        assert_eq!(t.classify(Example::from_mask(2, mask).bits()), mask == 0);
    }
    assert!(odt_from_examples(&[0], &[vec![true], vec![true]]).is_err());

    let mut rng = seeded(5);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let mut set: Vec<Vec<bool>> = (0..rng.gen_range(0..6))
            .map(|_| (0..n).map(|_| rng.gen()).collect())
            .collect();
        set.sort();
        set.dedup();
        let t = odt_from_examples(&order, &set).unwrap();
        assert!(t.respects_order(&order));
        assert_eq!(t.class_count(true), set.len());
        assert!(t.leaf_count() <= 2 * set.len() * n + 1);
        for mask in 0..1u64 << n {
            let e = Example::from_mask(n, mask);
            let member = set
                .iter()
                .any(|x| order.iter().enumerate().all(|(i, &f)| x[i] == e.get(f)));
            assert_eq!(t.classify(e.bits()), member);
        }
    }
}

#[test]
fn family_builders_match_definitions() {
    let empty = SetFamily::new(vec![]);
    assert!(!set_model_odt(&empty, true, &[])
        .unwrap()
        .classify(&[true, false]));
    let single = SetFamily::new(vec![vec![1]]);
    let t = set_model_odt(&single, true, &[0, 1, 2]).unwrap();
    for mask in 0..8u64 {
        let e = Example::from_mask(3, mask);
        assert_eq!(t.classify(e.bits()), e.get(1));
    }

    let mut rng = seeded(9);
    for _ in 0..200 {
        let n = rng.gen_range(1..=7);
        let sets: Vec<Vec<usize>> = (0..rng.gen_range(0..5))
            .map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect())
            .collect();
        let fam = SetFamily::new(sets);
        let c: bool = rng.gen();
        let order: Vec<usize> = (0..n).rev().collect();
        let t = set_model_odt(&fam, c, &order).unwrap();
        assert!(t.respects_order(&order));
        assert!(t.mnl() <= fam.b());
        let ds = subset_model_rules(&fam, c, RuleFamily::Set);
        let dl = subset_model_rules(&fam, c, RuleFamily::List);
        for mask in 0..1u64 << n {
            let e = Example::from_mask(n, mask);
            let exact = fam.matches_exactly(e.bits());
            let sub = fam.matches_subset(e.bits());
            assert_eq!(t.classify(e.bits()) == c, exact);
            for kind in [&ds, &dl] {
                let got = match kind {
                    ModelKind::Set(s) => s.classify(e.bits()),
                    ModelKind::List(l) => l.classify(e.bits()),
                    _ => unreachable!(),
                };
                assert_eq!(got == c, sub);
            }
        }
    }
}

#[test]
fn hitting_set_examples() {
    let one = HittingSetInstance {
        universe: strings(&["u"]),
        sets: vec![strings(&["u"])],
        k: 1,
    };
    for mode in GadgetMode::ALL {
        let g = hitting_set_gadget(&one, mode).unwrap();
        assert!(g.truth);
        assert!(all_answers(&g).iter().all(|&a| a));
    }
    let two = HittingSetInstance {
        universe: strings(&["u", "v"]),
        sets: vec![strings(&["u"]), strings(&["v"])],
        k: 1,
    };
    for mode in GadgetMode::ALL {
        let g = hitting_set_gadget(&two, mode).unwrap();
        assert!(!g.truth);
        assert!(all_answers(&g).iter().all(|&a| !a));
    }
    let bad = HittingSetInstance {
        universe: strings(&["u"]),
        sets: vec![vec![]],
        k: 1,
    };
    assert!(hitting_set_gadget(&bad, GadgetMode::SetOdt).is_err());
}

fn graph(classes: &[&[&str]], edges: &[(&str, &str)]) -> ColouredGraph {
    let mut adjacency: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (a, b) in edges {
        adjacency
            .entry(a.to_string())
            .or_default()
            .push(b.to_string());
    }
    ColouredGraph::from_instance(&GraphInstance {
        classes: classes.iter().map(|c| strings(c)).collect(),
        adjacency,
    })
    .unwrap()
}

#[test]
fn clique_gadgets_small_cases() {
    let complete = graph(
        &[&["a"], &["b"], &["c"]],
        &[("a", "b"), ("b", "c"), ("a", "c")],
    );
    let edgeless = graph(&[&["a", "x"], &["b"]], &[]);
    for mode in GadgetMode::ALL {
        let g = mcc_ensemble_gadget(&complete, mode).unwrap();
        assert!(g.truth);
        assert_eq!(all_answers(&g), vec![true, true]);
        let g = mcc_ensemble_gadget(&edgeless, mode).unwrap();
        assert!(!g.truth);
        assert_eq!(all_answers(&g), vec![false, false]);
        for gr in [&complete, &edgeless] {
            let g = mcc_unary_ensemble_gadget(gr, mode).unwrap();
            assert_eq!(all_answers(&g), vec![g.truth, g.truth]);
        }
    }
    let pair = graph(&[&["a", "x"], &["b", "y"]], &[("a", "b")]);
    let g = mcc_odt_gaxp_gadget(&pair, DEFAULT_MAX_ODT_K).unwrap();
    assert!(g.truth);
    let q = &g.queries[0];
    assert!(answer(&g.model, q, &BruteCaps::default()).unwrap());
    let oracle = xplain_core::oracle::oracle_min(
        &g.model,
        xplain_core::ExplanationKind::GAxp,
        &xplain_core::Target::Class(false),
    )
    .unwrap();
    assert_eq!(oracle.size, Some(2));
    let ModelKind::Tree(t) = g.model.kind() else {
        panic!()
    };
    assert!(t.respects_order(g.order.as_ref().unwrap()));
    let none = graph(&[&["a"], &["b"]], &[]);
    let g = mcc_odt_gaxp_gadget(&none, DEFAULT_MAX_ODT_K).unwrap();
    assert!(!g.truth);
    assert!(!answer(&g.model, &g.queries[0], &BruteCaps::default()).unwrap());
    assert!(mcc_odt_gaxp_gadget(&complete, 2).is_err());
}

#[test]
fn unary_vote_arithmetic() {
    let mut rng = seeded(21);
    for _ in 0..20 {
        let n = rng.gen_range(3..=7);
        let k = rng.gen_range(2..=3.min(n));
        let g = ColouredGraph::random(&mut rng, n, k, 0.7);
        let gi = mcc_unary_ensemble_gadget(&g, GadgetMode::SetOdt).unwrap();
        let ModelKind::Ensemble(ens) = gi.model.kind() else {
            panic!()
        };
        let missing = n * (n - 1) / 2 - g.m();
        assert_eq!(ens.len(), 2 * n * missing + 2 * k - 1);
        assert_eq!(ens.votes(&vec![false; n]), n * missing);
        let Members::Trees(trees) = ens.members() else {
            panic!()
        };
        assert!(trees.iter().all(|t| t.mnl() <= 1));
        // a clique example wins by exactly one vote
        let mut pick = Vec::new();
        fn search(g: &ColouredGraph, i: usize, pick: &mut Vec<usize>) -> bool {
            if i == g.k() {
                return true;
            }
            for &v in &g.classes()[i] {
                if pick.iter().all(|&u| g.adjacent(u, v)) {
                    pick.push(v);
                    if search(g, i + 1, pick) {
                        return true;
                    }
                    pick.pop();
                }
            }
            false
        }
        if search(&g, 0, &mut pick) {
            let mut bits = vec![false; n];
            for v in pick {
                bits[v] = true;
            }
            assert_eq!(ens.votes(&bits), ens.threshold());
        }
    }
}

#[test]
fn taut_examples() {
    let taut = DnfInstance {
        vars: strings(&["x"]),
        terms: vec![vec![("x".into(), 1)], vec![("x".into(), 0)]],
    };
    let g = taut_ds_gadget(&taut).unwrap();
    assert!(!g.truth);
    assert_eq!(all_answers(&g), vec![false]);
    let single = DnfInstance {
        vars: strings(&["x", "y", "z"]),
        terms: vec![vec![("x".into(), 1), ("y".into(), 1), ("z".into(), 1)]],
    };
    let g = taut_ds_gadget(&single).unwrap();
    assert_eq!(g.meta["trivial_no"], true);
    assert!(g.truth);
    let long = DnfInstance {
        vars: strings(&["a", "b", "c", "d"]),
        terms: vec![vec![
            ("a".into(), 1),
            ("b".into(), 1),
            ("c".into(), 1),
            ("d".into(), 1),
        ]],
    };
    assert!(taut_ds_gadget(&long).is_err());
}

#[test]
fn gadget_json_has_all_parts() {
    let g = hitting_set_gadget(
        &HittingSetInstance {
            universe: strings(&["u", "v"]),
            sets: vec![strings(&["u", "v"])],
            k: 1,
        },
        GadgetMode::SubsetDl,
    )
    .unwrap();
    let v = g.to_value();
    for key in ["provenance", "model", "queries", "truth", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["queries"].as_array().unwrap().len(), 4);
    let back = xplain_core::format::model_from_value(v["model"].clone()).unwrap();
    assert_eq!(back, g.model);
}
