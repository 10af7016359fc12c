use std::sync::Arc;

use rand::Rng;
use xplain_core::explain_dt::{card_xp_search, laxp_subset_min, lcxp_min};
use xplain_core::explain_rules::{
    ds_to_dl, laxp_rules_subset_min, lcxp_card_branch, lcxp_card_branch_ens, lcxp_card_enum,
};
use xplain_core::oracle::{oracle_min, oracle_subset_min_check};
use xplain_core::random::{self, seeded};
use xplain_core::{
    BruteCaps, Candidate, DecisionList, DecisionTree, Ensemble, Example, ExplanationKind,
    FeatureUniverse, Model, Rule, Target, Term, TreeBuilder,
};

fn fig1_list() -> DecisionList {
    let t = |p: &[(usize, bool)]| Term::from_pairs(p.iter().copied()).unwrap();
    DecisionList::new(vec![
        Rule::new(t(&[(0, true), (1, true)]), false),
        Rule::new(t(&[(0, false), (2, false)]), true),
        Rule::new(t(&[(1, false), (2, true)]), false),
        Rule::new(Term::empty(), true),
    ])
    .unwrap()
}

/// The same function as a tree over x, y, z.
fn fig1_tree() -> DecisionTree {
    let mut b = TreeBuilder::new();
    let (zero, one) = (b.leaf(false), b.leaf(true));
    let left_y = b.inner(1, zero, one);
    let left = b.inner(2, one, left_y);
    let right_z = b.inner(2, one, zero);
    let right = b.inner(1, right_z, zero);
    let root = b.inner(0, left, right);
    b.finish(root)
}

fn xyz() -> Arc<FeatureUniverse> {
    Arc::new(FeatureUniverse::new(["x", "y", "z"]).unwrap())
}

#[test]
fn fig1_fixtures_agree() {
    let l = fig1_list();
    let t = fig1_tree();
    for m in 0..8 {
        let e = Example::from_mask(3, m);
        assert_eq!(l.classify(e.bits()), t.classify(e.bits()));
    }
    let e = Example::new(vec![false, false, true]);
    let target = Target::Example(e.clone());
    let tm = Model::tree(xyz(), t.clone()).unwrap();
    let a = laxp_subset_min(&t, &e);
    assert!(
        oracle_subset_min_check(&tm, ExplanationKind::LAxp, &target, &Candidate::Features(a))
            .unwrap()
    );

    let lm = Model::list(xyz(), l.clone()).unwrap();
    assert_eq!(
        laxp_rules_subset_min(&lm, &e, &BruteCaps::default()).unwrap(),
        vec![1, 2]
    );
    assert_eq!(lcxp_card_enum(&lm, &e, 2).unwrap(), Some(vec![1]));
    assert_eq!(lcxp_card_branch(&l, &e, 1), Some(vec![1]));
    assert_eq!(lcxp_min(&t, &e).map(|s| s.len()), Some(1));
    let constant = Model::list(xyz(), DecisionList::constant(false)).unwrap();
    assert_eq!(
        laxp_rules_subset_min(&constant, &e, &BruteCaps::default()).unwrap(),
        Vec::<usize>::new()
    );
    for k in 0..=3 {
        assert_eq!(lcxp_card_enum(&constant, &e, k).unwrap(), None);
    }
}

#[test]
fn larger_trees_match_oracle() {
    let mut rng = seeded(101);
    for _ in 0..60 {
        let n = rng.gen_range(11..=12);
        let t = random::tree(&mut rng, n, 8);
        let m = Model::tree(Arc::new(FeatureUniverse::indexed(n)), t.clone()).unwrap();
        let e = random::example(&mut rng, n);
        let target = Target::Example(e.clone());
        let o = oracle_min(&m, ExplanationKind::LCxp, &target).unwrap();
        assert_eq!(lcxp_min(&t, &e).map(|s| s.len()), o.size);
        for k in 1..=3 {
            let found = card_xp_search(&t, ExplanationKind::LAxp, &target, k, n).unwrap();
            let o = oracle_min(&m, ExplanationKind::LAxp, &target).unwrap();
            assert_eq!(found.is_some(), o.size.is_some_and(|s| s <= k));
        }
    }
}

#[test]
fn rule_algorithms_agree_up_to_twelve_features() {
    let mut rng = seeded(102);
    for i in 0..150 {
        let n = rng.gen_range(8..=12);
        let l = if i % 2 == 0 {
            random::list(&mut rng, n, 7, 3)
        } else {
            ds_to_dl(&random::set(&mut rng, n, 6, 3))
        };
        let m = Model::list(Arc::new(FeatureUniverse::indexed(n)), l.clone()).unwrap();
        let e = random::example(&mut rng, n);
        let branch = lcxp_card_branch(&l, &e, n);
        let single =
            lcxp_card_branch_ens(&Ensemble::lists(vec![l.clone()]).unwrap(), &e, n).unwrap();
        let enumerated = lcxp_card_enum(&m, &e, n).unwrap();
        assert_eq!(branch, single);
        assert_eq!(branch, enumerated);
        let o = oracle_min(&m, ExplanationKind::LCxp, &Target::Example(e.clone())).unwrap();
        assert_eq!(branch.as_ref().map(Vec::len), o.size);

        // every answer routes the flipped example to a rule of the other class
        let class = l.classify(e.bits());
        if let Some(a) = &branch {
            let r = l.rule_of(e.flipped(a).bits());
            assert_ne!(l.rules()[r].class, class);
        }
        // and every explanation contains one whose flip is decided against e
        if let Some(Candidate::Features(a)) = o.witness {
            let covered = (0..1u32 << a.len()).any(|mask| {
                let sub: Vec<usize> = a
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &f)| f)
                    .collect();
                l.rules()[l.rule_of(e.flipped(&sub).bits())].class != class
            });
            assert!(covered);
        }
    }
}

#[test]
fn renaming_features_keeps_witnesses() {
    let mut rng = seeded(103);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let l = random::list(&mut rng, n, 5, 3);
        let plain = Model::list(Arc::new(FeatureUniverse::indexed(n)), l.clone()).unwrap();
        let names: Vec<String> = (0..n).rev().map(|i| format!("renamed{i}")).collect();
        let renamed = Model::list(Arc::new(FeatureUniverse::new(names).unwrap()), l).unwrap();
        let e = random::example(&mut rng, n);
        let caps = BruteCaps::default();
        assert_eq!(
            laxp_rules_subset_min(&plain, &e, &caps).unwrap(),
            laxp_rules_subset_min(&renamed, &e, &caps).unwrap()
        );
        assert_eq!(
            lcxp_card_enum(&plain, &e, n).unwrap(),
            lcxp_card_enum(&renamed, &e, n).unwrap()
        );
        let t = Target::Example(e);
        assert_eq!(
            oracle_min(&plain, ExplanationKind::LAxp, &t).unwrap(),
            oracle_min(&renamed, ExplanationKind::LAxp, &t).unwrap()
        );
    }
}
