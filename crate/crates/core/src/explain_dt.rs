use std::collections::HashSet;

use crate::ensemble::{Ensemble, Members};
use crate::enumerate::{assignment, subsets_by_size};
use crate::error::{Error, Result};
use crate::tree::{DecisionTree, Node, TreeBuilder};
use crate::universe::{Example, PartialExample};
use crate::verify::{Candidate, ExplanationKind, Target};

pub const DEFAULT_PRODUCT_CEILING: u128 = 1_000_000;

fn only_class(t: &DecisionTree, tau: &PartialExample, class: bool) -> bool {
    let (has0, has1) = t.reachable_classes(tau);
    if class {
        !has0
    } else {
        !has1
    }
}

/// Inclusion-minimal local abductive explanation: start from all features
/// and drop them in ascending index order while the rest still fixes the
/// class.
pub fn laxp_subset_min(t: &DecisionTree, e: &Example) -> Vec<usize> {
    let t = t.normalized();
    let class = t.classify(e.bits());
    let mut tau = e.as_partial();
    for f in 0..e.len() {
        tau.unassign(f);
        if !only_class(&t, &tau, class) {
            tau.assign(f, e.get(f));
        }
    }
    tau.domain()
}

fn shrink_global(t: &DecisionTree, mut tau: PartialExample, class: bool) -> PartialExample {
    for (f, b) in tau.clone().assigned() {
        tau.unassign(f);
        if !only_class(t, &tau, class) {
            tau.assign(f, b);
        }
    }
    tau
}

fn seed_path(t: &DecisionTree, class: bool, n: usize) -> Option<PartialExample> {
    t.paths()
        .into_iter()
        .find(|p| p.class == class)
        .map(|p| p.to_partial(n).expect("normalized path"))
}

/// Inclusion-minimal global abductive explanation for class `c`, grown from
/// the path of the first `c`-leaf in depth-first order. `None` if the tree
/// has no `c`-leaf.
pub fn gaxp_subset_min(t: &DecisionTree, c: bool, n: usize) -> Option<PartialExample> {
    let t = t.normalized();
    seed_path(&t, c, n).map(|tau| shrink_global(&t, tau, c))
}

/// Inclusion-minimal global contrastive explanation for class `c`: a
/// partial example under which no `c`-leaf is reachable.
pub fn gcxp_subset_min(t: &DecisionTree, c: bool, n: usize) -> Option<PartialExample> {
    let t = t.normalized();
    seed_path(&t, !c, n).map(|tau| shrink_global(&t, tau, !c))
}

/// Conflict sets `D_l` of all leaves labelled differently from `e`, in
/// depth-first leaf order.
fn opposite_conflicts(t: &DecisionTree, e: &Example) -> Vec<Vec<usize>> {
    let class = t.classify(e.bits());
    t.paths()
        .into_iter()
        .filter(|p| p.class != class)
        .map(|p| p.conflicts(e.bits()))
        .collect()
}

/// Minimum local contrastive explanation: the smallest conflict set between
/// `e` and the path of an opposite leaf, first in depth-first leaf order on
/// ties.
pub fn lcxp_min(t: &DecisionTree, e: &Example) -> Option<Vec<usize>> {
    let t = t.normalized();
    let sets = opposite_conflicts(&t, e);
    let best = sets.iter().map(Vec::len).min()?;
    sets.into_iter().find(|d| d.len() == best)
}

/// A conflict set that contains no other conflict set, first in depth-first
/// leaf order.
pub fn lcxp_subset_min(t: &DecisionTree, e: &Example) -> Option<Vec<usize>> {
    let t = t.normalized();
    let sets = opposite_conflicts(&t, e);
    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|f| b.binary_search(f).is_ok());
    sets.iter()
        .find(|d| !sets.iter().any(|o| o.len() < d.len() && is_subset(o, d)))
        .cloned()
}

/// First explanation of size at most `k` in the canonical order (subsets by
/// size then lexicographically, assignments lexicographically), checked on
/// the restricted tree. Only tested features are enumerated: a minimum
/// explanation never mentions an untested feature, and dropping them keeps
/// the relative order of the remaining candidates.
pub fn card_xp_search(
    t: &DecisionTree,
    kind: ExplanationKind,
    target: &Target,
    k: usize,
    n: usize,
) -> Result<Option<Candidate>> {
    let t = t.normalized();
    let feats = t.features();
    match (kind, target) {
        (ExplanationKind::LAxp, Target::Example(e)) => {
            let class = t.classify(e.bits());
            Ok(subsets_by_size(&feats, k)
                .find(|a| only_class(&t, &e.restrict(a), class))
                .map(Candidate::Features))
        }
        (ExplanationKind::GAxp | ExplanationKind::GCxp, Target::Class(c)) => {
            let want = if kind == ExplanationKind::GAxp {
                *c
            } else {
                !*c
            };
            for a in subsets_by_size(&feats, k) {
                for index in 0..1u64 << a.len() {
                    let tau = PartialExample::from_pairs(
                        n,
                        a.iter().copied().zip(assignment(a.len(), index)),
                    )?;
                    if only_class(&t, &tau, want) {
                        return Ok(Some(Candidate::Partial(tau)));
                    }
                }
            }
            Ok(None)
        }
        _ => Err(Error::InvalidQuery(format!(
            "card_xp_search handles laxp with an example or gaxp/gcxp with a class, not {kind}"
        ))),
    }
}

/// Minimum global explanation of size at most `k` by a bounded search tree:
/// pick a reachable leaf of the wrong class and branch on which of its
/// unassigned path features to set against the path. Exact, and usable on
/// trees with many features where subset enumeration is out of reach.
pub fn global_card_branch(
    t: &DecisionTree,
    kind: ExplanationKind,
    c: bool,
    k: usize,
    n: usize,
) -> Result<Option<PartialExample>> {
    let want = match kind {
        ExplanationKind::GAxp => c,
        ExplanationKind::GCxp => !c,
        _ => {
            return Err(Error::InvalidQuery(format!(
                "global_card_branch handles gaxp/gcxp, not {kind}"
            )))
        }
    };
    let t = t.normalized();
    let mut tau = PartialExample::empty(n);
    for budget in 0..=k {
        let mut failed = HashSet::new();
        if branch(&t, want, &mut tau, budget, &mut failed) {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

fn first_wrong_leaf(
    t: &DecisionTree,
    tau: &PartialExample,
    want: bool,
) -> Option<Vec<(usize, bool)>> {
    fn go(
        t: &DecisionTree,
        id: usize,
        tau: &PartialExample,
        want: bool,
        path: &mut Vec<(usize, bool)>,
    ) -> bool {
        match t.node(id) {
            Node::Leaf(c) => c != want,
            Node::Inner { feature, zero, one } => match tau.get(feature) {
                Some(b) => go(t, if b { one } else { zero }, tau, want, path),
                None => {
                    for (b, child) in [(false, zero), (true, one)] {
                        path.push((feature, b));
                        if go(t, child, tau, want, path) {
                            return true;
                        }
                        path.pop();
                    }
                    false
                }
            },
        }
    }
    let mut path = Vec::new();
    go(t, t.root(), tau, want, &mut path).then_some(path)
}

/// `failed` caches assignments already shown to be dead ends at this budget;
/// the same assignment is reached once per ordering of its features.
fn branch(
    t: &DecisionTree,
    want: bool,
    tau: &mut PartialExample,
    budget: usize,
    failed: &mut HashSet<Vec<(usize, bool)>>,
) -> bool {
    let Some(path) = first_wrong_leaf(t, tau, want) else {
        return true;
    };
    if tau.size() >= budget {
        return false;
    }
    let key: Vec<(usize, bool)> = tau.assigned().collect();
    if failed.contains(&key) {
        return false;
    }
    for (f, b) in path {
        tau.assign(f, !b);
        if branch(t, want, tau, budget, failed) {
            return true;
        }
        tau.unassign(f);
    }
    failed.insert(key);
    false
}

/// Single tree equivalent to a majority vote of trees: every leaf of the
/// first tree gets a copy of the second, and so on; final leaves are
/// labelled by the majority of the leaf labels on their path. Tests already
/// decided on the path are skipped while copying, so the result comes out
/// normalized.
pub fn product_dt(ens: &Ensemble, ceiling: u128) -> Result<DecisionTree> {
    let Members::Trees(trees) = ens.members() else {
        return Err(Error::InvalidQuery(
            "product_dt needs an ensemble of trees".into(),
        ));
    };
    let projected = trees
        .iter()
        .map(|t| t.leaf_count() as u128)
        .fold(1u128, u128::saturating_mul);
    if projected > ceiling {
        return Err(Error::ProductTooLarge { projected, ceiling });
    }
    let bound = trees
        .iter()
        .filter_map(|t| t.features().last().copied())
        .max()
        .map_or(0, |f| f + 1);
    let threshold = ens.threshold();

    struct Ctx<'a> {
        trees: &'a [DecisionTree],
        threshold: usize,
        fixed: Vec<Option<bool>>,
        out: TreeBuilder,
    }

    fn build(cx: &mut Ctx<'_>, i: usize, id: usize, votes: usize) -> usize {
        match cx.trees[i].node(id) {
            Node::Leaf(c) => {
                let votes = votes + c as usize;
                if i + 1 == cx.trees.len() {
                    cx.out.leaf(votes >= cx.threshold)
                } else {
                    let root = cx.trees[i + 1].root();
                    build(cx, i + 1, root, votes)
                }
            }
            Node::Inner { feature, zero, one } => match cx.fixed[feature] {
                Some(b) => build(cx, i, if b { one } else { zero }, votes),
                None => {
                    cx.fixed[feature] = Some(false);
                    let z = build(cx, i, zero, votes);
                    cx.fixed[feature] = Some(true);
                    let o = build(cx, i, one, votes);
                    cx.fixed[feature] = None;
                    cx.out.inner(feature, z, o)
                }
            },
        }
    }

    let mut cx = Ctx {
        trees,
        threshold,
        fixed: vec![None; bound],
        out: TreeBuilder::new(),
    };
    let root = build(&mut cx, 0, trees[0].root(), 0);
    let product = cx.out.finish(root);
    assert!(product.leaf_count() as u128 <= projected);
    debug_assert!(product.is_normalized());
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_tree_cases() {
        let t = DecisionTree::leaf(true);
        let e = Example::zeros(3);
        assert_eq!(laxp_subset_min(&t, &e), Vec::<usize>::new());
        assert_eq!(gaxp_subset_min(&t, true, 3), Some(PartialExample::empty(3)));
        assert_eq!(gaxp_subset_min(&t, false, 3), None);
        assert_eq!(
            gcxp_subset_min(&t, false, 3),
            Some(PartialExample::empty(3))
        );
        assert_eq!(gcxp_subset_min(&t, true, 3), None);
        assert_eq!(lcxp_min(&t, &e), None);
    }

    #[test]
    fn stump_cases() {
        let t = DecisionTree::stump(1, false, true);
        for mask in 0..8 {
            let e = Example::from_mask(3, mask);
            assert_eq!(laxp_subset_min(&t, &e), vec![1]);
            assert_eq!(lcxp_min(&t, &e), Some(vec![1]));
            assert_eq!(lcxp_subset_min(&t, &e), Some(vec![1]));
        }
        let e = Target::Example(Example::zeros(3));
        assert_eq!(
            card_xp_search(&t, ExplanationKind::LAxp, &e, 0, 3).unwrap(),
            None
        );
        assert_eq!(
            card_xp_search(&t, ExplanationKind::LAxp, &e, 3, 3).unwrap(),
            Some(Candidate::Features(vec![1]))
        );
    }

    #[test]
    fn product_of_identical_stumps() {
        let s = DecisionTree::stump(0, false, true);
        let ens = Ensemble::trees(vec![s.clone(), s.clone(), s.clone()]).unwrap();
        let p = product_dt(&ens, DEFAULT_PRODUCT_CEILING).unwrap();
        assert_eq!(p, s);
        let big = Ensemble::trees(vec![s.clone(), s.clone(), s]).unwrap();
        assert!(matches!(
            product_dt(&big, 7),
            Err(Error::ProductTooLarge { projected: 8, .. })
        ));
    }

    #[test]
    fn branch_matches_enumeration_on_stump() {
        let t = DecisionTree::stump(2, true, false);
        let tau = global_card_branch(&t, ExplanationKind::GAxp, false, 2, 3)
            .unwrap()
            .unwrap();
        assert_eq!(tau, PartialExample::from_pairs(3, [(2, true)]).unwrap());
        assert!(global_card_branch(&t, ExplanationKind::GAxp, false, 0, 3)
            .unwrap()
            .is_none());
    }
}
