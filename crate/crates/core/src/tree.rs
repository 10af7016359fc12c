use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::universe::PartialExample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(bool),
    Inner {
        feature: usize,
        zero: usize,
        one: usize,
    },
}

/// Binary decision tree stored as an arena. Inner nodes test one feature and
/// go to `zero` or `one`; leaves carry a class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    root: usize,
    order: Option<Vec<usize>>,
}

/// Partial example read off the root-to-leaf path of one leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAssignment {
    pub leaf: usize,
    pub class: bool,
    /// Tests in path order, root first.
    pub literals: Vec<(usize, bool)>,
}

impl PathAssignment {
    pub fn to_partial(&self, n: usize) -> Result<PartialExample> {
        PartialExample::from_pairs(n, self.literals.iter().copied())
    }

    /// Features where the path disagrees with `e`.
    pub fn conflicts(&self, e: &[bool]) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .literals
            .iter()
            .filter(|&&(f, b)| e[f] != b)
            .map(|&(f, _)| f)
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

impl DecisionTree {
    pub fn new(nodes: Vec<Node>, root: usize) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::InvalidTree(format!("root {root} out of range")));
        }
        let mut parents = vec![0u32; nodes.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if let Node::Inner { zero, one, .. } = nodes[id] {
                for child in [zero, one] {
                    if child >= nodes.len() {
                        return Err(Error::InvalidTree(format!(
                            "node {id} points to missing node {child}"
                        )));
                    }
                    if child == root || parents[child] > 0 {
                        return Err(Error::InvalidTree(format!(
                            "node {child} has more than one parent"
                        )));
                    }
                    parents[child] += 1;
                    stack.push(child);
                }
            }
        }
        if let Some(orphan) = (0..nodes.len()).find(|&i| i != root && parents[i] == 0) {
            return Err(Error::InvalidTree(format!(
                "node {orphan} is unreachable from the root"
            )));
        }
        Ok(DecisionTree {
            nodes,
            root,
            order: None,
        })
    }

    pub fn leaf(class: bool) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf(class)],
            root: 0,
            order: None,
        }
    }

    /// Single test of `feature` with a `zero_class` leaf and a `one_class` leaf.
    pub fn stump(feature: usize, zero_class: bool, one_class: bool) -> Self {
        DecisionTree {
            nodes: vec![
                Node::Inner {
                    feature,
                    zero: 1,
                    one: 2,
                },
                Node::Leaf(zero_class),
                Node::Leaf(one_class),
            ],
            root: 0,
            order: None,
        }
    }

    /// Tag the tree with the feature order it claims to respect.
    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> Node {
        self.nodes[id]
    }

    pub fn leaf_of(&self, e: &[bool]) -> usize {
        let mut id = self.root;
        loop {
            match self.nodes[id] {
                Node::Leaf(_) => return id,
                Node::Inner { feature, zero, one } => {
                    id = if e[feature] { one } else { zero };
                }
            }
        }
    }

    pub fn classify(&self, e: &[bool]) -> bool {
        match self.nodes[self.leaf_of(e)] {
            Node::Leaf(c) => c,
            Node::Inner { .. } => unreachable!(),
        }
    }

    /// Leaves in depth-first order, 0-child first.
    pub fn leaves(&self) -> Vec<usize> {
        self.paths().into_iter().map(|p| p.leaf).collect()
    }

    /// Path assignments of all leaves in depth-first order, 0-child first.
    pub fn paths(&self) -> Vec<PathAssignment> {
        let mut out = Vec::new();
        let mut literals = Vec::new();
        self.collect_paths(self.root, &mut literals, &mut out);
        out
    }

    fn collect_paths(
        &self,
        id: usize,
        literals: &mut Vec<(usize, bool)>,
        out: &mut Vec<PathAssignment>,
    ) {
        match self.nodes[id] {
            Node::Leaf(class) => out.push(PathAssignment {
                leaf: id,
                class,
                literals: literals.clone(),
            }),
            Node::Inner { feature, zero, one } => {
                literals.push((feature, false));
                self.collect_paths(zero, literals, out);
                literals.pop();
                literals.push((feature, true));
                self.collect_paths(one, literals, out);
                literals.pop();
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }

    pub fn class_count(&self, class: bool) -> usize {
        self.nodes
            .iter()
            .filter(|n| **n == Node::Leaf(class))
            .count()
    }

    /// Fewest leaves of one class.
    pub fn mnl(&self) -> usize {
        self.class_count(false).min(self.class_count(true))
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, id: usize) -> usize {
            match t.nodes[id] {
                Node::Leaf(_) => 0,
                Node::Inner { zero, one, .. } => 1 + go(t, zero).max(go(t, one)),
            }
        }
        go(self, self.root)
    }

    /// Distinct tested features, sorted.
    pub fn features(&self) -> Vec<usize> {
        let mut fs: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Inner { feature, .. } => Some(*feature),
                Node::Leaf(_) => None,
            })
            .collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    }

    fn feature_bound(&self) -> usize {
        self.features().last().map_or(0, |&f| f + 1)
    }

    pub fn is_normalized(&self) -> bool {
        fn go(t: &DecisionTree, id: usize, seen: &mut Vec<bool>) -> bool {
            match t.nodes[id] {
                Node::Leaf(_) => true,
                Node::Inner { feature, zero, one } => {
                    if seen[feature] {
                        return false;
                    }
                    seen[feature] = true;
                    let ok = go(t, zero, seen) && go(t, one, seen);
                    seen[feature] = false;
                    ok
                }
            }
        }
        go(self, self.root, &mut vec![false; self.feature_bound()])
    }

    /// Equivalent tree in which no path tests a feature twice: a repeated test
    /// is replaced by the child consistent with the earlier decision.
    pub fn normalize(&self) -> DecisionTree {
        fn go(
            t: &DecisionTree,
            id: usize,
            fixed: &mut Vec<Option<bool>>,
            out: &mut TreeBuilder,
        ) -> usize {
            match t.nodes[id] {
                Node::Leaf(c) => out.leaf(c),
                Node::Inner { feature, zero, one } => match fixed[feature] {
                    Some(b) => go(t, if b { one } else { zero }, fixed, out),
                    None => {
                        fixed[feature] = Some(false);
                        let z = go(t, zero, fixed, out);
                        fixed[feature] = Some(true);
                        let o = go(t, one, fixed, out);
                        fixed[feature] = None;
                        out.inner(feature, z, o)
                    }
                },
            }
        }
        let mut out = TreeBuilder::new();
        let root = go(
            self,
            self.root,
            &mut vec![None; self.feature_bound()],
            &mut out,
        );
        let mut t = out.finish(root);
        t.order = self.order.clone();
        t
    }

    /// Borrow when already normalized, otherwise normalize.
    pub fn normalized(&self) -> Cow<'_, DecisionTree> {
        if self.is_normalized() {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.normalize())
        }
    }

    /// Tree obtained by following `tau` at every node testing an assigned
    /// feature, so that only unassigned tests remain.
    pub fn restrict(&self, tau: &PartialExample) -> DecisionTree {
        fn go(t: &DecisionTree, id: usize, tau: &PartialExample, out: &mut TreeBuilder) -> usize {
            match t.nodes[id] {
                Node::Leaf(c) => out.leaf(c),
                Node::Inner { feature, zero, one } => {
                    match (feature < tau.len()).then(|| tau.get(feature)).flatten() {
                        Some(b) => go(t, if b { one } else { zero }, tau, out),
                        None => {
                            let z = go(t, zero, tau, out);
                            let o = go(t, one, tau, out);
                            out.inner(feature, z, o)
                        }
                    }
                }
            }
        }
        let mut out = TreeBuilder::new();
        let root = go(self, self.root, tau, &mut out);
        out.finish(root)
    }

    /// Classes of the leaves reachable by examples extending `tau`, as
    /// `(some 0-leaf, some 1-leaf)`. Assumes a normalized tree.
    pub fn reachable_classes(&self, tau: &PartialExample) -> (bool, bool) {
        let mut found = (false, false);
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf(false) => found.0 = true,
                Node::Leaf(true) => found.1 = true,
                Node::Inner { feature, zero, one } => match tau.get(feature) {
                    Some(b) => stack.push(if b { one } else { zero }),
                    None => {
                        stack.push(one);
                        stack.push(zero);
                    }
                },
            }
            if found.0 && found.1 {
                break;
            }
        }
        found
    }

    /// True iff features appear in strictly increasing `order` position along
    /// every root-to-leaf path. Features missing from `order` fail the check.
    pub fn respects_order(&self, order: &[usize]) -> bool {
        let bound = order
            .iter()
            .copied()
            .max()
            .map_or(0, |m| m + 1)
            .max(self.feature_bound());
        let mut rank = vec![usize::MAX; bound];
        for (pos, &f) in order.iter().enumerate() {
            rank[f] = pos;
        }
        let mut stack = vec![(self.root, None::<usize>)];
        while let Some((id, last)) = stack.pop() {
            if let Node::Inner { feature, zero, one } = self.nodes[id] {
                let r = rank[feature];
                if r == usize::MAX || last.is_some_and(|l| l >= r) {
                    return false;
                }
                stack.push((zero, Some(r)));
                stack.push((one, Some(r)));
            }
        }
        true
    }

    /// Same tree with every leaf label flipped.
    pub fn negated(&self) -> DecisionTree {
        let mut t = self.clone();
        for n in &mut t.nodes {
            if let Node::Leaf(c) = n {
                *c = !*c;
            }
        }
        t
    }

    /// Copy of the tree where each leaf for which `replace` returns a tree
    /// is replaced by that tree.
    pub fn substitute_leaves<F>(&self, mut replace: F) -> DecisionTree
    where
        F: FnMut(usize, bool) -> Option<DecisionTree>,
    {
        fn go<F: FnMut(usize, bool) -> Option<DecisionTree>>(
            t: &DecisionTree,
            id: usize,
            replace: &mut F,
            out: &mut TreeBuilder,
        ) -> usize {
            match t.nodes[id] {
                Node::Leaf(c) => match replace(id, c) {
                    Some(sub) => out.graft(&sub),
                    None => out.leaf(c),
                },
                Node::Inner { feature, zero, one } => {
                    let z = go(t, zero, replace, out);
                    let o = go(t, one, replace, out);
                    out.inner(feature, z, o)
                }
            }
        }
        let mut out = TreeBuilder::new();
        let root = go(self, self.root, &mut replace, &mut out);
        out.finish(root)
    }
}

/// Bottom-up arena construction: children are added before their parent.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder::default()
    }

    pub fn leaf(&mut self, class: bool) -> usize {
        self.nodes.push(Node::Leaf(class));
        self.nodes.len() - 1
    }

    pub fn inner(&mut self, feature: usize, zero: usize, one: usize) -> usize {
        self.nodes.push(Node::Inner { feature, zero, one });
        self.nodes.len() - 1
    }

    /// Copy `t` into the arena and return the id of its root.
    pub fn graft(&mut self, t: &DecisionTree) -> usize {
        let offset = self.nodes.len();
        self.nodes.extend(t.nodes.iter().map(|n| match *n {
            Node::Leaf(c) => Node::Leaf(c),
            Node::Inner { feature, zero, one } => Node::Inner {
                feature,
                zero: zero + offset,
                one: one + offset,
            },
        }));
        t.root + offset
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Finish with `root`; nodes not below `root` are dropped.
    pub fn finish(self, root: usize) -> DecisionTree {
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            map[id] = order.len();
            order.push(id);
            if let Node::Inner { zero, one, .. } = self.nodes[id] {
                stack.push(one);
                stack.push(zero);
            }
        }
        let nodes = order
            .iter()
            .map(|&id| match self.nodes[id] {
                Node::Leaf(c) => Node::Leaf(c),
                Node::Inner { feature, zero, one } => Node::Inner {
                    feature,
                    zero: map[zero],
                    one: map[one],
                },
            })
            .collect();
        DecisionTree {
            nodes,
            root: 0,
            order: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> DecisionTree {
        // f1 at the root, f2 under its 1-child
        DecisionTree::new(
            vec![
                Node::Inner {
                    feature: 1,
                    zero: 1,
                    one: 2,
                },
                Node::Leaf(false),
                Node::Inner {
                    feature: 2,
                    zero: 3,
                    one: 4,
                },
                Node::Leaf(false),
                Node::Leaf(true),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn rejects_shared_children_and_orphans() {
        let shared = vec![
            Node::Inner {
                feature: 0,
                zero: 1,
                one: 1,
            },
            Node::Leaf(true),
        ];
        assert!(DecisionTree::new(shared, 0).is_err());
        assert!(DecisionTree::new(vec![Node::Leaf(true), Node::Leaf(false)], 0).is_err());
        let cyclic = vec![Node::Inner {
            feature: 0,
            zero: 0,
            one: 0,
        }];
        assert!(DecisionTree::new(cyclic, 0).is_err());
    }

    #[test]
    fn respects_order_on_chain() {
        let t = chain();
        assert!(t.respects_order(&[0, 1, 2]));
        assert!(!t.respects_order(&[2, 1, 0]));
        assert!(!t.respects_order(&[1]));
        assert!(DecisionTree::leaf(true).respects_order(&[]));
    }

    #[test]
    fn normalize_removes_repeated_test() {
        let t = DecisionTree::new(
            vec![
                Node::Inner {
                    feature: 0,
                    zero: 1,
                    one: 2,
                },
                Node::Leaf(false),
                Node::Inner {
                    feature: 0,
                    zero: 3,
                    one: 4,
                },
                Node::Leaf(false),
                Node::Leaf(true),
            ],
            0,
        )
        .unwrap();
        assert!(!t.is_normalized());
        let n = t.normalize();
        assert!(n.is_normalized());
        assert_eq!(n, DecisionTree::stump(0, false, true));
        assert_eq!(chain().normalize(), chain());
    }

    #[test]
    fn leaf_counts() {
        let t = chain();
        assert_eq!(t.leaf_count(), 3);
        assert_eq!(t.mnl(), 1);
        assert_eq!(DecisionTree::leaf(false).mnl(), 0);
        assert_eq!(t.leaves(), vec![1, 3, 4]);
        assert_eq!(t.paths()[2].literals, vec![(1, true), (2, true)]);
    }
}
