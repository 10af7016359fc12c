//! Canonical models for "positive iff the 1-set equals / contains a member
//! of a family", and ordered trees from example sets.

use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::rules::{DecisionList, DecisionSet, Rule, Term};
use crate::tree::{DecisionTree, TreeBuilder};

/// Family of feature sets with an explicit support. Membership questions
/// only look at features in the support, which defaults to the union of
/// the sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    sets: Vec<Vec<usize>>,
    support: Vec<usize>,
}

impl SetFamily {
    /// Sets are sorted and deduplicated, as is the family itself.
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        let mut sets: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        sets.sort();
        sets.dedup();
        let mut support: Vec<usize> = sets.iter().flatten().copied().collect();
        support.sort_unstable();
        support.dedup();
        SetFamily { sets, support }
    }

    /// Widen the support; it must contain every set.
    pub fn with_support(mut self, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if let Some(f) = self
            .support
            .iter()
            .find(|f| support.binary_search(f).is_err())
        {
            return Err(Error::InvalidInstance(format!(
                "support misses feature {f} used by the family"
            )));
        }
        self.support = support;
        Ok(self)
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Largest set size.
    pub fn a(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of sets.
    pub fn b(&self) -> usize {
        self.sets.len()
    }

    /// The 1-set of `e` on the support is exactly some member.
    pub fn matches_exactly(&self, e: &[bool]) -> bool {
        self.sets.iter().any(|s| {
            self.support
                .iter()
                .all(|&f| e[f] == s.binary_search(&f).is_ok())
        })
    }

    /// Some member is contained in the 1-set of `e`.
    pub fn matches_subset(&self, e: &[bool]) -> bool {
        self.sets.iter().any(|s| s.iter().all(|&f| e[f]))
    }
}

/// Ordered tree that is 1 exactly on examples agreeing with one of
/// `examples` on `features`. `features` lists the tested features in the
/// tree order; each example gives one bit per entry of `features`. Paths
/// branch where examples part ways and end in a 0-leaf otherwise.
pub fn odt_from_examples(features: &[usize], examples: &[Vec<bool>]) -> Result<DecisionTree> {
    let mut sorted: Vec<&Vec<bool>> = examples.iter().collect();
    for e in &sorted {
        if e.len() != features.len() {
            return Err(Error::UniverseMismatch {
                expected: features.len(),
                found: e.len(),
            });
        }
    }
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateExample);
    }

    fn grow(b: &mut TreeBuilder, features: &[usize], depth: usize, group: &[&Vec<bool>]) -> usize {
        if group.is_empty() {
            return b.leaf(false);
        }
        if depth == features.len() {
            return b.leaf(true);
        }
        // group is sorted, so the 0-examples come first
        let split = group.iter().position(|e| e[depth]).unwrap_or(group.len());
        let zero = grow(b, features, depth + 1, &group[..split]);
        let one = grow(b, features, depth + 1, &group[split..]);
        b.inner(features[depth], zero, one)
    }

    let mut b = TreeBuilder::new();
    let root = grow(&mut b, features, 0, &sorted);
    let t = b.finish(root).with_order(features.to_vec());
    debug_assert_eq!(t.class_count(true), examples.len());
    Ok(t)
}

/// Support of `fam` sorted by position in `order`; features outside the
/// order go last by index.
fn ordered_support(fam: &SetFamily, order: &[usize]) -> Vec<usize> {
    let rank = |f: usize| {
        order
            .iter()
            .position(|&g| g == f)
            .unwrap_or(order.len() + f)
    };
    let mut fs = fam.support().to_vec();
    fs.sort_by_key(|&f| rank(f));
    fs
}

/// Ordered tree that says `c` exactly when the 1-set on the support equals
/// some member of the family.
pub fn set_model_odt(fam: &SetFamily, c: bool, order: &[usize]) -> Result<DecisionTree> {
    let features = ordered_support(fam, order);
    let examples: Vec<Vec<bool>> = fam
        .sets()
        .iter()
        .map(|s| {
            features
                .iter()
                .map(|f| s.binary_search(f).is_ok())
                .collect()
        })
        .collect();
    let t = odt_from_examples(&features, &examples)?;
    let t = if c {
        t
    } else {
        t.negated().with_order(features.clone())
    };
    assert!(t.mnl() <= fam.b());
    assert!(t.leaf_count() <= 2 * fam.b() * features.len() + 1);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Set,
    List,
}

/// Decision set or list that says `c` exactly when the 1-set contains some
/// member of the family: one positive term per member.
pub fn subset_model_rules(fam: &SetFamily, c: bool, family: RuleFamily) -> ModelKind {
    let terms: Vec<Term> = fam
        .sets()
        .iter()
        .map(|s| Term::from_pairs(s.iter().map(|&f| (f, true))).expect("positive literals"))
        .collect();
    let (a, b) = (fam.a(), fam.b());
    match family {
        RuleFamily::Set => {
            let s = DecisionSet::new(terms, !c);
            assert!(s.term_size() <= a && s.size() <= a * b + b + 1);
            ModelKind::Set(s)
        }
        RuleFamily::List => {
            let mut rules: Vec<Rule> = terms.into_iter().map(|t| Rule::new(t, c)).collect();
            rules.push(Rule::new(Term::empty(), !c));
            let l = DecisionList::new(rules).expect("last rule is empty");
            assert!(l.term_size() <= a && l.size() <= a * b + b + 1);
            ModelKind::List(l)
        }
    }
}
