use crate::error::{Error, Result};
use crate::rules::{DecisionList, DecisionSet};
use crate::tree::DecisionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Tree,
    Set,
    List,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Tree => "dt",
            Family::Set => "ds",
            Family::List => "dl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Members {
    Trees(Vec<DecisionTree>),
    Sets(Vec<DecisionSet>),
    Lists(Vec<DecisionList>),
}

/// Odd-sized majority vote over models of one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    members: Members,
}

impl Ensemble {
    pub fn new(members: Members) -> Result<Self> {
        let n = match &members {
            Members::Trees(v) => v.len(),
            Members::Sets(v) => v.len(),
            Members::Lists(v) => v.len(),
        };
        if n % 2 == 0 {
            return Err(Error::EvenEnsemble(n));
        }
        Ok(Ensemble { members })
    }

    pub fn trees(trees: Vec<DecisionTree>) -> Result<Self> {
        Self::new(Members::Trees(trees))
    }

    pub fn sets(sets: Vec<DecisionSet>) -> Result<Self> {
        Self::new(Members::Sets(sets))
    }

    pub fn lists(lists: Vec<DecisionList>) -> Result<Self> {
        Self::new(Members::Lists(lists))
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn family(&self) -> Family {
        match self.members {
            Members::Trees(_) => Family::Tree,
            Members::Sets(_) => Family::Set,
            Members::Lists(_) => Family::List,
        }
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Trees(v) => v.len(),
            Members::Sets(v) => v.len(),
            Members::Lists(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Votes needed for class 1.
    pub fn threshold(&self) -> usize {
        self.len() / 2 + 1
    }

    /// Number of elements voting 1.
    pub fn votes(&self, e: &[bool]) -> usize {
        match &self.members {
            Members::Trees(v) => v.iter().filter(|m| m.classify(e)).count(),
            Members::Sets(v) => v.iter().filter(|m| m.classify(e)).count(),
            Members::Lists(v) => v.iter().filter(|m| m.classify(e)).count(),
        }
    }

    pub fn classify(&self, e: &[bool]) -> bool {
        self.votes(e) >= self.threshold()
    }

    pub fn negated(&self) -> Ensemble {
        let members = match &self.members {
            Members::Trees(v) => Members::Trees(v.iter().map(DecisionTree::negated).collect()),
            Members::Sets(v) => Members::Sets(v.iter().map(DecisionSet::negated).collect()),
            Members::Lists(v) => Members::Lists(v.iter().map(DecisionList::negated).collect()),
        };
        Ensemble { members }
    }

    pub(crate) fn max_feature(&self) -> Option<usize> {
        match &self.members {
            Members::Trees(v) => v.iter().filter_map(|t| t.features().last().copied()).max(),
            Members::Sets(v) => v.iter().filter_map(DecisionSet::max_feature).max(),
            Members::Lists(v) => v.iter().filter_map(DecisionList::max_feature).max(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_size_rejected() {
        assert!(matches!(
            Ensemble::trees(vec![]),
            Err(Error::EvenEnsemble(0))
        ));
        let two = vec![DecisionTree::leaf(true), DecisionTree::leaf(false)];
        assert!(matches!(Ensemble::trees(two), Err(Error::EvenEnsemble(2))));
    }

    #[test]
    fn majority_of_three() {
        let ens = Ensemble::trees(vec![
            DecisionTree::stump(0, false, true),
            DecisionTree::stump(1, false, true),
            DecisionTree::leaf(false),
        ])
        .unwrap();
        assert_eq!(ens.threshold(), 2);
        assert!(ens.classify(&[true, true]));
        assert!(!ens.classify(&[true, false]));
        assert!(ens.negated().classify(&[true, false]));
    }
}
