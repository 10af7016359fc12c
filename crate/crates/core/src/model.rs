use std::sync::Arc;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::ensemble::{Ensemble, Members};
use crate::error::{Error, Result};
use crate::rules::{DecisionList, DecisionSet};
use crate::tree::DecisionTree;
use crate::universe::{Example, FeatureUniverse};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    Tree(DecisionTree),
    Set(DecisionSet),
    List(DecisionList),
    Circuit(Circuit),
    Ensemble(Ensemble),
}

impl ModelKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelKind::Tree(_) => "dt",
            ModelKind::Set(_) => "ds",
            ModelKind::List(_) => "dl",
            ModelKind::Circuit(_) => "circuit",
            ModelKind::Ensemble(_) => "ensemble",
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            ModelKind::Tree(t) => t.features().last().copied(),
            ModelKind::Set(s) => s.max_feature(),
            ModelKind::List(l) => l.max_feature(),
            ModelKind::Circuit(c) => c.max_feature(),
            ModelKind::Ensemble(e) => e.max_feature(),
        }
    }

    fn order(&self) -> Option<&[usize]> {
        match self {
            ModelKind::Tree(t) => t.order(),
            _ => None,
        }
    }
}

/// A classifier bound to its feature universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    universe: Arc<FeatureUniverse>,
    kind: ModelKind,
}

impl Model {
    pub fn new(universe: Arc<FeatureUniverse>, kind: ModelKind) -> Result<Self> {
        let worst = kind
            .max_feature()
            .into_iter()
            .chain(kind.order().into_iter().flatten().copied())
            .max();
        if let Some(f) = worst {
            universe.check_index(f)?;
        }
        Ok(Model { universe, kind })
    }

    pub fn tree(universe: Arc<FeatureUniverse>, t: DecisionTree) -> Result<Self> {
        Self::new(universe, ModelKind::Tree(t))
    }

    pub fn set(universe: Arc<FeatureUniverse>, s: DecisionSet) -> Result<Self> {
        Self::new(universe, ModelKind::Set(s))
    }

    pub fn list(universe: Arc<FeatureUniverse>, l: DecisionList) -> Result<Self> {
        Self::new(universe, ModelKind::List(l))
    }

    pub fn circuit(universe: Arc<FeatureUniverse>, c: Circuit) -> Result<Self> {
        Self::new(universe, ModelKind::Circuit(c))
    }

    pub fn ensemble(universe: Arc<FeatureUniverse>, e: Ensemble) -> Result<Self> {
        Self::new(universe, ModelKind::Ensemble(e))
    }

    pub fn universe(&self) -> &Arc<FeatureUniverse> {
        &self.universe
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn num_features(&self) -> usize {
        self.universe.len()
    }

    pub fn with_kind(&self, kind: ModelKind) -> Result<Model> {
        Model::new(self.universe.clone(), kind)
    }

    /// Classification of raw bits; `e` must have one bit per feature.
    pub fn classify_bits(&self, e: &[bool]) -> bool {
        debug_assert_eq!(e.len(), self.universe.len());
        match &self.kind {
            ModelKind::Tree(t) => t.classify(e),
            ModelKind::Set(s) => s.classify(e),
            ModelKind::List(l) => l.classify(e),
            ModelKind::Circuit(c) => c.eval(e),
            ModelKind::Ensemble(ens) => ens.classify(e),
        }
    }

    pub fn classify(&self, e: &Example) -> Result<bool> {
        self.check_example(e)?;
        Ok(self.classify_bits(e.bits()))
    }

    pub fn check_example(&self, e: &Example) -> Result<()> {
        if e.len() != self.universe.len() {
            return Err(Error::UniverseMismatch {
                expected: self.universe.len(),
                found: e.len(),
            });
        }
        Ok(())
    }

    /// Model computing the opposite class everywhere. Circuits are not
    /// supported.
    pub fn negated(&self) -> Option<Model> {
        let kind = match &self.kind {
            ModelKind::Tree(t) => ModelKind::Tree(t.negated()),
            ModelKind::Set(s) => ModelKind::Set(s.negated()),
            ModelKind::List(l) => ModelKind::List(l.negated()),
            ModelKind::Ensemble(e) => ModelKind::Ensemble(e.negated()),
            ModelKind::Circuit(_) => return None,
        };
        Some(Model {
            universe: self.universe.clone(),
            kind,
        })
    }

    pub fn measure(&self) -> ParamReport {
        measure(&self.kind)
    }
}

/// Structural parameters of a model. Fields that do not apply to the model
/// family are `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ens_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mnl_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms_elem: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_elem: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_size: Option<usize>,
}

struct ElemParams {
    mnl: Option<usize>,
    terms: Option<usize>,
    term_size: Option<usize>,
    size: usize,
}

fn tree_params(t: &DecisionTree) -> ElemParams {
    ElemParams {
        mnl: Some(t.mnl()),
        terms: None,
        term_size: None,
        size: t.leaf_count(),
    }
}

fn set_params(s: &DecisionSet) -> ElemParams {
    ElemParams {
        mnl: None,
        terms: Some(s.terms().len()),
        term_size: Some(s.term_size()),
        size: s.size(),
    }
}

fn list_params(l: &DecisionList) -> ElemParams {
    ElemParams {
        mnl: None,
        terms: Some(l.len()),
        term_size: Some(l.term_size()),
        size: l.size(),
    }
}

fn fold(elems: Vec<ElemParams>) -> ParamReport {
    let max = |f: fn(&ElemParams) -> Option<usize>| elems.iter().filter_map(f).max();
    ParamReport {
        ens_size: Some(elems.len()),
        mnl_size: max(|p| p.mnl),
        terms_elem: max(|p| p.terms),
        term_size: max(|p| p.term_size),
        size_elem: elems.iter().map(|p| p.size).max(),
        model_size: Some(elems.iter().map(|p| p.size).sum()),
    }
}

pub fn measure(kind: &ModelKind) -> ParamReport {
    match kind {
        ModelKind::Tree(t) => fold(vec![tree_params(t)]),
        ModelKind::Set(s) => fold(vec![set_params(s)]),
        ModelKind::List(l) => fold(vec![list_params(l)]),
        ModelKind::Ensemble(e) => fold(match e.members() {
            Members::Trees(v) => v.iter().map(tree_params).collect(),
            Members::Sets(v) => v.iter().map(set_params).collect(),
            Members::Lists(v) => v.iter().map(list_params).collect(),
        }),
        ModelKind::Circuit(c) => ParamReport {
            model_size: Some(c.gates().len()),
            ..ParamReport::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_measure() {
        let r = measure(&ModelKind::Tree(DecisionTree::leaf(false)));
        assert_eq!(r.model_size, Some(1));
        assert_eq!(r.mnl_size, Some(0));
        assert_eq!(r.terms_elem, None);
    }

    #[test]
    fn empty_set_measure() {
        let r = measure(&ModelKind::Set(DecisionSet::new(vec![], true)));
        assert_eq!(r.size_elem, Some(1));
        assert_eq!(r.term_size, Some(0));
    }

    #[test]
    fn feature_range_checked() {
        let u = Arc::new(FeatureUniverse::indexed(2));
        assert!(Model::tree(u.clone(), DecisionTree::stump(1, false, true)).is_ok());
        assert!(Model::tree(u.clone(), DecisionTree::stump(2, false, true)).is_err());
        let m = Model::tree(u, DecisionTree::stump(1, false, true)).unwrap();
        assert!(m.classify(&Example::zeros(3)).is_err());
    }
}
