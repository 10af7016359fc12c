//! Instance generators for the hardness reductions, their source-problem
//! solvers, and the homogeneity/explanation equivalence checks.

pub mod builders;
pub mod hom;
pub mod reductions;
pub mod solvers;

pub use builders::{odt_from_examples, set_model_odt, subset_model_rules, RuleFamily, SetFamily};
pub use hom::{hom_equivalence_suite, HomReport};
pub use reductions::{
    hitting_set_gadget, mcc_ensemble_gadget, mcc_odt_gaxp_gadget, mcc_unary_ensemble_gadget,
    taut_ds_gadget, ColouredGraph, DnfInstance, GadgetMode, GraphInstance, HittingSetInstance,
    DEFAULT_MAX_ODT_K,
};

use serde_json::{json, Value};

use crate::error::Result;
use crate::explain_dt::{card_xp_search, global_card_branch};
use crate::format::{example_to_value, model_to_value};
use crate::model::{Model, ModelKind};
use crate::oracle::{hom_witness, oracle_min_with, phom_witness};
use crate::verify::{BruteCaps, ExplanationKind, Target};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetQuery {
    /// Is there an explanation of this kind with at most `k` features?
    Explain {
        kind: ExplanationKind,
        target: Target,
        k: usize,
    },
    /// Is some example classified unlike the all-zero example?
    Hom,
    /// As `Hom`, restricted to examples with at most `k` ones.
    PHom { k: usize },
}

/// Generated model, the questions whose answers should all equal `truth`,
/// and generator metadata.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub provenance: String,
    pub model: Model,
    pub queries: Vec<GadgetQuery>,
    /// Answer to the source problem from the naive solver.
    pub truth: bool,
    pub meta: Value,
    /// Declared feature order for generated ordered trees.
    pub order: Option<Vec<usize>>,
}

impl GadgetInstance {
    pub fn to_value(&self) -> Value {
        let u = self.model.universe();
        let queries: Vec<Value> = self
            .queries
            .iter()
            .map(|q| match q {
                GadgetQuery::Explain { kind, target, k } => match target {
                    Target::Example(e) => {
                        json!({ "problem": kind.name(), "example": example_to_value(u, e), "k": k })
                    }
                    Target::Class(c) => {
                        json!({ "problem": kind.name(), "class": *c as u8, "k": k })
                    }
                },
                GadgetQuery::Hom => json!({ "problem": "hom" }),
                GadgetQuery::PHom { k } => json!({ "problem": "p-hom", "k": k }),
            })
            .collect();
        let order = self
            .order
            .as_ref()
            .map(|o| o.iter().map(|&f| u.name(f).to_string()).collect::<Vec<_>>());
        json!({
            "provenance": self.provenance,
            "model": model_to_value(&self.model),
            "queries": queries,
            "truth": self.truth,
            "order": order,
            "meta": self.meta,
        })
    }
}

/// Answer by exhaustive search over the model's examples.
pub fn answer_brute(model: &Model, q: &GadgetQuery, caps: &BruteCaps) -> Result<bool> {
    Ok(match q {
        GadgetQuery::Explain { kind, target, k } => oracle_min_with(model, *kind, target, caps)?
            .size
            .is_some_and(|s| s <= *k),
        GadgetQuery::Hom => hom_witness(model, caps)?.is_some(),
        GadgetQuery::PHom { k } => phom_witness(model, *k, caps)?.is_some(),
    })
}

/// As [`answer_brute`], but explanation queries on trees go through the
/// tree search algorithms, which do not depend on the number of features.
pub fn answer(model: &Model, q: &GadgetQuery, caps: &BruteCaps) -> Result<bool> {
    if let (ModelKind::Tree(t), GadgetQuery::Explain { kind, target, k }) = (model.kind(), q) {
        let n = model.num_features();
        match (kind, target) {
            (ExplanationKind::GAxp | ExplanationKind::GCxp, Target::Class(c)) => {
                return Ok(global_card_branch(t, *kind, *c, *k, n)?.is_some());
            }
            (ExplanationKind::LAxp, Target::Example(_)) => {
                return Ok(card_xp_search(t, *kind, target, *k, n)?.is_some());
            }
            _ => {}
        }
    }
    answer_brute(model, q, caps)
}
