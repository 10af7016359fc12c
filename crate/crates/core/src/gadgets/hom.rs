use serde::Serialize;

use crate::error::Result;
use crate::explain_rules::lcxp_card_enum;
use crate::model::Model;
use crate::oracle::{hom_witness, oracle_min_with, phom_witness};
use crate::universe::{Example, PartialExample};
use crate::verify::{verify_with, BruteCaps, ExplanationKind, ExplanationQuery, Target};

/// One row of the bounded check: examples with at most `k` ones against
/// contrastive explanations of the all-zero example with at most `k`
/// features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KHomRow {
    pub k: usize,
    pub phom: bool,
    pub lcxp_oracle: bool,
    pub lcxp_enum: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    /// Class of the all-zero example.
    pub zero_class: bool,
    /// The nine statements, each phrased so that `true` means the model is
    /// homogeneous:
    /// no example is classified unlike the all-zero one;
    /// the empty set is a local abductive explanation of the all-zero
    /// example; that example has no local contrastive explanation;
    /// the empty assignment is a global abductive explanation for its
    /// class and a global contrastive explanation for the other class;
    /// the minimum local abductive explanation has size 0; the minimum
    /// local contrastive explanation does not exist; the minimum global
    /// abductive (class of zero) and contrastive (other class)
    /// explanations have size 0.
    pub statements: [bool; 9],
    pub all_equal: bool,
    pub khom: Vec<KHomRow>,
    pub khom_agree: bool,
}

pub fn hom_equivalence_suite(model: &Model, caps: &BruteCaps) -> Result<HomReport> {
    let n = model.num_features();
    let e0 = Example::zeros(n);
    let c = model.classify(&e0)?;
    let local = Target::Example(e0.clone());
    let empty = PartialExample::empty(n);
    let q_laxp = ExplanationQuery::local(ExplanationKind::LAxp, e0.clone(), vec![])?;
    let q_gaxp = ExplanationQuery::global(ExplanationKind::GAxp, c, empty.clone())?;
    let q_gcxp = ExplanationQuery::global(ExplanationKind::GCxp, !c, empty)?;
    let min = |kind, target: &Target| -> Result<Option<usize>> {
        Ok(oracle_min_with(model, kind, target, caps)?.size)
    };
    let lcxp_min = min(ExplanationKind::LCxp, &local)?;
    let statements = [
        hom_witness(model, caps)?.is_none(),
        verify_with(model, &q_laxp, caps)?,
        lcxp_min.is_none(),
        verify_with(model, &q_gaxp, caps)?,
        verify_with(model, &q_gcxp, caps)?,
        min(ExplanationKind::LAxp, &local)? == Some(0),
        lcxp_min.is_none(),
        min(ExplanationKind::GAxp, &Target::Class(c))? == Some(0),
        min(ExplanationKind::GCxp, &Target::Class(!c))? == Some(0),
    ];
    let all_equal = statements.iter().all(|&s| s == statements[0]);
    let mut khom = Vec::new();
    for k in 0..=n {
        khom.push(KHomRow {
            k,
            phom: phom_witness(model, k, caps)?.is_some(),
            lcxp_oracle: lcxp_min.is_some_and(|s| s <= k),
            lcxp_enum: lcxp_card_enum(model, &e0, k)?.is_some(),
        });
    }
    let khom_agree = khom
        .iter()
        .all(|r| r.phom == r.lcxp_oracle && r.phom == r.lcxp_enum);
    Ok(HomReport {
        zero_class: c,
        statements,
        all_equal,
        khom,
        khom_agree,
    })
}
