//! JSON model, example and candidate files.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::ensemble::{Ensemble, Members};
use crate::error::{Error, Result};
use crate::model::{Model, ModelKind};
use crate::rules::{DecisionList, DecisionSet, Rule, Term};
use crate::tree::{DecisionTree, Node};
use crate::universe::{Example, FeatureUniverse, PartialExample};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub universe: Vec<String>,
    pub model: ModelBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelBody {
    Dt(TreeBody),
    Ds(SetBody),
    Dl(ListBody),
    Ensemble(EnsembleBody),
    Circuit(CircuitBody),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeBody {
    pub nodes: Vec<NodeBody>,
    #[serde(default)]
    pub root: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeBody {
    Leaf {
        leaf: u8,
    },
    Inner {
        feature: String,
        zero: usize,
        one: usize,
    },
}

pub type LiteralBody = (String, u8);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetBody {
    pub terms: Vec<Vec<LiteralBody>>,
    pub default: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListBody {
    pub rules: Vec<(Vec<LiteralBody>, u8)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBody {
    pub family: String,
    pub elements: Vec<ModelBody>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateBody {
    pub id: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    #[serde(rename = "in", default)]
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitBody {
    pub gates: Vec<GateBody>,
    pub output: usize,
    pub inputs: BTreeMap<String, usize>,
}

fn bit(v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::Format(format!("expected a bit 0 or 1, got {other}"))),
    }
}

fn term_from(u: &FeatureUniverse, lits: &[LiteralBody]) -> Result<Term> {
    let pairs = lits
        .iter()
        .map(|(f, v)| Ok((u.index_of(f)?, bit(*v)?)))
        .collect::<Result<Vec<_>>>()?;
    Term::from_pairs(pairs)
}

fn term_to(u: &FeatureUniverse, t: &Term) -> Vec<LiteralBody> {
    t.literals()
        .iter()
        .map(|l| (u.name(l.feature).to_string(), l.value as u8))
        .collect()
}

fn tree_from(u: &FeatureUniverse, b: &TreeBody) -> Result<DecisionTree> {
    let nodes = b
        .nodes
        .iter()
        .map(|n| match n {
            NodeBody::Leaf { leaf } => Ok(Node::Leaf(bit(*leaf)?)),
            NodeBody::Inner { feature, zero, one } => Ok(Node::Inner {
                feature: u.index_of(feature)?,
                zero: *zero,
                one: *one,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let t = DecisionTree::new(nodes, b.root)?;
    match &b.order {
        None => Ok(t),
        Some(order) => {
            let idx = order
                .iter()
                .map(|f| u.index_of(f))
                .collect::<Result<Vec<_>>>()?;
            Ok(t.with_order(idx))
        }
    }
}

fn tree_to(u: &FeatureUniverse, t: &DecisionTree) -> TreeBody {
    TreeBody {
        nodes: t
            .nodes()
            .iter()
            .map(|n| match *n {
                Node::Leaf(c) => NodeBody::Leaf { leaf: c as u8 },
                Node::Inner { feature, zero, one } => NodeBody::Inner {
                    feature: u.name(feature).to_string(),
                    zero,
                    one,
                },
            })
            .collect(),
        root: t.root(),
        order: t
            .order()
            .map(|o| o.iter().map(|&f| u.name(f).to_string()).collect()),
    }
}

fn set_from(u: &FeatureUniverse, b: &SetBody) -> Result<DecisionSet> {
    let terms = b
        .terms
        .iter()
        .map(|t| term_from(u, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecisionSet::new(terms, bit(b.default)?))
}

fn list_from(u: &FeatureUniverse, b: &ListBody) -> Result<DecisionList> {
    let rules = b
        .rules
        .iter()
        .map(|(t, c)| Ok(Rule::new(term_from(u, t)?, bit(*c)?)))
        .collect::<Result<Vec<_>>>()?;
    DecisionList::new(rules)
}

fn circuit_from(u: &FeatureUniverse, b: &CircuitBody) -> Result<Circuit> {
    let n = b.gates.len();
    let mut gates: Vec<Option<Gate>> = vec![None; n];
    for g in &b.gates {
        if g.id >= n || gates[g.id].is_some() {
            return Err(Error::Format(format!(
                "gate ids must be distinct and dense in 0..{n}, got {}",
                g.id
            )));
        }
        let kind = match (g.kind.to_ascii_uppercase().as_str(), g.threshold) {
            ("IN", None) => GateKind::In,
            ("AND", None) => GateKind::And,
            ("OR", None) => GateKind::Or,
            ("NOT", None) => GateKind::Not,
            ("MAJ", Some(t)) => GateKind::Maj(t),
            ("MAJ", None) => {
                return Err(Error::Format(format!(
                    "MAJ gate {} needs a threshold",
                    g.id
                )))
            }
            (k, _) => {
                return Err(Error::Format(format!(
                    "gate {}: unexpected kind or threshold for `{k}`",
                    g.id
                )))
            }
        };
        gates[g.id] = Some(Gate::new(kind, g.inputs.clone()));
    }
    let gates = gates.into_iter().map(|g| g.expect("dense ids")).collect();
    let inputs = b
        .inputs
        .iter()
        .map(|(f, &g)| Ok((u.index_of(f)?, g)))
        .collect::<Result<Vec<_>>>()?;
    Circuit::new(gates, b.output, inputs)
}

pub fn circuit_body(u: &FeatureUniverse, c: &Circuit) -> CircuitBody {
    CircuitBody {
        gates: c
            .topological_order()
            .iter()
            .map(|&id| {
                let g = &c.gates()[id];
                GateBody {
                    id,
                    kind: g.kind.name().to_string(),
                    threshold: match g.kind {
                        GateKind::Maj(t) => Some(t),
                        _ => None,
                    },
                    inputs: g.inputs.clone(),
                }
            })
            .collect(),
        output: c.output(),
        inputs: c
            .inputs()
            .iter()
            .map(|&(f, g)| (u.name(f).to_string(), g))
            .collect(),
    }
}

fn kind_from(u: &FeatureUniverse, body: &ModelBody) -> Result<ModelKind> {
    Ok(match body {
        ModelBody::Dt(b) => ModelKind::Tree(tree_from(u, b)?),
        ModelBody::Ds(b) => ModelKind::Set(set_from(u, b)?),
        ModelBody::Dl(b) => ModelKind::List(list_from(u, b)?),
        ModelBody::Circuit(b) => ModelKind::Circuit(circuit_from(u, b)?),
        ModelBody::Ensemble(b) => {
            let wrong =
                || Error::Format(format!("ensemble element is not of family `{}`", b.family));
            let members = match b.family.as_str() {
                "dt" => Members::Trees(
                    b.elements
                        .iter()
                        .map(|e| match e {
                            ModelBody::Dt(t) => tree_from(u, t),
                            _ => Err(wrong()),
                        })
                        .collect::<Result<_>>()?,
                ),
                "ds" => Members::Sets(
                    b.elements
                        .iter()
                        .map(|e| match e {
                            ModelBody::Ds(s) => set_from(u, s),
                            _ => Err(wrong()),
                        })
                        .collect::<Result<_>>()?,
                ),
                "dl" => Members::Lists(
                    b.elements
                        .iter()
                        .map(|e| match e {
                            ModelBody::Dl(l) => list_from(u, l),
                            _ => Err(wrong()),
                        })
                        .collect::<Result<_>>()?,
                ),
                other => return Err(Error::Format(format!("unknown ensemble family `{other}`"))),
            };
            ModelKind::Ensemble(Ensemble::new(members)?)
        }
    })
}

pub fn model_body(u: &FeatureUniverse, kind: &ModelKind) -> ModelBody {
    let set = |s: &DecisionSet| SetBody {
        terms: s.terms().iter().map(|t| term_to(u, t)).collect(),
        default: s.default_class() as u8,
    };
    let list = |l: &DecisionList| ListBody {
        rules: l
            .rules()
            .iter()
            .map(|r| (term_to(u, &r.term), r.class as u8))
            .collect(),
    };
    match kind {
        ModelKind::Tree(t) => ModelBody::Dt(tree_to(u, t)),
        ModelKind::Set(s) => ModelBody::Ds(set(s)),
        ModelKind::List(l) => ModelBody::Dl(list(l)),
        ModelKind::Circuit(c) => ModelBody::Circuit(circuit_body(u, c)),
        ModelKind::Ensemble(e) => ModelBody::Ensemble(EnsembleBody {
            family: e.family().tag().to_string(),
            elements: match e.members() {
                Members::Trees(v) => v.iter().map(|t| ModelBody::Dt(tree_to(u, t))).collect(),
                Members::Sets(v) => v.iter().map(|s| ModelBody::Ds(set(s))).collect(),
                Members::Lists(v) => v.iter().map(|l| ModelBody::Dl(list(l))).collect(),
            },
        }),
    }
}

pub fn model_from_value(v: Value) -> Result<Model> {
    let file: ModelFile = serde_json::from_value(v)?;
    let u = Arc::new(FeatureUniverse::new(file.universe)?);
    let kind = kind_from(&u, &file.model)?;
    Model::new(u, kind)
}

pub fn parse_model(text: &str) -> Result<Model> {
    model_from_value(serde_json::from_str(text)?)
}

pub fn model_to_value(m: &Model) -> Value {
    serde_json::to_value(ModelFile {
        universe: m.universe().names().to_vec(),
        model: model_body(m.universe(), m.kind()),
    })
    .expect("model serializes")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignFile {
    assign: BTreeMap<String, u8>,
}

pub fn partial_from_value(u: &FeatureUniverse, v: Value) -> Result<PartialExample> {
    let file: AssignFile = serde_json::from_value(v)?;
    let pairs = file
        .assign
        .iter()
        .map(|(f, b)| Ok((u.index_of(f)?, bit(*b)?)))
        .collect::<Result<Vec<_>>>()?;
    PartialExample::from_pairs(u.len(), pairs)
}

pub fn parse_partial(u: &FeatureUniverse, text: &str) -> Result<PartialExample> {
    partial_from_value(u, serde_json::from_str(text)?)
}

/// A total assignment; every feature of the universe must be present.
pub fn parse_example(u: &FeatureUniverse, text: &str) -> Result<Example> {
    let p = parse_partial(u, text)?;
    if let Some(&f) = p.free().first() {
        return Err(Error::Format(format!(
            "example leaves feature `{}` unassigned",
            u.name(f)
        )));
    }
    Ok(p.complete_with(&Example::zeros(u.len())))
}

pub fn partial_to_value(u: &FeatureUniverse, p: &PartialExample) -> Value {
    let assign: serde_json::Map<String, Value> = p
        .assigned()
        .map(|(f, b)| (u.name(f).to_string(), json!(b as u8)))
        .collect();
    json!({ "assign": assign })
}

pub fn example_to_value(u: &FeatureUniverse, e: &Example) -> Value {
    partial_to_value(u, &e.as_partial())
}

/// `{"features": [...]}` or a bare array of feature names.
pub fn parse_feature_set(u: &FeatureUniverse, text: &str) -> Result<Vec<usize>> {
    let v: Value = serde_json::from_str(text)?;
    let list = match v {
        Value::Array(a) => a,
        Value::Object(mut o) => match o.remove("features") {
            Some(Value::Array(a)) => a,
            _ => return Err(Error::Format("expected {\"features\": [...]}".into())),
        },
        _ => return Err(Error::Format("expected a feature list".into())),
    };
    let mut out = list
        .iter()
        .map(|x| match x.as_str() {
            Some(name) => u.index_of(name),
            None => Err(Error::Format(format!(
                "feature names must be strings, got {x}"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Format("feature listed twice".into()));
    }
    Ok(out)
}

pub fn features_to_value(u: &FeatureUniverse, set: &[usize]) -> Value {
    Value::Array(set.iter().map(|&f| json!(u.name(f))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
        "universe": ["x", "y", "z"],
        "model": {"dl": {"rules": [
            [[["x", 1], ["y", 1]], 0],
            [[["x", 0], ["z", 0]], 1],
            [[["y", 0], ["z", 1]], 0],
            [[], 1]
        ]}}
    }"#;

    #[test]
    fn fig1_roundtrip() {
        let m = parse_model(FIG1).unwrap();
        let e = parse_example(m.universe(), r#"{"assign": {"x": 0, "y": 0, "z": 1}}"#).unwrap();
        assert!(!m.classify(&e).unwrap());
        let again = model_from_value(model_to_value(&m)).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn tree_and_circuit_roundtrip() {
        let text = r#"{"universe": ["a", "b"], "model": {"dt": {"nodes": [
            {"feature": "a", "zero": 1, "one": 2}, {"leaf": 0}, {"leaf": 1}], "root": 0}}}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(model_from_value(model_to_value(&m)).unwrap(), m);
        let text = r#"{"universe": ["a", "b"], "model": {"circuit": {"gates": [
            {"id": 0, "kind": "IN"}, {"id": 1, "kind": "IN"},
            {"id": 2, "kind": "MAJ", "threshold": 2, "in": [0, 1]}],
            "output": 2, "inputs": {"a": 0, "b": 1}}}}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(model_from_value(model_to_value(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_bad_input() {
        let u = FeatureUniverse::new(["a", "b"]).unwrap();
        assert!(parse_example(&u, r#"{"assign": {"a": 0}}"#).is_err());
        assert!(parse_example(&u, r#"{"assign": {"a": 0, "b": 2}}"#).is_err());
        assert!(parse_feature_set(&u, r#"["a", "a"]"#).is_err());
        assert_eq!(
            parse_feature_set(&u, r#"{"features": ["b", "a"]}"#).unwrap(),
            vec![0, 1]
        );
        let even = r#"{"universe": ["a"], "model": {"ensemble": {"family": "ds", "elements": [
            {"ds": {"terms": [], "default": 0}}, {"ds": {"terms": [], "default": 1}}]}}}"#;
        assert!(parse_model(even).is_err());
        let contradictory = r#"{"universe": ["a"], "model": {"ds": {"terms": [[["a", 0], ["a", 1]]], "default": 0}}}"#;
        assert!(parse_model(contradictory).is_err());
    }
}
