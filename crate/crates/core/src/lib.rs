//! Formal explanations (local/global, abductive/contrastive) for decision
//! trees, decision sets, decision lists, majority ensembles and Boolean
//! circuits with majority gates.

pub mod circuit;
pub mod ensemble;
pub mod enumerate;
pub mod error;
pub mod explain_dt;
pub mod explain_rules;
pub mod format;
pub mod gadgets;
pub mod model;
pub mod oracle;
pub mod random;
pub mod rules;
pub mod translate;
pub mod tree;
pub mod universe;
pub mod verify;

pub use circuit::{Circuit, CircuitBuilder, Gate, GateKind};
pub use ensemble::{Ensemble, Family, Members};
pub use error::{Error, Result};
pub use model::{Model, ModelKind, ParamReport};
pub use rules::{DecisionList, DecisionSet, Literal, Rule, Term};
pub use tree::{DecisionTree, Node, PathAssignment, TreeBuilder};
pub use universe::{Example, FeatureUniverse, PartialExample};
pub use verify::{BruteCaps, Candidate, ExplanationKind, ExplanationQuery, Target};
