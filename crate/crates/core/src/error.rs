use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature index {index} out of range for a universe of {len} features")]
    FeatureOutOfRange { index: usize, len: usize },
    #[error("example has {found} bits but the universe has {expected} features")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("feature {0} assigned twice")]
    DoubleAssignment(usize),
    #[error("invalid decision tree: {0}")]
    InvalidTree(String),
    #[error("contradictory term: feature {0} required to be both 0 and 1")]
    ContradictoryTerm(usize),
    #[error("invalid decision list: {0}")]
    InvalidList(String),
    #[error("ensemble must have an odd, positive number of elements (got {0})")]
    EvenEnsemble(usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("{what}: {size} free features exceeds the brute-force cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("product tree would have {projected} leaves, above the ceiling of {ceiling}")]
    ProductTooLarge { projected: u128, ceiling: u128 },
    #[error("duplicate example in example set")]
    DuplicateExample,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
