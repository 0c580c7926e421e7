use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order relation contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("relation is not a partial order: {0}")]
    NotAnOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("map is not total: `{0}` has no image")]
    PartialMap(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("search budget of {0} nodes exceeded")]
    SizeLimitExceeded(u64),
    #[error("label `{0}` uses the reserved bottom symbol")]
    ReservedLabel(String),
    #[error("variety mismatch: {0}")]
    VarietyMismatch(String),
    #[error("problem is unsolvable: the poset is empty")]
    Unsolvable,
    #[error("unification type is 0; no minimal complete set exists")]
    TypeIsZero,
    #[error("codomain is not the poset G")]
    TargetNotG,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("factorization not verified: {0}")]
    FactorizationNotVerified(String),
    #[error("constructed map is not a p-morphism: {0}")]
    ChainInvalid(String),
    #[error("not a p-morphism: {0}")]
    NotPMorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
