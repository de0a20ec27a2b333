use alloc::string::String;

/// Errors raised by the engine. Verdicts such as "not self-sufficient" or
/// "not a member" are ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("payload of point `{id}` does not match geometry {geometry}: {reason}")]
    PayloadMismatch {
        id: String,
        geometry: String,
        reason: String,
    },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("p must be at least 2, got {0}")]
    InvalidP(u32),
    #[error("unknown point id `{0}`")]
    UnknownId(String),
    #[error("duplicate point id `{0}`")]
    DuplicateId(String),
    #[error("points `{0}` and `{1}` carry the same payload")]
    DuplicatePayload(String, String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("probabilistic rank gave {disagreements} disagreeing evaluations")]
    RetriesExhausted { disagreements: u32 },
    #[error("{what} has {size} points, above the exhaustive limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("{0} is not self-sufficient in the given superset")]
    NotSelfSufficient(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("classification contradiction: {0}")]
    Classification(String),
    #[error("template `{name}`: {reason}")]
    Template { name: String, reason: String },
    #[error("template `{0}` is not in the catalogue or μ specification")]
    UnknownTemplate(String),
    #[error("invalid μ specification: {0}")]
    InvalidMu(String),
    #[error("search budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("geometry capacity exhausted: {0}")]
    Capacity(String),
    #[error("embedding check failed: {0}")]
    EmbeddingCheck(String),
    #[error("no internal copy found after rejected free amalgam: {0}")]
    InternalCopyNotFound(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
