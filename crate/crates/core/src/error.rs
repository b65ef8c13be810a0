use thiserror::Error;

/// Errors raised anywhere in the crate. Every message names the module it
/// comes from so that CLI diagnostics point at the failing stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model: {0}")]
    Constraint(String),

    #[error("model: cannot compare an exact value with an approximate one without a declared tolerance")]
    MixedBackends,

    #[error("measures: {measure} is undefined here: {reason}")]
    Undefined { measure: String, reason: String },

    #[error("measures: invalid parameter for {measure}: {message}")]
    InvalidParameter { measure: String, message: String },

    #[error("measures: unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("measures: {measure} cannot be evaluated on {element}")]
    UnsupportedElement { measure: String, element: String },

    #[error("measures: cutoff {cutoff} exceeds ranking length {length}")]
    OutOfRange { cutoff: usize, length: usize },

    #[error("enumeration: {0}")]
    Domain(String),

    #[error("enumeration: domain has {cardinality} elements, above the cap of {cap}")]
    CapExceeded { cardinality: u128, cap: u128 },

    #[error("intrinsic: {measure} is undefined on every element of {domain}")]
    EmptyDomain { measure: String, domain: String },

    #[error("intrinsic: interval endpoints are reversed")]
    ReversedInterval,

    #[error("report: unknown format `{0}`")]
    UnknownFormat(String),

    #[error("report: {0}")]
    Report(String),

    #[error("ingest: line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ingest: {0}")]
    Ingest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
