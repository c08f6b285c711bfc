use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: non-square matrix, non-finite entry, index out of range.
    #[error("structural error: {0}")]
    Structural(String),

    /// A parameter is outside its valid range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The operation is not defined for this input (e.g. a line-only
    /// mechanism applied to a bundle without line provenance).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A partially specified matrix whose graph of known entries is not
    /// connected; lists the components that cannot reach each other.
    #[error("disconnected specification: components {0:?}")]
    Disconnected(Vec<Vec<usize>>),

    /// An internal invariant was broken (e.g. an empty approval set).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A bundle is missing a view the mechanism requires.
    #[error("mechanism {mechanism} requires the {view} view, which is absent")]
    MissingView {
        mechanism: &'static str,
        view: &'static str,
    },
}
