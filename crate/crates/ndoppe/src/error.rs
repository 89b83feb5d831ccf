use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sample on which the requested estimator is not defined.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A numerical procedure failed to converge or hit a safety cap.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A likelihood evaluation met an observation of probability zero.
    #[error("observation x = {x} has zero probability under the supplied PMF")]
    ZeroProbability { x: u64 },

    /// Dataset text that does not match the whitespace-separated integer grammar.
    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },
}
