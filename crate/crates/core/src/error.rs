use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} is outside the supported range 1..=16")]
    InvalidQubitCount(usize),

    #[error("size mismatch: {left} qubits vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid Pauli: {0}")]
    InvalidPauli(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("{what} exceeded its cap of {cap} (reached {reached})")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        reached: usize,
    },

    #[error("unknown or unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("orbit structure does not match the expected block layout: {0}")]
    BlockLayoutMismatch(String),

    #[error("anticommutation census is not uniform over block {block}: representatives disagree ({detail})")]
    NonUniformCensus { block: usize, detail: String },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid block probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("bound variant {variant} is not applicable: {reason}")]
    InapplicableVariant { variant: String, reason: String },

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("fit needs at least {needed} distinct lengths, got {got}")]
    InsufficientLengths { needed: usize, got: usize },

    #[error("decay constant is unidentifiable: {0}")]
    Unidentifiable(String),

    #[error("fit failed: {0}")]
    FitFailed(String),
}
