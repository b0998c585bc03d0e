use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {node} is isolated; the normalized Laplacian needs positive degrees")]
    IsolatedNode { node: usize },

    #[error("custom operator is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("custom operator is not 1-local: entry ({i}, {j}) is nonzero but not an edge")]
    NotLocal { i: usize, j: usize },

    #[error("a spectral interval must be supplied for {0}")]
    MissingInterval(&'static str),

    #[error("invalid spectral interval [{min}, {max}]")]
    InvalidInterval { min: f64, max: f64 },

    #[error("eigenvalue {value} lies outside the spectral interval [{min}, {max}]")]
    IntervalViolation { value: f64, min: f64, max: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph has {n} nodes, above the dense decomposition cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error("response is not finite at mu = {mu}")]
    NonFiniteResponse { mu: f64 },

    #[error("invalid filter order: {0}")]
    InvalidOrder(String),

    #[error("{stage}: singular system ({hint})")]
    SingularSystem { stage: &'static str, hint: String },

    #[error("repeated poles (separation {separation:e}); partial fractions need simple poles")]
    RepeatedPoles { separation: f64 },

    #[error("numerator degree {numerator} is not below denominator degree {denominator}")]
    NumeratorDegree {
        numerator: usize,
        denominator: usize,
    },

    #[error("degenerate factorization: {0}")]
    DegenerateFactorization(String),

    #[error(
        "{form} realization does not reproduce the rational response (relative error {error:e})"
    )]
    Reconstruction { form: &'static str, error: f64 },

    #[error("unstable filter: {0}")]
    Unstable(String),

    #[error("design failed at {stage}: {reason}")]
    DesignFailed { stage: &'static str, reason: String },

    #[error("message from node {from} to node {to} does not follow a graph edge")]
    LocalityViolation { from: usize, to: usize },

    #[error("node count changed from {expected} to {got}")]
    NodeCountChanged { expected: usize, got: usize },

    #[error("transient not decayed: sinusoid fit residual {residual:.3} (run longer)")]
    TransientNotDecayed { residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
