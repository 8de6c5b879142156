use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration {sites:?}: {reason}")]
    InvalidConfiguration { sites: Vec<i64>, reason: String },

    #[error("odd lattice length required for completeness verification, got L = {0}")]
    OddLengthRequired(usize),

    #[error("generic-root assumption violated: |1 + xi_{i} xi_{j} - 2 delta xi_{i}| = {value:e}")]
    AssumptionViolation { i: usize, j: usize, value: f64 },

    #[error("seed indices must be strictly increasing in [0, L), got {0:?}")]
    InvalidSeed(Vec<usize>),

    #[error("degenerate Jacobian row {row}: norm {norm:e}")]
    DegenerateJacobian { row: usize, norm: f64 },

    #[error("continuation stalled at delta = {delta} (residual {residual:e} after {sweeps} sweeps)")]
    ContinuationFailure { delta: f64, residual: f64, sweeps: usize },

    #[error("root entries {i} and {j} collided (distance {distance:e})")]
    DegenerateRoot { i: usize, j: usize, distance: f64 },

    #[error("seed {seed:?}: {source}")]
    Seed {
        seed: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("seeds {first:?} and {second:?} converged to the same root class")]
    DuplicateClass { first: Vec<usize>, second: Vec<usize> },

    #[error("spectral set has {found} classes, expected {expected}")]
    Cardinality { found: usize, expected: usize },

    #[error("root {index} residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { index: usize, residual: f64, tol: f64 },

    #[error("permutation sums are limited to N <= {max}, got N = {n}")]
    TooManyParticles { n: usize, max: usize },

    #[error("singular normalization matrix: |det| = {det:e} (scale {scale:e})")]
    SingularLambda { det: f64, scale: f64 },

    #[error("zero amplitude encountered in inverse coefficient")]
    ZeroAmplitude,

    #[error("Bethe vector vanishes: norm {norm:e}")]
    ZeroBetheVector { norm: f64 },

    #[error("Izergin-Korepin entry ({i}, {j}) is singular: |1 - xi zeta| = {value:e}")]
    IkSingularity { i: usize, j: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index blocks overlap or fall outside 0..{n}")]
    InvalidBlocks { n: usize },

    #[error("inverse coefficient for y = {y:?} at root {root}: {source}")]
    Provenance {
        y: Vec<usize>,
        root: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("could not draw a non-singular sample after {0} attempts")]
    SamplingExhausted(usize),

    #[error("malformed spectrum file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
