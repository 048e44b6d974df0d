use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown scheme `{name}`; expected one of: {valid}")]
    UnknownScheme { name: String, valid: String },

    #[error("stage system (I - {diag} * dt * G) is singular")]
    SingularStage { diag: f64 },

    #[error("stability function is singular at z = {re}{im:+}i (1 - z * {diag} = 0)")]
    SingularStability { re: f64, im: f64, diag: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("N_t - 1 = {remainder_of} is not divisible by m = {m} on level {level}; nearest valid N_t is {suggestion}")]
    NotDivisible {
        level: usize,
        remainder_of: usize,
        m: usize,
        suggestion: usize,
    },

    #[error("bound hypothesis violated: |{which}| = {modulus} >= 1")]
    Hypothesis { which: &'static str, modulus: f64 },

    #[error("bound hypothesis violated at mode {gamma}: |{which}| = {modulus} >= 1")]
    ModeHypothesis {
        gamma: usize,
        which: &'static str,
        modulus: f64,
    },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("dense operator of size {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
