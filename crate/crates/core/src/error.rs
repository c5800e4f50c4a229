use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hermitian: max |A - A†| = {max_dev:.3e} exceeds {tol:.3e}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal {off:.3e})")]
    NonConvergence { sweeps: usize, off: f64 },

    #[error("time grid is not uniform: relative deviation {rel_dev:.3e} at index {index}")]
    NonUniformGrid { index: usize, rel_dev: f64 },

    #[error("too few samples for spectral analysis: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("quadrature budget exceeded: needs {needed} nodes, cap {cap}")]
    QuadratureBudget { needed: u64, cap: u64 },

    #[error("field contrast undefined: |reference yield| = {phi_abs:.3e} below {min:.3e}")]
    UndefinedContrast { phi_abs: f64, min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
