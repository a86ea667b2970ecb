use thiserror::Error;

/// Failure modes surfaced by the numerical kernels.
///
/// `NumericalGuard` is reserved for runtime blow-ups (NaN/Inf, CFL violation,
/// eigenvalue coalescence) that map to a dedicated process exit code in the
/// CLI; everything else is a contract violation by the caller.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} unsupported: need a power of two in [16, 65536]")]
    InvalidGrid(usize),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("dyadic block {j} is empty (zero L2 norm); ratio undefined")]
    ZeroBlock { j: i32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time grid too coarse: {0}")]
    InsufficientResolution(String),

    #[error("memory guard: {0}")]
    MemoryGuard(String),

    #[error("eigenvalue gap below threshold at sample {0}: system not strictly hyperbolic there")]
    EigenvalueGap(String),

    #[error("symmetrizer not positive definite: {0}")]
    NotPositive(String),

    #[error("numerical guard tripped: {0}")]
    NumericalGuard(String),
}
