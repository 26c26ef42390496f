use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    /// A structural predicate (hermitian, unitary, skew, ...) failed.
    #[error("{predicate} check failed with residual {residual:.3e}")]
    Structural {
        predicate: &'static str,
        residual: f64,
    },

    #[error("eigenvalue {eigenvalue:.6e} lies within tolerance of the singularity at {pole:.6e}")]
    Singularity { eigenvalue: f64, pole: f64 },

    #[error("near-singular matrix: smallest singular value {smallest:.3e}, largest {largest:.3e}")]
    IllConditioned { smallest: f64, largest: f64 },

    #[error("dimension guard exceeded: requested {requested}, limit {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("operand is not homogeneous: parity defect {defect:.3e}")]
    Parity { defect: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("incompatible structures: {0}")]
    Composition(String),

    #[error("gapless spectrum: eigenvalue {nearest:.3e} inside the gap window")]
    Gapless { nearest: f64 },

    #[error("bulk gap closes at k = {k:.6}: gap {gap:.3e} below requested {requested:.3e}")]
    BulkGapless { k: f64, gap: f64, requested: f64 },

    #[error("lift norm {norm:.6} exceeds 1")]
    Normalization { norm: f64 },

    #[error("grid too coarse on interval [{from:.6}, {to:.6}]: {reason}")]
    Refinement { from: f64, to: f64, reason: String },

    #[error("path endpoint has an eigenvalue {eigenvalue:.3e} within the kernel tolerance")]
    DegenerateEndpoint { eigenvalue: f64 },

    #[error("index methods disagree: spectral flow {spectral_flow}, kernel count {kernel}")]
    Inconsistent { spectral_flow: i64, kernel: i64 },

    #[error("declared symmetry {flag} does not hold: residual {residual:.3e}")]
    Verification { flag: &'static str, residual: f64 },
}
