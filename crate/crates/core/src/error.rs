//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the phase-space, classification,
/// dilation, key-rate, and Monte Carlo layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix that must be symmetric is not, beyond tolerance.
    #[error("matrix is not symmetric: max |m - m^T| entry {max_dev:e}")]
    NotSymmetric { max_dev: f64 },

    /// A matrix that must be positive semidefinite has a negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:e}")]
    NotPositiveSemidefinite { min_eig: f64 },

    /// A covariance matrix violates the uncertainty bound.
    #[error("covariance is unphysical: min symplectic eigenvalue {min_nu} < 1")]
    Unphysical { min_nu: f64 },

    /// A matrix fails the symplectic-form preservation check.
    #[error("matrix is not symplectic: max |M Omega M^T - Omega| entry {max_dev:e}")]
    NotSymplectic { max_dev: f64 },

    /// Channel data violates complete positivity or shape requirements.
    #[error("invalid channel: {detail}")]
    InvalidChannel { detail: String },

    /// Operand dimensions do not line up.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation defined for one-mode states received something else.
    #[error("operation requires a single-mode state, got {got_modes} modes")]
    NotSingleMode { got_modes: usize },

    /// A mode index is out of range or the index set is malformed.
    #[error("bad mode index selection: {detail}")]
    BadModeIndex { detail: String },

    /// The measured quadrature carries (numerically) zero variance.
    #[error("singular conditioning: measured quadrature variance {variance:e} below floor")]
    SingularConditioning { variance: f64 },

    /// A transmission fixed point where the requested construction degenerates.
    #[error("singular transmission tau = {tau}: operation undefined at tau in {{0, 1}}")]
    SingularTransmission { tau: f64 },

    /// (tau, rank) pair that matches no row of the classification table.
    #[error("unclassifiable channel: tau = {tau}, rank product {rank_product} matches no class")]
    Unclassifiable { tau: f64, rank_product: u32 },

    /// Invariant triple that cannot be realized by any canonical form.
    #[error("invalid invariants: {detail}")]
    InvalidInvariants { detail: String },

    /// The requested operation is not defined for this canonical class.
    #[error("unsupported class {class}: {detail}")]
    UnsupportedClass { class: String, detail: String },

    /// Parameter outside its admissible range.
    #[error("invalid parameters: {detail}")]
    InvalidParams { detail: String },

    /// Conditioning covariate has (numerically) zero variance.
    #[error("degenerate covariate: variance below floor, regression undefined")]
    DegenerateCovariate,

    /// Sample count below the estimator floor.
    #[error("insufficient samples: {n} below the minimum of {min}")]
    InsufficientSamples { n: usize, min: usize },

    /// A conditional variance hit zero, which would send an information rate to infinity.
    #[error("infinite information guard: conditional variance {variance:e} is not positive")]
    InfiniteInformation { variance: f64 },
}
