//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of the operands do not conform (reshape products, t-product
    /// inner modes, metric inputs, ...).
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A mode or entry index lies outside the tensor.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// An inverse FFT that was asked to return a real tensor found a
    /// residual imaginary part above tolerance. This signals broken
    /// conjugate symmetry somewhere upstream.
    #[error("residual imaginary part {max_imag:.3e} exceeds tolerance {allowed:.3e}")]
    ResidualImaginary { max_imag: f64, allowed: f64 },

    /// A requested rank profile violates the feasibility bounds of the
    /// decomposition being computed.
    #[error("infeasible rank profile: {0}")]
    InfeasibleRanks(String),

    /// An iterative numeric kernel (SVD) failed to converge.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A tolerance-driven construction could not certify its target after
    /// the permitted number of refinements. Carries the best error seen.
    #[error(
        "tolerance not met: achieved relative error {achieved:.6e} > target {target:.6e} \
         after {refinements} refinement round(s)"
    )]
    ToleranceNotMet {
        achieved: f64,
        target: f64,
        refinements: usize,
    },

    /// Relative quantities against a zero-norm reference are undefined.
    #[error("zero-norm reference: {0}")]
    ZeroNormReference(String),

    /// Completion mask contains entries other than exactly 0 or 1.
    #[error("invalid mask: {0}")]
    InvalidMask(String),

    /// ERGAS is undefined for bands whose reference mean is zero.
    #[error("zero band mean in band(s) {0:?}")]
    ZeroBandMean(Vec<usize>),

    /// An image is smaller than the requested sliding window.
    #[error("window does not fit: {0}")]
    WindowTooLarge(String),

    /// File-format violation (bad magic, version, dtype, rank chain, ...).
    #[error("invalid file: {0}")]
    InvalidFile(String),

    /// Underlying I/O failure, annotated with the byte offset reached.
    #[error("io error at byte {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
