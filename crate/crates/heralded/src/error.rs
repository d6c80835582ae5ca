//! Library-wide error type.

use thiserror::Error;

/// Errors produced by state constructors, transforms and the scan/verify
/// front ends.
#[derive(Error, Debug)]
pub enum Error {
    /// The filter g^n̂ with g > 1 was applied to a state whose tail does not
    /// decay fast enough for the reweighting to converge: the amplified state
    /// would be dominated by the representation boundary — the Fock truncation
    /// edge, or the outermost ring of a phase-space grid. `level` is the
    /// boundary index in the offending representation.
    #[error(
        "amplification with g = {gain} diverges: relative weight {tail_mass:.3e} \
         accumulates at the representation boundary (index ≥ {level})"
    )]
    DivergentAmplification {
        gain: f64,
        level: usize,
        tail_mass: f64,
    },

    /// A gain parameter outside (0, ∞) was supplied.
    #[error("gain must be finite and strictly positive, got {0}")]
    InvalidGain(f64),

    /// A state vector or matrix has numerically zero norm and cannot be
    /// normalized.
    #[error("cannot normalize: norm {0:.3e} is numerically zero")]
    ZeroNorm(f64),

    /// Two states or operators that must live in the same truncated space have
    /// different cutoffs.
    #[error("Fock cutoff mismatch: expected {expected}, got {got}")]
    CutoffMismatch { expected: usize, got: usize },

    /// A scalar argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Gaussian transformation law was evaluated outside its domain of
    /// validity: the input covariance violates max eigenvalue < (g²+1)/(2(g²−1)),
    /// so the output is not a physical state.
    #[error(
        "no physical Gaussian output: quadrature variance {max_variance} reaches \
         the amplification bound {bound} for g = {gain}"
    )]
    UnphysicalOutput {
        gain: f64,
        max_variance: f64,
        bound: f64,
    },

    /// A matrix that the transformation laws need to invert is singular to
    /// working precision.
    #[error("matrix inversion failed in {context}")]
    SingularMatrix { context: &'static str },

    /// A matrix that should describe a quantum state fails positivity or the
    /// uncertainty bound (for covariance matrices, det γ ≥ 1 in the
    /// vacuum-equals-identity convention used here).
    #[error("not a valid quantum state: positivity/uncertainty defect {0:.3e}")]
    InvalidCovariance(f64),

    /// A phase-space grid is too coarse or too small to resolve the requested
    /// operation.
    #[error("phase-space grid unsuitable: {0}")]
    GridTooSmall(String),

    /// Numerical integration of a phase-space density failed to produce a
    /// finite, positive normalisation.
    #[error("phase-space density is not integrable on the grid: total mass {0}")]
    NonIntegrable(f64),

    /// An effective gain was requested for a state with (numerically) zero
    /// input mean field, where gain Ã/A is undefined.
    #[error("effective gain undefined: input mean field {0:.3e} is numerically zero")]
    ZeroInputAmplitude(f64),

    /// A Fock cutoff is too small to represent a state faithfully.
    #[error("cutoff {cutoff} too small: state carries mass {tail_mass:.3e} at the truncation edge")]
    CutoffUnfaithful { cutoff: usize, tail_mass: f64 },

    /// The heralding event has (numerically) zero probability, so the
    /// conditional state is undefined.
    #[error("heralding probability {0:.3e} is numerically zero; conditional state undefined")]
    DegenerateHerald(f64),

    /// A config or command-line selection is inconsistent (unknown scenario
    /// or suite, sweep parameter not available, malformed override, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// File I/O while reading configs or writing CSV output.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
