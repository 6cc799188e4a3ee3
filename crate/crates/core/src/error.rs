use thiserror::Error;

use crate::kernel::KernelError;
use crate::quadrature::QuadratureError;

/// Errors raised by the transform, zero, factorization and positivity layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("approximant index n = {n} must exceed q(t1) = {q_t1}")]
    NTooSmall { n: u64, q_t1: f64 },
    #[error("convolution needs exactly two components, got {0}")]
    ComponentCount(usize),
    #[error("sample at t = {t} is inconclusive: |f| = {value_abs:e} <= error {error:e}")]
    InconclusiveSample { t: f64, value_abs: f64, error: f64 },
    #[error("bracket [{a}, {b}] lost its certified sign change")]
    LostBracket { a: f64, b: f64 },
    #[error("invalid bracket [{a}, {b}]")]
    InvalidBracket { a: f64, b: f64 },
    #[error("possible zero on the contour near z = {re} + {im}i (|F| = {value_abs:e})")]
    ZeroOnContour { re: f64, im: f64, value_abs: f64 },
    #[error("argument jumped by {jump:.3} rad between contour samples; more samples needed")]
    PhaseJumpTooLarge { jump: f64 },
    #[error("order estimate needs |F| > 1 on every circle; got max |F| = {max_abs:e} at r = {radius}")]
    OrderDomain { radius: f64, max_abs: f64 },
    #[error("order estimate needs at least 3 increasing radii")]
    TooFewRadii,
    #[error("zero report is not certified")]
    NotCertified,
    #[error("product constant F(0) = {0:e} is not positive")]
    NonPositiveConstant(f64),
    #[error("divisor zero {zero} has no partner within {tol:e}")]
    UnmatchedDivisorZero { zero: f64, tol: f64 },
    #[error("ring extraction for m = {m} carries no information (band {band:e})")]
    RingTooLarge { m: usize, band: f64 },
    #[error("series tail not converged at sigma = {sigma} (tail {tail:e})")]
    TailNotConverged { sigma: f64, tail: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
