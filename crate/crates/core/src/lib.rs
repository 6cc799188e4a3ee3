//! Complex Fourier transforms of Laguerre–Pólya exponential kernels.
//!
//! The crate evaluates `G(z) = ∫ e^{-q(t)} e^{izt} dt` for even kernels whose
//! exponent `q` has the canonical form `k t^{2m} e^{μt²} ∏(1 + t²/β²)` (or
//! `a(cosh t − 1)`), together with the approximants `G_n`, the reference
//! transforms `F_{2k}`, products `H_n = G_n F_4` and convolutions of kernels.
//! On top of that it locates and certifies real zeros, rebuilds truncated
//! Hadamard products, and checks the nonnegativity of the off-axis Taylor
//! coefficients of `|G|²`.

pub mod approx;
pub mod error;
pub mod factorization;
pub mod kernel;
pub mod positivity;
pub mod quadrature;
pub mod transform;
pub mod zeros;

pub use error::{Error, Result};
pub use kernel::{Kernel, KernelSpec};
pub use quadrature::QuadratureSettings;
pub use transform::{ComplexPoint, ComplexValue, Evaluator, ExtendedKernel, Transform};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
