//! Amplitude-and-frequency sums `Σ μ_k h(λ_k z)` built by Padé-type
//! interpolation at the origin.
//!
//! The crate solves the discrete moment problem `Σ μ_k λ_k^m = s_m`
//! (`m = 0..2n-1`) by the Prony–Sylvester route, regularizes degenerate
//! problems with a two-term moment variation, and builds the universal
//! differentiation and extrapolation operators that follow from it, along
//! with the classical quadrature, Padé and Bessel specializations.
//!
//! Module map:
//!
//! - [`series`]: target and basis functions as Maclaurin streams.
//! - [`polyroots`]: complex polynomials and an Aberth–Ehrlich root finder.
//! - [`prony`]: moment sequences, generating polynomials, amplitude recovery.
//! - [`regularize`]: moment variation for non-regular problems.
//! - [`diffop`], [`extrapop`]: the universal operators.
//! - [`classics`]: Gauss rules, Padé approximants, exponential sums, Bessel sums.
//! - [`io`]: the text formats shared with the command-line frontend.

pub mod classics;
mod dd;
pub mod diffop;
mod error;
pub mod exec;
pub mod extrapop;
pub mod io;
mod linalg;
pub mod polyroots;
pub mod prony;
pub mod regularize;
pub mod series;

pub use error::{AfsumError, Result};
pub use exec::Execution;
pub use polyroots::ComplexPolynomial;
pub use prony::{AFSum, Binomial, MomentSequence, PronySolution, Tolerances, Verdict};
pub use series::{FunctionSpec, TruncatedSeries};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
