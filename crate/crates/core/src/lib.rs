//! Explicit Fourier-multiplier solution machinery for a model transmission
//! problem that couples an elliptic operator on a half-space with a
//! parameter-elliptic (parabolic-type) operator on the complementary
//! half-space, glued through interface jump conditions on all normal
//! derivatives up to order `2m - 1`.
//!
//! After a partial Fourier transform in the tangential variables the problem
//! becomes, for each tangential covariable `ξ'` and spectral parameter
//! `q = λ^{1/2m}`, a two-point ODE transmission system on the half-line.  This
//! crate constructs that system explicitly and verifies its quantitative
//! theory at desk scale:
//!
//! * [`symbols`] — problem coefficients, ellipticity / parameter-ellipticity
//!   checks and the characteristic-root splitting used everywhere else;
//! * [`ode`] — stable exponential solutions, the normalized basic solutions of
//!   both half-line ODEs, the interface coupling matrix and the fundamental
//!   solution of the transmission system;
//! * [`multipliers`] — the homogeneity scalings and scaled symbol families
//!   whose Michlin-type derivative bounds drive the a-priori estimates,
//!   together with a numerical derivative scan;
//! * [`halfspace`] — discretized half-space fields, the homogeneous and full
//!   solvers, layer-potential (Volevich) integral operators, extension
//!   operators and an independent finite-difference oracle;
//! * [`norms`] — parameter-weighted Sobolev, seminorm and boundary trace
//!   norms used by the estimate sweeps.
//!
//! Numerical kernels that the construction itself depends on (small dense
//! complex linear algebra, banded elimination, polynomial companion-matrix
//! root finding, finite-difference weights) are implemented in-repo in
//! [`linalg`], [`poly`] and [`fd`]; routine plumbing (FFTs, arrays, RNG)
//! comes from the usual crates.
//!
//! All public entry points are pure functions of their inputs: results are
//! deterministic and independent of call order, and may be computed from
//! several threads concurrently as long as each call owns its output.

pub mod fd;
pub mod halfspace;
pub mod linalg;
pub mod multipliers;
pub mod norms;
pub mod ode;
pub mod poly;
pub mod symbols;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand for constructing a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
