//! Crate error type.  Every failure carries enough context to identify the
//! offending input (covariable, matrix block, config key, ...) without a
//! debugger.

use num_complex::Complex64;

/// Errors reported by the solver and verification layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A problem specification violates a structural requirement
    /// (wrong homogeneity order, missing normal-direction coefficient, ...).
    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),

    /// A spectral parameter lies outside the closed sector it must belong to.
    #[error(
        "parameter {value} lies outside the closed sector |arg| <= {half_angle:.6} \
         (|arg value| = {arg:.6})"
    )]
    OutsideSector {
        value: Complex64,
        half_angle: f64,
        arg: f64,
    },

    /// Characteristic roots could not be split into stable/unstable families:
    /// some root is too close to the real axis.  This signals a violation of
    /// proper ellipticity (or parameter-ellipticity) at the given covariable.
    #[error(
        "proper ellipticity violated for {context}: root {root} has |Im| = {imag:.3e} \
         <= tolerance {tol:.3e}"
    )]
    RootsOnRealAxis {
        context: String,
        root: Complex64,
        imag: f64,
        tol: f64,
    },

    /// The stable/unstable root counts differ from (m, m).
    #[error(
        "improper root split for {context}: expected ({expected}, {expected}) roots in \
         (upper, lower) half-plane, found ({plus}, {minus})"
    )]
    RootCountMismatch {
        context: String,
        expected: usize,
        plus: usize,
        minus: usize,
    },

    /// A linear system central to the construction is numerically singular.
    #[error("linear system in {context} is ill-conditioned: cond_1 ~ {cond:.3e} > {limit:.3e}")]
    IllConditioned {
        context: String,
        cond: f64,
        limit: f64,
    },

    /// A quadrature contour passes too close to a pole.
    #[error(
        "contour for {context} passes within {distance:.3e} of root {root} \
         (minimum allowed {min_allowed:.3e})"
    )]
    ContourNearPole {
        context: String,
        root: Complex64,
        distance: f64,
        min_allowed: f64,
    },

    /// The tangential zero mode of boundary data does not vanish where the
    /// construction requires it to.
    #[error("degenerate tangential zero mode: {0}")]
    ZeroMode(String),

    /// Mismatched grids, component counts or field shapes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A requested configuration is outside what this build supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative kernel failed to converge.
    #[error("{context} did not converge after {iterations} iterations")]
    NoConvergence { context: String, iterations: usize },
}

impl Error {
    /// Convenience constructor for [`Error::InvalidSpec`].
    pub fn invalid_spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    /// Convenience constructor for [`Error::ShapeMismatch`].
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
