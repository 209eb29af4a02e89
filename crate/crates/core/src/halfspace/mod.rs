//! Half-space discretization, solvers, and verification drivers.
//!
//! Builds on the per-mode machinery ([`crate::ode`]) to solve the coupled
//! transmission problem on a tangential torus × normal half-line at desk
//! scale, with exact spectral representations wherever the algebra allows:
//!
//! * [`grid`] — grids and the four field representations;
//! * [`solve`] — extensions, interior parametrix/resolvent, the homogeneous
//!   (jump-data) solver, layer-potential operators, and the full pipeline;
//! * [`hilbert`] — the one-sided Hilbert operator and empirical `L^p`
//!   operator constants;
//! * [`oracle`] — an independent banded finite-difference solver for the
//!   per-mode two-point transmission problem;
//! * [`estimates`] — parameter sweeps that measure the a priori inequality
//!   constants.

pub mod estimates;
pub mod grid;
pub mod hilbert;
pub mod oracle;
pub mod solve;
