//! Independent finite-difference oracle for the per-mode transmission
//! problem.
//!
//! For one tangential covariable this discretizes the coupled two-point
//! boundary-value problem directly on the physical line: the elliptic
//! equation on `[0, X]`, the *unreflected* parameter-dependent equation on
//! `[-X, 0]`, second-order one-sided stencils for the `2m` interface jump
//! rows, and homogeneous Dirichlet closure at the far ends (justified by
//! exponential decay; `X` is chosen from the computed root split so the
//! truncation error stays below the scheme error).  Unknowns from both
//! sides are interleaved by distance to the interface, which keeps the
//! system banded.
//!
//! The oracle shares no code path with the exponential-sum solver beyond
//! polynomial coefficients — no root finding, no Vandermonde systems, no
//! exact calculus — so agreement between the two is meaningful evidence.

use crate::fd;
use crate::linalg::Banded;
use crate::ode::solve_ode_transmission;
use crate::symbols::{compute_roots, Covariable, Operator, ProblemSpec};
use crate::{c64, C64, Error, Result};

/// Hard cap on one-sided node counts (guards against vanishing decay).
const MAX_NODES_PER_SIDE: usize = 400_000;

/// Numerical solution on the two half-lines.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub h: f64,
    pub x_max: f64,
    /// Elliptic-side values at `x_j = j h`, `j = 0..=K`.
    pub side1: Vec<C64>,
    /// Parabolic-side values at `x = -j h` (physical coordinates).
    pub side2: Vec<C64>,
}

/// Solve the per-mode transmission problem by banded finite differences.
pub fn oracle_solve(
    spec: &ProblemSpec,
    cov: &Covariable,
    g: &[C64],
    h: f64,
) -> Result<OracleSolution> {
    let m = spec.m;
    if g.len() != 2 * m {
        return Err(Error::shape(format!(
            "expected {} jump values, got {}",
            2 * m,
            g.len()
        )));
    }
    if h <= 0.0 {
        return Err(Error::invalid_spec("oracle step must be positive"));
    }

    // Slowest decay rate among the stable roots of both sides (the
    // unreflected side-2 rates mirror the reflected ones).
    let mut min_decay = f64::INFINITY;
    for op in [Operator::Elliptic, Operator::Parabolic] {
        let split = compute_roots(spec, cov, op)?;
        for &(root, _) in &split.plus {
            min_decay = min_decay.min(root.im);
        }
    }
    if !(min_decay > 0.0) {
        return Err(Error::invalid_spec(format!(
            "no decaying solutions at this covariable (min rate {min_decay})"
        )));
    }
    // e^{-min_decay X} <= 1e-9 keeps truncation below the scheme error.
    let x_max = 21.0 / min_decay;
    let k = (x_max / h).ceil() as usize;
    if k > MAX_NODES_PER_SIDE {
        return Err(Error::Unsupported(format!(
            "oracle grid would need {k} nodes per side (decay {min_decay:.3e} at step {h:.3e})"
        )));
    }
    if k < 4 * m + 4 {
        return Err(Error::invalid_spec(
            "oracle step too coarse for the stencil widths",
        ));
    }

    let p1 = spec.char_poly(Operator::Elliptic, &cov.xi_prime, cov.q, false);
    let p2 = spec.char_poly(Operator::Parabolic, &cov.xi_prime, cov.q, false);
    let c1 = p1.coeffs().to_vec();
    let c2 = p2.coeffs().to_vec();

    let n = 2 * (k + 1);
    let kl = 2 * m;
    let ku = 2 * m + 2;
    let mut a = Banded::zeros(n, kl, ku);
    let mut rhs = vec![C64::ZERO; n];

    // Interface jump rows r = 0..2m-1 at the top: one-sided stencils of
    // width r + 2 (consistency order 2).
    for r in 0..2 * m {
        let width = r + 2;
        let pos1: Vec<f64> = (0..width).map(|i| i as f64 * h).collect();
        let pos2: Vec<f64> = (0..width).map(|i| -(i as f64) * h).collect();
        let w1 = fd::weights(0.0, &pos1, r);
        let w2 = fd::weights(0.0, &pos2, r);
        let phase = (-C64::I).powu(r as u32);
        for i in 0..width {
            a.add(r, 2 * i, phase * c64(w1[i], 0.0));
            a.add(r, 2 * i + 1, -phase * c64(w2[i], 0.0));
        }
        rhs[r] = g[r];
    }

    // Interior rows: centered stencils of width 2m + 1 on each side.
    let offsets: Vec<f64> = (0..=2 * m).map(|i| (i as f64 - m as f64) * h).collect();
    let stencil = fd::all_orders(0.0, &offsets, 2 * m);
    for j in m..=k - m {
        // Side 1 at +jh (row 2j), side 2 at -jh (row 2j+1).  The operator
        // is sum_d coeff_d D^d with D = -i d/dx; on the negative side the
        // node order is mirrored, flipping odd-derivative weights.
        for (t, _) in offsets.iter().enumerate() {
            let col1 = 2 * (j + t - m);
            let col2 = col1 + 1;
            let mut w_pos = C64::ZERO;
            let mut w_neg = C64::ZERO;
            for (d, (cd1, cd2)) in c1.iter().zip(&c2).enumerate() {
                let phase = (-C64::I).powu(d as u32);
                let wd = stencil[d][t];
                w_pos += cd1 * phase * c64(wd, 0.0);
                let sign = if d % 2 == 1 { -1.0 } else { 1.0 };
                w_neg += cd2 * phase * c64(sign * wd, 0.0);
            }
            a.add(2 * j, col1, w_pos);
            a.add(2 * j + 1, col2, w_neg);
        }
    }

    // Far-field closure: the last m values on each side vanish.
    for j in k - m + 1..=k {
        a.add(2 * j, 2 * j, C64::ONE);
        a.add(2 * j + 1, 2 * j + 1, C64::ONE);
    }

    let sol = a.solve(&rhs, "finite-difference oracle")?;
    let side1 = (0..=k).map(|j| sol[2 * j]).collect();
    let side2 = (0..=k).map(|j| sol[2 * j + 1]).collect();
    Ok(OracleSolution {
        h,
        x_max: k as f64 * h,
        side1,
        side2,
    })
}

/// Relative sup-norm disagreement between the oracle and the exact
/// exponential-sum solution.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub h: f64,
    pub rel_err_side1: f64,
    pub rel_err_side2: f64,
}

impl OracleComparison {
    pub fn worst(&self) -> f64 {
        self.rel_err_side1.max(self.rel_err_side2)
    }
}

/// Run the oracle and compare it against the exact per-mode solution.
pub fn oracle_compare(
    spec: &ProblemSpec,
    cov: &Covariable,
    g: &[C64],
    h: f64,
) -> Result<OracleComparison> {
    let numeric = oracle_solve(spec, cov, g, h)?;
    let exact = solve_ode_transmission(spec, cov, g)?;
    let mut scale1 = 0.0f64;
    let mut scale2 = 0.0f64;
    let mut err1 = 0.0f64;
    let mut err2 = 0.0f64;
    for (j, (&v1, &v2)) in numeric.side1.iter().zip(&numeric.side2).enumerate() {
        let x = j as f64 * numeric.h;
        let e1 = exact.side1.eval(x);
        let e2 = exact.side2_reflected.eval(x);
        scale1 = scale1.max(e1.norm());
        scale2 = scale2.max(e2.norm());
        err1 = err1.max((v1 - e1).norm());
        err2 = err2.max((v2 - e2).norm());
    }
    Ok(OracleComparison {
        h,
        rel_err_side1: err1 / scale1.max(f64::MIN_POSITIVE),
        rel_err_side2: err2 / scale2.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::ProblemSpec;

    #[test]
    fn oracle_agrees_with_exact_heat_pair() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.0], c64(1.0, 0.0)).unwrap();
        let g = [c64(1.0, 0.3), c64(-0.4, 0.2)];
        let cmp = oracle_compare(&spec, &cov, &g, 2e-3).unwrap();
        assert!(cmp.worst() < 1e-5, "{cmp:?}");
    }

    #[test]
    fn oracle_second_order_convergence() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.2], c64(0.9, 0.35)).unwrap();
        let g = [c64(0.7, -0.2), c64(0.1, 0.5)];
        let coarse = oracle_compare(&spec, &cov, &g, 4e-3).unwrap().worst();
        let fine = oracle_compare(&spec, &cov, &g, 2e-3).unwrap().worst();
        let order = (coarse / fine).log2();
        assert!(
            order > 1.6 && order < 2.6,
            "observed order {order:.2} (coarse {coarse:.3e}, fine {fine:.3e})"
        );
    }

    #[test]
    fn oracle_handles_fourth_order_double_roots() {
        let spec = ProblemSpec::bilaplacian_heat_squared(2, std::f64::consts::FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.0], c64(1.0, 0.0)).unwrap();
        let g = [
            c64(0.8, 0.1),
            c64(-0.3, 0.4),
            c64(0.2, -0.6),
            c64(0.05, 0.35),
        ];
        let cmp = oracle_compare(&spec, &cov, &g, 2e-3).unwrap();
        assert!(cmp.worst() < 3e-4, "{cmp:?}");
    }
}
