//! Half-line ODE systems: stable exponential solutions, normalized basic
//! solutions of both operators, the interface coupling matrix and the
//! fundamental solution of the transmission system.
//!
//! At a fixed tangential covariable the transmission problem reduces to a
//! pair of constant-coefficient ODEs on the half-line `x > 0` (the parabolic
//! side is reflected), glued by `2m` interface rows
//!
//! ```text
//! B_j(u, w) = D^{j-1} u(0) + (-1)^j D^{j-1} w(0),   j = 1..2m,  D = -i d/dx
//! ```
//!
//! Each side contributes the `m`-dimensional space of decaying solutions
//! spanned by `x^l e^{iτx}` over its stable characteristic roots `τ`
//! (`Im τ > 0`, exponent `l` below the root multiplicity).  The *basic
//! solutions* are the bases of those spaces normalized so that "their own"
//! boundary rows reduce to the identity:
//!
//! * elliptic side `Y¹ = (Y¹_1 .. Y¹_m)` with `D^{j-1} Y¹_k(0) = δ_{jk}`
//!   for `j = 1..m`;
//! * parabolic side `Y² = (Y²_1 .. Y²_m)` with
//!   `(-1)^{m+j} D^{m+j-1} Y²_k(0) = δ_{jk}` for `j = 1..m`.
//!
//! The remaining boundary rows produce the off-diagonal coupling blocks of
//! the full `2m × 2m` boundary matrix `T = [[I, c12], [c21, I]]`; its
//! inverse `Ψ = T⁻¹` couples the two sides, and the columns of `ω = Y Ψ`
//! solve `B_j ω_k = δ_{jk}` — the fundamental solution of the transmission
//! system.  Two independent routes are provided for the basic solutions
//! (confluent Vandermonde solve vs. contour-integral representation) so that
//! each can certify the other.

use crate::linalg::CMat;
use crate::poly::CPoly;
use crate::symbols::{compute_roots, Covariable, Operator, ProblemSpec, RootSplit};
use crate::{c64, C64, Error, Result};

/// One exponential term `(Σ_l c_l x^l) e^{iτx}` with `Im τ > 0`.
#[derive(Debug, Clone)]
pub struct ExpTerm {
    pub root: C64,
    /// Ascending polynomial coefficients `c_0, c_1, ..`.
    pub coeffs: Vec<C64>,
}

/// A finite combination of exponential terms — the exact representation of
/// every half-line solution produced by this module.  All calculus on it
/// (derivatives, traces, applying a polynomial in `D = -i d/dx`) is exact.
#[derive(Debug, Clone, Default)]
pub struct ExponentialSolution {
    pub terms: Vec<ExpTerm>,
}

impl ExponentialSolution {
    pub fn zero() -> Self {
        ExponentialSolution { terms: Vec::new() }
    }

    /// Single monomial term `x^l e^{iτx}`.
    pub fn monomial(root: C64, l: usize) -> Self {
        let mut coeffs = vec![C64::ZERO; l + 1];
        coeffs[l] = C64::ONE;
        ExponentialSolution {
            terms: vec![ExpTerm { root, coeffs }],
        }
    }

    /// Point value.
    pub fn eval(&self, x: f64) -> C64 {
        let mut acc = C64::ZERO;
        for t in &self.terms {
            let mut p = C64::ZERO;
            for &c in t.coeffs.iter().rev() {
                p = p * c64(x, 0.0) + c;
            }
            acc += p * (C64::I * t.root * c64(x, 0.0)).exp();
        }
        acc
    }

    /// Boundary trace `u(0)`.
    pub fn trace(&self) -> C64 {
        self.terms
            .iter()
            .map(|t| t.coeffs.first().copied().unwrap_or(C64::ZERO))
            .sum()
    }

    /// Normal derivative `D u = -i u'`.
    pub fn dn(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut coeffs = vec![C64::ZERO; t.coeffs.len()];
                for (l, &c) in t.coeffs.iter().enumerate() {
                    // D(x^l e^{iτx}) = (τ x^l - i l x^{l-1}) e^{iτx}
                    coeffs[l] += t.root * c;
                    if l > 0 {
                        coeffs[l - 1] += -C64::I * c64(l as f64, 0.0) * c;
                    }
                }
                ExpTerm {
                    root: t.root,
                    coeffs,
                }
            })
            .collect();
        ExponentialSolution { terms }
    }

    /// `D^k u`.
    pub fn dn_k(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.dn();
        }
        out
    }

    /// Boundary trace of `D^k u`.
    pub fn dn_trace(&self, k: usize) -> C64 {
        self.dn_k(k).trace()
    }

    /// Apply a polynomial in `D`: `p(D) u`.
    pub fn apply_poly_dn(&self, p: &CPoly) -> Self {
        let mut out = ExponentialSolution::zero();
        let mut power = self.clone();
        for (k, &c) in p.coeffs().iter().enumerate() {
            if k > 0 {
                power = power.dn();
            }
            out.add_scaled(&power, c);
        }
        out
    }

    /// `self += c * other`, merging terms with identical roots.
    pub fn add_scaled(&mut self, other: &ExponentialSolution, c: C64) {
        if c == C64::ZERO {
            return;
        }
        for t in &other.terms {
            if let Some(mine) = self.terms.iter_mut().find(|s| s.root == t.root) {
                if mine.coeffs.len() < t.coeffs.len() {
                    mine.coeffs.resize(t.coeffs.len(), C64::ZERO);
                }
                for (l, &v) in t.coeffs.iter().enumerate() {
                    mine.coeffs[l] += c * v;
                }
            } else {
                self.terms.push(ExpTerm {
                    root: t.root,
                    coeffs: t.coeffs.iter().map(|&v| c * v).collect(),
                });
            }
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = ExponentialSolution::zero();
        out.add_scaled(self, c);
        out
    }

    /// Largest coefficient magnitude (diagnostic size measure).
    pub fn coeff_norm(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Slowest decay rate: `min_τ Im τ` over the terms (empty sum decays
    /// infinitely fast).
    pub fn decay_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.root.im)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Boundary-row descriptors `(order, sign)` of the `2m` interface rows as
/// they act on one side's functions: row `j` (1-based) applies
/// `sign · D^{j-1} · |_{x=0}` with `sign = +1` on the elliptic side and
/// `sign = (-1)^j` on the (reflected) parabolic side.
pub fn boundary_rows(op: Operator, m: usize) -> Vec<(usize, f64)> {
    (0..2 * m)
        .map(|r| {
            let sign = match op {
                Operator::Elliptic => 1.0,
                Operator::Parabolic => {
                    if (r + 1) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            (r, sign)
        })
        .collect()
}

/// Confluent-Vandermonde boundary-value matrix: entry `(r, c)` is row `r`
/// (order `p`, sign `s`) applied to the basis function `x^l e^{iτx}` of
/// column `c`, namely `s · (-i)^l · p!/(p-l)! · τ^{p-l}` (zero for `p < l`).
pub fn boundary_value_matrix(rows: &[(usize, f64)], basis: &[(C64, usize)]) -> CMat {
    let cols: Vec<(C64, usize)> = basis
        .iter()
        .flat_map(|&(root, mult)| (0..mult).map(move |l| (root, l)))
        .collect();
    CMat::from_fn(rows.len(), cols.len(), |r, c| {
        let (p, sign) = rows[r];
        let (root, l) = cols[c];
        if p < l {
            return C64::ZERO;
        }
        let mut falling = 1.0f64;
        for i in 0..l {
            falling *= (p - i) as f64;
        }
        c64(sign * falling, 0.0) * (-C64::I).powu(l as u32) * root.powu((p - l) as u32)
    })
}

/// A normalized basis of the stable solution space of one side.
#[derive(Debug, Clone)]
pub struct BasicSolutions {
    pub operator: Operator,
    /// The `m` basis functions.
    pub columns: Vec<ExponentialSolution>,
    /// Root split the basis was built from.
    pub split: RootSplit,
    /// 1-norm condition number of the normalization (confluent Vandermonde)
    /// solve.
    pub cond: f64,
}

impl BasicSolutions {
    /// Residual of the defining ODE: sup over `xs` and over columns of
    /// `|a(D) Y_k|`.  The calculus is exact, so this measures only root
    /// accuracy.
    pub fn ode_residual(&self, xs: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for col in &self.columns {
            let r = col.apply_poly_dn(&self.split.char_poly);
            for &x in xs {
                worst = worst.max(r.eval(x).norm());
            }
        }
        worst
    }
}

/// Build the basic solutions of one side by the confluent-Vandermonde route.
pub fn basic_solutions(
    spec: &ProblemSpec,
    cov: &Covariable,
    op: Operator,
) -> Result<BasicSolutions> {
    let split = compute_roots(spec, cov, op)?;
    basic_solutions_from_split(spec, split)
}

/// Same, reusing an existing root split.
pub fn basic_solutions_from_split(
    spec: &ProblemSpec,
    split: RootSplit,
) -> Result<BasicSolutions> {
    let m = spec.m;
    let rows_all = boundary_rows(split.operator, m);
    let rows = match split.operator {
        Operator::Elliptic => &rows_all[..m],
        Operator::Parabolic => &rows_all[m..],
    };
    let v = boundary_value_matrix(rows, &split.plus);
    let context = format!("basic-solution normalization ({})", split.operator);
    let cond = v.require_well_conditioned(&context)?;
    let coeff = v.solve_mat(&CMat::identity(m), &context)?;
    let basis: Vec<ExponentialSolution> = split
        .plus
        .iter()
        .flat_map(|&(root, mult)| (0..mult).map(move |l| ExponentialSolution::monomial(root, l)))
        .collect();
    let columns = (0..m)
        .map(|k| {
            let mut y = ExponentialSolution::zero();
            for (b, phi) in basis.iter().enumerate() {
                y.add_scaled(phi, coeff[(b, k)]);
            }
            y
        })
        .collect();
    Ok(BasicSolutions {
        operator: split.operator,
        columns,
        split,
        cond,
    })
}

/// Conditioning report of the raw (unnormalized) boundary-value system of
/// one side — the transmission analogue of a Wronskian check.  Fails with
/// the root-split diagnostic when the symbol is degenerate.
#[derive(Debug, Clone)]
pub struct WronskianReport {
    pub operator: Operator,
    pub det: C64,
    pub cond: f64,
    pub matrix: CMat,
}

pub fn wronskian(spec: &ProblemSpec, cov: &Covariable, op: Operator) -> Result<WronskianReport> {
    let split = compute_roots(spec, cov, op)?;
    let m = spec.m;
    let rows_all = boundary_rows(op, m);
    let rows = match op {
        Operator::Elliptic => &rows_all[..m],
        Operator::Parabolic => &rows_all[m..],
    };
    let v = boundary_value_matrix(rows, &split.plus);
    Ok(WronskianReport {
        operator: op,
        det: v.det(),
        cond: v.cond_1(),
        matrix: v,
    })
}

/// Basic solutions and coupling data of both sides at one covariable.
#[derive(Debug, Clone)]
pub struct CouplingSet {
    pub y1: BasicSolutions,
    pub y2: BasicSolutions,
    /// Full `2m × 2m` boundary matrix `T = [[I, c12], [c21, I]]` (columns:
    /// the `Y¹` then the `Y²` basis functions; rows: the interface rows).
    pub t: CMat,
    /// `Ψ = T⁻¹`.
    pub psi: CMat,
    /// 1-norm condition number of `T`.
    pub cond: f64,
}

impl CouplingSet {
    /// Off-diagonal coupling block `c12` (elliptic rows applied to `Y²`).
    pub fn c12(&self, m: usize) -> CMat {
        self.t.block(0, m, m, m)
    }

    /// Off-diagonal coupling block `c21` (parabolic rows applied to `Y¹`).
    pub fn c21(&self, m: usize) -> CMat {
        self.t.block(m, 0, m, m)
    }
}

/// Assemble the full boundary matrix from exact traces of the basic
/// solutions (independent of the Vandermonde formula used to build them, so
/// the identity blocks double as a consistency check).
pub fn boundary_matrix(spec: &ProblemSpec, y1: &BasicSolutions, y2: &BasicSolutions) -> CMat {
    let m = spec.m;
    let rows1 = boundary_rows(Operator::Elliptic, m);
    let rows2 = boundary_rows(Operator::Parabolic, m);
    CMat::from_fn(2 * m, 2 * m, |r, c| {
        if c < m {
            let (p, s) = rows1[r];
            c64(s, 0.0) * y1.columns[c].dn_trace(p)
        } else {
            let (p, s) = rows2[r];
            c64(s, 0.0) * y2.columns[c - m].dn_trace(p)
        }
    })
}

/// Build both bases and invert the boundary matrix directly (LU route).
pub fn coupling_set(spec: &ProblemSpec, cov: &Covariable) -> Result<CouplingSet> {
    let y1 = basic_solutions(spec, cov, Operator::Elliptic)?;
    let y2 = basic_solutions(spec, cov, Operator::Parabolic)?;
    let t = boundary_matrix(spec, &y1, &y2);
    let cond = t.require_well_conditioned("interface coupling matrix")?;
    let psi = t.inverse("interface coupling matrix")?;
    Ok(CouplingSet {
        y1,
        y2,
        t,
        psi,
        cond,
    })
}

/// The fundamental solution of the transmission system: `2m` column pairs
/// `ω_k = (ω¹_k, ω²_k)` with `B_j ω_k = δ_{jk}`.  The parabolic component is
/// kept in reflected coordinates (a decaying function of `x > 0`; the
/// physical field on the negative half-line is `ω²_k(-x_n)`).
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub coupling: CouplingSet,
    pub side1: Vec<ExponentialSolution>,
    pub side2: Vec<ExponentialSolution>,
}

impl FundamentalSolution {
    /// Max-norm deviation of the interface rows applied to the columns from
    /// the identity.
    pub fn boundary_residual(&self, spec: &ProblemSpec) -> f64 {
        let m = spec.m;
        let rows1 = boundary_rows(Operator::Elliptic, m);
        let rows2 = boundary_rows(Operator::Parabolic, m);
        let mut worst = 0.0f64;
        for k in 0..2 * m {
            for r in 0..2 * m {
                let (p1, s1) = rows1[r];
                let (p2, s2) = rows2[r];
                let v = c64(s1, 0.0) * self.side1[k].dn_trace(p1)
                    + c64(s2, 0.0) * self.side2[k].dn_trace(p2);
                let target = if r == k { C64::ONE } else { C64::ZERO };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    /// Sup over sample points of both defining ODE residuals.
    pub fn ode_residual(&self, xs: &[f64]) -> f64 {
        let p1 = &self.coupling.y1.split.char_poly;
        let p2 = &self.coupling.y2.split.char_poly;
        let mut worst = 0.0f64;
        for col in &self.side1 {
            let r = col.apply_poly_dn(p1);
            for &x in xs {
                worst = worst.max(r.eval(x).norm());
            }
        }
        for col in &self.side2 {
            let r = col.apply_poly_dn(p2);
            for &x in xs {
                worst = worst.max(r.eval(x).norm());
            }
        }
        worst
    }
}

/// Compose the fundamental solution `ω = Y Ψ`.
pub fn fundamental_solution(spec: &ProblemSpec, cov: &Covariable) -> Result<FundamentalSolution> {
    let coupling = coupling_set(spec, cov)?;
    let m = spec.m;
    let mut side1 = Vec::with_capacity(2 * m);
    let mut side2 = Vec::with_capacity(2 * m);
    for k in 0..2 * m {
        let mut w1 = ExponentialSolution::zero();
        let mut w2 = ExponentialSolution::zero();
        for l in 0..m {
            w1.add_scaled(&coupling.y1.columns[l], coupling.psi[(l, k)]);
            w2.add_scaled(&coupling.y2.columns[l], coupling.psi[(m + l, k)]);
        }
        side1.push(w1);
        side2.push(w2);
    }
    Ok(FundamentalSolution {
        coupling,
        side1,
        side2,
    })
}

/// Solution of the homogeneous transmission system with prescribed jumps.
#[derive(Debug, Clone)]
pub struct TransmissionSolution {
    /// Elliptic-side field on `x_n > 0`.
    pub side1: ExponentialSolution,
    /// Parabolic-side field in reflected coordinates (evaluate at `-x_n`
    /// for the physical field on `x_n < 0`).
    pub side2_reflected: ExponentialSolution,
}

impl TransmissionSolution {
    pub fn eval_side1(&self, xn: f64) -> C64 {
        debug_assert!(xn >= 0.0);
        self.side1.eval(xn)
    }

    pub fn eval_side2(&self, xn: f64) -> C64 {
        debug_assert!(xn <= 0.0);
        self.side2_reflected.eval(-xn)
    }

    /// Max-norm residual of the `2m` interface rows against the prescribed
    /// jump data.
    pub fn jump_residual(&self, m: usize, g: &[C64]) -> f64 {
        let rows1 = boundary_rows(Operator::Elliptic, m);
        let rows2 = boundary_rows(Operator::Parabolic, m);
        (0..2 * m)
            .map(|r| {
                let (p1, s1) = rows1[r];
                let (p2, s2) = rows2[r];
                let v = c64(s1, 0.0) * self.side1.dn_trace(p1)
                    + c64(s2, 0.0) * self.side2_reflected.dn_trace(p2);
                (v - g[r]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Solve the homogeneous transmission system `B_j(u, w) = g_j`.
pub fn solve_ode_transmission(
    spec: &ProblemSpec,
    cov: &Covariable,
    g: &[C64],
) -> Result<TransmissionSolution> {
    if g.len() != 2 * spec.m {
        return Err(Error::shape(format!(
            "expected {} jump values, got {}",
            2 * spec.m,
            g.len()
        )));
    }
    let omega = fundamental_solution(spec, cov)?;
    let mut side1 = ExponentialSolution::zero();
    let mut side2 = ExponentialSolution::zero();
    for (k, &gk) in g.iter().enumerate() {
        side1.add_scaled(&omega.side1[k], gk);
        side2.add_scaled(&omega.side2[k], gk);
    }
    Ok(TransmissionSolution {
        side1,
        side2_reflected: side2,
    })
}

/// Basic solutions of one side represented by a contour integral over a
/// circle enclosing the stable roots — an independent route used to certify
/// the Vandermonde construction.
///
/// Column `k` is `Y_k(x) = (1/2πi) ∮ e^{ixτ} n_k(τ) / a₊(τ) dτ` with `a₊`
/// the monic stable factor and `n_k` a polynomial of degree `< m` solving
/// the boundary-moment system.  The closed contour makes the trapezoid rule
/// spectrally accurate.
#[derive(Debug, Clone)]
pub struct ResidueBasis {
    pub operator: Operator,
    pub center: C64,
    pub radius: f64,
    /// Quadrature nodes on the circle.
    pub nodes: Vec<C64>,
    /// Numerator polynomials, one per column.
    pub numerators: Vec<CPoly>,
    pub a_plus: CPoly,
}

impl ResidueBasis {
    /// Evaluate column `k` at `x ≥ 0` by contour quadrature.
    pub fn eval(&self, k: usize, x: f64) -> C64 {
        let nk = &self.numerators[k];
        let kn = self.nodes.len();
        let mut acc = C64::ZERO;
        for (j, &tau) in self.nodes.iter().enumerate() {
            let phase = (C64::I * tau * c64(x, 0.0)).exp();
            // dτ = i R e^{iθ} dθ; together with 1/(2πi) this gives the
            // weight (R/K) e^{iθ_j}.
            let theta = std::f64::consts::TAU * j as f64 / kn as f64;
            let e = c64(theta.cos(), theta.sin());
            acc += phase * nk.eval(tau) / self.a_plus.eval(tau) * e;
        }
        acc * c64(self.radius / kn as f64, 0.0)
    }
}

/// Build the contour-integral route for one side's basic solutions.
pub fn residue_basic_solutions(
    spec: &ProblemSpec,
    cov: &Covariable,
    op: Operator,
    quad_nodes: usize,
) -> Result<ResidueBasis> {
    let split = compute_roots(spec, cov, op)?;
    let m = spec.m;
    let stable: Vec<C64> = split.stable_with_multiplicity();
    let center = stable.iter().sum::<C64>() / c64(stable.len() as f64, 0.0);
    let maxdist = stable
        .iter()
        .map(|r| (r - center).norm())
        .fold(0.0, f64::max);
    let radius = 1.5 * maxdist + cov.rho() / 10.0;
    let kn = quad_nodes.max(64);
    let nodes: Vec<C64> = (0..kn)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / kn as f64;
            center + c64(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    // Guard: no quadrature node may approach a pole of the integrand.
    let min_allowed = 0.2 * radius;
    for node in &nodes {
        for &(root, _) in &split.plus {
            let distance = (node - root).norm();
            if distance < min_allowed {
                return Err(Error::ContourNearPole {
                    context: format!("contour route ({op})"),
                    root,
                    distance,
                    min_allowed,
                });
            }
        }
    }
    // Boundary-moment matrix: row r (order p, sign s) applied to the
    // monomial column τ^l of the numerator.
    let rows_all = boundary_rows(op, m);
    let rows = match op {
        Operator::Elliptic => &rows_all[..m],
        Operator::Parabolic => &rows_all[m..],
    };
    let quad_moment = |power: usize| -> C64 {
        let mut acc = C64::ZERO;
        for (j, &tau) in nodes.iter().enumerate() {
            let theta = std::f64::consts::TAU * j as f64 / kn as f64;
            let e = c64(theta.cos(), theta.sin());
            acc += tau.powu(power as u32) / split.a_plus.eval(tau) * e;
        }
        acc * c64(radius / kn as f64, 0.0)
    };
    let g = CMat::from_fn(m, m, |r, l| {
        let (p, s) = rows[r];
        c64(s, 0.0) * quad_moment(p + l)
    });
    let coeff = g.solve_mat(&CMat::identity(m), &format!("contour moments ({op})"))?;
    let numerators = (0..m)
        .map(|k| CPoly::new((0..m).map(|l| coeff[(l, k)]).collect()))
        .collect();
    Ok(ResidueBasis {
        operator: op,
        center,
        radius,
        nodes,
        numerators,
        a_plus: split.a_plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::ProblemSpec;
    use approx::assert_relative_eq;

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    fn heat_cov(xi: f64, q: f64) -> (ProblemSpec, Covariable) {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![xi], c64(q, 0.0)).unwrap();
        (spec, cov)
    }

    #[test]
    fn exponential_calculus() {
        // u = x e^{iτx}, τ = 2i ⇒ u = x e^{-2x}
        let u = ExponentialSolution::monomial(c64(0.0, 2.0), 1);
        assert_relative_eq!(u.eval(0.5).re, 0.5 * (-1.0f64).exp(), max_relative = 1e-14);
        // D u = -i u' = -i(1 - 2x) e^{-2x}
        let du = u.dn();
        let x = 0.3f64;
        let expect = -C64::I * c64((1.0 - 2.0 * x) * (-2.0 * x).exp(), 0.0);
        assert!((du.eval(x) - expect).norm() < 1e-14);
        // (D² + τ²-free) check: (D - τ)² annihilates x e^{iτx}.
        let p = CPoly::new(vec![c64(0.0, 2.0) * c64(0.0, 2.0), -2.0 * c64(0.0, 2.0), C64::ONE]);
        let r = u.apply_poly_dn(&p);
        for &x in &[0.0, 0.2, 1.0, 3.0] {
            assert!(r.eval(x).norm() < 1e-13, "residual at {x}");
        }
    }

    #[test]
    fn laplace_basic_solution_closed_form() {
        let (spec, cov) = heat_cov(3.0, 4.0);
        let y1 = basic_solutions(&spec, &cov, Operator::Elliptic).unwrap();
        // Y¹ = e^{-|ξ'| x}
        for &x in &[0.0, 0.1, 0.7, 2.0] {
            let v = y1.columns[0].eval(x);
            assert_relative_eq!(v.re, (-3.0 * x).exp(), max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
        assert!(y1.ode_residual(&[0.0, 0.5, 1.0]) < 1e-10);
    }

    #[test]
    fn heat_basic_solution_closed_form() {
        let (spec, cov) = heat_cov(3.0, 4.0);
        let y2 = basic_solutions(&spec, &cov, Operator::Parabolic).unwrap();
        // Y² = (-i/β) e^{-βx}, β = 5
        for &x in &[0.0, 0.2, 1.0] {
            let v = y2.columns[0].eval(x);
            let expect = -C64::I / c64(5.0, 0.0) * c64((-5.0 * x).exp(), 0.0);
            assert!((v - expect).norm() < 1e-12, "x = {x}: {v}");
        }
        // Normalization row: +D Y²(0) = 1.
        assert!((y2.columns[0].dn_trace(1) - C64::ONE).norm() < 1e-12);
    }

    #[test]
    fn coupling_golden_values() {
        let (spec, cov) = heat_cov(3.0, 4.0);
        let cs = coupling_set(&spec, &cov).unwrap();
        // T = [[1, i/5], [3i, 1]]
        assert!((cs.t[(0, 0)] - C64::ONE).norm() < 1e-12);
        assert!((cs.t[(0, 1)] - c64(0.0, 0.2)).norm() < 1e-12);
        assert!((cs.t[(1, 0)] - c64(0.0, 3.0)).norm() < 1e-12);
        assert!((cs.t[(1, 1)] - C64::ONE).norm() < 1e-12);
        // Ψ = (5/8) [[1, -i/5], [-3i, 1]]
        let f = 5.0 / 8.0;
        assert!((cs.psi[(0, 0)] - c64(f, 0.0)).norm() < 1e-12);
        assert!((cs.psi[(0, 1)] - c64(0.0, -0.2 * f)).norm() < 1e-12);
        assert!((cs.psi[(1, 0)] - c64(0.0, -3.0 * f)).norm() < 1e-12);
        assert!((cs.psi[(1, 1)] - c64(f, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn coupling_golden_at_unit_xi() {
        let (spec, cov) = heat_cov(1.0, 0.0);
        let cs = coupling_set(&spec, &cov).unwrap();
        // β = 1: Ψ = ½ [[1, -i], [-i, 1]]
        for (r, c, expect) in [
            (0, 0, c64(0.5, 0.0)),
            (0, 1, c64(0.0, -0.5)),
            (1, 0, c64(0.0, -0.5)),
            (1, 1, c64(0.5, 0.0)),
        ] {
            assert!(
                (cs.psi[(r, c)] - expect).norm() < 1e-12,
                "psi[{r}{c}] = {}",
                cs.psi[(r, c)]
            );
        }
    }

    #[test]
    fn fundamental_solution_closed_form_entry() {
        let (spec, cov) = heat_cov(3.0, 4.0);
        let omega = fundamental_solution(&spec, &cov).unwrap();
        // ω¹_1 = (β/(β+|ξ'|)) e^{-|ξ'| x} = (5/8) e^{-3x}
        for &x in &[0.0, 0.4, 1.3] {
            let v = omega.side1[0].eval(x);
            assert_relative_eq!(v.re, 0.625 * (-3.0 * x).exp(), max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
        assert!(omega.boundary_residual(&spec) < 1e-12);
        assert!(omega.ode_residual(&[0.0, 0.5, 2.0]) < 1e-9);
    }

    #[test]
    fn fundamental_solution_random_specs() {
        for seed in 0..8u64 {
            for (m, doubled) in [(1, false), (2, false), (2, true)] {
                let spec = ProblemSpec::random_elliptic(m, 2, FRAC_PI_2, seed, doubled);
                let cov =
                    Covariable::new(&spec, vec![0.8 + 0.1 * seed as f64], c64(0.65, 0.2)).unwrap();
                let omega = fundamental_solution(&spec, &cov).unwrap();
                let res = omega.boundary_residual(&spec);
                assert!(
                    res < 1e-10,
                    "seed {seed} m {m} doubled {doubled}: residual {res:e}"
                );
            }
        }
    }

    #[test]
    fn transmission_solve_matches_jumps() {
        let spec = ProblemSpec::bilaplacian_heat_squared(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.2], c64(0.9, 0.3)).unwrap();
        let g = [c64(1.0, 0.5), c64(-0.3, 0.2), c64(0.0, -1.1), c64(2.0, 0.0)];
        let sol = solve_ode_transmission(&spec, &cov, &g).unwrap();
        assert!(sol.jump_residual(spec.m, &g) < 1e-9);
        // Both sides decay.
        assert!(sol.side1.decay_rate() > 0.0);
        assert!(sol.side2_reflected.decay_rate() > 0.0);
        assert!(sol.eval_side1(6.0).norm() < 1e-2);
        assert!(sol.eval_side2(-6.0).norm() < 1e-2);
    }

    #[test]
    fn residue_route_matches_vandermonde() {
        for (m, doubled) in [(1, false), (2, false), (2, true)] {
            let spec = ProblemSpec::random_elliptic(m, 2, FRAC_PI_2, 11, doubled);
            let cov = Covariable::new(&spec, vec![1.1], c64(0.7, 0.2)).unwrap();
            for op in [Operator::Elliptic, Operator::Parabolic] {
                let direct = basic_solutions(&spec, &cov, op).unwrap();
                let contour = residue_basic_solutions(&spec, &cov, op, 256).unwrap();
                for k in 0..m {
                    for &x in &[0.0, 0.3, 1.0, 2.5] {
                        let a = direct.columns[k].eval(x);
                        let b = contour.eval(k, x);
                        assert!(
                            (a - b).norm() < 1e-8,
                            "m {m} doubled {doubled} {op} col {k} x {x}: {a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn wronskian_degenerate_symbol_fails() {
        let spec = ProblemSpec::hyperbolic_demo(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.0], C64::ZERO).unwrap();
        let err = wronskian(&spec, &cov, Operator::Elliptic).unwrap_err();
        assert!(matches!(err, Error::RootsOnRealAxis { .. }));
        // Intact side still reports.
        let ok = wronskian(&spec, &cov, Operator::Parabolic).unwrap();
        assert!(ok.det.norm() > 0.0);
    }
}
