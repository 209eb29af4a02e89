//! Extensions, interior operators, and the coupled half-space solvers.
//!
//! The pipeline splits the transmission problem in the classical way:
//! interior particular solutions kill the right-hand sides, and a
//! homogeneous correction with adjusted jump data restores the interface
//! conditions.  Concretely:
//!
//! 1. `v_1` solves the elliptic equation up to a tracked low-frequency
//!    remainder (smooth-cutoff parametrix on the torus), or exactly when a
//!    whole-space extension of `u_1` is already known;
//! 2. `v_2` solves the parameter-dependent equation exactly on the torus
//!    (the symbol is invertible for nonzero parameters in the sector);
//! 3. `w = solve_homogeneous(g - B(v_1, v_2))` restores the jumps, one
//!    exact exponential-sum profile per tangential mode.
//!
//! All parabolic-side fields live in reflected coordinates (evaluate at
//! `-x_n` for the physical field), matching the per-mode machinery.
//!
//! The module also hosts the layer-potential quadrature operator (kernel
//! evaluated at `x + y`), the interface extensions that turn trace data
//! into half-space fields with prescribed decay, and a manufactured
//! problem generator used by the verification drivers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfspace::grid::{BoundaryField, GridSpec, ModeField, WholeField};
use crate::ode::{boundary_rows, solve_ode_transmission, ExponentialSolution};
use crate::symbols::{Covariable, Operator, ProblemSpec};
use crate::{c64, C64, Error, Result};

/// Smooth step: `0` for `t <= 0`, `1` for `t >= 1`, C-infinity in between.
pub fn smooth_step(t: f64) -> f64 {
    fn sigma(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    let a = sigma(t);
    let b = sigma(1.0 - t);
    a / (a + b)
}

/// High-frequency cutoff `chi(r)`: `0` for `r <= 1`, `1` for `r >= 2`.
pub fn high_pass(r: f64) -> f64 {
    smooth_step(r - 1.0)
}

fn ensure_planar(spec: &ProblemSpec) -> Result<()> {
    if spec.n != 2 {
        return Err(Error::Unsupported(format!(
            "half-space discretization is implemented for two space dimensions, got n = {}",
            spec.n
        )));
    }
    Ok(())
}

/// Decay rate of an interface extension.
#[derive(Debug, Clone, Copy)]
pub enum ExtensionDecay {
    /// `e^{-|xi'| x_n}` per mode.
    Plain,
    /// `e^{-(|xi'| + |q|) x_n}` per mode (parameter-weighted).
    WithParameter(f64),
}

/// Extend interface data into the half-space: mode `k` becomes the profile
/// `g_hat_k e^{-d_k x_n}` with `d_k = |xi_k|` or `|xi_k| + |q|`.
pub fn extend_boundary(g: &BoundaryField, decay: ExtensionDecay) -> ModeField {
    let n = g.values.len();
    let spec = GridSpec {
        period: g.period,
        n_tan: n,
        xn: crate::halfspace::grid::XnGrid::uniform(2, 1.0),
    };
    let freqs = spec.frequencies();
    let modes = g.to_modes();
    let mut out = ModeField::zeros(g.period, n);
    for k in 0..n {
        let d = match decay {
            ExtensionDecay::Plain => freqs[k].abs(),
            ExtensionDecay::WithParameter(q_abs) => freqs[k].abs() + q_abs,
        };
        // Profile e^{i tau x} with tau = i d.
        out.profiles[k] = ExponentialSolution::monomial(c64(0.0, d), 0).scale(modes[k]);
    }
    out
}

/// What to do with the tangential mean of jump data (the zero mode has no
/// decaying elliptic-side solution, so it cannot be corrected).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Fail if any jump datum has a nonzero mean.
    Reject,
    /// Drop the means and record the largest magnitude removed.
    Drop,
}

/// Threshold below which a zero-mode coefficient counts as numerically zero.
const ZERO_MODE_TOL: f64 = 1e-12;

/// Half-space solution of the homogeneous transmission problem: one exact
/// exponential-sum profile per tangential mode and side.
#[derive(Debug, Clone)]
pub struct HomogeneousSolution {
    pub side1: ModeField,
    pub side2_reflected: ModeField,
    pub q: C64,
    /// Largest jump-data mean magnitude removed under [`ZeroModePolicy::Drop`].
    pub dropped_mean: f64,
}

impl HomogeneousSolution {
    /// Exact interface residual: max over modes and rows of
    /// `|B_j(u)(k) - g_hat_j(k)|`.
    pub fn jump_residual(&self, spec: &ProblemSpec, g: &[BoundaryField]) -> f64 {
        let m = spec.m;
        let rows1 = boundary_rows(Operator::Elliptic, m);
        let rows2 = boundary_rows(Operator::Parabolic, m);
        let g_modes: Vec<Vec<C64>> = g.iter().map(|gj| gj.to_modes()).collect();
        let n = self.side1.n_tan();
        let mut worst = 0.0f64;
        for j in 0..2 * m {
            let (p1, s1) = rows1[j];
            let (p2, s2) = rows2[j];
            let t1 = self.side1.trace_dn_modes(p1);
            let t2 = self.side2_reflected.trace_dn_modes(p2);
            for k in 0..n {
                let mut expect = g_modes[j][k];
                if k == 0 && self.dropped_mean > 0.0 {
                    expect = C64::ZERO;
                }
                let got = c64(s1, 0.0) * t1[k] + c64(s2, 0.0) * t2[k];
                worst = worst.max((got - expect).norm());
            }
        }
        worst
    }

    /// Interior residual: max over modes, sides, and sample points of the
    /// characteristic operator applied to the profiles (exact calculus, so
    /// this measures root accuracy only).
    pub fn interior_residual(&self, spec: &ProblemSpec, xs: &[f64]) -> f64 {
        let grid_spec = GridSpec {
            period: self.side1.period,
            n_tan: self.side1.n_tan(),
            xn: crate::halfspace::grid::XnGrid::uniform(2, 1.0),
        };
        let freqs = grid_spec.frequencies();
        let mut worst = 0.0f64;
        for k in 0..self.side1.n_tan() {
            let xi = [freqs[k]];
            for (op, field) in [
                (Operator::Elliptic, &self.side1),
                (Operator::Parabolic, &self.side2_reflected),
            ] {
                let p = spec.char_poly(op, &xi, self.q, true);
                let applied = field.profiles[k].apply_poly_dn(&p);
                let scale = 1.0 + field.profiles[k].coeff_norm() * p.coeff_scale();
                for &x in xs {
                    worst = worst.max(applied.eval(x).norm() / scale);
                }
            }
        }
        worst
    }
}

/// Solve the homogeneous transmission problem with jump data `g` (one
/// interface field per row, `2m` of them) at parameter `q`.
pub fn solve_homogeneous(
    spec: &ProblemSpec,
    g: &[BoundaryField],
    q: C64,
    policy: ZeroModePolicy,
) -> Result<HomogeneousSolution> {
    ensure_planar(spec)?;
    let m = spec.m;
    if g.len() != 2 * m {
        return Err(Error::shape(format!(
            "expected {} jump fields, got {}",
            2 * m,
            g.len()
        )));
    }
    let n = g[0].values.len();
    let period = g[0].period;
    if g.iter().any(|gj| gj.values.len() != n) {
        return Err(Error::shape("jump fields have differing resolutions"));
    }
    let grid_spec = GridSpec {
        period,
        n_tan: n,
        xn: crate::halfspace::grid::XnGrid::uniform(2, 1.0),
    };
    let freqs = grid_spec.frequencies();
    let g_modes: Vec<Vec<C64>> = g.iter().map(|gj| gj.to_modes()).collect();
    let scale = g_modes
        .iter()
        .flat_map(|row| row.iter().map(|c| c.norm()))
        .fold(0.0, f64::max)
        .max(1.0);

    let mut side1 = ModeField::zeros(period, n);
    let mut side2 = ModeField::zeros(period, n);
    let mut dropped: f64 = 0.0;
    for k in 0..n {
        let gk: Vec<C64> = (0..2 * m).map(|j| g_modes[j][k]).collect();
        if k == 0 {
            let mass = gk.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if mass > ZERO_MODE_TOL * scale {
                match policy {
                    ZeroModePolicy::Reject => {
                        return Err(Error::ZeroMode(format!(
                            "jump data has tangential mean of magnitude {mass:.3e}; \
                             the zero mode admits no decaying elliptic-side solution"
                        )));
                    }
                    ZeroModePolicy::Drop => dropped = mass,
                }
            }
            continue;
        }
        if gk.iter().all(|c| c.norm() <= f64::MIN_POSITIVE) {
            continue;
        }
        let cov = Covariable::new(spec, vec![freqs[k]], q)?;
        let sol = solve_ode_transmission(spec, &cov, &gk)?;
        side1.profiles[k] = sol.side1;
        side2.profiles[k] = sol.side2_reflected;
    }
    Ok(HomogeneousSolution {
        side1,
        side2_reflected: side2,
        q,
        dropped_mean: dropped,
    })
}

/// Layer-potential quadrature: `out_i = sum_j w_j k(x_i + y_j) phi_j`.
pub fn volevich_apply(
    kernel: &ExponentialSolution,
    y_nodes: &[f64],
    y_weights: &[f64],
    phi: &[C64],
    x_out: &[f64],
) -> Vec<C64> {
    assert_eq!(y_nodes.len(), y_weights.len());
    assert_eq!(y_nodes.len(), phi.len());
    x_out
        .iter()
        .map(|&x| {
            let mut acc = C64::ZERO;
            for ((&y, &w), &p) in y_nodes.iter().zip(y_weights).zip(phi) {
                acc += kernel.eval(x + y) * p * c64(w, 0.0);
            }
            acc
        })
        .collect()
}

/// Apply the elliptic interior operator `a_1(D)` on the torus.
pub fn apply_elliptic(spec: &ProblemSpec, u: &WholeField) -> WholeField {
    u.apply_symbol(|xi, eta| spec.eval_a1(&[xi, eta]))
}

/// Apply the reflected parabolic interior operator `a_2(D, q)` on the torus.
pub fn apply_parabolic_reflected(spec: &ProblemSpec, u: &WholeField, q: C64) -> WholeField {
    u.apply_symbol(|xi, eta| spec.char_poly(Operator::Parabolic, &[xi], q, true).eval(c64(eta, 0.0)))
}

/// High-frequency elliptic parametrix `chi(|xi|) / a_1(xi)` on the torus.
pub fn parametrix_elliptic(spec: &ProblemSpec, f: &WholeField) -> WholeField {
    f.apply_symbol(|xi, eta| {
        let r = (xi * xi + eta * eta).sqrt();
        let chi = high_pass(r);
        if chi == 0.0 {
            C64::ZERO
        } else {
            c64(chi, 0.0) / spec.eval_a1(&[xi, eta])
        }
    })
}

/// Low-frequency complement `(1 - chi(|xi|))` of the parametrix cutoff.
pub fn low_pass_part(f: &WholeField) -> WholeField {
    f.apply_symbol(|xi, eta| c64(1.0 - high_pass((xi * xi + eta * eta).sqrt()), 0.0))
}

/// Invert the reflected parabolic operator exactly on the torus.  Requires
/// a parameter in the open sector (`q != 0`); the symbol is then bounded
/// away from zero.
pub fn resolvent_parabolic_reflected(
    spec: &ProblemSpec,
    f: &WholeField,
    q: C64,
) -> Result<WholeField> {
    ensure_planar(spec)?;
    if q.norm() == 0.0 {
        return Err(Error::ZeroMode(
            "parabolic resolvent requires a nonzero parameter".into(),
        ));
    }
    let xis = f.tan_frequencies();
    let etas = f.normal_frequencies();
    let mut out = f.clone();
    for (j, &xi) in xis.iter().enumerate() {
        let p = spec.char_poly(Operator::Parabolic, &[xi], q, true);
        for (i, &eta) in etas.iter().enumerate() {
            let denom = p.eval(c64(eta, 0.0));
            let scale = ((xi * xi + eta * eta).sqrt() + q.norm()).powi(2 * spec.m as i32);
            if denom.norm() < 1e-12 * scale {
                return Err(Error::IllConditioned {
                    context: "parabolic symbol inversion".into(),
                    cond: scale / denom.norm().max(f64::MIN_POSITIVE),
                    limit: 1e12,
                });
            }
            out.coeffs[(j, i)] /= denom;
        }
    }
    Ok(out)
}

/// Interior data handed to the full solver.
pub enum InteriorData<'a> {
    /// Whole-space extensions of both unknowns are known (manufactured
    /// problems): the interior step reproduces them exactly while still
    /// exercising the operator pipeline.
    KnownExtension {
        u1: &'a WholeField,
        u2_reflected: &'a WholeField,
    },
    /// Only the right-hand sides are known, as whole-space fields (extended
    /// by zero or otherwise by the caller).  The elliptic side is solved by
    /// a high-frequency parametrix; the untreated low-frequency mass is
    /// reported, not hidden.
    Blind {
        f1: &'a WholeField,
        f2_reflected: &'a WholeField,
    },
}

/// Residual and bookkeeping summary of a full solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Max-norm interface residual of the corrected solution (mode space).
    pub jump_residual: f64,
    /// Coefficient-space residual of the elliptic interior equation
    /// (excluding the reported low-frequency remainder).
    pub interior_residual_elliptic: f64,
    /// Coefficient-space residual of the parabolic interior equation.
    pub interior_residual_parabolic: f64,
    /// Low-frequency right-hand-side mass left untreated by the blind
    /// parametrix (zero in known-extension mode).
    pub low_frequency_mass: f64,
    /// Jump-data mean magnitude dropped by the zero-mode policy.
    pub dropped_mean: f64,
}

/// Output of [`solve_full`]: interior parts, homogeneous correction, report.
pub struct FullSolution {
    pub v1: WholeField,
    pub v2_reflected: WholeField,
    pub homogeneous: HomogeneousSolution,
    pub report: SolveReport,
}

impl FullSolution {
    /// Total elliptic-side solution at a point of the closed half-space.
    pub fn eval_u1(&self, x: f64, y: f64) -> C64 {
        self.v1.eval(x, y) + self.homogeneous.side1.eval(x, y)
    }

    /// Total parabolic-side solution in reflected coordinates.
    pub fn eval_u2_reflected(&self, x: f64, y: f64) -> C64 {
        self.v2_reflected.eval(x, y) + self.homogeneous.side2_reflected.eval(x, y)
    }
}

/// Solve the full transmission problem: interior step, trace correction,
/// homogeneous solve.  `g` holds the `2m` prescribed jump fields.
pub fn solve_full(
    spec: &ProblemSpec,
    data: InteriorData,
    g: &[BoundaryField],
    q: C64,
    policy: ZeroModePolicy,
) -> Result<FullSolution> {
    ensure_planar(spec)?;
    let m = spec.m;
    if g.len() != 2 * m {
        return Err(Error::shape(format!(
            "expected {} jump fields, got {}",
            2 * m,
            g.len()
        )));
    }

    // Interior particular solutions and their equation residuals.
    let (v1, v2, low_mass, res1, res2) = match data {
        InteriorData::KnownExtension { u1, u2_reflected } => {
            let f1 = apply_elliptic(spec, u1);
            let v1 = {
                // (1 - chi) u1 + chi a_1^{-1} a_1 u1 = u1, assembled through
                // the actual operator pipeline.
                let mut low = low_pass_part(u1);
                let high = parametrix_elliptic(spec, &f1);
                low.coeffs += &high.coeffs;
                low
            };
            let f2 = apply_parabolic_reflected(spec, u2_reflected, q);
            let v2 = resolvent_parabolic_reflected(spec, &f2, q)?;
            // Residuals in coefficient space against the manufactured sides.
            let r1 = {
                let back = apply_elliptic(spec, &v1);
                back.coeffs
                    .iter()
                    .zip(f1.coeffs.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            };
            let r2 = {
                let back = apply_parabolic_reflected(spec, &v2, q);
                back.coeffs
                    .iter()
                    .zip(f2.coeffs.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            };
            (v1, v2, 0.0, r1, r2)
        }
        InteriorData::Blind { f1, f2_reflected } => {
            let v1 = parametrix_elliptic(spec, f1);
            let low = low_pass_part(f1);
            let low_mass = low.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let v2 = resolvent_parabolic_reflected(spec, f2_reflected, q)?;
            // The parametrix satisfies a_1 v_1 = chi f_1 exactly; measure
            // the residual against the high-frequency part it targets.
            let r1 = {
                let back = apply_elliptic(spec, &v1);
                let chi_f = f1.apply_symbol(|xi, eta| {
                    c64(high_pass((xi * xi + eta * eta).sqrt()), 0.0)
                });
                back.coeffs
                    .iter()
                    .zip(chi_f.coeffs.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            };
            let r2 = {
                let back = apply_parabolic_reflected(spec, &v2, q);
                back.coeffs
                    .iter()
                    .zip(f2_reflected.coeffs.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            };
            (v1, v2, low_mass, r1, r2)
        }
    };

    // Interface correction: w restores g - B(v).
    let n = g[0].values.len();
    if v1.coeffs.nrows() != n {
        return Err(Error::shape(format!(
            "interior fields have {} tangential modes, jump data {}",
            v1.coeffs.nrows(),
            n
        )));
    }
    let rows1 = boundary_rows(Operator::Elliptic, m);
    let rows2 = boundary_rows(Operator::Parabolic, m);
    let mut g_corr = Vec::with_capacity(2 * m);
    for j in 0..2 * m {
        let (p1, s1) = rows1[j];
        let (p2, s2) = rows2[j];
        let t1 = v1.trace_dn_modes(p1);
        let t2 = v2.trace_dn_modes(p2);
        let mut modes = g[j].to_modes();
        for k in 0..n {
            modes[k] -= c64(s1, 0.0) * t1[k] + c64(s2, 0.0) * t2[k];
        }
        g_corr.push(BoundaryField::from_modes(g[j].period, &modes));
    }
    let homogeneous = solve_homogeneous(spec, &g_corr, q, policy)?;

    // Final interface residual of the corrected solution.
    let jump_residual = homogeneous.jump_residual(spec, &g_corr);
    let dropped_mean = homogeneous.dropped_mean;

    Ok(FullSolution {
        v1,
        v2_reflected: v2,
        homogeneous,
        report: SolveReport {
            jump_residual,
            interior_residual_elliptic: res1,
            interior_residual_parabolic: res2,
            low_frequency_mass: low_mass,
            dropped_mean,
        },
    })
}

/// A manufactured transmission problem with a known exact solution
/// `u = (restriction of U) + w`: band-limited whole-space parts plus a
/// genuinely decaying homogeneous component.
pub struct Manufactured {
    pub u1: WholeField,
    pub u2_reflected: WholeField,
    pub w: HomogeneousSolution,
    pub f1: WholeField,
    pub f2_reflected: WholeField,
    pub g: Vec<BoundaryField>,
    pub q: C64,
}

impl Manufactured {
    /// Exact elliptic-side value.
    pub fn eval_u1(&self, x: f64, y: f64) -> C64 {
        self.u1.eval(x, y) + self.w.side1.eval(x, y)
    }

    /// Exact parabolic-side value in reflected coordinates.
    pub fn eval_u2_reflected(&self, x: f64, y: f64) -> C64 {
        self.u2_reflected.eval(x, y) + self.w.side2_reflected.eval(x, y)
    }
}

/// Build a manufactured problem on an `n_tan x n_norm` torus of size
/// `period x [-x_max, x_max)`, band-limited to a quarter of the resolution,
/// with reproducible coefficients.
pub fn manufactured_problem(
    spec: &ProblemSpec,
    period: f64,
    x_max: f64,
    n_tan: usize,
    n_norm: usize,
    q: C64,
    seed: u64,
) -> Result<Manufactured> {
    ensure_planar(spec)?;
    let m = spec.m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tan_band = (n_tan / 4).max(1) - 1;
    let norm_band = (n_norm / 4).max(1) - 1;
    let band_limited = |rng: &mut ChaCha8Rng| {
        let mut f = WholeField {
            period,
            x_max,
            coeffs: ndarray::Array2::from_elem((n_tan, n_norm), C64::ZERO),
        };
        for j in 0..n_tan {
            let kk = if j <= n_tan / 2 { j } else { n_tan - j };
            for i in 0..n_norm {
                let ll = if i <= n_norm / 2 { i } else { n_norm - i };
                if kk <= tan_band && ll <= norm_band {
                    let damp = 1.0 / (1.0 + (kk * kk + ll * ll) as f64);
                    f.coeffs[(j, i)] = c64(
                        rng.random_range(-1.0..1.0) * damp,
                        rng.random_range(-1.0..1.0) * damp,
                    );
                }
            }
        }
        f
    };
    let u1 = band_limited(&mut rng);
    let u2_reflected = band_limited(&mut rng);

    // Mean-zero band-limited jump data for the homogeneous component.
    let mut g0 = Vec::with_capacity(2 * m);
    for _ in 0..2 * m {
        let mut modes = vec![C64::ZERO; n_tan];
        for (k, slot) in modes.iter_mut().enumerate() {
            let kk = if k <= n_tan / 2 { k } else { n_tan - k };
            if k != 0 && kk <= tan_band {
                let damp = 1.0 / (1.0 + (kk * kk) as f64);
                *slot = c64(
                    rng.random_range(-1.0..1.0) * damp,
                    rng.random_range(-1.0..1.0) * damp,
                );
            }
        }
        g0.push(BoundaryField::from_modes(period, &modes));
    }
    let w = solve_homogeneous(spec, &g0, q, ZeroModePolicy::Reject)?;

    // Data of the combined solution: right-hand sides from U alone (the
    // homogeneous part contributes nothing), jumps from both.
    let f1 = apply_elliptic(spec, &u1);
    let f2_reflected = apply_parabolic_reflected(spec, &u2_reflected, q);
    let rows1 = boundary_rows(Operator::Elliptic, m);
    let rows2 = boundary_rows(Operator::Parabolic, m);
    let mut g = Vec::with_capacity(2 * m);
    for j in 0..2 * m {
        let (p1, s1) = rows1[j];
        let (p2, s2) = rows2[j];
        let t1 = u1.trace_dn_modes(p1);
        let t2 = u2_reflected.trace_dn_modes(p2);
        let mut modes = g0[j].to_modes();
        for k in 0..n_tan {
            modes[k] += c64(s1, 0.0) * t1[k] + c64(s2, 0.0) * t2[k];
        }
        g.push(BoundaryField::from_modes(period, &modes));
    }

    Ok(Manufactured {
        u1,
        u2_reflected,
        w,
        f1,
        f2_reflected,
        g,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::grid::XnGrid;
    use crate::symbols;

    fn heat_spec() -> ProblemSpec {
        symbols::ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2)
    }

    #[test]
    fn smooth_step_levels_and_monotone() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        let mid = smooth_step(0.5);
        assert!((mid - 0.5).abs() < 1e-12, "symmetry at the midpoint");
        let mut prev = 0.0;
        for i in 0..=40 {
            let v = smooth_step(i as f64 / 40.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn extension_matches_decay() {
        let g = BoundaryField::from_fn(std::f64::consts::TAU, 16, |x| {
            (C64::I * c64(2.0 * x, 0.0)).exp()
        });
        let e = extend_boundary(&g, ExtensionDecay::WithParameter(3.0));
        // Mode 2 has |xi| = 2: value at (x, y) is e^{2ix} e^{-5y}.
        let v = e.eval(0.3, 0.7);
        let expect = (C64::I * c64(0.6, 0.0)).exp() * c64((-5.0f64 * 0.7).exp(), 0.0);
        assert!((v - expect).norm() < 1e-12);
    }

    #[test]
    fn homogeneous_solver_restores_jumps() {
        let spec = heat_spec();
        let q = c64(1.1, 0.4);
        let period = std::f64::consts::TAU;
        let n = 32;
        let g = vec![
            BoundaryField::from_fn(period, n, |x| {
                c64(x.sin() + 0.3 * (2.0 * x).cos(), 0.2 * x.cos())
            }),
            BoundaryField::from_fn(period, n, |x| {
                c64((3.0 * x).cos() + x.cos(), -0.1 * (2.0 * x).sin())
            }),
        ];
        // Both fields are mean-zero trigonometric polynomials.
        let sol = solve_homogeneous(&spec, &g, q, ZeroModePolicy::Reject).unwrap();
        assert!(sol.jump_residual(&spec, &g) < 1e-10);
        assert!(sol.interior_residual(&spec, &[0.2, 0.9, 2.5]) < 1e-10);
        // Physical decay away from the interface.
        let far = sol.side1.eval(1.0, 6.0).norm();
        let near = sol.side1.eval(1.0, 0.1).norm();
        assert!(far < 1e-2 * near.max(1e-30), "far {far} near {near}");
    }

    #[test]
    fn homogeneous_solver_zero_mode_policy() {
        let spec = heat_spec();
        let q = c64(1.0, 0.0);
        let period = 4.0;
        let n = 8;
        let g = vec![
            BoundaryField::from_fn(period, n, |_| C64::ONE),
            BoundaryField::zeros(period, n),
        ];
        let err = solve_homogeneous(&spec, &g, q, ZeroModePolicy::Reject);
        assert!(matches!(err, Err(Error::ZeroMode(_))));
        let sol = solve_homogeneous(&spec, &g, q, ZeroModePolicy::Drop).unwrap();
        assert!((sol.dropped_mean - 1.0).abs() < 1e-12);
        assert!(sol.jump_residual(&spec, &g) < 1e-12);
    }

    #[test]
    fn volevich_route_matches_direct_solution() {
        // One mode of the heat pair: the direct fundamental-solution value
        // against the layer-potential form driven by the extended datum,
        // u(x) = -int_0^infty d/dy [omega(x+y) g_tilde(y)] dy.
        let spec = heat_spec();
        let cov = Covariable::new(&spec, vec![1.0], c64(1.0, 0.0)).unwrap();
        let g = [C64::ONE, C64::ZERO];
        let direct = solve_ode_transmission(&spec, &cov, &g).unwrap();
        // Extended datum with parameter decay.
        let d = cov.xi_norm() + cov.q.norm();
        let g_ext = ExponentialSolution::monomial(c64(0.0, d), 0);
        // d/dy acting on exact exponentials: i D_n.
        let kernel = direct.side1.clone();
        let kernel_dy = kernel.dn().scale(C64::I);
        let g_ext_dy = g_ext.dn().scale(C64::I);
        let count = 32768;
        let y_max = 40.0;
        let (nodes, weights) = crate::halfspace::hilbert::trapezoid_rule(0.0, y_max, count);
        let xs = [0.0, 0.15, 0.6, 1.3, 2.4];
        let phi_g: Vec<C64> = nodes.iter().map(|&y| g_ext.eval(y)).collect();
        let phi_dg: Vec<C64> = nodes.iter().map(|&y| g_ext_dy.eval(y)).collect();
        let t1 = volevich_apply(&kernel_dy, &nodes, &weights, &phi_g, &xs);
        let t2 = volevich_apply(&kernel, &nodes, &weights, &phi_dg, &xs);
        for (i, &x) in xs.iter().enumerate() {
            let via_layers = -(t1[i] + t2[i]);
            let expect = direct.side1.eval(x);
            assert!(
                (via_layers - expect).norm() < 1e-6,
                "x = {x}: {via_layers} vs {expect}"
            );
        }
    }

    #[test]
    fn resolvent_inverts_parabolic_operator() {
        let spec = heat_spec();
        let q = c64(0.8, 0.3);
        let u = WholeField::from_fn(4.0, 3.0, 8, 16, |x, y| {
            c64(
                (std::f64::consts::TAU * x / 4.0).cos(),
                (std::f64::consts::TAU * y / 6.0).sin(),
            )
        });
        let f = apply_parabolic_reflected(&spec, &u, q);
        let back = resolvent_parabolic_reflected(&spec, &f, q).unwrap();
        let worst = back
            .coeffs
            .iter()
            .zip(u.coeffs.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
        assert!(matches!(
            resolvent_parabolic_reflected(&spec, &f, C64::ZERO),
            Err(Error::ZeroMode(_))
        ));
    }

    #[test]
    fn known_extension_solve_recovers_manufactured_solution() {
        let spec = heat_spec();
        let q = c64(1.3, 0.5);
        let man = manufactured_problem(&spec, std::f64::consts::TAU, 4.0, 16, 32, q, 7).unwrap();
        let full = solve_full(
            &spec,
            InteriorData::KnownExtension {
                u1: &man.u1,
                u2_reflected: &man.u2_reflected,
            },
            &man.g,
            q,
            ZeroModePolicy::Reject,
        )
        .unwrap();
        assert!(full.report.jump_residual < 1e-9, "{:?}", full.report);
        assert!(full.report.interior_residual_elliptic < 1e-10);
        assert!(full.report.interior_residual_parabolic < 1e-10);
        assert_eq!(full.report.low_frequency_mass, 0.0);
        // Pointwise recovery on a sample set (interface, interior, deep).
        let mut worst = 0.0f64;
        for &x in &[0.0, 0.7, 2.1, 4.4] {
            for &y in &[0.0, 0.05, 0.6, 1.8, 3.4] {
                worst = worst.max((full.eval_u1(x, y) - man.eval_u1(x, y)).norm());
                worst = worst
                    .max((full.eval_u2_reflected(x, y) - man.eval_u2_reflected(x, y)).norm());
            }
        }
        assert!(worst < 1e-9, "recovery error {worst:.3e}");
    }

    #[test]
    fn blind_solve_reports_low_frequency_mass() {
        let spec = heat_spec();
        let q = c64(1.0, 0.2);
        let man = manufactured_problem(&spec, std::f64::consts::TAU, 4.0, 16, 32, q, 11).unwrap();
        let full = solve_full(
            &spec,
            InteriorData::Blind {
                f1: &man.f1,
                f2_reflected: &man.f2_reflected,
            },
            &man.g,
            q,
            ZeroModePolicy::Drop,
        )
        .unwrap();
        // The parabolic side is exact even blind; the elliptic side leaves
        // honest low-frequency mass behind.
        assert!(full.report.interior_residual_parabolic < 1e-10);
        assert!(full.report.interior_residual_elliptic < 1e-10);
        assert!(full.report.low_frequency_mass > 1e-3);
        assert!(full.report.jump_residual < 1e-9);
    }

    fn random_banded_whole(x_max: f64, n_tan: usize, n_norm: usize, seed: u64) -> WholeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = ndarray::Array2::from_elem((n_tan, n_norm), C64::ZERO);
        for sk in -4i64..=4 {
            let j = if sk >= 0 { sk as usize } else { (n_tan as i64 + sk) as usize };
            for sl in -4i64..=4 {
                let i = if sl >= 0 { sl as usize } else { (n_norm as i64 + sl) as usize };
                let damp = 1.0 / (1.0 + (sk * sk + sl * sl) as f64);
                coeffs[(j, i)] = c64(
                    rng.random_range(-1.0..1.0) * damp,
                    rng.random_range(-1.0..1.0) * damp,
                );
            }
        }
        WholeField {
            period: std::f64::consts::TAU,
            x_max,
            coeffs,
        }
    }

    #[test]
    fn resolvent_parameter_norm_bounded_by_data() {
        // ⟦v₂⟧_{2m} ≤ C ‖f₂‖_0 with C uniform along the parameter sweep.
        use crate::norms::{param_norm, seminorm, FieldOnGrid};
        let spec = heat_spec();
        let grid = GridSpec::new(
            std::f64::consts::TAU,
            16,
            XnGrid::graded(96, 8.0, 3.0),
        )
        .unwrap();
        let f2 = random_banded_whole(8.0, 16, 32, 21);
        let ff = FieldOnGrid::from_whole_field(&grid, &f2);
        let data = seminorm(&ff, 0, 2.0);
        let mut ratios = Vec::new();
        for q_abs in [1.0, 3.16, 10.0, 31.6, 100.0] {
            let q = c64(q_abs * 0.25f64.cos(), q_abs * 0.25f64.sin());
            let v = resolvent_parabolic_reflected(&spec, &f2, q).unwrap();
            let fv = FieldOnGrid::from_whole_field(&grid, &v);
            ratios.push(param_norm(&fv, 2, 2.0, q_abs) / data);
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max.is_finite() && max <= 10.0, "constant {max}");
        assert!(max / min <= 4.0, "sweep band {}", max / min);
    }

    #[test]
    fn parametrix_norm_bounded_by_solution_and_data() {
        // ‖v₁‖_{2m} ≤ C (‖u₁‖_0 + ‖f₁‖_0) on random band-limited inputs.
        use crate::norms::{seminorm, sobolev_norm, FieldOnGrid};
        let spec = heat_spec();
        let grid = GridSpec::new(
            std::f64::consts::TAU,
            16,
            XnGrid::graded(96, 8.0, 3.0),
        )
        .unwrap();
        for seed in [1u64, 2, 3, 4, 5] {
            let u1 = random_banded_whole(8.0, 16, 32, seed);
            let f1 = apply_elliptic(&spec, &u1);
            let low = low_pass_part(&u1);
            let high = parametrix_elliptic(&spec, &f1);
            let v1 = WholeField {
                period: u1.period,
                x_max: u1.x_max,
                coeffs: &low.coeffs + &high.coeffs,
            };
            let fv = FieldOnGrid::from_whole_field(&grid, &v1);
            let fu = FieldOnGrid::from_whole_field(&grid, &u1);
            let ff = FieldOnGrid::from_whole_field(&grid, &f1);
            let lhs = sobolev_norm(&fv, 2, 2.0);
            let rhs = seminorm(&fu, 0, 2.0) + seminorm(&ff, 0, 2.0);
            assert!(lhs <= 10.0 * rhs, "seed {seed}: {lhs} vs {rhs}");
        }
    }
}
