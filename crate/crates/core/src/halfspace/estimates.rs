//! Parameter sweeps measuring the a priori inequality constants.
//!
//! The solution of the transmission problem obeys two complementary
//! estimates with a characteristic asymmetry: the elliptic side is
//! controlled in plain Sobolev norms, the parabolic side in
//! parameter-weighted ones, and each inequality gives up something on the
//! opposite side (order `m` instead of `2m` for `u_2` in the plain form,
//! a `|q|^m` weight for `u_1` in the weighted form).  The sweeps here
//! evaluate every term of those inequalities on concrete solutions over a
//! geometric grid of parameter moduli and report the left/right ratio per
//! point.  A bounded, flat ratio over the upper half of the sweep is the
//! operational meaning of "the constant is uniform in the parameter";
//! a companion quantity strengthens the controlled norm of `u_2` to full
//! order `2m` without parameter weighting and demonstrates that its ratio
//! grows without bound — the asymmetry is genuine, not an artifact.
//!
//! Two drivers:
//!
//! * [`homogeneous_sweep`] — zero right-hand sides, jump data only.  The
//!   data norms are Sobolev norms of half-space extensions of the jumps:
//!   plain extensions (`e^{-|ξ'| x_n}`) for the plain inequality,
//!   parameter-weighted extensions (`e^{-(|ξ'|+|q|) x_n}`) for the
//!   weighted one.
//! * [`full_problem_sweep`] — fixed interior data and jumps.  The
//!   parabolic particular solution is produced by the exact torus
//!   resolvent, so the swept family consists of true solutions to a fixed
//!   data set, and the data norms use interface trace norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfspace::grid::{BoundaryField, GridSpec, WholeField};
use crate::halfspace::solve::{
    apply_elliptic, extend_boundary, resolvent_parabolic_reflected, solve_homogeneous,
    ExtensionDecay, ZeroModePolicy,
};
use crate::norms::{
    param_norm, seminorm, sobolev_norm, trace_norm_l2, trace_norm_lp, trace_param_norm_l2,
    trace_param_norm_lp, FieldOnGrid,
};
use crate::ode::boundary_rows;
use crate::symbols::{Operator, ProblemSpec};
use crate::{c64, C64, Result};

/// Dyadic-type modulus grid `base · step^i`, `i = 0..count`.
pub fn geometric_grid(base: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| base * step.powi(i as i32)).collect()
}

/// Geometric grid from `lo` to `hi` inclusive with `count` points.
pub fn geometric_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let step = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| lo * step.powi(i as i32)).collect()
}

/// `max / min` of a ratio sequence over the upper half of the sweep.
fn plateau(ratios: impl Iterator<Item = f64> + Clone) -> f64 {
    let all: Vec<f64> = ratios.collect();
    let upper = &all[all.len() / 2..];
    let max = upper.iter().cloned().fold(f64::MIN, f64::max);
    let min = upper.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

/// One parameter value of the homogeneous-problem sweep.
#[derive(Debug, Clone)]
pub struct HomogeneousPoint {
    pub q_abs: f64,
    /// `|u_1|_{2m} + |u_2|_m + |q|^m ‖u_2‖_0`.
    pub lhs_plain: f64,
    /// `Σ_j ‖E_1 g_j‖_{2m-j+1}`.
    pub rhs_plain: f64,
    /// `|u_1|_{2m} + |q|^m |u_1|_m + ⟦u_2⟧_{2m}`.
    pub lhs_param: f64,
    /// `Σ_j ⟦E_q g_j⟧_{2m-j+1}`.
    pub rhs_param: f64,
    /// Strengthened quantity `‖u_2‖_{2m}` (full order on the parabolic
    /// side, no parameter weighting).
    pub lhs_strength: f64,
}

impl HomogeneousPoint {
    pub fn ratio_plain(&self) -> f64 {
        self.lhs_plain / self.rhs_plain
    }

    pub fn ratio_param(&self) -> f64 {
        self.lhs_param / self.rhs_param
    }

    /// Ratio of the strengthened left-hand side against the plain data
    /// norm — bounded only if the elliptic-side loss were avoidable.
    pub fn ratio_strength(&self) -> f64 {
        self.lhs_strength / self.rhs_plain
    }
}

/// Homogeneous-problem sweep results.
#[derive(Debug, Clone)]
pub struct HomogeneousSweep {
    pub points: Vec<HomogeneousPoint>,
}

impl HomogeneousSweep {
    pub fn plateau_plain(&self) -> f64 {
        plateau(self.points.iter().map(HomogeneousPoint::ratio_plain))
    }

    pub fn plateau_param(&self) -> f64 {
        plateau(self.points.iter().map(HomogeneousPoint::ratio_param))
    }

    pub fn max_ratio(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.ratio_plain().max(p.ratio_param()))
            .fold(0.0, f64::max)
    }

    /// Growth of the strengthened ratio across the sweep.
    pub fn strength_growth(&self) -> f64 {
        let first = self.points.first().map(HomogeneousPoint::ratio_strength);
        let last = self.points.last().map(HomogeneousPoint::ratio_strength);
        match (first, last) {
            (Some(a), Some(b)) => b / a,
            _ => 1.0,
        }
    }

    /// True if the strengthened ratio increases monotonically.
    pub fn strength_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].ratio_strength() >= w[0].ratio_strength() * 0.999)
    }
}

/// Reproducible mean-zero jump data, band-limited to `|k| <= band` with
/// coefficients independent of the resolution (so refining the tangential
/// grid represents the same function).
pub fn probe_jump_data(
    spec: &ProblemSpec,
    period: f64,
    n_tan: usize,
    band: usize,
    seed: u64,
) -> Vec<BoundaryField> {
    assert!(band < n_tan / 2, "band must fit the resolution");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2 * spec.m)
        .map(|_| {
            let mut modes = vec![C64::ZERO; n_tan];
            for kk in 1..=band {
                let damp = 1.0 / (1.0 + (kk * kk) as f64);
                modes[kk] = c64(
                    rng.random_range(-1.0..1.0) * damp,
                    rng.random_range(-1.0..1.0) * damp,
                );
                modes[n_tan - kk] = c64(
                    rng.random_range(-1.0..1.0) * damp,
                    rng.random_range(-1.0..1.0) * damp,
                );
            }
            BoundaryField::from_modes(period, &modes)
        })
        .collect()
}

/// Sweep the homogeneous problem over `|q| ∈ q_values` along the sector
/// ray `arg q = q_arg`, with fixed jump data `g`.
pub fn homogeneous_sweep(
    spec: &ProblemSpec,
    grid: &GridSpec,
    g: &[BoundaryField],
    q_arg: f64,
    q_values: &[f64],
    p: f64,
) -> Result<HomogeneousSweep> {
    let m = spec.m;
    let qm = |q_abs: f64| q_abs.powi(m as i32);
    let mut points = Vec::with_capacity(q_values.len());
    for &q_abs in q_values {
        let q = c64(q_abs * q_arg.cos(), q_abs * q_arg.sin());
        let u = solve_homogeneous(spec, g, q, ZeroModePolicy::Reject)?;
        let u1 = FieldOnGrid::from_mode_field(grid, &u.side1);
        let u2 = FieldOnGrid::from_mode_field(grid, &u.side2_reflected);

        let u1_top = seminorm(&u1, 2 * m, p);
        let lhs_plain = u1_top + seminorm(&u2, m, p) + qm(q_abs) * seminorm(&u2, 0, p);
        let lhs_param = u1_top + qm(q_abs) * seminorm(&u1, m, p) + param_norm(&u2, 2 * m, p, q_abs);
        let lhs_strength = sobolev_norm(&u2, 2 * m, p);

        let mut rhs_plain = 0.0;
        let mut rhs_param = 0.0;
        for (j, gj) in g.iter().enumerate() {
            let order = 2 * m - j; // interior order 2m - (j+1) + 1
            let plain_ext = extend_boundary(gj, ExtensionDecay::Plain);
            let weighted_ext = extend_boundary(gj, ExtensionDecay::WithParameter(q_abs));
            let fp = FieldOnGrid::from_mode_field(grid, &plain_ext);
            let fw = FieldOnGrid::from_mode_field(grid, &weighted_ext);
            rhs_plain += sobolev_norm(&fp, order, p);
            rhs_param += param_norm(&fw, order, p, q_abs);
        }
        points.push(HomogeneousPoint {
            q_abs,
            lhs_plain,
            rhs_plain,
            lhs_param,
            rhs_param,
            lhs_strength,
        });
    }
    Ok(HomogeneousSweep { points })
}

/// One parameter value of the full-problem sweep.
#[derive(Debug, Clone)]
pub struct FullPoint {
    pub q_abs: f64,
    /// `‖u_1‖_{2m} + ‖u_2‖_m + |q|^m ‖u_2‖_0`.
    pub lhs_plain: f64,
    /// `‖f_1‖_0 + ‖f_2‖_0 + Σ_j ‖g_j‖_{s_j} + ‖u_1‖_0`.
    pub rhs_plain: f64,
    /// `‖u_1‖_{2m} + |q|^m ‖u_1‖_m + ⟦u_2⟧_{2m}`.
    pub lhs_param: f64,
    /// `|q|^m ‖f_1‖_0 + ‖f_2‖_0 + Σ_j ⟦g_j⟧_{s_j} + |q|^m ‖u_1‖_0`.
    pub rhs_param: f64,
}

impl FullPoint {
    pub fn ratio_plain(&self) -> f64 {
        self.lhs_plain / self.rhs_plain
    }

    pub fn ratio_param(&self) -> f64 {
        self.lhs_param / self.rhs_param
    }
}

/// Full-problem sweep results.
#[derive(Debug, Clone)]
pub struct FullSweep {
    pub points: Vec<FullPoint>,
}

impl FullSweep {
    pub fn plateau_plain(&self) -> f64 {
        plateau(self.points.iter().map(FullPoint::ratio_plain))
    }

    pub fn plateau_param(&self) -> f64 {
        plateau(self.points.iter().map(FullPoint::ratio_param))
    }

    pub fn max_ratio(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.ratio_plain().max(p.ratio_param()))
            .fold(0.0, f64::max)
    }
}

/// Reproducible band-limited whole-space field with no tangential zero
/// mode; coefficients are independent of the resolution.
fn banded_whole_field(
    period: f64,
    x_max: f64,
    n_tan: usize,
    n_norm: usize,
    tan_band: usize,
    norm_band: usize,
    rng: &mut ChaCha8Rng,
) -> WholeField {
    assert!(tan_band < n_tan / 2 && norm_band < n_norm / 2);
    let mut coeffs = ndarray::Array2::from_elem((n_tan, n_norm), C64::ZERO);
    for sk in -(tan_band as i64)..=tan_band as i64 {
        if sk == 0 {
            continue;
        }
        let j = if sk >= 0 { sk as usize } else { (n_tan as i64 + sk) as usize };
        for sl in -(norm_band as i64)..=norm_band as i64 {
            let i = if sl >= 0 {
                sl as usize
            } else {
                (n_norm as i64 + sl) as usize
            };
            let damp = 1.0 / (1.0 + (sk * sk + sl * sl) as f64);
            coeffs[(j, i)] = c64(
                rng.random_range(-1.0..1.0) * damp,
                rng.random_range(-1.0..1.0) * damp,
            );
        }
    }
    WholeField {
        period,
        x_max,
        coeffs,
    }
}

/// Sweep true solutions of a fixed data set `(f_1, f_2, g)` over
/// `|q| ∈ q_values` along the ray `arg q = q_arg`.
///
/// Construction per parameter: `u_2` particular part by the exact torus
/// resolvent of the fixed `f_2`; elliptic particular part from a fixed
/// band-limited `U_1` (so `f_1 = A_1 U_1` is fixed); homogeneous
/// correction restores the fixed jumps `g`.
pub fn full_problem_sweep(
    spec: &ProblemSpec,
    grid: &GridSpec,
    n_norm: usize,
    q_arg: f64,
    q_values: &[f64],
    p: f64,
    seed: u64,
) -> Result<FullSweep> {
    let m = spec.m;
    let qm = |q_abs: f64| q_abs.powi(m as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tan_band = (grid.n_tan / 8).min(4).max(2);
    let norm_band = (n_norm / 8).min(4).max(2);
    let u1_whole = banded_whole_field(
        grid.period,
        grid.xn.x_max,
        grid.n_tan,
        n_norm,
        tan_band,
        norm_band,
        &mut rng,
    );
    let f2 = banded_whole_field(
        grid.period,
        grid.xn.x_max,
        grid.n_tan,
        n_norm,
        tan_band,
        norm_band,
        &mut rng,
    );
    let g = probe_jump_data(spec, grid.period, grid.n_tan, tan_band, seed ^ 0x9E37);
    let f1 = apply_elliptic(spec, &u1_whole);

    let rows1 = boundary_rows(Operator::Elliptic, m);
    let rows2 = boundary_rows(Operator::Parabolic, m);

    let mut points = Vec::with_capacity(q_values.len());
    for &q_abs in q_values {
        let q = c64(q_abs * q_arg.cos(), q_abs * q_arg.sin());
        let u2_part = resolvent_parabolic_reflected(spec, &f2, q)?;

        // Jump correction toward the fixed interface data.
        let mut g_corr = Vec::with_capacity(2 * m);
        for j in 0..2 * m {
            let (p1, s1) = rows1[j];
            let (p2, s2) = rows2[j];
            let t1 = u1_whole.trace_dn_modes(p1);
            let t2 = u2_part.trace_dn_modes(p2);
            let mut modes = g[j].to_modes();
            for k in 0..grid.n_tan {
                modes[k] -= c64(s1, 0.0) * t1[k] + c64(s2, 0.0) * t2[k];
            }
            g_corr.push(BoundaryField::from_modes(grid.period, &modes));
        }
        let w = solve_homogeneous(spec, &g_corr, q, ZeroModePolicy::Reject)?;

        let u1 = FieldOnGrid::from_whole_field(grid, &u1_whole)
            .add(FieldOnGrid::from_mode_field(grid, &w.side1));
        let u2 = FieldOnGrid::from_whole_field(grid, &u2_part)
            .add(FieldOnGrid::from_mode_field(grid, &w.side2_reflected));

        let u1_full = sobolev_norm(&u1, 2 * m, p);
        let u1_zero = seminorm(&u1, 0, p);
        let lhs_plain = u1_full + sobolev_norm(&u2, m, p) + qm(q_abs) * seminorm(&u2, 0, p);
        let lhs_param = u1_full + qm(q_abs) * sobolev_norm(&u1, m, p) + param_norm(&u2, 2 * m, p, q_abs);

        let ff1 = FieldOnGrid::from_whole_field(grid, &f1);
        let ff2 = FieldOnGrid::from_whole_field(grid, &f2);
        let f1_norm = seminorm(&ff1, 0, p);
        let f2_norm = seminorm(&ff2, 0, p);
        let mut g_plain = 0.0;
        let mut g_param = 0.0;
        for (j, gj) in g.iter().enumerate() {
            let s = 2.0 * m as f64 - (j + 1) as f64 + 1.0 - 1.0 / p;
            if (p - 2.0).abs() < 1e-12 {
                g_plain += trace_norm_l2(gj, s);
                g_param += trace_param_norm_l2(gj, s, q_abs);
            } else {
                g_plain += trace_norm_lp(gj, s, p);
                g_param += trace_param_norm_lp(gj, s, p, q_abs);
            }
        }
        let rhs_plain = f1_norm + f2_norm + g_plain + u1_zero;
        let rhs_param = qm(q_abs) * f1_norm + f2_norm + g_param + qm(q_abs) * u1_zero;

        points.push(FullPoint {
            q_abs,
            lhs_plain,
            rhs_plain,
            lhs_param,
            rhs_param,
        });
    }
    Ok(FullSweep { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::grid::XnGrid;

    fn sweep_grid(n_tan: usize) -> GridSpec {
        GridSpec::new(
            std::f64::consts::TAU,
            n_tan,
            XnGrid::graded(96, 8.0, 3.0),
        )
        .unwrap()
    }

    #[test]
    fn heat_homogeneous_sweep_plateaus() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let grid = sweep_grid(32);
        let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 3);
        let qs = geometric_range(1.0, 100.0, 13);
        let sweep = homogeneous_sweep(&spec, &grid, &g, 0.3, &qs, 2.0).unwrap();
        for pt in &sweep.points {
            assert!(pt.lhs_plain.is_finite() && pt.rhs_plain > 0.0);
            assert!(pt.lhs_param.is_finite() && pt.rhs_param > 0.0);
        }
        let pp = sweep.plateau_plain();
        let pq = sweep.plateau_param();
        assert!(pp < 4.0, "plain plateau {pp}");
        assert!(pq < 4.0, "weighted plateau {pq}");
    }

    #[test]
    fn heat_strengthened_ratio_grows() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        // Denser graded grid: the boundary layer thins like `1/|q|`.
        let grid = GridSpec::new(
            std::f64::consts::TAU,
            32,
            XnGrid::graded(144, 8.0, 3.5),
        )
        .unwrap();
        let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 3);
        let qs = geometric_grid(8.0, 2.0, 9); // 8 .. 2048
        let sweep = homogeneous_sweep(&spec, &grid, &g, 0.3, &qs, 2.0).unwrap();
        assert!(sweep.strength_monotone(), "strengthened ratio not monotone");
        let growth = sweep.strength_growth();
        assert!(growth >= 10.0, "strengthened growth {growth}");
    }

    #[test]
    fn heat_full_sweep_plateaus() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let grid = sweep_grid(16);
        let qs = geometric_range(1.0, 100.0, 9);
        let sweep = full_problem_sweep(&spec, &grid, 32, 0.25, &qs, 2.0, 5).unwrap();
        for pt in &sweep.points {
            assert!(pt.lhs_plain.is_finite() && pt.rhs_plain > 0.0);
        }
        let pp = sweep.plateau_plain();
        let pq = sweep.plateau_param();
        assert!(pp < 4.0, "plain plateau {pp}");
        assert!(pq < 4.0, "weighted plateau {pq}");
    }

    #[test]
    fn extension_norm_uniform_in_parameter() {
        // ⟦E_q g⟧_k / ⟦g⟧_{k - 1/2} stays within a factor-2 band across
        // the parameter sweep (p = 2).
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let grid = sweep_grid(32);
        let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 9);
        let m = spec.m;
        for (j, gj) in g.iter().enumerate() {
            let k = 2 * m - j;
            let mut ratios = Vec::new();
            for q in geometric_range(1.0, 100.0, 9) {
                let ext = extend_boundary(gj, ExtensionDecay::WithParameter(q));
                let f = FieldOnGrid::from_mode_field(&grid, &ext);
                let lhs = param_norm(&f, k, 2.0, q);
                let rhs = trace_param_norm_l2(gj, k as f64 - 0.5, q);
                ratios.push(lhs / rhs);
            }
            let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
            assert!(max / min <= 2.0, "row {j}: band {}", max / min);
        }
    }

    #[test]
    fn interpolation_bound_along_sweep() {
        // ‖g̃‖_k + |q|^m ‖g̃‖_{k-m} ≤ C ⟦g̃⟧_k for the extension g̃ = E_q g,
        // with C uniform across the sweep.
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let grid = sweep_grid(32);
        let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 9);
        let m = spec.m;
        for (j, gj) in g.iter().enumerate() {
            let k = 2 * m - j;
            for q in geometric_range(1.0, 100.0, 9) {
                let ext = extend_boundary(gj, ExtensionDecay::WithParameter(q));
                let f = FieldOnGrid::from_mode_field(&grid, &ext);
                let lhs = sobolev_norm(&f, k, 2.0)
                    + q.powi(m as i32) * sobolev_norm(&f, k - m, 2.0);
                let rhs = param_norm(&f, k, 2.0, q);
                assert!(lhs <= 4.0 * rhs, "row {j} q {q}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn tangential_refinement_leaves_ratios_unchanged() {
        let spec = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let qs = geometric_range(1.0, 100.0, 5);
        let coarse = {
            let grid = sweep_grid(16);
            let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 3);
            homogeneous_sweep(&spec, &grid, &g, 0.3, &qs, 2.0).unwrap()
        };
        let fine = {
            let grid = sweep_grid(32);
            let g = probe_jump_data(&spec, grid.period, grid.n_tan, 4, 3);
            homogeneous_sweep(&spec, &grid, &g, 0.3, &qs, 2.0).unwrap()
        };
        let rel = (coarse.max_ratio() - fine.max_ratio()).abs() / fine.max_ratio();
        assert!(rel < 0.10, "max ratio moved by {rel:.3}");
    }
}
