//! Discretized half-space geometry and field representations.
//!
//! Desk-scale discretization for two space dimensions: the tangential
//! variable lives on a torus of period `L` sampled at `N` uniform points
//! (spectral differentiation, FFT), the normal variable on a node set in
//! `(0, X]` with quadrature weights (uniform or power-graded toward the
//! interface).  Four field types cover the pipeline:
//!
//! * [`GridField`] — raw samples on the tangential × normal grid;
//! * [`ModeField`] — one exact exponential-sum profile per tangential mode
//!   (the output representation of the homogeneous solver: derivatives and
//!   interface traces are exact);
//! * [`WholeField`] — 2-D spectral coefficients on the full torus
//!   `[0, L) × [-X, X)` (extensions and whole-space multiplier operators);
//! * [`BoundaryField`] — interface data on the tangential torus.
//!
//! FFT convention: `u(x_j) = Σ_k c_k e^{i 2π k j / N}` with `c = forward/N`,
//! frequencies `ξ_k = 2π k̃ / L` over signed indices `k̃`.

use ndarray::Array2;
use rustfft::FftPlanner;

use crate::ode::ExponentialSolution;
use crate::{c64, C64, Error, Result};

/// Normal-direction node set in `(0, X]` with quadrature weights.
///
/// The weights implement the composite trapezoid rule between nodes plus a
/// rectangle on the first strip `[0, x_1]` (field values at the interface
/// itself are handled separately, via exact traces), so they sum to `X`.
#[derive(Debug, Clone)]
pub struct XnGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub x_max: f64,
}

impl XnGrid {
    fn from_nodes(nodes: Vec<f64>) -> Self {
        let k = nodes.len();
        assert!(k >= 2, "need at least two normal nodes");
        let x_max = nodes[k - 1];
        let mut weights = vec![0.0; k];
        weights[0] = nodes[0] + (nodes[1] - nodes[0]) / 2.0;
        for i in 1..k - 1 {
            weights[i] = (nodes[i + 1] - nodes[i - 1]) / 2.0;
        }
        weights[k - 1] = (nodes[k - 1] - nodes[k - 2]) / 2.0;
        XnGrid {
            nodes,
            weights,
            x_max,
        }
    }

    /// Uniform nodes `x_i = i X / K`, `i = 1..K`.
    pub fn uniform(count: usize, x_max: f64) -> Self {
        assert!(x_max > 0.0);
        Self::from_nodes(
            (1..=count)
                .map(|i| x_max * i as f64 / count as f64)
                .collect(),
        )
    }

    /// Power-graded nodes `x_i = X (i/K)^g` clustering toward the interface
    /// (`g = 1` is uniform; `g ≈ 2..3` resolves boundary layers).
    pub fn graded(count: usize, x_max: f64, grading: f64) -> Self {
        assert!(x_max > 0.0 && grading >= 1.0);
        Self::from_nodes(
            (1..=count)
                .map(|i| x_max * (i as f64 / count as f64).powf(grading))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature `∫_0^X f ≈ Σ w_i f(x_i)`.
    pub fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// Tangential torus × normal node set.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Tangential period `L`.
    pub period: f64,
    /// Tangential sample count `N` (even).
    pub n_tan: usize,
    pub xn: XnGrid,
}

impl GridSpec {
    pub fn new(period: f64, n_tan: usize, xn: XnGrid) -> Result<Self> {
        if period <= 0.0 {
            return Err(Error::invalid_spec("tangential period must be positive"));
        }
        if n_tan < 2 || n_tan % 2 != 0 {
            return Err(Error::invalid_spec(format!(
                "tangential sample count must be even and ≥ 2, got {n_tan}"
            )));
        }
        Ok(GridSpec { period, n_tan, xn })
    }

    /// Tangential sample points `x_j = j L / N`.
    pub fn tan_nodes(&self) -> Vec<f64> {
        (0..self.n_tan)
            .map(|j| self.period * j as f64 / self.n_tan as f64)
            .collect()
    }

    /// Signed frequency index of slot `k` (`0..N ↦ 0, 1, .., N/2, -N/2+1, .., -1`).
    pub fn freq_index(&self, k: usize) -> i64 {
        if k <= self.n_tan / 2 {
            k as i64
        } else {
            k as i64 - self.n_tan as i64
        }
    }

    /// Tangential frequencies `ξ_k = 2π k̃ / L` per slot.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_tan)
            .map(|k| std::f64::consts::TAU * self.freq_index(k) as f64 / self.period)
            .collect()
    }
}

/// In-place normalized forward FFT: samples → coefficients (`c = forward/N`).
pub fn fft_forward(data: &mut [C64]) {
    let n = data.len();
    FftPlanner::new().plan_fft_forward(n).process(data);
    let s = c64(1.0 / n as f64, 0.0);
    for v in data.iter_mut() {
        *v *= s;
    }
}

/// In-place inverse FFT: coefficients → samples.
pub fn fft_inverse(data: &mut [C64]) {
    let n = data.len();
    FftPlanner::new().plan_fft_inverse(n).process(data);
}

/// Interface data on the tangential torus (sample space).
#[derive(Debug, Clone)]
pub struct BoundaryField {
    pub period: f64,
    pub values: Vec<C64>,
}

impl BoundaryField {
    pub fn zeros(period: f64, n: usize) -> Self {
        BoundaryField {
            period,
            values: vec![C64::ZERO; n],
        }
    }

    pub fn from_fn(period: f64, n: usize, mut f: impl FnMut(f64) -> C64) -> Self {
        let values = (0..n)
            .map(|j| f(period * j as f64 / n as f64))
            .collect();
        BoundaryField { period, values }
    }

    /// Build from spectral coefficients (slot-indexed).
    pub fn from_modes(period: f64, modes: &[C64]) -> Self {
        let mut values = modes.to_vec();
        fft_inverse(&mut values);
        BoundaryField { period, values }
    }

    /// Spectral coefficients (slot-indexed).
    pub fn to_modes(&self) -> Vec<C64> {
        let mut modes = self.values.clone();
        fft_forward(&mut modes);
        modes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean value (zeroth coefficient).
    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / c64(self.values.len() as f64, 0.0)
    }

    /// Subtract the mean; returns the removed value.
    pub fn subtract_mean(&mut self) -> C64 {
        let m = self.mean();
        for v in &mut self.values {
            *v -= m;
        }
        m
    }

    /// Exact tangential derivative of order `a` (spectral).
    pub fn derivative(&self, a: usize) -> BoundaryField {
        let spec = GridSpec {
            period: self.period,
            n_tan: self.values.len(),
            xn: XnGrid::uniform(2, 1.0),
        };
        let freqs = spec.frequencies();
        let mut modes = self.to_modes();
        for (k, c) in modes.iter_mut().enumerate() {
            *c *= (C64::I * c64(freqs[k], 0.0)).powu(a as u32);
        }
        BoundaryField::from_modes(self.period, &modes)
    }

    /// `L^p` norm over the torus (rectangle rule — exact for trig
    /// polynomials at `p = 2`).
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h = self.period / self.values.len() as f64;
        (self
            .values
            .iter()
            .map(|v| v.norm().powf(p) * h)
            .sum::<f64>())
        .powf(1.0 / p)
    }
}

/// Raw samples on the half-space grid, indexed `(tangential, normal)`.
#[derive(Debug, Clone)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Array2<C64>,
}

impl GridField {
    pub fn zeros(spec: &GridSpec) -> Self {
        GridField {
            spec: spec.clone(),
            values: Array2::from_elem((spec.n_tan, spec.xn.len()), C64::ZERO),
        }
    }

    pub fn from_fn(spec: &GridSpec, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let tans = spec.tan_nodes();
        let values = Array2::from_shape_fn((spec.n_tan, spec.xn.len()), |(j, i)| {
            f(tans[j], spec.xn.nodes[i])
        });
        GridField {
            spec: spec.clone(),
            values,
        }
    }

    /// Per-normal-node tangential spectral coefficients.
    pub fn to_modes(&self) -> Array2<C64> {
        let mut out = self.values.clone();
        for i in 0..self.spec.xn.len() {
            let mut col: Vec<C64> = (0..self.spec.n_tan).map(|j| out[(j, i)]).collect();
            fft_forward(&mut col);
            for (j, v) in col.into_iter().enumerate() {
                out[(j, i)] = v;
            }
        }
        out
    }

    /// `L^p` norm over the half-space slab (tangential rectangle ×
    /// normal quadrature weights).
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h = self.spec.period / self.spec.n_tan as f64;
        let mut acc = 0.0;
        for j in 0..self.spec.n_tan {
            for i in 0..self.spec.xn.len() {
                acc += h * self.spec.xn.weights[i] * self.values[(j, i)].norm().powf(p);
            }
        }
        acc.powf(1.0 / p)
    }

    /// Max-norm over samples.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// One exact exponential-sum profile per tangential mode slot.
#[derive(Debug, Clone)]
pub struct ModeField {
    pub period: f64,
    pub profiles: Vec<ExponentialSolution>,
}

impl ModeField {
    pub fn zeros(period: f64, n_tan: usize) -> Self {
        ModeField {
            period,
            profiles: vec![ExponentialSolution::zero(); n_tan],
        }
    }

    pub fn n_tan(&self) -> usize {
        self.profiles.len()
    }

    /// Exact mixed derivative `∂_tan^a ∂_n^b u` sampled on a grid.
    /// (`∂`, not `D = -i∂`: magnitudes agree, signs stay intuitive.)
    pub fn sample_derivative(&self, grid: &GridSpec, a: usize, b: usize) -> Array2<C64> {
        assert_eq!(grid.n_tan, self.profiles.len(), "mode count mismatch");
        let freqs = grid.frequencies();
        let k_n = grid.xn.len();
        // ∂_n^b = i^b D^b on the exact profiles.
        let ib = C64::I.powu(b as u32);
        let mut mode_vals = Array2::from_elem((grid.n_tan, k_n), C64::ZERO);
        for (k, profile) in self.profiles.iter().enumerate() {
            let d = profile.dn_k(b);
            let tan_factor = (C64::I * c64(freqs[k], 0.0)).powu(a as u32) * ib;
            for (i, &x) in grid.xn.nodes.iter().enumerate() {
                mode_vals[(k, i)] = tan_factor * d.eval(x);
            }
        }
        // Inverse FFT along the tangential axis → sample space.
        let mut out = mode_vals;
        for i in 0..k_n {
            let mut col: Vec<C64> = (0..grid.n_tan).map(|k| out[(k, i)]).collect();
            fft_inverse(&mut col);
            for (k, v) in col.into_iter().enumerate() {
                out[(k, i)] = v;
            }
        }
        out
    }

    /// Restrict to plain samples.
    pub fn restrict(&self, grid: &GridSpec) -> GridField {
        GridField {
            spec: grid.clone(),
            values: self.sample_derivative(grid, 0, 0),
        }
    }

    /// Exact interface trace of `D_n^p u` in mode space (slot-indexed).
    pub fn trace_dn_modes(&self, p: usize) -> Vec<C64> {
        self.profiles.iter().map(|pr| pr.dn_trace(p)).collect()
    }

    /// Point evaluation `u(x, y)` by mode summation.
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        let n = self.profiles.len();
        let mut acc = C64::ZERO;
        for (k, profile) in self.profiles.iter().enumerate() {
            let kk = if k <= n / 2 {
                k as i64
            } else {
                k as i64 - n as i64
            };
            let xi = std::f64::consts::TAU * kk as f64 / self.period;
            acc += profile.eval(y) * (C64::I * c64(xi * x, 0.0)).exp();
        }
        acc
    }
}

/// 2-D spectral field on the full torus `[0, L) × [-X, X)`, coefficients
/// indexed `(tangential slot, normal slot)`.
#[derive(Debug, Clone)]
pub struct WholeField {
    pub period: f64,
    pub x_max: f64,
    pub coeffs: Array2<C64>,
}

impl WholeField {
    /// Normal frequencies `η_l = 2π l̃ / (2X)` per slot.
    pub fn normal_frequencies(&self) -> Vec<f64> {
        let m = self.coeffs.ncols();
        (0..m)
            .map(|l| {
                let ll = if l <= m / 2 {
                    l as i64
                } else {
                    l as i64 - m as i64
                };
                std::f64::consts::TAU * ll as f64 / (2.0 * self.x_max)
            })
            .collect()
    }

    /// Tangential frequencies per slot.
    pub fn tan_frequencies(&self) -> Vec<f64> {
        let n = self.coeffs.nrows();
        (0..n)
            .map(|k| {
                let kk = if k <= n / 2 {
                    k as i64
                } else {
                    k as i64 - n as i64
                };
                std::f64::consts::TAU * kk as f64 / self.period
            })
            .collect()
    }

    /// Build from a sample closure on the uniform torus grid
    /// (`N × M` points, normal samples at `y_i = -X + 2X i / M`).
    pub fn from_fn(
        period: f64,
        x_max: f64,
        n_tan: usize,
        n_norm: usize,
        mut f: impl FnMut(f64, f64) -> C64,
    ) -> Self {
        let mut samples = Array2::from_elem((n_tan, n_norm), C64::ZERO);
        for j in 0..n_tan {
            let x = period * j as f64 / n_tan as f64;
            for i in 0..n_norm {
                let y = -x_max + 2.0 * x_max * i as f64 / n_norm as f64;
                samples[(j, i)] = f(x, y);
            }
        }
        Self::from_samples(period, x_max, samples)
    }

    /// 2-D forward FFT of torus samples (normal axis sampled from `-X`).
    pub fn from_samples(period: f64, x_max: f64, mut samples: Array2<C64>) -> Self {
        let (n, m) = samples.dim();
        // Rows: tangential transform per normal index.
        for i in 0..m {
            let mut col: Vec<C64> = (0..n).map(|j| samples[(j, i)]).collect();
            fft_forward(&mut col);
            for (j, v) in col.into_iter().enumerate() {
                samples[(j, i)] = v;
            }
        }
        for j in 0..n {
            let mut row: Vec<C64> = (0..m).map(|i| samples[(j, i)]).collect();
            fft_forward(&mut row);
            for (i, v) in row.into_iter().enumerate() {
                samples[(j, i)] = v;
            }
        }
        // The sample origin sits at y = -X, not 0: shift phases so that
        // coefficients refer to e^{iηy} with y measured absolutely.
        let mut field = WholeField {
            period,
            x_max,
            coeffs: samples,
        };
        let etas = field.normal_frequencies();
        for j in 0..n {
            for (i, &eta) in etas.iter().enumerate() {
                // sample index i ↦ y = -X + 2X i/M: FFT gave coeffs w.r.t.
                // e^{i 2π l i / M} = e^{iη(y + X)}; absorb e^{iηX}.
                field.coeffs[(j, i)] *= (C64::I * c64(eta * x_max, 0.0)).exp();
            }
        }
        field
    }

    /// Point evaluation by full mode summation (exact for the represented
    /// trigonometric polynomial).
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        let xis = self.tan_frequencies();
        let etas = self.normal_frequencies();
        let mut acc = C64::ZERO;
        for (j, &xi) in xis.iter().enumerate() {
            let ex = (C64::I * c64(xi * x, 0.0)).exp();
            for (i, &eta) in etas.iter().enumerate() {
                acc += self.coeffs[(j, i)] * ex * (C64::I * c64(eta * y, 0.0)).exp();
            }
        }
        acc
    }

    /// Exact derivative `∂_tan^a ∂_n^b`.
    pub fn derivative(&self, a: usize, b: usize) -> WholeField {
        let xis = self.tan_frequencies();
        let etas = self.normal_frequencies();
        let mut out = self.clone();
        for j in 0..out.coeffs.nrows() {
            for i in 0..out.coeffs.ncols() {
                out.coeffs[(j, i)] *= (C64::I * c64(xis[j], 0.0)).powu(a as u32)
                    * (C64::I * c64(etas[i], 0.0)).powu(b as u32);
            }
        }
        out
    }

    /// Multiply coefficients by a symbol `σ(ξ, η)`.
    pub fn apply_symbol(&self, mut sigma: impl FnMut(f64, f64) -> C64) -> WholeField {
        let xis = self.tan_frequencies();
        let etas = self.normal_frequencies();
        let mut out = self.clone();
        for j in 0..out.coeffs.nrows() {
            for i in 0..out.coeffs.ncols() {
                out.coeffs[(j, i)] *= sigma(xis[j], etas[i]);
            }
        }
        out
    }

    /// Exact interface trace of `D_n^p u` in tangential mode space
    /// (requires matching tangential resolution).
    pub fn trace_dn_modes(&self, p: usize) -> Vec<C64> {
        let etas = self.normal_frequencies();
        (0..self.coeffs.nrows())
            .map(|j| {
                etas.iter()
                    .enumerate()
                    .map(|(i, &eta)| self.coeffs[(j, i)] * c64(eta, 0.0).powu(p as u32))
                    .sum()
            })
            .collect()
    }

    /// Restrict (exactly) to the half-space grid: evaluate the mode sum at
    /// every `(tangential node, normal node)`.
    pub fn restrict_half(&self, grid: &GridSpec) -> Result<GridField> {
        if grid.n_tan != self.coeffs.nrows() {
            return Err(Error::shape(format!(
                "tangential resolutions differ: grid {} vs field {}",
                grid.n_tan,
                self.coeffs.nrows()
            )));
        }
        let etas = self.normal_frequencies();
        let k_n = grid.xn.len();
        // Precomputed normal-mode table e^{i η_l y_i}.
        let table: Vec<Vec<C64>> = etas
            .iter()
            .map(|&eta| {
                grid.xn
                    .nodes
                    .iter()
                    .map(|&y| (C64::I * c64(eta * y, 0.0)).exp())
                    .collect()
            })
            .collect();
        // Per tangential slot: profile values at the normal nodes.
        let mut mode_vals = Array2::from_elem((grid.n_tan, k_n), C64::ZERO);
        for j in 0..grid.n_tan {
            for i in 0..k_n {
                let mut acc = C64::ZERO;
                for (l, row) in table.iter().enumerate() {
                    acc += self.coeffs[(j, l)] * row[i];
                }
                mode_vals[(j, i)] = acc;
            }
        }
        let mut out = mode_vals;
        for i in 0..k_n {
            let mut col: Vec<C64> = (0..grid.n_tan).map(|k| out[(k, i)]).collect();
            fft_inverse(&mut col);
            for (k, v) in col.into_iter().enumerate() {
                out[(k, i)] = v;
            }
        }
        Ok(GridField {
            spec: grid.clone(),
            values: out,
        })
    }

    /// Max coefficient magnitude outside the centered band
    /// `|k̃| ≤ tan_band, |l̃| ≤ norm_band` (band-limitation check).
    pub fn out_of_band(&self, tan_band: usize, norm_band: usize) -> f64 {
        let n = self.coeffs.nrows();
        let m = self.coeffs.ncols();
        let mut worst = 0.0f64;
        for j in 0..n {
            let kk = if j <= n / 2 { j } else { n - j };
            for i in 0..m {
                let ll = if i <= m / 2 { i } else { m - i };
                if kk > tan_band || ll > norm_band {
                    worst = worst.max(self.coeffs[(j, i)].norm());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn xn_grid_weights_sum_to_x_max() {
        for grid in [XnGrid::uniform(17, 3.0), XnGrid::graded(23, 5.0, 2.5)] {
            let total: f64 = grid.weights.iter().sum();
            assert_relative_eq!(total, grid.x_max, max_relative = 1e-13);
            assert!(grid.nodes.windows(2).all(|w| w[1] > w[0]));
            assert!(grid.nodes[0] > 0.0);
        }
        // Grading clusters nodes toward the interface.
        let g = XnGrid::graded(10, 1.0, 3.0);
        assert!(g.nodes[0] < 0.01);
    }

    #[test]
    fn fft_convention_single_mode() {
        let n = 16;
        let period = 2.0;
        let g = BoundaryField::from_fn(period, n, |x| {
            (C64::I * c64(std::f64::consts::TAU * x / period, 0.0)).exp()
        });
        let modes = g.to_modes();
        assert!((modes[1] - C64::ONE).norm() < 1e-12);
        for (k, m) in modes.iter().enumerate() {
            if k != 1 {
                assert!(m.norm() < 1e-12, "slot {k}");
            }
        }
        // Round trip.
        let back = BoundaryField::from_modes(period, &modes);
        for (a, b) in back.values.iter().zip(&g.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn boundary_derivative_spectral() {
        let n = 32;
        let period = std::f64::consts::TAU;
        let g = BoundaryField::from_fn(period, n, |x| c64((3.0 * x).sin(), 0.0));
        let dg = g.derivative(1);
        for (j, v) in dg.values.iter().enumerate() {
            let x = period * j as f64 / n as f64;
            assert!((v.re - 3.0 * (3.0 * x).cos()).abs() < 1e-10, "node {j}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn mode_field_matches_closed_form() {
        let period = 4.0;
        let n = 8;
        let grid = GridSpec::new(period, n, XnGrid::uniform(12, 2.0)).unwrap();
        let mut mf = ModeField::zeros(period, n);
        // Single mode k = 2 with profile e^{-y}: u = e^{i ξ_2 x} e^{-y}.
        mf.profiles[2] = ExponentialSolution::monomial(C64::I, 0);
        let xi = std::f64::consts::TAU * 2.0 / period;
        let f = mf.restrict(&grid);
        for (j, &x) in grid.tan_nodes().iter().enumerate() {
            for (i, &y) in grid.xn.nodes.iter().enumerate() {
                let expect = (C64::I * c64(xi * x, 0.0)).exp() * c64((-y).exp(), 0.0);
                assert!((f.values[(j, i)] - expect).norm() < 1e-12);
            }
        }
        // Derivative sampling: ∂_tan ∂_n u = (iξ)(-1) u.
        let d = mf.sample_derivative(&grid, 1, 1);
        for (j, &x) in grid.tan_nodes().iter().enumerate() {
            for (i, &y) in grid.xn.nodes.iter().enumerate() {
                let expect = C64::I * c64(xi, 0.0)
                    * c64(-1.0, 0.0)
                    * (C64::I * c64(xi * x, 0.0)).exp()
                    * c64((-y).exp(), 0.0);
                assert!((d[(j, i)] - expect).norm() < 1e-11);
            }
        }
        // eval agrees with restrict at grid points.
        let x1 = grid.tan_nodes()[3];
        let y1 = grid.xn.nodes[5];
        assert!((mf.eval(x1, y1) - f.values[(3, 5)]).norm() < 1e-12);
    }

    #[test]
    fn whole_field_round_trip_and_derivative() {
        let period = 2.0;
        let x_max = 1.5;
        let (n, m) = (8, 16);
        let xi = std::f64::consts::TAU / period; // k̃ = 1
        let eta = std::f64::consts::TAU * 2.0 / (2.0 * x_max); // l̃ = 2
        let f = WholeField::from_fn(period, x_max, n, m, |x, y| {
            (C64::I * c64(xi * x + eta * y, 0.0)).exp()
        });
        // Exactly one nonzero coefficient at slots (1, 2).
        for j in 0..n {
            for i in 0..m {
                let expect = if (j, i) == (1, 2) { C64::ONE } else { C64::ZERO };
                assert!(
                    (f.coeffs[(j, i)] - expect).norm() < 1e-12,
                    "slot ({j},{i}) = {}",
                    f.coeffs[(j, i)]
                );
            }
        }
        // eval reproduces the function off-grid.
        let v = f.eval(0.37, -0.91);
        let expect = (C64::I * c64(xi * 0.37 + eta * (-0.91), 0.0)).exp();
        assert!((v - expect).norm() < 1e-12);
        // Exact mixed derivative.
        let d = f.derivative(2, 1);
        let vd = d.eval(0.37, -0.91);
        let factor = (C64::I * c64(xi, 0.0)).powu(2) * (C64::I * c64(eta, 0.0));
        assert!((vd - factor * expect).norm() < 1e-11);
        // Interface trace of D_n: multiplier η per normal mode.
        let tr = f.trace_dn_modes(1);
        assert!((tr[1] - c64(eta, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn whole_field_restricts_to_half_grid() {
        let period = 3.0;
        let x_max = 2.0;
        let (n, m) = (8, 32);
        let f = WholeField::from_fn(period, x_max, n, m, |x, y| {
            c64(
                (std::f64::consts::TAU * x / period).cos() * (1.1 + (std::f64::consts::PI * y / x_max).sin()),
                0.0,
            )
        });
        let grid = GridSpec::new(period, n, XnGrid::graded(9, 1.7, 2.0)).unwrap();
        let half = f.restrict_half(&grid).unwrap();
        for (j, &x) in grid.tan_nodes().iter().enumerate() {
            for (i, &y) in grid.xn.nodes.iter().enumerate() {
                let direct = f.eval(x, y);
                assert!(
                    (half.values[(j, i)] - direct).norm() < 1e-11,
                    "({j},{i})"
                );
            }
        }
    }

    #[test]
    fn out_of_band_detects_content() {
        let f = WholeField::from_fn(2.0, 1.0, 8, 8, |x, y| {
            (C64::I * c64(std::f64::consts::TAU * (3.0 * x / 2.0 + 2.0 * y / 2.0), 0.0)).exp()
        });
        assert!(f.out_of_band(3, 2) < 1e-12);
        assert!(f.out_of_band(2, 2) > 0.9);
    }
}
