//! Complex polynomials in one variable and an in-repo companion-matrix root
//! finder.
//!
//! The characteristic polynomials handled here have degree at most `2m` with
//! `m` small, so the root finder favours robustness and zero dependencies
//! over asymptotic speed: the monic polynomial is rescaled to balance its
//! coefficients, its companion matrix (already upper Hessenberg) is reduced
//! by a shifted complex QR iteration with Givens rotations, and every
//! eigenvalue receives one Newton polish step against the original
//! polynomial.

use crate::{c64, C64, Error, Result};

/// Polynomial with complex coefficients, stored in ascending order
/// (`c[k]` multiplies `t^k`).
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    /// Build from ascending coefficients; trailing (highest-order) zeros are
    /// trimmed.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = CPoly { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        CPoly { coeffs: vec![] }
    }

    /// Monic polynomial with the given roots (repeated roots allowed).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::ONE];
        for &r in roots {
            // multiply by (t - r)
            let mut next = vec![C64::ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        CPoly { coeffs }
    }

    fn trim(&mut self) {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= scale * f64::EPSILON * 1e-3 && self.coeffs.len() > 1 {
                self.coeffs.pop();
            } else if last.norm() == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(C64::ZERO)
    }

    /// Largest coefficient modulus.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: C64) -> C64 {
        let mut acc = C64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Evaluate the polynomial and its first derivative together.
    pub fn eval_with_deriv(&self, t: C64) -> (C64, C64) {
        let mut p = C64::ZERO;
        let mut dp = C64::ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    /// First derivative.
    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * c64(k as f64, 0.0))
            .collect();
        CPoly::new(coeffs)
    }

    /// `k`-th derivative.
    pub fn derivative_n(&self, k: usize) -> CPoly {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &CPoly) -> CPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return CPoly::zero();
        }
        let mut coeffs = vec![C64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        CPoly { coeffs }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> CPoly {
        CPoly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// All roots, computed by the balanced companion-matrix QR iteration with
    /// one Newton polish step per root.  The polynomial must have degree at
    /// least 1 after trimming.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::invalid_spec("root finding on the zero polynomial"))?;
        if deg == 0 {
            return Ok(vec![]);
        }
        // Monic coefficients a_0 .. a_{d-1}.
        let lead = self.leading();
        let mut monic: Vec<C64> = self.coeffs[..deg].iter().map(|&c| c / lead).collect();

        // Deflate exact zero roots up front (companion balancing dislikes
        // a_0 = 0, and a zero root never needs polishing).
        let mut roots = Vec::with_capacity(deg);
        let scale0 = monic.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
        while !monic.is_empty() && monic[0].norm() <= scale0 * f64::EPSILON * 1e-2 {
            roots.push(C64::ZERO);
            monic.remove(0);
        }
        let d = monic.len();
        if d == 0 {
            return Ok(roots);
        }
        if d == 1 {
            roots.push(-monic[0]);
            return Ok(roots);
        }

        // Coefficient balancing: substitute t = s*u with s chosen from the
        // classical root-magnitude bound, so the rescaled coefficients have
        // moderate dynamic range.
        let s = monic
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm().powf(1.0 / (d - k) as f64))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let scaled: Vec<C64> = monic
            .iter()
            .enumerate()
            .map(|(k, &c)| c / c64(s.powi((d - k) as i32), 0.0))
            .collect();

        let mut eigs = companion_eigenvalues(&scaled)?;
        for e in eigs.iter_mut() {
            *e *= s;
        }

        // One Newton polish step against the original polynomial; skipped
        // when the derivative nearly vanishes (root cluster), where the raw
        // step would be unreliable.
        let deriv_floor = self.coeff_scale() * f64::EPSILON * 1e2;
        for e in eigs.iter_mut() {
            let (p, dp) = self.eval_with_deriv(*e);
            if dp.norm() > deriv_floor {
                let step = p / dp;
                // Guard against wild steps out of a cluster.
                if step.norm() <= 0.1 * (e.norm() + s) {
                    *e -= step;
                }
            }
        }
        roots.extend(eigs);
        Ok(roots)
    }
}

/// Eigenvalues of the companion matrix of the monic polynomial
/// `t^d + a[d-1] t^{d-1} + ... + a[0]`, by shifted complex QR with Givens
/// rotations.  The companion matrix is upper Hessenberg from the start.
fn companion_eigenvalues(a: &[C64]) -> Result<Vec<C64>> {
    let d = a.len();
    // h[i][j]: subdiagonal ones, last column -a_i.
    let mut h = vec![vec![C64::ZERO; d]; d];
    for (i, row) in h.iter_mut().enumerate() {
        if i > 0 {
            row[i - 1] = C64::ONE;
        }
        row[d - 1] = -a[i];
    }
    hessenberg_eigenvalues(&mut h)
}

/// Shifted QR iteration on an upper Hessenberg complex matrix (in place).
fn hessenberg_eigenvalues(h: &mut [Vec<C64>]) -> Result<Vec<C64>> {
    let n = h.len();
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block occupies rows/cols 0..hi
    let mut iters_at_hi = 0usize;
    let max_iters_per_eig = 60;
    let norm_scale = h
        .iter()
        .flat_map(|r| r.iter().map(|z| z.norm()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    while hi > 0 {
        // Zero out negligible subdiagonals and find the start of the active
        // block ending at hi-1.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let local = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if sub <= f64::EPSILON * (local + norm_scale * 1e-3) {
                h[lo][lo - 1] = C64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            // 1x1 block deflated.
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            iters_at_hi = 0;
            continue;
        }

        iters_at_hi += 1;
        if iters_at_hi > max_iters_per_eig {
            return Err(Error::NoConvergence {
                context: "companion-matrix QR iteration".to_string(),
                iterations: max_iters_per_eig,
            });
        }

        // Wilkinson shift from the trailing 2x2 of the active block, with an
        // occasional exceptional shift to break symmetric stagnation.
        let mu = if iters_at_hi % 13 == 0 {
            h[hi - 1][hi - 1] + c64(1.0, 0.5) * c64(h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            )
        };

        // Explicit shifted QR step on the window [lo, hi).
        for k in lo..hi {
            h[k][k] -= mu;
        }
        let mut rots: Vec<(C64, C64, f64)> = Vec::with_capacity(hi - lo - 1);
        for k in lo..hi - 1 {
            let a = h[k][k];
            let b = h[k + 1][k];
            let dnm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if dnm == 0.0 {
                rots.push((C64::ONE, C64::ZERO, 1.0));
                continue;
            }
            let (c, s) = (a / dnm, b / dnm);
            // rows k, k+1 over columns k..hi
            for j in k..hi {
                let t1 = h[k][j];
                let t2 = h[k + 1][j];
                h[k][j] = c.conj() * t1 + s.conj() * t2;
                h[k + 1][j] = -s * t1 + c * t2;
            }
            rots.push((c, s, dnm));
        }
        for (k, (c, s, _)) in rots.iter().enumerate().map(|(i, r)| (lo + i, r)) {
            // columns k, k+1 over rows lo..=k+1
            for row in h.iter_mut().take((k + 2).min(hi)).skip(lo) {
                let t1 = row[k];
                let t2 = row[k + 1];
                row[k] = c * t1 + s * t2;
                row[k + 1] = -s.conj() * t1 + c.conj() * t2;
            }
        }
        for k in lo..hi {
            h[k][k] += mu;
        }
    }
    Ok(eigs)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * c64(0.5, 0.0);
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let e1 = tr_half + disc;
    let e2 = tr_half - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_key(z: &C64) -> (i64, i64) {
        ((z.re * 1e9) as i64, (z.im * 1e9) as i64)
    }

    fn assert_root_sets_match(mut got: Vec<C64>, mut want: Vec<C64>, tol: f64) {
        got.sort_by_key(sort_key);
        want.sort_by_key(sort_key);
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert!(
                (g - w).norm() <= tol,
                "root {g} does not match expected {w} (tol {tol})"
            );
        }
    }

    #[test]
    fn quadratic_closed_form() {
        // t^2 + 4 -> +-2i
        let p = CPoly::new(vec![c64(4.0, 0.0), C64::ZERO, C64::ONE]);
        let roots = p.roots().unwrap();
        assert_root_sets_match(roots, vec![c64(0.0, 2.0), c64(0.0, -2.0)], 1e-12);
    }

    #[test]
    fn random_simple_roots_recovered() {
        // Scattered complex roots with varied magnitudes.
        let want = vec![
            c64(1.5, 2.0),
            c64(-0.3, -1.1),
            c64(4.0, 0.5),
            c64(-2.5, 3.0),
            c64(0.1, -0.2),
            c64(-1.0, 0.7),
        ];
        let p = CPoly::from_roots(&want).scale(c64(0.7, -1.3));
        let roots = p.roots().unwrap();
        assert_root_sets_match(roots, want, 1e-9);
    }

    #[test]
    fn double_root_pair_lands_near_center() {
        // (t^2 + 1)^2: double roots at +-i; companion QR splits each double
        // root by about sqrt(eps), which downstream clustering absorbs.
        let p = CPoly::from_roots(&[c64(0.0, 1.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, -1.0)]);
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            let d = (r.im.abs() - 1.0).abs() + r.re.abs();
            assert!(d < 1e-6, "double root {r} strays too far");
        }
    }

    #[test]
    fn zero_roots_deflated() {
        // t^3 (t - 2)
        let p = CPoly::from_roots(&[C64::ZERO, C64::ZERO, C64::ZERO, c64(2.0, 0.0)]);
        let roots = p.roots().unwrap();
        let zeros = roots.iter().filter(|r| r.norm() < 1e-12).count();
        assert_eq!(zeros, 3);
        assert!(roots.iter().any(|r| (r - c64(2.0, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn wide_magnitude_spread() {
        let want = vec![c64(1e-3, 0.0), c64(0.0, 1e3), c64(-50.0, 2.0), c64(0.2, -0.8)];
        let p = CPoly::from_roots(&want);
        let roots = p.roots().unwrap();
        // Relative accuracy per root.
        let mut got = roots.clone();
        got.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        let mut wanted = want.clone();
        wanted.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        for (g, w) in got.iter().zip(&wanted) {
            assert!((g - w).norm() <= 1e-8 * w.norm().max(1.0), "{g} vs {w}");
        }
    }

    #[test]
    fn from_roots_reconstruction() {
        let roots = vec![c64(0.0, 1.0), c64(0.0, -1.0)];
        let p = CPoly::from_roots(&roots);
        // t^2 + 1
        assert!((p.eval(c64(2.0, 0.0)) - c64(5.0, 0.0)).norm() < 1e-14);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn derivative_and_eval_consistency() {
        let p = CPoly::new(vec![c64(1.0, 1.0), c64(0.0, -2.0), c64(3.0, 0.0), C64::ONE]);
        let t = c64(0.7, -0.4);
        let (v, dv) = p.eval_with_deriv(t);
        assert!((v - p.eval(t)).norm() < 1e-14);
        assert!((dv - p.derivative().eval(t)).norm() < 1e-14);
    }
}
