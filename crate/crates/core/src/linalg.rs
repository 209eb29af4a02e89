//! Small dense complex linear algebra and a banded complex solver.
//!
//! Every matrix that appears in the transmission construction is tiny (at
//! most `4m x 4m` with `m <= 2` at desk scale), so a straightforward
//! row-major dense type with partial-pivoting LU covers inversion,
//! determinants and conditioning diagnostics.  The banded solver backs the
//! finite-difference oracle, whose systems are large but have bandwidth
//! `O(m)`.

use crate::{c64, C64, Error, Result};

/// Threshold above which a 1-norm condition estimate is treated as
/// numerically singular by the construction code.
pub const COND_LIMIT: f64 = 1e12;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl CMat {
    /// Zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![C64::ZERO; nrows * ncols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = C64::ONE;
        }
        a
    }

    /// Build a matrix entry-by-entry from a closure.
    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut a = CMat::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                a[(i, j)] = f(i, j);
            }
        }
        a
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diag(d: &[C64]) -> Self {
        let mut a = CMat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            a[(i, i)] = v;
        }
        a
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.ncols, rhs.nrows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self[(i, k)];
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols, x.len(), "matvec shape mismatch");
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<C64>()
            })
            .collect()
    }

    /// Entrywise sum `self + rhs`.
    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 1-norm (maximum column sum).
    pub fn norm_1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| (0..self.nrows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator 2-norm via power iteration on `A^H A`.
    ///
    /// Deterministic start vector; the matrices this is used on are at most
    /// a few rows, so a fixed iteration budget reaches machine-level accuracy.
    pub fn op_norm_2(&self) -> f64 {
        let n = self.ncols;
        if n == 0 || self.nrows == 0 {
            return 0.0;
        }
        // Start from the all-ones direction perturbed per-coordinate so that
        // the iteration cannot start orthogonal to the top singular vector.
        let mut v: Vec<C64> = (0..n).map(|j| c64(1.0 + (j as f64) * 0.01, 0.0)).collect();
        let mut est = 0.0f64;
        for _ in 0..200 {
            // w = A^H (A v)
            let av = self.matvec(&v);
            let mut w = vec![C64::ZERO; n];
            for i in 0..self.nrows {
                let r = self.row(i);
                let s = av[i];
                for j in 0..n {
                    w[j] += r[j].conj() * s;
                }
            }
            let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let new_est = nw.sqrt();
            let done = (new_est - est).abs() <= 1e-14 * new_est.max(1.0);
            est = new_est;
            for z in w.iter_mut() {
                *z /= nw;
            }
            v = w;
            if done {
                break;
            }
        }
        est
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    /// Paste `block` into `self` with upper-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &CMat) {
        for i in 0..block.nrows {
            for j in 0..block.ncols {
                self[(i0 + i, j0 + j)] = block[(i, j)];
            }
        }
    }

    /// Extract the `nrows x ncols` block with upper-left corner `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, nrows: usize, ncols: usize) -> CMat {
        CMat::from_fn(nrows, ncols, |i, j| self[(i0 + i, j0 + j)])
    }

    /// Build a 2x2 block matrix `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
        assert_eq!(a.nrows, b.nrows);
        assert_eq!(c.nrows, d.nrows);
        assert_eq!(a.ncols, c.ncols);
        assert_eq!(b.ncols, d.ncols);
        let mut out = CMat::zeros(a.nrows + c.nrows, a.ncols + b.ncols);
        out.set_block(0, 0, a);
        out.set_block(0, a.ncols, b);
        out.set_block(a.nrows, 0, c);
        out.set_block(a.nrows, a.ncols, d);
        out
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    /// Solve `self * x = b` for a single right-hand side.
    pub fn solve(&self, b: &[C64], context: &str) -> Result<Vec<C64>> {
        let lu = self.lu().map_err(|e| annotate(e, context))?;
        Ok(lu.solve(b))
    }

    /// Solve `self * X = B` column-by-column.
    pub fn solve_mat(&self, b: &CMat, context: &str) -> Result<CMat> {
        let lu = self.lu().map_err(|e| annotate(e, context))?;
        let mut x = CMat::zeros(self.nrows, b.ncols);
        for j in 0..b.ncols {
            let col: Vec<C64> = (0..b.nrows).map(|i| b[(i, j)]).collect();
            let sol = lu.solve(&col);
            for i in 0..self.nrows {
                x[(i, j)] = sol[i];
            }
        }
        Ok(x)
    }

    /// Matrix inverse.
    pub fn inverse(&self, context: &str) -> Result<CMat> {
        self.solve_mat(&CMat::identity(self.nrows), context)
    }

    /// Determinant via LU.
    pub fn det(&self) -> C64 {
        match self.lu() {
            Ok(lu) => lu.det(),
            Err(_) => C64::ZERO,
        }
    }

    /// 1-norm condition number computed from the explicit inverse.
    ///
    /// Returns `f64::INFINITY` when the factorization encounters an exactly
    /// zero pivot.
    pub fn cond_1(&self) -> f64 {
        match self.inverse("cond_1") {
            Ok(inv) => self.norm_1() * inv.norm_1(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Fail with [`Error::IllConditioned`] when `cond_1` exceeds
    /// [`COND_LIMIT`].
    pub fn require_well_conditioned(&self, context: &str) -> Result<f64> {
        let cond = self.cond_1();
        if !cond.is_finite() || cond > COND_LIMIT {
            return Err(Error::IllConditioned {
                context: context.to_string(),
                cond,
                limit: COND_LIMIT,
            });
        }
        Ok(cond)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i * self.ncols + j]
    }
}

fn annotate(e: Error, context: &str) -> Error {
    match e {
        Error::IllConditioned { cond, limit, .. } => Error::IllConditioned {
            context: context.to_string(),
            cond,
            limit,
        },
        other => other,
    }
}

/// Partial-pivoting LU factorization of a square [`CMat`].
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    sign_flips: usize,
}

impl Lu {
    fn factor(a: &CMat) -> Result<Lu> {
        assert_eq!(a.nrows, a.ncols, "LU requires a square matrix");
        let n = a.nrows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        let scale = a.norm_max().max(f64::MIN_POSITIVE);
        for k in 0..n {
            // Pivot search in column k.
            let (mut p, mut best) = (k, lu[(k, k)].norm());
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale * 1e-2 {
                return Err(Error::IllConditioned {
                    context: "lu".to_string(),
                    cond: f64::INFINITY,
                    limit: COND_LIMIT,
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign_flips += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign_flips,
        })
    }

    /// Solve for one right-hand side.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.nrows;
        assert_eq!(b.len(), n);
        // Forward substitution on the permuted RHS.
        let mut y = vec![C64::ZERO; n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        // Back substitution.
        let mut x = vec![C64::ZERO; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Determinant of the factored matrix.
    pub fn det(&self) -> C64 {
        let mut d = if self.sign_flips % 2 == 0 {
            C64::ONE
        } else {
            -C64::ONE
        };
        for i in 0..self.lu.nrows {
            d *= self.lu[(i, i)];
        }
        d
    }
}

/// Complex banded matrix in LAPACK-style band storage with room for fill-in,
/// solved by LU with partial pivoting.
///
/// Row `i` may have nonzeros in columns `i - kl ..= i + ku`.
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// `store[r][j]` holds entry `(i, j)` with `r = i - j + ku + kl`,
    /// rows `0 ..= 2*kl + ku`.
    store: Vec<Vec<C64>>,
}

impl Banded {
    /// Zero matrix of order `n` with `kl` sub- and `ku` super-diagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            store: vec![vec![C64::ZERO; n]; 2 * kl + ku + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Add `v` to entry `(i, j)`.  Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(
            j + self.kl >= i && i + self.ku >= j,
            "entry ({i}, {j}) outside band kl={}, ku={}",
            self.kl,
            self.ku
        );
        let r = i + self.ku + self.kl - j;
        self.store[r][j] += v;
    }

    /// Solve `A x = b`, consuming the factorization workspace.
    pub fn solve(mut self, b: &[C64], context: &str) -> Result<Vec<C64>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let width = kl + ku; // fill-in extends the upper bandwidth to ku + kl
        let mut x = b.to_vec();
        let scale = self
            .store
            .iter()
            .flat_map(|row| row.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);

        // In-band partial-pivoting elimination.  Column j eliminates rows
        // j+1 ..= j+kl; pivoting may swap row j with any of those rows.
        for j in 0..n {
            let imax = (j + kl).min(n - 1);
            let (mut p, mut best) = (j, self.get(j, j).norm());
            for i in j + 1..=imax {
                let v = self.get(i, j).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale * 1e-2 {
                return Err(Error::IllConditioned {
                    context: context.to_string(),
                    cond: f64::INFINITY,
                    limit: COND_LIMIT,
                });
            }
            if p != j {
                let jmax = (j + width).min(n - 1);
                for col in j..=jmax {
                    let a = self.get(j, col);
                    let b2 = self.get(p, col);
                    self.set(j, col, b2);
                    self.set(p, col, a);
                }
                x.swap(j, p);
            }
            let pivot = self.get(j, j);
            for i in j + 1..=imax {
                let factor = self.get(i, j) / pivot;
                if factor != C64::ZERO {
                    let jmax = (j + width).min(n - 1);
                    for col in j + 1..=jmax {
                        let upd = factor * self.get(j, col);
                        let cur = self.get(i, col);
                        self.set(i, col, cur - upd);
                    }
                    let upd = factor * x[j];
                    x[i] -= upd;
                }
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            let jmax = (i + width).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=jmax {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        Ok(x)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> C64 {
        let r = i + self.ku + self.kl;
        if r < j || r - j >= self.store.len() {
            return C64::ZERO;
        }
        self.store[r - j][j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: C64) {
        let r = i + self.ku + self.kl - j;
        self.store[r][j] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        c64(re, im)
    }

    #[test]
    fn lu_solves_known_system() {
        let a = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, 1.0),
            (1, 1) => c(1.0, 0.0),
            _ => unreachable!(),
        });
        // det = 1 - i^2 = 2
        assert_relative_eq!(a.det().re, 2.0, max_relative = 1e-14);
        let x = a.solve(&[c(1.0, 0.0), c(0.0, 0.0)], "test").unwrap();
        // inverse first column = (1/2, -i/2)
        assert_relative_eq!(x[0].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(x[1].im, -0.5, max_relative = 1e-14);
    }

    #[test]
    fn inverse_round_trip_random() {
        // Deterministic pseudo-random entries; A * A^{-1} = I to machine
        // precision for a well-conditioned 6x6.
        let mut state = 1234567u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let a = CMat::from_fn(6, 6, |i, j| {
            let diag = if i == j { 4.0 } else { 0.0 };
            c(next() + diag, next())
        });
        let inv = a.inverse("test").unwrap();
        let prod = a.matmul(&inv);
        let err = prod.sub(&CMat::identity(6)).norm_max();
        assert!(err < 1e-12, "round-trip error {err}");
    }

    #[test]
    fn op_norm_matches_closed_form() {
        // diag(3, 4i) has operator 2-norm 4.
        let a = CMat::from_diag(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert_relative_eq!(a.op_norm_2(), 4.0, max_relative = 1e-10);
        // Rank-one [[0, 5], [0, 0]] has norm 5.
        let mut b = CMat::zeros(2, 2);
        b[(0, 1)] = c(5.0, 0.0);
        assert_relative_eq!(b.op_norm_2(), 5.0, max_relative = 1e-10);
    }

    #[test]
    fn singular_matrix_reports_ill_conditioned() {
        let a = CMat::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(a.lu().is_err());
        assert!(!a.cond_1().is_finite());
        assert!(a.require_well_conditioned("test").is_err());
    }

    #[test]
    fn banded_matches_dense_solution() {
        // Tridiagonal complex system vs dense LU.
        let n = 40;
        let mut banded = Banded::zeros(n, 1, 1);
        let mut dense = CMat::zeros(n, n);
        for i in 0..n {
            let d = c(2.5, 0.3 * (i as f64 % 3.0));
            banded.add(i, i, d);
            dense[(i, i)] = d;
            if i + 1 < n {
                let u = c(-1.0, 0.1);
                let l = c(-0.8, -0.2);
                banded.add(i, i + 1, u);
                banded.add(i + 1, i, l);
                dense[(i, i + 1)] = u;
                dense[(i + 1, i)] = l;
            }
        }
        let b: Vec<C64> = (0..n).map(|i| c(i as f64, -(i as f64) / 2.0)).collect();
        let xb = banded.solve(&b, "test").unwrap();
        let xd = dense.solve(&b, "test").unwrap();
        for (u, v) in xb.iter().zip(&xd) {
            assert!((u - v).norm() < 1e-11);
        }
    }

    #[test]
    fn banded_pivoting_handles_weak_diagonal() {
        // Zero on the first diagonal entry forces a pivot swap.
        let mut a = Banded::zeros(3, 1, 1);
        a.add(0, 0, C64::ZERO);
        a.add(0, 1, c(1.0, 0.0));
        a.add(1, 0, c(2.0, 0.0));
        a.add(1, 1, c(1.0, 0.0));
        a.add(1, 2, c(1.0, 0.0));
        a.add(2, 1, c(1.0, 0.0));
        a.add(2, 2, c(3.0, 0.0));
        // Dense reference.
        let mut d = CMat::zeros(3, 3);
        d[(0, 1)] = c(1.0, 0.0);
        d[(1, 0)] = c(2.0, 0.0);
        d[(1, 1)] = c(1.0, 0.0);
        d[(1, 2)] = c(1.0, 0.0);
        d[(2, 1)] = c(1.0, 0.0);
        d[(2, 2)] = c(3.0, 0.0);
        let b = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
        let xb = a.solve(&b, "test").unwrap();
        let xd = d.solve(&b, "test").unwrap();
        for (u, v) in xb.iter().zip(&xd) {
            assert!((u - v).norm() < 1e-12);
        }
    }
}
