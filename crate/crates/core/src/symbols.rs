//! Problem coefficients, ellipticity checks and characteristic-root
//! splitting.
//!
//! A problem instance couples two homogeneous constant-coefficient symbols
//! of order `2m` on `R^n`:
//!
//! * an elliptic principal symbol `a1(ξ) = Σ_{|α| = 2m} c_α ξ^α` governing
//!   the half-space `x_n > 0`, and
//! * a parameter-dependent principal symbol
//!   `a2(ξ, λ) = Σ_{|α| + k = 2m} c_{α,k} λ^{k/2m} ξ^α` governing `x_n < 0`,
//!   with spectral parameter `λ` in the closed sector `|arg λ| <= θ` and
//!   `q := λ^{1/2m}` (principal branch).
//!
//! For the half-line ODE systems the normal covariable is complexified:
//! `τ ↦ a(ξ', τ)` is a degree-`2m` polynomial whose roots must split into
//! `m` stable ones (`Im τ > 0`) and `m` unstable ones — proper ellipticity.
//! The parabolic-side operator is *reflected* through the interface
//! (`ξ_n ↦ -ξ_n`) before root splitting, so that the stable solutions of
//! both sides live on the same half-line `x_n > 0`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::poly::CPoly;
use crate::{c64, C64, Error, Result};

/// Relative tolerance for clustering characteristic roots into multiplicity
/// groups and for deciding that a root sits on the real axis.  Scaled by
/// `|ξ'|` (elliptic side) or `ρ = |ξ'| + |q|` (parabolic side).
///
/// A `μ`-fold root comes out of the eigenvalue solver split into a cluster
/// of radius roughly `(κ ε)^{1/μ}`, where `κ` is the coefficient-space
/// amplification; for double roots of moderate quartics that is observed up
/// to a few times `1e-6` relative, so the tolerance sits an order above.
/// Genuinely distinct roots this close behave like a multiple root at
/// working precision anyway, and the confluent treatment is the
/// numerically stable one.
pub const ROOT_CLUSTER_TOL: f64 = 1e-5;

/// Multi-index `α ∈ N^n` (one entry per space dimension, the last entry is
/// the normal direction).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    /// Total order `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exponent of the normal (last) variable.
    pub fn normal(&self) -> u32 {
        *self.0.last().expect("non-empty multi-index")
    }

    /// Monomial `v^α` over the full variable vector.
    pub fn eval(&self, v: &[C64]) -> C64 {
        debug_assert_eq!(v.len(), self.0.len());
        let mut acc = C64::ONE;
        for (x, &e) in v.iter().zip(&self.0) {
            acc *= x.powu(e);
        }
        acc
    }

    /// Monomial `ξ'^{α'}` over the tangential part only (all but the last
    /// entry).
    pub fn eval_tangential(&self, xi_prime: &[f64]) -> f64 {
        debug_assert_eq!(xi_prime.len() + 1, self.0.len());
        let mut acc = 1.0f64;
        for (x, &e) in xi_prime.iter().zip(&self.0) {
            acc *= x.powi(e as i32);
        }
        acc
    }
}

/// Which of the two coupled operators a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// The elliptic operator on the half-space `x_n > 0`.
    Elliptic,
    /// The parameter-elliptic (parabolic-type) operator, reflected to
    /// `x_n > 0`.
    Parabolic,
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Operator::Elliptic => write!(f, "elliptic side"),
            Operator::Parabolic => write!(f, "parabolic side"),
        }
    }
}

/// Coefficients and structural data of one transmission problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// Half the common order `2m` of both operators.
    pub m: usize,
    /// Space dimension (`>= 2`; the last coordinate is normal to the
    /// interface).
    pub n: usize,
    /// Sector half-angle for the spectral parameter `λ`, in `[0, π)`.
    pub theta: f64,
    /// Elliptic-side coefficients: `(α, c)` with `|α| = 2m`.
    pub a1: Vec<(MultiIndex, C64)>,
    /// Parabolic-side coefficients: `(α, k, c)` with `|α| + k = 2m`; the
    /// coefficient multiplies `λ^{k/2m} ξ^α = q^k ξ^α`.
    pub a2: Vec<(MultiIndex, u32, C64)>,
}

impl ProblemSpec {
    /// Validated constructor.
    pub fn new(
        m: usize,
        n: usize,
        theta: f64,
        a1: Vec<(MultiIndex, C64)>,
        a2: Vec<(MultiIndex, u32, C64)>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid_spec("order parameter m must be positive"));
        }
        if n < 2 {
            return Err(Error::invalid_spec("space dimension n must be at least 2"));
        }
        if !(0.0..std::f64::consts::PI).contains(&theta) {
            return Err(Error::invalid_spec(format!(
                "sector half-angle theta = {theta} must lie in [0, pi)"
            )));
        }
        let order = (2 * m) as u32;
        for (alpha, _) in &a1 {
            if alpha.len() != n {
                return Err(Error::invalid_spec(format!(
                    "elliptic multi-index {:?} has {} entries, expected {n}",
                    alpha.0,
                    alpha.len()
                )));
            }
            if alpha.order() != order {
                return Err(Error::invalid_spec(format!(
                    "elliptic multi-index {:?} has order {}, expected {order}",
                    alpha.0,
                    alpha.order()
                )));
            }
        }
        for (alpha, k, _) in &a2 {
            if alpha.len() != n {
                return Err(Error::invalid_spec(format!(
                    "parabolic multi-index {:?} has {} entries, expected {n}",
                    alpha.0,
                    alpha.len()
                )));
            }
            if alpha.order() + k != order {
                return Err(Error::invalid_spec(format!(
                    "parabolic term ({:?}, k = {k}) has order {}, expected {order}",
                    alpha.0,
                    alpha.order() + k
                )));
            }
        }
        let spec = ProblemSpec { m, n, theta, a1, a2 };
        // Both symbols must be genuinely of order 2m in the normal direction,
        // otherwise the half-line ODEs drop order and no (m, m) root split
        // can exist.
        if spec.normal_leading(Operator::Elliptic).norm() == 0.0 {
            return Err(Error::invalid_spec(
                "elliptic symbol has no ξ_n^{2m} term; normal direction degenerates".to_string(),
            ));
        }
        if spec.normal_leading(Operator::Parabolic).norm() == 0.0 {
            return Err(Error::invalid_spec(
                "parabolic symbol has no ξ_n^{2m} term; normal direction degenerates".to_string(),
            ));
        }
        Ok(spec)
    }

    /// Coefficient of the pure normal monomial `ξ_n^{2m}`.
    fn normal_leading(&self, op: Operator) -> C64 {
        let order = (2 * self.m) as u32;
        match op {
            Operator::Elliptic => self
                .a1
                .iter()
                .filter(|(a, _)| a.normal() == order)
                .map(|(_, c)| *c)
                .sum(),
            Operator::Parabolic => self
                .a2
                .iter()
                .filter(|(a, k, _)| *k == 0 && a.normal() == order)
                .map(|(_, _, c)| *c)
                .sum(),
        }
    }

    /// Laplace / heat pair: `a1 = |ξ|^2`, `a2 = |ξ|^2 + λ`, `m = 1`.
    pub fn laplacian_heat(n: usize, theta: f64) -> Self {
        let mut a1 = Vec::new();
        let mut a2 = Vec::new();
        for d in 0..n {
            let mut idx = vec![0u32; n];
            idx[d] = 2;
            a1.push((MultiIndex(idx.clone()), C64::ONE));
            a2.push((MultiIndex(idx), 0, C64::ONE));
        }
        a2.push((MultiIndex(vec![0; n]), 2, C64::ONE));
        ProblemSpec::new(1, n, theta, a1, a2).expect("valid preset")
    }

    /// Bilaplacian / squared-heat pair: `a1 = |ξ|^4`,
    /// `a2 = (|ξ|^2 + λ^{1/2})^2`, `m = 2`.  Every characteristic root is
    /// double, which exercises the confluent solution basis.
    pub fn bilaplacian_heat_squared(n: usize, theta: f64) -> Self {
        let lap = SymbolPoly::laplace(n);
        let heat = lap.clone().add(&SymbolPoly::q_power(n, 2));
        let a1 = lap.clone().mul(&lap).into_a1();
        let a2 = heat.clone().mul(&heat).into_a2();
        ProblemSpec::new(2, n, theta, a1, a2).expect("valid preset")
    }

    /// Deliberately non-elliptic demonstration pair: the elliptic slot holds
    /// the hyperbolic symbol `ξ_1^2 - ξ_n^2` (degenerate along diagonal
    /// rays), the parabolic slot the heat symbol.
    pub fn hyperbolic_demo(n: usize, theta: f64) -> Self {
        let mut a1 = Vec::new();
        let mut idx = vec![0u32; n];
        idx[0] = 2;
        a1.push((MultiIndex(idx), C64::ONE));
        let mut idx = vec![0u32; n];
        idx[n - 1] = 2;
        a1.push((MultiIndex(idx), -C64::ONE));
        let heat = ProblemSpec::laplacian_heat(n, theta);
        ProblemSpec {
            m: 1,
            n,
            theta,
            a1,
            a2: heat.a2,
        }
    }

    /// Deterministic random pair with guaranteed ellipticity margins, used by
    /// randomized verification sweeps.  Both symbols are products of `m`
    /// diagonally dominant complex quadratic forms; with `doubled = true`
    /// (and `m = 2`) the same factor is used twice, producing double
    /// characteristic roots at every covariable.
    pub fn random_elliptic(m: usize, n: usize, theta: f64, seed: u64, doubled: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let quad = |rng: &mut ChaCha8Rng| {
            let mut s = SymbolPoly::new(n);
            for d in 0..n {
                let mut idx = vec![0u32; n];
                idx[d] = 2;
                let c = c64(
                    1.0 + rng.random::<f64>(),
                    0.08 * (rng.random::<f64>() - 0.5),
                );
                s.insert(MultiIndex(idx), 0, c);
            }
            for d in 0..n {
                for e in d + 1..n {
                    let mut idx = vec![0u32; n];
                    idx[d] = 1;
                    idx[e] = 1;
                    let c = c64(
                        0.3 * (rng.random::<f64>() - 0.5),
                        0.1 * (rng.random::<f64>() - 0.5),
                    ) / c64(n as f64 - 1.0, 0.0);
                    s.insert(MultiIndex(idx), 0, c);
                }
            }
            s
        };
        let mut a1_sym = SymbolPoly::one(n);
        let mut a2_sym = SymbolPoly::one(n);
        let mut held: Option<(SymbolPoly, SymbolPoly)> = None;
        for i in 0..m {
            let (f1, f2) = if doubled {
                if let Some(h) = &held {
                    h.clone()
                } else {
                    let f1 = quad(&mut rng);
                    let scale = c64(0.5 + rng.random::<f64>(), 0.0);
                    let f2 = quad(&mut rng).add(&SymbolPoly::q_power(n, 2).scale(scale));
                    held = Some((f1, f2));
                    held.clone().unwrap()
                }
            } else {
                let f1 = quad(&mut rng);
                let scale = c64(0.5 + rng.random::<f64>(), 0.0);
                let f2 = quad(&mut rng).add(&SymbolPoly::q_power(n, 2).scale(scale));
                (f1, f2)
            };
            let _ = i;
            a1_sym = a1_sym.mul(&f1);
            a2_sym = a2_sym.mul(&f2);
        }
        ProblemSpec::new(m, n, theta, a1_sym.into_a1(), a2_sym.into_a2())
            .expect("randomized factors keep the structure valid")
    }

    /// Elliptic principal symbol `a1(ξ)` at a real covariable.
    pub fn eval_a1(&self, xi: &[f64]) -> C64 {
        let v: Vec<C64> = xi.iter().map(|&x| c64(x, 0.0)).collect();
        self.eval_a1_complex(&v)
    }

    /// Elliptic principal symbol with complexified entries.
    pub fn eval_a1_complex(&self, xi: &[C64]) -> C64 {
        assert_eq!(xi.len(), self.n, "covariable dimension mismatch");
        self.a1.iter().map(|(a, c)| c * a.eval(xi)).sum()
    }

    /// Parabolic principal symbol `a2(ξ, q)` at a real covariable (original,
    /// unreflected orientation).
    pub fn eval_a2(&self, xi: &[f64], q: C64) -> C64 {
        let v: Vec<C64> = xi.iter().map(|&x| c64(x, 0.0)).collect();
        self.eval_a2_complex(&v, q)
    }

    /// Parabolic principal symbol with complexified entries.
    pub fn eval_a2_complex(&self, xi: &[C64], q: C64) -> C64 {
        assert_eq!(xi.len(), self.n, "covariable dimension mismatch");
        self.a2
            .iter()
            .map(|(a, k, c)| c * a.eval(xi) * q.powu(*k))
            .sum()
    }

    /// Characteristic polynomial `τ ↦ a(ξ', τ)` of the requested side.
    ///
    /// The parabolic side is reflected (`ξ_n ↦ -ξ_n`) so that its stable
    /// roots correspond to solutions decaying on `x_n → +∞`; pass
    /// `reflected = false` to obtain the original orientation (used by the
    /// two-sided finite-difference oracle).
    pub fn char_poly(&self, op: Operator, xi_prime: &[f64], q: C64, reflected: bool) -> CPoly {
        assert_eq!(xi_prime.len() + 1, self.n, "tangential dimension mismatch");
        let deg = 2 * self.m;
        let mut coeffs = vec![C64::ZERO; deg + 1];
        match op {
            Operator::Elliptic => {
                for (alpha, c) in &self.a1 {
                    let j = alpha.normal() as usize;
                    coeffs[j] += c * c64(alpha.eval_tangential(xi_prime), 0.0);
                }
            }
            Operator::Parabolic => {
                for (alpha, k, c) in &self.a2 {
                    let j = alpha.normal() as usize;
                    let sign = if reflected && j % 2 == 1 { -1.0 } else { 1.0 };
                    coeffs[j] +=
                        c * c64(sign * alpha.eval_tangential(xi_prime), 0.0) * q.powu(*k);
                }
            }
        }
        CPoly::new(coeffs)
    }
}

/// A tangential covariable together with the spectral parameter root
/// `q = λ^{1/2m}`.
#[derive(Debug, Clone)]
pub struct Covariable {
    pub xi_prime: Vec<f64>,
    pub q: C64,
}

impl Covariable {
    /// Validated constructor: dimension check and sector membership
    /// `|arg q| <= θ/2m` (with a tiny numerical slack).
    pub fn new(spec: &ProblemSpec, xi_prime: Vec<f64>, q: C64) -> Result<Self> {
        if xi_prime.len() + 1 != spec.n {
            return Err(Error::shape(format!(
                "tangential covariable has {} entries, expected {}",
                xi_prime.len(),
                spec.n - 1
            )));
        }
        let half_angle = spec.theta / (2.0 * spec.m as f64);
        if q != C64::ZERO {
            let arg = q.arg().abs();
            if arg > half_angle + 1e-12 {
                return Err(Error::OutsideSector {
                    value: q,
                    half_angle,
                    arg,
                });
            }
        }
        Ok(Covariable { xi_prime, q })
    }

    /// Euclidean length of the tangential covariable.
    pub fn xi_norm(&self) -> f64 {
        self.xi_prime.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Joint magnitude `ρ = |ξ'| + |q|`.
    pub fn rho(&self) -> f64 {
        self.xi_norm() + self.q.norm()
    }

    /// Spectral parameter `λ = q^{2m}`.
    pub fn lambda(&self, m: usize) -> C64 {
        self.q.powu(2 * m as u32)
    }
}

/// Principal branch `λ^{1/2m}`.
pub fn lambda_to_q(lambda: C64, m: usize) -> C64 {
    if lambda == C64::ZERO {
        return C64::ZERO;
    }
    let r = lambda.norm().powf(1.0 / (2.0 * m as f64));
    let phi = lambda.arg() / (2.0 * m as f64);
    c64(r * phi.cos(), r * phi.sin())
}

/// Characteristic roots of one side at one covariable, split into the stable
/// (upper half-plane) and unstable families with multiplicities.
#[derive(Debug, Clone)]
pub struct RootSplit {
    pub operator: Operator,
    /// Stable roots `(τ, multiplicity)`, `Im τ > 0`.
    pub plus: Vec<(C64, usize)>,
    /// Unstable roots `(τ, multiplicity)`, `Im τ < 0`.
    pub minus: Vec<(C64, usize)>,
    /// Full characteristic polynomial (degree `2m`).
    pub char_poly: CPoly,
    /// Monic stable factor `Π (τ - τ_j^+)^{μ_j}`.
    pub a_plus: CPoly,
    /// Monic unstable factor.
    pub a_minus: CPoly,
    /// Absolute clustering tolerance that was applied.
    pub tol: f64,
}

impl RootSplit {
    /// Total number of stable roots counted with multiplicity (always `m`).
    pub fn stable_count(&self) -> usize {
        self.plus.iter().map(|(_, k)| k).sum()
    }

    /// Stable roots repeated according to multiplicity.
    pub fn stable_with_multiplicity(&self) -> Vec<C64> {
        let mut v = Vec::new();
        for &(r, k) in &self.plus {
            v.extend(std::iter::repeat_n(r, k));
        }
        v
    }

    /// Largest relative deviation between `leading * a_plus * a_minus` and
    /// the characteristic polynomial (reconstruction residual).
    pub fn factorization_residual(&self) -> f64 {
        let recon = self.a_plus.mul(&self.a_minus).scale(self.char_poly.leading());
        let scale = self.char_poly.coeff_scale().max(f64::MIN_POSITIVE);
        let n = self.char_poly.coeffs().len().max(recon.coeffs().len());
        let mut worst = 0.0f64;
        for k in 0..n {
            let a = self.char_poly.coeffs().get(k).copied().unwrap_or(C64::ZERO);
            let b = recon.coeffs().get(k).copied().unwrap_or(C64::ZERO);
            worst = worst.max((a - b).norm() / scale);
        }
        worst
    }
}

/// Compute and classify the characteristic roots of one side at `cov`.
///
/// Roots are produced by the companion-matrix QR solver, polished by one
/// Newton step, merged into multiplicity clusters at tolerance
/// [`ROOT_CLUSTER_TOL`] times the covariable scale, and cluster centers of
/// multiplicity `μ > 1` are re-polished on the `(μ-1)`-th derivative (where
/// they are simple roots).  Fails when a root hugs the real axis or when the
/// split is not `(m, m)`.
pub fn compute_roots(spec: &ProblemSpec, cov: &Covariable, op: Operator) -> Result<RootSplit> {
    compute_roots_with_tol(spec, cov, op, ROOT_CLUSTER_TOL)
}

/// [`compute_roots`] with an explicit relative clustering tolerance.
///
/// The effective tolerance is floored at the double-root resolution limit of
/// the eigenvalue solver (see [`ROOT_CLUSTER_TOL`]), below which a genuinely
/// multiple root cannot be told apart from a tight pair anyway.
pub fn compute_roots_with_tol(
    spec: &ProblemSpec,
    cov: &Covariable,
    op: Operator,
    eps_root: f64,
) -> Result<RootSplit> {
    let scale = match op {
        Operator::Elliptic => cov.xi_norm(),
        Operator::Parabolic => cov.rho(),
    };
    let p = spec.char_poly(op, &cov.xi_prime, cov.q, true);
    let context = format!(
        "{op} at xi' = {:?}, q = {}",
        cov.xi_prime, cov.q
    );
    if p.degree() != Some(2 * spec.m) {
        return Err(Error::invalid_spec(format!(
            "characteristic polynomial of {context} has degree {:?}, expected {}",
            p.degree(),
            2 * spec.m
        )));
    }
    let raw = p.roots()?;
    let floor = 1e-6;
    let tol = eps_root.max(floor) * scale.max(f64::MIN_POSITIVE);
    let clusters = cluster_roots(&raw, tol, &p);

    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for &(root, mult) in &clusters {
        if root.im > tol {
            plus.push((root, mult));
        } else if root.im < -tol {
            minus.push((root, mult));
        } else {
            return Err(Error::RootsOnRealAxis {
                context,
                root,
                imag: root.im.abs(),
                tol,
            });
        }
    }
    let count = |v: &Vec<(C64, usize)>| v.iter().map(|(_, k)| k).sum::<usize>();
    let (np, nm) = (count(&plus), count(&minus));
    if np != spec.m || nm != spec.m {
        return Err(Error::RootCountMismatch {
            context,
            expected: spec.m,
            plus: np,
            minus: nm,
        });
    }
    let expand = |v: &Vec<(C64, usize)>| {
        let mut all = Vec::new();
        for &(r, k) in v {
            all.extend(std::iter::repeat_n(r, k));
        }
        CPoly::from_roots(&all)
    };
    Ok(RootSplit {
        operator: op,
        a_plus: expand(&plus),
        a_minus: expand(&minus),
        plus,
        minus,
        char_poly: p,
        tol,
    })
}

/// Merge raw roots into multiplicity clusters: chain-link roots whose
/// pairwise distance is below `2 * tol` (each member then sits within `tol`
/// of the cluster center), average each cluster, and polish centers of
/// multiplicity `μ > 1` with one Newton step on the `(μ-1)`-th derivative.
fn cluster_roots(raw: &[C64], tol: f64, p: &CPoly) -> Vec<(C64, usize)> {
    let n = raw.len();
    let mut owner: Vec<usize> = (0..n).collect();
    fn find(owner: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while owner[r] != r {
            r = owner[r];
        }
        let mut c = i;
        while owner[c] != r {
            let next = owner[c];
            owner[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (raw[i] - raw[j]).norm() <= 2.0 * tol {
                let (ri, rj) = (find(&mut owner, i), find(&mut owner, j));
                if ri != rj {
                    owner[ri] = rj;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut owner, i);
        groups.entry(r).or_default().push(raw[i]);
    }
    groups
        .into_values()
        .map(|members| {
            let mult = members.len();
            let mut center = members.iter().sum::<C64>() / c64(mult as f64, 0.0);
            if mult > 1 {
                // The cluster center is a simple root of p^{(μ-1)}.
                let dp = p.derivative_n(mult - 1);
                let (v, dv) = dp.eval_with_deriv(center);
                if dv.norm() > dp.coeff_scale() * f64::EPSILON * 1e2 {
                    let step = v / dv;
                    if step.norm() <= tol * 10.0 {
                        center -= step;
                    }
                }
            }
            (center, mult)
        })
        .collect()
}

/// Result of the ellipticity / parameter-ellipticity scan.
#[derive(Debug, Clone)]
pub struct EllipticityReport {
    /// Minimum of `|a1(ξ)|` over the sampled unit sphere.
    pub min_elliptic: f64,
    /// Covariable attaining `min_elliptic`.
    pub argmin_elliptic: Vec<f64>,
    /// Minimum of `|a2(ξ, λ)|` over samples of `|ξ|^{2m} + |λ| = 1` with
    /// `λ` in the closed sector.
    pub min_parabolic: f64,
    /// `(ξ, λ)` attaining `min_parabolic`.
    pub argmin_parabolic: (Vec<f64>, C64),
    /// Descriptions of covariables where root splitting failed.
    pub root_split_failures: Vec<String>,
    /// Number of covariables at which root splitting was attempted.
    pub root_splits_checked: usize,
    /// Degeneracy threshold used by [`EllipticityReport::passes`].
    pub threshold: f64,
}

impl EllipticityReport {
    /// Overall verdict: both minima clear the threshold and every sampled
    /// root split came out `(m, m)`.
    pub fn passes(&self) -> bool {
        self.min_elliptic > self.threshold
            && self.min_parabolic > self.threshold
            && self.root_split_failures.is_empty()
    }
}

/// Scan both symbols for ellipticity and proper root splitting.
///
/// `resolution` controls the sampling density (direction count per angular
/// coordinate; 64 is plenty at desk scale).  Sampling is deterministic.
pub fn check_ellipticity(spec: &ProblemSpec, resolution: usize) -> Result<EllipticityReport> {
    let res = resolution.max(8);
    let dirs = unit_sphere(spec.n, res);
    let mut min_elliptic = f64::INFINITY;
    let mut argmin_elliptic = vec![0.0; spec.n];
    for d in &dirs {
        let v = spec.eval_a1(d).norm();
        if v < min_elliptic {
            min_elliptic = v;
            argmin_elliptic = d.clone();
        }
    }

    // Parameter-ellipticity over the compact slice |ξ|^{2m} + |λ| = 1.
    let mut min_parabolic = f64::INFINITY;
    let mut argmin_parabolic = (vec![0.0; spec.n], C64::ZERO);
    let arg_samples = sector_args(spec.theta, 9);
    let s_steps = 2 * res;
    for d in &dirs {
        for si in 0..=s_steps {
            let s = si as f64 / s_steps as f64; // |λ| share
            let xi_len = (1.0 - s).powf(1.0 / (2.0 * spec.m as f64));
            let xi: Vec<f64> = d.iter().map(|x| x * xi_len).collect();
            for &arg in &arg_samples {
                let lambda = c64(s * arg.cos(), s * arg.sin());
                let q = lambda_to_q(lambda, spec.m);
                let v = spec.eval_a2(&xi, q).norm();
                if v < min_parabolic {
                    min_parabolic = v;
                    argmin_parabolic = (xi.clone(), lambda);
                }
            }
        }
    }

    // Root-split spot checks over tangential directions and |q| / |ξ'|
    // ratios (root splitting is scale-invariant, so |ξ'| = 1 suffices).
    let mut failures = Vec::new();
    let mut checked = 0usize;
    let tdirs = unit_sphere(spec.n - 1, res.min(32));
    let ratios = [0.0, 0.5, 1.0, 2.0, 8.0, 32.0];
    let qargs = sector_args(spec.theta / (2.0 * spec.m as f64), 3);
    for d in &tdirs {
        for &ratio in &ratios {
            for &qa in &qargs {
                let q = c64(ratio * qa.cos(), ratio * qa.sin());
                let cov = Covariable::new(spec, d.clone(), q)?;
                for op in [Operator::Elliptic, Operator::Parabolic] {
                    if op == Operator::Elliptic && ratio > 0.0 {
                        continue; // elliptic side does not involve q
                    }
                    checked += 1;
                    if let Err(e) = compute_roots(spec, &cov, op) {
                        failures.push(e.to_string());
                    }
                }
                if q == C64::ZERO {
                    break; // identical for every ray
                }
            }
        }
    }
    failures.dedup();

    Ok(EllipticityReport {
        min_elliptic,
        argmin_elliptic,
        min_parabolic,
        argmin_parabolic,
        root_split_failures: failures,
        root_splits_checked: checked,
        threshold: 1e-9,
    })
}

/// Joint lower-bound constant of the product symbol.
#[derive(Debug, Clone)]
pub struct JointBoundReport {
    /// Largest constant `C` with
    /// `|a1(ξ) a2(ξ, λ)| >= C |ξ|^{2m} (|λ| + |ξ|^{2m})` over the sample
    /// grid.
    pub constant: f64,
    /// `(ξ, λ)` attaining the minimum ratio.
    pub argmin: (Vec<f64>, C64),
    /// Number of grid points sampled.
    pub samples: usize,
}

/// Estimate the joint lower-bound constant of `|a1 · a2|` against
/// `|ξ|^{2m} (|λ| + |ξ|^{2m})` on a deterministic grid.
///
/// The ratio is invariant under the parabolic scaling
/// `(ξ, λ) → (rξ, r^{2m}λ)`, so the grid fixes `|ξ| = 1` and sweeps the
/// ratio `|λ| / |ξ|^{2m}` over a wide geometric range, all sphere
/// directions, and sector rays.  `refine = 2` doubles the density (for
/// stability reporting).
pub fn check_joint_bound(spec: &ProblemSpec, resolution: usize, refine: usize) -> JointBoundReport {
    let arg_samples = sector_args(spec.theta, 4 * refine.max(1) + 1);
    check_joint_bound_with_args(spec, resolution, refine, &arg_samples)
}

/// Same scan with caller-chosen `arg λ` rays (e.g. `&[0.0]` restricts the
/// parameter to the nonnegative real axis, where the Laplace / heat pair
/// attains the ratio exactly 1).
pub fn check_joint_bound_with_args(
    spec: &ProblemSpec,
    resolution: usize,
    refine: usize,
    arg_samples: &[f64],
) -> JointBoundReport {
    let res = (resolution.max(8)) * refine.max(1);
    let dirs = unit_sphere(spec.n, res);
    let mut ratios = vec![0.0f64];
    let steps_per_octave = refine.max(1) as i32;
    for e in (-8 * steps_per_octave)..=(8 * steps_per_octave) {
        ratios.push(2f64.powf(e as f64 / steps_per_octave as f64));
    }
    let mut best = f64::INFINITY;
    let mut argmin = (vec![0.0; spec.n], C64::ZERO);
    let mut samples = 0usize;
    for d in &dirs {
        let a1 = spec.eval_a1(d).norm();
        for &t in &ratios {
            for &arg in arg_samples {
                let lambda = c64(t * arg.cos(), t * arg.sin());
                let q = lambda_to_q(lambda, spec.m);
                let a2 = spec.eval_a2(d, q).norm();
                let ratio = a1 * a2 / (1.0 + t);
                samples += 1;
                if ratio < best {
                    best = ratio;
                    argmin = (d.clone(), lambda);
                }
                if t == 0.0 {
                    break;
                }
            }
        }
    }
    JointBoundReport {
        constant: best,
        argmin,
        samples,
    }
}

/// Small polynomial-in-`(ξ, q)` builder used to assemble product symbols
/// (presets and randomized factor products).
#[derive(Debug, Clone)]
struct SymbolPoly {
    n: usize,
    terms: BTreeMap<(MultiIndex, u32), C64>,
}

impl SymbolPoly {
    fn new(n: usize) -> Self {
        SymbolPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    fn one(n: usize) -> Self {
        let mut s = Self::new(n);
        s.insert(MultiIndex(vec![0; n]), 0, C64::ONE);
        s
    }

    /// `Σ_d ξ_d^2`.
    fn laplace(n: usize) -> Self {
        let mut s = Self::new(n);
        for d in 0..n {
            let mut idx = vec![0u32; n];
            idx[d] = 2;
            s.insert(MultiIndex(idx), 0, C64::ONE);
        }
        s
    }

    /// `q^k`.
    fn q_power(n: usize, k: u32) -> Self {
        let mut s = Self::new(n);
        s.insert(MultiIndex(vec![0; n]), k, C64::ONE);
        s
    }

    fn insert(&mut self, alpha: MultiIndex, k: u32, c: C64) {
        debug_assert_eq!(alpha.len(), self.n);
        *self.terms.entry((alpha, k)).or_insert(C64::ZERO) += c;
    }

    fn add(mut self, other: &SymbolPoly) -> Self {
        for ((a, k), c) in &other.terms {
            self.insert(a.clone(), *k, *c);
        }
        self
    }

    fn scale(mut self, c: C64) -> Self {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    fn mul(&self, other: &SymbolPoly) -> Self {
        let mut out = Self::new(self.n);
        for ((a1, k1), c1) in &self.terms {
            for ((a2, k2), c2) in &other.terms {
                let alpha = MultiIndex(
                    a1.0.iter().zip(&a2.0).map(|(x, y)| x + y).collect(),
                );
                out.insert(alpha, k1 + k2, c1 * c2);
            }
        }
        out
    }

    fn into_a1(self) -> Vec<(MultiIndex, C64)> {
        self.terms
            .into_iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|((a, k), c)| {
                debug_assert_eq!(k, 0, "elliptic symbol must not involve q");
                (a, c)
            })
            .collect()
    }

    fn into_a2(self) -> Vec<(MultiIndex, u32, C64)> {
        self.terms
            .into_iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|((a, k), c)| (a, k, c))
            .collect()
    }
}

/// Deterministic sample of the unit sphere `S^{d-1}` (returns `2d` axis
/// points plus `count` quasi-uniform directions; for `d = 1` just `{±1}`).
pub(crate) fn unit_sphere(d: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(d >= 1);
    if d == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut dirs = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[i] = s;
            dirs.push(v);
        }
    }
    if d == 2 {
        // Plain angular grid: multiples of 2π/count hit the symmetry rays
        // (diagonals, axes) exactly, where degeneracies typically sit.
        for k in 0..count {
            let phi = std::f64::consts::TAU * k as f64 / count as f64;
            dirs.push(vec![phi.cos(), phi.sin()]);
        }
    } else {
        // Deterministic pseudo-random directions for higher dimensions.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_D1Fu64 + d as u64);
        for _ in 0..count * d {
            let mut v: Vec<f64> = (0..d)
                .map(|_| {
                    // Box-Muller from two uniforms.
                    let u1: f64 = rng.random::<f64>().max(1e-12);
                    let u2: f64 = rng.random();
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                v.iter_mut().for_each(|x| *x /= norm);
                dirs.push(v);
            }
        }
    }
    dirs
}

/// Evenly spaced angles filling `[-half_angle, half_angle]` (just `{0}` for
/// a degenerate sector).
pub(crate) fn sector_args(half_angle: f64, count: usize) -> Vec<f64> {
    if half_angle <= 0.0 || count <= 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|k| -half_angle + 2.0 * half_angle * k as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn heat_symbol_value() {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        // a2((0, 1), q = 2) = 1 + 4 = 5
        let v = spec.eval_a2(&[0.0, 1.0], c64(2.0, 0.0));
        assert_relative_eq!(v.re, 5.0, max_relative = 1e-14);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-14);
        // a1 on the unit sphere is identically 1.
        let s = 0.6f64;
        let v1 = spec.eval_a1(&[s, (1.0 - s * s).sqrt()]);
        assert_relative_eq!(v1.re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn laplacian_root_split() {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![2.0], C64::ZERO).unwrap();
        let split = compute_roots(&spec, &cov, Operator::Elliptic).unwrap();
        assert_eq!(split.plus.len(), 1);
        assert_eq!(split.minus.len(), 1);
        // roots ± i|ξ'| = ± 2i
        assert_relative_eq!(split.plus[0].0.im, 2.0, max_relative = 1e-12);
        assert_relative_eq!(split.plus[0].0.re, 0.0, epsilon = 1e-12);
        assert!(split.factorization_residual() < 1e-12);
    }

    #[test]
    fn heat_root_split_with_parameter() {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![3.0], c64(4.0, 0.0)).unwrap();
        let split = compute_roots(&spec, &cov, Operator::Parabolic).unwrap();
        // τ = ± i sqrt(9 + 16) = ± 5i
        assert_relative_eq!(split.plus[0].0.im, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn bilaplacian_double_roots_cluster() {
        let spec = ProblemSpec::bilaplacian_heat_squared(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.5], C64::ZERO).unwrap();
        let split = compute_roots(&spec, &cov, Operator::Elliptic).unwrap();
        assert_eq!(split.plus.len(), 1, "double root must form one cluster");
        assert_eq!(split.plus[0].1, 2);
        assert_relative_eq!(split.plus[0].0.im, 1.5, max_relative = 1e-10);
        let res = split.factorization_residual();
        assert!(
            res < 1e-10,
            "residual {res:e}, plus {:?}, minus {:?}",
            split.plus,
            split.minus
        );
        // Parabolic side doubles as well.
        let cov = Covariable::new(&spec, vec![3.0], c64(2.0, 0.0)).unwrap();
        let split = compute_roots(&spec, &cov, Operator::Parabolic).unwrap();
        assert_eq!(split.plus[0].1, 2);
        assert_relative_eq!(split.plus[0].0.im, (9.0f64 + 4.0).sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn hyperbolic_symbol_fails_root_split() {
        let spec = ProblemSpec::hyperbolic_demo(2, FRAC_PI_2);
        let cov = Covariable::new(&spec, vec![1.0], C64::ZERO).unwrap();
        let err = compute_roots(&spec, &cov, Operator::Elliptic).unwrap_err();
        assert!(matches!(err, Error::RootsOnRealAxis { .. }), "got {err}");
    }

    #[test]
    fn sector_membership_enforced() {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        // θ/2m = π/4; arg q = 1.0 > π/4 must be rejected.
        let q = c64(1.0f64.cos(), 1.0f64.sin());
        assert!(Covariable::new(&spec, vec![1.0], q).is_err());
        let q_ok = c64(FRAC_PI_2.cos() / 2.0, FRAC_PI_2.sin() / 2.0); // not in sector either
        assert!(Covariable::new(&spec, vec![1.0], q_ok).is_err());
        let q_in = c64(1.0, 0.9); // arg ≈ 0.733 < π/4? no: 0.733 < 0.785 ✓
        assert!(Covariable::new(&spec, vec![1.0], q_in).is_ok());
    }

    #[test]
    fn ellipticity_scan_on_presets() {
        let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
        let report = check_ellipticity(&spec, 64).unwrap();
        assert!(report.passes());
        assert_relative_eq!(report.min_elliptic, 1.0, max_relative = 1e-12);
        // For θ = π/2 the worst case is λ = ± i s against |ξ|^2 = 1 - s:
        // min over s of |(1-s) + i s| = 1/sqrt(2).
        assert_relative_eq!(
            report.min_parabolic,
            0.5f64.sqrt(),
            max_relative = 1e-3
        );

        let bad = ProblemSpec::hyperbolic_demo(2, FRAC_PI_2);
        let report = check_ellipticity(&bad, 64).unwrap();
        assert!(!report.passes());
        assert!(report.min_elliptic < 1e-2);
        // The minimum sits near the diagonal ray (|ξ_1| = |ξ_n|).
        let loc = &report.argmin_elliptic;
        assert!((loc[0].abs() - loc[1].abs()).abs() < 0.1, "argmin {loc:?}");
        assert!(!report.root_split_failures.is_empty());
    }

    #[test]
    fn joint_bound_is_one_for_heat_pair() {
        let spec = ProblemSpec::laplacian_heat(2, 0.0);
        // For λ >= 0 real: |ξ|^2 (|ξ|^2 + λ) matches the normalizer exactly.
        let report = check_joint_bound(&spec, 16, 1);
        assert_relative_eq!(report.constant, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn random_elliptic_pairs_pass_checks() {
        for seed in 0..5u64 {
            for (m, doubled) in [(1, false), (2, false), (2, true)] {
                let spec = ProblemSpec::random_elliptic(m, 2, FRAC_PI_2, seed, doubled);
                let report = check_ellipticity(&spec, 24).unwrap();
                assert!(
                    report.passes(),
                    "seed {seed}, m {m}, doubled {doubled}: {report:?}"
                );
            }
        }
    }

    #[test]
    fn doubled_random_spec_has_double_roots() {
        let spec = ProblemSpec::random_elliptic(2, 2, FRAC_PI_2, 7, true);
        let cov = Covariable::new(&spec, vec![1.0], c64(0.5, 0.2)).unwrap();
        let split = compute_roots(&spec, &cov, Operator::Parabolic).unwrap();
        assert!(
            split.plus.iter().all(|(_, k)| *k == 2),
            "expected double stable roots, got {:?}",
            split.plus
        );
    }

    proptest! {
        #[test]
        fn elliptic_symbol_homogeneous(
            x in -3.0f64..3.0, y in 0.2f64..3.0, r in 0.1f64..10.0
        ) {
            let spec = ProblemSpec::bilaplacian_heat_squared(2, FRAC_PI_2);
            let base = spec.eval_a1(&[x, y]);
            let scaled = spec.eval_a1(&[r * x, r * y]);
            let factor = r.powi(4);
            prop_assert!((scaled - base * c64(factor, 0.0)).norm() <= 1e-10 * base.norm() * factor);
        }

        #[test]
        fn parabolic_symbol_jointly_homogeneous(
            x in -3.0f64..3.0, y in 0.2f64..3.0, qm in 0.1f64..3.0, r in 0.1f64..10.0
        ) {
            let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
            let q = c64(qm, 0.0);
            let base = spec.eval_a2(&[x, y], q);
            let scaled = spec.eval_a2(&[r * x, r * y], q * c64(r, 0.0));
            let factor = r.powi(2);
            prop_assert!((scaled - base * c64(factor, 0.0)).norm() <= 1e-10 * base.norm().max(1.0) * factor);
        }

        #[test]
        fn roots_scale_linearly(mag in 0.2f64..5.0) {
            // Stable roots of the heat symbol at (|ξ'|, q) = (mag, mag) are
            // mag * roots at (1, 1).
            let spec = ProblemSpec::laplacian_heat(2, FRAC_PI_2);
            let base = compute_roots(
                &spec,
                &Covariable::new(&spec, vec![1.0], C64::ONE).unwrap(),
                Operator::Parabolic,
            ).unwrap();
            let scaled = compute_roots(
                &spec,
                &Covariable::new(&spec, vec![mag], c64(mag, 0.0)).unwrap(),
                Operator::Parabolic,
            ).unwrap();
            let b = base.plus[0].0 * c64(mag, 0.0);
            prop_assert!((scaled.plus[0].0 - b).norm() <= 1e-9 * mag);
        }
    }
}
