//! Finite-difference weights on arbitrary node sets (Fornberg recursion).
//!
//! Used by the normal-direction derivative stencils of the norm module and
//! by the banded finite-difference oracle.  For a window of `w` nodes the
//! derivative of order `d` is reproduced with consistency order at least
//! `w - d` (better on symmetric windows).

/// Weights of the `m`-th derivative at evaluation point `z` for the given
/// nodes: returns `w` with `f^(m)(z) ~ sum_i w[i] * f(x[i])`.
///
/// Nodes must be pairwise distinct; `m < x.len()` is required.
pub fn weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    all_orders(z, x, m).pop().expect("order within range")
}

/// Weights for every derivative order `0..=m` at once: `res[d][i]` is the
/// weight of node `i` for derivative order `d`.
pub fn all_orders(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(m < n, "need more than {m} nodes for derivative order {m}");
    // c[i][k]: weight of node i for derivative order k.
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            debug_assert!(c3 != 0.0, "repeated node in stencil");
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * ((k as f64) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - (k as f64) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    // Transpose to [order][node].
    (0..=m)
        .map(|k| (0..n).map(|i| c[i][k]).collect())
        .collect()
}

/// Index window of `width` nodes out of `0..len` centered as well as
/// possible on `center`, clipped to the boundary.
pub fn window(center: usize, width: usize, len: usize) -> std::ops::Range<usize> {
    assert!(width <= len, "stencil wider than grid");
    let half = width / 2;
    let start = center.saturating_sub(half).min(len - width);
    start..start + width
}
