//! One-sided Hilbert operator and empirical `L^p` operator constants.
//!
//! The kernels of the layer-potential operators on the half-line are
//! dominated by `1/(x + y)`, so `L^p` bounds for the classical operator
//! `(Hφ)(x) = ∫_0^∞ φ(y)/(x + y) dy` transfer to them.  Everything here is
//! plain quadrature against caller-supplied nodes and weights; the `L^p`
//! constant estimator probes an arbitrary kernel operator with a fixed
//! deterministic function family and reports the worst norm ratio observed.

use crate::{c64, C64};

/// Apply `(Hφ)(x_i) = Σ_j w_j φ(y_j) / (x_i + y_j)`.
///
/// `nodes_in`/`weights_in` describe the integration rule for `φ`, `x_out`
/// the evaluation points.  Callers must keep `x_i + y_j > 0`.
pub fn hilbert_apply(
    nodes_in: &[f64],
    weights_in: &[f64],
    phi: &[C64],
    x_out: &[f64],
) -> Vec<C64> {
    assert_eq!(nodes_in.len(), weights_in.len());
    assert_eq!(nodes_in.len(), phi.len());
    x_out
        .iter()
        .map(|&x| {
            let mut acc = C64::ZERO;
            for ((&y, &w), &p) in nodes_in.iter().zip(weights_in).zip(phi) {
                acc += p * c64(w / (x + y), 0.0);
            }
            acc
        })
        .collect()
}

/// Discrete `L^p` norm `(Σ w_i |v_i|^p)^{1/p}`.
pub fn lp_norm_grid(weights: &[f64], values: &[C64], p: f64) -> f64 {
    weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * v.norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Uniform trapezoid rule on `[a, b]` with `count` intervals.
pub fn trapezoid_rule(a: f64, b: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / count as f64;
    let nodes: Vec<f64> = (0..=count).map(|i| a + h * i as f64).collect();
    let mut weights = vec![h; count + 1];
    weights[0] = h / 2.0;
    weights[count] = h / 2.0;
    (nodes, weights)
}

/// Deterministic probe family on the half-line rule `nodes`: decaying
/// exponentials, algebraic tails, and shifted bumps — enough variety to
/// expose an unbounded operator while staying reproducible.
pub fn probe_family(nodes: &[f64]) -> Vec<Vec<C64>> {
    let shapes: Vec<Box<dyn Fn(f64) -> f64>> = vec![
        Box::new(|y: f64| (-y).exp()),
        Box::new(|y: f64| (-0.25 * y).exp()),
        Box::new(|y: f64| y * (-y).exp()),
        Box::new(|y: f64| 1.0 / (1.0 + y * y)),
        Box::new(|y: f64| 1.0 / (1.0 + y).powf(1.5)),
        Box::new(|y: f64| (-(y - 2.0) * (y - 2.0)).exp()),
        Box::new(|y: f64| (-(y - 0.5) * (y - 0.5) * 16.0).exp()),
    ];
    shapes
        .iter()
        .map(|f| nodes.iter().map(|&y| c64(f(y), 0.0)).collect())
        .collect()
}

/// Worst observed `‖Tφ‖_p / ‖φ‖_p` over a probe family, for an operator
/// given as values-on-nodes → values-on-nodes.
pub fn lp_operator_constant(
    mut apply: impl FnMut(&[C64]) -> Vec<C64>,
    weights: &[f64],
    probes: &[Vec<C64>],
    p: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for phi in probes {
        let denom = lp_norm_grid(weights, phi, p);
        if denom == 0.0 {
            continue;
        }
        let out = apply(phi);
        worst = worst.max(lp_norm_grid(weights, &out, p) / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_spot_value() {
        // φ = 1 on [1, 2]: (Hφ)(x) = ln((x+2)/(x+1)); at x = 1 this is ln(3/2).
        let (nodes, weights) = trapezoid_rule(1.0, 2.0, 8000);
        let phi = vec![C64::ONE; nodes.len()];
        let out = hilbert_apply(&nodes, &weights, &phi, &[1.0, 0.0]);
        assert!((out[0].re - (1.5f64).ln()).abs() < 1e-8, "{}", out[0].re);
        assert!((out[1].re - (2.0f64).ln()).abs() < 1e-8);
        assert!(out[0].im.abs() < 1e-15);
    }

    #[test]
    fn lp_constant_finite_and_below_theory() {
        // On [0, 20] with a modest rule, the p = 2 constant must stay below
        // the exact half-line bound π/sin(π/2) = π.
        let (nodes, weights) = trapezoid_rule(1e-3, 20.0, 4000);
        let probes = probe_family(&nodes);
        let c2 = lp_operator_constant(
            |phi| hilbert_apply(&nodes, &weights, phi, &nodes),
            &weights,
            &probes,
            2.0,
        );
        assert!(c2 > 0.5 && c2 < std::f64::consts::PI, "c2 = {c2}");
        // p = 4: bound π/sin(π/4) = π√2.
        let c4 = lp_operator_constant(
            |phi| hilbert_apply(&nodes, &weights, phi, &nodes),
            &weights,
            &probes,
            4.0,
        );
        assert!(c4 > 0.5 && c4 < std::f64::consts::PI * std::f64::consts::SQRT_2);
    }
}
