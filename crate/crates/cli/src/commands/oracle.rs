//! Per-frequency comparison of the exact exponential-sum solution against
//! the banded finite-difference oracle, including the observed convergence
//! order under step halving.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use transmission_core::halfspace::oracle::oracle_compare;
use transmission_core::symbols::Covariable;
use transmission_core::{c64, C64};

use crate::commands::fundamental::default_q;
use crate::config::RunConfig;
use crate::report::{fmt_f64, Table};
use crate::CliError;

/// Tangential frequencies of the comparison table.
const XIS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Minimum acceptable observed order of an order-2 scheme.
const MIN_ORDER: f64 = 1.6;

pub fn run(cfg: &RunConfig, h: f64, tolerance: f64) -> Result<bool, CliError> {
    if !(h > 0.0) {
        return Err(CliError::Invalid(format!("--h must be positive, got {h}")));
    }
    let spec = &cfg.spec;
    let q = default_q(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sweep.seed);
    let g: Vec<C64> = (0..2 * spec.m)
        .map(|_| {
            c64(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();

    let mut t = Table::new("xi,h,rel_err_side1,rel_err_side2,worst,worst_half_h,observed_order");
    t.meta("q_re", &fmt_f64(q.re));
    t.meta("q_im", &fmt_f64(q.im));
    t.meta("seed", &cfg.sweep.seed.to_string());
    let mut worst = 0.0f64;
    let mut min_order = f64::INFINITY;
    for &xi in &XIS {
        let cov = Covariable::new(spec, vec![xi], q)?;
        let coarse = oracle_compare(spec, &cov, &g, h)?;
        let fine = oracle_compare(spec, &cov, &g, h / 2.0)?;
        let order = (coarse.worst() / fine.worst()).log2();
        worst = worst.max(coarse.worst());
        min_order = min_order.min(order);
        t.row(&format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(xi),
            fmt_f64(h),
            fmt_f64(coarse.rel_err_side1),
            fmt_f64(coarse.rel_err_side2),
            fmt_f64(coarse.worst()),
            fmt_f64(fine.worst()),
            fmt_f64(order)
        ));
        println!(
            "xi = {xi:>4}: rel err {:.3e} at h = {h:e}, {:.3e} at h/2, observed order {order:.2}",
            coarse.worst(),
            fine.worst()
        );
    }
    let path = t.write(&cfg.out_dir, "oracle_compare.csv")?;
    println!("wrote {}", path.display());

    let mut failures = Vec::new();
    if worst > tolerance {
        failures.push(format!(
            "worst relative error {worst:.3e} exceeds {tolerance:.1e}"
        ));
    }
    if min_order < MIN_ORDER {
        failures.push(format!(
            "observed order {min_order:.2} below {MIN_ORDER} (scheme is second order)"
        ));
    }
    if failures.is_empty() {
        println!("oracle-compare: pass");
        Ok(true)
    } else {
        println!("oracle-compare: FAIL ({})", failures.join("; "));
        Ok(false)
    }
}
