//! Per-covariable construction: characteristic roots, basic solutions with
//! a contour-integral certification route, interface inverse with a
//! Schur-complement certification route, Wronskian conditioning.

use transmission_core::multipliers::scaled_coupling;
use transmission_core::ode::{
    basic_solutions, coupling_set, fundamental_solution, residue_basic_solutions, wronskian,
};
use transmission_core::symbols::{compute_roots, Covariable, Operator};
use transmission_core::{c64, C64};

use crate::config::{parse_complex, RunConfig};
use crate::report::{display_c64, fmt_c64, fmt_f64, Table};
use crate::CliError;

/// Acceptable deviation of the interface rows from the identity.
const NORMALIZATION_TOL: f64 = 1e-10;

pub fn run(cfg: &RunConfig, xi: f64, q_str: &str, nodes: usize) -> Result<bool, CliError> {
    let q = parse_complex(q_str).map_err(|m| CliError::Invalid(format!("--q: {m}")))?;
    if xi == 0.0 {
        return Err(CliError::Invalid(
            "--xi must be nonzero (the interface calculus needs |xi'| > 0)".to_string(),
        ));
    }
    let spec = &cfg.spec;
    let m = spec.m;
    let cov = Covariable::new(spec, vec![xi], q)?;

    // Characteristic roots of both sides.
    let mut roots = Table::new("side,half,re,im,multiplicity");
    for (side, op) in [(1, Operator::Elliptic), (2, Operator::Parabolic)] {
        let split = compute_roots(spec, &cov, op)?;
        for &(r, mult) in &split.plus {
            roots.row(&format!("{side},plus,{},{mult}", fmt_c64(r)));
        }
        for &(r, mult) in &split.minus {
            roots.row(&format!("{side},minus,{},{mult}", fmt_c64(r)));
        }
    }
    roots.write(&cfg.out_dir, "roots.csv")?;

    // Basic solutions, certified against the contour-integral route.
    let y1 = basic_solutions(spec, &cov, Operator::Elliptic)?;
    let y2 = basic_solutions(spec, &cov, Operator::Parabolic)?;
    let r1 = residue_basic_solutions(spec, &cov, Operator::Elliptic, nodes)?;
    let r2 = residue_basic_solutions(spec, &cov, Operator::Parabolic, nodes)?;
    let min_rate = y1
        .columns
        .iter()
        .chain(&y2.columns)
        .map(|c| c.decay_rate())
        .fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = (0..=32).map(|j| j as f64 * 4.0 / (32.0 * min_rate)).collect();
    let mut route_rel = [0.0f64; 2];
    for (idx, (name, basis, residue)) in
        [("y1.csv", &y1, &r1), ("y2.csv", &y2, &r2)].iter().enumerate()
    {
        let mut t = Table::new("col,x,exact_re,exact_im,contour_re,contour_im,abs_diff");
        let mut scale = 0.0f64;
        let mut diff = 0.0f64;
        for (k, col) in basis.columns.iter().enumerate() {
            for &x in &xs {
                let e = col.eval(x);
                let c = residue.eval(k, x);
                scale = scale.max(e.norm());
                diff = diff.max((e - c).norm());
                t.row(&format!(
                    "{k},{},{},{},{}",
                    fmt_f64(x),
                    fmt_c64(e),
                    fmt_c64(c),
                    fmt_f64((e - c).norm())
                ));
            }
        }
        route_rel[idx] = diff / scale.max(f64::MIN_POSITIVE);
        t.write(&cfg.out_dir, name)?;
    }

    // Interface inverse by the direct route, certified by the Schur route.
    let coupling = coupling_set(spec, &cov)?;
    let sc = scaled_coupling(spec, &cov)?;
    let mut psi = Table::new("row,col,direct_re,direct_im,schur_re,schur_im,abs_diff");
    let mut psi_scale = 0.0f64;
    let mut psi_diff = 0.0f64;
    for r in 0..2 * m {
        for c in 0..2 * m {
            let d = coupling.psi[(r, c)];
            let s = sc.psi_schur[(r, c)];
            psi_scale = psi_scale.max(d.norm());
            psi_diff = psi_diff.max((d - s).norm());
            psi.row(&format!(
                "{r},{c},{},{},{}",
                fmt_c64(d),
                fmt_c64(s),
                fmt_f64((d - s).norm())
            ));
        }
    }
    let psi_rel = psi_diff / psi_scale.max(f64::MIN_POSITIVE);
    psi.write(&cfg.out_dir, "psi.csv")?;

    let s_inv_norm = sc.s.inverse("Schur complement")?.op_norm_2();
    let mut s_table = Table::new("row,col,re,im");
    s_table.meta("perturbation_norm_2", &fmt_f64(sc.perturbation.op_norm_2()));
    s_table.meta("s_inv_norm_2", &fmt_f64(s_inv_norm));
    for r in 0..m {
        for c in 0..m {
            s_table.row(&format!("{r},{c},{}", fmt_c64(sc.s[(r, c)])));
        }
    }
    s_table.write(&cfg.out_dir, "s.csv")?;

    // Raw boundary-value conditioning of each side.
    let w1 = wronskian(spec, &cov, Operator::Elliptic)?;
    let w2 = wronskian(spec, &cov, Operator::Parabolic)?;
    let mut wt = Table::new("side,det_re,det_im,abs_det,cond");
    for (side, w) in [(1, &w1), (2, &w2)] {
        wt.row(&format!(
            "{side},{},{},{}",
            fmt_c64(w.det),
            fmt_f64(w.det.norm()),
            fmt_f64(w.cond)
        ));
    }
    wt.write(&cfg.out_dir, "wronskian.csv")?;

    let omega = fundamental_solution(spec, &cov)?;
    let boundary_residual = omega.boundary_residual(spec);
    let ode_residual = omega.ode_residual(&xs);

    let mut summary = Table::new("quantity,value");
    let rows: Vec<(&str, f64)> = vec![
        ("xi", xi),
        ("q_re", q.re),
        ("q_im", q.im),
        ("rho", cov.rho()),
        ("y1_route_rel", route_rel[0]),
        ("y2_route_rel", route_rel[1]),
        ("psi_route_rel", psi_rel),
        ("boundary_residual", boundary_residual),
        ("ode_residual", ode_residual),
        ("y1_cond", y1.cond),
        ("y2_cond", y2.cond),
        ("coupling_cond", coupling.cond),
        ("wronskian_abs_det_1", w1.det.norm()),
        ("wronskian_abs_det_2", w2.det.norm()),
        ("s_inv_norm_2", s_inv_norm),
        ("contour_nodes", nodes as f64),
    ];
    for (k, v) in rows {
        summary.row(&format!("{k},{}", fmt_f64(v)));
    }
    summary.write(&cfg.out_dir, "fundamental_summary.csv")?;

    println!(
        "covariable: xi' = {xi}, q = {}, rho = {:.6}",
        display_c64(q),
        cov.rho()
    );
    println!(
        "basic-solution routes: rel diff {:.3e} (side 1), {:.3e} (side 2)",
        route_rel[0], route_rel[1]
    );
    println!("interface-inverse routes: rel diff {:.3e}", psi_rel);
    println!(
        "normalization: boundary residual {:.3e}, ode residual {:.3e}",
        boundary_residual, ode_residual
    );
    println!(
        "wronskian: |det| = {:.3e} / {:.3e}, cond = {:.2e} / {:.2e}",
        w1.det.norm(),
        w2.det.norm(),
        w1.cond,
        w2.cond
    );
    println!("wrote roots.csv y1.csv y2.csv psi.csv s.csv wronskian.csv fundamental_summary.csv in {}", cfg.out_dir.display());

    let mut failures = Vec::new();
    if route_rel[0] > cfg.tol.route_y || route_rel[1] > cfg.tol.route_y {
        failures.push(format!(
            "basic-solution route disagreement {:.3e} exceeds {:.1e}",
            route_rel[0].max(route_rel[1]),
            cfg.tol.route_y
        ));
    }
    if psi_rel > cfg.tol.route_psi {
        failures.push(format!(
            "interface-inverse route disagreement {psi_rel:.3e} exceeds {:.1e}",
            cfg.tol.route_psi
        ));
    }
    if boundary_residual > NORMALIZATION_TOL {
        failures.push(format!(
            "boundary residual {boundary_residual:.3e} exceeds {NORMALIZATION_TOL:.1e}"
        ));
    }
    if !(w1.det.norm() > 0.0 && w2.det.norm() > 0.0) {
        failures.push("a Wronskian determinant vanishes".to_string());
    }
    if failures.is_empty() {
        println!("fundamental: pass");
        Ok(true)
    } else {
        println!("fundamental: FAIL ({})", failures.join("; "));
        Ok(false)
    }
}

/// Shared helper: first sweep magnitude on the configured ray.
pub fn default_q(cfg: &RunConfig) -> C64 {
    let mag = cfg.sweep.q_values.first().copied().unwrap_or(1.0);
    c64(
        mag * cfg.sweep.ray.cos(),
        mag * cfg.sweep.ray.sin(),
    )
}
