//! Parameter sweeps of the a-priori estimates: homogeneous (jump-data-only)
//! and full-problem forms, ratio plateaus, a strengthened-inequality
//! companion column and optional tangential-refinement stability.

use transmission_core::halfspace::estimates::{
    full_problem_sweep, homogeneous_sweep, probe_jump_data, FullSweep, HomogeneousSweep,
};
use transmission_core::halfspace::grid::{BoundaryField, GridSpec, XnGrid};
use transmission_core::symbols::check_ellipticity;

use crate::commands::check::fmt_vec;
use crate::config::RunConfig;
use crate::report::{fmt_f64, Table};
use crate::CliError;

fn grid_for(cfg: &RunConfig, n_tan: usize) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(
        cfg.grid.period,
        n_tan,
        XnGrid::graded(cfg.grid.xn_count, cfg.grid.x_max, cfg.grid.grading),
    )?)
}

fn write_homogeneous(cfg: &RunConfig, name: &str, sweep: &HomogeneousSweep) -> Result<(), CliError> {
    let mut t = Table::new(
        "q,lhs_plain,rhs_plain,ratio_plain,lhs_param,rhs_param,ratio_param,lhs_strength,ratio_strength",
    );
    for p in &sweep.points {
        t.row(&format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.q_abs),
            fmt_f64(p.lhs_plain),
            fmt_f64(p.rhs_plain),
            fmt_f64(p.ratio_plain()),
            fmt_f64(p.lhs_param),
            fmt_f64(p.rhs_param),
            fmt_f64(p.ratio_param()),
            fmt_f64(p.lhs_strength),
            fmt_f64(p.ratio_strength())
        ));
    }
    t.write(&cfg.out_dir, name)?;
    Ok(())
}

fn write_full(cfg: &RunConfig, name: &str, sweep: &FullSweep) -> Result<(), CliError> {
    let mut t = Table::new("q,lhs_plain,rhs_plain,ratio_plain,lhs_param,rhs_param,ratio_param");
    for p in &sweep.points {
        t.row(&format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(p.q_abs),
            fmt_f64(p.lhs_plain),
            fmt_f64(p.rhs_plain),
            fmt_f64(p.ratio_plain()),
            fmt_f64(p.lhs_param),
            fmt_f64(p.rhs_param),
            fmt_f64(p.ratio_param())
        ));
    }
    t.write(&cfg.out_dir, name)?;
    Ok(())
}

pub fn run(cfg: &RunConfig, force: bool, refine: bool) -> Result<bool, CliError> {
    let spec = &cfg.spec;
    let gate = check_ellipticity(spec, cfg.check.resolution)?;
    if !gate.passes() {
        let msg = format!(
            "ellipticity gate failed (min |a1| = {:.3e} at {}, min |a2| = {:.3e}, {} root-split failures)",
            gate.min_elliptic,
            fmt_vec(&gate.argmin_elliptic),
            gate.min_parabolic,
            gate.root_split_failures.len()
        );
        if !force {
            return Err(CliError::Invalid(format!(
                "{msg}; pass --force to sweep anyway"
            )));
        }
        println!("warning: {msg}; continuing under --force");
    }

    let grid = grid_for(cfg, cfg.grid.n_tan)?;
    let band = (cfg.grid.n_tan / 8).clamp(1, 4);
    let g = probe_jump_data(spec, cfg.grid.period, cfg.grid.n_tan, band, cfg.sweep.seed);
    let hom = homogeneous_sweep(
        spec,
        &grid,
        &g,
        cfg.sweep.ray,
        &cfg.sweep.q_values,
        cfg.sweep.p,
    )?;
    write_homogeneous(cfg, "estimates_homogeneous.csv", &hom)?;

    let full = full_problem_sweep(
        spec,
        &grid,
        cfg.grid.n_norm,
        cfg.sweep.ray,
        &cfg.sweep.q_values,
        cfg.sweep.p,
        cfg.sweep.seed,
    )?;
    write_full(cfg, "estimates_full.csv", &full)?;

    // Zero data must give an exactly zero left-hand side.
    let zero_g: Vec<BoundaryField> = (0..2 * spec.m)
        .map(|_| BoundaryField::zeros(cfg.grid.period, cfg.grid.n_tan))
        .collect();
    let zero = homogeneous_sweep(
        spec,
        &grid,
        &zero_g,
        cfg.sweep.ray,
        &cfg.sweep.q_values[..1],
        cfg.sweep.p,
    )?;
    let zero_lhs = zero.points[0]
        .lhs_plain
        .max(zero.points[0].lhs_param)
        .max(zero.points[0].lhs_strength);

    // Optional tangential refinement (same probe coefficients, double N).
    let refined = if refine {
        let grid2 = grid_for(cfg, 2 * cfg.grid.n_tan)?;
        let g2 = probe_jump_data(
            spec,
            cfg.grid.period,
            2 * cfg.grid.n_tan,
            band,
            cfg.sweep.seed,
        );
        let hom2 = homogeneous_sweep(
            spec,
            &grid2,
            &g2,
            cfg.sweep.ray,
            &cfg.sweep.q_values,
            cfg.sweep.p,
        )?;
        write_homogeneous(cfg, "estimates_homogeneous_refined.csv", &hom2)?;
        Some(hom2)
    } else {
        None
    };

    let mut summary = Table::new("quantity,value");
    let mut rows: Vec<(&str, f64)> = vec![
        ("hom_plateau_plain", hom.plateau_plain()),
        ("hom_plateau_param", hom.plateau_param()),
        ("hom_max_ratio", hom.max_ratio()),
        ("hom_strength_growth", hom.strength_growth()),
        (
            "hom_strength_monotone",
            if hom.strength_monotone() { 1.0 } else { 0.0 },
        ),
        ("full_plateau_plain", full.plateau_plain()),
        ("full_plateau_param", full.plateau_param()),
        ("full_max_ratio", full.max_ratio()),
        ("zero_data_lhs", zero_lhs),
    ];
    let refinement_change = refined.as_ref().map(|hom2| {
        (hom2.max_ratio() - hom.max_ratio()).abs() / hom.max_ratio().max(f64::MIN_POSITIVE)
    });
    if let (Some(hom2), Some(change)) = (&refined, refinement_change) {
        rows.push(("refined_max_ratio", hom2.max_ratio()));
        rows.push(("refinement_rel_change", change));
    }
    for (k, v) in &rows {
        summary.row(&format!("{k},{}", fmt_f64(*v)));
    }
    summary.write(&cfg.out_dir, "estimates_summary.csv")?;

    println!(
        "homogeneous sweep ({} points, |q| in [{}, {}]): plateau {:.3} (plain) / {:.3} (param), max ratio {:.4}",
        hom.points.len(),
        cfg.sweep.q_values.first().unwrap(),
        cfg.sweep.q_values.last().unwrap(),
        hom.plateau_plain(),
        hom.plateau_param(),
        hom.max_ratio()
    );
    println!(
        "strengthened companion: ratio grows {:.2}x across the sweep ({})",
        hom.strength_growth(),
        if hom.strength_monotone() {
            "monotone"
        } else {
            "not monotone"
        }
    );
    println!(
        "full-problem sweep: plateau {:.3} (plain) / {:.3} (param), max ratio {:.4}",
        full.plateau_plain(),
        full.plateau_param(),
        full.max_ratio()
    );
    println!("zero-data left-hand side: {zero_lhs:e}");
    if let Some(change) = refinement_change {
        println!(
            "tangential refinement {} -> {}: max ratio changes {:.2e}",
            cfg.grid.n_tan,
            2 * cfg.grid.n_tan,
            change
        );
    }

    let mut failures = Vec::new();
    for (name, plateau) in [
        ("homogeneous plain", hom.plateau_plain()),
        ("homogeneous param", hom.plateau_param()),
        ("full plain", full.plateau_plain()),
        ("full param", full.plateau_param()),
    ] {
        if !(plateau <= cfg.tol.plateau) {
            failures.push(format!(
                "{name} plateau {plateau:.3} exceeds {}",
                cfg.tol.plateau
            ));
        }
    }
    if zero_lhs != 0.0 {
        failures.push(format!("zero data left a nonzero LHS {zero_lhs:e}"));
    }
    if let Some(change) = refinement_change {
        if change > cfg.tol.refinement {
            failures.push(format!(
                "max ratio moved {change:.2e} under refinement (allowed {:.2e})",
                cfg.tol.refinement
            ));
        }
    }
    if failures.is_empty() {
        println!("estimates: pass");
        Ok(true)
    } else {
        println!("estimates: FAIL ({})", failures.join("; "));
        Ok(false)
    }
}
