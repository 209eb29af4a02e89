//! Full-problem solves: manufactured problems with recovery error, re-solves
//! from dumped field files, and a homogeneous-only mode cross-checked
//! against the dedicated homogeneous solver.

use std::path::Path;

use ndarray::Array2;
use transmission_core::halfspace::estimates::probe_jump_data;
use transmission_core::halfspace::grid::{BoundaryField, WholeField};
use transmission_core::halfspace::solve::{
    apply_elliptic, apply_parabolic_reflected, manufactured_problem, solve_full,
    solve_homogeneous, InteriorData, ZeroModePolicy,
};
use transmission_core::{c64, C64};

use crate::commands::fundamental::default_q;
use crate::config::{parse_complex, RunConfig};
use crate::report::{display_c64, fmt_c64, fmt_f64, Table};
use crate::CliError;

/// Agreement bound between the zero-data full solve and the homogeneous
/// solver (identical computation path, so exact).
const AGREEMENT_TOL: f64 = 1e-12;

pub fn run(
    cfg: &RunConfig,
    q_flag: Option<&str>,
    fields: Option<&Path>,
    homogeneous: bool,
) -> Result<bool, CliError> {
    if homogeneous && fields.is_some() {
        return Err(CliError::Invalid(
            "--homogeneous and --fields are mutually exclusive".to_string(),
        ));
    }
    let q = match q_flag {
        Some(s) => {
            let q = parse_complex(s).map_err(|m| CliError::Invalid(format!("--q: {m}")))?;
            let half = cfg.spec.theta / (2.0 * cfg.spec.m as f64);
            if q.arg().abs() > half + 1e-12 {
                return Err(CliError::Invalid(format!(
                    "--q lies outside the parameter sector (|arg q| <= {half:.6})"
                )));
            }
            q
        }
        None => default_q(cfg),
    };
    if homogeneous {
        run_homogeneous(cfg, q)
    } else if let Some(dir) = fields {
        run_from_fields(cfg, dir)
    } else {
        run_manufactured(cfg, q)
    }
}

fn run_manufactured(cfg: &RunConfig, q: C64) -> Result<bool, CliError> {
    let spec = &cfg.spec;
    let man = manufactured_problem(
        spec,
        cfg.grid.period,
        cfg.grid.x_max,
        cfg.grid.n_tan,
        cfg.grid.n_norm,
        q,
        cfg.sweep.seed,
    )?;
    let sol = solve_full(
        spec,
        InteriorData::KnownExtension {
            u1: &man.u1,
            u2_reflected: &man.u2_reflected,
        },
        &man.g,
        q,
        ZeroModePolicy::Reject,
    )?;

    // Recovery against the exact manufactured solution on a sample grid.
    let (xs, ys) = sample_points(cfg);
    let mut scale1 = 0.0f64;
    let mut scale2 = 0.0f64;
    let mut err1 = 0.0f64;
    let mut err2 = 0.0f64;
    for &x in &xs {
        for &y in &ys {
            let e1 = man.eval_u1(x, y);
            let e2 = man.eval_u2_reflected(x, y);
            scale1 = scale1.max(e1.norm());
            scale2 = scale2.max(e2.norm());
            err1 = err1.max((sol.eval_u1(x, y) - e1).norm());
            err2 = err2.max((sol.eval_u2_reflected(x, y) - e2).norm());
        }
    }
    let rec1 = err1 / scale1.max(f64::MIN_POSITIVE);
    let rec2 = err2 / scale2.max(f64::MIN_POSITIVE);

    dump_whole_field(cfg, "u1.csv", &man.u1)?;
    dump_whole_field(cfg, "u2_reflected.csv", &man.u2_reflected)?;
    dump_whole_field(cfg, "f1.csv", &man.f1)?;
    dump_whole_field(cfg, "f2_reflected.csv", &man.f2_reflected)?;
    dump_jumps(cfg, &man.g)?;
    dump_problem(cfg, q)?;
    dump_samples(cfg, &xs, &ys, |x, y| {
        (sol.eval_u1(x, y), sol.eval_u2_reflected(x, y))
    })?;

    let g_scale = mode_scale(&man.g);
    let f1_scale = coeff_scale(&man.f1);
    let f2_scale = coeff_scale(&man.f2_reflected);
    let rel_jump = sol.report.jump_residual / g_scale.max(f64::MIN_POSITIVE);
    let rel_int1 = sol.report.interior_residual_elliptic / f1_scale.max(f64::MIN_POSITIVE);
    let rel_int2 = sol.report.interior_residual_parabolic / f2_scale.max(f64::MIN_POSITIVE);

    let mut report = Table::new("quantity,value");
    for (k, v) in [
        ("jump_residual", sol.report.jump_residual),
        ("jump_residual_rel", rel_jump),
        (
            "interior_residual_elliptic",
            sol.report.interior_residual_elliptic,
        ),
        ("interior_residual_elliptic_rel", rel_int1),
        (
            "interior_residual_parabolic",
            sol.report.interior_residual_parabolic,
        ),
        ("interior_residual_parabolic_rel", rel_int2),
        ("low_frequency_mass", sol.report.low_frequency_mass),
        ("dropped_mean", sol.report.dropped_mean),
        ("recovery_rel_err_side1", rec1),
        ("recovery_rel_err_side2", rec2),
        ("g_scale", g_scale),
        ("f1_scale", f1_scale),
        ("f2_scale", f2_scale),
    ] {
        report.row(&format!("{k},{}", fmt_f64(v)));
    }
    report.write(&cfg.out_dir, "report.csv")?;

    println!("manufactured solve at q = {} ({}x{} modes)", display_c64(q), cfg.grid.n_tan, cfg.grid.n_norm);
    print_residuals(rel_jump, rel_int1, rel_int2);
    println!("recovery: rel err {rec1:.3e} (side 1), {rec2:.3e} (side 2)");
    println!("wrote u1.csv u2_reflected.csv f1.csv f2_reflected.csv g.csv problem.csv samples.csv report.csv in {}", cfg.out_dir.display());

    let mut failures = residual_failures(cfg, rel_jump, rel_int1, rel_int2);
    if rec1 > cfg.tol.recovery || rec2 > cfg.tol.recovery {
        failures.push(format!(
            "recovery error {:.3e} exceeds {:.1e}",
            rec1.max(rec2),
            cfg.tol.recovery
        ));
    }
    finish("solve", failures)
}

fn run_from_fields(cfg: &RunConfig, dir: &Path) -> Result<bool, CliError> {
    let spec = &cfg.spec;
    let q = load_problem(dir)?;
    let u1 = load_whole_field(&dir.join("u1.csv"))?;
    let u2 = load_whole_field(&dir.join("u2_reflected.csv"))?;
    let g = load_jumps(&dir.join("g.csv"))?;
    if g.len() != 2 * spec.m {
        return Err(CliError::Invalid(format!(
            "{} has {} jump rows, the configured problem needs {}",
            dir.join("g.csv").display(),
            g.len(),
            2 * spec.m
        )));
    }
    if u1.coeffs.nrows() != g[0].values.len() {
        return Err(CliError::Invalid(format!(
            "field/jump tangential resolutions disagree: {} vs {}",
            u1.coeffs.nrows(),
            g[0].values.len()
        )));
    }
    let sol = solve_full(
        spec,
        InteriorData::KnownExtension {
            u1: &u1,
            u2_reflected: &u2,
        },
        &g,
        q,
        ZeroModePolicy::Reject,
    )?;

    let g_scale = mode_scale(&g);
    let f1_scale = coeff_scale(&apply_elliptic(spec, &u1));
    let f2_scale = coeff_scale(&apply_parabolic_reflected(spec, &u2, q));
    let rel_jump = sol.report.jump_residual / g_scale.max(f64::MIN_POSITIVE);
    let rel_int1 = sol.report.interior_residual_elliptic / f1_scale.max(f64::MIN_POSITIVE);
    let rel_int2 = sol.report.interior_residual_parabolic / f2_scale.max(f64::MIN_POSITIVE);

    let mut report = Table::new("quantity,value");
    for (k, v) in [
        ("jump_residual", sol.report.jump_residual),
        ("jump_residual_rel", rel_jump),
        (
            "interior_residual_elliptic",
            sol.report.interior_residual_elliptic,
        ),
        (
            "interior_residual_parabolic",
            sol.report.interior_residual_parabolic,
        ),
        ("low_frequency_mass", sol.report.low_frequency_mass),
        ("dropped_mean", sol.report.dropped_mean),
        ("g_scale", g_scale),
    ] {
        report.row(&format!("{k},{}", fmt_f64(v)));
    }
    report.write(&cfg.out_dir, "report.csv")?;

    println!(
        "re-solved fields from {} at q = {}",
        dir.display(),
        display_c64(q)
    );
    print_residuals(rel_jump, rel_int1, rel_int2);
    println!("wrote report.csv in {}", cfg.out_dir.display());
    finish("solve", residual_failures(cfg, rel_jump, rel_int1, rel_int2))
}

fn run_homogeneous(cfg: &RunConfig, q: C64) -> Result<bool, CliError> {
    let spec = &cfg.spec;
    let band = (cfg.grid.n_tan / 8).clamp(1, 4);
    let g = probe_jump_data(
        spec,
        cfg.grid.period,
        cfg.grid.n_tan,
        band,
        cfg.sweep.seed,
    );
    let w = solve_homogeneous(spec, &g, q, ZeroModePolicy::Reject)?;
    let xs_norm = [0.05, 0.25, 1.0, 2.0, cfg.grid.x_max / 2.0];
    let jump = w.jump_residual(spec, &g);
    let interior = w.interior_residual(spec, &xs_norm);

    // Zero interior data through the full pipeline must reproduce the
    // homogeneous solver exactly.
    let zeros = WholeField {
        period: cfg.grid.period,
        x_max: cfg.grid.x_max,
        coeffs: Array2::from_elem((cfg.grid.n_tan, cfg.grid.n_norm), C64::ZERO),
    };
    let full = solve_full(
        spec,
        InteriorData::Blind {
            f1: &zeros,
            f2_reflected: &zeros,
        },
        &g,
        q,
        ZeroModePolicy::Reject,
    )?;
    let (xs, ys) = sample_points(cfg);
    let mut diff = 0.0f64;
    for &x in &xs {
        for &y in &ys {
            diff = diff.max((full.eval_u1(x, y) - w.side1.eval(x, y)).norm());
            diff = diff.max(
                (full.eval_u2_reflected(x, y) - w.side2_reflected.eval(x, y)).norm(),
            );
        }
    }

    dump_jumps(cfg, &g)?;
    dump_problem(cfg, q)?;
    dump_samples(cfg, &xs, &ys, |x, y| {
        (w.side1.eval(x, y), w.side2_reflected.eval(x, y))
    })?;

    let g_scale = mode_scale(&g);
    let rel_jump = jump / g_scale.max(f64::MIN_POSITIVE);
    let rel_interior = interior / g_scale.max(f64::MIN_POSITIVE);
    let mut report = Table::new("quantity,value");
    for (k, v) in [
        ("jump_residual", jump),
        ("jump_residual_rel", rel_jump),
        ("interior_residual", interior),
        ("interior_residual_rel", rel_interior),
        ("full_equals_homogeneous_diff", diff),
        ("g_scale", g_scale),
    ] {
        report.row(&format!("{k},{}", fmt_f64(v)));
    }
    report.write(&cfg.out_dir, "report.csv")?;

    println!("homogeneous solve at q = {}", display_c64(q));
    println!(
        "residuals: jump {rel_jump:.3e}, interior {rel_interior:.3e} (relative to data scale)"
    );
    println!("zero-data full pipeline agrees with the homogeneous solver to {diff:.3e}");
    println!(
        "wrote g.csv problem.csv samples.csv report.csv in {}",
        cfg.out_dir.display()
    );

    let mut failures = Vec::new();
    if rel_jump > cfg.tol.residual || rel_interior > cfg.tol.residual {
        failures.push(format!(
            "residual {:.3e} exceeds {:.1e}",
            rel_jump.max(rel_interior),
            cfg.tol.residual
        ));
    }
    if diff > AGREEMENT_TOL {
        failures.push(format!(
            "full pipeline deviates {diff:.3e} from the homogeneous solver"
        ));
    }
    finish("solve", failures)
}

fn sample_points(cfg: &RunConfig) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..5)
        .map(|j| cfg.grid.period * j as f64 / 5.0)
        .collect();
    let ys: Vec<f64> = [0.0, 0.1, 0.5, 1.0, 2.0]
        .iter()
        .map(|&y: &f64| y.min(0.9 * cfg.grid.x_max))
        .collect();
    (xs, ys)
}

fn print_residuals(rel_jump: f64, rel_int1: f64, rel_int2: f64) {
    println!(
        "residuals (relative to data scale): jump {rel_jump:.3e}, interior {rel_int1:.3e} / {rel_int2:.3e}"
    );
}

fn residual_failures(cfg: &RunConfig, rel_jump: f64, rel_int1: f64, rel_int2: f64) -> Vec<String> {
    let worst = rel_jump.max(rel_int1).max(rel_int2);
    if worst > cfg.tol.residual {
        vec![format!(
            "residual {worst:.3e} exceeds {:.1e}",
            cfg.tol.residual
        )]
    } else {
        Vec::new()
    }
}

fn finish(name: &str, failures: Vec<String>) -> Result<bool, CliError> {
    if failures.is_empty() {
        println!("{name}: pass");
        Ok(true)
    } else {
        println!("{name}: FAIL ({})", failures.join("; "));
        Ok(false)
    }
}

/// Largest spectral coefficient magnitude of the jump data (the scale the
/// mode-space jump residual is measured against).
fn mode_scale(g: &[BoundaryField]) -> f64 {
    g.iter()
        .flat_map(|gj| gj.to_modes())
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

fn coeff_scale(f: &WholeField) -> f64 {
    f.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn dump_whole_field(cfg: &RunConfig, name: &str, f: &WholeField) -> Result<(), CliError> {
    let mut t = Table::new("tan_slot,norm_slot,re,im");
    t.meta("period", &fmt_f64(f.period));
    t.meta("x_max", &fmt_f64(f.x_max));
    t.meta("n_tan", &f.coeffs.nrows().to_string());
    t.meta("n_norm", &f.coeffs.ncols().to_string());
    for j in 0..f.coeffs.nrows() {
        for i in 0..f.coeffs.ncols() {
            t.row(&format!("{j},{i},{}", fmt_c64(f.coeffs[(j, i)])));
        }
    }
    t.write(&cfg.out_dir, name)?;
    Ok(())
}

fn load_whole_field(path: &Path) -> Result<WholeField, CliError> {
    let text = read(path)?;
    let mut period = None;
    let mut x_max = None;
    let mut n_tan = None;
    let mut n_norm = None;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let fail = |message: String| CliError::Invalid(format!(
            "{} line {}: {message}",
            path.display(),
            idx + 1
        ));
        let line = line.trim();
        if line.is_empty() || line.starts_with("tan_slot") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let Some((k, v)) = rest.split_once('=') else {
                return Err(fail(format!("malformed metadata '{line}'")));
            };
            let v = v.trim();
            match k.trim() {
                "period" => period = Some(parse_float(v).map_err(&fail)?),
                "x_max" => x_max = Some(parse_float(v).map_err(&fail)?),
                "n_tan" => n_tan = Some(parse_int(v).map_err(&fail)?),
                "n_norm" => n_norm = Some(parse_int(v).map_err(&fail)?),
                other => return Err(fail(format!("unknown metadata key '{other}'"))),
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(fail(format!("expected 4 cells, got {}", cells.len())));
        }
        let j = parse_int(cells[0]).map_err(&fail)?;
        let i = parse_int(cells[1]).map_err(&fail)?;
        let re = parse_float(cells[2]).map_err(&fail)?;
        let im = parse_float(cells[3]).map_err(&fail)?;
        entries.push((j, i, c64(re, im)));
    }
    let (period, x_max, n_tan, n_norm) = match (period, x_max, n_tan, n_norm) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => {
            return Err(CliError::Invalid(format!(
                "{}: missing period/x_max/n_tan/n_norm metadata",
                path.display()
            )))
        }
    };
    let mut coeffs = Array2::from_elem((n_tan, n_norm), C64::ZERO);
    for (j, i, v) in entries {
        if j >= n_tan || i >= n_norm {
            return Err(CliError::Invalid(format!(
                "{}: slot ({j}, {i}) outside the declared {n_tan}x{n_norm} grid",
                path.display()
            )));
        }
        coeffs[(j, i)] = v;
    }
    Ok(WholeField {
        period,
        x_max,
        coeffs,
    })
}

fn dump_jumps(cfg: &RunConfig, g: &[BoundaryField]) -> Result<(), CliError> {
    let mut t = Table::new("j,slot,re,im");
    t.meta("period", &fmt_f64(g[0].period));
    t.meta("n_tan", &g[0].values.len().to_string());
    t.meta("rows", &g.len().to_string());
    for (j, gj) in g.iter().enumerate() {
        for (k, v) in gj.values.iter().enumerate() {
            t.row(&format!("{j},{k},{}", fmt_c64(*v)));
        }
    }
    t.write(&cfg.out_dir, "g.csv")?;
    Ok(())
}

fn load_jumps(path: &Path) -> Result<Vec<BoundaryField>, CliError> {
    let text = read(path)?;
    let mut period = None;
    let mut n_tan = None;
    let mut rows = None;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let fail = |message: String| CliError::Invalid(format!(
            "{} line {}: {message}",
            path.display(),
            idx + 1
        ));
        let line = line.trim();
        if line.is_empty() || line.starts_with("j,") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let Some((k, v)) = rest.split_once('=') else {
                return Err(fail(format!("malformed metadata '{line}'")));
            };
            let v = v.trim();
            match k.trim() {
                "period" => period = Some(parse_float(v).map_err(&fail)?),
                "n_tan" => n_tan = Some(parse_int(v).map_err(&fail)?),
                "rows" => rows = Some(parse_int(v).map_err(&fail)?),
                other => return Err(fail(format!("unknown metadata key '{other}'"))),
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(fail(format!("expected 4 cells, got {}", cells.len())));
        }
        let j = parse_int(cells[0]).map_err(&fail)?;
        let k = parse_int(cells[1]).map_err(&fail)?;
        let re = parse_float(cells[2]).map_err(&fail)?;
        let im = parse_float(cells[3]).map_err(&fail)?;
        entries.push((j, k, c64(re, im)));
    }
    let (period, n_tan, rows) = match (period, n_tan, rows) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => {
            return Err(CliError::Invalid(format!(
                "{}: missing period/n_tan/rows metadata",
                path.display()
            )))
        }
    };
    let mut g = vec![BoundaryField::zeros(period, n_tan); rows];
    for (j, k, v) in entries {
        if j >= rows || k >= n_tan {
            return Err(CliError::Invalid(format!(
                "{}: sample ({j}, {k}) outside the declared {rows}x{n_tan} table",
                path.display()
            )));
        }
        g[j].values[k] = v;
    }
    Ok(g)
}

fn dump_problem(cfg: &RunConfig, q: C64) -> Result<(), CliError> {
    let mut t = Table::new("quantity,value");
    for (k, v) in [
        ("q_re", fmt_f64(q.re)),
        ("q_im", fmt_f64(q.im)),
        ("seed", cfg.sweep.seed.to_string()),
        ("m", cfg.spec.m.to_string()),
        ("period", fmt_f64(cfg.grid.period)),
        ("x_max", fmt_f64(cfg.grid.x_max)),
        ("n_tan", cfg.grid.n_tan.to_string()),
        ("n_norm", cfg.grid.n_norm.to_string()),
    ] {
        t.row(&format!("{k},{v}"));
    }
    t.write(&cfg.out_dir, "problem.csv")?;
    Ok(())
}

fn load_problem(dir: &Path) -> Result<C64, CliError> {
    let path = dir.join("problem.csv");
    let text = read(&path)?;
    let mut q_re = None;
    let mut q_im = None;
    for line in text.lines() {
        if let Some((k, v)) = line.split_once(',') {
            match k {
                "q_re" => q_re = parse_float(v).ok(),
                "q_im" => q_im = parse_float(v).ok(),
                _ => {}
            }
        }
    }
    match (q_re, q_im) {
        (Some(re), Some(im)) => Ok(c64(re, im)),
        _ => Err(CliError::Invalid(format!(
            "{}: missing q_re/q_im rows",
            path.display()
        ))),
    }
}

fn dump_samples(
    cfg: &RunConfig,
    xs: &[f64],
    ys: &[f64],
    eval: impl Fn(f64, f64) -> (C64, C64),
) -> Result<(), CliError> {
    let mut t = Table::new("side,x,y,re,im");
    for &x in xs {
        for &y in ys {
            let (u1, u2) = eval(x, y);
            t.row(&format!("1,{},{},{}", fmt_f64(x), fmt_f64(y), fmt_c64(u1)));
            t.row(&format!("2,{},{},{}", fmt_f64(x), fmt_f64(y), fmt_c64(u2)));
        }
    }
    t.write(&cfg.out_dir, "samples.csv")?;
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Invalid(format!("cannot read {}: {e}", path.display()))
    })
}

fn parse_float(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("'{s}' is not a number"))
}

fn parse_int(s: &str) -> Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| format!("'{s}' is not an index"))
}
