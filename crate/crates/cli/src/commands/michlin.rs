//! Derivative (multiplier) bound scans of the scaled symbol families, with
//! densified-grid stability, a Neumann-regime threshold search, homogeneity
//! spot checks and closed-form calibration rows.

use transmission_core::multipliers::{
    lambda0_search, m2_homogeneity_residual, scan_c1_family, scan_c2_family, scan_m1_family,
    scan_m2_family, scan_m2_tilde_family, scan_reference, FamilyScan, MichlinOptions,
    ReferenceFamily,
};
use transmission_core::symbols::Covariable;
use transmission_core::{c64, Result as CoreResult};

use crate::config::RunConfig;
use crate::report::{fmt_f64, Table};
use crate::CliError;

/// Exact sup of the constant calibration symbol.
const CONSTANT_REFERENCE: f64 = 2.5;

struct FamilyOutcome {
    name: &'static str,
    bound: f64,
    refined_bound: f64,
    worst_member_change: f64,
    finite: bool,
}

fn scan_family(
    name: &'static str,
    cfg: &RunConfig,
    base_opts: &MichlinOptions,
    fine_opts: &MichlinOptions,
    scan: impl Fn(&MichlinOptions) -> CoreResult<FamilyScan>,
) -> Result<FamilyOutcome, CliError> {
    let base = scan(base_opts)?;
    let fine = scan(fine_opts)?;
    let orders = base_opts.max_order + 1;
    let mut header = String::from("label");
    for o in 0..orders {
        header.push_str(&format!(",order{o}"));
    }
    header.push_str(",bound,refined_bound,rel_change");
    let mut t = Table::new(&header);
    let mut worst_change = 0.0f64;
    for (mb, mf) in base.members.iter().zip(&fine.members) {
        let b = mb.scan.bound();
        let f = mf.scan.bound();
        let change = (f - b).abs() / b.max(f64::MIN_POSITIVE);
        worst_change = worst_change.max(change);
        let mut row = mb.label.replace(',', ";");
        for o in 0..orders {
            row.push_str(&format!(",{}", fmt_f64(mb.scan.per_order[o])));
        }
        row.push_str(&format!(
            ",{},{},{}",
            fmt_f64(b),
            fmt_f64(f),
            fmt_f64(change)
        ));
        t.row(&row);
    }
    t.write(&cfg.out_dir, &format!("michlin_{name}.csv"))?;
    Ok(FamilyOutcome {
        name,
        bound: base.overall_bound(),
        refined_bound: fine.overall_bound(),
        worst_member_change: worst_change,
        finite: base.is_finite() && fine.is_finite(),
    })
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let spec = &cfg.spec;
    let base_opts = MichlinOptions::for_dimension(spec.n);
    let fine_opts = base_opts.densified(2);

    let outcomes = vec![
        scan_family("m1", cfg, &base_opts, &fine_opts, |o| {
            scan_m1_family(spec, o)
        })?,
        scan_family("c1", cfg, &base_opts, &fine_opts, |o| {
            scan_c1_family(spec, o)
        })?,
        scan_family("c2", cfg, &base_opts, &fine_opts, |o| {
            scan_c2_family(spec, o)
        })?,
        scan_family("m2", cfg, &base_opts, &fine_opts, |o| {
            scan_m2_family(spec, o)
        })?,
        scan_family("m2t", cfg, &base_opts, &fine_opts, |o| {
            scan_m2_tilde_family(spec, o)
        })?,
    ];

    // Neumann-regime threshold: smallest dyadic ratio with a certified
    // Neumann series for the Schur complement.
    let lam = lambda0_search(spec, 10)?;
    let mut lt = Table::new("lambda,sup_perturbation_2");
    lt.meta(
        "lambda0",
        &lam.lambda0.map(fmt_f64).unwrap_or_else(|| "none".to_string()),
    );
    lt.meta("s_inv_sup", &fmt_f64(lam.s_inv_sup));
    lt.meta("samples", &lam.samples.to_string());
    for &(l, sup) in &lam.table {
        lt.row(&format!("{},{}", fmt_f64(l), fmt_f64(sup)));
    }
    lt.write(&cfg.out_dir, "lambda0.csv")?;

    // Degree-zero homogeneity of the scaled interface inverse.
    let half = spec.theta / (2.0 * spec.m as f64);
    let ray = half / 2.0;
    let mut ht = Table::new("xi,q_abs,q_arg,r,residual");
    let mut worst_hom = 0.0f64;
    for &q_abs in &[0.5, 2.0, 8.0] {
        let q = c64(q_abs * ray.cos(), q_abs * ray.sin());
        let cov = Covariable::new(spec, vec![1.0], q)?;
        for &r in &[2.0, 8.0] {
            let res = m2_homogeneity_residual(spec, &cov, r)?;
            worst_hom = worst_hom.max(res);
            ht.row(&format!(
                "{},{},{},{},{}",
                fmt_f64(1.0),
                fmt_f64(q_abs),
                fmt_f64(ray),
                fmt_f64(r),
                fmt_f64(res)
            ));
        }
    }
    ht.write(&cfg.out_dir, "m2_homogeneity.csv")?;

    // Calibration: a constant symbol must come back exactly, and the Riesz
    // quotient is the canonical bounded degree-zero symbol.
    let dim = spec.n - 1;
    let const_base = scan_reference(ReferenceFamily::Constant(CONSTANT_REFERENCE), dim, &base_opts)?;
    let const_fine = scan_reference(ReferenceFamily::Constant(CONSTANT_REFERENCE), dim, &fine_opts)?;
    let riesz_base = scan_reference(ReferenceFamily::RieszQuotient(0), dim, &base_opts)?;
    let riesz_fine = scan_reference(ReferenceFamily::RieszQuotient(0), dim, &fine_opts)?;
    let riesz_change = (riesz_fine.bound() - riesz_base.bound()).abs()
        / riesz_base.bound().max(f64::MIN_POSITIVE);
    let mut rt = Table::new("family,bound,refined_bound,rel_change,expected");
    rt.row(&format!(
        "constant,{},{},{},{}",
        fmt_f64(const_base.bound()),
        fmt_f64(const_fine.bound()),
        fmt_f64((const_fine.bound() - const_base.bound()).abs()),
        fmt_f64(CONSTANT_REFERENCE)
    ));
    rt.row(&format!(
        "riesz,{},{},{},",
        fmt_f64(riesz_base.bound()),
        fmt_f64(riesz_fine.bound()),
        fmt_f64(riesz_change)
    ));
    rt.write(&cfg.out_dir, "reference.csv")?;

    let mut failures = Vec::new();
    for o in &outcomes {
        println!(
            "family {:>3}: bound {:.6e}, refined {:.6e}, worst member change {:.2e}",
            o.name, o.bound, o.refined_bound, o.worst_member_change
        );
        if !o.finite {
            failures.push(format!("family {} has a non-finite bound", o.name));
        }
        if o.worst_member_change > cfg.tol.refinement {
            failures.push(format!(
                "family {} changes {:.2e} under refinement (allowed {:.2e})",
                o.name, o.worst_member_change, cfg.tol.refinement
            ));
        }
    }
    match lam.lambda0 {
        Some(l) => println!(
            "neumann regime: lambda0 = {l}, sup |S^-1|_2 = {:.6} over {} samples",
            lam.s_inv_sup, lam.samples
        ),
        None => failures.push("no dyadic threshold certifies the Neumann regime".to_string()),
    }
    if lam.s_inv_sup > cfg.tol.s_inv {
        failures.push(format!(
            "|S^-1|_2 reaches {:.3} beyond the threshold (allowed {})",
            lam.s_inv_sup, cfg.tol.s_inv
        ));
    }
    println!("homogeneity spot checks: worst residual {worst_hom:.3e}");
    if worst_hom > cfg.tol.homogeneity {
        failures.push(format!(
            "homogeneity residual {worst_hom:.3e} exceeds {:.1e}",
            cfg.tol.homogeneity
        ));
    }
    println!(
        "calibration: constant bound {:.17} (expected {CONSTANT_REFERENCE}), riesz bound {:.6} (refinement change {:.2e})",
        const_base.bound(),
        riesz_base.bound(),
        riesz_change
    );
    if (const_base.bound() - CONSTANT_REFERENCE).abs() > 1e-12
        || (const_fine.bound() - CONSTANT_REFERENCE).abs() > 1e-12
    {
        failures.push("constant calibration row is not exact".to_string());
    }
    if !riesz_base.bound().is_finite() || riesz_change > cfg.tol.refinement {
        failures.push("riesz calibration row unstable".to_string());
    }

    if failures.is_empty() {
        println!("michlin-scan: pass");
        Ok(true)
    } else {
        println!("michlin-scan: FAIL ({})", failures.join("; "));
        Ok(false)
    }
}
