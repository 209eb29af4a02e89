//! Ellipticity gate: symbol minima over compact slices, root-split spot
//! checks and the joint (product-symbol) lower-bound constant.

use transmission_core::symbols::{
    check_ellipticity, check_joint_bound, check_joint_bound_with_args,
};
use transmission_core::C64;

use crate::config::RunConfig;
use crate::report::{fmt_f64, Table};
use crate::CliError;

/// Comma-free rendering of a real vector for CSV detail cells.
pub fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", cells.join(" "))
}

/// Comma-free rendering of a complex number.
pub fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let rep = check_ellipticity(&cfg.spec, cfg.check.resolution)?;
    let joint = check_joint_bound(&cfg.spec, cfg.check.resolution, 1);
    let joint_fine = check_joint_bound(&cfg.spec, cfg.check.resolution, cfg.check.refine.max(2));
    let joint_real = check_joint_bound_with_args(&cfg.spec, cfg.check.resolution, 1, &[0.0]);
    let stability =
        (joint_fine.constant - joint.constant).abs() / joint.constant.max(f64::MIN_POSITIVE);

    let mut t = Table::new("quantity,value,detail");
    t.row(&format!(
        "min_elliptic,{},at {}",
        fmt_f64(rep.min_elliptic),
        fmt_vec(&rep.argmin_elliptic)
    ));
    t.row(&format!(
        "min_parabolic,{},at {} lambda {}",
        fmt_f64(rep.min_parabolic),
        fmt_vec(&rep.argmin_parabolic.0),
        fmt_c(rep.argmin_parabolic.1)
    ));
    t.row(&format!(
        "root_split_failures,{},{}",
        rep.root_split_failures.len(),
        rep.root_split_failures
            .first()
            .map(|s| s.replace(',', ";"))
            .unwrap_or_default()
    ));
    t.row(&format!("root_splits_checked,{},", rep.root_splits_checked));
    t.row(&format!("threshold,{},", fmt_f64(rep.threshold)));
    t.row(&format!(
        "joint_constant,{},at {} lambda {}",
        fmt_f64(joint.constant),
        fmt_vec(&joint.argmin.0),
        fmt_c(joint.argmin.1)
    ));
    t.row(&format!(
        "joint_constant_refined,{},refine {}",
        fmt_f64(joint_fine.constant),
        cfg.check.refine.max(2)
    ));
    t.row(&format!("joint_stability_rel,{},", fmt_f64(stability)));
    t.row(&format!(
        "joint_constant_real_axis,{},lambda real nonnegative",
        fmt_f64(joint_real.constant)
    ));
    t.row(&format!("joint_samples,{},", joint.samples));
    let path = t.write(&cfg.out_dir, "check_report.csv")?;

    println!(
        "ellipticity: min |a1| = {:.3e} over the unit sphere",
        rep.min_elliptic
    );
    println!(
        "parameter-ellipticity: min |a2| = {:.3e} over the sector slice",
        rep.min_parabolic
    );
    println!(
        "root splitting: {} failures / {} checked",
        rep.root_split_failures.len(),
        rep.root_splits_checked
    );
    println!(
        "joint lower bound: C_N = {:.6e} (refined {:.6e}, rel change {:.2e})",
        joint.constant, joint_fine.constant, stability
    );
    println!(
        "joint lower bound on the real axis: {:.6e}",
        joint_real.constant
    );
    println!("wrote {}", path.display());

    let pass = rep.passes() && joint.constant > rep.threshold;
    if pass {
        println!("check: pass");
    } else if !rep.passes() {
        println!(
            "check: FAIL (minimum {:.3e} at {} does not clear the threshold {:.1e})",
            rep.min_elliptic.min(rep.min_parabolic),
            if rep.min_elliptic <= rep.min_parabolic {
                fmt_vec(&rep.argmin_elliptic)
            } else {
                fmt_vec(&rep.argmin_parabolic.0)
            },
            rep.threshold
        );
    } else {
        println!(
            "check: FAIL (joint constant {:.3e} at {} not positive)",
            joint.constant,
            fmt_vec(&joint.argmin.0)
        );
    }
    Ok(pass)
}
