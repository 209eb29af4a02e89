//! Flat `key = value` run configuration with bracketed sections.
//!
//! The format is deliberately small: `[section]` headers, one `key = value`
//! pair per line, `#` comments.  Every key has a documented default, so an
//! empty (or absent) file is a valid configuration.  Parsing is total:
//! any unknown section or key, or any malformed value, fails with a
//! diagnostic naming the line.

use std::path::{Path, PathBuf};

use transmission_core::symbols::{MultiIndex, ProblemSpec};
use transmission_core::{c64, C64};

use crate::CliError;

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub grid: GridConfig,
    pub sweep: SweepConfig,
    pub check: CheckConfig,
    pub tol: ToleranceConfig,
    pub out_dir: PathBuf,
}

/// Verdict tolerances, all overridable in the `[tolerances]` section.
#[derive(Debug, Clone)]
pub struct ToleranceConfig {
    /// Plateau factor bound of the estimate sweeps (max/min over the upper
    /// half-sweep).
    pub plateau: f64,
    /// Relative change allowed under grid refinement (scans and sweeps).
    pub refinement: f64,
    /// Basic-solution dual-route relative disagreement.
    pub route_y: f64,
    /// Interface-inverse dual-route relative disagreement.
    pub route_psi: f64,
    /// Degree-zero homogeneity residual of the scaled interface inverse.
    pub homogeneity: f64,
    /// Finite-difference oracle relative error at the requested step.
    pub oracle: f64,
    /// Manufactured-solution recovery relative error.
    pub recovery: f64,
    /// Interface and interior residuals relative to the data scale.
    pub residual: f64,
    /// Bound on the Schur-complement inverse in the Neumann regime.
    pub s_inv: f64,
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    /// Tangential period `L`.
    pub period: f64,
    /// Tangential sample count `N` (even).
    pub n_tan: usize,
    /// Normal extent of the half-space grid.
    pub x_max: f64,
    /// Normal node count.
    pub xn_count: usize,
    /// Power-law grading exponent of the normal grid.
    pub grading: f64,
    /// Whole-space normal resolution (interior data / resolvent).
    pub n_norm: usize,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Parameter moduli, either explicit or a geometric range.
    pub q_values: Vec<f64>,
    /// Ray angle `arg q` inside the sector.
    pub ray: f64,
    /// Integrability exponent of the norms.
    pub p: f64,
    /// Seed of the data generator.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Sphere/sector sampling resolution of the ellipticity checks.
    pub resolution: usize,
    /// Refinement factor for the lower-bound stability report.
    pub refine: usize,
}

/// Problem-block accumulator before the spec is assembled.
struct ProblemDraft {
    preset: String,
    m: usize,
    theta: f64,
    a1: Option<Vec<(MultiIndex, C64)>>,
    a2: Option<Vec<(MultiIndex, u32, C64)>>,
}

impl RunConfig {
    /// Parse a configuration file; `path = None` yields all defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Self::parse("", "<defaults>"),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                    place: p.display().to_string(),
                    message: format!("cannot read: {e}"),
                })?;
                Self::parse(&text, &p.display().to_string())
            }
        }
    }

    /// Parse configuration text.  `name` labels diagnostics.
    pub fn parse(text: &str, name: &str) -> Result<Self, CliError> {
        let mut problem = ProblemDraft {
            preset: "laplacian_heat".to_string(),
            m: 1,
            theta: std::f64::consts::FRAC_PI_2,
            a1: None,
            a2: None,
        };
        let mut grid = GridConfig {
            period: std::f64::consts::TAU,
            n_tan: 32,
            x_max: 8.0,
            xn_count: 96,
            grading: 3.0,
            n_norm: 32,
        };
        let mut q_lo = 1.0f64;
        let mut q_hi = 100.0f64;
        let mut q_count = 13usize;
        let mut q_explicit: Option<Vec<f64>> = None;
        let mut sweep = SweepConfig {
            q_values: Vec::new(),
            ray: 0.3,
            p: 2.0,
            seed: 7,
        };
        let mut check = CheckConfig {
            resolution: 40,
            refine: 2,
        };
        let mut tol = ToleranceConfig {
            plateau: 4.0,
            refinement: 0.10,
            route_y: 1e-8,
            route_psi: 1e-11,
            homogeneity: 1e-11,
            oracle: 1e-6,
            recovery: 1e-5,
            residual: 1e-8,
            s_inv: 2.0,
        };
        let mut out_dir = PathBuf::from("out");

        let fail = |line: usize, message: String| CliError::Config {
            place: format!("{name} line {line}"),
            message,
        };
        let mut section = String::from("");
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(sec) = rest.strip_suffix(']') else {
                    return Err(fail(line_no, format!("unterminated section header '{line}'")));
                };
                let sec = sec.trim();
                match sec {
                    "problem" | "grid" | "sweep" | "check" | "tolerances" | "output" => {
                        section = sec.to_string();
                    }
                    other => {
                        return Err(fail(line_no, format!("unknown section '[{other}]'")));
                    }
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(fail(line_no, format!("expected 'key = value', got '{line}'")));
            };
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| fail(line_no, format!("key '{key}': '{v}' is not a number")))
            };
            let parse_usize = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| fail(line_no, format!("key '{key}': '{v}' is not a non-negative integer")))
            };
            match (section.as_str(), key) {
                ("problem", "preset") => problem.preset = value.to_string(),
                ("problem", "m") => problem.m = parse_usize(value)?,
                ("problem", "theta") => problem.theta = parse_f64(value)?,
                ("problem", "a1") => {
                    problem.a1 = Some(parse_a1_terms(value).map_err(|m| fail(line_no, m))?);
                }
                ("problem", "a2") => {
                    problem.a2 = Some(parse_a2_terms(value).map_err(|m| fail(line_no, m))?);
                }
                ("grid", "period") => grid.period = parse_f64(value)?,
                ("grid", "n_tan") => grid.n_tan = parse_usize(value)?,
                ("grid", "x_max") => grid.x_max = parse_f64(value)?,
                ("grid", "xn_count") => grid.xn_count = parse_usize(value)?,
                ("grid", "grading") => grid.grading = parse_f64(value)?,
                ("grid", "n_norm") => grid.n_norm = parse_usize(value)?,
                ("sweep", "q_lo") => q_lo = parse_f64(value)?,
                ("sweep", "q_hi") => q_hi = parse_f64(value)?,
                ("sweep", "q_count") => q_count = parse_usize(value)?,
                ("sweep", "q_values") => {
                    let mut vs = Vec::new();
                    for tok in value.split_whitespace() {
                        vs.push(parse_f64(tok)?);
                    }
                    if vs.is_empty() {
                        return Err(fail(line_no, "key 'q_values': empty list".to_string()));
                    }
                    q_explicit = Some(vs);
                }
                ("sweep", "ray") => sweep.ray = parse_f64(value)?,
                ("sweep", "p") => sweep.p = parse_f64(value)?,
                ("sweep", "seed") => {
                    sweep.seed = value.parse::<u64>().map_err(|_| {
                        fail(line_no, format!("key 'seed': '{value}' is not an integer"))
                    })?;
                }
                ("check", "resolution") => check.resolution = parse_usize(value)?,
                ("check", "refine") => check.refine = parse_usize(value)?,
                ("tolerances", "plateau") => tol.plateau = parse_f64(value)?,
                ("tolerances", "refinement") => tol.refinement = parse_f64(value)?,
                ("tolerances", "route_y") => tol.route_y = parse_f64(value)?,
                ("tolerances", "route_psi") => tol.route_psi = parse_f64(value)?,
                ("tolerances", "homogeneity") => tol.homogeneity = parse_f64(value)?,
                ("tolerances", "oracle") => tol.oracle = parse_f64(value)?,
                ("tolerances", "recovery") => tol.recovery = parse_f64(value)?,
                ("tolerances", "residual") => tol.residual = parse_f64(value)?,
                ("tolerances", "s_inv") => tol.s_inv = parse_f64(value)?,
                ("output", "dir") => out_dir = PathBuf::from(value),
                ("", k) => {
                    return Err(fail(
                        line_no,
                        format!("key '{k}' appears before any [section] header"),
                    ));
                }
                (sec, k) => {
                    return Err(fail(line_no, format!("unknown key '{k}' in section [{sec}]")));
                }
            }
        }

        let spec = build_spec(&problem).map_err(|message| CliError::Config {
            place: format!("{name} [problem]"),
            message,
        })?;
        if grid.n_tan < 2 || grid.n_tan % 2 != 0 {
            return Err(CliError::Config {
                place: format!("{name} [grid]"),
                message: format!("n_tan must be even and >= 2, got {}", grid.n_tan),
            });
        }
        if sweep.p <= 1.0 {
            return Err(CliError::Config {
                place: format!("{name} [sweep]"),
                message: format!("p must exceed 1, got {}", sweep.p),
            });
        }
        sweep.q_values = match q_explicit {
            Some(vs) => vs,
            None => {
                if !(q_lo > 0.0 && q_hi > q_lo && q_count >= 2) {
                    return Err(CliError::Config {
                        place: format!("{name} [sweep]"),
                        message: format!(
                            "need 0 < q_lo < q_hi and q_count >= 2, got {q_lo}, {q_hi}, {q_count}"
                        ),
                    });
                }
                let step = (q_hi / q_lo).powf(1.0 / (q_count - 1) as f64);
                (0..q_count).map(|i| q_lo * step.powi(i as i32)).collect()
            }
        };
        let half = spec.theta / (2.0 * spec.m as f64);
        if sweep.ray.abs() > half {
            return Err(CliError::Config {
                place: format!("{name} [sweep]"),
                message: format!(
                    "ray {} lies outside the parameter sector (|arg q| <= {half:.6})",
                    sweep.ray
                ),
            });
        }
        Ok(RunConfig {
            spec,
            grid,
            sweep,
            check,
            tol,
            out_dir,
        })
    }
}

fn build_spec(p: &ProblemDraft) -> Result<ProblemSpec, String> {
    match p.preset.as_str() {
        "laplacian_heat" => Ok(ProblemSpec::laplacian_heat(2, p.theta)),
        "bilaplacian_heat_squared" => Ok(ProblemSpec::bilaplacian_heat_squared(2, p.theta)),
        "hyperbolic_demo" => Ok(ProblemSpec::hyperbolic_demo(2, p.theta)),
        "custom" => {
            let a1 = p
                .a1
                .clone()
                .ok_or_else(|| "preset = custom requires key 'a1'".to_string())?;
            let a2 = p
                .a2
                .clone()
                .ok_or_else(|| "preset = custom requires key 'a2'".to_string())?;
            ProblemSpec::new(p.m, 2, p.theta, a1, a2).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "unknown preset '{other}' (expected laplacian_heat, bilaplacian_heat_squared, \
             hyperbolic_demo or custom)"
        )),
    }
}

/// Parse `i,j:re,im` terms of the elliptic symbol (powers of `ξ'` and `ξ_n`).
fn parse_a1_terms(value: &str) -> Result<Vec<(MultiIndex, C64)>, String> {
    let mut out = Vec::new();
    for tok in value.split_whitespace() {
        let (powers, coeff) = split_term(tok)?;
        if powers.len() != 2 {
            return Err(format!("term '{tok}': expected two powers 'i,j'"));
        }
        out.push((MultiIndex(vec![powers[0], powers[1]]), coeff));
    }
    if out.is_empty() {
        return Err("key 'a1': empty term list".to_string());
    }
    Ok(out)
}

/// Parse `i,j,k:re,im` terms of the parameter-dependent symbol (powers of
/// `ξ'`, `ξ_n` and `q`).
fn parse_a2_terms(value: &str) -> Result<Vec<(MultiIndex, u32, C64)>, String> {
    let mut out = Vec::new();
    for tok in value.split_whitespace() {
        let (powers, coeff) = split_term(tok)?;
        if powers.len() != 3 {
            return Err(format!("term '{tok}': expected three powers 'i,j,k'"));
        }
        out.push((MultiIndex(vec![powers[0], powers[1]]), powers[2], coeff));
    }
    if out.is_empty() {
        return Err("key 'a2': empty term list".to_string());
    }
    Ok(out)
}

fn split_term(tok: &str) -> Result<(Vec<u32>, C64), String> {
    let Some((powers, coeff)) = tok.split_once(':') else {
        return Err(format!("term '{tok}': expected 'powers:re,im'"));
    };
    let powers: Result<Vec<u32>, String> = powers
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| format!("term '{tok}': '{s}' is not a power"))
        })
        .collect();
    let coeff = parse_complex(coeff).map_err(|m| format!("term '{tok}': {m}"))?;
    Ok((powers?, coeff))
}

/// Parse `re` or `re,im` into a complex number.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|x| c64(x, 0.0))
            .map_err(|_| format!("'{s}' is not a number")),
        [re, im] => {
            let r = re
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("real part '{re}' is not a number"))?;
            let i = im
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("imaginary part '{im}' is not a number"))?;
            Ok(c64(r, i))
        }
        _ => Err(format!("'{s}' is not 're' or 're,im'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn message_of(err: CliError) -> (String, String) {
        match err {
            CliError::Config { place, message } => (place, message),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn empty_text_yields_defaults() {
        let cfg = RunConfig::parse("", "<t>").unwrap();
        assert_eq!(cfg.spec.m, 1);
        assert_eq!(cfg.grid.n_tan, 32);
        assert_relative_eq!(cfg.grid.period, std::f64::consts::TAU);
        assert_eq!(cfg.sweep.q_values.len(), 13);
        assert_relative_eq!(cfg.sweep.q_values[0], 1.0);
        assert_relative_eq!(*cfg.sweep.q_values.last().unwrap(), 100.0, max_relative = 1e-12);
        assert_eq!(cfg.sweep.seed, 7);
        assert_relative_eq!(cfg.tol.plateau, 4.0);
        assert_eq!(cfg.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn sections_override_defaults() {
        let text = "\
[problem]
preset = bilaplacian_heat_squared  # m = 2
[grid]
n_tan = 64
x_max = 12.5
[sweep]
q_values = 1 4 9
ray = 0.1
seed = 42
[tolerances]
oracle = 1e-5
[output]
dir = runs/alpha
";
        let cfg = RunConfig::parse(text, "<t>").unwrap();
        assert_eq!(cfg.spec.m, 2);
        assert_eq!(cfg.grid.n_tan, 64);
        assert_relative_eq!(cfg.grid.x_max, 12.5);
        assert_eq!(cfg.sweep.q_values, vec![1.0, 4.0, 9.0]);
        assert_relative_eq!(cfg.sweep.ray, 0.1);
        assert_eq!(cfg.sweep.seed, 42);
        assert_relative_eq!(cfg.tol.oracle, 1e-5);
        assert_relative_eq!(cfg.tol.recovery, 1e-5); // untouched default
        assert_eq!(cfg.out_dir, PathBuf::from("runs/alpha"));
    }

    #[test]
    fn unknown_key_names_line_and_section() {
        let text = "[grid]\nn_tan = 32\nn_tann = 64\n";
        let (place, message) = message_of(RunConfig::parse(text, "cfg.ini").unwrap_err());
        assert_eq!(place, "cfg.ini line 3");
        assert!(message.contains("n_tann"), "{message}");
        assert!(message.contains("[grid]"), "{message}");
    }

    #[test]
    fn malformed_number_is_reported() {
        let text = "[grid]\nn_tan = many\n";
        let (place, message) = message_of(RunConfig::parse(text, "cfg.ini").unwrap_err());
        assert_eq!(place, "cfg.ini line 2");
        assert!(message.contains("'many' is not a non-negative integer"), "{message}");
    }

    #[test]
    fn key_before_section_is_rejected() {
        let (place, message) = message_of(RunConfig::parse("n_tan = 32\n", "cfg.ini").unwrap_err());
        assert_eq!(place, "cfg.ini line 1");
        assert!(message.contains("before any [section]"), "{message}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        let (_, message) = message_of(RunConfig::parse("[grids]\n", "cfg.ini").unwrap_err());
        assert!(message.contains("unknown section '[grids]'"), "{message}");
    }

    #[test]
    fn custom_preset_matches_builtin_symbols() {
        let text = "\
[problem]
preset = custom
m = 1
a1 = 2,0:1 0,2:1
a2 = 2,0,0:1 0,2,0:1 0,0,2:1
";
        let cfg = RunConfig::parse(text, "<t>").unwrap();
        let builtin = ProblemSpec::laplacian_heat(2, std::f64::consts::FRAC_PI_2);
        let xi = [0.7, -1.3];
        let q = c64(2.0, 0.5);
        assert_relative_eq!(
            cfg.spec.eval_a1(&xi).re,
            builtin.eval_a1(&xi).re,
            max_relative = 1e-14
        );
        let ours = cfg.spec.eval_a2(&xi, q);
        let theirs = builtin.eval_a2(&xi, q);
        assert!((ours - theirs).norm() < 1e-14);
    }

    #[test]
    fn custom_preset_requires_symbols() {
        let (_, message) =
            message_of(RunConfig::parse("[problem]\npreset = custom\n", "<t>").unwrap_err());
        assert!(message.contains("requires key 'a1'"), "{message}");
    }

    #[test]
    fn odd_tangential_grid_is_rejected() {
        let (_, message) = message_of(RunConfig::parse("[grid]\nn_tan = 33\n", "<t>").unwrap_err());
        assert!(message.contains("even"), "{message}");
    }

    #[test]
    fn ray_outside_sector_is_rejected() {
        let (_, message) = message_of(RunConfig::parse("[sweep]\nray = 1.0\n", "<t>").unwrap_err());
        assert!(message.contains("sector"), "{message}");
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2").unwrap(), c64(2.0, 0.0));
        assert_eq!(parse_complex("-1.5, 3").unwrap(), c64(-1.5, 3.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }
}
