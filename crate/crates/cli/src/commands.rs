//! The pipelines behind each subcommand and the documents they produce.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use jastrow1d::ci::CIProblem;
use jastrow1d::jastrow::{scan_alpha, CONVERGENCE_TOL};
use jastrow1d::twobody::solve_relative;
use jastrow1d::{JastrowAnsatz, ScanResult};

use crate::config::RunConfig;

/// Version of every JSON document written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

/// Header row of the scan CSV.
pub const CSV_HEADER: &str = "alpha,energy,log_norm,convergence_delta";

pub type CommandResult<T> = Result<T, String>;

/// Adds `schema_version` and the resolved configuration to a JSON object.
pub fn stamp(mut doc: Value, config: &RunConfig) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert(
            "config".into(),
            serde_json::to_value(config).expect("config serializes"),
        );
    }
    doc
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(doc: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled,
    // so converting through `Value` sorts every object.
    let mut s = serde_json::to_string_pretty(doc).expect("JSON value renders");
    s.push('\n');
    s
}

pub fn twobody(config: &RunConfig) -> CommandResult<Value> {
    let parity = config.statistics.pair_parity();
    let sol = solve_relative(&config.interaction, config.orbitals, parity)
        .map_err(|e| e.to_string())?;
    let smaller = config.orbitals - 3;
    let basis_delta = if smaller >= 2 {
        let s = solve_relative(&config.interaction, smaller, parity).map_err(|e| e.to_string())?;
        Some(sol.energy() - s.energy())
    } else {
        None
    };
    Ok(stamp(
        json!({
            "E_rel": sol.energy(),
            "parity": parity.name(),
            "coeffs": sol.coeffs(),
            "M": config.orbitals,
            "basis_delta": {
                "M_reference": smaller,
                "delta": basis_delta,
            },
        }),
        config,
    ))
}

/// Runs the α scan for the configured system.
pub fn scan_result(config: &RunConfig) -> CommandResult<ScanResult> {
    let pair = solve_relative(
        &config.interaction,
        config.orbitals,
        config.statistics.pair_parity(),
    )
    .map_err(|e| e.to_string())?;
    let template = JastrowAnsatz::new(config.particles, config.statistics, config.alpha_max, pair)
        .map_err(|e| e.to_string())?;
    scan_alpha(
        &template,
        config.alpha_min,
        config.alpha_max,
        config.alpha_steps,
        config.quad_order,
    )
    .map_err(|e| e.to_string())
}

pub fn scan_warnings(scan: &ScanResult, config: &RunConfig) -> Vec<String> {
    let mut warnings = Vec::new();
    if scan.boundary_minimum {
        warnings.push(format!(
            "boundary minimum at alpha = {}; the minimizer may lie outside [{}, {}]",
            scan.alpha_star, config.alpha_min, config.alpha_max
        ));
    }
    if !scan.unimodal {
        warnings.push("energy curve has more than one local minimum on the grid".into());
    }
    let unconverged: Vec<_> = scan
        .points
        .iter()
        .filter(|p| !p.estimate.converged())
        .collect();
    if !unconverged.is_empty() {
        let worst = unconverged
            .iter()
            .map(|p| p.estimate.convergence_delta)
            .fold(0.0, f64::max);
        warnings.push(format!(
            "{} of {} grid energies changed by more than {CONVERGENCE_TOL:e} when the \
             quadrature order was halved (largest change {worst:.3e})",
            unconverged.len(),
            scan.points.len()
        ));
    }
    warnings
}

pub fn scan_csv(scan: &ScanResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &scan.points {
        let e = &p.estimate;
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            p.alpha, e.energy, e.log_norm, e.convergence_delta
        );
    }
    out
}

pub fn scan_summary(scan: &ScanResult, config: &RunConfig) -> Value {
    stamp(
        json!({
            "alpha_star": scan.alpha_star,
            "energy_star": scan.energy_star,
            "boundary_minimum": scan.boundary_minimum,
            "unimodal": scan.unimodal,
            "refined": scan.refined.map(|p| json!({
                "alpha": p.alpha,
                "energy": p.estimate.energy,
                "convergence_delta": p.estimate.convergence_delta,
            })),
            "warnings": scan_warnings(scan, config),
        }),
        config,
    )
}

/// CI spectrum plus the ground-energy change from `M − 3` orbitals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CiReport {
    pub energies: Vec<f64>,
    pub gap: f64,
    pub dimension: usize,
    #[serde(rename = "M")]
    pub orbitals: usize,
    #[serde(rename = "N")]
    pub particles: usize,
    pub statistics: jastrow1d::Statistics,
    pub interaction: jastrow1d::Interaction,
    pub convergence: CiConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CiConvergence {
    #[serde(rename = "M_reference")]
    pub reference_orbitals: Option<usize>,
    /// `E₀(M) − E₀(M − 3)`.
    pub ground_delta: Option<f64>,
}

pub fn ci_report(config: &RunConfig) -> CommandResult<CiReport> {
    let run = |m: usize, k: usize| -> CommandResult<_> {
        CIProblem::new(&config.interaction, config.particles, m, config.statistics)
            .and_then(|p| p.spectrum(k))
            .map_err(|e| e.to_string())
    };
    let spectrum = run(config.orbitals, config.eigenvalues)?;
    let smaller = config.orbitals.checked_sub(3).filter(|&m| {
        m >= 2 && jastrow1d::FockBasis::new(config.particles, m, config.statistics)
            .map(|b| b.dimension() >= 2)
            .unwrap_or(false)
    });
    let ground_delta = match smaller {
        Some(m) => Some(spectrum.energies[0] - run(m, 2)?.energies[0]),
        None => None,
    };
    Ok(CiReport {
        energies: spectrum.energies,
        gap: spectrum.gap,
        dimension: spectrum.dimension,
        orbitals: config.orbitals,
        particles: config.particles,
        statistics: config.statistics,
        interaction: config.interaction,
        convergence: CiConvergence {
            reference_orbitals: smaller,
            ground_delta,
        },
    })
}

pub fn ci(config: &RunConfig) -> CommandResult<Value> {
    let report = ci_report(config)?;
    Ok(stamp(
        serde_json::to_value(report).expect("report serializes"),
        config,
    ))
}

/// Trial-state minimum against the CI reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    #[serde(rename = "E_trial_min")]
    pub e_trial_min: Option<f64>,
    pub alpha_star: Option<f64>,
    #[serde(rename = "E_ci")]
    pub e_ci: Option<f64>,
    pub gap: Option<f64>,
    pub delta: Option<f64>,
    pub delta_over_gap: Option<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Order-halving change of the energy at the minimizer.
    pub quadrature_delta: Option<f64>,
    /// `E₀(M) − E₀(M − 3)` for the CI reference.
    pub ci_orbital_delta: Option<f64>,
    pub boundary_minimum: Option<bool>,
    /// Lowest trial energy on the grid minus the CI energy; should not be
    /// materially negative.
    pub worst_variational_margin: Option<f64>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

/// Outcome of `compare`: the report is produced even when a sub-pipeline
/// fails, with the failure listed in its diagnostics.
pub struct Comparison {
    pub report: CompareReport,
    pub scan: Option<ScanResult>,
    pub ci: Option<CiReport>,
}

impl Comparison {
    pub fn failed(&self) -> bool {
        !self.report.diagnostics.errors.is_empty()
    }
}

pub fn compare(config: &RunConfig) -> Comparison {
    let mut errors = Vec::new();
    let scan = scan_result(config)
        .map_err(|e| errors.push(format!("scan: {e}")))
        .ok();
    let ci = ci_report(config)
        .map_err(|e| errors.push(format!("ci: {e}")))
        .ok();
    let mut warnings = scan
        .as_ref()
        .map(|s| scan_warnings(s, config))
        .unwrap_or_default();

    let e_trial_min = scan.as_ref().map(|s| s.energy_star);
    let e_ci = ci.as_ref().map(|c| c.energies[0]);
    let gap = ci.as_ref().map(|c| c.gap);
    let delta = e_trial_min.zip(e_ci).map(|(t, c)| t - c);
    let delta_over_gap = delta.zip(gap).map(|(d, g)| d / g);
    if let Some(d) = delta {
        if d < -1e-3 {
            warnings.push(format!(
                "trial energy lies {:.3e} below the CI reference; the CI basis is not converged",
                -d
            ));
        }
    }
    let quadrature_delta = scan.as_ref().map(|s| {
        s.refined
            .filter(|r| r.alpha == s.alpha_star)
            .map(|r| r.estimate.convergence_delta)
            .unwrap_or_else(|| {
                s.points
                    .iter()
                    .find(|p| p.alpha == s.alpha_star)
                    .map_or(f64::NAN, |p| p.estimate.convergence_delta)
            })
    });
    let worst_variational_margin = scan.as_ref().zip(e_ci).map(|(s, c)| {
        s.points
            .iter()
            .map(|p| p.estimate.energy - c)
            .fold(f64::INFINITY, f64::min)
    });
    let report = CompareReport {
        e_trial_min,
        alpha_star: scan.as_ref().map(|s| s.alpha_star),
        e_ci,
        gap,
        delta,
        delta_over_gap,
        diagnostics: Diagnostics {
            quadrature_delta,
            ci_orbital_delta: ci.as_ref().and_then(|c| c.convergence.ground_delta),
            boundary_minimum: scan.as_ref().map(|s| s.boundary_minimum),
            worst_variational_margin,
            warnings,
            errors,
        },
    };
    Comparison { report, scan, ci }
}

pub fn compare_json(cmp: &Comparison, config: &RunConfig) -> Value {
    stamp(
        serde_json::to_value(&cmp.report).expect("report serializes"),
        config,
    )
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

/// Text rendering of the energy curve with the CI energy as reference line.
pub fn compare_table(cmp: &Comparison, config: &RunConfig) -> String {
    let r = &cmp.report;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "N = {} {}, {} g = {} b = {}, M = {}, quadrature order {}",
        config.particles,
        config.statistics,
        config.interaction.kind,
        config.interaction.strength,
        config.interaction.range,
        config.orbitals,
        config.quad_order
    );
    let _ = writeln!(out, "{:>10}  {:>16}  {:>16}", "alpha", "E_trial", "E_trial - E_ci");
    if let Some(scan) = &cmp.scan {
        for p in &scan.points {
            let _ = writeln!(
                out,
                "{:>10.4}  {:>16.8}  {:>16}",
                p.alpha,
                p.estimate.energy,
                fmt_opt(r.e_ci.map(|c| p.estimate.energy - c), 8)
            );
        }
    }
    let _ = writeln!(out, "{}", "-".repeat(46));
    let _ = writeln!(
        out,
        "{:>10}  {:>16}  (gap {})",
        "E_ci",
        fmt_opt(r.e_ci, 8),
        fmt_opt(r.gap, 6)
    );
    let _ = writeln!(
        out,
        "minimum: alpha* = {}, E_trial = {}, delta = {}, delta/gap = {}",
        fmt_opt(r.alpha_star, 5),
        fmt_opt(r.e_trial_min, 8),
        fmt_opt(r.delta, 6),
        fmt_opt(r.delta_over_gap, 4)
    );
    for w in &r.diagnostics.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for e in &r.diagnostics.errors {
        let _ = writeln!(out, "error: {e}");
    }
    out
}
