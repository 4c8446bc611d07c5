//! Commands behind the `cylou` binary.
//!
//! Exit codes: 0 success (stationary measure exists), 1 usage or
//! configuration error, 3 no stationary measure, 4 inconclusive, 5 a
//! diagnostic residual or CF check out of tolerance, 6 runtime failure.

pub mod config;
pub mod stats;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use cylou_core::criteria::{full_report, CriterionResult, Overall};
use cylou_core::diagnostics::{empirical_cf, CfOracle, Horizon};
use cylou_core::simulate::{simulate_ensemble_with_workers, InitialState};
use cylou_core::{CoeffVector, GrowthLaw, NoiseSpec, SpectralModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_STATIONARY: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_DIAGNOSTIC: i32 = 5;
pub const EXIT_RUNTIME: i32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Runtime(#[from] cylou_core::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Runtime(_) | Self::Output(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
}

/// The JSON document written by `check` and `demo heat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub provenance: Provenance,
    pub conditions: Vec<CriterionResult>,
    pub overall: Overall,
    pub notes: String,
}

pub fn overall_exit_code(overall: Overall) -> i32 {
    match overall {
        Overall::StationaryExists => EXIT_OK,
        Overall::NoStationary => EXIT_NO_STATIONARY,
        Overall::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn header(sha: &str, seed: u64, extra: &[(&str, String)]) -> String {
    let mut h = format!("# config_sha256: {sha}\n# seed: {seed}\n");
    for (k, v) in extra {
        let _ = writeln!(h, "# {k}: {v}");
    }
    h
}

fn check_report(
    model: &SpectralModel,
    noise: &NoiseSpec,
    opts: &cylou_core::CriteriaOptions,
    provenance: Provenance,
) -> Result<ReportFile, CliError> {
    let r = full_report(model, noise, opts)?;
    Ok(ReportFile {
        provenance,
        conditions: r.results,
        overall: r.overall,
        notes: r.notes,
    })
}

/// Decide stationarity for the configured model and noise and write the
/// JSON report.
pub fn cmd_check(config_path: &Path, out: Option<&Path>) -> Result<i32, CliError> {
    let loaded = config::load(config_path)?;
    let c = &loaded.config;
    let model = c.model()?;
    let noise = c.noise(model.n_modes())?;
    let report = check_report(
        &model,
        &noise,
        &c.criteria_options(),
        Provenance {
            config_sha256: loaded.sha256.clone(),
            seed: c.seed,
        },
    )?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(out, &text)?;
    Ok(overall_exit_code(report.overall))
}

/// `check` on the stochastic heat equation: Weyl eigenvalues `k^(2/d)` with
/// canonical alpha-stable noise.
pub fn cmd_demo_heat(alpha: f64, dim: u32, n_modes: usize, out: Option<&Path>) -> Result<i32, CliError> {
    let text = format!(
        "{{\"model\":{{\"weyl\":{{\"d\":{dim},\"c\":1,\"n_modes\":{n_modes}}}}},\"noise\":{{\"type\":\"canonical_stable\",\"alpha\":{alpha}}}}}"
    );
    let c = config::parse(&text)?;
    let model = c.model()?;
    let noise = c.noise(model.n_modes())?;
    let report = check_report(
        &model,
        &noise,
        &c.criteria_options(),
        Provenance {
            config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
            seed: 0,
        },
    )?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(out, &json)?;
    Ok(overall_exit_code(report.overall))
}

pub const SIMULATE_COLUMNS: &str = "time,functional,mean,variance,q05,q25,q50,q75,q95,\
cf_empirical_re,cf_empirical_im,cf_analytic_re,cf_analytic_im,cf_abs_diff,cf_err_budget,cf_pass";

/// Simulate the configured ensemble and write statistics of the linear
/// functionals `<Y, e_k>` and `<Y, v>` for every probe `v`, each with a CF
/// check at `theta = 1` against the quadrature oracle. `dump` receives the
/// final-time sample.
pub fn cmd_simulate(
    config_path: &Path,
    out: Option<&Path>,
    dump: Option<&Path>,
    workers: usize,
) -> Result<i32, CliError> {
    let loaded = config::load(config_path)?;
    let c = &loaded.config;
    let model = c.model()?;
    let n = model.n_modes();
    let noise = c.noise(n)?;
    let sim = c.sim_config(n)?;
    let probes = c.probes(n)?;
    let ens = simulate_ensemble_with_workers(&model, &noise, &sim, workers)?;
    let oracle = CfOracle::with_overall(&model, &noise, c.tolerances.cf, Overall::Inconclusive)?;

    let mut functionals: Vec<(String, CoeffVector)> = (1..=n)
        .map(|k| (format!("mode_{k}"), CoeffVector::basis(n, k, 1.0)))
        .collect();
    functionals.extend(
        probes
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("probe_{}", i + 1), v)),
    );

    let mut text = header(
        &loaded.sha256,
        c.seed,
        &[
            ("stream", sim.rng.stream().to_string()),
            ("scheme", format!("{:?}", ens.scheme)),
            ("n_paths", ens.n_paths.to_string()),
        ],
    );
    text.push_str(SIMULATE_COLUMNS);
    text.push('\n');
    let mut failures = 0;
    for (r, &t) in ens.record_times.iter().enumerate() {
        for (name, v) in &functionals {
            let mut values: Vec<f64> = ens
                .samples(r)
                .chunks_exact(n)
                .map(|y| v.dot(y))
                .collect();
            let s = stats::summarize(&mut values);
            let emp = empirical_cf(&ens, r, v)?;
            let analytic = match &sim.y0 {
                InitialState::Zero => Some(oracle.analytic_cf(v, Horizon::Finite(t))?),
                InitialState::Point(y0) => Some(oracle.state_cf(y0, v, t)?),
                InitialState::Resample(_) => None,
            };
            let _ = write!(text, "{},{name}", num(t));
            for x in [s.mean, s.variance, s.q[0], s.q[1], s.q[2], s.q[3], s.q[4], emp.value.re, emp.value.im] {
                let _ = write!(text, ",{}", num(x));
            }
            match analytic {
                Some(a) => {
                    let diff = (emp.value - a.value).norm();
                    let budget = emp.err_bound + a.err_bound;
                    let pass = diff <= budget;
                    if !pass {
                        failures += 1;
                    }
                    let _ = writeln!(
                        text,
                        ",{},{},{},{},{pass}",
                        num(a.value.re),
                        num(a.value.im),
                        num(diff),
                        num(budget)
                    );
                }
                None => text.push_str(",,,,,\n"),
            }
        }
    }
    emit(out, &text)?;
    if let Some(path) = dump {
        let last = ens.record_times.len() - 1;
        let mut d = header(
            &loaded.sha256,
            c.seed,
            &[("time", ens.record_times[last].to_string())],
        );
        d.push_str("path");
        for k in 1..=n {
            let _ = write!(d, ",mode_{k}");
        }
        d.push('\n');
        for (p, y) in ens.samples(last).chunks_exact(n).enumerate() {
            let _ = write!(d, "{}", p + 1);
            for x in y {
                let _ = write!(d, ",{}", num(*x));
            }
            d.push('\n');
        }
        std::fs::write(path, d)?;
    }
    if failures > 0 {
        eprintln!("{failures} CF check(s) outside their error budget");
        return Ok(EXIT_DIAGNOSTIC);
    }
    Ok(EXIT_OK)
}

pub const COMPARE_COLUMNS: &str = "t,probe_id,curve,skew_residual,stationarity_residual";

/// Convergence curves and identity residuals for every probe on the
/// configured time grid.
pub fn cmd_compare(config_path: &Path, out: Option<&Path>) -> Result<i32, CliError> {
    let loaded = config::load(config_path)?;
    let c = &loaded.config;
    let model = c.model()?;
    let noise = c.noise(model.n_modes())?;
    let probes = c.probes(model.n_modes())?;
    let grid = &c.compare.t_grid;
    if grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || !(c.compare.s >= 0.0) {
        return Err(CliError::Config("compare: times must be finite and nonnegative".into()));
    }
    let report = full_report(&model, &noise, &c.criteria_options())?;
    let oracle = CfOracle::with_overall(&model, &noise, c.tolerances.cf, report.overall)?;
    let stationary = report.overall == Overall::StationaryExists;
    let tol = c.tolerances.residual;

    let mut text = header(
        &loaded.sha256,
        c.seed,
        &[
            ("overall", format!("{:?}", report.overall)),
            ("s", c.compare.s.to_string()),
        ],
    );
    text.push_str(COMPARE_COLUMNS);
    text.push('\n');
    let mut failures = 0;
    for (i, v) in probes.iter().enumerate() {
        let curve = if stationary {
            Some(oracle.convergence_curve(v, grid)?)
        } else {
            None
        };
        for (j, &t) in grid.iter().enumerate() {
            let skew = oracle.skew_convolution_residual(v, c.compare.s, t)?;
            if skew.value > tol {
                failures += 1;
            }
            let _ = write!(text, "{},{},", num(t), i + 1);
            match &curve {
                Some(cv) => {
                    let st = oracle.stationarity_residual(v, t)?;
                    if st.value > tol {
                        failures += 1;
                    }
                    let _ = writeln!(text, "{},{},{}", num(cv[j].1), num(skew.value), num(st.value));
                }
                None => {
                    let _ = writeln!(text, ",{},", num(skew.value));
                }
            }
        }
    }
    emit(out, &text)?;
    if failures > 0 {
        eprintln!("{failures} residual(s) above {tol}");
        return Ok(EXIT_DIAGNOSTIC);
    }
    Ok(overall_exit_code(report.overall))
}

/// `alpha d < 4` with the same argument checks as the criteria.
pub fn heat_law_text(alpha: f64, dim: u32) -> Result<String, CliError> {
    let holds = cylou_core::criteria::heat_verdict(alpha, dim).map_err(|e| CliError::Config(e.to_string()))?;
    let law = GrowthLaw::Weyl { d: dim, c: 1.0 };
    Ok(format!(
        "{law:?}: alpha d = {} {} 4",
        alpha * dim as f64,
        if holds { "<" } else { ">=" }
    ))
}
