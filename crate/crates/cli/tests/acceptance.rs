//! Acceptance criteria A1-A10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use cylou_cli::{cmd_check, cmd_simulate};
use cylou_core::criteria::{full_report, jump_terms, ConditionId, CriteriaOptions, Overall};
use cylou_core::diagnostics::{default_probes, empirical_cf, CfOracle, Horizon};
use cylou_core::simulate::{
    exact_step_stable, simulate_ensemble, stable_step_scale, subordinated_step_canonical, InitialState,
    SimConfig,
};
use cylou_core::spectral::weyl_eigenvalues;
use cylou_core::{
    CoeffVector, Ensemble, ModeSequence, NoiseSpec, OneDimLevySpec, PowerTail, RngState, SpectralModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `int (c^2 beta^2 ∧ 1) rho(d beta)` for `rho = |beta|^{-1-alpha}/2 d beta`,
/// integrated numerically in `x = ln beta` on each side of the kink.
fn truncated_moment(c: f64, alpha: f64) -> f64 {
    let kink = -c.ln();
    let n = 1000;
    let left = simpson(|x| c * c * ((2.0 - alpha) * x).exp(), kink - 40.0 / (2.0 - alpha), kink, n);
    let right = simpson(|x| (-alpha * x).exp(), kink, kink + 40.0 / alpha, n);
    left + right
}

fn a1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 1.5] {
        for sigma in [0.2, 1.0, 5.0] {
            for lambda in [0.5, 1.0, 4.0] {
                let horizon = 40.0 / (alpha * lambda);
                let oracle = simpson(
                    |s| truncated_moment(sigma * (-lambda * s).exp(), alpha),
                    0.0,
                    horizon,
                    1000,
                );
                let model = SpectralModel::new(vec![lambda]).unwrap();
                let noise = NoiseSpec::diagonal_series(vec![OneDimLevySpec::stable(alpha, sigma).unwrap()], None).unwrap();
                let split = jump_terms(&model, &noise).unwrap()[0];
                worst = worst.max((split - oracle).abs() / oracle);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 5.0,
        format!("27 cases, max relative error {worst:.2e} (limit 1e-6), {secs:.2} s (limit 5 s)"),
    )
}

fn a2() -> Outcome {
    let start = Instant::now();
    let dir = TempDir::new().unwrap();
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for alpha in [0.5, 1.0, 1.3, 1.5, 1.9] {
        for d in 1..=4u32 {
            let path = dir.path().join(format!("heat_{alpha}_{d}.json"));
            std::fs::write(
                &path,
                format!(r#"{{"model": {{"weyl": {{"d": {d}, "c": 1, "n_modes": 64}}}}, "noise": {{"type": "canonical_stable", "alpha": {alpha}}}}}"#),
            )
            .unwrap();
            let code = cmd_check(&path, Some(&dir.path().join("report.json"))).unwrap();
            let expect = if alpha * (d as f64) < 4.0 { 0 } else { 3 };
            cases += 1;
            if code != expect {
                mismatches.push(format!("alpha={alpha} d={d}: exit {code}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 10.0,
        format!("{cases} configs, mismatches {mismatches:?}, {secs:.2} s (limit 10 s)"),
    )
}

fn a3() -> Outcome {
    let start = Instant::now();
    let noise = NoiseSpec::iid_series(OneDimLevySpec::stable(1.5, 1.0).unwrap(), 10).unwrap();
    let opts = CriteriaOptions::default();
    let square = full_report(&weyl_eigenvalues(1, 1.0, 10).unwrap(), &noise, &opts).unwrap().overall;
    let linear = full_report(&weyl_eigenvalues(2, 1.0, 10).unwrap(), &noise, &opts).unwrap().overall;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        square == Overall::StationaryExists && linear == Overall::NoStationary && secs < 5.0,
        format!("lambda_k=k^2: {square:?}, lambda_k=k: {linear:?}, {secs:.2} s"),
    )
}

fn a4() -> Outcome {
    let start = Instant::now();
    let model = weyl_eigenvalues(1, 1.0, 10).unwrap();
    let families = [
        ("canonical", NoiseSpec::canonical_stable(1.0).unwrap()),
        ("diagonal stable", NoiseSpec::iid_series(OneDimLevySpec::stable(1.5, 1.0).unwrap(), 10).unwrap()),
        (
            "diagonal Gaussian",
            NoiseSpec::diagonal_gaussian(ModeSequence::from_law(10, PowerTail::constant(1.0))).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, noise) in &families {
        let oracle = CfOracle::new(&model, noise, 1e-6).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let v: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v = CoeffVector::new(v).unwrap();
            let s = rng.random_range(0.0..3.0);
            let t = rng.random_range(0.0..3.0);
            worst = worst.max(oracle.skew_convolution_residual(&v, s, t).unwrap().value);
            worst = worst.max(oracle.stationarity_residual(&v, t).unwrap().value);
        }
        pass &= worst <= 3e-6;
        parts.push(format!("{name} {worst:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pass && secs < 30.0,
        format!("max residual per family (limit 3e-6): {}; {secs:.2} s", parts.join(", ")),
    )
}

fn a5_instance() -> (SpectralModel, NoiseSpec) {
    let model = weyl_eigenvalues(1, 1.0, 10).unwrap();
    let noise = NoiseSpec::iid_series(OneDimLevySpec::stable(1.5, 1.0).unwrap(), 10).unwrap();
    (model, noise)
}

fn a5(ens: &Ensemble, secs: f64) -> Outcome {
    let (model, noise) = a5_instance();
    let oracle = CfOracle::new(&model, &noise, 1e-8).unwrap();
    let probes = default_probes(10, 2024);
    let mut worst: f64 = 0.0;
    for v in &probes {
        let emp = empirical_cf(ens, 0, v).unwrap();
        let lim = oracle.analytic_cf(v, Horizon::Infinite).unwrap();
        worst = worst.max((emp.value - lim.value).norm());
    }
    outcome(
        worst <= 0.02 && probes.len() == 20 && secs < 60.0,
        format!("{} probes, max |empirical - limit| {worst:.4} (limit 0.02), simulation {secs:.2} s", probes.len()),
    )
}

fn cf_real(xs: &[f64], stride: usize, u: &[f64]) -> f64 {
    let m = (xs.len() / stride) as f64;
    xs.chunks_exact(stride)
        .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().cos())
        .sum::<f64>()
        / m
}

fn a6() -> Outcome {
    let (lambda, sigma, dt) = (1.0, 1.0, 0.5);
    let mut worst: f64 = 0.0;
    for (i, alpha) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        let mut rng = RngState::new(6, i as u64);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| exact_step_stable(0.0, lambda, alpha, sigma, dt, &mut rng))
            .collect();
        let scale = stable_step_scale(lambda, alpha, sigma, dt);
        for theta in [0.5f64, 1.0, 2.0] {
            let exact = (-(scale * theta).powf(alpha)).exp();
            worst = worst.max((cf_real(&xs, 1, &[theta]) - exact).abs());
        }
    }
    outcome(worst <= 0.02, format!("alpha in {{0.5, 1, 1.5}}, theta in {{0.5, 1, 2}}: max CF error {worst:.4} (limit 0.02)"))
}

fn a7() -> Outcome {
    let (alpha, dt) = (1.5, 0.5);
    let model = weyl_eigenvalues(1, 1.0, 3).unwrap();
    let zero = CoeffVector::zeros(3);
    let mut rng = RngState::new(7, 0);
    let mut xs = Vec::with_capacity(300_000);
    for _ in 0..100_000 {
        xs.extend(subordinated_step_canonical(&zero, &model, alpha, dt, &mut rng).unwrap().into_vec());
    }
    let h = 0.5f64.sqrt();
    let probes: [[f64; 3]; 5] = [[1.0, 0.0, 0.0], [0.0, h, h], [0.5, 0.0, 0.0], [0.0, 0.0, 2.0], [0.9, 1.2, 0.0]];
    let cfs: Vec<f64> = probes.iter().map(|u| cf_real(&xs, 3, u)).collect();
    let mut worst: f64 = 0.0;
    for (u, cf) in probes.iter().zip(&cfs) {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        worst = worst.max((cf - (-dt * norm.powf(alpha)).exp()).abs());
    }
    let rotation = (cfs[0] - cfs[1]).abs();
    outcome(
        worst <= 0.02 && rotation <= 0.02,
        format!("5 probes, max CF error {worst:.4}, equal-norm gap {rotation:.4} (limits 0.02)"),
    )
}

fn a8(source: &Ensemble) -> Outcome {
    let (model, noise) = a5_instance();
    let config = SimConfig::new(100_000, 1.0, 1.0, 8).with_y0(InitialState::resample_from(source, 0));
    let evolved = simulate_ensemble(&model, &noise, &config).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for w in default_probes(10, 8).into_iter().filter(|w| (w.norm() - 1.0).abs() < 1e-12) {
        let before = cf_real(source.samples(0), 10, w.as_slice());
        let after = cf_real(evolved.samples(0), 10, w.as_slice());
        worst = worst.max((after - before).abs());
        count += 1;
    }
    outcome(worst <= 0.03, format!("{count} unit directions w, max |E[P_1 f] - E[f]| {worst:.4} (limit 0.03)"))
}

fn a9() -> Outcome {
    let model = weyl_eigenvalues(1, 1.0, 10).unwrap();
    let noise = NoiseSpec::diagonal_gaussian(ModeSequence::from_law(10, PowerTail::constant(1.0))).unwrap();
    let report = full_report(&model, &noise, &CriteriaOptions::default()).unwrap();
    let trace = report.get(ConditionId::TraceB).and_then(|r| r.value).unwrap_or(f64::NAN);
    let trace_err = (trace - PI * PI / 12.0).abs();
    let oracle = CfOracle::new(&model, &noise, 1e-11).unwrap();
    let mut worst: f64 = 0.0;
    for v in default_probes(10, 9) {
        let exact = (-v.as_slice().iter().enumerate().map(|(i, x)| x * x / (4.0 * ((i + 1) * (i + 1)) as f64)).sum::<f64>()).exp();
        worst = worst.max((oracle.analytic_cf(&v, Horizon::Infinite).unwrap().value - exact).norm());
    }
    outcome(
        trace_err <= 1e-6 && worst <= 1e-8,
        format!("trace {trace:.12} (error {trace_err:.1e}, limit 1e-6), max CF error {worst:.1e} (limit 1e-8)"),
    )
}

const A5_CONFIG: &str = r#"{
  "model": {"weyl": {"d": 1, "c": 1, "n_modes": 10}},
  "noise": {"type": "stable_series", "alpha": 1.5, "sigma": {"coeff": 1, "exponent": 0}},
  "sim": {"n_paths": 100000, "t_final": 10, "dt": 10},
  "seed": 2024
}"#;

fn a10(dir: &Path) -> Outcome {
    let cfg = dir.join("a5.json");
    std::fs::write(&cfg, A5_CONFIG).unwrap();
    let files: Vec<Vec<u8>> = [1usize, 2, 8]
        .iter()
        .map(|&w| {
            let out = dir.join(format!("stats_{w}.csv"));
            cmd_simulate(&cfg, Some(&out), None, w).unwrap();
            std::fs::read(out).unwrap()
        })
        .collect();
    let same = files.windows(2).all(|p| p[0] == p[1]);
    let passes = String::from_utf8_lossy(&files[0]).lines().filter(|l| l.ends_with(",true")).count();
    outcome(
        same && !files[0].is_empty(),
        format!("workers 1, 2, 8: byte-identical = {same} ({} bytes, {passes} CF checks pass)", files[0].len()),
    )
}

fn main() {
    let dir = TempDir::new().unwrap();
    let (model, noise) = a5_instance();
    let start = Instant::now();
    let ens = simulate_ensemble(&model, &noise, &SimConfig::new(100_000, 10.0, 10.0, 2024)).unwrap();
    let sim_secs = start.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("A1", a1()),
        ("A2", a2()),
        ("A3", a3()),
        ("A4", a4()),
        ("A5", a5(&ens, sim_secs)),
        ("A6", a6()),
        ("A7", a7()),
        ("A8", a8(&ens)),
        ("A9", a9()),
        ("A10", a10(dir.path())),
    ];
    let mut failed = 0;
    for (id, o) in &results {
        println!("{id} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
