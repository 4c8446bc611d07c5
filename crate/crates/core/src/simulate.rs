//! Monte-Carlo ensembles of the truncated mild solution
//! `Y(t) = T(t) Y0 + int_0^t T(t-s) dL(s)`.
//!
//! The stochastic convolution is produced as the time-`t` state of a one-step
//! recursion. Its law equals that of `int_0^t T(s) dL(s)` because Lévy
//! increments are stationary, so the ensemble samples `T(t)Y0 * nu_t`.
//!
//! Path `p` draws only from substream `p` of the configured [`RngState`] and
//! writes only its own output rows, so results are bit-identical for every
//! worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levy::{
    positive_stable, sample_compound_poisson, standard_normal, standard_stable, NoiseSpec,
    OneDimLevySpec,
};
use crate::rng::RngState;
use crate::spectral::{CoeffVector, SpectralModel};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Zero,
    Point(CoeffVector),
    /// Path `p` starts from sample `p mod S` of `S` stored samples, given
    /// row-major with one row per sample.
    Resample(Vec<f64>),
}

impl InitialState {
    /// Samples at record `record` of `ensemble`.
    pub fn resample_from(ensemble: &Ensemble, record: usize) -> Self {
        Self::Resample(ensemble.samples(record).to_vec())
    }
}

/// Work limits; exceeding either fails before any sampling is done.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimBudget {
    /// Maximum number of stored reals.
    pub max_states: u64,
    /// Maximum of `paths * modes * steps`.
    pub max_work: u64,
}

impl Default for SimBudget {
    fn default() -> Self {
        Self {
            max_states: 250_000_000,
            max_work: 20_000_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n_paths: usize,
    pub t_final: f64,
    pub dt: f64,
    pub record_times: Vec<f64>,
    pub rng: RngState,
    pub y0: InitialState,
    pub budget: SimBudget,
}

impl SimConfig {
    /// Zero start, records only `t_final`.
    pub fn new(n_paths: usize, t_final: f64, dt: f64, seed: u64) -> Self {
        Self {
            n_paths,
            t_final,
            dt,
            record_times: vec![t_final],
            rng: RngState::new(seed, 0),
            y0: InitialState::Zero,
            budget: SimBudget::default(),
        }
    }

    pub fn with_record_times(mut self, times: Vec<f64>) -> Self {
        self.record_times = times;
        self
    }

    pub fn with_y0(mut self, y0: InitialState) -> Self {
        self.y0 = y0;
        self
    }

    pub fn with_rng(mut self, rng: RngState) -> Self {
        self.rng = rng;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be positive"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_final) {
            return Err(invalid(format!(
                "dt must lie in (0, t_final], got {}",
                self.dt
            )));
        }
        if self.record_times.is_empty() {
            return Err(invalid("record_times must not be empty"));
        }
        if self
            .record_times
            .iter()
            .any(|&t| !(0.0..=self.t_final).contains(&t))
        {
            return Err(invalid("record_times must lie in [0, t_final]"));
        }
        if self.record_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("record_times must be sorted"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    ExactStable,
    EulerCP,
    SubordinatedCanonical,
    ExactGaussian,
}

impl Scheme {
    pub fn is_exact(self) -> bool {
        matches!(self, Self::ExactStable | Self::ExactGaussian)
    }

    pub fn for_noise(noise: &NoiseSpec) -> Self {
        match noise {
            NoiseSpec::CanonicalStable { .. } => Self::SubordinatedCanonical,
            NoiseSpec::DiagonalGaussian { .. } => Self::ExactGaussian,
            NoiseSpec::DiagonalSeries { coords, .. } => {
                if coords.iter().all(OneDimLevySpec::is_stable) {
                    Self::ExactStable
                } else {
                    Self::EulerCP
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub record_times: Vec<f64>,
    pub n_paths: usize,
    pub n_modes: usize,
    /// `[record][path][mode]`, row-major.
    pub states: Vec<f64>,
    pub scheme: Scheme,
    pub seed: u64,
    pub stream: u64,
}

impl Ensemble {
    /// All paths at record `record`, one row of `n_modes` per path.
    pub fn samples(&self, record: usize) -> &[f64] {
        let len = self.n_paths * self.n_modes;
        &self.states[record * len..(record + 1) * len]
    }

    pub fn state(&self, record: usize, path: usize) -> &[f64] {
        let start = (record * self.n_paths + path) * self.n_modes;
        &self.states[start..start + self.n_modes]
    }

    pub fn record_index(&self, t: f64) -> Option<usize> {
        self.record_times.iter().position(|&r| r == t)
    }

    /// Values of mode `k` (0-based) across paths at record `record`.
    pub fn mode_column(&self, record: usize, k: usize) -> Vec<f64> {
        self.samples(record)
            .chunks_exact(self.n_modes)
            .map(|row| row[k])
            .collect()
    }
}

/// Scale of the stochastic part of an exact stable step:
/// `sigma ((1 - e^{-alpha lambda dt}) / (alpha lambda))^{1/alpha}`.
pub fn stable_step_scale(lambda: f64, alpha: f64, sigma: f64, dt: f64) -> f64 {
    let r = alpha * lambda;
    sigma * (-(-r * dt).exp_m1() / r).powf(1.0 / alpha)
}

/// One exact-in-law step of `dY = -lambda Y dt + sigma dl`, `l` standard
/// symmetric alpha-stable.
pub fn exact_step_stable(
    y: f64,
    lambda: f64,
    alpha: f64,
    sigma: f64,
    dt: f64,
    rng: &mut RngState,
) -> f64 {
    (-lambda * dt).exp() * y + stable_step_scale(lambda, alpha, sigma, dt) * standard_stable(alpha, rng)
}

/// Decay then add an exact compound Poisson increment, coordinatewise.
/// Stable coordinates of a mixed series are stepped exactly.
pub fn euler_step_cp(
    y: &CoeffVector,
    model: &SpectralModel,
    noise: &NoiseSpec,
    dt: f64,
    rng: &mut RngState,
) -> Result<CoeffVector> {
    let coords = match noise {
        NoiseSpec::DiagonalSeries { coords, .. } => coords,
        _ => return Err(invalid("euler_step_cp needs diagonal series noise")),
    };
    check_len(model.n_modes(), coords.len())?;
    check_len(model.n_modes(), y.len())?;
    let mut out = y.as_slice().to_vec();
    for ((x, c), &l) in out.iter_mut().zip(coords).zip(model.lambdas()) {
        *x = coord_step(*x, l, c, dt, rng)?;
    }
    CoeffVector::new(out)
}

fn coord_step(x: f64, lambda: f64, c: &OneDimLevySpec, dt: f64, rng: &mut RngState) -> Result<f64> {
    Ok(match c {
        OneDimLevySpec::SymmetricAlphaStable { alpha, sigma } => {
            exact_step_stable(x, lambda, *alpha, *sigma, dt, rng)
        }
        OneDimLevySpec::CompoundPoissonSymmetric { .. } => {
            (-lambda * dt).exp() * x + sample_compound_poisson(c, dt, rng)?
        }
    })
}

/// `y'_k = e^{-lambda_k dt} y_k + dL_k` with `dL = sqrt(2S) G`, `S` a positive
/// (alpha/2)-stable increment shared by all modes and `G` standard normal,
/// so that `E exp(i<u, dL>) = exp(-dt ||u||^alpha)`.
pub fn subordinated_step_canonical(
    y: &CoeffVector,
    model: &SpectralModel,
    alpha: f64,
    dt: f64,
    rng: &mut RngState,
) -> Result<CoeffVector> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid(format!("stability index must lie in (0, 2), got {alpha}")));
    }
    if !(dt > 0.0) {
        return Err(invalid("time step must be positive"));
    }
    check_len(model.n_modes(), y.len())?;
    let g = (2.0 * positive_stable(0.5 * alpha, dt, rng)).sqrt();
    let out = y
        .as_slice()
        .iter()
        .zip(model.lambdas())
        .map(|(x, l)| (-l * dt).exp() * x + g * standard_normal(rng))
        .collect();
    CoeffVector::new(out)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Coefficients of one step of size `h`, per mode.
struct StepPlan {
    steps: u64,
    decay: Vec<f64>,
    stable_scale: Vec<f64>,
    gauss_sd: Vec<f64>,
    shift: Vec<f64>,
    h: f64,
}

enum Driver<'a> {
    Stable { alpha: f64, sigmas: Vec<f64> },
    Compound(&'a [OneDimLevySpec]),
    Canonical(f64),
    Gaussian,
}

struct Plan<'a> {
    n: usize,
    driver: Driver<'a>,
    intervals: Vec<StepPlan>,
    y0: &'a InitialState,
}

fn plan<'a>(
    model: &SpectralModel,
    noise: &'a NoiseSpec,
    config: &'a SimConfig,
    scheme: Scheme,
) -> Result<Plan<'a>> {
    let n = model.n_modes();
    let lambdas = model.lambdas();
    let mut q_total = model
        .q_diag()
        .map(|q| q.values.clone())
        .unwrap_or_else(|| vec![0.0; n]);
    let driver = match noise {
        NoiseSpec::CanonicalStable { alpha } => Driver::Canonical(*alpha),
        NoiseSpec::DiagonalGaussian { q } => {
            check_len(n, q.len())?;
            q_total.iter_mut().zip(&q.values).for_each(|(a, b)| *a += b);
            Driver::Gaussian
        }
        NoiseSpec::DiagonalSeries { coords, .. } => {
            check_len(n, coords.len())?;
            let common = match coords[0] {
                OneDimLevySpec::SymmetricAlphaStable { alpha, .. } => Some(alpha),
                _ => None,
            };
            let sigmas: Option<Vec<f64>> = coords
                .iter()
                .map(|c| match c {
                    OneDimLevySpec::SymmetricAlphaStable { alpha, sigma } if Some(*alpha) == common => {
                        Some(*sigma)
                    }
                    _ => None,
                })
                .collect();
            match (common, sigmas) {
                (Some(alpha), Some(sigmas)) => Driver::Stable { alpha, sigmas },
                // compound Poisson or mixed indices: stepped coordinatewise
                _ => Driver::Compound(coords),
            }
        }
    };
    let a = model.a_diag().map(|a| a.values.clone());

    let mut prev = 0.0;
    let mut intervals = Vec::with_capacity(config.record_times.len());
    for &t in &config.record_times {
        let len = t - prev;
        prev = t;
        let steps = if len <= 0.0 {
            0
        } else if scheme.is_exact() {
            1
        } else {
            (len / config.dt).ceil().max(1.0) as u64
        };
        let h = if steps == 0 { 0.0 } else { len / steps as f64 };
        let decay = lambdas.iter().map(|l| (-l * h).exp()).collect();
        let stable_scale = match &driver {
            Driver::Stable { alpha, sigmas } if h > 0.0 => sigmas
                .iter()
                .zip(lambdas)
                .map(|(s, l)| stable_step_scale(*l, *alpha, *s, h))
                .collect(),
            _ => vec![0.0; n],
        };
        let gauss_sd = q_total
            .iter()
            .zip(lambdas)
            .map(|(q, l)| (q * -(-2.0 * l * h).exp_m1() / (2.0 * l)).sqrt())
            .collect();
        let shift = match &a {
            Some(a) => a
                .iter()
                .zip(lambdas)
                .map(|(a, l)| a * -(-l * h).exp_m1() / l)
                .collect(),
            None => vec![0.0; n],
        };
        intervals.push(StepPlan {
            steps,
            decay,
            stable_scale,
            gauss_sd,
            shift,
            h,
        });
    }
    Ok(Plan {
        n,
        driver,
        intervals,
        y0: &config.y0,
    })
}

fn run_path(plan: &Plan<'_>, lambdas: &[f64], rng: &mut RngState, path: usize, out: &mut [f64]) -> Result<()> {
    let n = plan.n;
    let mut y = match plan.y0 {
        InitialState::Zero => vec![0.0; n],
        InitialState::Point(v) => v.as_slice().to_vec(),
        InitialState::Resample(s) => {
            let r = path % (s.len() / n);
            s[r * n..(r + 1) * n].to_vec()
        }
    };
    for (iv, row) in plan.intervals.iter().zip(out.chunks_exact_mut(n)) {
        for _ in 0..iv.steps {
            match &plan.driver {
                Driver::Stable { alpha, .. } => {
                    for k in 0..n {
                        y[k] = iv.decay[k] * y[k] + iv.stable_scale[k] * standard_stable(*alpha, rng);
                    }
                }
                Driver::Compound(coords) => {
                    for k in 0..n {
                        y[k] = coord_step(y[k], lambdas[k], &coords[k], iv.h, rng)?;
                    }
                }
                Driver::Canonical(alpha) => {
                    let g = (2.0 * positive_stable(0.5 * alpha, iv.h, rng)).sqrt();
                    for k in 0..n {
                        y[k] = iv.decay[k] * y[k] + g * standard_normal(rng);
                    }
                }
                Driver::Gaussian => {
                    for k in 0..n {
                        y[k] *= iv.decay[k];
                    }
                }
            }
            add_common_terms(iv, &mut y, rng);
        }
        row.copy_from_slice(&y);
    }
    Ok(())
}

fn add_common_terms(iv: &StepPlan, y: &mut [f64], rng: &mut RngState) {
    for k in 0..y.len() {
        if iv.gauss_sd[k] > 0.0 {
            y[k] += iv.gauss_sd[k] * standard_normal(rng);
        }
        y[k] += iv.shift[k];
    }
}

/// Sample `config.n_paths` paths at `config.record_times` on the current
/// rayon pool.
pub fn simulate_ensemble(model: &SpectralModel, noise: &NoiseSpec, config: &SimConfig) -> Result<Ensemble> {
    simulate_inner(model, noise, config)
}

/// As [`simulate_ensemble`] on a dedicated pool of `workers` threads.
pub fn simulate_ensemble_with_workers(
    model: &SpectralModel,
    noise: &NoiseSpec,
    config: &SimConfig,
    workers: usize,
) -> Result<Ensemble> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::SimulationBudget(format!("cannot start worker pool: {e}")))?;
    pool.install(|| simulate_inner(model, noise, config))
}

fn simulate_inner(model: &SpectralModel, noise: &NoiseSpec, config: &SimConfig) -> Result<Ensemble> {
    config.validate()?;
    noise.validate()?;
    let n = model.n_modes();
    match &config.y0 {
        InitialState::Point(v) => check_len(n, v.len())?,
        InitialState::Resample(s) => {
            if s.is_empty() || s.len() % n != 0 {
                return Err(invalid(format!(
                    "resample source has {} values, not a positive multiple of {n} modes",
                    s.len()
                )));
            }
        }
        InitialState::Zero => {}
    }
    let scheme = Scheme::for_noise(noise);
    let plan = plan(model, noise, config, scheme)?;

    let m = config.n_paths as u64;
    let r = config.record_times.len() as u64;
    let states = m.saturating_mul(r).saturating_mul(n as u64);
    if states > config.budget.max_states {
        return Err(Error::SimulationBudget(format!(
            "{states} stored values exceed the limit {}",
            config.budget.max_states
        )));
    }
    let steps: u64 = plan.intervals.iter().map(|i| i.steps).sum();
    let work = m.saturating_mul(n as u64).saturating_mul(steps);
    if work > config.budget.max_work {
        return Err(Error::SimulationBudget(format!(
            "{work} mode updates exceed the limit {}",
            config.budget.max_work
        )));
    }

    let row = r as usize * n;
    let mut path_major = vec![0.0; config.n_paths * row];
    path_major
        .par_chunks_mut(row)
        .enumerate()
        .try_for_each(|(p, out)| {
            let mut rng = config.rng.substream(p as u64);
            run_path(&plan, model.lambdas(), &mut rng, p, out)
        })?;

    let per_record = config.n_paths * n;
    let mut states = vec![0.0; path_major.len()];
    states
        .par_chunks_mut(per_record)
        .enumerate()
        .for_each(|(rec, dst)| {
            for (p, d) in dst.chunks_exact_mut(n).enumerate() {
                let src = p * row + rec * n;
                d.copy_from_slice(&path_major[src..src + n]);
            }
        });

    Ok(Ensemble {
        record_times: config.record_times.clone(),
        n_paths: config.n_paths,
        n_modes: n,
        states,
        scheme,
        seed: config.rng.seed(),
        stream: config.rng.stream(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MehlerEstimate {
    pub value: f64,
    /// `sup|f| / sqrt(M)`.
    pub std_err: f64,
}

/// Monte-Carlo `P_t f(v) = E f(T(t)v + H)`, `H ~ nu_t`, from `n_paths`
/// samples of the ensemble started at zero.
#[allow(clippy::too_many_arguments)]
pub fn mehler_apply(
    model: &SpectralModel,
    noise: &NoiseSpec,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    f_sup: f64,
    v: &CoeffVector,
    t: f64,
    n_paths: usize,
    dt: f64,
    rng: &RngState,
) -> Result<MehlerEstimate> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    check_len(model.n_modes(), v.len())?;
    if t == 0.0 {
        return Ok(MehlerEstimate {
            value: f(v.as_slice()),
            std_err: 0.0,
        });
    }
    let shifted = model.semigroup_apply(v, t)?;
    let config = SimConfig::new(n_paths, t, dt.min(t), 0).with_rng(rng.clone());
    let ens = simulate_ensemble(model, noise, &config)?;
    let mut x = vec![0.0; model.n_modes()];
    let total: f64 = ens
        .samples(0)
        .chunks_exact(ens.n_modes)
        .map(|h| {
            for ((xi, hi), si) in x.iter_mut().zip(h).zip(shifted.as_slice()) {
                *xi = si + hi;
            }
            f(&x)
        })
        .sum();
    Ok(MehlerEstimate {
        value: total / n_paths as f64,
        std_err: f_sup / (n_paths as f64).sqrt(),
    })
}
