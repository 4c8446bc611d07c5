//! JSON run configuration.

use std::path::Path;

use cylou_core::criteria::CriteriaOptions;
use cylou_core::diagnostics::default_probes;
use cylou_core::simulate::{InitialState, SimBudget};
use cylou_core::{
    CoeffVector, CoordTail, GrowthLaw, ModeSequence, NoiseSpec, OneDimLevySpec, PowerTail, RngState,
    SimConfig, SpectralModel,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub probes: ProbesConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default)]
    pub weyl: Option<WeylConfig>,
    #[serde(default)]
    pub power_log: Option<PowerLogConfig>,
    /// Law that the explicit `eigenvalues` follow beyond the list.
    #[serde(default)]
    pub growth_law: Option<GrowthLaw>,
    #[serde(default)]
    pub q_diag: Option<SequenceConfig>,
    #[serde(default)]
    pub a_diag: Option<SequenceConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub d: u32,
    #[serde(default = "one")]
    pub c: f64,
    pub n_modes: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLogConfig {
    #[serde(default = "one")]
    pub c: f64,
    pub power: f64,
    #[serde(default)]
    pub log_power: f64,
    pub n_modes: usize,
}

fn one() -> f64 {
    1.0
}

/// Either explicit `values` (with an optional `tail` law) or a `law`
/// applied to every mode.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub tail: Option<PowerTail>,
    #[serde(default)]
    pub law: Option<PowerTail>,
}

impl SequenceConfig {
    fn build(&self, n: usize, what: &str) -> Result<ModeSequence, CliError> {
        match (&self.values, self.law) {
            (Some(v), None) => {
                if v.len() != n {
                    return Err(CliError::Config(format!(
                        "{what}: {} values given for {n} modes",
                        v.len()
                    )));
                }
                ModeSequence::new(v.clone(), self.tail).map_err(|e| CliError::Config(format!("{what}: {e}")))
            }
            (None, Some(law)) if self.tail.is_none() => Ok(ModeSequence::from_law(n, law)),
            _ => Err(CliError::Config(format!(
                "{what}: give either `values` (optionally with `tail`) or `law`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    CanonicalStable {
        alpha: f64,
    },
    DiagonalSeries {
        coords: Vec<OneDimLevySpec>,
        #[serde(default)]
        tail: Option<CoordTail>,
    },
    /// The same coordinate law on every mode.
    IidSeries {
        coord: OneDimLevySpec,
    },
    /// Stable coordinates with scales `sigma_k = coeff k^exponent`.
    StableSeries {
        alpha: f64,
        sigma: PowerTail,
    },
    DiagonalGaussian {
        q: SequenceConfig,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_paths: usize,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub record_times: Option<Vec<f64>>,
    #[serde(default)]
    pub y0: Y0Config,
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub max_work: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Y0Config {
    #[default]
    Zero,
    Point(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(untagged)]
pub enum ProbesConfig {
    #[default]
    #[serde(skip)]
    Default,
    Named(String),
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub criteria: f64,
    pub cf: f64,
    pub residual: f64,
    pub max_terms: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            criteria: 1e-8,
            cf: 1e-6,
            residual: 3e-6,
            max_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub t_grid: Vec<f64>,
    pub s: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            t_grid: vec![0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0],
            s: 1.0,
        }
    }
}

/// A parsed configuration together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text)?;
    Ok(Loaded {
        config,
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "line {} column {}: at `{path}`: {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

fn core_err(what: &str) -> impl Fn(cylou_core::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

impl RunConfig {
    pub fn model(&self) -> Result<SpectralModel, CliError> {
        let m = &self.model;
        let err = core_err("model");
        let mut model = match (&m.eigenvalues, &m.weyl, &m.power_log) {
            (Some(l), None, None) => {
                let model = SpectralModel::new(l.clone()).map_err(&err)?;
                match m.growth_law {
                    Some(law) => model.with_growth_law(law).map_err(&err)?,
                    None => model,
                }
            }
            (None, Some(w), None) if m.growth_law.is_none() => {
                SpectralModel::from_growth_law(GrowthLaw::Weyl { d: w.d, c: w.c }, w.n_modes).map_err(&err)?
            }
            (None, None, Some(p)) if m.growth_law.is_none() => SpectralModel::from_growth_law(
                GrowthLaw::PowerLog {
                    c: p.c,
                    power: p.power,
                    log_power: p.log_power,
                },
                p.n_modes,
            )
            .map_err(&err)?,
            _ => {
                return Err(CliError::Config(
                    "model: give exactly one of `eigenvalues` (optionally with `growth_law`), `weyl`, `power_log`".into(),
                ))
            }
        };
        let n = model.n_modes();
        if let Some(q) = &m.q_diag {
            model = model.with_q_diag(q.build(n, "model.q_diag")?).map_err(&err)?;
        }
        if let Some(a) = &m.a_diag {
            model = model.with_a_diag(a.build(n, "model.a_diag")?).map_err(&err)?;
        }
        Ok(model)
    }

    pub fn noise(&self, n_modes: usize) -> Result<NoiseSpec, CliError> {
        let err = core_err("noise");
        let noise = match &self.noise {
            NoiseConfig::CanonicalStable { alpha } => NoiseSpec::canonical_stable(*alpha),
            NoiseConfig::DiagonalSeries { coords, tail } => {
                NoiseSpec::diagonal_series(coords.clone(), tail.clone())
            }
            NoiseConfig::IidSeries { coord } => NoiseSpec::iid_series(coord.clone(), n_modes),
            NoiseConfig::StableSeries { alpha, sigma } => {
                NoiseSpec::stable_scaled_series(*alpha, *sigma, n_modes)
            }
            NoiseConfig::DiagonalGaussian { q } => {
                NoiseSpec::diagonal_gaussian(q.build(n_modes, "noise.q")?)
            }
        }
        .map_err(&err)?;
        if let Some(k) = noise.stored_modes() {
            if k != n_modes {
                return Err(CliError::Config(format!(
                    "noise describes {k} coordinates but the model has {n_modes} modes"
                )));
            }
        }
        Ok(noise)
    }

    pub fn criteria_options(&self) -> CriteriaOptions {
        CriteriaOptions {
            tol: self.tolerances.criteria,
            max_terms: self.tolerances.max_terms,
        }
    }

    pub fn probes(&self, n_modes: usize) -> Result<Vec<CoeffVector>, CliError> {
        match &self.probes {
            ProbesConfig::Default => Ok(default_probes(n_modes, self.seed)),
            ProbesConfig::Named(name) if name == "default" => Ok(default_probes(n_modes, self.seed)),
            ProbesConfig::Named(name) => Err(CliError::Config(format!(
                "probes: expected \"default\" or a list of vectors, got \"{name}\""
            ))),
            ProbesConfig::Explicit(list) => list
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if v.len() != n_modes {
                        return Err(CliError::Config(format!(
                            "probes[{i}]: {} entries for {n_modes} modes",
                            v.len()
                        )));
                    }
                    CoeffVector::new(v.clone()).map_err(core_err("probes"))
                })
                .collect(),
        }
    }

    pub fn sim_config(&self, n_modes: usize) -> Result<SimConfig, CliError> {
        let s = self
            .sim
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `sim` section".into()))?;
        let y0 = match &s.y0 {
            Y0Config::Zero => InitialState::Zero,
            Y0Config::Point(v) => {
                if v.len() != n_modes {
                    return Err(CliError::Config(format!(
                        "sim.y0.point: {} entries for {n_modes} modes",
                        v.len()
                    )));
                }
                InitialState::Point(CoeffVector::new(v.clone()).map_err(core_err("sim.y0"))?)
            }
        };
        let mut budget = SimBudget::default();
        if let Some(w) = s.max_work {
            budget.max_work = w;
        }
        let config = SimConfig {
            n_paths: s.n_paths,
            t_final: s.t_final,
            dt: s.dt,
            record_times: s.record_times.clone().unwrap_or_else(|| vec![s.t_final]),
            rng: RngState::new(self.seed, s.stream),
            y0,
            budget,
        };
        config.validate().map_err(core_err("sim"))?;
        Ok(config)
    }
}
