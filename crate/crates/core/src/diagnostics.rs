//! Characteristic functions of `nu_t`, the law of `int_0^t T(s) dL(s)`, and
//! the identities that tie simulation to them.
//!
//! `phi_{nu_t}(v) = exp(int_0^t Psi(T(s) v) ds)`, with the model's extra
//! Gaussian covariance and drift added in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::{full_report, CriteriaOptions, Overall};
use crate::error::{invalid, Error, Result};
use crate::levy::{NoiseSpec, OneDimLevySpec};
use crate::quadrature::{integrate_decaying, integrate_interval};
use crate::rng::RngState;
use crate::simulate::Ensemble;
use crate::spectral::{CoeffVector, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CfSource {
    Quadrature,
    Empirical(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfProbe {
    pub v: CoeffVector,
    pub t: Horizon,
    pub value: Complex64,
    pub err_bound: f64,
    pub source: CfSource,
}

/// A residual together with the error budget it must stay within.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub budget: f64,
}

impl Residual {
    pub fn within(&self, tol: f64) -> bool {
        self.value <= tol.max(self.budget)
    }
}

/// Quadrature oracle for `phi_{nu_t}` on a fixed model and noise.
#[derive(Debug, Clone)]
pub struct CfOracle<'a> {
    model: &'a SpectralModel,
    noise: &'a NoiseSpec,
    tol: f64,
    overall: Overall,
}

impl<'a> CfOracle<'a> {
    /// Runs the criteria with default options to learn whether `t = inf`
    /// probes are meaningful.
    pub fn new(model: &'a SpectralModel, noise: &'a NoiseSpec, tol: f64) -> Result<Self> {
        let overall = full_report(model, noise, &CriteriaOptions::default())?.overall;
        Self::with_overall(model, noise, tol, overall)
    }

    pub fn with_overall(
        model: &'a SpectralModel,
        noise: &'a NoiseSpec,
        tol: f64,
        overall: Overall,
    ) -> Result<Self> {
        noise.validate()?;
        if let Some(n) = noise.stored_modes() {
            if n != model.n_modes() {
                return Err(Error::DimensionMismatch {
                    expected: model.n_modes(),
                    got: n,
                });
            }
        }
        if !(tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            model,
            noise,
            tol,
            overall,
        })
    }

    pub fn overall(&self) -> Overall {
        self.overall
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `|f(s)| <= B exp(-r s)` for `f(s) = Psi(T(s) v)`.
    fn envelope(&self, v: &[f64]) -> (f64, f64) {
        let lambdas = self.model.lambdas();
        let mut bound = 0.0;
        let mut rate = f64::INFINITY;
        let mut add = |b: f64, r: f64| {
            if b > 0.0 {
                bound += b;
                rate = rate.min(r);
            }
        };
        match self.noise {
            NoiseSpec::CanonicalStable { alpha } => {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                add(norm.powf(*alpha), alpha * lambdas[0]);
            }
            NoiseSpec::DiagonalSeries { coords, .. } => {
                for ((c, x), l) in coords.iter().zip(v).zip(lambdas) {
                    match c {
                        OneDimLevySpec::SymmetricAlphaStable { alpha, sigma } => {
                            add((sigma * x.abs()).powf(*alpha), alpha * l)
                        }
                        OneDimLevySpec::CompoundPoissonSymmetric { .. } => {
                            add(c.quadratic_envelope().unwrap_or(0.0) * x * x, 2.0 * l)
                        }
                    }
                }
            }
            NoiseSpec::DiagonalGaussian { q } => {
                for ((q, x), l) in q.values.iter().zip(v).zip(lambdas) {
                    add(0.5 * q * x * x, 2.0 * l);
                }
            }
        }
        (bound, if rate.is_finite() { rate } else { lambdas[0] })
    }

    /// `int_0^t Psi(T(s) v) ds` plus closed-form model terms, with the
    /// quadrature error bound on the real part.
    fn exponent(&self, v: &[f64], t: Horizon) -> Result<(Complex64, f64)> {
        let lambdas = self.model.lambdas();
        let f = |s: f64| -> f64 {
            let u: Vec<f64> = v.iter().zip(lambdas).map(|(x, l)| (-l * s).exp() * x).collect();
            self.noise
                .symbol(&CoeffVector::new(u).expect("finite input"))
                .expect("dimensions checked")
        };
        let quad = match t {
            Horizon::Finite(0.0) => None,
            Horizon::Finite(t) => Some(integrate_interval(f, 0.0, t, self.tol)?),
            Horizon::Infinite => {
                let (bound, rate) = self.envelope(v);
                Some(integrate_decaying(f, rate, bound, self.tol)?)
            }
        };
        // int_0^t e^{-c s} ds
        let kernel = |c: f64| match t {
            Horizon::Finite(t) => -(-c * t).exp_m1() / c,
            Horizon::Infinite => 1.0 / c,
        };
        let mut re = quad.map_or(0.0, |q| q.value);
        if let Some(q) = self.model.q_diag() {
            re -= 0.5
                * q.values
                    .iter()
                    .zip(v)
                    .zip(lambdas)
                    .map(|((q, x), l)| q * x * x * kernel(2.0 * l))
                    .sum::<f64>();
        }
        let im = self.model.a_diag().map_or(0.0, |a| {
            a.values
                .iter()
                .zip(v)
                .zip(lambdas)
                .map(|((a, x), l)| a * x * kernel(*l))
                .sum()
        });
        Ok((Complex64::new(re, im), quad.map_or(0.0, |q| q.err_bound)))
    }

    fn check_probe(&self, v: &CoeffVector) -> Result<()> {
        if v.len() != self.model.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.model.n_modes(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `phi_{nu_t}(v)`; `t = inf` is refused when no stationary measure exists.
    pub fn analytic_cf(&self, v: &CoeffVector, t: Horizon) -> Result<CfProbe> {
        self.check_probe(v)?;
        match t {
            Horizon::Finite(t) if !(t >= 0.0 && t.is_finite()) => {
                return Err(invalid(format!("time must be nonnegative, got {t}")));
            }
            Horizon::Infinite if self.overall == Overall::NoStationary => {
                return Err(Error::Divergence(
                    "nu_t does not converge: the stationarity conditions fail".into(),
                ));
            }
            _ => {}
        }
        if v.is_zero() {
            return Ok(CfProbe {
                v: v.clone(),
                t,
                value: Complex64::new(1.0, 0.0),
                err_bound: 0.0,
                source: CfSource::Quadrature,
            });
        }
        let (e, delta) = self.exponent(v.as_slice(), t)?;
        Ok(CfProbe {
            v: v.clone(),
            t,
            value: e.exp(),
            err_bound: e.re.exp() * delta.exp_m1(),
            source: CfSource::Quadrature,
        })
    }

    /// CF of `T(t) y0 + nu_t`, the law of the state started at `y0`.
    pub fn state_cf(&self, y0: &CoeffVector, v: &CoeffVector, t: f64) -> Result<CfProbe> {
        let mut probe = self.analytic_cf(v, Horizon::Finite(t))?;
        let shift = self.model.semigroup_apply(y0, t)?.dot(v.as_slice());
        probe.value *= Complex64::new(0.0, shift).exp();
        Ok(probe)
    }

    /// `|phi_{t+s}(v) - phi_s(T(t) v) phi_t(v)|`.
    pub fn skew_convolution_residual(&self, v: &CoeffVector, s: f64, t: f64) -> Result<Residual> {
        if !(s >= 0.0 && t >= 0.0) {
            return Err(invalid("times must be nonnegative"));
        }
        let whole = self.analytic_cf(v, Horizon::Finite(t + s))?;
        let shifted = if t == 0.0 {
            v.clone()
        } else {
            self.model.semigroup_apply(v, t)?
        };
        let head = self.analytic_cf(&shifted, Horizon::Finite(s))?;
        let tail = self.analytic_cf(v, Horizon::Finite(t))?;
        Ok(product_residual(&whole, &head, &tail))
    }

    /// `|phi_inf(v) - phi_inf(T(t) v) phi_t(v)|`.
    pub fn stationarity_residual(&self, v: &CoeffVector, t: f64) -> Result<Residual> {
        self.require_stationary()?;
        if !(t >= 0.0) {
            return Err(invalid("time must be nonnegative"));
        }
        let limit = self.analytic_cf(v, Horizon::Infinite)?;
        let shifted = if t == 0.0 {
            v.clone()
        } else {
            self.model.semigroup_apply(v, t)?
        };
        let head = self.analytic_cf(&shifted, Horizon::Infinite)?;
        let tail = self.analytic_cf(v, Horizon::Finite(t))?;
        Ok(product_residual(&limit, &head, &tail))
    }

    /// `(t, |phi_t(v) - phi_inf(v)|)` on `t_grid`.
    pub fn convergence_curve(&self, v: &CoeffVector, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.require_stationary()?;
        let limit = self.analytic_cf(v, Horizon::Infinite)?;
        t_grid
            .iter()
            .map(|&t| {
                let at = self.analytic_cf(v, Horizon::Finite(t))?;
                Ok((t, (at.value - limit.value).norm()))
            })
            .collect()
    }

    fn require_stationary(&self) -> Result<()> {
        if self.overall != Overall::StationaryExists {
            return Err(Error::NotStationary(format!(
                "criteria verdict is {:?}",
                self.overall
            )));
        }
        Ok(())
    }
}

fn product_residual(whole: &CfProbe, a: &CfProbe, b: &CfProbe) -> Residual {
    Residual {
        value: (whole.value - a.value * b.value).norm(),
        budget: whole.err_bound + a.err_bound + b.err_bound + a.err_bound * b.err_bound,
    }
}

/// One-shot [`CfOracle::analytic_cf`].
pub fn analytic_cf(
    model: &SpectralModel,
    noise: &NoiseSpec,
    v: &CoeffVector,
    t: Horizon,
    tol: f64,
) -> Result<CfProbe> {
    CfOracle::new(model, noise, tol)?.analytic_cf(v, t)
}

/// `(1/M) sum_j exp(i <Y_j, v>)` at record `record`, with error `4/sqrt(M)`.
pub fn empirical_cf(ensemble: &Ensemble, record: usize, v: &CoeffVector) -> Result<CfProbe> {
    if record >= ensemble.record_times.len() {
        return Err(invalid(format!("no record {record}")));
    }
    if v.len() != ensemble.n_modes {
        return Err(Error::DimensionMismatch {
            expected: ensemble.n_modes,
            got: v.len(),
        });
    }
    let (mut re, mut im) = (0.0, 0.0);
    for y in ensemble.samples(record).chunks_exact(ensemble.n_modes) {
        let x = v.dot(y);
        re += x.cos();
        im += x.sin();
    }
    let m = ensemble.n_paths as f64;
    Ok(CfProbe {
        v: v.clone(),
        t: Horizon::Finite(ensemble.record_times[record]),
        value: Complex64::new(re / m, im / m),
        err_bound: 4.0 / m.sqrt(),
        source: CfSource::Empirical(ensemble.n_paths),
    })
}

/// The first five basis vectors followed by five seeded random directions,
/// each at norms 0.5, 1 and 2.
pub fn default_probes(n_modes: usize, seed: u64) -> Vec<CoeffVector> {
    let mut probes: Vec<CoeffVector> = (0..n_modes.min(5))
        .map(|k| CoeffVector::basis(n_modes, k + 1, 1.0))
        .collect();
    let mut rng = RngState::new(seed, 0x7072_6f62);
    for _ in 0..5 {
        let dir: Vec<f64> = (0..n_modes)
            .map(|_| crate::levy::standard_normal(&mut rng))
            .collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        for scale in [0.5, 1.0, 2.0] {
            let v = dir.iter().map(|x| x * scale / norm).collect();
            probes.push(CoeffVector::new(v).expect("finite probe"));
        }
    }
    probes
}
