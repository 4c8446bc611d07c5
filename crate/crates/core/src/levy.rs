//! Driving noise: symmetric one-dimensional Lévy coordinates, the three
//! cylindrical families built from them, their symbols, Lévy-measure
//! integrals and exact variate generation.
//!
//! The Lévy measure of a stable coordinate with scale `sigma` is
//! `rho(d beta) = (1/2) |beta / sigma|^(-1-alpha) d beta / sigma`, the image of
//! `(1/2)|beta|^(-1-alpha) d beta` under `beta -> sigma beta`. Symbols use the
//! normalised form `-sigma^alpha |theta|^alpha`; the two differ by a constant
//! depending on `alpha` only, which never changes a finiteness verdict.

use std::f64::consts::PI;

use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::RngState;
use crate::spectral::{CoeffVector, ModeSequence, PowerTail};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub magnitude: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OneDimLevySpec {
    SymmetricAlphaStable {
        alpha: f64,
        sigma: f64,
    },
    /// Jumps `+b_i` and `-b_i` each with probability `p_i / 2`, at total `rate`.
    CompoundPoissonSymmetric {
        rate: f64,
        jumps: Vec<Jump>,
    },
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(invalid(format!("stability index must lie in (0, 2), got {alpha}")))
    }
}

impl OneDimLevySpec {
    pub fn stable(alpha: f64, sigma: f64) -> Result<Self> {
        let s = Self::SymmetricAlphaStable { alpha, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn compound_poisson(rate: f64, jumps: Vec<(f64, f64)>) -> Result<Self> {
        let s = Self::CompoundPoissonSymmetric {
            rate,
            jumps: jumps
                .into_iter()
                .map(|(magnitude, prob)| Jump { magnitude, prob })
                .collect(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SymmetricAlphaStable { alpha, sigma } => {
                check_alpha(*alpha)?;
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(invalid(format!("stable scale must be positive, got {sigma}")));
                }
            }
            Self::CompoundPoissonSymmetric { rate, jumps } => {
                if !(*rate >= 0.0 && rate.is_finite()) {
                    return Err(invalid(format!("jump rate must be nonnegative, got {rate}")));
                }
                if jumps.is_empty() {
                    return Err(invalid("compound Poisson law needs at least one jump size"));
                }
                if jumps
                    .iter()
                    .any(|j| !(j.magnitude > 0.0 && j.magnitude.is_finite()) || !(j.prob >= 0.0))
                {
                    return Err(invalid("jump magnitudes must be positive and probabilities nonnegative"));
                }
                let total: f64 = jumps.iter().map(|j| j.prob).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("jump probabilities sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    /// Characteristic exponent `psi(theta)`; real because the law is symmetric.
    pub fn symbol(&self, theta: f64) -> f64 {
        match self {
            Self::SymmetricAlphaStable { alpha, sigma } => {
                if theta == 0.0 {
                    0.0
                } else {
                    -(sigma * theta.abs()).powf(*alpha)
                }
            }
            Self::CompoundPoissonSymmetric { rate, jumps } => {
                rate * jumps
                    .iter()
                    .map(|j| j.prob * ((theta * j.magnitude).cos() - 1.0))
                    .sum::<f64>()
            }
        }
    }

    /// `int (beta^2 ∧ 1) mu(d beta)`.
    pub fn levy_integral_sq_trunc(&self) -> f64 {
        match self {
            Self::SymmetricAlphaStable { alpha, sigma } => {
                sigma.powf(*alpha) * (1.0 / (2.0 - alpha) + 1.0 / alpha)
            }
            Self::CompoundPoissonSymmetric { rate, jumps } => {
                rate * jumps
                    .iter()
                    .map(|j| j.prob * (j.magnitude * j.magnitude).min(1.0))
                    .sum::<f64>()
            }
        }
    }

    /// `int log+ |beta| mu(d beta)`.
    pub fn levy_integral_logplus(&self) -> f64 {
        match self {
            Self::SymmetricAlphaStable { alpha, sigma } => sigma.powf(*alpha) / (alpha * alpha),
            Self::CompoundPoissonSymmetric { rate, jumps } => {
                rate * jumps
                    .iter()
                    .map(|j| j.prob * j.magnitude.ln().max(0.0))
                    .sum::<f64>()
            }
        }
    }

    /// Envelope `|psi(theta)| <= c * theta^2` used for quadrature truncation,
    /// or `None` when the symbol is not quadratic at the origin.
    pub(crate) fn quadratic_envelope(&self) -> Option<f64> {
        match self {
            Self::SymmetricAlphaStable { .. } => None,
            Self::CompoundPoissonSymmetric { rate, jumps } => Some(
                0.5 * rate
                    * jumps
                        .iter()
                        .map(|j| j.prob * j.magnitude * j.magnitude)
                        .sum::<f64>(),
            ),
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Self::SymmetricAlphaStable { .. })
    }
}

/// Law of the coordinates beyond the stored ones in a diagonal series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordTail {
    /// Every further coordinate has this law.
    Repeat(OneDimLevySpec),
    /// Stable coordinates with scales `sigma_k = coeff k^exponent`.
    StableScale { alpha: f64, sigma: PowerTail },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Rotation-invariant noise with symbol `-||u||^alpha`.
    CanonicalStable { alpha: f64 },
    /// `L(t)u = sum_k <e_k, u> l_k(t)` with independent symmetric coordinates.
    DiagonalSeries {
        coords: Vec<OneDimLevySpec>,
        #[serde(default)]
        tail: Option<CoordTail>,
    },
    /// Cylindrical Brownian motion with covariance `diag(q)`.
    DiagonalGaussian { q: ModeSequence },
}

impl NoiseSpec {
    pub fn canonical_stable(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::CanonicalStable { alpha })
    }

    pub fn diagonal_series(coords: Vec<OneDimLevySpec>, tail: Option<CoordTail>) -> Result<Self> {
        let s = Self::DiagonalSeries { coords, tail };
        s.validate()?;
        Ok(s)
    }

    pub fn diagonal_gaussian(q: ModeSequence) -> Result<Self> {
        let s = Self::DiagonalGaussian { q };
        s.validate()?;
        Ok(s)
    }

    /// `n` identical coordinates, repeated beyond the truncation.
    pub fn iid_series(coord: OneDimLevySpec, n: usize) -> Result<Self> {
        Self::diagonal_series(vec![coord.clone(); n], Some(CoordTail::Repeat(coord)))
    }

    /// Stable coordinates `sigma_k m_k` with `sigma_k = coeff k^exponent`.
    pub fn stable_scaled_series(alpha: f64, sigma: PowerTail, n: usize) -> Result<Self> {
        let coords = (1..=n as u64)
            .map(|k| OneDimLevySpec::stable(alpha, sigma.at(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::diagonal_series(coords, Some(CoordTail::StableScale { alpha, sigma }))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::CanonicalStable { alpha } => check_alpha(*alpha),
            Self::DiagonalSeries { coords, tail } => {
                if coords.is_empty() {
                    return Err(invalid("diagonal series needs at least one coordinate"));
                }
                coords.iter().try_for_each(|c| c.validate())?;
                match tail {
                    Some(CoordTail::Repeat(c)) => c.validate(),
                    Some(CoordTail::StableScale { alpha, sigma }) => {
                        check_alpha(*alpha)?;
                        if !(sigma.coeff > 0.0 && sigma.coeff.is_finite() && sigma.exponent.is_finite()) {
                            return Err(invalid("stable scale law needs a positive coefficient"));
                        }
                        Ok(())
                    }
                    None => Ok(()),
                }
            }
            Self::DiagonalGaussian { q } => {
                if q.values.iter().any(|&x| !(x >= 0.0)) || q.tail.is_some_and(|t| t.coeff < 0.0) {
                    return Err(invalid("Gaussian covariance entries must be nonnegative"));
                }
                Ok(())
            }
        }
    }

    /// Number of modes described explicitly, if the variant is diagonal.
    pub fn stored_modes(&self) -> Option<usize> {
        match self {
            Self::CanonicalStable { .. } => None,
            Self::DiagonalSeries { coords, .. } => Some(coords.len()),
            Self::DiagonalGaussian { q } => Some(q.len()),
        }
    }

    /// Coordinate law `l_k` (1-based) of a diagonal series, extended by its tail.
    pub fn coord(&self, k: u64) -> Option<OneDimLevySpec> {
        match self {
            Self::DiagonalSeries { coords, tail } => {
                let idx = (k - 1) as usize;
                if idx < coords.len() {
                    Some(coords[idx].clone())
                } else {
                    match tail {
                        Some(CoordTail::Repeat(c)) => Some(c.clone()),
                        Some(CoordTail::StableScale { alpha, sigma }) => {
                            Some(OneDimLevySpec::SymmetricAlphaStable {
                                alpha: *alpha,
                                sigma: sigma.at(k),
                            })
                        }
                        None => None,
                    }
                }
            }
            _ => None,
        }
    }

    /// Cylindrical symbol `Psi(u)`.
    pub fn symbol(&self, u: &CoeffVector) -> Result<f64> {
        let u = u.as_slice();
        match self {
            Self::CanonicalStable { alpha } => {
                let norm_sq: f64 = u.iter().map(|x| x * x).sum();
                Ok(if norm_sq == 0.0 { 0.0 } else { -norm_sq.powf(0.5 * alpha) })
            }
            Self::DiagonalSeries { coords, .. } => {
                if u.len() > coords.len() {
                    return Err(Error::DimensionMismatch {
                        expected: coords.len(),
                        got: u.len(),
                    });
                }
                Ok(coords.iter().zip(u).map(|(c, &x)| c.symbol(x)).sum())
            }
            Self::DiagonalGaussian { q } => {
                if u.len() > q.len() {
                    return Err(Error::DimensionMismatch {
                        expected: q.len(),
                        got: u.len(),
                    });
                }
                Ok(-0.5 * q.values.iter().zip(u).map(|(q, x)| q * x * x).sum::<f64>())
            }
        }
    }
}

/// Symmetric alpha-stable variate with characteristic function
/// `exp(-scale^alpha |theta|^alpha)` (Chambers-Mallows-Stuck).
pub fn sample_stable(alpha: f64, scale: f64, rng: &mut RngState) -> Result<f64> {
    check_alpha(alpha)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("stable scale must be positive, got {scale}")));
    }
    Ok(scale * standard_stable(alpha, rng))
}

pub(crate) fn standard_stable(alpha: f64, rng: &mut RngState) -> f64 {
    let u = PI * (rng.open01() - 0.5);
    let w = -rng.open01().ln();
    if alpha == 1.0 {
        return u.tan();
    }
    let a = (alpha * u).sin() / u.cos().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// Positive stable increment with Laplace transform `exp(-dt theta^alpha_half)`
/// (Kanter's representation).
pub fn sample_subordinator(alpha_half: f64, dt: f64, rng: &mut RngState) -> Result<f64> {
    if !(alpha_half > 0.0 && alpha_half < 1.0) {
        return Err(invalid(format!(
            "subordinator index must lie in (0, 1), got {alpha_half}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    Ok(positive_stable(alpha_half, dt, rng))
}

pub(crate) fn positive_stable(a: f64, dt: f64, rng: &mut RngState) -> f64 {
    let v = PI * rng.open01();
    let w = -rng.open01().ln();
    let s = (a * v).sin() / v.sin().powf(1.0 / a)
        * (((1.0 - a) * v).sin() / w).powf((1.0 - a) / a);
    // Underflow is the only way to reach zero; the law itself has no atom there.
    (dt.powf(1.0 / a) * s).max(f64::MIN_POSITIVE)
}

pub(crate) fn standard_normal(rng: &mut RngState) -> f64 {
    StandardNormal.sample(rng)
}

/// Exact increment over `dt` of a symmetric compound Poisson coordinate.
pub fn sample_compound_poisson(spec: &OneDimLevySpec, dt: f64, rng: &mut RngState) -> Result<f64> {
    match spec {
        OneDimLevySpec::CompoundPoissonSymmetric { rate, jumps } => {
            let mean = rate * dt;
            if mean <= 0.0 {
                return Ok(0.0);
            }
            let count = Poisson::new(mean)
                .map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?
                .sample(rng) as u64;
            let mut total = 0.0;
            for _ in 0..count {
                let u = rng.open01();
                let mut acc = 0.0;
                let mut b = jumps[jumps.len() - 1].magnitude;
                for j in jumps {
                    acc += j.prob;
                    if u <= acc {
                        b = j.magnitude;
                        break;
                    }
                }
                total += if rng.open01() < 0.5 { b } else { -b };
            }
            Ok(total)
        }
        _ => Err(invalid("compound Poisson increment requested for a stable coordinate")),
    }
}
