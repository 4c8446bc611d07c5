//! Diagonal semigroups `T(t) e_k = exp(-lambda_k t) e_k`.
//!
//! Eigenvalues are numbered from 1 in formulas and stored from 0: the
//! eigenvalue written `lambda_k` lives at `lambdas[k - 1]`. Every public
//! method taking a mode index `k` uses the 1-based convention.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Closed-form eigenvalue law, valid for every `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthLaw {
    /// Dirichlet Laplacian on a `d`-dimensional domain: `lambda_k = c k^(2/d)`.
    Weyl { d: u32, c: f64 },
    /// `lambda_k = c k^power (1 + ln k)^log_power` with `power > 0`, `log_power >= 0`.
    PowerLog { c: f64, power: f64, log_power: f64 },
}

impl GrowthLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GrowthLaw::Weyl { d, c } => {
                if d == 0 {
                    return Err(invalid("Weyl dimension must be >= 1"));
                }
                if !(c > 0.0 && c.is_finite()) {
                    return Err(invalid("Weyl constant must be positive"));
                }
            }
            GrowthLaw::PowerLog { c, power, log_power } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(invalid("growth constant must be positive"));
                }
                if !(power > 0.0 && power.is_finite()) {
                    return Err(invalid("growth power must be positive"));
                }
                if !(log_power >= 0.0 && log_power.is_finite()) {
                    return Err(invalid("growth log power must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// `lambda_k` for a 1-based index.
    pub fn eigenvalue(&self, k: u64) -> f64 {
        let kf = k as f64;
        match *self {
            GrowthLaw::Weyl { d, c } => c * kf.powf(2.0 / d as f64),
            GrowthLaw::PowerLog { c, power, log_power } => {
                c * kf.powf(power) * (1.0 + kf.ln()).powf(log_power)
            }
        }
    }

    /// `(c, p, q)` such that `lambda_k = c k^p (1 + ln k)^q`.
    pub fn power_log_form(&self) -> (f64, f64, f64) {
        match *self {
            GrowthLaw::Weyl { d, c } => (c, 2.0 / d as f64, 0.0),
            GrowthLaw::PowerLog { c, power, log_power } => (c, power, log_power),
        }
    }
}

/// `x_k = coeff * k^exponent` for every mode beyond the stored ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTail {
    pub fn constant(value: f64) -> Self {
        Self {
            coeff: value,
            exponent: 0.0,
        }
    }

    pub fn at(&self, k: u64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else {
            self.coeff * (k as f64).powf(self.exponent)
        }
    }
}

/// Per-mode coefficients: the stored values plus an optional law for the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSequence {
    pub values: Vec<f64>,
    #[serde(default)]
    pub tail: Option<PowerTail>,
}

impl ModeSequence {
    pub fn new(values: Vec<f64>, tail: Option<PowerTail>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(invalid("mode sequence entries must be finite"));
        }
        if let Some(t) = tail {
            if !(t.coeff.is_finite() && t.exponent.is_finite()) {
                return Err(invalid("tail law parameters must be finite"));
            }
        }
        Ok(Self { values, tail })
    }

    /// Sequence given entirely by a power law, `x_k = coeff k^exponent` for all k.
    pub fn from_law(n: usize, tail: PowerTail) -> Self {
        Self {
            values: (1..=n as u64).map(|k| tail.at(k)).collect(),
            tail: Some(tail),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_law(n, PowerTail::constant(0.0))
    }

    /// 1-based access; `None` beyond the stored values when no tail is known.
    pub fn get(&self, k: u64) -> Option<f64> {
        let idx = (k - 1) as usize;
        if idx < self.values.len() {
            Some(self.values[idx])
        } else {
            self.tail.map(|t| t.at(k))
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Coordinates `<v, e_k>` of a vector in the truncated basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffVector(Vec<f64>);

impl CoeffVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(invalid("coefficient vector entries must be finite"));
        }
        Ok(Self(coeffs))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Basis vector `scale * e_k`, 1-based `k`.
    pub fn basis(n: usize, k: usize, scale: f64) -> Self {
        let mut c = vec![0.0; n];
        c[k - 1] = scale;
        Self(c)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

impl From<CoeffVector> for Vec<f64> {
    fn from(v: CoeffVector) -> Self {
        v.0
    }
}

/// Truncated spectral description of `-A`, plus the diagonal Gaussian
/// covariance and drift of the noise characteristics when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    lambdas: Vec<f64>,
    growth_law: Option<GrowthLaw>,
    q_diag: Option<ModeSequence>,
    a_diag: Option<ModeSequence>,
}

impl SpectralModel {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(invalid("at least one eigenvalue is required"));
        }
        if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(invalid("eigenvalues must be finite and strictly positive"));
        }
        if lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("eigenvalues must be nondecreasing"));
        }
        Ok(Self {
            lambdas,
            growth_law: None,
            q_diag: None,
            a_diag: None,
        })
    }

    /// First `n` eigenvalues of a growth law, with the law recorded.
    pub fn from_growth_law(law: GrowthLaw, n: usize) -> Result<Self> {
        law.validate()?;
        if n == 0 {
            return Err(invalid("number of modes must be >= 1"));
        }
        let lambdas = (1..=n as u64).map(|k| law.eigenvalue(k)).collect();
        let mut model = Self::new(lambdas)?;
        model.growth_law = Some(law);
        Ok(model)
    }

    /// Attach a growth law to explicit eigenvalues; every stored value must
    /// match the law (exactly for Weyl, to 1e-12 relative otherwise).
    pub fn with_growth_law(mut self, law: GrowthLaw) -> Result<Self> {
        law.validate()?;
        for (i, &l) in self.lambdas.iter().enumerate() {
            let expect = law.eigenvalue(i as u64 + 1);
            let ok = match law {
                GrowthLaw::Weyl { .. } => l == expect,
                GrowthLaw::PowerLog { .. } => (l - expect).abs() <= 1e-12 * expect,
            };
            if !ok {
                return Err(invalid(format!(
                    "eigenvalue {} = {} does not follow the growth law (expected {})",
                    i + 1,
                    l,
                    expect
                )));
            }
        }
        self.growth_law = Some(law);
        Ok(self)
    }

    pub fn with_q_diag(mut self, q: ModeSequence) -> Result<Self> {
        self.check_len(q.len())?;
        if q.values.iter().any(|&x| x < 0.0) || q.tail.is_some_and(|t| t.coeff < 0.0) {
            return Err(invalid("Gaussian covariance entries must be nonnegative"));
        }
        self.q_diag = Some(q);
        Ok(self)
    }

    pub fn with_a_diag(mut self, a: ModeSequence) -> Result<Self> {
        self.check_len(a.len())?;
        self.a_diag = Some(a);
        Ok(self)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                got,
            });
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda_1(&self) -> f64 {
        self.lambdas[0]
    }

    pub fn growth_law(&self) -> Option<GrowthLaw> {
        self.growth_law
    }

    pub fn q_diag(&self) -> Option<&ModeSequence> {
        self.q_diag.as_ref()
    }

    pub fn a_diag(&self) -> Option<&ModeSequence> {
        self.a_diag.as_ref()
    }

    /// `lambda_k` (1-based), extended beyond the truncation by the growth law.
    pub fn eigenvalue(&self, k: u64) -> Option<f64> {
        let idx = (k - 1) as usize;
        if idx < self.lambdas.len() {
            Some(self.lambdas[idx])
        } else {
            self.growth_law.map(|g| g.eigenvalue(k))
        }
    }

    /// `T(t) v`: coordinate k is damped by `exp(-lambda_k t)`.
    pub fn semigroup_apply(&self, v: &CoeffVector, t: f64) -> Result<CoeffVector> {
        if !(t >= 0.0) {
            return Err(invalid(format!("semigroup time must be >= 0, got {t}")));
        }
        if v.len() > self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                got: v.len(),
            });
        }
        Ok(CoeffVector(
            v.0.iter()
                .zip(&self.lambdas)
                .map(|(x, l)| (-l * t).exp() * x)
                .collect(),
        ))
    }

    /// `||T(s)||_HS^2 = sum_k exp(-2 lambda_k s)` over the stored modes.
    pub fn hs_norm_sq(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(invalid(format!(
                "Hilbert-Schmidt norm requires s > 0, got {s}"
            )));
        }
        Ok(self.lambdas.iter().map(|l| (-2.0 * l * s).exp()).sum())
    }
}

pub fn weyl_eigenvalues(d: u32, c: f64, n: usize) -> Result<SpectralModel> {
    SpectralModel::from_growth_law(GrowthLaw::Weyl { d, c }, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(x: &[f64]) -> CoeffVector {
        CoeffVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn semigroup_identity_at_zero() {
        let m = SpectralModel::new(vec![1.0, 2.0, 5.0]).unwrap();
        let v = cv(&[0.3, -1.0, 2.5]);
        assert_eq!(m.semigroup_apply(&v, 0.0).unwrap(), v);
    }

    #[test]
    fn semigroup_halving() {
        let m = SpectralModel::new(vec![1.0, 2.0]).unwrap();
        let out = m.semigroup_apply(&cv(&[1.0, 1.0]), 2f64.ln()).unwrap();
        assert!((out.as_slice()[0] - 0.5).abs() < 1e-15);
        assert!((out.as_slice()[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn semigroup_zero_vector() {
        let m = SpectralModel::new(vec![3.0, 4.0]).unwrap();
        assert!(m.semigroup_apply(&CoeffVector::zeros(2), 1.7).unwrap().is_zero());
    }

    #[test]
    fn semigroup_rejects_negative_time_and_long_vectors() {
        let m = SpectralModel::new(vec![1.0]).unwrap();
        assert!(matches!(
            m.semigroup_apply(&cv(&[1.0]), -0.1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            m.semigroup_apply(&cv(&[1.0, 2.0]), 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn weyl_values() {
        let m = weyl_eigenvalues(2, 1.0, 3).unwrap();
        assert_eq!(m.lambdas(), &[1.0, 2.0, 3.0]);
        assert_eq!(weyl_eigenvalues(1, 1.0, 3).unwrap().lambdas()[2], 9.0);
        assert_eq!(weyl_eigenvalues(4, 2.0, 1).unwrap().lambdas()[0], 2.0);
        assert!(weyl_eigenvalues(0, 1.0, 3).is_err());
        assert!(weyl_eigenvalues(1, 0.0, 3).is_err());
        assert!(weyl_eigenvalues(1, 1.0, 0).is_err());
    }

    #[test]
    fn growth_law_must_match_explicit_values() {
        let m = SpectralModel::new(vec![1.0, 4.0, 9.0]).unwrap();
        assert!(m.clone().with_growth_law(GrowthLaw::Weyl { d: 1, c: 1.0 }).is_ok());
        assert!(m.with_growth_law(GrowthLaw::Weyl { d: 2, c: 1.0 }).is_err());
    }

    #[test]
    fn model_invariants() {
        assert!(SpectralModel::new(vec![]).is_err());
        assert!(SpectralModel::new(vec![0.0, 1.0]).is_err());
        assert!(SpectralModel::new(vec![2.0, 1.0]).is_err());
        let m = SpectralModel::new(vec![1.0, 2.0]).unwrap();
        assert!(m.clone().with_q_diag(ModeSequence::zeros(3)).is_err());
        assert!(m
            .with_q_diag(ModeSequence::new(vec![1.0, -1.0], None).unwrap())
            .is_err());
    }

    #[test]
    fn eigenvalue_extends_with_law() {
        let m = weyl_eigenvalues(1, 1.0, 3).unwrap();
        assert_eq!(m.eigenvalue(10), Some(100.0));
        let bare = SpectralModel::new(vec![1.0]).unwrap();
        assert_eq!(bare.eigenvalue(2), None);
    }

    #[test]
    fn hs_norm_values() {
        let m = SpectralModel::new(vec![1.0]).unwrap();
        assert!((m.hs_norm_sq(2f64.ln()).unwrap() - 0.25).abs() < 1e-15);
        let m2 = SpectralModel::new(vec![1.0, 1.0]).unwrap();
        assert!((m2.hs_norm_sq(1.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(m2.hs_norm_sq(0.0).is_err());
        let w = weyl_eigenvalues(1, 1.0, 20).unwrap();
        let s = 30.0;
        assert!(w.hs_norm_sq(s).unwrap() <= 20.0 * (-2.0 * s).exp());
    }

    proptest! {
        #[test]
        fn semigroup_law(
            coeffs in prop::collection::vec(-10.0f64..10.0, 1..8),
            s in 0.0f64..10.0,
            t in 0.0f64..10.0,
        ) {
            let n = coeffs.len();
            let m = SpectralModel::new((1..=n).map(|k| 0.3 * k as f64).collect()).unwrap();
            let v = cv(&coeffs);
            let two = m.semigroup_apply(&m.semigroup_apply(&v, s).unwrap(), t).unwrap();
            let one = m.semigroup_apply(&v, s + t).unwrap();
            for (a, b) in two.as_slice().iter().zip(one.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }

        #[test]
        fn contraction(
            coeffs in prop::collection::vec(-10.0f64..10.0, 1..8),
            t in 0.0f64..10.0,
        ) {
            let n = coeffs.len();
            let m = SpectralModel::new((1..=n).map(|k| (k * k) as f64 * 0.5).collect()).unwrap();
            let v = cv(&coeffs);
            let out = m.semigroup_apply(&v, t).unwrap();
            prop_assert!(out.norm() <= (-m.lambda_1() * t).exp() * v.norm() + 1e-12);
        }

        #[test]
        fn weyl_strictly_increasing(d in 1u32..6, c in 0.01f64..10.0, n in 2usize..200) {
            let m = weyl_eigenvalues(d, c, n).unwrap();
            prop_assert!(m.lambdas().windows(2).all(|w| w[1] > w[0]));
        }

        #[test]
        fn hs_norm_nonincreasing(s in 0.01f64..5.0, ds in 0.0f64..5.0) {
            let m = weyl_eigenvalues(2, 1.0, 30).unwrap();
            prop_assert!(m.hs_norm_sq(s + ds).unwrap() <= m.hs_norm_sq(s).unwrap());
        }
    }
}
