//! Stationarity of Ornstein-Uhlenbeck processes driven by cylindrical Lévy
//! noise on a Hilbert space with a diagonal (spectral) generator.
//!
//! * [`spectral`]: the truncated semigroup `T(t)` and its Hilbert-Schmidt norm.
//! * [`levy`]: noise families, symbols, Lévy-measure integrals and samplers.
//! * [`quadrature`]: certified `[0, inf)` integrals and series decisions.
//! * [`criteria`]: the stationarity conditions and their aggregate verdict.
//! * [`simulate`]: Monte-Carlo ensembles of the mild solution.
//! * [`diagnostics`]: characteristic-function oracles and identity residuals.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod diagnostics;
pub mod error;
pub mod levy;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod spectral;

pub use criteria::{CriteriaOptions, CriteriaReport, CriterionResult, ConditionId, Overall, Role};
pub use diagnostics::{CfOracle, CfProbe, Horizon};
pub use error::{Error, Result};
pub use levy::{CoordTail, NoiseSpec, OneDimLevySpec};
pub use quadrature::{QuadResult, SeriesDecision, Verdict};
pub use rng::RngState;
pub use simulate::{Ensemble, InitialState, Scheme, SimConfig};
pub use spectral::{CoeffVector, GrowthLaw, ModeSequence, PowerTail, SpectralModel};
