use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Outcome of deciding `sum_k term(k) < inf` for a nonnegative sequence.
///
/// When the verdict is `Holds` the full sum lies in
/// `[partial_sum + tail_lower, partial_sum + tail_bound]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDecision {
    pub verdict: Verdict,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
    pub tail_lower: f64,
    pub terms_used: u64,
    pub detail: String,
}

impl SeriesDecision {
    /// Midpoint of the certified bracket (the partial sum if no tail is known).
    pub fn value(&self) -> f64 {
        match self.tail_bound {
            Some(up) => self.partial_sum + 0.5 * (up + self.tail_lower),
            None => self.partial_sum,
        }
    }

    /// Half-width of the certified bracket.
    pub fn value_err(&self) -> Option<f64> {
        self.tail_bound.map(|up| 0.5 * (up - self.tail_lower))
    }
}

type SeqFn<'a> = Box<dyn Fn(u64) -> f64 + 'a>;

/// Summable closed-form bound on the terms with index `> start`.
pub struct Majorant<'a> {
    /// `m(k) >= term(k)` for `k > start`.
    pub term: SeqFn<'a>,
    /// `tail_upper(n) >= sum_{k>n} m(k)` for `n >= start`.
    pub tail_upper: SeqFn<'a>,
    /// Optional `tail_lower(n) <= sum_{k>n} term(k)` for `n >= start`.
    pub tail_lower: Option<SeqFn<'a>>,
    pub start: u64,
}

/// Closed-form minorant `m(k) <= term(k)` for `k > start` whose series diverges.
pub struct Minorant<'a> {
    pub term: SeqFn<'a>,
    pub start: u64,
    pub witness: String,
}

pub struct Series<'a> {
    pub term: &'a dyn Fn(u64) -> f64,
    /// Number of terms the term function can evaluate; `None` means all.
    pub available: Option<u64>,
    pub majorant: Option<Majorant<'a>>,
    pub minorant: Option<Minorant<'a>>,
}

/// Number of indices past `start` on which the closed-form bounds are
/// spot-checked against the actual terms. Independent of the term budget so
/// that the verdict never depends on it.
const BOUND_CHECK_WINDOW: u64 = 64;
const BOUND_CHECK_RTOL: f64 = 1e-9;

/// Exact power-log law `term(k) = coeff k^(-exponent) (1 + ln k)^(-log_exponent)`
/// for all `k > start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTail {
    pub coeff: f64,
    pub exponent: f64,
    pub log_exponent: f64,
    pub start: u64,
}

impl PowerLawTail {
    pub fn at(&self, k: u64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let kf = k as f64;
        let mut v = self.coeff * kf.powf(-self.exponent);
        if self.log_exponent != 0.0 {
            v *= (1.0 + kf.ln()).powf(-self.log_exponent);
        }
        v
    }

    pub fn summable(&self) -> bool {
        self.coeff == 0.0
            || self.exponent > 1.0
            || (self.exponent == 1.0 && self.log_exponent > 1.0)
    }

    fn upper(&self, n: u64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let (s, q) = (self.exponent, self.log_exponent);
        let nf = n as f64;
        if s > 1.0 {
            self.coeff * (1.0 + nf.ln()).powf(-q) * nf.powf(1.0 - s) / (s - 1.0)
        } else {
            // s == 1, q > 1: int_n^inf dx / (x (1 + ln x)^q)
            self.coeff * (1.0 + nf.ln()).powf(1.0 - q) / (q - 1.0)
        }
    }

    fn lower(&self, n: u64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let (s, q) = (self.exponent, self.log_exponent);
        let m = (n + 1) as f64;
        if s > 1.0 {
            if q == 0.0 {
                self.coeff * m.powf(1.0 - s) / (s - 1.0)
            } else {
                // int_{m}^{m^2} with the log factor frozen at its smallest value.
                self.coeff * (1.0 + 2.0 * m.ln()).powf(-q) * (m.powf(1.0 - s) - m.powf(2.0 * (1.0 - s)))
                    / (s - 1.0)
            }
        } else {
            self.coeff * (1.0 + m.ln()).powf(1.0 - q) / (q - 1.0)
        }
    }

    fn describe(&self) -> String {
        let mut s = format!("{:.6e} k^{}", self.coeff, -self.exponent);
        if self.log_exponent != 0.0 {
            s.push_str(&format!(" (1+ln k)^{}", -self.log_exponent));
        }
        s
    }

    /// Exact majorant with integral-test tail bracket, if summable.
    pub fn majorant(self) -> Option<Majorant<'static>> {
        if !self.summable() {
            return None;
        }
        Some(Majorant {
            term: Box::new(move |k| self.at(k)),
            tail_upper: Box::new(move |n| self.upper(n.max(1))),
            tail_lower: Some(Box::new(move |n| self.lower(n.max(1)))),
            start: self.start,
        })
    }

    /// Exact divergent minorant, if not summable.
    pub fn minorant(self) -> Option<Minorant<'static>> {
        if self.summable() {
            return None;
        }
        Some(Minorant {
            term: Box::new(move |k| self.at(k)),
            start: self.start,
            witness: format!(
                "terms equal {} beyond k={}; the integral test diverges",
                self.describe(),
                self.start
            ),
        })
    }
}

fn sum_range(term: &dyn Fn(u64) -> f64, from: u64, to: u64, acc: &mut f64) -> Result<(), u64> {
    for k in from..=to {
        let t = term(k);
        if !(t >= 0.0) || !t.is_finite() {
            return Err(k);
        }
        *acc += t;
    }
    Ok(())
}

fn inconclusive(partial_sum: f64, terms_used: u64, detail: impl Into<String>) -> SeriesDecision {
    SeriesDecision {
        verdict: Verdict::Inconclusive,
        partial_sum,
        tail_bound: None,
        tail_lower: 0.0,
        terms_used,
        detail: detail.into(),
    }
}

/// Decide whether a nonnegative series converges.
///
/// `Holds` needs a summable majorant; terms are then summed until the
/// certified tail bracket is narrower than `tol` or `max_terms` is reached.
/// `Fails` needs a divergent minorant. Anything else is `Inconclusive`.
pub fn decide_series(series: &Series<'_>, tol: f64, max_terms: u64) -> SeriesDecision {
    let term = series.term;
    let limit = series.available.map_or(max_terms, |a| a.min(max_terms)).max(1);

    match (&series.majorant, &series.minorant) {
        (Some(_), Some(_)) => {
            let mut s = 0.0;
            let n = series.available.unwrap_or(1).min(max_terms);
            let _ = sum_range(term, 1, n, &mut s);
            inconclusive(s, n, "both a summable majorant and a divergent minorant were supplied")
        }
        (Some(maj), None) => {
            let start = maj.start.max(1);
            if series.available.is_some_and(|a| a < start + BOUND_CHECK_WINDOW) {
                return inconclusive(0.0, 0, "majorant start lies beyond the available terms");
            }
            for k in start + 1..=start + BOUND_CHECK_WINDOW {
                let (t, m) = (term(k), (maj.term)(k));
                if t > m * (1.0 + BOUND_CHECK_RTOL) + f64::MIN_POSITIVE {
                    return inconclusive(0.0, 0, format!("majorant violated at k={k}"));
                }
            }
            let mut partial = 0.0;
            let mut n = start.min(max_terms.max(start));
            if let Err(k) = sum_range(term, 1, n, &mut partial) {
                return inconclusive(partial, k, format!("term {k} is negative or not finite"));
            }
            let cap = max_terms.max(start);
            loop {
                let upper = (maj.tail_upper)(n);
                let lower = maj.tail_lower.as_ref().map_or(0.0, |f| f(n)).clamp(0.0, upper);
                if !upper.is_finite() {
                    return inconclusive(partial, n, "majorant tail bound is not finite");
                }
                if upper - lower <= tol || n >= cap {
                    return SeriesDecision {
                        verdict: Verdict::Holds,
                        partial_sum: partial,
                        tail_bound: Some(upper),
                        tail_lower: lower,
                        terms_used: n,
                        detail: format!(
                            "sum of {n} terms plus certified tail in [{lower:.3e}, {upper:.3e}]"
                        ),
                    };
                }
                let next = (n.saturating_mul(2)).max(n + 64).min(cap);
                if let Err(k) = sum_range(term, n + 1, next, &mut partial) {
                    return inconclusive(partial, k, format!("term {k} is negative or not finite"));
                }
                n = next;
            }
        }
        (None, Some(min)) => {
            let start = min.start.max(1);
            if series.available.is_some_and(|a| a < start + BOUND_CHECK_WINDOW) {
                return inconclusive(0.0, 0, "minorant start lies beyond the available terms");
            }
            for k in start + 1..=start + BOUND_CHECK_WINDOW {
                let (t, m) = (term(k), (min.term)(k));
                if t < m * (1.0 - BOUND_CHECK_RTOL) {
                    return inconclusive(0.0, 0, format!("minorant violated at k={k}"));
                }
            }
            let n = start + BOUND_CHECK_WINDOW;
            let mut partial = 0.0;
            if let Err(k) = sum_range(term, 1, n, &mut partial) {
                return inconclusive(partial, k, format!("term {k} is negative or not finite"));
            }
            SeriesDecision {
                verdict: Verdict::Fails,
                partial_sum: partial,
                tail_bound: None,
                tail_lower: 0.0,
                terms_used: n,
                detail: min.witness.clone(),
            }
        }
        (None, None) => {
            let mut partial = 0.0;
            if let Err(k) = sum_range(term, 1, limit, &mut partial) {
                return inconclusive(partial, k, format!("term {k} is negative or not finite"));
            }
            inconclusive(partial, limit, "no closed-form tail information; finitely many terms cannot decide")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel_with_telescoping_majorant() {
        let term = |k: u64| 1.0 / (k as f64 * k as f64);
        let series = Series {
            term: &term,
            available: None,
            majorant: Some(Majorant {
                term: Box::new(|k| 1.0 / (k as f64 * (k as f64 - 1.0))),
                tail_upper: Box::new(|n| 1.0 / n as f64),
                tail_lower: None,
                start: 1,
            }),
            minorant: None,
        };
        let tol = 1e-6;
        let d = decide_series(&series, tol, 10_000_000);
        assert_eq!(d.verdict, Verdict::Holds);
        assert!((d.partial_sum - PI * PI / 6.0).abs() <= tol, "{d:?}");
        assert!((d.value() - PI * PI / 6.0).abs() <= d.value_err().unwrap());
    }

    #[test]
    fn harmonic_fails() {
        let term = |k: u64| 1.0 / k as f64;
        let series = Series {
            term: &term,
            available: None,
            majorant: None,
            minorant: Some(Minorant {
                term: Box::new(|k| 1.0 / k as f64),
                start: 1,
                witness: "harmonic".into(),
            }),
        };
        assert_eq!(decide_series(&series, 1e-8, 1000).verdict, Verdict::Fails);
    }

    #[test]
    fn no_tail_information_is_inconclusive() {
        let term = |k: u64| {
            let x = (k + 1) as f64;
            1.0 / (x * x.ln().powi(2))
        };
        let series = Series {
            term: &term,
            available: None,
            majorant: None,
            minorant: None,
        };
        let d = decide_series(&series, 1e-8, 10_000);
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert!(d.partial_sum > 0.0);
    }

    #[test]
    fn power_law_bracket_is_sound() {
        let law = PowerLawTail {
            coeff: 1.0,
            exponent: 2.0,
            log_exponent: 0.0,
            start: 0,
        };
        let term = move |k: u64| law.at(k);
        let series = Series {
            term: &term,
            available: None,
            majorant: law.majorant(),
            minorant: None,
        };
        let d = decide_series(&series, 1e-9, 10_000_000);
        assert_eq!(d.verdict, Verdict::Holds);
        assert!((d.value() - PI * PI / 6.0).abs() <= 1e-9, "{d:?}");
        assert!(d.partial_sum + d.tail_lower <= PI * PI / 6.0);
        assert!(d.partial_sum + d.tail_bound.unwrap() >= PI * PI / 6.0);
    }

    #[test]
    fn power_log_laws() {
        let s1q2 = PowerLawTail {
            coeff: 1.0,
            exponent: 1.0,
            log_exponent: 2.0,
            start: 0,
        };
        assert!(s1q2.summable());
        let term = move |k: u64| s1q2.at(k);
        let d = decide_series(
            &Series {
                term: &term,
                available: None,
                majorant: s1q2.majorant(),
                minorant: None,
            },
            1e-3,
            1_000_000,
        );
        assert_eq!(d.verdict, Verdict::Holds);
        assert!(d.tail_lower <= d.tail_bound.unwrap());

        let s1q1 = PowerLawTail {
            log_exponent: 1.0,
            ..s1q2
        };
        assert!(!s1q1.summable());
        assert!(s1q1.minorant().is_some());

        let s2q3 = PowerLawTail {
            coeff: 2.0,
            exponent: 2.0,
            log_exponent: 3.0,
            start: 5,
        };
        for n in [5u64, 50, 500] {
            let brute: f64 = (n + 1..n + 2_000_000).map(|k| s2q3.at(k)).sum();
            assert!(s2q3.lower(n) <= brute && brute <= s2q3.upper(n), "n={n}");
        }
    }

    #[test]
    fn zero_law_holds_immediately() {
        let law = PowerLawTail {
            coeff: 0.0,
            exponent: -3.0,
            log_exponent: 0.0,
            start: 4,
        };
        let term = |k: u64| if k <= 4 { 1.0 } else { 0.0 };
        let d = decide_series(
            &Series {
                term: &term,
                available: None,
                majorant: law.majorant(),
                minorant: None,
            },
            1e-12,
            100,
        );
        assert_eq!(d.verdict, Verdict::Holds);
        assert_eq!(d.value(), 4.0);
    }

    #[test]
    fn wrong_majorant_is_rejected() {
        let term = |k: u64| 1.0 / k as f64;
        let law = PowerLawTail {
            coeff: 1.0,
            exponent: 2.0,
            log_exponent: 0.0,
            start: 0,
        };
        let d = decide_series(
            &Series {
                term: &term,
                available: None,
                majorant: law.majorant(),
                minorant: None,
            },
            1e-6,
            1000,
        );
        assert_eq!(d.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn verdict_is_monotone_in_budget() {
        let laws = [
            (1.0, 2.0, 0.0),
            (1.0, 1.0, 0.0),
            (0.5, 1.5, 1.0),
            (3.0, 0.5, 0.0),
            (1.0, 1.0, 1.5),
        ];
        for (c, s, q) in laws {
            let law = PowerLawTail {
                coeff: c,
                exponent: s,
                log_exponent: q,
                start: 0,
            };
            let term = move |k: u64| law.at(k);
            let verdicts: Vec<Verdict> = [1u64, 10, 1000, 100_000]
                .iter()
                .map(|&b| {
                    decide_series(
                        &Series {
                            term: &term,
                            available: None,
                            majorant: law.majorant(),
                            minorant: law.minorant(),
                        },
                        1e-8,
                        b,
                    )
                    .verdict
                })
                .collect();
            assert!(!(verdicts.contains(&Verdict::Holds) && verdicts.contains(&Verdict::Fails)));
            for w in verdicts.windows(2) {
                if w[0] != Verdict::Inconclusive {
                    assert_eq!(w[0], w[1]);
                }
            }
        }
    }
}
