//! Adaptive Simpson quadrature with certified truncation of `[0, inf)`
//! integrals, and tail-certified decisions for nonnegative series.

mod series;

pub use series::{
    decide_series, Majorant, Minorant, PowerLawTail, Series, SeriesDecision, Verdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_MAX_EVALS: usize = 2_000_000;
const INITIAL_PANELS: usize = 16;
const MIN_DEPTH: u32 = 2;
const MAX_DEPTH: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_bound: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

/// Adaptive Simpson on `[a, b]`. The reported error is the sum of the local
/// Richardson estimates `|S2 - S1| / 15` of the accepted panels.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_interval_budget(f, a, b, tol, DEFAULT_MAX_EVALS)
}

pub fn integrate_interval_budget<F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evals: usize,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(invalid("quadrature tolerance must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(invalid(format!("bad integration interval [{a}, {b}]")));
    }
    if b == a {
        return Ok(QuadResult {
            value: 0.0,
            err_bound: 0.0,
            evaluations: 0,
        });
    }

    let width = b - a;
    let mut evals = 0usize;
    let eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let h = width / INITIAL_PANELS as f64;
    let mut stack: Vec<Panel> = Vec::with_capacity(64);
    let mut f_left = eval(a, &mut evals);
    for i in 0..INITIAL_PANELS {
        let pa = a + h * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { a + h * (i + 1) as f64 };
        let fm = eval(0.5 * (pa + pb), &mut evals);
        let fb = eval(pb, &mut evals);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa: f_left,
            fm,
            fb,
            whole: (pb - pa) * (f_left + 4.0 * fm + fb) / 6.0,
            depth: 0,
        });
        f_left = fb;
    }
    // Process left to right so that summation order is fixed.
    stack.reverse();

    let mut value = 0.0;
    let mut err = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm, &mut evals);
        let frm = eval(rm, &mut evals);
        let half = 0.5 * (p.b - p.a);
        let left = half * (p.fa + 4.0 * flm + p.fm) / 6.0;
        let right = half * (p.fm + 4.0 * frm + p.fb) / 6.0;
        let diff = left + right - p.whole;
        let local_tol = tol * (p.b - p.a) / width;
        let converged = p.depth >= MIN_DEPTH && diff.abs() <= 15.0 * local_tol;
        if !diff.is_finite() {
            return Err(invalid("integrand produced a non-finite value"));
        }
        if converged || p.depth >= MAX_DEPTH || evals >= max_evals {
            value += left + right + diff / 15.0;
            err += diff.abs() / 15.0;
            if evals >= max_evals && !stack.is_empty() {
                // Finish the remaining panels with their coarse estimates.
                for q in stack.drain(..) {
                    value += q.whole;
                    err += q.whole.abs().max(f64::MIN_POSITIVE);
                }
                return Err(Error::QuadratureBudget(QuadResult {
                    value,
                    err_bound: err,
                    evaluations: evals,
                }));
            }
            continue;
        }
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            depth: p.depth + 1,
        });
    }

    let result = QuadResult {
        value,
        err_bound: err,
        evaluations: evals,
    };
    if err > tol {
        return Err(Error::QuadratureBudget(result));
    }
    Ok(result)
}

/// Truncation point for an integrand dominated by `bound_const * exp(-decay_rate s)`:
/// the tail beyond it is at most `tail_tol`.
pub fn truncation_point(decay_rate: f64, bound_const: f64, tail_tol: f64) -> f64 {
    if bound_const <= 0.0 {
        return 0.0;
    }
    ((bound_const / (tail_tol * decay_rate)).ln() / decay_rate).max(0.0)
}

/// `int_0^inf f(s) ds` for `|f(s)| <= bound_const * exp(-decay_rate s)`.
///
/// Half of `tol` goes to the analytic tail beyond the truncation point and
/// half to adaptive Simpson on `[0, s_max]`; the tail bound is added to
/// `err_bound`.
pub fn integrate_decaying<F>(f: F, decay_rate: f64, bound_const: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_decaying_budget(f, decay_rate, bound_const, tol, DEFAULT_MAX_EVALS)
}

pub fn integrate_decaying_budget<F>(
    f: F,
    decay_rate: f64,
    bound_const: f64,
    tol: f64,
    max_evals: usize,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(decay_rate > 0.0 && decay_rate.is_finite()) {
        return Err(invalid("decay rate must be positive and finite"));
    }
    if !(bound_const >= 0.0 && bound_const.is_finite()) {
        return Err(invalid("bound constant must be nonnegative and finite"));
    }
    if !(tol > 0.0) {
        return Err(invalid("quadrature tolerance must be positive"));
    }
    if bound_const == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            err_bound: 0.0,
            evaluations: 0,
        });
    }
    let s_max = truncation_point(decay_rate, bound_const, 0.5 * tol);
    let tail = bound_const * (-decay_rate * s_max).exp() / decay_rate;
    let mut inner = match integrate_interval_budget(f, 0.0, s_max, 0.5 * tol, max_evals) {
        Ok(r) => r,
        Err(Error::QuadratureBudget(mut best)) => {
            best.err_bound += tail;
            return Err(Error::QuadratureBudget(best));
        }
        Err(e) => return Err(e),
    };
    inner.err_bound += tail;
    Ok(inner)
}
