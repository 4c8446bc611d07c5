//! Sample summaries for the statistics file.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Unbiased; zero for a single sample.
    pub variance: f64,
    /// Quantiles at 5, 25, 50, 75 and 95 percent.
    pub q: [f64; 5],
}

pub const LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sorts `values` in place.
pub fn summarize(values: &mut [f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() > 1 {
        values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    values.sort_by(f64::total_cmp);
    Summary {
        mean,
        variance,
        q: LEVELS.map(|p| quantile_sorted(values, p)),
    }
}
