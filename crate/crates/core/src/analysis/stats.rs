//! Interval estimates and correlation statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` (`trials > 0`).
///
/// The bounds are exact at the extremes: 0 successes gives a lower bound of
/// 0 and all successes an upper bound of 1.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let high = if successes == trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (low, high)
}

/// Mean with a normal-approximation 95% interval (sample standard deviation).
pub fn mean_interval(values: &[f64]) -> (f64, f64, f64) {
    assert!(!values.is_empty());
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, mean, mean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z_95 * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pearson {
    pub r: f64,
    /// Set when either variable is constant; `r` is then reported as 0.
    pub degenerate: bool,
}

/// Pearson's r from a single pass of running co-moments.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Pearson {
    assert_eq!(xs.len(), ys.len());
    let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let n = (k + 1) as f64;
        let dx = x - mx;
        let dy = y - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (x - mx);
        syy += dy * (y - my);
        sxy += dx * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Pearson { r: 0.0, degenerate: true };
    }
    Pearson { r: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), degenerate: false }
}

/// Two-sided p-value for `r` over `n` pairs, from Student's t with n-2 df.
pub fn pearson_p_value(r: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive df");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Bonferroni adjustment for a family of `family_size` comparisons.
pub fn bonferroni(p: f64, family_size: usize) -> f64 {
    (p * family_size as f64).min(1.0)
}
