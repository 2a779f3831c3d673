//! Screening and model-selection statistics.
//!
//! - Wald-Wolfowitz runs test about the median (independence), normal
//!   approximation for the critical value.
//! - Student's t on Spearman's rank correlation with time (stationarity).
//! - One-sample Kolmogorov-Smirnov `D_max` with exact critical values.
//! - AIC with two parameters per family.
//!
//! K-S is evaluated against parameters estimated from the same sample, as the
//! classical procedure does; the verdicts are therefore liberal (Lilliefors).

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::distfit::{Family, FittedDistribution};
use crate::error::{Error, Result};
use crate::special::{ks_critical, normal_critical, student_t_critical};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestVerdict {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    /// Whether the null hypothesis survives: independent, stationary, or
    /// consistent with the fitted distribution.
    pub passed: bool,
}

impl TestVerdict {
    /// True when the statistic diverged, e.g. a perfectly monotone series in
    /// the stationarity test.
    pub fn is_infinite(&self) -> bool {
        self.statistic.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AicScore {
    pub value: f64,
    pub k: usize,
    pub n: usize,
}

/// Ranks starting at 1, with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(core::cmp::Ordering::Equal));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of average-tie ranks.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::SampleTooSmall { n: xs.len(), required: 3 });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    pearson(&average_ranks(xs), &average_ranks(ys)).ok_or(Error::ConstantInput)
}

/// `t = r √((N - 2) / (1 - r²))`; infinite when `|r| = 1`.
pub fn rank_correlation_t(rho: f64, n: usize) -> f64 {
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return if rho >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    rho * ((n as f64 - 2.0) / denom).sqrt()
}

/// Student's t test on the Spearman correlation between the values and their
/// time index `1..=N`. Passed (stationary) when `|t|` is below the two-sided
/// critical value at `N - 2` degrees of freedom.
pub fn stationarity_t_test(values: &[f64], alpha: f64) -> Result<TestVerdict> {
    let n = values.len();
    if n < 4 {
        return Err(Error::SampleTooSmall { n, required: 4 });
    }
    let critical = student_t_critical(alpha, n as f64 - 2.0);
    stationarity_with_critical(values, alpha, critical)
}

pub(crate) fn stationarity_with_critical(
    values: &[f64],
    alpha: f64,
    critical: f64,
) -> Result<TestVerdict> {
    let time: Vec<f64> = (1..=values.len()).map(|i| i as f64).collect();
    let rho = spearman_rho(values, &time)?;
    let t = rank_correlation_t(rho, values.len());
    Ok(TestVerdict {
        statistic: t,
        critical_value: critical,
        alpha,
        passed: t.abs() < critical,
    })
}

/// Median with the even-length case taken as the mean of the two central
/// order statistics.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Number of runs above/below the median, with values equal to the median
/// dropped. Returns `(runs, above, below)`.
pub fn count_runs(values: &[f64]) -> (usize, usize, usize) {
    let m = median(values);
    let signs = values.iter().filter(|&&v| v != m).map(|&v| v > m);
    let (mut runs, mut above, mut below) = (0, 0, 0);
    let mut last = None;
    for s in signs {
        if s {
            above += 1;
        } else {
            below += 1;
        }
        if last != Some(s) {
            runs += 1;
        }
        last = Some(s);
    }
    (runs, above, below)
}

/// Wald-Wolfowitz runs test. The statistic is the standardized run count
/// `z = (R - μ_R) / σ_R`; passed (independent) when `|z|` is below the
/// two-sided normal critical value.
pub fn runs_test(values: &[f64], alpha: f64) -> Result<TestVerdict> {
    runs_with_critical(values, alpha, normal_critical(alpha))
}

pub(crate) fn runs_with_critical(values: &[f64], alpha: f64, critical: f64) -> Result<TestVerdict> {
    if values.len() < 10 {
        return Err(Error::SampleTooSmall { n: values.len(), required: 10 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let (runs, above, below) = count_runs(values);
    if above == 0 || below == 0 {
        return Err(Error::ConstantInput);
    }
    let (n1, n2) = (above as f64, below as f64);
    let n = n1 + n2;
    let mean = 2.0 * n1 * n2 / n + 1.0;
    let var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    let z = if var > 0.0 {
        (runs as f64 - mean) / var.sqrt()
    } else {
        0.0
    };
    Ok(TestVerdict { statistic: z, critical_value: critical, alpha, passed: z.abs() < critical })
}

/// `D_max = max_i max(|F(x_(i)) - i/N|, |F(x_(i)) - (i-1)/N|)`.
pub fn ks_distance(sample: &[f64], fit: &FittedDistribution) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySeries);
    }
    let family = fit.family();
    let mut sorted = sample.to_vec();
    for &x in &sorted {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        if family.positive_support() && x <= 0.0 {
            return Err(Error::DomainViolation { family, value: x });
        }
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = fit.distribution.cdf(x);
        let upper = (i + 1) as f64 / n;
        let lower = i as f64 / n;
        d = d.max((f - upper).abs()).max((f - lower).abs());
    }
    Ok(d)
}

/// Kolmogorov-Smirnov test of a sample against a fitted distribution.
/// Passed when `D_max` is below the exact critical value for the sample size.
pub fn ks_statistic(sample: &[f64], fit: &FittedDistribution, alpha: f64) -> Result<TestVerdict> {
    let critical = ks_critical(sample.len().max(1), alpha);
    ks_with_critical(sample, fit, alpha, critical)
}

pub(crate) fn ks_with_critical(
    sample: &[f64],
    fit: &FittedDistribution,
    alpha: f64,
    critical: f64,
) -> Result<TestVerdict> {
    let d = ks_distance(sample, fit)?;
    Ok(TestVerdict { statistic: d, critical_value: critical, alpha, passed: d < critical })
}

/// `AIC = 2k - 2 Σ ln f(x_j)` with `k = 2`.
pub fn aic(fit: &FittedDistribution, sample: &[f64]) -> Result<AicScore> {
    let mut total = 0.0;
    for &x in sample {
        let l = fit.distribution.ln_pdf(x);
        if !l.is_finite() {
            return Err(Error::ZeroDensity { value: x });
        }
        total += l;
    }
    Ok(aic_from_log_likelihood(total, sample.len()))
}

pub fn aic_from_log_likelihood(log_likelihood: f64, n: usize) -> AicScore {
    let k = Family::PARAMETER_COUNT;
    AicScore { value: 2.0 * k as f64 - 2.0 * log_likelihood, k, n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfit::{fit_mle, Distribution};
    use alloc::vec;

    fn fitted(d: Distribution) -> FittedDistribution {
        FittedDistribution { distribution: d, log_likelihood: 0.0, n: 0, converged: true, iterations: 0 }
    }

    #[test]
    fn spearman_monotone() {
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(spearman_rho(&x, &x).unwrap(), 1.0);
        assert_eq!(spearman_rho(&x, &neg).unwrap(), -1.0);
        assert!(matches!(spearman_rho(&x, &x[..9]), Err(Error::LengthMismatch { .. })));
        assert_eq!(spearman_rho(&x, &[2.0; 10]).unwrap_err(), Error::ConstantInput);
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn t_from_rho() {
        assert_eq!(rank_correlation_t(0.0, 40), 0.0);
        assert!((rank_correlation_t(0.31, 40) - 2.0100).abs() < 5e-4);
        assert_eq!(rank_correlation_t(1.0, 40), f64::INFINITY);
    }

    #[test]
    fn stationarity_examples() {
        // symmetric permutation with zero rank correlation
        let v = [2.0, 4.0, 1.0, 3.0, 3.5, 0.5, 4.5, 2.5];
        let rho = spearman_rho(&v, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        let verdict = stationarity_t_test(&v, 0.05).unwrap();
        assert!((verdict.statistic - rank_correlation_t(rho, 8)).abs() < 1e-15);

        let rising: Vec<f64> = (0..40).map(|i| 500.0 + i as f64).collect();
        let verdict = stationarity_t_test(&rising, 0.05).unwrap();
        assert!(verdict.is_infinite());
        assert!(!verdict.passed);
        assert!((verdict.critical_value - 2.024).abs() < 5e-4);
    }

    #[test]
    fn zero_correlation_series_passes() {
        // ranks 1..8 against time arranged so Σ d² = n(n²-1)/6
        let v = [5.0, 2.0, 8.0, 3.0, 6.0, 1.0, 7.0, 4.0];
        let time: Vec<f64> = (1..=8).map(f64::from).collect();
        let d2: f64 = v.iter().zip(&time).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_eq!(d2, 84.0);
        let verdict = stationarity_t_test(&v, 0.05).unwrap();
        assert_eq!(verdict.statistic, 0.0);
        assert!(verdict.passed);
    }

    #[test]
    fn runs_extremes() {
        let alternating: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 } else { 5.0 }).collect();
        assert_eq!(count_runs(&alternating), (40, 20, 20));
        let v = runs_test(&alternating, 0.05).unwrap();
        assert!(v.statistic > 1.96 && !v.passed);

        let blocks: Vec<f64> = (0..40).map(|i| if i < 20 { 1.0 + i as f64 } else { 100.0 + i as f64 }).collect();
        assert_eq!(count_runs(&blocks).0, 2);
        assert!(!runs_test(&blocks, 0.05).unwrap().passed);

        assert_eq!(runs_test(&[3.0; 12], 0.05).unwrap_err(), Error::ConstantInput);
    }

    #[test]
    fn runs_excludes_median_ties() {
        // odd length: the median itself is dropped
        let v = [1.0, 9.0, 5.0, 2.0, 8.0, 3.0, 7.0, 4.0, 6.0, 0.0, 10.0];
        let (runs, above, below) = count_runs(&v);
        assert_eq!((above, below), (5, 5));
        assert_eq!(runs, 10);
    }

    #[test]
    fn ks_one_point() {
        let g = fitted(Distribution::gumbel(0.0, 1.0).unwrap());
        let x_half = g.exceedance_quantile(0.5).unwrap();
        let d = ks_distance(&[x_half], &g).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_theoretical_quantiles() {
        let g = fitted(Distribution::gumbel(600.0, 50.0).unwrap());
        let n = 40;
        let sample: Vec<f64> = (1..=n)
            .map(|i| g.exceedance_quantile(1.0 - (i as f64 - 0.5) / n as f64).unwrap())
            .collect();
        let v = ks_statistic(&sample, &g, 0.05).unwrap();
        assert!((v.statistic - 0.5 / n as f64).abs() < 1e-12);
        assert!((v.critical_value - 0.210).abs() < 5e-4);
        assert!(v.passed);
    }

    #[test]
    fn aic_unit_density() {
        // Gumbel density at its mode is 1/(eβ); β = 1/e makes it 1.
        let g = fitted(Distribution::gumbel(3.0, (-1.0f64).exp()).unwrap());
        let score = aic(&g, &[3.0, 3.0, 3.0]).unwrap();
        assert!((score.value - 4.0).abs() < 1e-12);
        assert_eq!(score.k, 2);
    }

    #[test]
    fn aic_matches_attained_likelihood() {
        let sample: Vec<f64> = (1..=30).map(|i| 500.0 + ((i * 17) % 11) as f64 * 9.0).collect();
        for family in Family::ALL {
            let fit = fit_mle(&sample, family).unwrap();
            let score = aic(&fit, &sample).unwrap();
            assert!((score.value - (4.0 - 2.0 * fit.log_likelihood)).abs() < 1e-9);
        }
        let w = fitted(Distribution::weibull(2.0, 5.0).unwrap());
        assert!(matches!(aic(&w, &[1.0, -1.0]), Err(Error::ZeroDensity { .. })));
    }
}
