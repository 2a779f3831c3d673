//! Linear trends of per-window quantiles and parameters, and coefficients of
//! determination against covariates.
//!
//! Trends regress on the window start year by plain OLS. Overlapping windows
//! make neighbouring residuals strongly correlated, so the reported standard
//! errors understate the true sampling uncertainty; they are the textbook
//! OLS values nonetheless.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::{student_t_critical, student_t_two_sided_p};
use crate::windowscan::ScanResult;

/// cm/year to mm/year.
const MM_PER_CM: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendResult {
    /// mm per year
    pub slope: f64,
    /// cm at year zero
    pub intercept: f64,
    /// mm per year
    pub slope_se: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Residuals vanish: the points lie on a line.
    pub exact_fit: bool,
    pub n: usize,
}

/// OLS of value (cm) on year. Slope and its standard error come back in mm/year.
pub fn linear_trend(points: &[(i32, f64)], alpha: f64) -> Result<TrendResult> {
    let n = points.len();
    if n < 3 {
        return Err(Error::SampleTooSmall { n, required: 3 });
    }
    if points.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| f64::from(p.0)).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(year, value) in points {
        let dx = f64::from(year) - mean_x;
        sxx += dx * dx;
        sxy += dx * (value - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::ConstantInput);
    }
    let mut slope_cm = sxy / sxx;
    let mut intercept = mean_y - slope_cm * mean_x;
    let sse: f64 = points
        .iter()
        .map(|&(year, value)| {
            let r = value - (intercept + slope_cm * f64::from(year));
            r * r
        })
        .sum();
    let scale = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1.0);
    let tiny = 1e-12 * scale;
    let exact_fit = sse <= nf * tiny * tiny;
    if exact_fit && slope_cm.abs() * (sxx / nf).sqrt() <= tiny {
        slope_cm = 0.0;
        intercept = mean_y;
    }
    let df = nf - 2.0;
    let critical = student_t_critical(alpha, df);
    let (slope_se, t, p_value) = if !exact_fit {
        let se = (sse / df / sxx).sqrt();
        let t = slope_cm / se;
        (se, t, student_t_two_sided_p(t, df))
    } else if slope_cm == 0.0 {
        (0.0, 0.0, 1.0)
    } else {
        (0.0, slope_cm.signum() * f64::INFINITY, 0.0)
    };
    Ok(TrendResult {
        slope: slope_cm * MM_PER_CM,
        intercept,
        slope_se: slope_se * MM_PER_CM,
        t_statistic: t,
        p_value,
        significant: t.abs() > critical,
        exact_fit,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationStats {
    pub r: f64,
    pub r_squared: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    pub n: usize,
}

/// Squared Pearson correlation with its regression t test at `n - 2` df.
pub fn r_squared(xs: &[f64], ys: &[f64], alpha: f64) -> Result<CorrelationStats> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientPairs { n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let r2 = r * r;
    let df = nf - 2.0;
    let t = if r2 >= 1.0 {
        r.signum() * f64::INFINITY
    } else {
        r * (df / (1.0 - r2)).sqrt()
    };
    let critical = student_t_critical(alpha, df);
    Ok(CorrelationStats {
        r,
        r_squared: r2,
        t_statistic: t,
        p_value: student_t_two_sided_p(t, df),
        significant: t.abs() > critical,
        n,
    })
}

/// Row label for trend and correlation tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendTarget {
    Exceedance(f64),
    Location,
    Scale,
}

impl TrendTarget {
    pub fn label(&self) -> String {
        match self {
            TrendTarget::Exceedance(p) => alloc::format!("{p}"),
            TrendTarget::Location => String::from("alpha"),
            TrendTarget::Scale => String::from("beta"),
        }
    }
}

fn target_series(scan: &ScanResult, target: TrendTarget) -> Result<Vec<f64>> {
    scan.windows
        .iter()
        .map(|w| match target {
            TrendTarget::Exceedance(p) => w.quantile(p).ok_or(Error::InvalidProbability(p)),
            TrendTarget::Location => Ok(w.location_alpha),
            TrendTarget::Scale => Ok(w.scale_beta),
        })
        .collect()
}

fn table_targets(scan: &ScanResult) -> Vec<TrendTarget> {
    let mut targets: Vec<TrendTarget> = scan
        .windows
        .first()
        .map(|w| w.quantiles.iter().map(|&(p, _)| TrendTarget::Exceedance(p)).collect())
        .unwrap_or_default();
    targets.push(TrendTarget::Location);
    targets.push(TrendTarget::Scale);
    targets
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub target: TrendTarget,
    pub trend: TrendResult,
}

/// One trend per exceedance probability, then the location and scale
/// parameters, each regressed on the window start year.
pub fn quantile_trend_table(scan: &ScanResult, alpha: f64) -> Result<Vec<TrendRow>> {
    if scan.windows.len() < 3 {
        return Err(Error::InsufficientPairs { n: scan.windows.len() });
    }
    table_targets(scan)
        .into_iter()
        .map(|target| {
            let values = target_series(scan, target)?;
            let points: Vec<(i32, f64)> =
                scan.windows.iter().map(|w| w.start_year).zip(values).collect();
            Ok(TrendRow { target, trend: linear_trend(&points, alpha)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub target: TrendTarget,
    pub covariate: String,
    pub stats: CorrelationStats,
}

/// R² between each quantile/parameter series and a per-window covariate.
/// Windows whose covariate is `None` are left out of the pairing, and
/// targets that are constant across windows get no row.
pub fn covariate_correlation_table(
    scan: &ScanResult,
    covariate: &[Option<f64>],
    covariate_label: &str,
    alpha: f64,
) -> Result<Vec<CorrelationRow>> {
    if covariate.len() != scan.windows.len() {
        return Err(Error::LengthMismatch { left: covariate.len(), right: scan.windows.len() });
    }
    let paired: Vec<usize> = (0..covariate.len()).filter(|&i| covariate[i].is_some()).collect();
    if paired.len() < 3 {
        return Err(Error::InsufficientPairs { n: paired.len() });
    }
    let xs: Vec<f64> = paired.iter().filter_map(|&i| covariate[i]).collect();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::ConstantInput);
    }
    let mut rows = Vec::new();
    for target in table_targets(scan) {
        let all = target_series(scan, target)?;
        let ys: Vec<f64> = paired.iter().map(|&i| all[i]).collect();
        // a held-fixed scale has no correlation to report
        if ys.iter().all(|&y| y == ys[0]) {
            continue;
        }
        rows.push(CorrelationRow {
            target,
            covariate: String::from(covariate_label),
            stats: r_squared(&xs, &ys, alpha)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(i32, f64)> = (1900..1950).map(|y| (y, 500.0 + 0.2 * f64::from(y - 1900))).collect();
        let t = linear_trend(&pts, 0.05).unwrap();
        assert!((t.slope - 2.0).abs() < 1e-9);
        assert_eq!(t.slope_se, 0.0);
        assert!(t.exact_fit && t.significant);
    }

    #[test]
    fn flat_series() {
        let pts: Vec<(i32, f64)> = (1900..1950).map(|y| (y, 512.5)).collect();
        let t = linear_trend(&pts, 0.05).unwrap();
        assert_eq!(t.slope, 0.0);
        assert!(!t.significant);
    }

    #[test]
    fn trend_errors() {
        assert!(matches!(linear_trend(&[(1, 1.0), (2, 2.0)], 0.05), Err(Error::SampleTooSmall { .. })));
        assert_eq!(
            linear_trend(&[(1, 1.0), (1, 2.0), (1, 3.0)], 0.05).unwrap_err(),
            Error::ConstantInput
        );
    }

    #[test]
    fn noisy_trend_has_consistent_t() {
        let pts: Vec<(i32, f64)> = (0..30)
            .map(|i| (1900 + i, 500.0 + 0.1 * f64::from(i) + if i % 2 == 0 { 1.5 } else { -1.5 }))
            .collect();
        let t = linear_trend(&pts, 0.05).unwrap();
        assert!((t.t_statistic - t.slope / t.slope_se).abs() < 1e-9);
        assert!(t.p_value > 0.0 && t.p_value < 1.0);
        assert_eq!(t.significant, t.p_value < 0.05);
    }

    #[test]
    fn r_squared_examples() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 7.0).collect();
        let s = r_squared(&xs, &ys, 0.05).unwrap();
        assert!((s.r_squared - 1.0).abs() < 1e-15);
        assert!(s.significant);

        // symmetric y against centred x: zero covariance
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let ys = [4.0, 1.0, 0.0, 1.0, 4.0];
        let s = r_squared(&xs, &ys, 0.05).unwrap();
        assert_eq!(s.r_squared, 0.0);
        assert!(!s.significant);

        assert_eq!(r_squared(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], 0.05).unwrap_err(), Error::ConstantInput);
        assert!(matches!(r_squared(&[1.0, 2.0], &[1.0, 2.0], 0.05), Err(Error::InsufficientPairs { n: 2 })));
    }

    #[test]
    fn labels() {
        assert_eq!(TrendTarget::Exceedance(0.001).label(), "0.001");
        assert_eq!(TrendTarget::Location.label(), "alpha");
    }
}
