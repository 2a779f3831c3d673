//! Overlapping fixed-length windows over a gap-collapsed annual series and
//! the per-window analysis: screening, four-family fits, K-S, AIC, family
//! selection, and exceedance quantiles.
//!
//! Windows slide over observations rather than calendar years. A window that
//! straddles a gap therefore covers more calendar years than its length.

use alloc::string::String;
use alloc::vec::Vec;

use crate::distfit::{fit_gumbel_known_scale, fit_mle, Distribution, Family, FittedDistribution};
use crate::error::{Error, Result};
use crate::series::AnnualSeries;
use crate::special::{ks_critical, normal_critical, student_t_critical};
use crate::stattests::{
    aic, ks_with_critical, runs_with_critical, stationarity_with_critical, AicScore, TestVerdict,
};

/// Exceedance probabilities reported by default, ascending.
pub const DEFAULT_PROBABILITIES: [f64; 11] =
    [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.10, 0.20, 0.50, 0.75, 0.99];

pub const DEFAULT_WINDOW_LENGTH: usize = 40;

/// Largest share of a window's years a covariate may miss before its
/// windowed value is reported as absent.
pub const COVARIATE_MISSING_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyPolicy {
    /// Quantiles always come from the Gumbel fit.
    FixedGumbel,
    /// Quantiles come from the converged family with the lowest AIC.
    BestAic,
    /// Gumbel with the scale held at the given value; only the location is fitted.
    GumbelKnownScale(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub length: usize,
    /// Strictly increasing exceedance probabilities in (0, 1).
    pub probabilities: Vec<f64>,
    pub alpha: f64,
    pub family_policy: FamilyPolicy,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            length: DEFAULT_WINDOW_LENGTH,
            probabilities: DEFAULT_PROBABILITIES.to_vec(),
            alpha: 0.05,
            family_policy: FamilyPolicy::FixedGumbel,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 10 {
            return Err(Error::InvalidWindowSpec("window length must be at least 10"));
        }
        if self.probabilities.is_empty() {
            return Err(Error::InvalidWindowSpec("no exceedance probabilities"));
        }
        for &p in &self.probabilities {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidProbability(p));
            }
        }
        if self.probabilities.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWindowSpec("probabilities must be strictly increasing"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter { name: "alpha", value: self.alpha });
        }
        if let FamilyPolicy::GumbelKnownScale(beta) = self.family_policy {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::InvalidParameter { name: "known gumbel scale", value: beta });
            }
        }
        Ok(())
    }
}

/// A run of `length` consecutive observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub start_year: i32,
    pub years: Vec<i32>,
    pub values: Vec<f64>,
}

impl Window {
    pub fn end_year(&self) -> i32 {
        *self.years.last().unwrap_or(&self.start_year)
    }
}

/// Every run of `spec.length` consecutive observations, labelled by the
/// year of its first observation. There are `N - length + 1` of them.
pub fn make_windows(series: &AnnualSeries, spec: &WindowSpec) -> Result<Vec<Window>> {
    if spec.length == 0 {
        return Err(Error::InvalidWindowSpec("window length must be positive"));
    }
    let obs = series.observations();
    if obs.len() < spec.length {
        return Err(Error::SeriesTooShort { n: obs.len(), window: spec.length });
    }
    Ok(obs
        .windows(spec.length)
        .map(|w| Window {
            start_year: w[0].year,
            years: w.iter().map(|o| o.year).collect(),
            values: w.iter().map(|o| o.value).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateReduction {
    Mean,
    Maximum,
}

/// A named annual series summarised over each window's member years.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariate {
    pub name: String,
    pub series: AnnualSeries,
    pub reduction: CovariateReduction,
}

impl Covariate {
    pub fn mean(name: impl Into<String>, series: AnnualSeries) -> Self {
        Self { name: name.into(), series, reduction: CovariateReduction::Mean }
    }

    /// Reduction over the window's years; `None` when more than 10% of them
    /// are missing from the covariate.
    pub fn windowed(&self, years: &[i32]) -> Option<f64> {
        let present: Vec<f64> = years.iter().filter_map(|&y| self.series.value_at(y)).collect();
        let missing = years.len() - present.len();
        if present.is_empty() || missing as f64 > COVARIATE_MISSING_TOLERANCE * years.len() as f64 {
            return None;
        }
        Some(match self.reduction {
            CovariateReduction::Mean => present.iter().sum::<f64>() / present.len() as f64,
            CovariateReduction::Maximum => present.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyFit {
    pub fit: FittedDistribution,
    pub ks: TestVerdict,
    pub aic: AicScore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOutcome {
    pub family: Family,
    /// `Err` when the fit failed or did not converge; such families are
    /// excluded from selection.
    pub result: Result<FamilyFit>,
}

impl FamilyOutcome {
    pub fn usable(&self) -> Option<&FamilyFit> {
        self.result.as_ref().ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screening {
    pub runs: TestVerdict,
    pub stationarity: TestVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowResult {
    pub start_year: i32,
    pub years: Vec<i32>,
    pub values: Vec<f64>,
    /// Recorded only; failures do not stop the analysis.
    pub screening: Screening,
    /// One entry per family, in [`Family::ALL`] order.
    pub fits: Vec<FamilyOutcome>,
    pub selected_family: Family,
    pub selected: Distribution,
    /// `(p, x_p)` pairs in the window spec's probability order; `x_p` decreases with `p`.
    pub quantiles: Vec<(f64, f64)>,
    /// Gumbel location α (cm).
    pub location_alpha: f64,
    /// Gumbel scale β (cm).
    pub scale_beta: f64,
    pub covariates: Vec<(String, Option<f64>)>,
}

impl WindowResult {
    pub fn end_year(&self) -> i32 {
        *self.years.last().unwrap_or(&self.start_year)
    }

    pub fn outcome(&self, family: Family) -> &FamilyOutcome {
        &self.fits[family.index()]
    }

    pub fn quantile(&self, p: f64) -> Option<f64> {
        self.quantiles.iter().find(|(q, _)| *q == p).map(|&(_, x)| x)
    }

    pub fn covariate(&self, name: &str) -> Option<f64> {
        self.covariates.iter().find(|(n, _)| n == name).and_then(|&(_, v)| v)
    }
}

/// Holds the critical values for one window length and level so a scan
/// computes them once.
#[derive(Debug, Clone)]
pub struct WindowAnalyzer {
    spec: WindowSpec,
    t_critical: f64,
    runs_critical: f64,
    ks_critical: f64,
}

impl WindowAnalyzer {
    pub fn new(spec: WindowSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            t_critical: student_t_critical(spec.alpha, spec.length as f64 - 2.0),
            runs_critical: normal_critical(spec.alpha),
            ks_critical: ks_critical(spec.length, spec.alpha),
            spec,
        })
    }

    pub fn spec(&self) -> &WindowSpec {
        &self.spec
    }

    pub fn t_critical(&self) -> f64 {
        self.t_critical
    }

    pub fn ks_critical(&self) -> f64 {
        self.ks_critical
    }

    fn fit_family(&self, values: &[f64], family: Family) -> Result<FamilyFit> {
        let fit = fit_mle(values, family)?;
        if !fit.converged {
            return Err(Error::NoConvergence { family, iterations: fit.iterations });
        }
        let ks = ks_with_critical(values, &fit, self.spec.alpha, self.ks_critical)?;
        let aic = aic(&fit, values)?;
        Ok(FamilyFit { fit, ks, aic })
    }

    pub fn analyze(&self, window: &Window, covariates: &[Covariate]) -> Result<WindowResult> {
        let spec = &self.spec;
        if window.values.len() != spec.length || window.years.len() != spec.length {
            return Err(Error::LengthMismatch { left: window.values.len(), right: spec.length });
        }
        let values = &window.values;
        let screening = Screening {
            runs: runs_with_critical(values, spec.alpha, self.runs_critical)?,
            stationarity: stationarity_with_critical(values, spec.alpha, self.t_critical)?,
        };
        let fits: Vec<FamilyOutcome> = Family::ALL
            .iter()
            .map(|&family| FamilyOutcome { family, result: self.fit_family(values, family) })
            .collect();
        if fits.iter().all(|f| f.result.is_err()) {
            return Err(Error::AllFitsFailed { start_year: window.start_year });
        }
        let gumbel = fits[Family::Gumbel.index()].result.clone()?;

        let selected = match spec.family_policy {
            FamilyPolicy::FixedGumbel => gumbel.fit.distribution,
            FamilyPolicy::BestAic => {
                let mut best: Option<&FamilyFit> = None;
                for f in fits.iter().filter_map(FamilyOutcome::usable) {
                    if best.is_none_or(|b| f.aic.value < b.aic.value) {
                        best = Some(f);
                    }
                }
                best.map(|b| b.fit.distribution).unwrap_or(gumbel.fit.distribution)
            }
            FamilyPolicy::GumbelKnownScale(beta) => fit_gumbel_known_scale(values, beta)?.distribution,
        };
        let quantiles = spec
            .probabilities
            .iter()
            .map(|&p| selected.exceedance_quantile(p).map(|x| (p, x)))
            .collect::<Result<Vec<_>>>()?;
        let (location_alpha, scale_beta) = match selected {
            Distribution::Gumbel { location, scale } => (location, scale),
            _ => gumbel.fit.params(),
        };
        let covariates = covariates
            .iter()
            .map(|c| (c.name.clone(), c.windowed(&window.years)))
            .collect();

        Ok(WindowResult {
            start_year: window.start_year,
            years: window.years.clone(),
            values: values.clone(),
            screening,
            fits,
            selected_family: selected.family(),
            selected,
            quantiles,
            location_alpha,
            scale_beta,
            covariates,
        })
    }
}

/// Standalone analysis of one window. Prefer [`WindowAnalyzer`] when many
/// windows share a spec.
pub fn analyze_window(window: &Window, spec: &WindowSpec, covariates: &[Covariate]) -> Result<WindowResult> {
    WindowAnalyzer::new(spec.clone())?.analyze(window, covariates)
}

/// Per-family aggregates across a scan's windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySummary {
    pub family: Family,
    /// Windows in which the family was fitted successfully.
    pub fitted_windows: usize,
    pub max_ks: Option<f64>,
    pub ks_failures: usize,
    pub mean_aic: Option<f64>,
    /// Windows where this family alone attains the lowest AIC.
    pub lowest_aic_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub station_id: String,
    pub windows: Vec<WindowResult>,
    pub summary: Vec<FamilySummary>,
}

impl ScanResult {
    /// Assembles a scan from windows already analysed in order, e.g. in parallel.
    pub fn from_windows(station_id: impl Into<String>, windows: Vec<WindowResult>) -> Self {
        let mut summary: Vec<FamilySummary> = Family::ALL
            .iter()
            .map(|&family| FamilySummary {
                family,
                fitted_windows: 0,
                max_ks: None,
                ks_failures: 0,
                mean_aic: None,
                lowest_aic_count: 0,
            })
            .collect();
        let mut aic_sums = [0.0f64; 4];
        for w in &windows {
            for outcome in &w.fits {
                if let Some(f) = outcome.usable() {
                    let s = &mut summary[outcome.family.index()];
                    s.fitted_windows += 1;
                    s.max_ks = Some(s.max_ks.map_or(f.ks.statistic, |m| m.max(f.ks.statistic)));
                    if !f.ks.passed {
                        s.ks_failures += 1;
                    }
                    aic_sums[outcome.family.index()] += f.aic.value;
                }
            }
            if let Some(family) = strict_aic_winner(&w.fits) {
                summary[family.index()].lowest_aic_count += 1;
            }
        }
        for (s, total) in summary.iter_mut().zip(aic_sums) {
            if s.fitted_windows > 0 {
                s.mean_aic = Some(total / s.fitted_windows as f64);
            }
        }
        Self { station_id: station_id.into(), windows, summary }
    }

    pub fn family_summary(&self, family: Family) -> &FamilySummary {
        &self.summary[family.index()]
    }

    pub fn covariate_series(&self, name: &str) -> Vec<Option<f64>> {
        self.windows.iter().map(|w| w.covariate(name)).collect()
    }
}

fn strict_aic_winner(fits: &[FamilyOutcome]) -> Option<Family> {
    let mut best: Option<(Family, f64)> = None;
    let mut tied = false;
    for outcome in fits {
        if let Some(f) = outcome.usable() {
            match best {
                None => best = Some((outcome.family, f.aic.value)),
                Some((_, v)) if f.aic.value < v => {
                    best = Some((outcome.family, f.aic.value));
                    tied = false;
                }
                Some((_, v)) if f.aic.value == v => tied = true,
                _ => {}
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(f, _)| f)
    }
}

/// Analyses every window of `series` in order.
pub fn scan(series: &AnnualSeries, spec: &WindowSpec, covariates: &[Covariate]) -> Result<ScanResult> {
    let analyzer = WindowAnalyzer::new(spec.clone())?;
    let windows = make_windows(series, spec)?
        .iter()
        .map(|w| analyzer.analyze(w, covariates))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::from_windows(series.station_id(), windows))
}
