//! Non-stationary frequency analysis of annual maximum water levels.
//!
//! The crate fits four candidate distributions (gamma, log-normal, Gumbel,
//! Weibull) by maximum likelihood inside overlapping fixed-length windows of
//! an annual series, screens each window for independence and stationarity,
//! compares the families with Kolmogorov-Smirnov and AIC, and turns the
//! per-window exceedance quantiles into linear trends and covariate
//! correlations.
//!
//! Everything here is pure computation over in-memory series and builds
//! under `no_std` with `alloc`. File formats, configuration, and the command
//! line front end live in the `stormfreq` crate.
//!
//! Units: water levels are centimetres above a datum. Trends are reported in
//! millimetres per year. Probabilities are annual exceedance probabilities
//! unless a function says otherwise.

#![no_std]

extern crate alloc;

pub mod distfit;
pub mod error;
pub mod series;
pub mod special;
pub mod stattests;
pub mod synthgen;
pub mod trendcorr;
pub mod windowscan;

pub use crate::distfit::{
    fit_gumbel_known_scale, fit_mle, plotting_positions, Distribution, Family, FittedDistribution,
    PlottingPosition,
};
pub use crate::error::{Error, Result};
pub use crate::series::{
    annual_max_of_monthly, infill_by_regression, AnnualSeries, InfillReport, MonthlyObservation,
    MonthlySeries, Observation, SeriesKind,
};
pub use crate::stattests::{
    aic, ks_statistic, runs_test, spearman_rho, stationarity_t_test, AicScore, TestVerdict,
};
pub use crate::synthgen::{generate, DriftModel, Ramp, Sampler};
pub use crate::trendcorr::{
    covariate_correlation_table, linear_trend, quantile_trend_table, r_squared, CorrelationRow,
    CorrelationStats, TrendResult, TrendRow, TrendTarget,
};
pub use crate::windowscan::{
    analyze_window, make_windows, scan, Covariate, CovariateReduction, FamilyFit, FamilyOutcome,
    FamilyPolicy, FamilySummary, ScanResult, Screening, Window, WindowAnalyzer, WindowResult,
    WindowSpec,
};
