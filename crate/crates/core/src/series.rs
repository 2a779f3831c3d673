//! Annual and monthly series, regression infilling, and annual maxima of
//! monthly covariates.
//!
//! Gaps are represented by absence: a year with no observation is simply not
//! in the list. Windowing downstream works on the gap-collapsed sequence.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    AnnualMaximum,
    AnnualMean,
    CovariateIndex,
}

impl SeriesKind {
    /// Water-level kinds are expressed above a datum and must stay positive.
    pub fn requires_positive(self) -> bool {
        matches!(self, SeriesKind::AnnualMaximum | SeriesKind::AnnualMean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub year: i32,
    /// cm above datum for water levels; dimensionless for covariate indices
    pub value: f64,
}

impl Observation {
    pub fn new(year: i32, value: f64) -> Self {
        Self { year, value }
    }
}

/// A station's calendar-year observations, strictly increasing in year.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    station_id: String,
    kind: SeriesKind,
    observations: Vec<Observation>,
}

impl AnnualSeries {
    pub fn new(
        station_id: impl Into<String>,
        kind: SeriesKind,
        observations: Vec<Observation>,
    ) -> Result<Self> {
        for pair in observations.windows(2) {
            let (a, b) = (pair[0].year, pair[1].year);
            if a == b {
                return Err(Error::DuplicateYear(a));
            }
            if b < a {
                return Err(Error::UnorderedYears { previous: a, next: b });
            }
        }
        for obs in &observations {
            if !obs.value.is_finite() {
                return Err(Error::NonFiniteValue { year: obs.year });
            }
            if kind.requires_positive() && obs.value <= 0.0 {
                return Err(Error::NonPositiveValue { year: obs.year, value: obs.value });
            }
        }
        Ok(Self { station_id: station_id.into(), kind, observations })
    }

    /// Sorts by year before validating; duplicates are still rejected.
    pub fn from_unsorted(
        station_id: impl Into<String>,
        kind: SeriesKind,
        mut observations: Vec<Observation>,
    ) -> Result<Self> {
        observations.sort_by_key(|o| o.year);
        Self::new(station_id, kind, observations)
    }

    pub fn station_id(&self) -> &str {
        &self.station_id
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.observations.iter().map(|o| o.year)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.value)
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        self.observations
            .binary_search_by_key(&year, |o| o.year)
            .ok()
            .map(|i| self.observations[i].value)
    }

    pub fn first_year(&self) -> Option<i32> {
        self.observations.first().map(|o| o.year)
    }

    pub fn last_year(&self) -> Option<i32> {
        self.observations.last().map(|o| o.year)
    }

    pub fn with_station_id(mut self, station_id: impl Into<String>) -> Self {
        self.station_id = station_id.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlyObservation {
    pub year: i32,
    /// 1..=12
    pub month: u8,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    label: String,
    observations: Vec<MonthlyObservation>,
}

impl MonthlySeries {
    pub fn new(label: impl Into<String>, observations: Vec<MonthlyObservation>) -> Result<Self> {
        for obs in &observations {
            if !(1..=12).contains(&obs.month) {
                return Err(Error::InvalidMonth { year: obs.year, month: obs.month });
            }
            if !obs.value.is_finite() {
                return Err(Error::NonFiniteValue { year: obs.year });
            }
        }
        for pair in observations.windows(2) {
            let a = (pair[0].year, pair[0].month);
            let b = (pair[1].year, pair[1].month);
            if a == b {
                return Err(Error::DuplicateMonth { year: a.0, month: a.1 });
            }
            if b < a {
                return Err(Error::UnorderedYears { previous: a.0, next: b.0 });
            }
        }
        Ok(Self { label: label.into(), observations })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn observations(&self) -> &[MonthlyObservation] {
        &self.observations
    }
}

/// Outcome of [`infill_by_regression`].
#[derive(Debug, Clone, PartialEq)]
pub struct InfillReport {
    pub filled_years: Vec<i32>,
    pub regression_slope: f64,
    pub regression_intercept: f64,
    pub r_squared_of_fit: f64,
    /// Number of overlapping years the regression used.
    pub overlap: usize,
}

pub const MIN_INFILL_OVERLAP: usize = 10;

/// Fills missing target years from a reference station by ordinary least
/// squares, `target = a + b * reference`, fitted on the years both series
/// share. `overlap` restricts the fitting years to an inclusive range.
pub fn infill_by_regression(
    target: &AnnualSeries,
    reference: &AnnualSeries,
    years_to_fill: &[i32],
    overlap: Option<(i32, i32)>,
) -> Result<(AnnualSeries, InfillReport)> {
    if target.kind != reference.kind {
        return Err(Error::KindMismatch);
    }
    let in_window = |year: i32| overlap.is_none_or(|(lo, hi)| year >= lo && year <= hi);
    let pairs: Vec<(f64, f64)> = target
        .observations
        .iter()
        .filter(|o| in_window(o.year))
        .filter_map(|o| reference.value_at(o.year).map(|r| (r, o.value)))
        .collect();
    if pairs.len() < MIN_INFILL_OVERLAP {
        return Err(Error::InsufficientOverlap {
            found: pairs.len(),
            required: MIN_INFILL_OVERLAP,
        });
    }
    for &year in years_to_fill {
        if target.value_at(year).is_some() {
            return Err(Error::YearAlreadyPresent(year));
        }
        if reference.value_at(year).is_none() {
            return Err(Error::MissingReferenceYear(year));
        }
    }

    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pairs {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantInput);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };

    let mut observations = target.observations.clone();
    let mut filled_years: Vec<i32> = years_to_fill.to_vec();
    filled_years.sort_unstable();
    filled_years.dedup();
    for &year in &filled_years {
        let x = reference.value_at(year).ok_or(Error::MissingReferenceYear(year))?;
        observations.push(Observation::new(year, intercept + slope * x));
    }
    let filled = AnnualSeries::from_unsorted(target.station_id.clone(), target.kind, observations)?;
    let report = InfillReport {
        filled_years,
        regression_slope: slope,
        regression_intercept: intercept,
        r_squared_of_fit: r_squared,
        overlap: pairs.len(),
    };
    Ok((filled, report))
}

/// Reduces a monthly index to one value per calendar year: the largest
/// monthly value (which may be negative when every month is).
pub fn annual_max_of_monthly(monthly: &MonthlySeries) -> Result<AnnualSeries> {
    if monthly.observations.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out: Vec<Observation> = Vec::new();
    for obs in &monthly.observations {
        match out.last_mut() {
            Some(last) if last.year == obs.year => {
                if obs.value > last.value {
                    last.value = obs.value;
                }
            }
            _ => out.push(Observation::new(obs.year, obs.value)),
        }
    }
    AnnualSeries::new(monthly.label.clone(), SeriesKind::CovariateIndex, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn series(kind: SeriesKind, rows: &[(i32, f64)]) -> AnnualSeries {
        let obs = rows.iter().map(|&(y, v)| Observation::new(y, v)).collect();
        AnnualSeries::new("t", kind, obs).unwrap()
    }

    #[test]
    fn rejects_duplicates_and_bad_values() {
        let dup = vec![Observation::new(2000, 550.0), Observation::new(2000, 560.0)];
        assert_eq!(
            AnnualSeries::new("s", SeriesKind::AnnualMaximum, dup).unwrap_err(),
            Error::DuplicateYear(2000)
        );
        let zero = vec![Observation::new(2000, 0.0)];
        assert!(matches!(
            AnnualSeries::new("s", SeriesKind::AnnualMean, zero.clone()),
            Err(Error::NonPositiveValue { .. })
        ));
        assert!(AnnualSeries::new("s", SeriesKind::CovariateIndex, zero).is_ok());
        let nan = vec![Observation::new(2000, f64::NAN)];
        assert!(matches!(
            AnnualSeries::new("s", SeriesKind::CovariateIndex, nan),
            Err(Error::NonFiniteValue { year: 2000 })
        ));
    }

    #[test]
    fn identity_infill() {
        let rows: Vec<(i32, f64)> = (1900..1950).map(|y| (y, 500.0 + (y % 7) as f64)).collect();
        let reference = series(SeriesKind::AnnualMean, &rows);
        let target_rows: Vec<(i32, f64)> =
            rows.iter().copied().filter(|&(y, _)| y != 1941).collect();
        let target = series(SeriesKind::AnnualMean, &target_rows);
        let (filled, report) = infill_by_regression(&target, &reference, &[1941], None).unwrap();
        assert_eq!(filled.len(), 50);
        assert!((filled.value_at(1941).unwrap() - reference.value_at(1941).unwrap()).abs() < 1e-9);
        assert!(report.regression_intercept.abs() < 1e-9);
        assert!((report.regression_slope - 1.0).abs() < 1e-12);
        assert!((report.r_squared_of_fit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_infill() {
        let reference_rows: Vec<(i32, f64)> =
            (1900..1960).map(|y| (y, 80.0 + ((y * 37) % 41) as f64)).collect();
        let mut reference_rows = reference_rows;
        reference_rows.retain(|&(y, _)| y != 1941);
        reference_rows.push((1941, 100.0));
        reference_rows.sort_by_key(|r| r.0);
        let reference = series(SeriesKind::AnnualMean, &reference_rows);
        let target_rows: Vec<(i32, f64)> = reference_rows
            .iter()
            .filter(|&&(y, _)| y != 1941)
            .map(|&(y, v)| (y, 2.0 * v + 30.0))
            .collect();
        let target = series(SeriesKind::AnnualMean, &target_rows);
        let (filled, report) = infill_by_regression(&target, &reference, &[1941], None).unwrap();
        assert!((filled.value_at(1941).unwrap() - 230.0).abs() < 1e-9);
        assert_eq!(report.filled_years, vec![1941]);
    }

    #[test]
    fn infill_errors() {
        let rows: Vec<(i32, f64)> = (1900..1905).map(|y| (y, 500.0 + y as f64)).collect();
        let a = series(SeriesKind::AnnualMean, &rows);
        assert!(matches!(
            infill_by_regression(&a, &a, &[], None),
            Err(Error::InsufficientOverlap { found: 5, .. })
        ));
        let long: Vec<(i32, f64)> = (1900..1930).map(|y| (y, 500.0 + (y % 5) as f64)).collect();
        let b = series(SeriesKind::AnnualMean, &long);
        assert_eq!(
            infill_by_regression(&b, &b, &[1950], None).unwrap_err(),
            Error::MissingReferenceYear(1950)
        );
        assert_eq!(
            infill_by_regression(&b, &b, &[1905], None).unwrap_err(),
            Error::YearAlreadyPresent(1905)
        );
        let c = series(SeriesKind::AnnualMaximum, &long);
        assert_eq!(infill_by_regression(&b, &c, &[], None).unwrap_err(), Error::KindMismatch);
    }

    #[test]
    fn infill_overlap_window_limits_fit() {
        let rows: Vec<(i32, f64)> = (1900..1960).map(|y| (y, 400.0 + (y % 9) as f64)).collect();
        let reference = series(SeriesKind::AnnualMean, &rows);
        // target follows reference + 10 before 1930 and + 50 afterwards
        let target_rows: Vec<(i32, f64)> = rows
            .iter()
            .filter(|&&(y, _)| y != 1925)
            .map(|&(y, v)| (y, if y < 1930 { v + 10.0 } else { v + 50.0 }))
            .collect();
        let target = series(SeriesKind::AnnualMean, &target_rows);
        let (filled, report) =
            infill_by_regression(&target, &reference, &[1925], Some((1900, 1929))).unwrap();
        assert_eq!(report.overlap, 29);
        assert!((filled.value_at(1925).unwrap() - reference.value_at(1925).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn annual_max_examples() {
        let months = [-1.2, 0.3, 2.1, 0.5, -0.4, 1.0, 1.9, 0.0, -2.0, 0.7, 1.1, 2.0];
        let obs = months
            .iter()
            .enumerate()
            .map(|(i, &v)| MonthlyObservation { year: 1950, month: i as u8 + 1, value: v })
            .collect();
        let m = MonthlySeries::new("nao", obs).unwrap();
        let out = annual_max_of_monthly(&m).unwrap();
        assert_eq!(out.observations(), &[Observation::new(1950, 2.1)]);
        assert_eq!(out.kind(), SeriesKind::CovariateIndex);

        let single = MonthlySeries::new(
            "nao",
            vec![MonthlyObservation { year: 1960, month: 7, value: -0.5 }],
        )
        .unwrap();
        assert_eq!(
            annual_max_of_monthly(&single).unwrap().observations(),
            &[Observation::new(1960, -0.5)]
        );
        let empty = MonthlySeries::new("nao", Vec::new()).unwrap();
        assert_eq!(annual_max_of_monthly(&empty).unwrap_err(), Error::EmptySeries);
    }

    #[test]
    fn monthly_validation() {
        let bad = vec![MonthlyObservation { year: 1950, month: 13, value: 0.0 }];
        assert!(matches!(MonthlySeries::new("x", bad), Err(Error::InvalidMonth { .. })));
        let dup = vec![
            MonthlyObservation { year: 1950, month: 2, value: 0.0 },
            MonthlyObservation { year: 1950, month: 2, value: 1.0 },
        ];
        assert!(matches!(MonthlySeries::new("x", dup), Err(Error::DuplicateMonth { .. })));
    }
}
