//! The work behind each subcommand, kept apart from argument parsing so the
//! tests can drive it directly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use stormfreq_core::distfit::fit_gumbel_known_scale;
use stormfreq_core::{
    aic, annual_max_of_monthly, covariate_correlation_table, fit_mle, generate as generate_series,
    infill_by_regression, ks_statistic, make_windows, plotting_positions, quantile_trend_table, AnnualSeries,
    Covariate, Distribution, DriftModel, Error as CoreError, Family, Ramp, ScanResult, SeriesKind, WindowAnalyzer,
    WindowSpec,
};

use crate::config::{MeansSource, RunConfig, StationInputs};
use crate::error::{Error, Result};
use crate::output;
use crate::seriesio;

pub struct FitArgs {
    pub file: PathBuf,
    pub family: Family,
    pub alpha: f64,
    /// Known Gumbel scale; only the location is fitted.
    pub known_scale: Option<f64>,
    pub plot: Option<PathBuf>,
}

fn parameter_lines(d: &Distribution) -> [(&'static str, String); 2] {
    let (a, b) = d.params();
    match d {
        Distribution::Gumbel { .. } => [("location", output::cm(a)), ("scale", output::cm(b))],
        Distribution::LogNormal { .. } => [("mu", format!("{a:.4}")), ("sigma", format!("{b:.4}"))],
        Distribution::Gamma { .. } | Distribution::Weibull { .. } => {
            [("shape", format!("{a:.4}")), ("scale", output::cm(b))]
        }
    }
}

/// Fits one family to a sample file. Values are read without the
/// water-level positivity check, so support violations surface as fit
/// failures rather than load failures.
pub fn fit(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let series = seriesio::load_annual_csv(&args.file, SeriesKind::CovariateIndex)?;
    let sample: Vec<f64> = series.values().collect();
    let label = args.file.display().to_string();
    let fitted = match args.known_scale {
        Some(beta) if args.family == Family::Gumbel => fit_gumbel_known_scale(&sample, beta),
        Some(_) => return Err(Error::Config("--known-scale applies to gumbel only".into())),
        None => fit_mle(&sample, args.family),
    }
    .map_err(|e| Error::numerical(&label, e))?;
    if !fitted.converged {
        return Err(Error::numerical(
            &label,
            CoreError::NoConvergence { family: args.family, iterations: fitted.iterations },
        ));
    }
    let ks = ks_statistic(&sample, &fitted, args.alpha).map_err(|e| Error::numerical(&label, e))?;
    let score = aic(&fitted, &sample).map_err(|e| Error::numerical(&label, e))?;

    let mut text = format!("station: {}\nfamily: {}\nn: {}\n", series.station_id(), args.family.name(), sample.len());
    for (name, value) in parameter_lines(&fitted.distribution) {
        text.push_str(&format!("{name}: {value}\n"));
    }
    text.push_str(&format!(
        "log_likelihood: {:.2}\nks_dmax: {}\nks_critical: {}\nks: {}\naic: {}\n",
        fitted.log_likelihood,
        output::dmax(ks.statistic),
        output::dmax(ks.critical_value),
        if ks.passed { "pass" } else { "fail" },
        output::aic(score.value)
    ));
    out.write_all(text.as_bytes()).map_err(|e| Error::io("stdout", e))?;

    if let Some(path) = &args.plot {
        let points = plotting_positions(&sample).map_err(|e| Error::numerical(&label, e))?;
        let theoretical = points
            .iter()
            .map(|pp| fitted.distribution.exceedance_quantile(pp.exceedance_p))
            .collect::<stormfreq_core::Result<Vec<f64>>>()
            .map_err(|e| Error::numerical(&label, e))?;
        write_outputs(path.parent().unwrap_or(Path::new("")), &[(path.clone(), output::plot_csv(&points, &theoretical))])?;
    }
    Ok(())
}

/// Loads one station's maxima, applies its infill directive, and gathers
/// its covariates.
pub fn load_station(config: &RunConfig, station: &StationInputs) -> Result<(AnnualSeries, Vec<Covariate>)> {
    let mut series = seriesio::load_annual_csv(&station.maxima, SeriesKind::AnnualMaximum)?
        .with_station_id(station.name.clone());
    if let Some(directive) = &station.infill {
        let reference = config
            .stations
            .iter()
            .find(|s| s.name == directive.reference)
            .ok_or_else(|| Error::Config(format!("unknown infill reference `{}`", directive.reference)))?;
        let reference = seriesio::load_annual_csv(&reference.maxima, SeriesKind::AnnualMaximum)?;
        let (filled, _) = infill_by_regression(&series, &reference, &directive.years, directive.overlap)
            .map_err(|e| Error::input(format!("infilling {}", station.name), e))?;
        series = filled;
    }
    let mut covariates = Vec::new();
    match &station.means {
        Some(MeansSource::Csv(path)) => {
            covariates.push(Covariate::mean("msl", seriesio::load_annual_csv(path, SeriesKind::AnnualMean)?))
        }
        Some(MeansSource::Psmsl { path, datum_offset_cm }) => {
            covariates.push(Covariate::mean("msl", seriesio::load_psmsl_annual(path, *datum_offset_cm)?))
        }
        None => {}
    }
    if let Some(path) = &config.nao {
        let monthly = seriesio::load_monthly_csv(path)?;
        let annual = annual_max_of_monthly(&monthly).map_err(|e| Error::input(path.display().to_string(), e))?;
        covariates.push(Covariate { name: "nao".into(), series: annual, reduction: config.nao_reduction });
    }
    Ok((series, covariates))
}

/// Window scan with windows analysed in parallel; results keep window order.
pub fn scan_series(series: &AnnualSeries, spec: &WindowSpec, covariates: &[Covariate]) -> Result<ScanResult> {
    let station = series.station_id().to_string();
    let windows = make_windows(series, spec).map_err(|e| Error::input(&station, e))?;
    let analyzer = WindowAnalyzer::new(spec.clone()).map_err(|e| Error::Config(e.to_string()))?;
    let results = windows
        .par_iter()
        .map(|w| analyzer.analyze(w, covariates))
        .collect::<stormfreq_core::Result<Vec<_>>>()
        .map_err(|e| Error::numerical(&station, e))?;
    Ok(ScanResult::from_windows(station, results))
}

pub fn run_scans(config: &RunConfig) -> Result<Vec<ScanResult>> {
    config
        .stations
        .iter()
        .map(|station| {
            let (series, covariates) = load_station(config, station)?;
            scan_series(&series, &config.spec, &covariates)
        })
        .collect()
}

/// Writes every file or none: anything already written is removed when a
/// later write fails.
pub fn write_outputs(dir: &Path, files: &[(PathBuf, String)]) -> Result<Vec<PathBuf>> {
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut written = Vec::new();
    for (path, contents) in files {
        if let Err(e) = fs::write(path, contents) {
            for done in &written {
                let _ = fs::remove_file(done);
            }
            let _ = fs::remove_file(path);
            return Err(Error::io(path, e));
        }
        written.push(path.clone());
    }
    Ok(written)
}

/// Writes `windows.csv`, `summary.csv` and `trends.csv` to the output
/// directory.
pub fn scan(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let scans = run_scans(config)?;
    let mut trends = Vec::new();
    for s in &scans {
        let rows = quantile_trend_table(s, config.spec.alpha).map_err(|e| Error::numerical(&s.station_id, e))?;
        trends.push((s.station_id.clone(), rows));
    }
    let dir = &config.output;
    write_outputs(
        dir,
        &[
            (dir.join(output::WINDOWS_FILE), output::windows_csv(&scans, &config.spec.probabilities)),
            (dir.join(output::SUMMARY_FILE), output::summary_csv(&scans)),
            (dir.join(output::TRENDS_FILE), output::trends_csv(&trends)),
        ],
    )
}

/// Covariates accepted by [`correlate`]. `location` correlates each station
/// with its own fitted location series.
pub const COVARIATES: [&str; 3] = ["msl", "nao", "location"];

/// Writes `correlations.csv` for one covariate across all stations.
pub fn correlate(config: &RunConfig, covariate: &str) -> Result<PathBuf> {
    if !COVARIATES.contains(&covariate) {
        return Err(Error::Config(format!("unknown covariate `{covariate}`, expected one of {COVARIATES:?}")));
    }
    let scans = run_scans(config)?;
    let mut tables = Vec::new();
    for s in &scans {
        let values: Vec<Option<f64>> = if covariate == "location" {
            s.windows.iter().map(|w| Some(w.location_alpha)).collect()
        } else {
            if s.windows.iter().all(|w| w.covariates.iter().all(|(n, _)| n != covariate)) {
                return Err(Error::Config(format!("station `{}` has no `{covariate}` input", s.station_id)));
            }
            s.covariate_series(covariate)
        };
        let rows = covariate_correlation_table(s, &values, covariate, config.spec.alpha).map_err(|e| match e {
            CoreError::InsufficientPairs { .. } | CoreError::ConstantInput => {
                Error::input(format!("{} against {covariate}", s.station_id), e)
            }
            other => Error::numerical(&s.station_id, other),
        })?;
        tables.push((s.station_id.clone(), rows));
    }
    let path = config.output.join(output::CORRELATIONS_FILE);
    write_outputs(&config.output, &[(path.clone(), output::correlations_csv(&tables))])?;
    Ok(path)
}

pub struct GenerateArgs {
    pub station: String,
    pub kind: SeriesKind,
    pub family: Family,
    pub param1: Ramp,
    pub param2: Ramp,
    pub first_year: i32,
    pub last_year: i32,
    pub seed: u64,
    pub gaps: Vec<i32>,
}

pub fn generate(args: &GenerateArgs) -> Result<AnnualSeries> {
    let model = DriftModel {
        station_id: args.station.clone(),
        kind: args.kind,
        family: args.family,
        param1: args.param1,
        param2: args.param2,
        first_year: args.first_year,
        last_year: args.last_year,
        seed: args.seed,
        gap_years: args.gaps.clone(),
    };
    generate_series(&model).map_err(|e| match e {
        CoreError::NonPositiveValue { .. } => Error::numerical("generated draw outside the series kind", e),
        other => Error::input("generator parameters", other),
    })
}

pub struct InfillArgs {
    pub target: PathBuf,
    pub reference: PathBuf,
    pub years: Vec<i32>,
    pub overlap: Option<(i32, i32)>,
    pub kind: SeriesKind,
}

pub fn infill(args: &InfillArgs, report_out: &mut dyn Write) -> Result<AnnualSeries> {
    let target = seriesio::load_annual_csv(&args.target, args.kind)?;
    let reference = seriesio::load_annual_csv(&args.reference, args.kind)?;
    let (filled, report) = infill_by_regression(&target, &reference, &args.years, args.overlap)
        .map_err(|e| Error::input("infill", e))?;
    let years: Vec<String> = report.filled_years.iter().map(i32::to_string).collect();
    let text = format!(
        "filled: {}\nslope: {:.4}\nintercept: {}\nr2: {}\noverlap_years: {}\n",
        years.join(","),
        report.regression_slope,
        output::cm(report.regression_intercept),
        output::r2(report.r_squared_of_fit),
        report.overlap
    );
    report_out.write_all(text.as_bytes()).map_err(|e| Error::io("stderr", e))?;
    Ok(filled)
}
