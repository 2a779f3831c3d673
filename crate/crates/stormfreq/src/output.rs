//! CSV tables. Column order is fixed; numbers use fixed precision: cm to
//! 0.1, mm/yr to 0.01, R² to 0.01, D_max to 0.001, AIC to 0.1, and
//! exceedance probabilities as configured.

use std::fmt::Write as _;

use stormfreq_core::{
    CorrelationRow, Family, PlottingPosition, ScanResult, TrendRow, TestVerdict, WindowResult,
};

pub const WINDOWS_FILE: &str = "windows.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRENDS_FILE: &str = "trends.csv";
pub const CORRELATIONS_FILE: &str = "correlations.csv";

/// Covariates always present as columns in `windows.csv`, blank when absent.
pub const COVARIATE_COLUMNS: [&str; 2] = ["msl", "nao"];

/// Marks rows that are not significant.
pub const NOT_SIGNIFICANT: &str = "*";

pub fn cm(x: f64) -> String {
    format!("{x:.1}")
}

pub fn mm_per_year(x: f64) -> String {
    format!("{x:.2}")
}

pub fn r2(x: f64) -> String {
    format!("{x:.2}")
}

pub fn dmax(x: f64) -> String {
    format!("{x:.3}")
}

pub fn aic(x: f64) -> String {
    format!("{x:.1}")
}

pub fn statistic(x: f64) -> String {
    format!("{x:.2}")
}

fn verdict(v: &TestVerdict) -> &'static str {
    if v.passed {
        "pass"
    } else {
        "fail"
    }
}

fn star(significant: bool) -> &'static str {
    if significant {
        ""
    } else {
        NOT_SIGNIFICANT
    }
}

fn optional(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

pub fn windows_header(probabilities: &[f64]) -> String {
    let mut cols = vec!["station".to_string(), "start_year".into(), "end_year".into()];
    cols.extend(probabilities.iter().map(|p| format!("x_{p}")));
    cols.extend(["alpha", "beta", "selected", "runs_z", "runs", "stationarity_t", "stationarity"].map(String::from));
    for prefix in ["dmax", "aic"] {
        cols.extend(Family::ALL.iter().map(|f| format!("{prefix}_{}", f.name())));
    }
    cols.extend(COVARIATE_COLUMNS.map(String::from));
    cols.join(",")
}

fn window_row(station: &str, w: &WindowResult) -> String {
    let mut cols = vec![station.to_string(), w.start_year.to_string(), w.end_year().to_string()];
    cols.extend(w.quantiles.iter().map(|&(_, x)| cm(x)));
    cols.push(cm(w.location_alpha));
    cols.push(cm(w.scale_beta));
    cols.push(w.selected_family.name().to_string());
    cols.push(statistic(w.screening.runs.statistic));
    cols.push(verdict(&w.screening.runs).into());
    cols.push(statistic(w.screening.stationarity.statistic));
    cols.push(verdict(&w.screening.stationarity).into());
    cols.extend(w.fits.iter().map(|o| optional(o.usable().map(|f| f.ks.statistic), dmax)));
    cols.extend(w.fits.iter().map(|o| optional(o.usable().map(|f| f.aic.value), aic)));
    // msl in cm, nao is a dimensionless index
    cols.push(optional(w.covariate("msl"), cm));
    cols.push(optional(w.covariate("nao"), statistic));
    cols.join(",")
}

pub fn windows_csv(scans: &[ScanResult], probabilities: &[f64]) -> String {
    let mut out = windows_header(probabilities);
    out.push('\n');
    for scan in scans {
        for w in &scan.windows {
            out.push_str(&window_row(&scan.station_id, w));
            out.push('\n');
        }
    }
    out
}

pub const SUMMARY_HEADER: &str = "station,family,fitted_windows,max_dmax,ks_failures,mean_aic,lowest_aic_count";

pub fn summary_csv(scans: &[ScanResult]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for scan in scans {
        for s in &scan.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                scan.station_id,
                s.family.name(),
                s.fitted_windows,
                optional(s.max_ks, dmax),
                s.ks_failures,
                optional(s.mean_aic, aic),
                s.lowest_aic_count
            );
        }
    }
    out
}

pub const TRENDS_HEADER: &str = "station,target,trend_mm_per_yr,se_mm_per_yr,t,flag";

pub fn trends_csv(tables: &[(String, Vec<TrendRow>)]) -> String {
    let mut out = format!("{TRENDS_HEADER}\n");
    for (station, rows) in tables {
        for row in rows {
            let t = &row.trend;
            let _ = writeln!(
                out,
                "{station},{},{},{},{},{}",
                row.target.label(),
                mm_per_year(t.slope),
                mm_per_year(t.slope_se),
                statistic(t.t_statistic),
                star(t.significant)
            );
        }
    }
    out
}

pub const CORRELATIONS_HEADER: &str = "station,covariate,target,r2,flag,n";

pub fn correlations_csv(tables: &[(String, Vec<CorrelationRow>)]) -> String {
    let mut out = format!("{CORRELATIONS_HEADER}\n");
    for (station, rows) in tables {
        for row in rows {
            let s = &row.stats;
            let _ = writeln!(
                out,
                "{station},{},{},{},{},{}",
                row.covariate,
                row.target.label(),
                r2(s.r_squared),
                star(s.significant),
                s.n
            );
        }
    }
    out
}

pub const PLOT_HEADER: &str = "p,empirical,theoretical";

/// Plotting positions with the fitted quantile at the same probability,
/// ascending in `p`.
pub fn plot_csv(points: &[PlottingPosition], theoretical: &[f64]) -> String {
    let mut rows: Vec<(f64, f64, f64)> =
        points.iter().zip(theoretical).map(|(pp, &x)| (pp.exceedance_p, pp.value, x)).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = format!("{PLOT_HEADER}\n");
    for (p, v, x) in rows {
        let _ = writeln!(out, "{p:.6},{},{}", cm(v), cm(x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_precision() {
        assert_eq!(cm(612.349), "612.3");
        assert_eq!(mm_per_year(2.9), "2.90");
        assert_eq!(r2(0.456), "0.46");
        assert_eq!(dmax(0.1344), "0.134");
        assert_eq!(aic(401.26), "401.3");
    }

    #[test]
    fn header_lists_probabilities_as_given() {
        let h = windows_header(&[0.001, 0.5]);
        assert!(h.starts_with("station,start_year,end_year,x_0.001,x_0.5,alpha,beta,selected,"));
        assert!(h.ends_with("aic_weibull,msl,nao"));
    }
}
