#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stormfreq::core::{generate, AnnualSeries, DriftModel};
use stormfreq::seriesio::save_annual_csv;

/// Name, observed year ranges, expected window count.
type Station = (&'static str, &'static [(i32, i32)], usize);

pub const STATIONS: [Station; 3] = [
    ("swinoujscie", &[(1901, 1944), (1947, 2007)], 66),
    ("kolobrzeg", &[(1867, 1943), (1946, 2007)], 100),
    ("gdansk", &[(1886, 1939), (1946, 2007)], 77),
];

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stormfreq"));
    cmd.env_remove("STORMFREQ_OUT");
    cmd
}

pub fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn stormfreq")
}

pub fn station_series(coverage: &[(i32, i32)], seed: u64) -> AnnualSeries {
    let first = coverage[0].0;
    let last = coverage[coverage.len() - 1].1;
    let mut model = DriftModel::stationary_gumbel(550.0, 45.0, first, last, seed);
    model.gap_years = (first..=last).filter(|y| !coverage.iter().any(|&(a, b)| (a..=b).contains(y))).collect();
    generate(&model).unwrap()
}

/// Three stations with the historical year coverage and seeded synthetic
/// values, plus a config file that scans them.
pub fn write_fixture(dir: &Path) -> PathBuf {
    let mut config = String::from("output = out\n");
    for (i, (name, coverage, _)) in STATIONS.iter().enumerate() {
        let series = station_series(coverage, 100 + i as u64);
        let file = format!("{name}_max.csv");
        save_annual_csv(dir.join(&file), &series).unwrap();
        let _ = writeln!(config, "maxima.{name} = {file}");
    }
    let path = dir.join("run.conf");
    fs::write(&path, config).unwrap();
    path
}

pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}
