//! Run configuration: a flat `key = value` file, `#` starts a comment.
//!
//! ```text
//! output = results
//! window = 40
//! alpha = 0.05
//! probabilities = 0.001, 0.01, 0.1, 0.5, 0.99
//! family = gumbel              # gumbel | best-aic | gumbel-known-scale
//! known_scale = 30             # cm, for gumbel-known-scale
//! nao = nao_monthly.csv
//! nao_reduction = mean         # mean | max
//!
//! maxima.kolobrzeg = kolobrzeg_max.csv
//! means.kolobrzeg = kolobrzeg_msl.csv
//! psmsl.gdansk = gdansk.rlrdata      # instead of means.<station>
//! datum_offset.gdansk = -200          # cm, added after mm -> cm
//! infill_reference.kolobrzeg = swinoujscie
//! infill_years.kolobrzeg = 1941-1943
//! infill_overlap.kolobrzeg = 1901-1940
//! ```
//!
//! Relative paths are resolved against the config file's directory. Command
//! line flags override the file; the `STORMFREQ_OUT` environment variable
//! overrides only `output`, and a flag still wins over it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use stormfreq_core::{CovariateReduction, FamilyPolicy, WindowSpec};

use crate::error::{Error, Result};

pub const OUTPUT_ENV: &str = "STORMFREQ_OUT";

#[derive(Debug, Clone, PartialEq)]
pub enum MeansSource {
    Csv(PathBuf),
    Psmsl { path: PathBuf, datum_offset_cm: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfillDirective {
    /// Name of another configured station.
    pub reference: String,
    pub years: Vec<i32>,
    pub overlap: Option<(i32, i32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationInputs {
    pub name: String,
    pub maxima: PathBuf,
    pub means: Option<MeansSource>,
    pub infill: Option<InfillDirective>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// In the order they first appear.
    pub stations: Vec<StationInputs>,
    pub nao: Option<PathBuf>,
    pub nao_reduction: CovariateReduction,
    pub spec: WindowSpec,
    pub output: PathBuf,
}

/// Values given on the command line; `None` leaves the file's value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    pub probabilities: Option<String>,
    pub family: Option<String>,
    pub known_scale: Option<f64>,
    pub nao: Option<PathBuf>,
    pub nao_reduction: Option<String>,
    /// `station=path` pairs.
    pub maxima: Vec<String>,
    pub means: Vec<String>,
}

/// Key/value pairs in file order with their line numbers.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string(), i + 1));
    }
    Ok(pairs)
}

pub fn parse_year_list(text: &str) -> Result<Vec<i32>> {
    let mut years = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match parse_year_range(part) {
            Ok((a, b)) => years.extend(a..=b),
            Err(_) => years.push(part.parse().map_err(|_| Error::Config(format!("bad year `{part}`")))?),
        }
    }
    Ok(years)
}

pub fn parse_year_range(text: &str) -> Result<(i32, i32)> {
    let bad = || Error::Config(format!("bad year range `{text}`"));
    let (a, b) = text.trim().split_once('-').ok_or_else(bad)?;
    let (a, b): (i32, i32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b < a {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_probabilities(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("bad probability `{s}`"))))
        .collect()
}

pub fn parse_family_policy(name: &str, known_scale: Option<f64>) -> Result<FamilyPolicy> {
    match name {
        "gumbel" => Ok(FamilyPolicy::FixedGumbel),
        "best-aic" => Ok(FamilyPolicy::BestAic),
        "gumbel-known-scale" => known_scale
            .map(FamilyPolicy::GumbelKnownScale)
            .ok_or_else(|| Error::Config("gumbel-known-scale needs known_scale".into())),
        other => Err(Error::Config(format!("unknown family policy `{other}`"))),
    }
}

pub fn parse_reduction(name: &str) -> Result<CovariateReduction> {
    match name {
        "mean" => Ok(CovariateReduction::Mean),
        "max" => Ok(CovariateReduction::Maximum),
        other => Err(Error::Config(format!("unknown reduction `{other}`"))),
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: bad number `{value}`")))
}

fn split_assignment(text: &str) -> Result<(String, PathBuf)> {
    let (station, path) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected station=path, got `{text}`")))?;
    Ok((station.trim().to_string(), PathBuf::from(path.trim())))
}

#[derive(Default)]
struct StationDraft {
    maxima: Option<PathBuf>,
    means: Option<PathBuf>,
    psmsl: Option<PathBuf>,
    datum_offset: f64,
    infill_reference: Option<String>,
    infill_years: Option<Vec<i32>>,
    infill_overlap: Option<(i32, i32)>,
}

impl RunConfig {
    /// Reads `config` if given, then applies the environment and flags.
    pub fn resolve(config: Option<&Path>, env_output: Option<PathBuf>, overrides: &Overrides) -> Result<Self> {
        let (pairs, base) = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                (parse_pairs(&text)?, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (Vec::new(), PathBuf::new()),
        };
        Self::from_pairs(&pairs, &base, env_output, overrides)
    }

    pub fn from_pairs(
        pairs: &[(String, String, usize)],
        base: &Path,
        env_output: Option<PathBuf>,
        overrides: &Overrides,
    ) -> Result<Self> {
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_relative() { base.join(p) } else { p }
        };
        let mut order: Vec<String> = Vec::new();
        let mut drafts: BTreeMap<String, StationDraft> = BTreeMap::new();
        let mut output = PathBuf::from("stormfreq-out");
        let mut spec = WindowSpec::default();
        let mut family = String::from("gumbel");
        let mut known_scale = None;
        let mut nao = None;
        let mut nao_reduction = CovariateReduction::Mean;

        for (key, value, line) in pairs {
            let at = |e: Error| match e {
                Error::Config(m) => Error::Config(format!("line {line}: {m}")),
                other => other,
            };
            if let Some((field, station)) = key.split_once('.') {
                if !order.contains(&station.to_string()) {
                    order.push(station.to_string());
                }
                let d = drafts.entry(station.to_string()).or_default();
                match field {
                    "maxima" => d.maxima = Some(resolve(value)),
                    "means" => d.means = Some(resolve(value)),
                    "psmsl" => d.psmsl = Some(resolve(value)),
                    "datum_offset" => d.datum_offset = number(key, value).map_err(at)?,
                    "infill_reference" => d.infill_reference = Some(value.clone()),
                    "infill_years" => d.infill_years = Some(parse_year_list(value).map_err(at)?),
                    "infill_overlap" => d.infill_overlap = Some(parse_year_range(value).map_err(at)?),
                    _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
                }
                continue;
            }
            match key.as_str() {
                "output" => output = resolve(value),
                "window" => spec.length = number(key, value).map_err(at)?,
                "alpha" => spec.alpha = number(key, value).map_err(at)?,
                "probabilities" => spec.probabilities = parse_probabilities(value).map_err(at)?,
                "family" => family = value.clone(),
                "known_scale" => known_scale = Some(number(key, value).map_err(at)?),
                "nao" => nao = Some(resolve(value)),
                "nao_reduction" => nao_reduction = parse_reduction(value).map_err(at)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            }
        }

        if let Some(dir) = env_output {
            output = dir;
        }
        if let Some(dir) = &overrides.output {
            output = dir.clone();
        }
        if let Some(n) = overrides.window {
            spec.length = n;
        }
        if let Some(a) = overrides.alpha {
            spec.alpha = a;
        }
        if let Some(p) = &overrides.probabilities {
            spec.probabilities = parse_probabilities(p)?;
        }
        if let Some(f) = &overrides.family {
            family = f.clone();
        }
        if overrides.known_scale.is_some() {
            known_scale = overrides.known_scale;
        }
        if let Some(path) = &overrides.nao {
            nao = Some(path.clone());
        }
        if let Some(r) = &overrides.nao_reduction {
            nao_reduction = parse_reduction(r)?;
        }
        for (list, is_maxima) in [(&overrides.maxima, true), (&overrides.means, false)] {
            for item in list {
                let (station, path) = split_assignment(item)?;
                if !order.contains(&station) {
                    order.push(station.clone());
                }
                let d = drafts.entry(station).or_default();
                if is_maxima {
                    d.maxima = Some(path);
                } else {
                    d.means = Some(path);
                    d.psmsl = None;
                }
            }
        }
        spec.family_policy = parse_family_policy(&family, known_scale)?;
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;

        let mut stations = Vec::new();
        for name in &order {
            let d = drafts.remove(name).unwrap_or_default();
            let maxima = d.maxima.ok_or_else(|| Error::Config(format!("station `{name}` has no maxima file")))?;
            let means = match (d.means, d.psmsl) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!("station `{name}`: give means or psmsl, not both")))
                }
                (Some(path), None) => Some(MeansSource::Csv(path)),
                (None, Some(path)) => Some(MeansSource::Psmsl { path, datum_offset_cm: d.datum_offset }),
                (None, None) => None,
            };
            let infill = match (d.infill_reference, d.infill_years) {
                (Some(reference), Some(years)) => Some(InfillDirective { reference, years, overlap: d.infill_overlap }),
                (None, None) => None,
                _ => {
                    return Err(Error::Config(format!(
                        "station `{name}`: infill needs both infill_reference and infill_years"
                    )))
                }
            };
            stations.push(StationInputs { name: name.clone(), maxima, means, infill });
        }
        for s in &stations {
            if let Some(inf) = &s.infill {
                if !stations.iter().any(|o| o.name == inf.reference) {
                    return Err(Error::Config(format!("station `{}`: unknown infill reference `{}`", s.name, inf.reference)));
                }
            }
        }
        if stations.is_empty() {
            return Err(Error::Config("no stations configured".into()));
        }
        Ok(Self { stations, nao, nao_reduction, spec, output })
    }
}
