//! Seeded synthetic annual series with linearly drifting parameters.
//!
//! Draws use inverse-transform sampling from a ChaCha8 stream, so the same
//! seed always reproduces the same series.

use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::distfit::{Distribution, Family};
use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Observation, SeriesKind};

/// Uniform and distribution draws from a deterministic stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform deviate strictly inside (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        // 53 random bits centred in their cell: never 0, never 1.
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn sample(&mut self, distribution: &Distribution) -> f64 {
        let u = self.uniform_open();
        match *distribution {
            // x = α - β ln(-ln u)
            Distribution::Gumbel { location, scale } => location - scale * libm::log(-libm::log(u)),
            _ => distribution
                .exceedance_quantile(u)
                .expect("u is strictly inside (0, 1)"),
        }
    }

    pub fn sample_n(&mut self, distribution: &Distribution, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample(distribution)).collect()
    }

    pub fn standard_normal(&mut self) -> f64 {
        crate::special::normal_quantile(self.uniform_open())
    }
}

/// `base + slope_per_year * (year - first_year)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub base: f64,
    pub slope_per_year: f64,
}

impl Ramp {
    pub fn constant(value: f64) -> Self {
        Self { base: value, slope_per_year: 0.0 }
    }

    pub fn at(&self, years_elapsed: f64) -> f64 {
        self.base + self.slope_per_year * years_elapsed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    pub station_id: String,
    pub kind: SeriesKind,
    pub family: Family,
    /// First family parameter (Gumbel location, log-normal μ, gamma/Weibull shape).
    pub param1: Ramp,
    /// Second family parameter (Gumbel/gamma/Weibull scale, log-normal σ).
    pub param2: Ramp,
    pub first_year: i32,
    pub last_year: i32,
    pub seed: u64,
    pub gap_years: Vec<i32>,
}

impl DriftModel {
    pub fn stationary_gumbel(location: f64, scale: f64, first_year: i32, last_year: i32, seed: u64) -> Self {
        Self {
            station_id: String::from("synthetic"),
            kind: SeriesKind::AnnualMaximum,
            family: Family::Gumbel,
            param1: Ramp::constant(location),
            param2: Ramp::constant(scale),
            first_year,
            last_year,
            seed,
            gap_years: Vec::new(),
        }
    }

    pub fn distribution_at(&self, year: i32) -> Result<Distribution> {
        let elapsed = f64::from(year - self.first_year);
        Distribution::new(self.family, self.param1.at(elapsed), self.param2.at(elapsed))
    }
}

/// One draw per non-gap year from `first_year` to `last_year` inclusive.
pub fn generate(model: &DriftModel) -> Result<AnnualSeries> {
    if model.last_year < model.first_year {
        return Err(Error::InvalidParameter {
            name: "year range",
            value: f64::from(model.last_year - model.first_year),
        });
    }
    let mut sampler = Sampler::new(model.seed);
    let mut observations = Vec::with_capacity((model.last_year - model.first_year + 1) as usize);
    for year in model.first_year..=model.last_year {
        if model.gap_years.contains(&year) {
            continue;
        }
        let dist = model.distribution_at(year)?;
        observations.push(Observation::new(year, sampler.sample(&dist)));
    }
    AnnualSeries::new(model.station_id.clone(), model.kind, observations)
}
