//! The four candidate distributions: density, CDF, exceedance quantile, and
//! maximum-likelihood estimation, plus Weibull plotting positions.
//!
//! The Gumbel law here is the distribution of maxima,
//! `f(x) = exp(-z - exp(-z)) / β` with `z = (x - α) / β`, whose exceedance
//! quantile is `x_p = α - β ln(-ln(1 - p))`.
//!
//! Solvers stop at a relative parameter change of 1e-10 or after 200
//! iterations. Fits that hit the iteration cap are still returned, with
//! `converged == false`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::{
    gamma_p, gamma_q, ln_gamma, ln_minus_digamma, newton_bracketed, normal_quantile, normal_sf,
    trigamma,
};

pub const MIN_FIT_SAMPLE: usize = 10;
pub const REL_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Gamma,
    LogNormal,
    Gumbel,
    Weibull,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Gamma, Family::LogNormal, Family::Gumbel, Family::Weibull];

    /// Every family has two free parameters.
    pub const PARAMETER_COUNT: usize = 2;

    pub fn name(self) -> &'static str {
        match self {
            Family::Gamma => "gamma",
            Family::LogNormal => "log_normal",
            Family::Gumbel => "gumbel",
            Family::Weibull => "weibull",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        match name {
            "gamma" => Some(Family::Gamma),
            "log_normal" | "log-normal" | "lognormal" => Some(Family::LogNormal),
            "gumbel" => Some(Family::Gumbel),
            "weibull" => Some(Family::Weibull),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn positive_support(self) -> bool {
        !matches!(self, Family::Gumbel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// shape k, scale θ (cm)
    Gamma { shape: f64, scale: f64 },
    /// mean and standard deviation of ln x
    LogNormal { mu: f64, sigma: f64 },
    /// location α (cm), scale β (cm)
    Gumbel { location: f64, scale: f64 },
    /// shape k, scale λ (cm)
    Weibull { shape: f64, scale: f64 },
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

impl Distribution {
    /// Builds a distribution from the family's two parameters in the order
    /// documented on each variant.
    pub fn new(family: Family, first: f64, second: f64) -> Result<Self> {
        match family {
            Family::Gamma => {
                check_positive("gamma shape", first)?;
                check_positive("gamma scale", second)?;
                Ok(Distribution::Gamma { shape: first, scale: second })
            }
            Family::LogNormal => {
                check_finite("log-normal mu", first)?;
                check_positive("log-normal sigma", second)?;
                Ok(Distribution::LogNormal { mu: first, sigma: second })
            }
            Family::Gumbel => {
                check_finite("gumbel location", first)?;
                check_positive("gumbel scale", second)?;
                Ok(Distribution::Gumbel { location: first, scale: second })
            }
            Family::Weibull => {
                check_positive("weibull shape", first)?;
                check_positive("weibull scale", second)?;
                Ok(Distribution::Weibull { shape: first, scale: second })
            }
        }
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Gumbel, location, scale)
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::LogNormal, mu, sigma)
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Gamma, shape, scale)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Weibull, shape, scale)
    }

    pub fn family(&self) -> Family {
        match self {
            Distribution::Gamma { .. } => Family::Gamma,
            Distribution::LogNormal { .. } => Family::LogNormal,
            Distribution::Gumbel { .. } => Family::Gumbel,
            Distribution::Weibull { .. } => Family::Weibull,
        }
    }

    pub fn params(&self) -> (f64, f64) {
        match *self {
            Distribution::Gamma { shape, scale } => (shape, scale),
            Distribution::LogNormal { mu, sigma } => (mu, sigma),
            Distribution::Gumbel { location, scale } => (location, scale),
            Distribution::Weibull { shape, scale } => (shape, scale),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let family = self.family();
        if family.positive_support() && x <= 0.0 {
            return Err(Error::DomainViolation { family, value: x });
        }
        Ok(())
    }

    /// Log density; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if self.family().positive_support() && x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            Distribution::Gumbel { location, scale } => {
                let z = (x - location) / scale;
                -scale.ln() - z - (-z).exp()
            }
            Distribution::LogNormal { mu, sigma } => {
                let lx = x.ln();
                let z = (lx - mu) / sigma;
                -lx - sigma.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
            Distribution::Gamma { shape, scale } => {
                let y = x / scale;
                (shape - 1.0) * y.ln() - y - ln_gamma(shape) - scale.ln()
            }
            Distribution::Weibull { shape, scale } => {
                let y = x / scale;
                (shape / scale).ln() + (shape - 1.0) * y.ln() - y.powf(shape)
            }
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.ln_pdf(x).exp())
    }

    /// Non-exceedance probability `P(X <= x)`; zero below a positive support.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.family().positive_support() && x <= 0.0 {
            return 0.0;
        }
        match *self {
            Distribution::Gumbel { location, scale } => (-(-(x - location) / scale).exp()).exp(),
            Distribution::LogNormal { .. } | Distribution::Weibull { .. } => 1.0 - self.sf(x),
            Distribution::Gamma { shape, scale } => gamma_p(shape, x / scale),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Gumbel { location, scale } => {
                -(-(-(x - location) / scale).exp()).exp_m1()
            }
            Distribution::LogNormal { mu, sigma } => normal_sf((x.ln() - mu) / sigma),
            Distribution::Gamma { shape, scale } => gamma_q(shape, x / scale),
            Distribution::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
        }
    }

    /// Annual exceedance probability `P(X > x)`.
    pub fn exceedance_probability(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.sf(x))
    }

    /// The level `x_p` exceeded with probability `p`.
    pub fn exceedance_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(match *self {
            Distribution::Gumbel { location, scale } => location - scale * (-(-p).ln_1p()).ln(),
            Distribution::LogNormal { mu, sigma } => (mu - sigma * normal_quantile(p)).exp(),
            Distribution::Weibull { shape, scale } => scale * (-p.ln()).powf(1.0 / shape),
            Distribution::Gamma { shape, scale } => scale * gamma_upper_quantile(shape, p),
        })
    }

    pub fn log_likelihood(&self, sample: &[f64]) -> f64 {
        sample.iter().map(|&x| self.ln_pdf(x)).sum()
    }
}

/// Solves `Q(shape, y) = p` for the standardized gamma variate `y`.
fn gamma_upper_quantile(shape: f64, p: f64) -> f64 {
    // Wilson-Hilferty starting point
    let z = -normal_quantile(p);
    let c = 1.0 / (9.0 * shape);
    let start = shape * (1.0 - c + z * c.sqrt()).powi(3).max(1e-3);
    let mut hi = start.max(shape) * 2.0 + 10.0;
    while gamma_q(shape, hi) > p {
        hi *= 2.0;
    }
    let lo = 0.0;
    let density = |y: f64| {
        ((shape - 1.0) * y.ln() - y - ln_gamma(shape)).exp()
    };
    let root = newton_bracketed(
        |y| {
            if y <= 0.0 {
                return (1.0 - p, 0.0);
            }
            (gamma_q(shape, y) - p, -density(y))
        },
        lo,
        hi,
        start,
        1e-15,
        400,
    );
    root.x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedDistribution {
    pub distribution: Distribution,
    /// Sum of log densities over the fitted sample at the estimate.
    pub log_likelihood: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FittedDistribution {
    pub fn family(&self) -> Family {
        self.distribution.family()
    }

    pub fn params(&self) -> (f64, f64) {
        self.distribution.params()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.distribution.pdf(x)
    }

    pub fn exceedance_quantile(&self, p: f64) -> Result<f64> {
        self.distribution.exceedance_quantile(p)
    }

    pub fn exceedance_probability(&self, x: f64) -> Result<f64> {
        self.distribution.exceedance_probability(x)
    }
}

fn validate_sample(sample: &[f64], family: Family) -> Result<()> {
    if sample.len() < MIN_FIT_SAMPLE {
        return Err(Error::SampleTooSmall { n: sample.len(), required: MIN_FIT_SAMPLE });
    }
    for &x in sample {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        if family.positive_support() && x <= 0.0 {
            return Err(Error::DomainViolation { family, value: x });
        }
    }
    let first = sample[0];
    if sample.iter().all(|&x| x == first) {
        return Err(Error::DegenerateSample);
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Maximum-likelihood fit of one family.
pub fn fit_mle(sample: &[f64], family: Family) -> Result<FittedDistribution> {
    validate_sample(sample, family)?;
    let (distribution, iterations, converged) = match family {
        Family::Gumbel => fit_gumbel(sample)?,
        Family::LogNormal => fit_log_normal(sample)?,
        Family::Gamma => fit_gamma(sample)?,
        Family::Weibull => fit_weibull(sample)?,
    };
    let log_likelihood = distribution.log_likelihood(sample);
    Ok(FittedDistribution { distribution, log_likelihood, n: sample.len(), converged, iterations })
}

/// Gumbel fit with the scale held at `scale`; only the location is estimated.
pub fn fit_gumbel_known_scale(sample: &[f64], scale: f64) -> Result<FittedDistribution> {
    validate_sample(sample, Family::Gumbel)?;
    check_positive("gumbel scale", scale)?;
    let x_min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let location = gumbel_location(sample, x_min, scale);
    let distribution = Distribution::gumbel(location, scale)?;
    Ok(FittedDistribution {
        distribution,
        log_likelihood: distribution.log_likelihood(sample),
        n: sample.len(),
        converged: true,
        iterations: 0,
    })
}

// α = -β ln[(1/N) Σ exp(-x/β)], evaluated relative to the sample minimum.
fn gumbel_location(sample: &[f64], x_min: f64, scale: f64) -> f64 {
    let s0: f64 = sample.iter().map(|&x| (-(x - x_min) / scale).exp()).sum();
    x_min - scale * (s0 / sample.len() as f64).ln()
}

fn fit_gumbel(sample: &[f64]) -> Result<(Distribution, usize, bool)> {
    let n = sample.len() as f64;
    let x_min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let y: Vec<f64> = sample.iter().map(|&x| x - x_min).collect();
    let y_mean = mean(&y);
    let var = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>() / (n - 1.0);

    // Profile equation g(β) = β - ȳ + Σ y e^{-y/β} / Σ e^{-y/β} is
    // increasing in β, negative near zero and non-negative at ȳ.
    let profile = |beta: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &v in &y {
            let w = (-v / beta).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        let m1 = s1 / s0;
        let m2 = s2 / s0;
        (beta - y_mean + m1, 1.0 + (m2 - m1 * m1) / (beta * beta))
    };
    let hi = y_mean;
    let mut lo = 1e-3 * y_mean;
    let mut guard = 0;
    while profile(lo).0 >= 0.0 {
        lo *= 0.1;
        guard += 1;
        if guard > 50 {
            return Err(Error::NoConvergence { family: Family::Gumbel, iterations: 0 });
        }
    }
    let start = (6.0 * var).sqrt() / PI;
    let root = newton_bracketed(profile, lo, hi, start, REL_TOL, MAX_ITER);
    let scale = root.x;
    let location = gumbel_location(sample, x_min, scale);
    Ok((Distribution::gumbel(location, scale)?, root.iterations, root.converged))
}

fn fit_log_normal(sample: &[f64]) -> Result<(Distribution, usize, bool)> {
    let logs: Vec<f64> = sample.iter().map(|x| x.ln()).collect();
    let mu = mean(&logs);
    let var = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / logs.len() as f64;
    if var <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    Ok((Distribution::log_normal(mu, var.sqrt())?, 0, true))
}

fn fit_gamma(sample: &[f64]) -> Result<(Distribution, usize, bool)> {
    let x_mean = mean(sample);
    let u: Vec<f64> = sample.iter().map(|x| x / x_mean).collect();
    let u_mean = mean(&u);
    let s = u_mean.ln() - u.iter().map(|v| v.ln()).sum::<f64>() / u.len() as f64;
    if s <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let u_var = u.iter().map(|v| (v - u_mean) * (v - u_mean)).sum::<f64>() / (u.len() as f64 - 1.0);
    // ln k - ψ(k) lies between 1/(2k) and 1/k, so the root is in [1/(2s), 1/s].
    let lo = 0.5 / s;
    let hi = 1.0 / s;
    let start = u_mean * u_mean / u_var;
    let root = newton_bracketed(
        |k| (ln_minus_digamma(k) - s, 1.0 / k - trigamma(k)),
        lo,
        hi,
        start,
        REL_TOL,
        MAX_ITER,
    );
    let shape = root.x;
    Ok((Distribution::gamma(shape, x_mean / shape)?, root.iterations, root.converged))
}

fn fit_weibull(sample: &[f64]) -> Result<(Distribution, usize, bool)> {
    let logs: Vec<f64> = sample.iter().map(|x| x.ln()).collect();
    let log_mean = mean(&logs);
    let d: Vec<f64> = logs.iter().map(|l| l - log_mean).collect();
    let d_mean = mean(&d);
    let d_max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if d_max - d_mean <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    // h(k) = Σ x^k ln x / Σ x^k - 1/k - mean(ln x), increasing in k.
    let profile = |k: f64| {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &v in &d {
            let w = (k * (v - d_max)).exp();
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        let m1 = s1 / s0;
        let m2 = s2 / s0;
        (m1 - 1.0 / k - d_mean, m2 - m1 * m1 + 1.0 / (k * k))
    };
    let lo = 0.5 / (d_max - d_mean);
    let mut hi = 2.0 * lo;
    let mut guard = 0;
    while profile(hi).0 <= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence { family: Family::Weibull, iterations: 0 });
        }
    }
    let x_mean = mean(sample);
    let sd = (sample.iter().map(|x| (x - x_mean) * (x - x_mean)).sum::<f64>()
        / (sample.len() as f64 - 1.0))
        .sqrt();
    let start = (sd / x_mean).powf(-1.086);
    let root = newton_bracketed(profile, lo, hi, start, REL_TOL, MAX_ITER);
    let shape = root.x;
    let s0 = d.iter().map(|&v| (shape * (v - d_max)).exp()).sum::<f64>() / d.len() as f64;
    let scale = (log_mean + d_max + s0.ln() / shape).exp();
    Ok((Distribution::weibull(shape, scale)?, root.iterations, root.converged))
}

/// An observation ranked in non-ascending order with exceedance `m / (N + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlottingPosition {
    pub value: f64,
    pub rank: usize,
    pub exceedance_p: f64,
}

/// Weibull plotting positions. Ties keep their input order.
pub fn plotting_positions(sample: &[f64]) -> Result<Vec<PlottingPosition>> {
    if sample.is_empty() {
        return Err(Error::EmptySeries);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let denom = (sorted.len() + 1) as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, value)| PlottingPosition {
            value,
            rank: i + 1,
            exceedance_p: (i + 1) as f64 / denom,
        })
        .collect())
}
