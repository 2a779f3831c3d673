use core::fmt;

use crate::distfit::Family;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptySeries,
    DuplicateYear(i32),
    UnorderedYears { previous: i32, next: i32 },
    DuplicateMonth { year: i32, month: u8 },
    InvalidMonth { year: i32, month: u8 },
    NonFiniteValue { year: i32 },
    NonPositiveValue { year: i32, value: f64 },
    KindMismatch,
    InsufficientOverlap { found: usize, required: usize },
    MissingReferenceYear(i32),
    YearAlreadyPresent(i32),
    SampleTooSmall { n: usize, required: usize },
    DomainViolation { family: Family, value: f64 },
    NonFiniteInput,
    DegenerateSample,
    NoConvergence { family: Family, iterations: usize },
    InvalidProbability(f64),
    InvalidParameter { name: &'static str, value: f64 },
    LengthMismatch { left: usize, right: usize },
    ConstantInput,
    ZeroDensity { value: f64 },
    SeriesTooShort { n: usize, window: usize },
    InvalidWindowSpec(&'static str),
    AllFitsFailed { start_year: i32 },
    InsufficientPairs { n: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySeries => write!(f, "series has no observations"),
            Error::DuplicateYear(y) => write!(f, "duplicate year {y}"),
            Error::UnorderedYears { previous, next } => {
                write!(f, "years not increasing: {next} follows {previous}")
            }
            Error::DuplicateMonth { year, month } => write!(f, "duplicate month {year}-{month:02}"),
            Error::InvalidMonth { year, month } => write!(f, "invalid month {month} in {year}"),
            Error::NonFiniteValue { year } => write!(f, "non-finite value in {year}"),
            Error::NonPositiveValue { year, value } => {
                write!(f, "water level must be positive, got {value} in {year}")
            }
            Error::KindMismatch => write!(f, "series kinds differ"),
            Error::InsufficientOverlap { found, required } => {
                write!(f, "only {found} overlapping years, need at least {required}")
            }
            Error::MissingReferenceYear(y) => write!(f, "reference series has no value for {y}"),
            Error::YearAlreadyPresent(y) => write!(f, "target series already has a value for {y}"),
            Error::SampleTooSmall { n, required } => {
                write!(f, "sample of {n} values, need at least {required}")
            }
            Error::DomainViolation { family, value } => {
                write!(f, "{value} is outside the {} support", family.name())
            }
            Error::NonFiniteInput => write!(f, "input contains a non-finite value"),
            Error::DegenerateSample => write!(f, "sample has zero variance"),
            Error::NoConvergence { family, iterations } => write!(
                f,
                "{} likelihood solver did not converge in {iterations} iterations",
                family.name()
            ),
            Error::InvalidProbability(p) => write!(f, "probability {p} not in (0, 1)"),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::ConstantInput => write!(f, "input is constant"),
            Error::ZeroDensity { value } => write!(f, "zero density at {value}"),
            Error::SeriesTooShort { n, window } => {
                write!(f, "series has {n} observations, window needs {window}")
            }
            Error::InvalidWindowSpec(why) => write!(f, "invalid window spec: {why}"),
            Error::AllFitsFailed { start_year } => {
                write!(f, "no family could be fitted to the window starting {start_year}")
            }
            Error::InsufficientPairs { n } => {
                write!(f, "only {n} paired windows, need at least 3")
            }
        }
    }
}

impl core::error::Error for Error {}
