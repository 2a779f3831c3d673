use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stormfreq::commands::{self, FitArgs, GenerateArgs, InfillArgs};
use stormfreq::config::{parse_year_list, parse_year_range, Overrides, RunConfig, OUTPUT_ENV};
use stormfreq::core::{Family, Ramp, SeriesKind};
use stormfreq::{seriesio, Error, Result};

#[derive(Parser)]
#[command(name = "stormfreq", version, about = "Moving-window frequency analysis of annual maximum water levels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one distribution to a `year,value` file
    Fit {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "gumbel")]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Hold the Gumbel scale at this value (cm)
        #[arg(long)]
        known_scale: Option<f64>,
        /// Write empirical and fitted quantiles for plotting
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Fit every window of every configured station
    Scan(RunArgs),
    /// Coefficients of determination against a covariate
    Correlate {
        #[command(flatten)]
        run: RunArgs,
        /// msl, nao or location
        #[arg(long)]
        covariate: String,
    },
    /// Write a synthetic annual series
    Generate {
        #[arg(long, value_enum, default_value = "gumbel")]
        family: FamilyArg,
        /// First parameter (Gumbel location, cm)
        #[arg(long)]
        p1: f64,
        /// Second parameter (Gumbel scale, cm)
        #[arg(long)]
        p2: f64,
        /// Change of the first parameter per year
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p1_slope: f64,
        /// Change of the second parameter per year
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p2_slope: f64,
        #[arg(long)]
        first: i32,
        #[arg(long)]
        last: i32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Years to leave out, e.g. `1945-1946,1950`
        #[arg(long)]
        gaps: Option<String>,
        #[arg(long, value_enum, default_value = "annual-maximum")]
        kind: KindArg,
        #[arg(long, default_value = "synthetic")]
        station: String,
        /// Output file; standard output when omitted
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Fill missing years by regression on a reference station
    Infill {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// e.g. `1941-1943`
        #[arg(long)]
        years: String,
        /// Restrict the regression to these years, e.g. `1901-1940`
        #[arg(long)]
        overlap: Option<String>,
        #[arg(long, value_enum, default_value = "annual-maximum")]
        kind: KindArg,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated exceedance probabilities
    #[arg(long)]
    probabilities: Option<String>,
    /// gumbel, best-aic or gumbel-known-scale
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    known_scale: Option<f64>,
    /// Monthly NAO file
    #[arg(long)]
    nao: Option<PathBuf>,
    /// mean or max
    #[arg(long)]
    nao_reduction: Option<String>,
    /// `station=path`, repeatable
    #[arg(long)]
    maxima: Vec<String>,
    /// `station=path`, repeatable
    #[arg(long)]
    means: Vec<String>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let env = std::env::var_os(OUTPUT_ENV).map(PathBuf::from);
        let overrides = Overrides {
            output: self.out,
            window: self.window,
            alpha: self.alpha,
            probabilities: self.probabilities,
            family: self.family,
            known_scale: self.known_scale,
            nao: self.nao,
            nao_reduction: self.nao_reduction,
            maxima: self.maxima,
            means: self.means,
        };
        RunConfig::resolve(self.config.as_deref(), env, &overrides)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gamma,
    LogNormal,
    Gumbel,
    Weibull,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gamma => Family::Gamma,
            FamilyArg::LogNormal => Family::LogNormal,
            FamilyArg::Gumbel => Family::Gumbel,
            FamilyArg::Weibull => Family::Weibull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    AnnualMaximum,
    AnnualMean,
    Covariate,
}

impl From<KindArg> for SeriesKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::AnnualMaximum => SeriesKind::AnnualMaximum,
            KindArg::AnnualMean => SeriesKind::AnnualMean,
            KindArg::Covariate => SeriesKind::CovariateIndex,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { file, family, alpha, known_scale, plot } => {
            let args = FitArgs { file, family: family.into(), alpha, known_scale, plot };
            commands::fit(&args, &mut io::stdout().lock())
        }
        Command::Scan(run) => {
            let config = run.resolve()?;
            for path in commands::scan(&config)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Correlate { run, covariate } => {
            let config = run.resolve()?;
            let path = commands::correlate(&config, &covariate)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Generate { family, p1, p2, p1_slope, p2_slope, first, last, seed, gaps, kind, station, out } => {
            let args = GenerateArgs {
                station,
                kind: kind.into(),
                family: family.into(),
                param1: Ramp { base: p1, slope_per_year: p1_slope },
                param2: Ramp { base: p2, slope_per_year: p2_slope },
                first_year: first,
                last_year: last,
                seed,
                gaps: gaps.as_deref().map(parse_year_list).transpose()?.unwrap_or_default(),
            };
            let series = commands::generate(&args)?;
            match out {
                Some(path) => seriesio::save_annual_csv(path, &series),
                None => {
                    let mut stdout = io::stdout().lock();
                    seriesio::write_annual_csv(&mut stdout, &series)
                        .and_then(|_| stdout.flush())
                        .map_err(|e| Error::io("stdout", e))
                }
            }
        }
        Command::Infill { target, reference, years, overlap, kind, out } => {
            let args = InfillArgs {
                target,
                reference,
                years: parse_year_list(&years)?,
                overlap: overlap.as_deref().map(parse_year_range).transpose()?,
                kind: kind.into(),
            };
            let filled = commands::infill(&args, &mut io::stderr().lock())?;
            seriesio::save_annual_csv(out, &filled)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
