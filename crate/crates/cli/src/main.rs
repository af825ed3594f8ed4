//! `accel-moment`: symbolic checks, simulations and astrophysical scales for
//! the anomalous acceleration moment.
//!
//! Exit status is 0 on success, 1 when a computation or check fails and 2 on
//! usage errors, including invalid configs.

mod commands;
mod config;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use accel_moment::boostgen::calibrated_increment;
use accel_moment::hamiltonians::{equivalence_residual, MuA};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use config::{ConfigError, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("i/o error: {}", e))
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Exact rational from `n`, `n/d` or a plain decimal such as `-0.25`.
fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("`{}` is not a rational number (use n, n/d or a decimal)", s);
    if s.contains('/') {
        let q = BigRational::from_str(s).map_err(|_| bad())?;
        return Ok(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", int, frac);
    let num = BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(num, den);
    Ok(if neg { -q } else { q })
}

#[derive(Parser)]
#[command(name = "accel-moment", version, about = "Equivalence-principle checks for the anomalous acceleration moment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the symbolic check suite; exit 1 if any check fails.
    Verify {
        /// mu_a used for the residual, generator and neutrality checks.
        #[arg(long, default_value = "0", value_parser = parse_rational, allow_hyphen_values = true)]
        mu_a: BigRational,
        /// Inject a defect to confirm the suite detects it.
        #[arg(long, value_enum)]
        mutate: Option<verify::Mutation>,
        /// Additional expression whose Hermiticity is checked (repeatable).
        #[arg(long = "expr", value_name = "EXPR")]
        exprs: Vec<String>,
    },
    /// Print the gravitational minus accelerational Hamiltonian at a = -g.
    Residual {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        mu_a: BigRational,
        /// Include the gravitational tidal term.
        #[arg(long)]
        tidal: bool,
    },
    /// Print the boost-generator increment under the calibrated convention.
    Generate {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        mu_a: BigRational,
    },
    /// Evolve a spinor wave packet and write its spin trajectory.
    Evolve {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output file, overriding the config; `-` for stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Output format, overriding the config.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Ensemble-averaged initial spin rates at mirrored polar angles.
    Probe {
        /// JSON run configuration with a `probe` section.
        #[arg(long)]
        config: PathBuf,
        /// Seed for the transverse-momentum directions.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file, overriding the config; `-` for stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Output format, overriding the config.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Surface gravities and spin length scales of catalog bodies.
    Scales {
        /// CSV catalog with header `name,mass_g,radius_cm`; built-in Sun and neutron star if omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// |1 + mu_a|.
        #[arg(long, default_value_t = 2.0)]
        one_plus_mu_a_abs: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; stdout if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Interferometer phases from the gravitational and accelerational potential terms.
    Cow {
        /// JSON run configuration with a `cow` section.
        #[arg(long)]
        config: PathBuf,
        /// Output file, overriding the config; `-` for stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Output format, overriding the config.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Verify { mu_a, mutate, exprs } => verify::run(stdout.lock(), &mu_a, mutate, &exprs),
        Command::Residual { mu_a, tidal } => {
            let r = equivalence_residual(&MuA::Value(mu_a), tidal).map_err(|e| CliError::Compute(e.to_string()))?;
            writeln!(stdout.lock(), "{}", r)?;
            Ok(true)
        }
        Command::Generate { mu_a } => {
            let inc = calibrated_increment(&mu_a).map_err(|e| CliError::Compute(e.to_string()))?;
            writeln!(stdout.lock(), "{}", inc)?;
            Ok(true)
        }
        Command::Evolve { config, output, format } => {
            let cfg = config::load(&config)?;
            let sink = commands::Sink::from_config(&cfg, output, format);
            commands::evolve(&cfg, &sink, &mut std::io::stderr())?;
            Ok(true)
        }
        Command::Probe { config, seed, output, format } => {
            let cfg = config::load(&config)?;
            let mut sink = commands::Sink::from_config(&cfg, output, format);
            if cfg.output.is_none() && format.is_none() {
                sink.format = Format::Json;
            }
            commands::probe(&cfg, seed, &sink, &mut std::io::stderr())?;
            Ok(true)
        }
        Command::Scales { catalog, one_plus_mu_a_abs, format, output } => {
            let sink = commands::Sink { path: output, format };
            commands::scales(catalog.as_deref(), one_plus_mu_a_abs, &sink)?;
            Ok(true)
        }
        Command::Cow { config, output, format } => {
            let cfg = config::load(&config)?;
            let sink = commands::Sink::from_config(&cfg, output, format);
            commands::cow(&cfg, &sink)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-2/4").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("+.5").unwrap(), q(1, 2));
        for bad in ["", "-", ".", "1e3", "x", "1/0x"] {
            assert!(parse_rational(bad).is_err(), "{}", bad);
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
