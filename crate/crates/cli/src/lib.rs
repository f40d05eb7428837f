//! `paramp-lab`: configuration-driven runs of the paramp-core pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration error,
//! 3 numerical failure.

pub mod commands;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "paramp-lab", version, about = "Josephson parametric amplifier simulator")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; results go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also render SVG plots (requires --out).
    #[arg(long, global = true)]
    pub plot: bool,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "PARAMP_THREADS")]
    pub threads: Option<usize>,
    /// Accepted for reproducible scripts; every computation is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Gain,
    P1db,
}

#[derive(Debug, Clone, Args)]
pub struct Spectrum {
    /// Start frequency, e.g. `4GHz` or `4500MHz` (bare numbers are GHz).
    #[arg(long, value_parser = parse_freq)]
    pub from: Option<f64>,
    #[arg(long, value_parser = parse_freq)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 501)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Integration {
    /// Beat periods recorded per tone after the transient.
    #[arg(long, default_value_t = 10)]
    pub periods: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenmodes of the configured circuit.
    Modes,
    /// Steady-state pump roots, from the config or from --delta/--zeta.
    SteadyState {
        #[arg(long, requires = "zeta")]
        delta: Option<f64>,
        #[arg(long, requires = "delta")]
        zeta: Option<f64>,
    },
    /// Signal and idler gain spectrum.
    Gain(Spectrum),
    /// Gain spectra over the `[sweep]` plan of the config.
    Sweep(Spectrum),
    /// Input 1 dB compression point.
    P1db {
        /// Also run the two-tone time-domain measurement.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        integration: Integration,
    },
    /// Time-domain Langevin integration compared against the analytic model.
    Oracle {
        #[arg(long, value_enum, default_value_t = Measure::Gain)]
        measure: Measure,
        #[command(flatten)]
        spectrum: Spectrum,
        #[command(flatten)]
        integration: Integration,
    },
    /// Literature comparison tables.
    Reference {
        #[arg(long)]
        table: u32,
        #[arg(long)]
        row: Option<String>,
        #[arg(long)]
        column: Option<String>,
    },
    /// Fast invariant checks; exits 3 on any failure.
    Selfcheck,
}

/// Frequency in GHz from `4GHz`, `4 GHz`, `4500MHz`, `4e9Hz` or `4`.
pub fn parse_freq(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let (num, scale) = [("ghz", 1.0), ("mhz", 1e-3), ("khz", 1e-6), ("hz", 1e-9)]
        .iter()
        .find_map(|(suffix, scale)| lower.strip_suffix(suffix).map(|n| (n.trim().to_string(), *scale)))
        .unwrap_or((lower.clone(), 1.0));
    let v: f64 = num.parse().map_err(|_| format!("cannot parse frequency `{s}`"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("frequency must be positive, got `{s}`"));
    }
    Ok(v * scale)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<paramp_core::Error> for Failure {
    fn from(e: paramp_core::Error) -> Self {
        use paramp_core::Error as E;
        match e {
            E::Config(_) | E::InvalidParameter { .. } | E::PhaseDomain { .. } | E::InvalidMode { .. } | E::Construction(_) | E::NotPositiveDefinite { .. } => {
                Failure::Config(e.to_string())
            }
            E::Resolution(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        // Only fails when a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match commands::run(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies_with_units() {
        assert_eq!(parse_freq("4GHz").unwrap(), 4.0);
        assert_eq!(parse_freq("4 GHz").unwrap(), 4.0);
        assert!((parse_freq("4500MHz").unwrap() - 4.5).abs() < 1e-12);
        assert!((parse_freq("6e9Hz").unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(parse_freq("7.5").unwrap(), 7.5);
        assert!(parse_freq("fast").is_err());
        assert!(parse_freq("-3GHz").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(paramp_core::Error::Config("x".into())).code(), 2);
        assert_eq!(Failure::from(paramp_core::Error::OscillationThreshold { det: 0.0 }).code(), 3);
        assert_eq!(Failure::from(paramp_core::Error::Resolution(1)).code(), 1);
    }
}
