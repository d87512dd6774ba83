mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use breaklab::TargetSpec;
use clap::{Args, Parser, Subcommand};

use output::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "breaklab", version, about = "Numerical laboratory for circle maps with a break")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Directory for CSV and JSON artifacts. Without it the main artifact goes
    /// to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Key-value file whose entries act as default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Working precision in significant digits; above 16 quad-double
    /// arithmetic is used.
    #[arg(long, global = true, env = "BREAKLAB_PRECISION_DIGITS", default_value_t = 16)]
    pub precision_digits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Break size.
    #[arg(long)]
    pub c: String,
    /// Nonlinearity of the smooth piece.
    #[arg(long, default_value = "0")]
    pub eps: String,
}

#[derive(Args, Debug, Clone)]
pub struct TargetArgs {
    /// `golden`, `silver`, or a quotient period such as `1,1,10`.
    #[arg(long)]
    pub target: Option<TargetSpec>,
    /// Quotient period, repeated indefinitely.
    #[arg(long, conflicts_with = "target")]
    pub quotients: Option<TargetSpec>,
}

impl TargetArgs {
    pub fn spec(&self) -> TargetSpec {
        self.quotients.clone().or_else(|| self.target.clone()).unwrap_or(TargetSpec::Golden)
    }
}

pub fn parse_levels(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("levels must look like 8:16")?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad level '{}': {}", a, e))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad level '{}': {}", b, e))?;
    if a > b {
        return Err(format!("empty level range {}:{}", a, b));
    }
    Ok((a, b))
}

pub fn parse_pair(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("a pair is written alpha,v,c".into());
    }
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number '{}': {}", x, e));
    Ok((num(parts[0])?, num(parts[1])?, num(parts[2])?))
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction of the rotation number.
    Rotnum {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Shift `δ` so that the rotation number matches a target.
    Tune {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Per-level statistics of the dynamical partitions.
    Partition {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        target: TargetArgs,
        /// Use this `δ` instead of tuning to the target.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, value_parser = parse_levels, default_value = "2:16")]
        levels: (usize, usize),
    },
    /// Renormalizations and their fractional-linear fits.
    Renorm {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, value_parser = parse_levels, default_value = "2:16")]
        levels: (usize, usize),
    },
    /// Cross-ratio distortion of an interval and of its orbit.
    Xi {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        delta: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Number of iterates in the orbit sum.
        #[arg(long, default_value_t = 1)]
        iterates: usize,
    },
    /// Matched break-point orbits of `(c, eps)` and `(c, eps-g)`, with the
    /// Hölder bound they imply.
    Conjugacy {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value = "0")]
        eps_g: String,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_parser = parse_levels, default_value = "8:14")]
        levels: (usize, usize),
    },
    /// Full rigidity experiment against the Möbius comparison map.
    Experiment {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_parser = parse_levels)]
        levels: Option<(usize, usize)>,
        #[arg(long, default_value_t = 8)]
        n_min: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long, default_value_t = 0.95)]
        alpha_gate: f64,
        #[arg(long, default_value_t = 6)]
        n0: usize,
    },
    /// Looks for a Möbius conjugacy between two fractional-linear pairs.
    MobiusProbe {
        /// `alpha,v,c`; give exactly two.
        #[arg(long = "pair", value_parser = parse_pair, num_args = 1, required = true)]
        pairs: Vec<(f64, f64, f64)>,
    },
}

pub const SUBCOMMANDS: [&str; 8] =
    ["rotnum", "tune", "partition", "renorm", "xi", "conjugacy", "experiment", "mobius-probe"];

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args().collect(), &SUBCOMMANDS) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {}", msg);
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run::dispatch(&cli).and_then(|a| a.emit(cli.out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<breaklab::LabError> for CliError {
    fn from(e: breaklab::LabError) -> Self {
        use breaklab::LabError::*;
        match e {
            PrecisionExhausted { .. } => CliError::Precision(e.to_string()),
            InvalidParameter(_) | InvalidDepth { .. } | InsufficientData { .. } | InsufficientLevels { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
