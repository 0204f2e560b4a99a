//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glfr_stress::censored::SchemeKind;
use glfr_stress::sim::TableFormat;

#[derive(Debug, Parser)]
#[command(name = "glfr", version, about = "Stress-strength reliability for GLFR laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum likelihood fit of R = P(Y < X)
    Fit(FitArgs),
    /// Bayes estimate and credible interval of R
    Bayes(BayesArgs),
    /// Progressively censor both samples and refit
    Censor(CensorArgs),
    /// Run a Monte Carlo experiment
    Simulate(SimulateArgs),
    /// Draw a GLFR sample
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Known,
    Common,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// `.csv` files as csv, everything else as whitespace
    Auto,
    Csv,
    Whitespace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CiMethod {
    Asymptotic,
    Bootstrap,
    Exact,
}

/// Two input samples. `builtin:NAME` reads a bundled data set.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// strength sample X
    pub x: PathBuf,
    /// stress sample Y
    pub y: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
    /// csv column to read (default: the first)
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, env = "GLFR_SEED", default_value_t = 1)]
    pub seed: u64,
    /// human-readable output with 6 significant digits
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "common")]
    pub mode: Mode,
    /// common scale `a,b` for mode known
    #[arg(long, value_parser = parse_pair)]
    pub scale: Option<(f64, f64)>,
    /// interval method; repeatable
    #[arg(long, value_enum)]
    pub ci: Vec<CiMethod>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// bootstrap replicates
    #[arg(long, default_value_t = 1000)]
    pub boot: usize,
    /// Kolmogorov-Smirnov fit of each sample
    #[arg(long)]
    pub gof: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "common")]
    pub mode: Mode,
    #[arg(long, value_parser = parse_pair)]
    pub scale: Option<(f64, f64)>,
    /// Gamma priors as shape,rate pairs: alpha, beta, then the scales
    /// (a, b in mode common; a1, b1, a2, b2 in mode general)
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "noninformative")]
    pub prior: Vec<f64>,
    /// vague priors (the default when --prior is absent)
    #[arg(long)]
    pub noninformative: bool,
    /// acceptance-rejection draws
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CensorArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "type2")]
    pub kind: SchemeKind,
    /// units on test per sample (default: all values; otherwise the first n)
    #[arg(long)]
    pub n: Option<usize>,
    /// observed failures per sample
    #[arg(long)]
    pub m: usize,
    /// known common scale `a,b` (default: the complete-data fit)
    #[arg(long, value_parser = parse_pair, conflicts_with = "unknown_scale")]
    pub scale: Option<(f64, f64)>,
    /// estimate the scale from the censored samples
    #[arg(long)]
    pub unknown_scale: bool,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// key=value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=value` override; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value = "csv")]
    pub output_format: TableFormat,
    /// write the table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// seed, unless the config sets one
    #[arg(long, env = "GLFR_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "GLFR_SEED", default_value_t = 1)]
    pub seed: u64,
    /// write the draws here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// KS test of the draws against the law; fails below p = 0.001
    #[arg(long)]
    pub self_test: bool,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected `a,b`, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok((num(a)?, num(b)?))
}
