use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndr_core::dist::{FieldParams, GammaPairParams};
use ndr_core::sampling::DEFAULT_MAX_COUNT;

use crate::error::CliResult;
use crate::output::{format_number, Format, Metadata};

#[derive(Debug, Parser)]
#[command(name = "ndr-stats", version, about = "Distribution, moments and Monte-Carlo validation of the normalized dissimilarity ratio")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a density on a grid.
    Pdf(PdfArgs),
    /// Closed-form moments of D, optionally with Monte-Carlo estimates.
    Moments(MomentsArgs),
    /// Draw seeded samples.
    Sample(SampleArgs),
    /// Run the validation suite; exit code 1 if any check fails.
    Validate(ValidateArgs),
    /// Write plot-ready tables for figures 1-8.
    Figures(FiguresArgs),
}

/// Either the intensity parameters (sigma, rho) or the field parameters
/// (sigma_z, rho_z); the other pair is derived and echoed.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Gamma shape (number of summed intensity pairs).
    #[arg(long)]
    pub k: Option<f64>,
    /// Intensity scale (mean of one exponential component).
    #[arg(long, conflicts_with_all = ["sigma_z", "rho_z"])]
    pub sigma: Option<f64>,
    /// Intensity correlation.
    #[arg(long, conflicts_with_all = ["sigma_z", "rho_z"])]
    pub rho: Option<f64>,
    /// Per-component deviation of the complex fields.
    #[arg(long)]
    pub sigma_z: Option<f64>,
    /// Correlation of the complex fields.
    #[arg(long)]
    pub rho_z: Option<f64>,
}

/// Defaults used when a parameter is not given on the command line.
#[derive(Debug, Clone, Copy)]
pub struct ParamDefaults {
    pub k: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl ParamDefaults {
    pub const PLAIN: ParamDefaults = ParamDefaults {
        k: 1.0,
        sigma: 1.0,
        rho: 0.0,
    };
}

impl ParamArgs {
    pub fn resolve(&self, d: ParamDefaults) -> CliResult<GammaPairParams> {
        let k = self.k.unwrap_or(d.k);
        if self.sigma_z.is_some() || self.rho_z.is_some() {
            let base = GammaPairParams::new(d.sigma, d.rho, k)?.field();
            let fp = FieldParams::new(
                self.sigma_z.unwrap_or(base.sigma_z()),
                self.rho_z.unwrap_or(base.rho_z()),
            )?;
            Ok(fp.gamma_pair(k)?)
        } else {
            Ok(GammaPairParams::new(
                self.sigma.unwrap_or(d.sigma),
                self.rho.unwrap_or(d.rho),
                k,
            )?)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdfTarget {
    /// Joint density of two exponential intensities (k = 1).
    JointExp,
    /// Bivariate Gamma joint density.
    JointGamma,
    /// Density of X / Y.
    Ratio,
    /// Density of D = |X - Y| / (X + Y).
    Ndr,
}

#[derive(Debug, Clone, Args)]
pub struct PdfArgs {
    #[arg(value_enum)]
    pub target: PdfTarget,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Grid start (both axes for joint densities).
    #[arg(long)]
    pub lo: Option<f64>,
    /// Grid end (both axes for joint densities).
    #[arg(long)]
    pub hi: Option<f64>,
    /// Grid points (per axis for joint densities).
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub orders: Vec<u32>,
    /// Add Monte-Carlo estimates.
    #[arg(long)]
    pub mc: bool,
    #[arg(short = 'n', long = "n", default_value_t = 1_000_000)]
    pub n: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleTarget {
    Complex,
    Intensity,
    Gamma,
    Ndr,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: SampleTarget,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(short = 'n', long = "n", default_value_t = 1000)]
    pub n: usize,
    /// Refuse to generate more samples than this.
    #[arg(long, default_value_t = DEFAULT_MAX_COUNT)]
    pub max_count: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Run with N = 1e5 and looser tolerances.
    #[arg(long)]
    pub quick: bool,
    /// Tilt every analytic density by 1 + eps (2t - 1); the suite should fail.
    #[arg(long, default_value_t = 0.0)]
    pub perturb_pdf: f64,
    /// Samples per 1-D check (overrides the mode default).
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = ndr_core::validate::SuiteConfig::full().seed)]
    pub seed: u64,
    /// Report format; JSON by default.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// Comma-separated figure ids in 1..=8 (all when omitted).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=8))]
    pub which: Vec<u8>,
    /// Field/intensity parameters for figures 2-5 (default sigma_z 0.7, rho_z 0.8, k 12).
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(short = 'n', long = "n", default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Metadata lines shared by every table: version, command, parameters in
/// both parameterizations.
pub fn param_metadata(command: &str, p: &GammaPairParams) -> Metadata {
    let f = p.field();
    vec![
        ("ndr-stats".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), command.into()),
        (
            "params".into(),
            format!(
                "sigma={} rho={} k={}",
                format_number(p.sigma()),
                format_number(p.rho()),
                format_number(p.k())
            ),
        ),
        (
            "derived".into(),
            format!("sigma_z={} rho_z={}", format_number(f.sigma_z()), format_number(f.rho_z())),
        ),
    ]
}
