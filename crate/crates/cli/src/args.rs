use clap::{Args, Parser, Subcommand, ValueEnum};
use hfe_core::montecarlo::ExperimentKind;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "hfe",
    version,
    about = "Spectra, subordination, ergodicity diagnostics and Monte Carlo for isotropic spherical fields",
    args_override_self = true
)]
pub struct Cli {
    /// Output directory
    #[arg(long, global = true, env = "HFE_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// `key=value` file supplying defaults for any long flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads; defaults to the number of cores
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Tabulate a power-exponential spectrum C_l = c l^-alpha e^-beta l
    Spectrum {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Rescale to unit total variance
        #[arg(long)]
        normalize: bool,
    },
    /// Spectrum of H_q(T) for q in {2, 3}
    Subordinate {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        q: u8,
        /// Largest output multipole; defaults to q * lmax
        #[arg(long)]
        lmax_out: Option<u32>,
    },
    /// Ergodicity and Gaussianity diagnostics of one spectrum
    Diagnose {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[command(flatten)]
        range: LRange,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Diagnostics over an (alpha, beta) grid of power-exponential spectra
    Scan {
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        lmax: u32,
        #[command(flatten)]
        range: LRange,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Seeded Monte Carlo experiment
    Simulate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long)]
        lmax_in: u32,
        #[arg(long)]
        lmax_out: Option<u32>,
        /// Multipoles to report
        #[arg(long, value_delimiter = ',', required = true)]
        ls: Vec<u32>,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Dump zero-projection 3j symbols with l1 <= l2 <= l3 <= lmax
    Wigner {
        #[arg(long)]
        lmax: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        mode: ModeArg,
        /// Largest momentum of the exact engine
        #[arg(long, default_value_t = hfe_core::wigner::DEFAULT_CAP)]
        cap: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Subordinate { .. } => "subordinate",
            Command::Diagnose { .. } => "diagnose",
            Command::Scan { .. } => "scan",
            Command::Simulate { .. } => "simulate",
            Command::Wigner { .. } => "wigner",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    /// `l,C_l` table; takes precedence over the power-exponential flags
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long)]
    pub lmax: Option<u32>,
}

/// Multipoles either listed with `--ls` or as `--l-min..=--l-max` by `--l-step`.
#[derive(Args, Debug, Serialize)]
pub struct LRange {
    #[arg(long, value_delimiter = ',')]
    pub ls: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    pub l_min: u32,
    #[arg(long, default_value_t = 60)]
    pub l_max: u32,
    #[arg(long, default_value_t = 5)]
    pub l_step: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct RuleArgs {
    /// Largest log-log slope of the leading term still read as decay
    #[arg(long, default_value_t = hfe_core::diagnostics::ConvergenceRule::default().max_slope, allow_negative_numbers = true)]
    pub max_slope: f64,
    /// Bound on the last leading term in units of 2/(2l+1)
    #[arg(long, default_value_t = hfe_core::diagnostics::ConvergenceRule::default().terminal_factor)]
    pub terminal_factor: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Gaussian,
    Quadratic,
    Counterexample,
    CompletelyRandom,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gaussian => ExperimentKind::Gaussian,
            KindArg::Quadratic => ExperimentKind::Quadratic,
            KindArg::Counterexample => ExperimentKind::Counterexample,
            KindArg::CompletelyRandom => ExperimentKind::CompletelyRandom,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    Float,
}
