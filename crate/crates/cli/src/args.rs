use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Effective two- and three-body on-site energies and collapse-revival traces.
#[derive(Debug, Parser)]
#[command(name = "threebody", version, args_override_self = true)]
pub struct Cli {
    /// JSON file of flag values; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Exit with status 3 when a validity warning is raised.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partial sums of the three-body coefficient shell by shell.
    #[command(args_override_self = true)]
    Beta(BetaArgs),
    /// Couplings and revival times for one parameter set.
    #[command(args_override_self = true)]
    Couplings(CouplingArgs),
    /// Visibility trace of an on-site coherent state.
    #[command(args_override_self = true)]
    Revival(RevivalArgs),
    /// Dimensionless couplings over a range of xi.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Exact diagonalization against the perturbative prediction.
    #[command(args_override_self = true)]
    Ed(EdArgs),
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    /// Highest intermediate-state energy, in units of the trap quantum.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub cutoff: u32,
}

#[derive(Debug, Clone, Args)]
pub struct CouplingArgs {
    /// Trap frequency omega/2pi in kHz.
    #[arg(long)]
    pub omega_khz: f64,

    /// Atomic species from the built-in registry.
    #[arg(long, default_value = "Rb87")]
    pub species: String,

    /// Scattering length in nm; defaults to the species value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "xi")]
    pub ascat_nm: Option<f64>,

    /// Dimensionless coupling, bypassing the species parameters.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,

    /// Three-body coefficient; defaults to the converged value.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,

    /// Intrinsic three-body energy in Hz, added to the induced part.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub u3_intrinsic_hz: f64,

    /// Use this three-body energy in Hz outright.
    #[arg(long, allow_hyphen_values = true)]
    pub u3_hz: Option<f64>,

    /// Replace the scattering length by its effective-range corrected value.
    #[arg(long, conflicts_with = "xi")]
    pub effective_range: bool,

    /// Effective range in nm; defaults to the species value.
    #[arg(long, requires = "effective_range")]
    pub re_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RevivalArgs {
    #[command(flatten)]
    pub couplings: CouplingArgs,

    /// Mean atom number per site.
    #[arg(long, default_value_t = 2.5)]
    pub nbar: f64,

    /// Poisson weight allowed beyond the number cutoff.
    #[arg(long, default_value_t = 1e-14)]
    pub tail_tol: f64,

    /// Trace length in units of the two-body revival time.
    #[arg(long, conflicts_with = "tmax_ms")]
    pub tmax_over_t2: Option<f64>,

    /// Trace length in ms.
    #[arg(long)]
    pub tmax_ms: Option<f64>,

    /// Number of grid points, including both ends.
    #[arg(long, default_value_t = 1201)]
    pub steps: usize,

    /// Add the two-body closed-form column.
    #[arg(long)]
    pub closed_form: bool,

    /// Fractional two-body depression at the cloud edge; adds the averaged column when positive.
    #[arg(long, default_value_t = 0.0)]
    pub inhom_eps: f64,

    /// Cloud diameter in lattice sites.
    #[arg(long, default_value_t = 60)]
    pub diameter: u32,

    /// Keep the three-body energy uniform across the cloud.
    #[arg(long)]
    pub no_scale_u3: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.1)]
    pub xi_min: f64,

    #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
    pub xi_max: f64,

    #[arg(long, default_value_t = 41)]
    pub steps: usize,

    /// Three-body coefficient; defaults to the converged value.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EdArgs {
    /// Number of atoms.
    #[arg(long, default_value_t = 3)]
    pub n: u32,

    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub cutoff: u32,

    #[arg(long, default_value_t = 0.07)]
    pub xi: f64,

    /// Largest Fock-space dimension to attempt.
    #[arg(long, default_value_t = threebody::exact_diag::DEFAULT_MAX_DIMENSION)]
    pub max_dimension: usize,
}
