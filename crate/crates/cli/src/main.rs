//! `nilwitness`: classification, rank sweeps and verification suites from the command line.
//!
//! Reports are JSON on stdout (or `--output`); `grow` can also write CSV.
//! The exit code is 0 when every requested check passes, 1 when a check fails and
//! 2 on malformed input.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used by randomized suites when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x6e69_6c77;

#[derive(Parser, Debug)]
#[command(
    name = "nilwitness",
    version,
    about = "Type I criteria and finite witnesses for two-step nilpotent groups over F_p((t))"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Report format; csv is only available for rank sweeps.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Print the mathematical statement behind the command to stderr.
    #[arg(long, global = true)]
    pub explain: bool,
    /// Print report notes to stderr.
    #[arg(long, short, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// An eventually periodic sequence, given as the 0/1 sequence `s` or directly as `sigma`.
#[derive(Args, Debug, Clone)]
pub struct SeqArgs {
    /// The prime p.
    #[arg(long = "p", default_value_t = 2)]
    pub p: u32,
    /// The 0/1 sequence s, e.g. `--s prefix=[1] period=[0]`.
    #[arg(long = "s", num_args = 1.., value_name = "SPEC", conflicts_with = "sigma")]
    pub s: Option<Vec<String>>,
    /// The odd sequence sigma of the monomial commutation relations.
    #[arg(long, num_args = 1.., value_name = "SPEC")]
    pub sigma: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify by the symbolic type I criteria.
    Classify {
        #[command(flatten)]
        seq: SeqArgs,
    },
    /// Gram rank sweep of B_chi over shrinking windows [i_0, K_0].
    Grow {
        #[command(flatten)]
        seq: SeqArgs,
        /// Character as JSON, a Laurent polynomial such as `t^-7 + t^-13`, or a file holding either.
        #[arg(long, conflicts_with = "witness")]
        chi: Option<String>,
        /// Use the witness character, e.g. `--witness d=1 M=4`.
        #[arg(long, num_args = 1.., value_name = "d=D M=M")]
        witness: Option<Vec<String>>,
        /// Comma-separated, strictly decreasing i_0 values.
        #[arg(long, allow_hyphen_values = true, default_value = "-4,-8,-16,-32")]
        schedule: String,
    },
    /// Build a witness character and check its symplectic blocks.
    Witness {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 1)]
        d: u64,
        /// Number of blocks.
        #[arg(long = "M", alias = "m", default_value_t = 4)]
        blocks: usize,
    },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Build the window quotient Q and its envelope, and report their structure.
    Extend {
        #[command(flatten)]
        ext: ExtArgs,
    },
    /// Check bilinearity of user-supplied structure constants.
    Bilinear {
        /// Structure constants JSON, inline or as a file path.
        #[arg(long)]
        constants: String,
        /// Twist the first slot by the Frobenius before checking.
        #[arg(long)]
        twist: bool,
        /// Also build E(g) from the constants and check its literal commutators.
        #[arg(long)]
        lazard: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum Suite {
    /// Cocycle identity and shift equivariance on a monomial window.
    Cocycle {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-6..6")]
        window: String,
        /// Random non-monomial triples on top of the exhaustive monomial check.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Closed form, antisymmetrized cocycle and literal commutators agree.
    Commutator {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-5..5")]
        window: String,
    },
    /// Class two, center and surjectivity of omega_sigma for the envelope.
    Extension {
        #[command(flatten)]
        ext: ExtArgs,
    },
    /// Bilinearity of the commutator map of a named group.
    Bilinear {
        #[command(flatten)]
        group: GroupArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ExtArgs {
    #[arg(long = "p", default_value_t = 2)]
    pub p: u32,
    /// Basis exponents, `0,2` or `lo..hi`.
    #[arg(long, allow_hyphen_values = true, default_value = "0,2")]
    pub window: String,
    /// The sequence s of eta_s (default: s = delta_1).
    #[arg(long = "s", num_args = 1.., value_name = "SPEC")]
    pub s: Option<Vec<String>>,
    /// Character (default: coefficient 1 on every exponent between the smallest and largest basis exponent).
    #[arg(long)]
    pub chi: Option<String>,
    /// A window group JSON with an explicit pairing; overrides the cocycle options.
    #[arg(long, conflicts_with_all = ["s", "chi", "heisenberg_blocks"])]
    pub pairing: Option<String>,
    /// Use n standard Heisenberg blocks instead of a cocycle.
    #[arg(long, conflicts_with_all = ["s", "chi"])]
    pub heisenberg_blocks: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Heisenberg,
    Lazard,
    PseudoQuadratic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalars {
    /// The fixed field F_q.
    Base,
    /// The quadratic extension F_{q^2}.
    Extension,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    #[arg(long, value_enum)]
    pub group: GroupKind,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Lie bracket structure constants (default: the 3-dimensional Heisenberg algebra over F_q).
    #[arg(long)]
    pub constants: Option<String>,
    /// Pseudo-quadratic data `{"q":..,"n":..,"h":[[..]]}` (default: a diagonal skew-hermitian form).
    #[arg(long)]
    pub hermitian: Option<String>,
    /// Scalars for the pseudo-quadratic model.
    #[arg(long, value_enum, default_value_t = Scalars::Base)]
    pub over: Scalars,
    /// Twist the commutator map by the Frobenius on its first slot.
    #[arg(long)]
    pub twist: bool,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("NILWITNESS_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("NILWITNESS_THREADS must be a positive integer, got {value:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads().and_then(|()| commands::run(&cli));
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
