use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "equispec", version, about = "Eta invariants, heat traces and equivariant indices")]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eta function of a Dirac-type model by a chosen route.
    Eta(EtaArgs),
    /// Exact and floating eta invariant of a lens space.
    LensEta(LensArgs),
    /// Equivariant Euler characteristics.
    Euler(EulerArgs),
    /// Dolbeault index of CP^n on one isotype.
    Dolbeault(DolbeaultArgs),
    /// Fit a small-time heat-trace expansion with log terms.
    HeatFit(HeatFitArgs),
    /// Graded supertrace at several times.
    MckeanSinger(McKeanArgs),
    /// Residual of ind D = c0 - (h + eta) / 2.
    ApsCheck(ApsArgs),
    /// Counting function and Weyl exponent.
    Weyl(WeylArgs),
    /// Golden tables and invariant checks.
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eta(_) => "eta",
            Command::LensEta(_) => "lens-eta",
            Command::Euler(_) => "euler",
            Command::Dolbeault(_) => "dolbeault",
            Command::HeatFit(_) => "heat-fit",
            Command::MckeanSinger(_) => "mckean-singer",
            Command::ApsCheck(_) => "aps-check",
            Command::Weyl(_) => "weyl",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiracModel {
    /// `D = -i d/dx + a` on the circle.
    Circle,
    /// A spectral model document, see `--file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    Hurwitz,
    Mellin,
    Kroute,
    Series,
}

#[derive(Debug, Args)]
pub struct EtaArgs {
    #[arg(long, value_enum, default_value = "circle")]
    pub model: DiracModel,
    /// Spectral shift of the circle operator, in (0, 1).
    #[arg(long)]
    pub a: Option<f64>,
    /// Order of the cyclic group acting by rotation.
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[arg(long, default_value_t = 50.0)]
    pub cutoff: f64,
    /// Model JSON for `--model file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub route: RouteArg,
    #[arg(long, default_value_t = 0.0)]
    pub z: f64,
    /// Restrict to one isotype, given by character exponents `e1,e2,...`.
    #[arg(long)]
    pub rho: Option<String>,
    /// Kernel dimension for the K route; defaults to the model's kernel.
    #[arg(long)]
    pub h: Option<u64>,
    /// Also report alpha(t), K(t), the heat trace and the K' residual at these times.
    #[arg(long, value_delimiter = ',')]
    pub probe_t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct LensArgs {
    #[arg(long)]
    pub m: u64,
    /// Rotation numbers `r_1,...,r_n`, each a unit mod m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub rot: Vec<i64>,
    /// Character index; every ell when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Manifold {
    /// T^2 with the quarter-turn Z_4 action.
    Torus,
    Sphere,
    /// Integer matrices read from `--action-file`.
    Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SphereMode {
    Latitude,
    Antipodal,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long, value_enum, default_value = "torus")]
    pub manifold: Manifold,
    /// Character: an exponent for cyclic actions, `trivial` or `xi` for spheres.
    #[arg(long)]
    pub rho: Option<String>,
    /// Sphere dimension.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<SphereMode>,
    /// `{"order": m, "degrees": [[[...]], ...]}` with integer entries.
    #[arg(long)]
    pub action_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Triviality {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Args)]
pub struct DolbeaultArgs {
    #[arg(long)]
    pub n: u32,
    /// Form degree; every j in 0..=n when omitted.
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long, value_enum, default_value = "trivial")]
    pub rho: Triviality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceModel {
    /// `d^2/dx^2` on the circle, `Tr e^{tL} ~ sqrt(pi / t)`.
    CircleLaplacian,
    /// The Dirac circle, `Tr e^{-t D^2}`.
    Circle,
    /// The flat square torus.
    Torus,
}

#[derive(Debug, Args)]
pub struct HeatFitArgs {
    /// CSV with header `t,value`.
    #[arg(long, conflicts_with = "model")]
    pub samples: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<TraceModel>,
    #[arg(long, default_value_t = 0.25)]
    pub a: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Restrict the generated trace to one isotype.
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Sampling interval `lo,hi` for generated traces.
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-2")]
    pub t_range: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub i_min: i32,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub i_max: i32,
    #[arg(long, default_value_t = 1)]
    pub j_max: u32,
    /// Write the generated samples as CSV.
    #[arg(long)]
    pub write_samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McKeanArgs {
    #[arg(long, default_value_t = 0)]
    pub plus_ker: u64,
    #[arg(long, default_value_t = 0)]
    pub minus_ker: u64,
    /// Nonzero eigenvalues of D^- D^+, one per multiplicity.
    #[arg(long, value_delimiter = ',')]
    pub paired: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-2,1e-1,1,10")]
    pub t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ApsArgs {
    #[arg(long, allow_hyphen_values = true, required_unless_present = "pipeline")]
    pub index: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub h: u64,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "pipeline")]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "pipeline")]
    pub c0: Option<f64>,
    /// Build c0 from a fitted supertrace on a synthetic cylinder over the
    /// circle with shift `--a`.
    #[arg(long, conflicts_with_all = ["index", "eta", "c0"])]
    pub pipeline: bool,
    #[arg(long, default_value_t = 0.25)]
    pub a: f64,
    /// Residual allowed in pipeline mode.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct WeylArgs {
    #[arg(long, value_enum, default_value = "torus")]
    pub model: TraceModel,
    #[arg(long, default_value_t = 60.0)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 0.25)]
    pub a: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Also report N(T) at these thresholds.
    #[arg(long, value_delimiter = ',')]
    pub count: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(value_enum, default_value = "fast")]
    pub level: Level,
    /// Golden tables to check against instead of the built-in ones.
    #[arg(long)]
    pub golden: Option<PathBuf>,
}
