use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "rotorwalk", version, about = "Recurrence and transience of rotor walks on ℕ and T_d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recurrence verdict for a model (unary when --d 1, tree otherwise).
    Classify(ClassifyArgs),
    /// The k* criterion on ℕ, for right or left excursions.
    Kstar(KstarArgs),
    /// First-moment matrix of the type process.
    MomentMatrix(MatrixArgs),
    /// Certified spectral radius of a moment matrix.
    SpectralRadius(SpectralArgs),
    /// Standard-piece decomposition of a T_2 sequence.
    Decompose(DecomposeArgs),
    /// Exhaustive sweep over balanced sequences of one period.
    Sweep(SweepArgs),
    /// Z-process of one assignment.
    Simulate(SimulateArgs),
    /// Successive excursions of the explicit rotor walk.
    Excursions(ExcursionArgs),
    /// Seeded trials over sampled configurations.
    Montecarlo(MonteCarloArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Rotation,
    Shift,
    Custom,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Rotation => "rotation",
            Model::Shift => "shift",
            Model::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Side {
    #[default]
    Right,
    Left,
    Both,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::Both => "both",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Tree degree; 1 is the half-line ℕ.
    #[arg(long = "d", default_value_t = 1)]
    pub degree: u32,
    /// Rotor sequence `PRE(PERIOD)`; repeat to cycle a list by vertex index.
    #[arg(long = "seq")]
    pub seq: Vec<String>,
    /// Distribution `SEQ=p/q;SEQ=p/q;…`.
    #[arg(long = "dist")]
    pub dist: Option<String>,
    /// How a single --seq expands into a distribution.
    #[arg(long = "model", value_enum)]
    pub model: Option<Model>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    #[arg(long = "format", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for sweeps and trials.
    #[arg(long = "jobs")]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Spectral {
    /// Number of types `K` (defaults to `N` for balanced input).
    #[arg(long = "types")]
    pub types: Option<usize>,
    /// Width of the certified enclosure, as a rational.
    #[arg(long = "tol")]
    pub tol: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct KstarArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long = "side", value_enum, default_value_t = Side::Right)]
    pub side: Side,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub input: Input,
    /// Explicit matrix, rows separated by `;` and entries by `,`.
    #[arg(long = "matrix")]
    pub matrix: Option<String>,
    #[command(flatten)]
    pub spectral: Spectral,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long = "d", default_value_t = 2)]
    pub degree: u32,
    /// Period length.
    #[arg(long = "L")]
    pub period: usize,
    #[arg(long = "model", value_enum, default_value_t = Model::Shift)]
    pub model: Model,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct Walk {
    /// Initial type, or number of excursions.
    #[arg(long = "k", default_value_t = 1)]
    pub k: u64,
    #[arg(long = "seed", default_value_t = 0)]
    pub seed: u64,
    /// Steps per excursion, Z-steps, or Z-tree nodes.
    #[arg(long = "budget")]
    pub budget: Option<u64>,
    /// Depth at which a walk counts as escaped.
    #[arg(long = "escape", default_value_t = 30)]
    pub escape: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub walk: Walk,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct ExcursionArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub walk: Walk,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub walk: Walk,
    #[arg(long = "trials", default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub output: Output,
}
