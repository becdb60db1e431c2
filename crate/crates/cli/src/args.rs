use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sagrover_core::Backend;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "sagrover", version, about = "Hybrid annealing / Grover QUBO toolkit")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for the simulator (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    ClassicalExhaustive,
    GroverSemantic,
    GroverCircuit,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::ClassicalExhaustive => Backend::ClassicalExhaustive,
            BackendArg::GroverSemantic => Backend::GroverSemantic,
            BackendArg::GroverCircuit => Backend::GroverCircuit,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize a model with classical or hybrid annealing.
    Solve(SolveArgs),
    /// Fix variables and write the reduced model.
    Reduce(ReduceArgs),
    /// Synthesize the reversible cost circuit of a model.
    Synth(SynthArgs),
    /// Evaluate the analytic runtime model over a range of q.
    Model(ModelArgs),
    /// Built-in circuit/classical agreement check on the 5-variable example.
    Verify(VerifyArgs),
    /// Generate a random integer model.
    Gen(GenArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Hybrid)]
    pub mode: Mode,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::GroverSemantic)]
    #[serde(skip)]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 1000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 2.0)]
    pub initial_temperature: f64,
    #[arg(long, default_value_t = 0.995)]
    pub cooling_factor: f64,
    /// Per-step oracle budget is call_factor * 2^(q/2).
    #[arg(long, default_value_t = 50.0)]
    pub call_factor: f64,
    #[arg(long, default_value_t = 3)]
    pub patience: usize,
    /// Include the per-iteration best-cost trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ReduceArgs {
    pub model: PathBuf,
    /// Fix a variable, as `index=value`. Repeatable.
    #[arg(long = "fix", value_name = "I=B")]
    pub fix: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    pub model: PathBuf,
    /// Simulate every basis input and compare with the classical cost.
    #[arg(long)]
    pub verify: bool,
    /// Also write the gate list to this file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Seconds per QUBO evaluation.
    #[arg(long, default_value_t = 0.228)]
    pub t_q: f64,
    /// Residual seconds per annealing iteration.
    #[arg(long, default_value_t = 1.3e-4)]
    pub t_det: f64,
    #[arg(long, default_value_t = 100.0)]
    pub q_oh: f64,
    #[arg(long, default_value_t = 1e10)]
    pub sa_total: f64,
    #[arg(long, default_value_t = 1e5)]
    pub normalization: f64,
    #[arg(long, default_value_t = 2)]
    pub q_min: u32,
    #[arg(long, default_value_t = 20)]
    pub q_max: u32,
    #[arg(long, default_value_t = 2)]
    pub q_step: u32,
    /// Relative-gain threshold for the saturation point.
    #[arg(long, default_value_t = sagrover_core::runtime::DEFAULT_SATURATION_EPSILON)]
    pub epsilon: f64,
    /// Where to write the log-scale plot CSV.
    #[arg(long)]
    pub plot_output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Corrupt one coefficient before synthesis.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Coefficients are drawn from [-range, range] without zero.
    #[arg(long, default_value_t = 5)]
    pub range: u32,
}
