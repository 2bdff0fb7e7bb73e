use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use overlap_core::{Bitstring, ProtocolKind};

#[derive(Debug, Parser)]
#[command(
    name = "overlap",
    version,
    about = "Scalar products of quantum states: protocols, synthesis and resource counts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate <B|A> for two seeded random states with one protocol.
    Overlap(OverlapArgs),
    /// Hadamard versus one-control resource scan for a separable A and a dense B.
    Resources(ResourcesArgs),
    /// Write a protocol circuit in the text format.
    Synth(SynthArgs),
    /// Run the cross-agreement, qubit-count, CSWAP and transpile suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    Classical,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    Real,
    Imag,
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse().map_err(|e: overlap_core::Error| e.to_string())
}

fn parse_bitstring(s: &str) -> Result<Bitstring, String> {
    s.parse().map_err(|e: overlap_core::Error| e.to_string())
}

/// The two states: `A = random_state(n, seed)`, `B = random_state(n, seed_b)`.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// swap, vacuum, hadamard, one-control or zero-control.
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: ProtocolKind,
    /// Qubits per state.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Seed of A (and of shot sampling).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of B; defaults to seed + 1.
    #[arg(long)]
    pub seed_b: Option<u64>,
    /// Projection bitstring for the one-control test, most significant qubit first.
    #[arg(long, value_parser = parse_bitstring)]
    pub projection: Option<Bitstring>,
    /// Zero the |0...0> amplitude of B and renormalize.
    #[arg(long)]
    pub null_b0: bool,
}

impl StateArgs {
    pub fn seed_b(&self) -> u64 {
        self.seed_b.unwrap_or(self.seed.wrapping_add(1))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub states: StateArgs,
    /// Total shots over all circuits; 0 evaluates exactly.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    /// How the reference amplitudes are obtained.
    #[arg(long, value_enum, default_value_t = Reference::Classical)]
    pub reference: Reference,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ResourcesArgs {
    /// Smallest block size.
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    /// Largest block size.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Number of blocks in A.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub states: StateArgs,
    #[arg(long, value_enum, default_value_t = PartArg::Real)]
    pub part: PartArg,
    /// Lower to {cz, rz, sx, x} first.
    #[arg(long)]
    pub transpile: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Smaller configurations.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub inject_sign_fault: bool,
}
