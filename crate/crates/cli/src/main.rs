//! `kexshard`: key generation, splitting, reconstruction, attacks, analysis
//! and benchmarks.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kexshard::schemes::{FragmentationPolicy, SchemeId};

use crate::output::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "kexshard", version, about = "Secret sharing resilient to key exposure")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random key file.
    Keygen(KeygenArgs),
    /// Share a file into n containers.
    Split(SplitArgs),
    /// Rebuild a file from its containers.
    Reconstruct(ReconstructArgs),
    /// Play an indistinguishability game at a toy width.
    Attack(AttackArgs),
    /// Run a uniformity or matrix check.
    Analyze(AnalyzeArgs),
    /// Measure throughput and accounting.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    pub out: PathBuf,
    /// Key width; 128 for AES, 8 or 16 for toy suites.
    #[arg(long, default_value_t = 128)]
    pub bits: u32,
    #[arg(long)]
    pub force: bool,
    /// Derive the key from a seed instead of system entropy.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    pub input: PathBuf,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: SchemeId,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub key_file: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = parse_policy, default_value = "contiguous")]
    pub policy: FragmentationPolicy,
    /// Object name for the container files; defaults to the input file name.
    #[arg(long)]
    pub name: Option<String>,
    /// Block width when no key file fixes it.
    #[arg(long, default_value_t = 128)]
    pub bits: u32,
    /// Seed of the toy permutations when the width is below 128.
    #[arg(long, default_value_t = 0)]
    pub toy_seed: u64,
    /// Draw IVs and shares from a seed instead of system entropy.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Glob matching the container files.
    #[arg(long)]
    pub shares: String,
    #[arg(long)]
    pub key_file: Option<PathBuf>,
    #[arg(long, required_unless_present = "verify")]
    pub out: Option<PathBuf>,
    /// Compare the result with this file; exit 2 when they differ.
    #[arg(long)]
    pub verify: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub toy_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Game {
    Sake,
    Cake,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[arg(long, value_enum, default_value_t = Game::Sake)]
    pub game: Game,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: SchemeId,
    #[arg(long)]
    pub adversary: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, env = "KEXSHARD_TOY_BITS", default_value_t = 12)]
    pub toy_bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Plaintext blocks per challenge message.
    #[arg(long, default_value_t = 8)]
    pub blocks: usize,
    /// Blocks withheld in the CAKE game.
    #[arg(long, default_value_t = 1)]
    pub lambda: usize,
    #[arg(long, value_parser = parse_policy, default_value = "contiguous")]
    pub policy: FragmentationPolicy,
    /// IV candidates tried by `iv-guess`.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Prop1,
    Prop4,
    Matrices,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, env = "KEXSHARD_TOY_BITS", default_value_t = 10)]
    pub toy_bits: u32,
    #[arg(long, default_value_t = 4)]
    pub c: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace the random permutation by `x -> x ^ VALUE`.
    #[arg(long, num_args = 0..=1, default_missing_value = "1")]
    pub linear_sigma: Option<u128>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme,
          default_value = "ctr-naive,ssms,ssake,rossake-bc,rossake-sponge,bastion,rivest-aont,rivest-aon")]
    pub schemes: Vec<SchemeId>,
    /// Input sizes; accepts K, KiB, M, MiB suffixes.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "1MiB")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = kexshard::bench::DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_parser = parse_policy, default_value = "contiguous")]
    pub policy: FragmentationPolicy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> Result<SchemeId, String> {
    s.parse().map_err(|e: kexshard::error::Error| e.to_string())
}

fn parse_policy(s: &str) -> Result<FragmentationPolicy, String> {
    s.parse().map_err(|e: kexshard::error::Error| e.to_string())
}

fn parse_size(s: &str) -> Result<usize, String> {
    let t = s.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let base: usize = num.parse().map_err(|_| format!("bad size '{s}'"))?;
    let mult = match unit.to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kib" => 1 << 10,
        "m" | "mib" => 1 << 20,
        "g" | "gib" => 1 << 30,
        "kb" => 1_000,
        "mb" => 1_000_000,
        _ => return Err(format!("bad size unit in '{s}'")),
    };
    base.checked_mul(mult).ok_or_else(|| format!("size '{s}' overflows"))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Keygen(a) => commands::keygen(a),
        Command::Split(a) => commands::split(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Attack(a) => commands::attack(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Bench(a) => commands::bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { output::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    output::finish(run(cli), json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_size("64MiB"), Ok(64 << 20));
        assert_eq!(parse_size("1000"), Ok(1000));
        assert_eq!(parse_size("2kb"), Ok(2000));
        assert!(parse_size("3parsecs").is_err());
        assert!(parse_size("MiB").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
