//! `intricacy` command-line front end.

mod commands;
mod output;
mod ranges;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use intricacy::info::{DEFAULT_SUBSET_CAP, DEFAULT_SUPPORT_CAP};
use intricacy::Family;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "intricacy", version, about = "Entropy profiles and intricacy of finite discrete systems")]
struct Cli {
    /// Write the data payload here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for the parallel loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest N for exhaustive subset enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_SUBSET_CAP)]
    cap_subsets: usize,
    /// Largest support size (or number of draws) accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_SUPPORT_CAP)]
    cap_support: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint entropy in nats and normalized by N log d.
    Entropy {
        law: PathBuf,
    },
    /// Entropy profile k ↦ h(k/N), exact or sampled.
    Profile {
        law: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        /// Subset sizes to sample (default: all).
        #[arg(long, value_delimiter = ',', requires = "sampled")]
        sizes: Option<Vec<usize>>,
    },
    /// Deficit report of a law for each family.
    Intricacy {
        law: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "est", value_parser = parse_family)]
        family: Vec<Family>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Coefficient table, D_N law and validation of a mixing measure.
    Coeffs {
        #[arg(long, value_parser = parse_family, conflicts_with = "measure", required_unless_present = "measure")]
        family: Option<Family>,
        /// Mixing measure JSON file: {"atoms": [[w, mass], ...], "lebesgue": m}.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long = "N")]
        n: usize,
    },
    /// Samples the sparse random construction and writes its law as JSON.
    Construct {
        #[command(flatten)]
        spec: ConstructArgs,
    },
    /// Convergence sweep over N and seeds, one CSV row per (family, N, seed).
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "est", value_parser = parse_family)]
        family: Vec<Family>,
        #[arg(long)]
        d: u32,
        /// Target normalized entropy; M = ⌊xN⌋.
        #[arg(long)]
        x: f64,
        /// System sizes, e.g. `8,12,16` or `8..16:4`.
        #[arg(long = "N", value_parser = parse_sizes)]
        n: List<usize>,
        /// Seeds, e.g. `0..19`.
        #[arg(long, value_parser = parse_seeds)]
        seeds: List<u64>,
    },
    /// Threshold census of a constructed law at one or more subset fractions y.
    Census {
        #[command(flatten)]
        spec: ConstructArgs,
        /// Label written in the family column.
        #[arg(long, default_value = "est", value_parser = parse_family)]
        family: Family,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Seed of the subset draws.
        #[arg(long)]
        census_seed: u64,
        /// Enumerate every subset (N ≤ 20).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Searches for high-intricacy laws, one CSV row per restart.
    Maximize {
        #[arg(long)]
        d: u32,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value = "est", value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 1500)]
        iterations: usize,
        #[arg(long)]
        seed: u64,
        /// Soft target for the normalized entropy.
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 1.0, requires = "x")]
        penalty: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Also write the best law as JSON.
        #[arg(long)]
        save_law: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Sampling {
    /// Estimate the profile from random subsets instead of enumerating.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value_t = 1000, requires = "sampled")]
    samples: usize,
    #[arg(long, required_if_eq("sampled", "true"))]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    d: u32,
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "M", conflicts_with = "x", required_unless_present = "x")]
    m: Option<usize>,
    /// Target normalized entropy; M = ⌊xN⌋.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    seed: u64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: intricacy::Error| e.to_string())
}

/// A parsed `--N` or `--seeds` list.
#[derive(Debug, Clone)]
struct List<T>(Vec<T>);

fn parse_sizes(s: &str) -> Result<List<usize>, String> {
    Ok(List(ranges::parse_list(s)?.into_iter().map(|v| v as usize).collect()))
}

fn parse_seeds(s: &str) -> Result<List<u64>, String> {
    ranges::parse_list(s).map(List)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<intricacy::Error>() {
        Some(intricacy::Error::Cap { .. }) => 3,
        Some(intricacy::Error::Io(_)) => 1,
        Some(_) => 2,
        None if err.downcast_ref::<std::io::Error>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
