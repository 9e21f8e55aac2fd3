use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ostbc_core::{Decoder, SnrMeasure};

/// Environment variable naming an extra catalog file.
pub const CATALOG_ENV: &str = "OSTBC_CATALOG";

#[derive(Debug, Parser)]
#[command(name = "ostbc", version, about = "Spectra, bounds, exact error rates and fading simulations for OSTBCs")]
pub struct Cli {
    /// JSON catalog whose entries are added to the built-in ones.
    #[arg(long, global = true, env = CATALOG_ENV, value_name = "PATH")]
    pub catalog: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect or export the catalog.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Normalized distance spectrum of an entry.
    Spectrum {
        #[command(flatten)]
        entry: EntryArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Union, asymptotic and minimum-distance SER bounds; the SNR axis is γ̄_c.
    Bounds {
        #[command(flatten)]
        entry: EntryArg,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact Alamouti-BPSK BER and SER; the SNR axis is γ̄_b.
    Exact {
        #[arg(long, default_value_t = 1)]
        nr: usize,
        /// Diversity order K directly, instead of 2·nr.
        #[arg(long, conflicts_with = "nr")]
        k: Option<u32>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo BER/SER over quasistatic Rayleigh fading.
    Simulate(SimulateArgs),
    /// Rerun the simulation recorded in a manifest.
    Replay {
        manifest: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rankin and Coxeter certificate for a spherical entry, as JSON.
    Checkbounds {
        #[command(flatten)]
        entry: EntryArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// One row per entry.
    List {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// One entry as JSON.
    Show {
        #[command(flatten)]
        entry: EntryArg,
        /// Rotate 4-D blocks so every symbol is a QPSK point (display only).
        #[arg(long)]
        qpsk_frame: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The whole catalog as a JSON file that `--catalog` accepts.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An entry key, given positionally or with `--design`/`--code`.
#[derive(Debug, Clone, Args)]
pub struct EntryArg {
    #[arg(value_name = "KEY")]
    pub key: Option<String>,
    #[arg(long = "design", visible_alias = "code", value_name = "KEY", conflicts_with = "key")]
    pub design: Option<String>,
}

impl EntryArg {
    pub fn resolve(&self) -> Option<&str> {
        self.key.as_deref().or(self.design.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub snr_start: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 20.0)]
    pub snr_stop: f64,
    #[arg(long, default_value_t = 2.0)]
    pub snr_step: f64,
    /// Explicit comma-separated grid in dB (accepts -inf); overrides the range.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub entry: EntryArg,
    #[arg(long, default_value_t = 1)]
    pub nr: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "per_bit")]
    pub snr_measure: SnrMeasure,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "full_mimo")]
    pub decoder: Decoder,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Manifest path; defaults to `<out>.manifest.json` when `--out` is set.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}
