//! `ostbc`: command-line front end for the ostbc-core analyses.
//!
//! Exit codes: 0 success, 2 usage error, 3 validation error, 4 numeric failure.

mod args;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::Parser;
use ostbc_core::equivalent::{BoundCheck, RankinCertificate};
use ostbc_core::{
    bounds_row, check_rankin_bounds, coxeter_bound, exact_row, qpsk_frame, run_monte_carlo, Catalog, CatalogEntry,
    ErrorRateEstimate, SimConfig,
};
use serde::{Deserialize, Serialize};

use args::{CatalogCommand, Cli, Command, EntryArg, Format, GridArgs, OutputArgs, SimulateArgs};

const MAX_GRID_POINTS: usize = 10_000;

/// A problem with the command line itself.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<ostbc_core::Error>() {
        Some(ostbc_core::Error::Quadrature { .. } | ostbc_core::Error::Domain(_)) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let catalog = load_catalog(cli.catalog.as_deref())?;
    match cli.command {
        Command::Catalog(cmd) => catalog_cmd(&catalog, cmd),
        Command::Spectrum { entry, out } => spectrum_cmd(&catalog, &entry, &out),
        Command::Bounds { entry, nr, grid, out } => bounds_cmd(&catalog, &entry, nr, &grid, &out),
        Command::Exact { nr, k, grid, out } => exact_cmd(nr, k, &grid, &out),
        Command::Simulate(args) => simulate_cmd(&catalog, &args, cli.catalog),
        Command::Replay { manifest, out } => replay_cmd(&catalog, &manifest, &out),
        Command::Checkbounds { entry, out } => checkbounds_cmd(&catalog, &entry, out.as_deref()),
    }
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog> {
    let mut catalog = Catalog::builtin();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading catalog {}", path.display()))?;
        catalog
            .extend_from_json(&text)
            .with_context(|| format!("loading catalog {}", path.display()))?;
    }
    Ok(catalog)
}

fn entry<'a>(catalog: &'a Catalog, arg: &EntryArg) -> Result<&'a CatalogEntry> {
    let key = arg.resolve().ok_or_else(|| usage("an entry key is required (positional or --design)"))?;
    Ok(catalog.get(key)?)
}

fn grid(args: &GridArgs) -> Result<Vec<f64>> {
    if !args.snr_db.is_empty() {
        if args.snr_db.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(usage("--snr-db values must be numbers or -inf"));
        }
        return Ok(args.snr_db.clone());
    }
    let (start, stop, step) = (args.snr_start, args.snr_stop, args.snr_step);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(usage(format!(
            "invalid SNR range start={start} stop={stop} step={step}; need finite values, step > 0, stop >= start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(usage(format!("SNR grid has {count} points, limit is {MAX_GRID_POINTS}")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(rows: &[T], out: &OutputArgs) -> Result<()> {
    match out.format {
        Format::Json => write_json(rows, out.out.as_deref()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(open_output(out.out.as_deref())?);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CatalogRow<'a> {
    key: &'a str,
    design: &'a str,
    n_tx: usize,
    blocks: usize,
    m: usize,
    n: usize,
    notes: &'a str,
}

fn catalog_cmd(catalog: &Catalog, cmd: CatalogCommand) -> Result<()> {
    match cmd {
        CatalogCommand::List { out } => {
            let rows: Vec<CatalogRow> = catalog
                .list()
                .iter()
                .map(|e| CatalogRow {
                    key: &e.key,
                    design: e.design.name(),
                    n_tx: e.design.n_tx(),
                    blocks: e.blocks,
                    m: e.len(),
                    n: e.code.dimension(),
                    notes: &e.notes,
                })
                .collect();
            emit(&rows, &out)
        }
        CatalogCommand::Show { entry: arg, qpsk_frame: rotate, out } => {
            let mut e = entry(catalog, &arg)?.clone();
            if rotate {
                e.code = qpsk_frame(&e.code).map_err(|err| ostbc_core::Error::Catalog(err.to_string()))?;
            }
            write_json(&e, out.as_deref())
        }
        CatalogCommand::Export { out } => {
            let text = catalog.to_json()?;
            let mut w = open_output(out.as_deref())?;
            writeln!(w, "{text}")?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    distance: f64,
    distance_sq: f64,
    multiplicity: usize,
}

fn spectrum_cmd(catalog: &Catalog, arg: &EntryArg, out: &OutputArgs) -> Result<()> {
    let spectrum = entry(catalog, arg)?.spectrum()?;
    let rows: Vec<SpectrumRow> = spectrum
        .lines
        .iter()
        .map(|l| SpectrumRow {
            distance: l.distance,
            distance_sq: l.distance * l.distance,
            multiplicity: l.multiplicity,
        })
        .collect();
    emit(&rows, out)
}

#[derive(Serialize)]
struct BoundsCsvRow {
    snr_measure: &'static str,
    snr_db: f64,
    union_bound: f64,
    asymptotic_bound: f64,
    min_distance_bound: f64,
}

fn bounds_cmd(catalog: &Catalog, arg: &EntryArg, nr: usize, grid_args: &GridArgs, out: &OutputArgs) -> Result<()> {
    if nr == 0 {
        return Err(usage("--nr must be >= 1"));
    }
    let e = entry(catalog, arg)?;
    let spectrum = e.spectrum()?;
    let k = u32::try_from(e.design.n_tx() * nr).map_err(|_| usage("--nr too large"))?;
    let rows = grid(grid_args)?
        .into_iter()
        .map(|db| {
            let r = bounds_row(&spectrum, k, db)?;
            Ok(BoundsCsvRow {
                snr_measure: "gamma_c",
                snr_db: r.snr_db,
                union_bound: r.union_bound,
                asymptotic_bound: r.asymptotic_bound,
                min_distance_bound: r.min_distance_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&rows, out)
}

#[derive(Serialize)]
struct ExactCsvRow {
    snr_measure: &'static str,
    snr_db: f64,
    ber_exact: f64,
    ser_exact: f64,
}

fn exact_cmd(nr: usize, k: Option<u32>, grid_args: &GridArgs, out: &OutputArgs) -> Result<()> {
    let k = match k {
        Some(0) => return Err(usage("--k must be >= 1")),
        Some(k) => k,
        None if nr == 0 => return Err(usage("--nr must be >= 1")),
        None => u32::try_from(2 * nr).map_err(|_| usage("--nr too large"))?,
    };
    let rows = grid(grid_args)?
        .into_iter()
        .map(|db| {
            let r = exact_row(k, db)?;
            Ok(ExactCsvRow {
                snr_measure: "per_bit",
                snr_db: r.snr_db,
                ber_exact: r.ber_exact,
                ser_exact: r.ser_exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&rows, out)
}

/// Everything needed to rerun a simulation bit for bit.
#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    command: String,
    config: SimConfig,
    seed: u64,
    catalog_file: Option<PathBuf>,
    core_version: String,
    cli_version: String,
    timestamp_unix: u64,
}

#[derive(Serialize)]
struct SimCsvRow {
    snr_measure: &'static str,
    snr_db: f64,
    trials: u64,
    bit_errors: u64,
    symbol_errors: u64,
    ber: f64,
    ser: f64,
    ci95_ber: f64,
    ci95_ser: f64,
}

fn emit_estimates(config: &SimConfig, estimates: &[ErrorRateEstimate], out: &OutputArgs) -> Result<()> {
    let rows: Vec<SimCsvRow> = estimates
        .iter()
        .map(|e| SimCsvRow {
            snr_measure: config.snr_measure.as_str(),
            snr_db: e.snr_db,
            trials: e.trials,
            bit_errors: e.bit_errors,
            symbol_errors: e.symbol_errors,
            ber: e.ber,
            ser: e.ser,
            ci95_ber: e.ci95_ber,
            ci95_ser: e.ci95_ser,
        })
        .collect();
    emit(&rows, out)
}

fn simulate_cmd(catalog: &Catalog, args: &SimulateArgs, catalog_file: Option<PathBuf>) -> Result<()> {
    let key = args
        .entry
        .resolve()
        .ok_or_else(|| usage("an entry key is required (positional or --design)"))?;
    let config = SimConfig {
        entry: key.to_string(),
        n_rx: args.nr,
        snr_grid_db: grid(&args.grid)?,
        snr_measure: args.snr_measure,
        trials: args.trials,
        seed: args.seed,
        decoder: args.decoder,
        rho: 1.0,
    };
    let estimates = run_monte_carlo(catalog, &config)?;
    emit_estimates(&config, &estimates, &args.out)?;
    let manifest_path = args.manifest.clone().or_else(|| {
        args.out.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            command: "simulate".into(),
            seed: config.seed,
            config,
            catalog_file,
            core_version: ostbc_core::VERSION.into(),
            cli_version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        write_json(&manifest, Some(&path))?;
    }
    Ok(())
}

fn replay_cmd(catalog: &Catalog, path: &Path, out: &OutputArgs) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))?;
    let extra;
    let catalog = match &manifest.catalog_file {
        Some(file) => {
            extra = load_catalog(Some(file))?;
            &extra
        }
        None => catalog,
    };
    let estimates = run_monte_carlo(catalog, &manifest.config)?;
    emit_estimates(&manifest.config, &estimates, out)
}

#[derive(Serialize)]
struct Certificate<'a> {
    key: &'a str,
    m: usize,
    n: usize,
    d_min_sq: f64,
    rankin_first: BoundCheck,
    rankin_second: Option<BoundCheck>,
    rankin_third: Option<BoundCheck>,
    coxeter_bound: Option<f64>,
    coxeter_holds: Option<bool>,
}

fn checkbounds_cmd(catalog: &Catalog, arg: &EntryArg, out: Option<&Path>) -> Result<()> {
    let e = entry(catalog, arg)?;
    let cert: RankinCertificate = check_rankin_bounds(&e.code)?;
    // the Coxeter bound is only available for dimensions with a Schläfli function
    let coxeter = u32::try_from(cert.n)
        .ok()
        .and_then(|n| coxeter_bound(n, cert.d_min_sq.sqrt()).ok());
    write_json(
        &Certificate {
            key: &e.key,
            m: cert.m,
            n: cert.n,
            d_min_sq: cert.d_min_sq,
            rankin_first: cert.first,
            rankin_second: cert.second,
            rankin_third: cert.third,
            coxeter_bound: coxeter,
            coxeter_holds: coxeter.map(|b| cert.m as f64 <= b + 1e-6),
        },
        out,
    )
}
