//! Monte Carlo BER/SER over quasistatic Rayleigh fading with ML decoding.
//!
//! Each trial picks a uniform label, draws one channel realization held
//! constant over the whole codeword, adds noise and decodes. The full
//! decoder works on the MIMO link; the equivalent decoder draws the branch
//! gains `c_j = ‖h_j‖` from the same channel law and works directly on the
//! Euclidean code.

pub mod channel;
pub mod decode;
pub mod rng;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CatalogEntry};
use crate::design::average_snr_per_antenna;
use crate::error::{Error, Result};
use crate::special::db_to_linear;

pub use channel::{sample_channel, transmit, transmit_matrix, ChannelRealization, ReceivedSignal};
pub use decode::{
    ml_decode_equivalent, ml_decode_full, project_to_equivalent, projection_basis, EquivalentSimoModel, FullCodebook,
};
pub use rng::{TrialStreams, MAX_TRIALS};

/// Trials per parallel work item.
const CHUNK: u64 = 1 << 12;

/// How the SNR axis is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrMeasure {
    /// Average received SNR per receive antenna and time slot.
    PerAntenna,
    /// `γ̄_b = γ̄_c / log2 M`, the per-branch SNR per information bit.
    PerBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    FullMimo,
    EquivalentSimo,
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $($ty::$variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::Config(format!(concat!("unknown ", stringify!($ty), " '{}'"), other))),
                }
            }
        }
    };
}

text_enum!(SnrMeasure { PerAntenna => "per_antenna", PerBit => "per_bit" });
text_enum!(Decoder { FullMimo => "full_mimo", EquivalentSimo => "equivalent_simo" });

fn default_rho() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Catalog key naming the design and its code.
    pub entry: String,
    pub n_rx: usize,
    pub snr_grid_db: Vec<f64>,
    pub snr_measure: SnrMeasure,
    pub trials: u64,
    pub seed: u64,
    pub decoder: Decoder,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

impl SimConfig {
    pub fn new(entry: impl Into<String>, n_rx: usize, snr_grid_db: Vec<f64>, trials: u64, seed: u64) -> Self {
        Self {
            entry: entry.into(),
            n_rx,
            snr_grid_db,
            snr_measure: SnrMeasure::PerBit,
            trials,
            seed,
            decoder: Decoder::FullMimo,
            rho: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rx == 0 {
            return Err(Error::Config("n_rx must be >= 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("SNR grid must be finite".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.trials > MAX_TRIALS {
            return Err(Error::Config(format!("trials overflow: {} > {MAX_TRIALS}", self.trials)));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::Config(format!("rho must be positive, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Error counts and rates at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateEstimate {
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub ber: f64,
    pub ser: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci95_ber: f64,
    pub ci95_ser: f64,
}

impl ErrorRateEstimate {
    pub fn from_counts(snr_db: f64, trials: u64, bits_per_trial: u32, bit_errors: u64, symbol_errors: u64) -> Self {
        let n_sym = trials as f64;
        let n_bits = n_sym * f64::from(bits_per_trial);
        let ser = symbol_errors as f64 / n_sym;
        let ber = if n_bits > 0.0 { bit_errors as f64 / n_bits } else { 0.0 };
        Self {
            snr_db,
            trials,
            bit_errors,
            symbol_errors,
            ber,
            ser,
            ci95_ber: 1.96 * binomial_std_error(ber, n_bits),
            ci95_ser: 1.96 * binomial_std_error(ser, n_sym),
        }
    }
}

/// `√(p(1 − p)/n)`.
pub fn binomial_std_error(p: f64, n: f64) -> f64 {
    if n > 0.0 {
        (p * (1.0 - p) / n).sqrt()
    } else {
        0.0
    }
}

/// Noise density `N0` giving `snr_db` under `measure`.
pub fn noise_density(entry: &CatalogEntry, measure: SnrMeasure, snr_db: f64, rho: f64) -> Result<f64> {
    let gamma = db_to_linear(snr_db);
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("SNR {snr_db} dB has no finite noise density")));
    }
    match measure {
        SnrMeasure::PerAntenna => Ok(average_snr_per_antenna(&entry.design, &entry.proxies()?, rho, 1.0)? / gamma),
        SnrMeasure::PerBit => {
            let bits = bits_per_codeword(entry)?;
            Ok(rho * entry.code.avg_energy() / (gamma * f64::from(bits)))
        }
    }
}

fn bits_per_codeword(entry: &CatalogEntry) -> Result<u32> {
    entry
        .code
        .bits_per_codeword()
        .filter(|&b| b > 0)
        .ok_or_else(|| Error::Config(format!("{}: code size {} is not a power of two", entry.key, entry.len())))
}

/// Runs `config` against an entry of `catalog`.
pub fn run_monte_carlo(catalog: &Catalog, config: &SimConfig) -> Result<Vec<ErrorRateEstimate>> {
    config.validate()?;
    simulate_entry(catalog.get(&config.entry)?, config)
}

/// Runs `config` against `entry`, ignoring `config.entry`.
pub fn simulate_entry(entry: &CatalogEntry, config: &SimConfig) -> Result<Vec<ErrorRateEstimate>> {
    config.validate()?;
    let bits = bits_per_codeword(entry)?;
    if config.trials.checked_mul(u64::from(bits)).is_none() {
        return Err(Error::Config("trials overflow in bit count".into()));
    }
    let kernel = Kernel::new(entry, config)?;
    config
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let n0 = noise_density(entry, config.snr_measure, snr_db, config.rho)?;
            let streams = TrialStreams::new(config.seed, i as u64);
            let (bit_errors, symbol_errors) = kernel.count(&streams, n0, config.trials);
            Ok(ErrorRateEstimate::from_counts(snr_db, config.trials, bits, bit_errors, symbol_errors))
        })
        .collect()
}

struct Kernel<'a> {
    entry: &'a CatalogEntry,
    book: Option<FullCodebook>,
    n_rx: usize,
    rho: f64,
}

impl<'a> Kernel<'a> {
    fn new(entry: &'a CatalogEntry, config: &SimConfig) -> Result<Self> {
        let book = match config.decoder {
            Decoder::FullMimo => Some(FullCodebook::from_entry(entry)?),
            Decoder::EquivalentSimo => None,
        };
        Ok(Self {
            entry,
            book,
            n_rx: config.n_rx,
            rho: config.rho,
        })
    }

    fn count(&self, streams: &TrialStreams, n0: f64, trials: u64) -> (u64, u64) {
        let chunks = trials.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(trials);
                self.chunk(streams, n0, start..end)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    }

    fn chunk(&self, streams: &TrialStreams, n0: f64, range: std::ops::Range<u64>) -> (u64, u64) {
        let m = self.entry.len();
        let n_tx = self.entry.design.n_tx();
        let mut ch = sample_channel(n_tx, self.n_rx, self.rho, &mut streams.trial(range.start)).expect("validated");
        let sd = (n0 / 2.0).sqrt();
        let (mut bit_errors, mut symbol_errors) = (0u64, 0u64);
        let mut buf = Vec::new();
        let mut gains = vec![0.0; self.n_rx];
        for trial in range {
            let mut rng = streams.trial(trial);
            let u = rng.random_range(0..m);
            ch.fill(&mut rng);
            let decided = match &self.book {
                Some(book) => {
                    buf.clear();
                    let g = book.matrix(u);
                    for j in 0..self.n_rx {
                        for v in g.mul_vec(ch.column(j)) {
                            buf.push(v + channel::complex_normal(&mut rng, sd));
                        }
                    }
                    book.decode(&buf, &ch)
                }
                None => {
                    let s = self.entry.code.codewords()[u].as_slice();
                    let mut y = Vec::with_capacity(s.len() * self.n_rx);
                    for (j, c) in gains.iter_mut().enumerate() {
                        *c = ch.column_norm(j);
                        for &x in s {
                            let noise: f64 = rng.sample(StandardNormal);
                            y.push(*c * x + sd * noise);
                        }
                    }
                    decode::decode_equivalent_flat(&self.entry.code, &gains, &y)
                }
            };
            if decided != u {
                symbol_errors += 1;
                bit_errors += u64::from((decided ^ u).count_ones());
            }
        }
        (bit_errors, symbol_errors)
    }
}
