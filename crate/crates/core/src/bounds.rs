//! Pairwise error probability and union bounds over a distance spectrum.
//!
//! For normalized distance `d̃` and average received code-to-noise ratio
//! `γ̄_c`, the PEP on an i.i.d. Rayleigh channel with diversity `K = N_T N_R`
//! depends only on `μ = √(d̃²γ̄_c / (4 + d̃²γ̄_c))`.

use serde::{Deserialize, Serialize};

use crate::equivalent::{ndsc, DistanceSpectrum};
use crate::error::{Error, Result};
use crate::special::binomial;

/// Diversity order `K` and average code-to-noise ratio `γ̄_c = ρ Ē_EC / N0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingLinkParams {
    pub k: u32,
    pub gamma_c: f64,
}

impl FadingLinkParams {
    pub fn new(k: u32, gamma_c: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("diversity order K must be >= 1".into()));
        }
        if !(gamma_c >= 0.0) {
            return Err(Error::Domain(format!("gamma_c must be >= 0, got {gamma_c}")));
        }
        Ok(Self { k, gamma_c })
    }

    /// `K = N_T · N_R`.
    pub fn from_antennas(n_tx: usize, n_rx: usize, gamma_c: f64) -> Result<Self> {
        Self::new((n_tx * n_rx) as u32, gamma_c)
    }
}

/// `(μ, 1 − μ)` for a normalized distance; `1 − μ` without cancellation.
pub fn mu(d_norm: f64, gamma_c: f64) -> (f64, f64) {
    let x = d_norm * d_norm * gamma_c;
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let mu = (x / (4.0 + x)).sqrt();
    (mu, 4.0 / (4.0 + x) / (1.0 + mu))
}

/// `½ − (μ/2) Σ_{r<K} C(2r, r) ((1 − μ²)/4)^r`, evaluated as written.
pub fn pep_from_mu(mu: f64, k: u32) -> f64 {
    let q = (1.0 - mu * mu) / 4.0;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for r in 0..k {
        sum += binomial(2 * u64::from(r), u64::from(r)) * pow;
        pow *= q;
    }
    0.5 - 0.5 * mu * sum
}

/// `((1 − μ)/2)^K Σ_{r<K} C(K − 1 + r, r) ((1 + μ)/2)^r`.
pub fn lemma_form_from_mu(mu: f64, one_minus_mu: f64, k: u32) -> f64 {
    let z = (1.0 + mu) / 2.0;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for r in 0..k {
        sum += binomial(u64::from(k - 1 + r), u64::from(r)) * pow;
        pow *= z;
    }
    (one_minus_mu / 2.0).powi(k as i32) * sum
}

/// Pairwise error probability, direct form.
pub fn pep(d_norm: f64, params: FadingLinkParams) -> f64 {
    let (m, _) = mu(d_norm, params.gamma_c);
    pep_from_mu(m, params.k).clamp(0.0, 0.5)
}

/// Pairwise error probability, product form. Numerically stable at high SNR.
pub fn pep_lemma_form(d_norm: f64, params: FadingLinkParams) -> f64 {
    let (m, om) = mu(d_norm, params.gamma_c);
    lemma_form_from_mu(m, om, params.k)
}

fn require_uniform(spectrum: &DistanceSpectrum) -> Result<()> {
    if spectrum.uniform {
        Ok(())
    } else {
        Err(Error::Domain("union bound requires the spectrum of a uniform code".into()))
    }
}

fn require_positive_snr(params: FadingLinkParams) -> Result<()> {
    if params.gamma_c > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("asymptotic bounds diverge at gamma_c = 0".into()))
    }
}

/// Union bound on the SER, `Σ multiplicity · PEP(d̃)`. Not clamped to 1.
pub fn union_bound_ser(spectrum: &DistanceSpectrum, params: FadingLinkParams) -> Result<f64> {
    require_uniform(spectrum)?;
    Ok(spectrum
        .lines
        .iter()
        .map(|l| l.multiplicity as f64 * pep_lemma_form(l.distance, params))
        .sum())
}

/// High-SNR form `C_EC(K) · C(2K − 1, K) · γ̄_c^(−K)`.
pub fn asymptotic_bound(spectrum: &DistanceSpectrum, params: FadingLinkParams) -> Result<f64> {
    require_uniform(spectrum)?;
    require_positive_snr(params)?;
    let k = params.k;
    Ok(ndsc(spectrum, k) * binomial(2 * u64::from(k) - 1, u64::from(k)) * params.gamma_c.powi(-(k as i32)))
}

/// Minimum-distance term only: `N_min · d̃_min^(−2K) · C(2K − 1, K) · γ̄_c^(−K)`.
pub fn min_distance_bound(spectrum: &DistanceSpectrum, params: FadingLinkParams) -> Result<f64> {
    require_uniform(spectrum)?;
    require_positive_snr(params)?;
    let line = spectrum
        .lines
        .first()
        .ok_or_else(|| Error::Domain("empty spectrum".into()))?;
    let k = params.k;
    Ok(line.multiplicity as f64
        * line.distance.powf(-2.0 * f64::from(k))
        * binomial(2 * u64::from(k) - 1, u64::from(k))
        * params.gamma_c.powi(-(k as i32)))
}

/// One row of the bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub snr_db: f64,
    pub union_bound: f64,
    pub asymptotic_bound: f64,
    pub min_distance_bound: f64,
}

impl BoundsRow {
    /// A union bound of 1 or more carries no information.
    pub fn is_vacuous(&self) -> bool {
        self.union_bound >= 1.0
    }
}

/// Evaluates all three bounds at `γ̄_c = 10^(snr_db/10)`.
///
/// At `γ̄_c = 0` (e.g. `snr_db = −∞`) the asymptotic columns are `+∞`.
pub fn bounds_row(spectrum: &DistanceSpectrum, k: u32, snr_db: f64) -> Result<BoundsRow> {
    let gamma_c = crate::special::db_to_linear(snr_db);
    let params = FadingLinkParams::new(k, gamma_c)?;
    let union_bound = union_bound_ser(spectrum, params)?;
    let (asymptotic_bound, min_distance_bound) = if gamma_c > 0.0 {
        (asymptotic_bound(spectrum, params)?, min_distance_bound(spectrum, params)?)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(BoundsRow {
        snr_db,
        union_bound,
        asymptotic_bound,
        min_distance_bound,
    })
}
