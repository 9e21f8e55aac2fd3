//! Exact fading-averaged error rates.
//!
//! The combined per-bit SNR of an equivalent SIMO link with `K = N_T N_R`
//! i.i.d. Rayleigh branches is gamma distributed with shape `K` and scale
//! `γ̄_b`. Averaging any conditional AWGN error rate against that density
//! gives the fading error rate; for Alamouti with BPSK constituents the
//! equivalent code is Gray QPSK and both BER and SER also have closed forms.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bounds::lemma_form_from_mu;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod, semi_infinite, GkOptions};
use crate::special::gaussian_q;

/// Absolute tolerance used by every quadrature in this module.
pub const QUAD_ABS_TOL: f64 = 1e-10;

/// Diversity order and average per-bit SNR `γ̄_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSnrParams {
    pub k: u32,
    pub gamma_b_bar: f64,
}

impl FadingSnrParams {
    pub fn new(k: u32, gamma_b_bar: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("K must be >= 1".into()));
        }
        if !(gamma_b_bar >= 0.0) {
            return Err(Error::Domain(format!("gamma_b_bar must be >= 0, got {gamma_b_bar}")));
        }
        Ok(Self { k, gamma_b_bar })
    }
}

/// Gray-QPSK bit error rate on AWGN, `Q(√(2γ_b))`.
pub fn awgn_qpsk_ber(gamma_b: f64) -> f64 {
    gaussian_q((2.0 * gamma_b).sqrt())
}

/// QPSK symbol error rate on AWGN, `2Q − Q²` with `Q = Q(√(2γ_b))`.
pub fn awgn_qpsk_ser(gamma_b: f64) -> f64 {
    let q = gaussian_q((2.0 * gamma_b).sqrt());
    2.0 * q - q * q
}

/// Gamma density of the combined per-bit SNR.
pub fn snr_pdf(gamma: f64, params: FadingSnrParams) -> Result<f64> {
    let g = params.gamma_b_bar;
    if !(g > 0.0) {
        return Err(Error::Domain("snr_pdf needs gamma_b_bar > 0".into()));
    }
    if gamma < 0.0 {
        return Ok(0.0);
    }
    let k = f64::from(params.k);
    if gamma == 0.0 {
        return Ok(if params.k == 1 { 1.0 / g } else { 0.0 });
    }
    let log = (k - 1.0) * gamma.ln() - gamma / g - ln_gamma(k) - k * g.ln();
    Ok(log.exp())
}

/// `∫₀^∞ conditional(γ) f(γ) dγ` with absolute tolerance [`QUAD_ABS_TOL`].
pub fn fading_average<F>(conditional: F, params: FadingSnrParams) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(params.gamma_b_bar > 0.0) {
        return Err(Error::Domain("fading_average needs gamma_b_bar > 0".into()));
    }
    let opts = GkOptions {
        abs_tol: QUAD_ABS_TOL,
        max_intervals: 4000,
    };
    let integral = semi_infinite(
        |g| conditional(g) * snr_pdf(g, params).unwrap_or(0.0),
        params.gamma_b_bar,
        opts,
    )?;
    Ok(integral.value)
}

/// `(μ_b, 1 − μ_b)` with `μ_b = √(γ̄_b / (1 + γ̄_b))`, cancellation-free.
fn mu_b(gamma_b_bar: f64) -> (f64, f64) {
    if gamma_b_bar.is_infinite() {
        return (1.0, 0.0);
    }
    let mu = (gamma_b_bar / (1.0 + gamma_b_bar)).sqrt();
    (mu, 1.0 / ((1.0 + gamma_b_bar) * (1.0 + mu)))
}

/// Closed-form average BER of Alamouti with BPSK constituents.
pub fn ber_alamouti_bpsk(params: FadingSnrParams) -> f64 {
    let (mu, om) = mu_b(params.gamma_b_bar);
    lemma_form_from_mu(mu, om, params.k)
}

/// Average SER of Alamouti with BPSK constituents, as two finite integrals
/// over `θ ∈ [0, π/4]`.
pub fn ser_alamouti_bpsk(params: FadingSnrParams) -> Result<f64> {
    let g = params.gamma_b_bar;
    let k = params.k as i32;
    if g == 0.0 {
        return Ok(0.75);
    }
    let opts = GkOptions {
        abs_tol: QUAD_ABS_TOL,
        max_intervals: 2000,
    };
    let cos_part = gauss_kronrod(
        |t| {
            let c2 = t.cos().powi(2);
            (c2 / (c2 + g)).powi(k)
        },
        0.0,
        FRAC_PI_4,
        opts,
    )?;
    let sin_part = gauss_kronrod(
        |t| {
            let s2 = t.sin().powi(2);
            (s2 / (s2 + g)).powi(k)
        },
        0.0,
        FRAC_PI_4,
        opts,
    )?;
    Ok(2.0 / PI * cos_part.value + 1.0 / PI * sin_part.value)
}

/// One row of the exact-performance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub snr_db: f64,
    pub ber_exact: f64,
    pub ser_exact: f64,
}

/// Exact Alamouti-BPSK BER and SER at `γ̄_b = 10^(snr_db/10)`.
pub fn exact_row(k: u32, snr_db: f64) -> Result<ExactRow> {
    let params = FadingSnrParams::new(k, crate::special::db_to_linear(snr_db))?;
    let (ber, ser) = if params.gamma_b_bar == 0.0 {
        (0.5, 0.75)
    } else {
        (ber_alamouti_bpsk(params), ser_alamouti_bpsk(params)?)
    };
    Ok(ExactRow {
        snr_db,
        ber_exact: ber,
        ser_exact: ser,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: u32, g: f64) -> FadingSnrParams {
        FadingSnrParams::new(k, g).unwrap()
    }

    #[test]
    fn awgn_limits_and_bracketing() {
        assert_eq!(awgn_qpsk_ber(0.0), 0.5);
        assert_eq!(awgn_qpsk_ser(0.0), 0.75);
        for i in 0..60 {
            let g = f64::from(i) * 0.25;
            let (b, s) = (awgn_qpsk_ber(g), awgn_qpsk_ser(g));
            assert!(s <= 2.0 * b + 1e-18 && 2.0 * b <= 2.0 * s + 1e-18);
        }
        assert!((awgn_qpsk_ber(5.0) - gaussian_q(10f64.sqrt())).abs() < 1e-18);
        assert!((awgn_qpsk_ber(5.0) - 7.827e-4).abs() < 1e-7);
    }

    #[test]
    fn pdf_moments() {
        for k in [1, 2, 4, 8] {
            for g in [0.1, 1.0, 10.0] {
                let params = p(k, g);
                let opts = GkOptions {
                    abs_tol: 1e-12,
                    max_intervals: 4000,
                };
                let mass = semi_infinite(|x| snr_pdf(x, params).unwrap(), g, opts).unwrap().value;
                let mean = semi_infinite(|x| x * snr_pdf(x, params).unwrap(), g, opts).unwrap().value;
                assert!((mass - 1.0).abs() < 1e-8, "k={k} g={g}");
                assert!((mean - f64::from(k) * g).abs() < 1e-8 * g.max(1.0), "k={k} g={g}");
            }
        }
        assert!(snr_pdf(1.0, p(1, 0.0)).is_err());
    }

    #[test]
    fn pdf_k1_is_exponential() {
        for &x in &[0.0, 0.3, 2.0, 11.0] {
            let v = snr_pdf(x, p(1, 2.5)).unwrap();
            assert!((v - (-x / 2.5f64).exp() / 2.5).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_conditional() {
        let v = fading_average(|_| 0.37, p(3, 4.0)).unwrap();
        assert!((v - 0.37).abs() < 1e-9);
    }

    #[test]
    fn closed_form_values() {
        let b = ber_alamouti_bpsk(p(1, 1.0));
        assert!((b - (1.0 - 0.5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((b - 0.146_446_609).abs() < 1e-9);
        assert!((ber_alamouti_bpsk(p(3, 1e-12)) - 0.5).abs() < 1e-6);
        assert!((ser_alamouti_bpsk(p(2, 1e-12)).unwrap() - 0.75).abs() < 1e-6);
        assert_eq!(ser_alamouti_bpsk(p(2, 0.0)).unwrap(), 0.75);
    }

    #[test]
    fn ber_extreme_snr_is_positive() {
        let b = ber_alamouti_bpsk(p(2, 1e12));
        assert!(b > 0.0 && b < 1e-23);
    }

    #[test]
    fn two_path_agreement() {
        for k in [1, 2, 4, 8] {
            for g in [0.1, 1.0, 10.0] {
                let params = p(k, g);
                let ber_avg = fading_average(awgn_qpsk_ber, params).unwrap();
                assert!((ber_avg - ber_alamouti_bpsk(params)).abs() < 1e-9, "ber k={k} g={g}");
                let ser_avg = fading_average(awgn_qpsk_ser, params).unwrap();
                assert!((ser_avg - ser_alamouti_bpsk(params).unwrap()).abs() < 1e-8, "ser k={k} g={g}");
            }
        }
    }

    #[test]
    fn monotone_and_bracketed() {
        for k in [1, 2, 4] {
            let mut prev = (1.0, 1.0);
            for i in 0..30 {
                let g = 10f64.powf(f64::from(i) / 10.0 - 1.0);
                let b = ber_alamouti_bpsk(p(k, g));
                let s = ser_alamouti_bpsk(p(k, g)).unwrap();
                assert!(b <= s && s <= 2.0 * b + 1e-15);
                assert!(b <= prev.0 && s <= prev.1);
                prev = (b, s);
            }
        }
    }
}
