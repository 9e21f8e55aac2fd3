//! Schläfli's function and the Coxeter–Böröczky bound for spherical codes.
//!
//! `F_0 = F_1 = 1` and for `n ≥ 2`
//!
//! ```text
//! F_n(α) = (2/π) ∫_{½ arcsec(n−1)}^{α} F_{n−2}(β(θ)) dθ,   sec 2β = sec 2θ − 2.
//! ```
//!
//! `F_2` and `F_3` have closed forms; higher orders nest adaptive Simpson
//! integrals, one level per step of two in `n`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

pub const MAX_ORDER: u32 = 8;
pub const SIMPSON_TOL: f64 = 1e-10;

/// Lower integration limit `½ arcsec(n − 1)` of `F_n`.
pub fn lower_limit(n: u32) -> f64 {
    debug_assert!(n >= 2);
    0.5 * (1.0 / f64::from(n - 1)).acos()
}

// sec 2β = sec 2θ − 2, written in cosines so that θ = π/4 is regular.
fn beta(theta: f64) -> f64 {
    let c = (2.0 * theta).cos();
    0.5 * (c / (1.0 - 2.0 * c)).clamp(-1.0, 1.0).acos()
}

/// Schläfli's function `F_n(α)` for `0 ≤ n ≤ 8`.
pub fn schlafli_f(n: u32, alpha: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("Schläfli order {n} exceeds {MAX_ORDER}")));
    }
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, π]")));
    }
    match n {
        0 | 1 => Ok(1.0),
        2 => Ok(2.0 * alpha / PI),
        3 => {
            let lo = lower_limit(3);
            if alpha < lo {
                return Err(Error::Domain(format!("F_3 needs alpha >= {lo}, got {alpha}")));
            }
            Ok(2.0 / PI * (alpha - lo))
        }
        _ => {
            let lo = lower_limit(n);
            // absorb rounding at the upper end, e.g. α from acos(0)/2
            let alpha = if alpha > FRAC_PI_4 && alpha - FRAC_PI_4 < 1e-12 { FRAC_PI_4 } else { alpha };
            if alpha < lo || alpha > FRAC_PI_4 {
                return Err(Error::Domain(format!(
                    "F_{n} needs alpha in [{lo}, π/4], got {alpha}"
                )));
            }
            nested(n, alpha)
        }
    }
}

fn nested(n: u32, alpha: f64) -> Result<f64> {
    if n < 4 {
        return schlafli_f(n, alpha);
    }
    let lo = lower_limit(n);
    if alpha <= lo {
        return Ok(0.0);
    }
    let inner_failed = std::cell::Cell::new(None);
    let integral = adaptive_simpson(
        |theta| {
            // β(θ) stays within [lower_limit(n − 2), π/4] for θ in range
            let b = beta(theta).max(lower_limit(n - 2));
            match nested(n - 2, b) {
                Ok(v) => v,
                Err(e) => {
                    inner_failed.set(Some(e));
                    0.0
                }
            }
        },
        lo,
        alpha,
        SIMPSON_TOL,
    )?;
    if let Some(e) = inner_failed.take() {
        return Err(e);
    }
    Ok(2.0 / PI * integral.value)
}

/// Angle `α` fed to Schläfli's function for minimum angular separation `φ`
/// in dimension `n`: `sec 2α = sec φ + n − 2`.
pub fn coxeter_alpha(n: u32, phi: f64) -> Result<f64> {
    let c = phi.cos();
    let denom = 1.0 + f64::from(n) * c - 2.0 * c;
    if !(phi > 0.0 && phi <= PI) || denom == 0.0 {
        return Err(Error::Domain(format!("angular separation {phi} unusable for n = {n}")));
    }
    let cos2a = c / denom;
    if !(-1.0..=1.0).contains(&cos2a) {
        return Err(Error::Domain(format!("no real alpha for phi = {phi}, n = {n}")));
    }
    Ok(0.5 * cos2a.acos())
}

/// Coxeter–Böröczky upper bound `2 F_{n−1}(α) / F_n(α)` on the size of an
/// `n`-dimensional spherical code with normalized minimum distance `d_min`.
pub fn coxeter_bound(n: u32, d_min: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("Coxeter bound needs n >= 2, got {n}")));
    }
    if !(d_min > 0.0 && d_min <= 2.0) {
        return Err(Error::Domain(format!("normalized minimum distance {d_min} outside (0, 2]")));
    }
    let phi = 2.0 * (d_min / 2.0).asin();
    let alpha = coxeter_alpha(n, phi)?;
    let num = schlafli_f(n - 1, alpha)?;
    let den = schlafli_f(n, alpha)?;
    if den <= 10.0 * SIMPSON_TOL {
        return Err(Error::Domain(format!(
            "F_{n}({alpha}) = {den} is below the quadrature noise floor"
        )));
    }
    Ok(2.0 * num / den)
}
