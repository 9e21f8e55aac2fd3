//! Quasistatic Rayleigh channel and the noisy MIMO link.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::design::{build_code_matrix, CodeMatrix, OstbcDesign, SymbolVector};
use crate::error::{Error, Result};

/// Channel matrix `H` (`N_T × N_R`), stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_tx: usize,
    n_rx: usize,
    h: Vec<Complex64>,
    rho: f64,
}

impl ChannelRealization {
    /// From columns `h_j`, one per receive antenna.
    pub fn from_columns(columns: Vec<Vec<Complex64>>, rho: f64) -> Result<Self> {
        let n_rx = columns.len();
        let n_tx = columns.first().map_or(0, Vec::len);
        if n_rx == 0 || n_tx == 0 {
            return Err(Error::Domain("channel needs at least one antenna on each side".into()));
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n_tx) {
            return Err(Error::DimensionMismatch {
                expected: n_tx,
                got: bad.len(),
            });
        }
        Ok(Self {
            n_tx,
            n_rx,
            h: columns.into_iter().flatten().collect(),
            rho,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.h[j * self.n_tx..(j + 1) * self.n_tx]
    }

    /// `c_j = ‖h_j‖`.
    pub fn column_norm(&self, j: usize) -> f64 {
        self.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.h
    }

    pub(crate) fn fill<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let sd = (self.rho / 2.0).sqrt();
        for z in &mut self.h {
            *z = complex_normal(rng, sd);
        }
    }
}

/// Received block `R` (`T × N_R`), stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    pub slots: usize,
    pub n_rx: usize,
    pub data: Vec<Complex64>,
}

impl ReceivedSignal {
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.slots..(j + 1) * self.slots]
    }
}

pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// I.i.d. zero-mean complex Gaussian entries with variance `ρ/2` per real dimension.
pub fn sample_channel<R: Rng + ?Sized>(n_tx: usize, n_rx: usize, rho: f64, rng: &mut R) -> Result<ChannelRealization> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if n_tx == 0 || n_rx == 0 {
        return Err(Error::Domain("channel needs at least one antenna on each side".into()));
    }
    let mut ch = ChannelRealization {
        n_tx,
        n_rx,
        h: vec![Complex64::new(0.0, 0.0); n_tx * n_rx],
        rho,
    };
    ch.fill(rng);
    Ok(ch)
}

/// `r_j = G h_j + n_j` for an already built (possibly multi-block) code matrix.
pub fn transmit_matrix<R: Rng + ?Sized>(
    g: &CodeMatrix,
    channel: &ChannelRealization,
    n0: f64,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    if g.cols() != channel.n_tx {
        return Err(Error::DimensionMismatch {
            expected: channel.n_tx,
            got: g.cols(),
        });
    }
    if !(n0 >= 0.0) {
        return Err(Error::Domain(format!("n0 must be >= 0, got {n0}")));
    }
    let mut out = ReceivedSignal {
        slots: g.rows(),
        n_rx: channel.n_rx,
        data: Vec::with_capacity(g.rows() * channel.n_rx),
    };
    let sd = (n0 / 2.0).sqrt();
    for j in 0..channel.n_rx {
        for v in g.mul_vec(channel.column(j)) {
            let noise = if n0 > 0.0 { complex_normal(rng, sd) } else { Complex64::new(0.0, 0.0) };
            out.data.push(v + noise);
        }
    }
    Ok(out)
}

/// Sends one block of `design` carrying `s_u`.
pub fn transmit<R: Rng + ?Sized>(
    design: &OstbcDesign,
    s_u: &SymbolVector,
    channel: &ChannelRealization,
    n0: f64,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    transmit_matrix(&build_code_matrix(design, s_u)?, channel, n0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn channel_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let rho = 2.5;
        let (mut power, mut mean_re, mut cross) = (0.0, 0.0, Complex64::new(0.0, 0.0));
        for _ in 0..n / 2 {
            let ch = sample_channel(2, 1, rho, &mut rng).unwrap();
            let (a, b) = (ch.entries()[0], ch.entries()[1]);
            power += a.norm_sqr() + b.norm_sqr();
            mean_re += a.re + b.re;
            cross += a * b.conj();
        }
        let power = power / n as f64;
        assert!((power - rho).abs() < 0.01 * rho, "{power}");
        // per-dimension sd is √(ρ/2); mean over n draws has sd √(ρ/2n)
        let mean_re = mean_re / n as f64;
        assert!(mean_re.abs() < 3.0 * (rho / 2.0 / n as f64).sqrt());
        // |a b*| has variance ρ²; real part of mean over n/2 draws has sd ρ/√n
        let cross = cross / (n / 2) as f64;
        assert!(cross.re.abs() < 3.0 * rho / (n as f64).sqrt());
        assert!(sample_channel(2, 1, 0.0, &mut rng).is_err());
    }

    #[test]
    fn noiseless_link_is_gh() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let design = OstbcDesign::alamouti();
        let s = SymbolVector::new(vec![Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4)], 0);
        let ch = sample_channel(2, 3, 1.0, &mut rng).unwrap();
        let r = transmit(&design, &s, &ch, 0.0, &mut rng).unwrap();
        let g = build_code_matrix(&design, &s).unwrap();
        for j in 0..3 {
            assert_eq!(r.column(j), g.mul_vec(ch.column(j)).as_slice());
            let norm = r.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - s.norm_sqr().sqrt() * ch.column_norm(j)).abs() < 1e-10);
        }
    }

    #[test]
    fn noise_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let design = OstbcDesign::alamouti();
        let zero = SymbolVector::new(vec![Complex64::new(0.0, 0.0); 2], 0);
        let ch = sample_channel(2, 1, 1.0, &mut rng).unwrap();
        let n0 = 0.8;
        let mut acc = 0.0;
        let mut count = 0;
        while count < 1_000_000 {
            let r = transmit(&design, &zero, &ch, n0, &mut rng).unwrap();
            for z in &r.data {
                acc += z.re * z.re + z.im * z.im;
                count += 2;
            }
        }
        let var = acc / count as f64;
        assert!((var - n0 / 2.0).abs() < 0.01 * n0 / 2.0, "{var}");
    }

    #[test]
    fn dimension_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = sample_channel(4, 1, 1.0, &mut rng).unwrap();
        let s = SymbolVector::new(vec![Complex64::new(1.0, 0.0); 2], 0);
        assert!(transmit(&OstbcDesign::alamouti(), &s, &ch, 1.0, &mut rng).is_err());
        assert!(ChannelRealization::from_columns(vec![vec![Complex64::new(1.0, 0.0)], vec![]], 1.0).is_err());
    }
}
