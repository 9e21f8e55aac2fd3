//! Maximum-likelihood decoders for the full MIMO link and the equivalent
//! SIMO model, and the projection that maps one onto the other.

use num_complex::Complex64;

use super::channel::{ChannelRealization, ReceivedSignal};
use crate::catalog::CatalogEntry;
use crate::design::CodeMatrix;
use crate::equivalent::EuclideanCode;
use crate::error::{Error, Result};

/// Orthogonality tolerance for the branch rotations.
pub const ROTATION_TOL: f64 = 1e-10;

/// Code matrices of every codeword, indexed by label.
#[derive(Debug, Clone)]
pub struct FullCodebook {
    matrices: Vec<CodeMatrix>,
    slots: usize,
    n_tx: usize,
}

impl FullCodebook {
    pub fn new(matrices: Vec<CodeMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or(Error::EmptyCode)?;
        let (slots, n_tx) = (first.rows(), first.cols());
        if let Some(bad) = matrices.iter().find(|g| g.rows() != slots || g.cols() != n_tx) {
            return Err(Error::DimensionMismatch {
                expected: slots * n_tx,
                got: bad.rows() * bad.cols(),
            });
        }
        Ok(Self { matrices, slots, n_tx })
    }

    pub fn from_entry(entry: &CatalogEntry) -> Result<Self> {
        Self::new((0..entry.len()).map(|u| entry.code_matrix(u)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn matrix(&self, label: usize) -> &CodeMatrix {
        &self.matrices[label]
    }

    /// `Σ_j ‖r_j − G_t h_j‖²` over column-major received samples.
    pub(crate) fn metric(&self, t: usize, received: &[Complex64], channel: &ChannelRealization) -> f64 {
        let g = self.matrices[t].entries();
        let mut total = 0.0;
        for j in 0..channel.n_rx() {
            let h = channel.column(j);
            let r = &received[j * self.slots..(j + 1) * self.slots];
            for (row, rv) in r.iter().enumerate() {
                let gh: Complex64 = g[row * self.n_tx..(row + 1) * self.n_tx].iter().zip(h).map(|(a, b)| a * b).sum();
                total += (rv - gh).norm_sqr();
            }
        }
        total
    }

    pub(crate) fn decode(&self, received: &[Complex64], channel: &ChannelRealization) -> usize {
        argmin((0..self.len()).map(|t| self.metric(t, received, channel)))
    }
}

// First index of the smallest value, so ties go to the smallest label.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// `argmin_t Σ_j ‖r_j − G_t h_j‖²` with perfect channel knowledge.
pub fn ml_decode_full(codebook: &FullCodebook, received: &ReceivedSignal, channel: &ChannelRealization) -> Result<usize> {
    if received.slots != codebook.slots || received.n_rx != channel.n_rx() || channel.n_tx() != codebook.n_tx {
        return Err(Error::DimensionMismatch {
            expected: codebook.slots * channel.n_rx(),
            got: received.slots * received.n_rx,
        });
    }
    Ok(codebook.decode(&received.data, channel))
}

/// Per-branch gains `c_j` and optional real orthogonal rotations `Φ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentSimoModel {
    pub c: Vec<f64>,
    /// Row-major `n × n` rotation per branch; identity when absent.
    pub phi: Option<Vec<Vec<f64>>>,
}

impl EquivalentSimoModel {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Domain("model needs at least one branch".into()));
        }
        if c.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Domain("branch gains must be finite and nonnegative".into()));
        }
        Ok(Self { c, phi: None })
    }

    pub fn with_rotations(c: Vec<f64>, phi: Vec<Vec<f64>>, n: usize) -> Result<Self> {
        let mut model = Self::new(c)?;
        if phi.len() != model.c.len() {
            return Err(Error::DimensionMismatch {
                expected: model.c.len(),
                got: phi.len(),
            });
        }
        for p in &phi {
            if p.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    got: p.len(),
                });
            }
            for i in 0..n {
                for k in 0..n {
                    let dot: f64 = (0..n).map(|r| p[r * n + i] * p[r * n + k]).sum();
                    let target = if i == k { 1.0 } else { 0.0 };
                    if (dot - target).abs() > ROTATION_TOL {
                        return Err(Error::Domain("branch rotation is not orthogonal".into()));
                    }
                }
            }
        }
        model.phi = Some(phi);
        Ok(model)
    }

    /// `c_j = ‖h_j‖`, no rotation.
    pub fn from_channel(channel: &ChannelRealization) -> Self {
        Self {
            c: (0..channel.n_rx()).map(|j| channel.column_norm(j)).collect(),
            phi: None,
        }
    }

    pub fn branches(&self) -> usize {
        self.c.len()
    }

    /// Noise-free branch output `c_j Φ_j s`.
    pub fn apply(&self, j: usize, s: &[f64]) -> Vec<f64> {
        let n = s.len();
        match &self.phi {
            None => s.iter().map(|x| self.c[j] * x).collect(),
            Some(phi) => (0..n)
                .map(|r| self.c[j] * (0..n).map(|k| phi[j][r * n + k] * s[k]).sum::<f64>())
                .collect(),
        }
    }
}

/// `argmin_t Σ_j ‖y_j − c_j Φ_j s_t‖²`, smallest label on ties.
pub fn ml_decode_equivalent(code: &EuclideanCode, model: &EquivalentSimoModel, received: &[Vec<f64>]) -> Result<usize> {
    if received.len() != model.branches() {
        return Err(Error::DimensionMismatch {
            expected: model.branches(),
            got: received.len(),
        });
    }
    let n = code.dimension();
    if let Some(bad) = received.iter().find(|y| y.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    Ok(argmin(code.codewords().iter().map(|s| {
        (0..model.branches())
            .map(|j| {
                let x = model.apply(j, s);
                received[j].iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum()
    })))
}

/// Identity-rotation decoder on flat branch data, used by the simulator.
pub(crate) fn decode_equivalent_flat(code: &EuclideanCode, c: &[f64], y: &[f64]) -> usize {
    let n = code.dimension();
    argmin(code.codewords().iter().map(|s| {
        c.iter()
            .enumerate()
            .map(|(j, &cj)| {
                y[j * n..(j + 1) * n]
                    .iter()
                    .zip(s)
                    .map(|(a, b)| (a - cj * b) * (a - cj * b))
                    .sum::<f64>()
            })
            .sum()
    }))
}

/// Real `2T × n` matrix `A(h)` with `A(h) s̃` the real form of `G(s) h`.
/// Returned as `n` columns.
pub fn projection_basis(entry: &CatalogEntry, h: &[Complex64]) -> Result<Vec<Vec<f64>>> {
    let n = entry.code.dimension();
    let j = entry.design.n_info();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let mut blocks = Vec::with_capacity(entry.blocks);
        for b in 0..entry.blocks {
            let mut info = vec![Complex64::new(0.0, 0.0); j];
            if k / (2 * j) == b {
                let local = k % (2 * j);
                info[local / 2] = if local % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
            }
            let s = crate::design::SymbolVector::padded(&info, entry.design.n_tx(), 0);
            blocks.push(crate::design::build_code_matrix(&entry.design, &s)?);
        }
        let gh = CodeMatrix::stack(&blocks).mul_vec(h);
        columns.push(gh.iter().flat_map(|z| [z.re, z.im]).collect());
    }
    Ok(columns)
}

/// Maps a full received block onto the equivalent model: `y_j = A(h_j)ᵀ r_j / ‖h_j‖`.
pub fn project_to_equivalent(
    entry: &CatalogEntry,
    channel: &ChannelRealization,
    received: &ReceivedSignal,
) -> Result<(EquivalentSimoModel, Vec<Vec<f64>>)> {
    if received.slots != entry.time_slots() || received.n_rx != channel.n_rx() {
        return Err(Error::DimensionMismatch {
            expected: entry.time_slots(),
            got: received.slots,
        });
    }
    let model = EquivalentSimoModel::from_channel(channel);
    let mut ys = Vec::with_capacity(channel.n_rx());
    for j in 0..channel.n_rx() {
        let a = projection_basis(entry, channel.column(j))?;
        let r: Vec<f64> = received.column(j).iter().flat_map(|z| [z.re, z.im]).collect();
        let c = model.c[j];
        ys.push(
            a.iter()
                .map(|col| if c > 0.0 { col.iter().zip(&r).map(|(x, y)| x * y).sum::<f64>() / c } else { 0.0 })
                .collect(),
        );
    }
    Ok((model, ys))
}
