//! Euclidean codes equivalent to OSTBC signal sets and their distance structure.
//!
//! Extraction drops the zero coordinates of each proxy codeword and writes
//! every remaining complex symbol as two real coordinates `(re, im)`. By the
//! orthogonality of the design, the distance between received noise-free code
//! matrices is `‖h‖` times the distance between the extracted vectors, so all
//! performance-relevant structure lives in the real code produced here.

use serde::{Deserialize, Serialize};

use crate::design::{OstbcDesign, SymbolVector};
use crate::error::{Error, Result};

/// Relative tolerance for bucketing distances and comparing profiles/norms.
pub const DISTANCE_REL_TOL: f64 = 1e-9;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_REL_TOL: f64 = 1e-8;

#[derive(Deserialize)]
struct RawCode {
    n: usize,
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    avg_energy: Option<f64>,
    codewords: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

/// `M` real codewords of dimension `n`, stored so that `codewords[u]` carries label `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCode")]
pub struct EuclideanCode {
    n: usize,
    m: usize,
    avg_energy: f64,
    codewords: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl TryFrom<RawCode> for EuclideanCode {
    type Error = Error;

    fn try_from(raw: RawCode) -> Result<Self> {
        let code = EuclideanCode::with_labels(raw.codewords, raw.labels)?;
        if code.n != raw.n {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                got: code.n,
            });
        }
        if let Some(m) = raw.m {
            if m != code.m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: code.m,
                });
            }
        }
        if let Some(e) = raw.avg_energy {
            if (e - code.avg_energy).abs() > 1e-9 * code.avg_energy.max(1.0) {
                return Err(Error::Serde(format!(
                    "avg_energy {e} disagrees with codewords ({})",
                    code.avg_energy
                )));
            }
        }
        Ok(code)
    }
}

impl EuclideanCode {
    /// Codewords labelled `0..M` in order.
    pub fn new(codewords: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..codewords.len()).collect();
        Self::with_labels(codewords, labels)
    }

    /// Codewords with explicit labels; `labels` must be a permutation of `0..M`.
    pub fn with_labels(codewords: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let m = codewords.len();
        if m == 0 {
            return Err(Error::EmptyCode);
        }
        if labels.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: labels.len(),
            });
        }
        let n = codewords[0].len();
        if n == 0 {
            return Err(Error::Domain("codewords must have positive dimension".into()));
        }
        let mut ordered: Vec<Option<Vec<f64>>> = vec![None; m];
        for (cw, &label) in codewords.into_iter().zip(&labels) {
            if cw.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: cw.len(),
                });
            }
            if cw.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("non-finite coordinate".into()));
            }
            match ordered.get_mut(label) {
                Some(slot @ None) => *slot = Some(cw),
                _ => return Err(Error::UnknownLabel(label)),
            }
        }
        let codewords: Vec<Vec<f64>> = ordered.into_iter().map(|c| c.expect("permutation")).collect();
        let avg_energy = codewords.iter().map(|c| norm_sqr(c)).sum::<f64>() / m as f64;
        if !(avg_energy > 0.0) && m > 1 {
            return Err(Error::Domain("all codewords are zero".into()));
        }
        Ok(Self {
            n,
            m,
            avg_energy,
            codewords,
            labels: (0..m).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Mean squared norm `Ē_EC`.
    pub fn avg_energy(&self) -> f64 {
        self.avg_energy
    }

    pub fn codewords(&self) -> &[Vec<f64>] {
        &self.codewords
    }

    pub fn codeword(&self, label: usize) -> Result<&[f64]> {
        self.codewords.get(label).map(Vec::as_slice).ok_or(Error::UnknownLabel(label))
    }

    /// Bits carried by a codeword when `M` is a power of two.
    pub fn bits_per_codeword(&self) -> Option<u32> {
        self.m.is_power_of_two().then(|| self.m.trailing_zeros())
    }

    pub fn distance(&self, u: usize, t: usize) -> f64 {
        distance(&self.codewords[u], &self.codewords[t])
    }

    /// Same code with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.codewords
                .iter()
                .map(|c| c.iter().map(|x| x * factor).collect())
                .collect(),
        )
    }

    /// Applies a real `n × n` matrix (row-major) to every codeword.
    pub fn transformed(&self, matrix: &[f64]) -> Result<Self> {
        if matrix.len() != self.n * self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n * self.n,
                got: matrix.len(),
            });
        }
        Self::new(
            self.codewords
                .iter()
                .map(|c| {
                    (0..self.n)
                        .map(|i| (0..self.n).map(|j| matrix[i * self.n + j] * c[j]).sum())
                        .collect()
                })
                .collect(),
        )
    }
}

pub(crate) fn norm_sqr(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Real embedding of the information symbols of one proxy codeword.
pub fn embed_symbols(design: &OstbcDesign, s: &SymbolVector) -> Result<Vec<f64>> {
    design.check_symbols(s)?;
    Ok(s.symbols[..design.n_info()].iter().flat_map(|z| [z.re, z.im]).collect())
}

/// Extracts the Euclidean code equivalent to `design` with the given proxy codewords.
pub fn extract_equivalent_code(design: &OstbcDesign, codewords: &[SymbolVector]) -> Result<EuclideanCode> {
    if codewords.is_empty() {
        return Err(Error::EmptyCode);
    }
    let mut vectors = Vec::with_capacity(codewords.len());
    let mut labels = Vec::with_capacity(codewords.len());
    for s in codewords {
        vectors.push(embed_symbols(design, s)?);
        labels.push(s.label);
    }
    EuclideanCode::with_labels(vectors, labels)
}

/// Like [`extract_equivalent_code`] for codewords spanning several consecutive
/// blocks of the design; block embeddings are concatenated.
pub fn extract_equivalent_code_blocks(
    design: &OstbcDesign,
    codewords: &[Vec<SymbolVector>],
) -> Result<EuclideanCode> {
    if codewords.is_empty() {
        return Err(Error::EmptyCode);
    }
    let blocks = codewords[0].len();
    let mut vectors = Vec::with_capacity(codewords.len());
    let mut labels = Vec::with_capacity(codewords.len());
    for cw in codewords {
        if cw.len() != blocks || blocks == 0 {
            return Err(Error::DimensionMismatch {
                expected: blocks,
                got: cw.len(),
            });
        }
        let mut v = Vec::with_capacity(2 * design.n_info() * blocks);
        for s in cw {
            v.extend(embed_symbols(design, s)?);
        }
        vectors.push(v);
        labels.push(cw[0].label);
    }
    EuclideanCode::with_labels(vectors, labels)
}

/// Distances from one codeword to all others, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub source: usize,
    pub distances: Vec<f64>,
}

pub fn distance_profile(code: &EuclideanCode, u: usize) -> Result<DistanceProfile> {
    let src = code.codeword(u)?;
    let mut distances: Vec<f64> = code
        .codewords
        .iter()
        .enumerate()
        .filter(|&(t, _)| t != u)
        .map(|(_, c)| distance(src, c))
        .collect();
    distances.sort_by(f64::total_cmp);
    Ok(DistanceProfile { source: u, distances })
}

fn profiles_match(a: &[f64], b: &[f64], scale: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= DISTANCE_REL_TOL * scale)
}

fn uniformity_witness(code: &EuclideanCode) -> Option<(usize, usize, Vec<Vec<f64>>)> {
    let profiles: Vec<Vec<f64>> = (0..code.m)
        .map(|u| distance_profile(code, u).expect("valid label").distances)
        .collect();
    let scale = profiles
        .iter()
        .flat_map(|p| p.last().copied())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let bad = (1..code.m).find(|&u| !profiles_match(&profiles[0], &profiles[u], scale))?;
    Some((0, bad, profiles))
}

/// True when every codeword sees the same multiset of distances.
pub fn is_uniform(code: &EuclideanCode) -> bool {
    uniformity_witness(code).is_none()
}

/// One line of a distance spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub distance: f64,
    pub multiplicity: usize,
}

/// Normalized distances `d / √Ē_EC` with multiplicities, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub lines: Vec<SpectrumLine>,
    /// False when built from a single profile of a non-uniform code.
    pub uniform: bool,
}

impl DistanceSpectrum {
    /// Buckets raw distances (already normalized or not) into lines.
    pub fn from_distances(distances: &[f64], uniform: bool) -> Self {
        let mut sorted = distances.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut lines: Vec<SpectrumLine> = Vec::new();
        for d in sorted {
            match lines.last_mut() {
                Some(line) if (d - line.distance).abs() <= DISTANCE_REL_TOL * d.abs().max(1.0) => {
                    line.multiplicity += 1
                }
                _ => lines.push(SpectrumLine {
                    distance: d,
                    multiplicity: 1,
                }),
            }
        }
        Self { lines, uniform }
    }

    /// Normalized profile of one codeword, flagged non-uniform.
    pub fn from_profile(code: &EuclideanCode, u: usize) -> Result<Self> {
        let norm = code.avg_energy().sqrt();
        let p = distance_profile(code, u)?;
        let d: Vec<f64> = p.distances.iter().map(|x| x / norm).collect();
        Ok(Self::from_distances(&d, false))
    }

    /// Sum of multiplicities (`M − 1` for a code of size `M`).
    pub fn total_multiplicity(&self) -> usize {
        self.lines.iter().map(|l| l.multiplicity).sum()
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.lines.first().map(|l| l.distance)
    }

    pub fn min_distance_multiplicity(&self) -> Option<usize> {
        self.lines.first().map(|l| l.multiplicity)
    }

    /// Compares against expected `(distance, multiplicity)` pairs within `tol`.
    pub fn matches(&self, expected: &[(f64, usize)], tol: f64) -> bool {
        self.lines.len() == expected.len()
            && self
                .lines
                .iter()
                .zip(expected)
                .all(|(l, &(d, m))| (l.distance - d).abs() <= tol && l.multiplicity == m)
    }
}

/// Normalized distance spectrum of a uniform code.
pub fn distance_spectrum(code: &EuclideanCode) -> Result<DistanceSpectrum> {
    if let Some((first, second, profiles)) = uniformity_witness(code) {
        return Err(Error::NonUniform {
            first,
            second,
            profiles,
        });
    }
    if code.len() == 1 {
        return Ok(DistanceSpectrum {
            lines: Vec::new(),
            uniform: true,
        });
    }
    let mut s = DistanceSpectrum::from_profile(code, 0)?;
    s.uniform = true;
    Ok(s)
}

/// Normalized distance spectrum constant `Σ multiplicity · d̃^(−2K)`.
pub fn ndsc(spectrum: &DistanceSpectrum, k: u32) -> f64 {
    let exp = -2.0 * f64::from(k);
    spectrum
        .lines
        .iter()
        .map(|l| l.multiplicity as f64 * l.distance.powf(exp))
        .sum()
}

/// True when all codewords have the same norm.
pub fn is_spherical(code: &EuclideanCode) -> bool {
    let (lo, hi) = norm_range(code);
    hi - lo <= DISTANCE_REL_TOL * hi.max(f64::MIN_POSITIVE)
}

fn norm_range(code: &EuclideanCode) -> (f64, f64) {
    code.codewords
        .iter()
        .map(|c| norm_sqr(c).sqrt())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

/// Singular values of the `M × n` matrix whose rows are the codewords,
/// sorted descending (one-sided Jacobi).
pub fn singular_values(code: &EuclideanCode) -> Vec<f64> {
    let (m, n) = (code.m, code.n);
    // columns of the codeword matrix
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| code.codewords[i][j]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(&cols[p]);
                let beta = norm_sqr(&cols[q]);
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (a, b) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm_sqr(c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Dimension of the space spanned by the codewords.
pub fn numerical_rank(code: &EuclideanCode) -> usize {
    let sv = singular_values(code);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_REL_TOL * top).count()
}

/// One inequality of a Rankin-type certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// Right-hand side of the inequality.
    pub ceiling: f64,
    /// `ceiling − value`; zero means the bound is met with equality.
    pub slack: f64,
    pub equality: bool,
}

impl BoundCheck {
    fn new(value: f64, ceiling: f64, tol: f64) -> Self {
        let slack = ceiling - value;
        Self {
            holds: slack >= -tol,
            ceiling,
            slack,
            equality: slack.abs() <= tol,
        }
    }
}

/// Rankin-bound certificate for a spherical code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankinCertificate {
    pub m: usize,
    /// Numerical rank of the codeword set.
    pub n: usize,
    pub d_min_sq: f64,
    /// `d̃²_min ≤ 2M/(M−1)`.
    pub first: BoundCheck,
    /// `M ≤ n + 1`, applicable when `2 < d̃²_min ≤ 4`.
    pub second: Option<BoundCheck>,
    /// `M ≤ 2n`, applicable when `d̃²_min = 2`.
    pub third: Option<BoundCheck>,
}

/// Evaluates Rankin's three bounds for a spherical code.
pub fn check_rankin_bounds(code: &EuclideanCode) -> Result<RankinCertificate> {
    if !is_spherical(code) {
        let (min, max) = norm_range(code);
        return Err(Error::NonSpherical { min, max });
    }
    if code.len() < 2 {
        return Err(Error::Domain("bounds need at least two codewords".into()));
    }
    let m = code.len();
    let e = code.avg_energy();
    let mut d2_min = f64::INFINITY;
    for u in 0..m {
        for t in (u + 1)..m {
            d2_min = d2_min.min(norm_sqr(
                &code.codewords[u]
                    .iter()
                    .zip(&code.codewords[t])
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            ) / e);
        }
    }
    let n = numerical_rank(code);
    let tol = DISTANCE_REL_TOL * 4.0;
    let first = BoundCheck::new(d2_min, 2.0 * m as f64 / (m as f64 - 1.0), tol);
    let second = (d2_min > 2.0 + tol && d2_min <= 4.0 + tol).then(|| BoundCheck::new(m as f64, n as f64 + 1.0, 0.0));
    let third = ((d2_min - 2.0).abs() <= tol).then(|| BoundCheck::new(m as f64, 2.0 * n as f64, 0.0));
    Ok(RankinCertificate {
        m,
        n,
        d_min_sq: d2_min,
        first,
        second,
        third,
    })
}

/// Checks that distance is nondecreasing in the Hamming distance of labels.
pub fn is_gray_monotone(code: &EuclideanCode) -> bool {
    let bits = match code.bits_per_codeword() {
        Some(b) => b as usize,
        None => return false,
    };
    // per Hamming weight: (min distance, max distance)
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); bits + 1];
    for u in 0..code.m {
        for t in (u + 1)..code.m {
            let h = (u ^ t).count_ones() as usize;
            let d = code.distance(u, t);
            ranges[h].0 = ranges[h].0.min(d);
            ranges[h].1 = ranges[h].1.max(d);
        }
    }
    let scale = ranges.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut running_max = f64::NEG_INFINITY;
    for &(lo, hi) in ranges.iter().skip(1) {
        if lo.is_finite() {
            if lo < running_max - DISTANCE_REL_TOL * scale {
                return false;
            }
            running_max = running_max.max(hi);
        }
    }
    true
}
