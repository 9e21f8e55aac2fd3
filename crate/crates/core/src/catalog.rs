//! Built-in OSTBC schemes and a registry for user-supplied ones.
//!
//! An entry pairs a design with the Euclidean code it carries. Codewords of
//! dimension `2·J·B` are sent as `B` consecutive blocks of the design, each
//! block carrying `J` complex symbols taken as consecutive `(re, im)` pairs.

use std::collections::HashSet;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::{build_code_matrix, verify_orthogonality, CodeMatrix, ConstituentConstellation, OstbcDesign, SymbolVector};
use crate::equivalent::{distance_spectrum, DistanceSpectrum, EuclideanCode, SpectrumLine, DISTANCE_REL_TOL};
use crate::error::{Error, Result};

/// Largest code size any constructor will build.
pub const MAX_CODE_SIZE: usize = 1 << 16;

/// Orthogonality tolerance, relative to the codeword energy.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A design together with its signal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: String,
    pub design: OstbcDesign,
    /// Design blocks per codeword.
    pub blocks: usize,
    pub code: EuclideanCode,
    pub notes: String,
    /// Expected normalized spectrum, checked on registration when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_spectrum: Option<Vec<SpectrumLine>>,
}

impl CatalogEntry {
    /// Infers the block count from the code dimension.
    pub fn new(key: impl Into<String>, design: OstbcDesign, code: EuclideanCode, notes: impl Into<String>) -> Result<Self> {
        let key = key.into();
        let per_block = 2 * design.n_info();
        let n = code.dimension();
        if n % per_block != 0 {
            return Err(Error::Catalog(format!(
                "{key}: code dimension {n} is not a multiple of {per_block} real dims per block"
            )));
        }
        Ok(Self {
            key,
            design,
            blocks: n / per_block,
            code,
            notes: notes.into(),
            reference_spectrum: None,
        })
    }

    pub fn with_reference(mut self, lines: &[(f64, usize)]) -> Self {
        self.reference_spectrum = Some(
            lines
                .iter()
                .map(|&(distance, multiplicity)| SpectrumLine { distance, multiplicity })
                .collect(),
        );
        self
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    /// Time slots per codeword.
    pub fn time_slots(&self) -> usize {
        self.blocks * self.design.n_tx()
    }

    /// Symbol vectors of each block carrying codeword `label`.
    pub fn symbol_blocks(&self, label: usize) -> Result<Vec<SymbolVector>> {
        let cw = self.code.codeword(label)?;
        let j = self.design.n_info();
        Ok(cw
            .chunks(2 * j)
            .map(|chunk| {
                let info: Vec<Complex64> = chunk.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
                SymbolVector::padded(&info, self.design.n_tx(), label)
            })
            .collect())
    }

    /// Symbol blocks for every label in order.
    pub fn proxies(&self) -> Result<Vec<Vec<SymbolVector>>> {
        (0..self.len()).map(|u| self.symbol_blocks(u)).collect()
    }

    /// Code matrix of codeword `label`, blocks stacked in time.
    pub fn code_matrix(&self, label: usize) -> Result<CodeMatrix> {
        let blocks = self
            .symbol_blocks(label)?
            .iter()
            .map(|s| build_code_matrix(&self.design, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(CodeMatrix::stack(&blocks))
    }

    pub fn spectrum(&self) -> Result<DistanceSpectrum> {
        distance_spectrum(&self.code)
    }

    /// Orthogonality of every block, agreement of code-matrix distances
    /// with code distances, and the reference spectrum if one is attached.
    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.code.dimension() != 2 * self.design.n_info() * self.blocks {
            return Err(Error::Catalog(format!(
                "{}: code dimension {} does not fit {} block(s) of {}",
                self.key,
                self.code.dimension(),
                self.blocks,
                self.design.name()
            )));
        }
        let mut matrices = Vec::with_capacity(self.len());
        for u in 0..self.len() {
            for s in self.symbol_blocks(u)? {
                let dev = verify_orthogonality(&self.design, &s)?;
                if dev > ORTHOGONALITY_TOL * s.norm_sqr().max(1.0) {
                    return Err(Error::Catalog(format!(
                        "{}: codeword {u} violates orthogonality (deviation {dev:e})",
                        self.key
                    )));
                }
            }
            matrices.push(self.code_matrix(u)?);
        }
        // ‖G_u − G_t‖_F² = N_T ‖s_u − s_t‖² for an orthogonal design
        let n_tx = self.design.n_tx() as f64;
        let scale = 4.0 * self.code.avg_energy().max(f64::MIN_POSITIVE);
        for u in 0..self.len() {
            for t in (u + 1)..self.len() {
                let full = matrices[u].sub(&matrices[t]).frobenius_sqr() / n_tx;
                let d = self.code.distance(u, t);
                if (full - d * d).abs() > DISTANCE_REL_TOL * scale {
                    return Err(Error::Catalog(format!(
                        "{}: code-matrix distance {full} and code distance {} disagree for ({u}, {t})",
                        self.key,
                        d * d
                    )));
                }
            }
        }
        if let Some(reference) = &self.reference_spectrum {
            let expected: Vec<(f64, usize)> = reference.iter().map(|l| (l.distance, l.multiplicity)).collect();
            let got = self.spectrum()?;
            if !got.matches(&expected, 1e-9) {
                return Err(Error::Catalog(format!(
                    "{}: spectrum {:?} differs from reference {:?}",
                    self.key, got.lines, expected
                )));
            }
        }
        Ok(())
    }
}

/// All `L^J` tuples of constellation points, labelled by concatenated bit
/// labels with the first symbol most significant.
pub fn canonical_product_code(constellation: &ConstituentConstellation, j: usize) -> Result<EuclideanCode> {
    if j == 0 {
        return Err(Error::Domain("product code needs J >= 1".into()));
    }
    let l = constellation.size();
    let m = u32::try_from(j)
        .ok()
        .and_then(|j| l.checked_pow(j))
        .filter(|&m| m <= MAX_CODE_SIZE)
        .ok_or_else(|| Error::Domain(format!("{l}^{j} codewords exceed the cap of {MAX_CODE_SIZE}")))?;
    let bits = constellation.bits_per_symbol();
    let mut codewords = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for index in 0..m {
        let mut rest = index;
        let mut digits = vec![0; j];
        for d in digits.iter_mut().rev() {
            *d = rest % l;
            rest /= l;
        }
        let mut label = 0usize;
        let mut cw = Vec::with_capacity(2 * j);
        for &d in &digits {
            label = (label << bits) | constellation.bit_labels[d] as usize;
            cw.push(constellation.points[d].re);
            cw.push(constellation.points[d].im);
        }
        codewords.push(cw);
        labels.push(label);
    }
    EuclideanCode::with_labels(codewords, labels)
}

/// `2n` codewords `±√energy · e_k`; label `k` carries `+e_k` and label
/// `2n − 1 − k` its antipode.
pub fn biorthogonal_code(n: usize, energy: f64) -> Result<EuclideanCode> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::Domain(format!("biorthogonal code needs a positive even dimension, got {n}")));
    }
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("energy must be positive, got {energy}")));
    }
    if 2 * n > MAX_CODE_SIZE {
        return Err(Error::Domain(format!("2·{n} codewords exceed the cap of {MAX_CODE_SIZE}")));
    }
    let a = energy.sqrt();
    let m = 2 * n;
    let mut codewords = vec![vec![0.0; n]; m];
    for k in 0..n {
        codewords[k][k] = a;
        codewords[m - 1 - k][k] = -a;
    }
    EuclideanCode::new(codewords)
}

/// Rotates a code whose dimension is a multiple of four by a normalized
/// 4×4 Hadamard matrix on each group of four coordinates. Axis-aligned
/// biorthogonal codewords then have every complex symbol on a QPSK point.
pub fn qpsk_frame(code: &EuclideanCode) -> Result<EuclideanCode> {
    let n = code.dimension();
    if n % 4 != 0 {
        return Err(Error::Domain(format!("QPSK frame needs a dimension divisible by 4, got {n}")));
    }
    const H: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    let mut matrix = vec![0.0; n * n];
    for b in (0..n).step_by(4) {
        for (r, row) in H.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                matrix[(b + r) * n + b + c] = 0.5 * v;
            }
        }
    }
    code.transformed(&matrix)
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    entries: Vec<CatalogEntry>,
}

/// Registry of validated entries, kept in registration order.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shipped schemes, all with unit-energy constituent symbols.
    pub fn builtin() -> Self {
        let mut cat = Self::empty();
        for entry in builtin_entries() {
            cat.register(entry).expect("built-in entries validate");
        }
        cat
    }

    pub fn list(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.key.as_str())
    }

    pub fn get(&self, key: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| Error::Catalog(format!("unknown catalog entry '{key}'")))
    }

    pub fn register(&mut self, entry: CatalogEntry) -> Result<()> {
        if self.entries.iter().any(|e| e.key == entry.key) {
            return Err(Error::Catalog(format!("duplicate key '{}'", entry.key)));
        }
        entry.validate()?;
        self.entries.push(entry);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CatalogFile {
            entries: self.entries.clone(),
        })?)
    }

    /// Parses a catalog file, validating every entry.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cat = Self::empty();
        cat.extend_from_json(text)?;
        Ok(cat)
    }

    /// Registers every entry of a catalog file into `self`.
    pub fn extend_from_json(&mut self, text: &str) -> Result<()> {
        let file: CatalogFile = serde_json::from_str(text)?;
        let mut seen = HashSet::new();
        for entry in file.entries {
            if !seen.insert(entry.key.clone()) {
                return Err(Error::Catalog(format!("duplicate key '{}' in file", entry.key)));
            }
            self.register(entry)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))
    }
}

fn builtin_entries() -> Vec<CatalogEntry> {
    let sqrt2 = 2f64.sqrt();
    let bpsk = ConstituentConstellation::bpsk(1.0);
    let qpsk = ConstituentConstellation::qpsk(1.0);
    let alamouti = OstbcDesign::alamouti();
    let rate34 = OstbcDesign::rate_three_quarters();
    let build = |key: &str, design: &OstbcDesign, code: Result<EuclideanCode>, notes: &str| {
        CatalogEntry::new(key, design.clone(), code.expect("static code"), notes).expect("static entry")
    };
    vec![
        build(
            "alamouti-bpsk",
            &alamouti,
            canonical_product_code(&bpsk, 2),
            "Alamouti, BPSK constituents; square in 2-D, M = 4",
        )
        .with_reference(&[(sqrt2, 2), (2.0, 1)]),
        build(
            "alamouti-qpsk",
            &alamouti,
            canonical_product_code(&qpsk, 2),
            "Alamouti, Gray QPSK constituents; tesseract, M = 16",
        )
        .with_reference(&[(1.0, 4), (sqrt2, 6), (3f64.sqrt(), 4), (2.0, 1)]),
        build(
            "rate34-bpsk",
            &rate34,
            canonical_product_code(&bpsk, 3),
            "rate-3/4 design for four antennas, BPSK constituents; cube, M = 8",
        )
        .with_reference(&[(2.0 * (1.0f64 / 3.0).sqrt(), 3), (2.0 * (2.0f64 / 3.0).sqrt(), 3), (2.0, 1)]),
        build(
            "alamouti-bio4",
            &alamouti,
            biorthogonal_code(4, 2.0),
            "Alamouti carrying the 4-D biorthogonal code, M = 8",
        )
        .with_reference(&[(sqrt2, 6), (2.0, 1)]),
        build(
            "alamouti-bio8",
            &alamouti,
            biorthogonal_code(8, 4.0),
            "two Alamouti blocks carrying the 8-D biorthogonal code, M = 16",
        )
        .with_reference(&[(sqrt2, 14), (2.0, 1)]),
        build(
            "rate34-qpsk",
            &rate34,
            canonical_product_code(&qpsk, 3),
            "rate-3/4 design for four antennas, Gray QPSK constituents, M = 64",
        )
        .with_reference(&[
            ((2.0f64 / 3.0).sqrt(), 6),
            ((4.0f64 / 3.0).sqrt(), 15),
            (2f64.sqrt(), 20),
            ((8.0f64 / 3.0).sqrt(), 15),
            ((10.0f64 / 3.0).sqrt(), 6),
            (2.0, 1),
        ]),
    ]
}
