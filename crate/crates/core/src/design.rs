//! Complex orthogonal designs and the code matrices they generate.
//!
//! A design is stored as a table of cells. Each cell of the `N_T × N_T`
//! matrix is either zero or `±s_k` / `±s_k*` for one information symbol `s_k`.
//! Symbol vectors have length `N_T`; the trailing `N_T − J` entries are zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// One nonzero entry of a design: `sign · s[sym]` or `sign · conj(s[sym])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub sym: usize,
    pub conj: bool,
    pub sign: i8,
}

impl Cell {
    pub const fn new(row: usize, col: usize, sym: usize, conj: bool, sign: i8) -> Self {
        Self {
            row,
            col,
            sym,
            conj,
            sign,
        }
    }

    fn value(&self, symbols: &[Complex64]) -> Complex64 {
        let s = symbols[self.sym];
        let s = if self.conj { s.conj() } else { s };
        s * f64::from(self.sign)
    }
}

#[derive(Deserialize)]
struct RawDesign {
    name: String,
    n_tx: usize,
    n_info: usize,
    cells: Vec<Cell>,
}

/// A generalized complex orthogonal design with single-symbol entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDesign")]
pub struct OstbcDesign {
    name: String,
    n_tx: usize,
    n_info: usize,
    cells: Vec<Cell>,
}

impl TryFrom<RawDesign> for OstbcDesign {
    type Error = Error;

    fn try_from(raw: RawDesign) -> Result<Self> {
        OstbcDesign::new(raw.name, raw.n_tx, raw.n_info, raw.cells)
    }
}

impl OstbcDesign {
    /// Builds a design after checking the cell table is well formed.
    ///
    /// This does not check orthogonality; see [`verify_orthogonality`].
    pub fn new(name: impl Into<String>, n_tx: usize, n_info: usize, cells: Vec<Cell>) -> Result<Self> {
        let name = name.into();
        if n_tx == 0 || n_info == 0 || n_info > n_tx {
            return Err(Error::InvalidDesign(format!(
                "{name}: need 1 <= n_info <= n_tx, got n_tx={n_tx}, n_info={n_info}"
            )));
        }
        let mut seen = vec![false; n_tx * n_tx];
        for c in &cells {
            if c.row >= n_tx || c.col >= n_tx {
                return Err(Error::InvalidDesign(format!(
                    "{name}: cell ({}, {}) outside {n_tx}x{n_tx}",
                    c.row, c.col
                )));
            }
            if c.sym >= n_info {
                return Err(Error::InvalidDesign(format!(
                    "{name}: cell ({}, {}) uses symbol {} but n_info={n_info}",
                    c.row, c.col, c.sym
                )));
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(Error::InvalidDesign(format!(
                    "{name}: cell ({}, {}) has sign {}",
                    c.row, c.col, c.sign
                )));
            }
            let idx = c.row * n_tx + c.col;
            if seen[idx] {
                return Err(Error::InvalidDesign(format!(
                    "{name}: duplicate cell ({}, {})",
                    c.row, c.col
                )));
            }
            seen[idx] = true;
        }
        Ok(Self {
            name,
            n_tx,
            n_info,
            cells,
        })
    }

    /// Alamouti's design: rows `[a, b; -b*, a*]`.
    pub fn alamouti() -> Self {
        Self::new(
            "alamouti",
            2,
            2,
            vec![
                Cell::new(0, 0, 0, false, 1),
                Cell::new(0, 1, 1, false, 1),
                Cell::new(1, 0, 1, true, -1),
                Cell::new(1, 1, 0, true, 1),
            ],
        )
        .expect("static design")
    }

    /// The rate-3/4 design for four transmit antennas.
    ///
    /// ```text
    /// [  s1    0    s2   -s3 ]
    /// [  0     s1   s3*   s2* ]
    /// [ -s2*  -s3   s1*   0   ]
    /// [  s3*  -s2   0     s1* ]
    /// ```
    pub fn rate_three_quarters() -> Self {
        Self::new(
            "rate34",
            4,
            3,
            vec![
                Cell::new(0, 0, 0, false, 1),
                Cell::new(0, 2, 1, false, 1),
                Cell::new(0, 3, 2, false, -1),
                Cell::new(1, 1, 0, false, 1),
                Cell::new(1, 2, 2, true, 1),
                Cell::new(1, 3, 1, true, 1),
                Cell::new(2, 0, 1, true, -1),
                Cell::new(2, 1, 2, false, -1),
                Cell::new(2, 2, 0, true, 1),
                Cell::new(3, 0, 2, true, 1),
                Cell::new(3, 1, 1, false, -1),
                Cell::new(3, 3, 0, true, 1),
            ],
        )
        .expect("static design")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of transmit antennas `N_T` (also the number of time slots).
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Number of information-bearing symbols `J`.
    pub fn n_info(&self) -> usize {
        self.n_info
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Returns a copy with the sign of cell `index` flipped.
    pub fn with_flipped_sign(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.cells[index].sign = -out.cells[index].sign;
        out
    }

    /// Checks length and trailing-zero pattern of a symbol vector.
    pub fn check_symbols(&self, s: &SymbolVector) -> Result<()> {
        if s.symbols.len() != self.n_tx {
            return Err(Error::InvalidSymbolVector(format!(
                "length {} but design {} has n_tx={}",
                s.symbols.len(),
                self.name,
                self.n_tx
            )));
        }
        if let Some(pos) = s.symbols[self.n_info..].iter().position(|z| *z != Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidSymbolVector(format!(
                "entry {} must be zero (design {} carries {} symbols)",
                self.n_info + pos,
                self.name,
                self.n_info
            )));
        }
        if s.symbols.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSymbolVector("non-finite entry".into()));
        }
        Ok(())
    }
}

/// A proxy codeword `s_u`: `N_T` complex entries, trailing ones zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolVector {
    pub symbols: Vec<Complex64>,
    pub label: usize,
}

impl SymbolVector {
    pub fn new(symbols: Vec<Complex64>, label: usize) -> Self {
        Self { symbols, label }
    }

    /// Pads the information symbols with zeros up to `n_tx`.
    pub fn padded(info: &[Complex64], n_tx: usize, label: usize) -> Self {
        let mut symbols = info.to_vec();
        symbols.resize(n_tx.max(info.len()), Complex64::new(0.0, 0.0));
        Self { symbols, label }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.symbols.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Dense complex matrix, row-major. Rows index time slots, columns antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CodeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Stacks matrices vertically (consecutive blocks in time).
    pub fn stack(blocks: &[CodeMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        assert!(blocks.iter().all(|b| b.cols == cols), "column mismatch");
        Self {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            entries: blocks.iter().flat_map(|b| b.entries.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.cols + col] = v;
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `G h` for a column vector `h` of length `cols`.
    pub fn mul_vec(&self, h: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(h.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.entries[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(h)
                    .map(|(g, x)| g * x)
                    .sum()
            })
            .collect()
    }

    /// `G^H G`, a `cols × cols` matrix.
    pub fn gram(&self) -> CodeMatrix {
        let mut out = CodeMatrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let v = (0..self.rows).map(|r| self.get(r, i).conj() * self.get(r, j)).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn sub(&self, other: &CodeMatrix) -> CodeMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CodeMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest entrywise deviation of `G^H G` from `scale · I`.
    pub fn deviation_from_scaled_identity(&self, scale: f64) -> f64 {
        let gram = self.gram();
        let mut worst: f64 = 0.0;
        for i in 0..self.cols {
            for j in 0..self.cols {
                let target = if i == j { scale } else { 0.0 };
                worst = worst.max((gram.get(i, j) - target).norm());
            }
        }
        worst
    }
}

/// Applies the design's entry map to a symbol vector.
pub fn build_code_matrix(design: &OstbcDesign, s: &SymbolVector) -> Result<CodeMatrix> {
    design.check_symbols(s)?;
    let mut g = CodeMatrix::zeros(design.n_tx, design.n_tx);
    for cell in &design.cells {
        g.set(cell.row, cell.col, cell.value(&s.symbols));
    }
    Ok(g)
}

/// Max entrywise `|(G^H G − ‖s‖² I)_{ij}|`.
pub fn verify_orthogonality(design: &OstbcDesign, s: &SymbolVector) -> Result<f64> {
    let g = build_code_matrix(design, s)?;
    Ok(g.deviation_from_scaled_identity(s.norm_sqr()))
}

/// Average received SNR per receive antenna, `ρ Σ_u ‖G_u‖_F² / (M · T · N0)`.
///
/// `T` is the number of time slots of the code matrix (`N_T` for a single
/// block). Codewords spanning several blocks are passed as one slice per
/// codeword.
pub fn average_snr_per_antenna(
    design: &OstbcDesign,
    code: &[Vec<SymbolVector>],
    rho: f64,
    n0: f64,
) -> Result<f64> {
    if code.is_empty() {
        return Err(Error::EmptyCode);
    }
    if !(rho >= 0.0) || !(n0 > 0.0) {
        return Err(Error::Domain(format!("need rho >= 0 and n0 > 0, got rho={rho}, n0={n0}")));
    }
    let slots = code[0].len() * design.n_tx;
    let mut total = 0.0;
    for blocks in code {
        if blocks.len() * design.n_tx != slots || blocks.is_empty() {
            return Err(Error::InvalidSymbolVector("codewords span different block counts".into()));
        }
        for s in blocks {
            total += build_code_matrix(design, s)?.frobenius_sqr();
        }
    }
    Ok(rho * total / (code.len() as f64 * slots as f64 * n0))
}

/// The `L`-point alphabet used inside a code matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstituentConstellation {
    pub name: String,
    pub points: Vec<Complex64>,
    /// Bit label of each point (Gray coded for the built-in alphabets).
    pub bit_labels: Vec<u32>,
    pub energy: f64,
}

impl ConstituentConstellation {
    pub fn new(name: impl Into<String>, points: Vec<Complex64>, bit_labels: Vec<u32>) -> Result<Self> {
        let name = name.into();
        let l = points.len();
        if l == 0 || !l.is_power_of_two() {
            return Err(Error::InvalidDesign(format!("{name}: size {l} is not a power of two")));
        }
        if bit_labels.len() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: bit_labels.len(),
            });
        }
        let mut seen = vec![false; l];
        for &b in &bit_labels {
            let b = b as usize;
            if b >= l || seen[b] {
                return Err(Error::InvalidDesign(format!("{name}: bit labels must be a permutation of 0..{l}")));
            }
            seen[b] = true;
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / l as f64;
        if !(energy > 0.0) {
            return Err(Error::InvalidDesign(format!("{name}: zero average energy")));
        }
        Ok(Self {
            name,
            points,
            bit_labels,
            energy,
        })
    }

    /// BPSK with energy `e`: bit 0 → `+√e`, bit 1 → `−√e`.
    pub fn bpsk(e: f64) -> Self {
        let a = e.sqrt();
        Self::new("bpsk", vec![Complex64::new(a, 0.0), Complex64::new(-a, 0.0)], vec![0, 1]).expect("static")
    }

    /// Gray-mapped QPSK with energy `e`. The high bit selects the sign of the
    /// in-phase part, the low bit the sign of the quadrature part.
    pub fn qpsk(e: f64) -> Self {
        let a = (e / 2.0).sqrt();
        let points = (0..4u32)
            .map(|b| {
                let re = if b & 0b10 == 0 { a } else { -a };
                let im = if b & 0b01 == 0 { a } else { -a };
                Complex64::new(re, im)
            })
            .collect();
        Self::new("qpsk", points, vec![0, 1, 2, 3]).expect("static")
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }
}
