//! Construction, validation and file I/O for stabilizer codes.
//!
//! The built-in generator produces dual-containing CSS codes from a random
//! sparse circulant C: the rows of `H0 = [C | Cᵀ]` are mutually orthogonal
//! because circulants commute, so stacking `H0` as both the pure-X and the
//! pure-Z block always yields a valid stabilizer matrix. Rows are deleted
//! down to a target count to remove the rank deficiency of the circulant,
//! keeping column weights as uniform as possible.

use crate::bits::BitVec;
use crate::stabilizer::{BinarySymplecticRow, StabilizerMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("could not reach the requested weight distribution after {attempts} resamples")]
    WeightRetriesExhausted { attempts: u32 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: index {index} outside [1, {n}]")]
    IndexOutOfRange { line: usize, index: i64, n: usize },
    #[error("rows {row_a} and {row_b} anti-commute")]
    NonCommuting { row_a: usize, row_b: usize },
    #[error("header declares K = {declared} but the rows give K = {actual}")]
    LogicalCountMismatch { declared: usize, actual: usize },
    #[error("{0}")]
    Stabilizer(#[from] crate::stabilizer::StabilizerError),
}

/// Parameters for the circulant-based dual-containing construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BicycleParams {
    /// Qubit count; must be even.
    pub n: usize,
    /// Target weight of each stabilizer row; must be even and >= 2.
    pub row_weight: usize,
    /// Rows kept per block after deletion; the final matrix has
    /// `2 * m_target` rows.
    pub m_target: usize,
    pub seed: u64,
}

impl BicycleParams {
    pub fn validate(&self) -> Result<(), CodeError> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(CodeError::InvalidParams(format!(
                "n = {} must be even and >= 2",
                self.n
            )));
        }
        if self.row_weight < 2 || self.row_weight % 2 != 0 {
            return Err(CodeError::InvalidParams(format!(
                "row_weight = {} must be even and >= 2",
                self.row_weight
            )));
        }
        if self.row_weight / 2 > self.n / 2 {
            return Err(CodeError::InvalidParams(format!(
                "row_weight/2 = {} exceeds the circulant size {}",
                self.row_weight / 2,
                self.n / 2
            )));
        }
        if self.m_target == 0 || self.m_target > self.n / 2 {
            return Err(CodeError::InvalidParams(format!(
                "m_target = {} must be in [1, {}]",
                self.m_target,
                self.n / 2
            )));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        format!(
            "bicycle-n{}-w{}-m{}-s{}",
            self.n, self.row_weight, self.m_target, self.seed
        )
    }
}

const RESAMPLE_LIMIT: u32 = 200;

/// Builds a dual-containing CSS code from `params`, deterministically in the
/// seed. The circulant is resampled when row deletion leaves an uncovered
/// column, up to a bounded number of attempts.
pub fn bicycle_code(params: &BicycleParams) -> Result<StabilizerMatrix, CodeError> {
    params.validate()?;
    let half = params.n / 2;
    let w_half = params.row_weight / 2;
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);

    for _ in 0..RESAMPLE_LIMIT {
        let offsets = rand::seq::index::sample(&mut rng, half, w_half).into_vec();
        let h = deleted_block_rows(half, &offsets, params.m_target);

        let mut col_covered = vec![false; params.n];
        for row in &h {
            for c in row.ones() {
                col_covered[c] = true;
            }
        }
        if col_covered.iter().any(|&c| !c) {
            continue;
        }

        let zeros = BitVec::zeros(params.n);
        let mut rows = Vec::with_capacity(2 * h.len());
        for x in &h {
            rows.push(BinarySymplecticRow::new(x.clone(), zeros.clone())?);
        }
        for z in &h {
            rows.push(BinarySymplecticRow::new(zeros.clone(), z.clone())?);
        }
        return Ok(StabilizerMatrix::new(params.n, rows)?);
    }
    Err(CodeError::WeightRetriesExhausted {
        attempts: RESAMPLE_LIMIT,
    })
}

/// Rows of `[C | Cᵀ]` for the circulant with ones at `offsets`, thinned to
/// `m_target` rows. Each deletion removes the row whose absence flattens the
/// column-weight histogram most, ties going to the lowest row index.
fn deleted_block_rows(half: usize, offsets: &[usize], m_target: usize) -> Vec<BitVec> {
    let n = 2 * half;
    let mut rows: Vec<BitVec> = (0..half)
        .map(|r| {
            let mut row = BitVec::zeros(n);
            for &o in offsets {
                // C[r][c] = 1 at c = (o + r) mod half
                row.set((o + r) % half, true);
                // Cᵀ[r][c] = 1 at c = (r - o) mod half
                row.set(half + (r + half - o) % half, true);
            }
            row
        })
        .collect();

    let mut col_w = vec![0i64; n];
    for row in &rows {
        for c in row.ones() {
            col_w[c] += 1;
        }
    }
    while rows.len() > m_target {
        // removing row i reduces the sum of squared column weights by
        // sum_c (2 w_c - 1); the largest reduction flattens most
        let mut best = 0usize;
        let mut best_gain = i64::MIN;
        for (i, row) in rows.iter().enumerate() {
            let gain: i64 = row.ones().map(|c| 2 * col_w[c] - 1).sum();
            if gain > best_gain {
                best_gain = gain;
                best = i;
            }
        }
        for c in rows[best].ones() {
            col_w[c] -= 1;
        }
        rows.remove(best);
    }
    rows
}

/// Structural report on a stabilizer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeReport {
    pub n_qubits: usize,
    pub n_rows: usize,
    pub gf2_rank: usize,
    pub n_logical: usize,
    /// Rate K/N as the pair (K, N).
    pub rate: (usize, usize),
    pub commutes: bool,
    pub css: bool,
    /// Row weight -> count, over the 2N-column binary matrix.
    pub row_weights: BTreeMap<usize, usize>,
    /// Column weight -> count, over all 2N columns.
    pub col_weights: BTreeMap<usize, usize>,
}

impl fmt::Display for CodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "N = {}  M = {}  rank = {}  K = {}",
            self.n_qubits, self.n_rows, self.gf2_rank, self.n_logical
        )?;
        writeln!(
            f,
            "rate = {}/{} ({:.4})",
            self.rate.0,
            self.rate.1,
            self.rate.0 as f64 / self.rate.1 as f64
        )?;
        writeln!(f, "commutes = {}", self.commutes)?;
        writeln!(f, "css = {}", self.css)?;
        write!(f, "row weights:")?;
        for (w, c) in &self.row_weights {
            write!(f, " {w}x{c}")?;
        }
        writeln!(f)?;
        write!(f, "col weights:")?;
        for (w, c) in &self.col_weights {
            write!(f, " {w}x{c}")?;
        }
        Ok(())
    }
}

/// Computes rank, rate, commutativity, CSS structure and weight histograms.
pub fn validate_code(a: &StabilizerMatrix) -> CodeReport {
    let mut row_weights = BTreeMap::new();
    let mut col_counts = vec![0usize; 2 * a.n_qubits()];
    for row in a.rows() {
        let w = row.x().count_ones() + row.z().count_ones();
        *row_weights.entry(w).or_insert(0) += 1;
        for c in row.x().ones() {
            col_counts[c] += 1;
        }
        for c in row.z().ones() {
            col_counts[a.n_qubits() + c] += 1;
        }
    }
    let mut col_weights = BTreeMap::new();
    for w in col_counts {
        *col_weights.entry(w).or_insert(0) += 1;
    }
    CodeReport {
        n_qubits: a.n_qubits(),
        n_rows: a.n_rows(),
        gf2_rank: a.rank(),
        n_logical: a.n_logical(),
        rate: a.rate(),
        commutes: a.commutes(),
        css: a.is_css(),
        row_weights,
        col_weights,
    }
}

/// Renders a matrix in the text code format:
///
/// ```text
/// QLDPC 1
/// N K M
/// x: i1 i2 ... ; z: j1 j2 ...
/// ```
///
/// with 1-based, strictly increasing column indices per half and LF line
/// endings.
pub fn code_to_string(a: &StabilizerMatrix) -> String {
    let mut out = String::new();
    out.push_str("QLDPC 1\n");
    out.push_str(&format!(
        "{} {} {}\n",
        a.n_qubits(),
        a.n_logical(),
        a.n_rows()
    ));
    for row in a.rows() {
        out.push_str("x:");
        for i in row.x().ones() {
            out.push_str(&format!(" {}", i + 1));
        }
        out.push_str(" ; z:");
        for i in row.z().ones() {
            out.push_str(&format!(" {}", i + 1));
        }
        out.push('\n');
    }
    out
}

/// Parses the text code format, rejecting malformed headers, out-of-range
/// or non-increasing indices, a wrong logical count and anti-commuting rows.
pub fn code_from_string(text: &str) -> Result<StabilizerMatrix, CodeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (line_no, magic) = lines.next().ok_or(CodeError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    if magic.trim() != "QLDPC 1" {
        return Err(CodeError::Parse {
            line: line_no + 1,
            msg: format!("expected header `QLDPC 1`, found {:?}", magic.trim()),
        });
    }

    let (line_no, header) = lines.next().ok_or(CodeError::Parse {
        line: line_no + 2,
        msg: "missing size line `N K M`".into(),
    })?;
    let sizes: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| CodeError::Parse {
                line: line_no + 1,
                msg: format!("invalid size {t:?}"),
            })
        })
        .collect::<Result<_, _>>()?;
    let [n, k, m] = sizes[..] else {
        return Err(CodeError::Parse {
            line: line_no + 1,
            msg: "size line must be `N K M`".into(),
        });
    };

    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines.next().ok_or(CodeError::Parse {
            line: line_no + 1,
            msg: format!("expected {m} row lines"),
        })?;
        rows.push(parse_row(line, line_no + 1, n)?);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(CodeError::Parse {
            line: line_no + 1,
            msg: "unexpected content after the last row".into(),
        });
    }

    let matrix = StabilizerMatrix::new(n, rows)?;
    if let Some((a, b)) = matrix.commutation_violation() {
        return Err(CodeError::NonCommuting {
            row_a: a + 1,
            row_b: b + 1,
        });
    }
    if matrix.n_logical() != k {
        return Err(CodeError::LogicalCountMismatch {
            declared: k,
            actual: matrix.n_logical(),
        });
    }
    Ok(matrix)
}

fn parse_row(line: &str, line_no: usize, n: usize) -> Result<BinarySymplecticRow, CodeError> {
    let body = line.trim();
    let rest = body.strip_prefix("x:").ok_or_else(|| CodeError::Parse {
        line: line_no,
        msg: "row must start with `x:`".into(),
    })?;
    let (x_part, z_rest) = rest.split_once(';').ok_or_else(|| CodeError::Parse {
        line: line_no,
        msg: "row must contain `;` between halves".into(),
    })?;
    let z_part = z_rest
        .trim_start()
        .strip_prefix("z:")
        .ok_or_else(|| CodeError::Parse {
            line: line_no,
            msg: "second half must start with `z:`".into(),
        })?;
    let x = parse_half(x_part, line_no, n)?;
    let z = parse_half(z_part, line_no, n)?;
    Ok(BinarySymplecticRow::new(x, z)?)
}

fn parse_half(part: &str, line_no: usize, n: usize) -> Result<BitVec, CodeError> {
    let mut bits = BitVec::zeros(n);
    let mut prev: i64 = 0;
    for tok in part.split_whitespace() {
        let idx: i64 = tok.parse().map_err(|_| CodeError::Parse {
            line: line_no,
            msg: format!("invalid index {tok:?}"),
        })?;
        if idx < 1 || idx as usize > n {
            return Err(CodeError::IndexOutOfRange {
                line: line_no,
                index: idx,
                n,
            });
        }
        if idx <= prev {
            return Err(CodeError::Parse {
                line: line_no,
                msg: format!("indices must be strictly increasing, found {idx} after {prev}"),
            });
        }
        prev = idx;
        bits.set(idx as usize - 1, true);
    }
    Ok(bits)
}

pub fn save_code(a: &StabilizerMatrix, path: &Path) -> Result<(), CodeError> {
    fs::write(path, code_to_string(a))?;
    Ok(())
}

pub fn load_code(path: &Path) -> Result<StabilizerMatrix, CodeError> {
    code_from_string(&fs::read_to_string(path)?)
}
