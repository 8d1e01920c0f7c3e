//! Binary-symplectic representation of Pauli operators and stabilizer codes.
//!
//! A Pauli string on `N` qubits (phases discarded) is a pair of length-`N`
//! bit vectors: `x` marks X-containing positions, `z` marks Z-containing
//! ones, and Y sets both. Commutation of two strings is the symplectic
//! product `a.x·b.z + a.z·b.x` over GF(2), and a stabilizer code is a set of
//! mutually commuting rows. Syndromes map the measurement eigenvalues
//! {+1, -1} to bits {0, 1}.

use crate::bits::{BitVec, Gf2Basis};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabilizerError {
    #[error("length mismatch: expected {expected} qubits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid Pauli character {0:?}")]
    InvalidPauli(char),
    #[error("stabilizer matrix needs at least one qubit")]
    NoQubits,
}

/// Single-qubit Pauli operator with phase factors discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Inverse of the (x, z) bit-pair encoding: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1).
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self, StabilizerError> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(StabilizerError::InvalidPauli(other)),
        }
    }
}

/// A Pauli operator on `N` qubits as an explicit sequence, e.g. `ZZXIX`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString(ops)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    /// Splits the string into its X-containing and Z-containing bit vectors.
    pub fn to_binary(&self) -> BinarySymplecticRow {
        let mut x = BitVec::zeros(self.len());
        let mut z = BitVec::zeros(self.len());
        for (i, p) in self.0.iter().enumerate() {
            if p.x_bit() {
                x.set(i, true);
            }
            if p.z_bit() {
                z.set(i, true);
            }
        }
        BinarySymplecticRow { x, z }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = StabilizerError;

    fn from_str(s: &str) -> Result<Self, StabilizerError> {
        s.chars().map(Pauli::from_char).collect::<Result<_, _>>().map(PauliString)
    }
}

/// One Pauli string in binary symplectic form: `x` and `z` bit vectors of
/// equal length. This is also the representation of a sampled error pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySymplecticRow {
    x: BitVec,
    z: BitVec,
}

/// Error pattern on a block of qubits; same data layout as a stabilizer row.
pub type PauliErrorPattern = BinarySymplecticRow;

impl BinarySymplecticRow {
    pub fn new(x: BitVec, z: BitVec) -> Result<Self, StabilizerError> {
        if x.len() != z.len() {
            return Err(StabilizerError::LengthMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(BinarySymplecticRow { x, z })
    }

    pub fn identity(n_qubits: usize) -> Self {
        BinarySymplecticRow {
            x: BitVec::zeros(n_qubits),
            z: BitVec::zeros(n_qubits),
        }
    }

    /// Pattern with a single non-identity Pauli at `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut row = Self::identity(n_qubits);
        row.x.set(qubit, pauli.x_bit());
        row.z.set(qubit, pauli.z_bit());
        row
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn pauli_at(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.x.get(i), self.z.get(i))
    }

    /// Exact inverse of [`PauliString::to_binary`].
    pub fn to_pauli_string(&self) -> PauliString {
        PauliString((0..self.n_qubits()).map(|i| self.pauli_at(i)).collect())
    }

    /// Symplectic product `a.x·b.z + a.z·b.x` over GF(2).
    ///
    /// Returns false when the operators commute, true when they anti-commute.
    pub fn symplectic_product(&self, other: &Self) -> Result<bool, StabilizerError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(StabilizerError::LengthMismatch {
                expected: self.n_qubits(),
                got: other.n_qubits(),
            });
        }
        Ok(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// Componentwise GF(2) sum (composition of the two Pauli operators,
    /// phases discarded).
    pub fn xor(&self, other: &Self) -> Result<Self, StabilizerError> {
        if self.n_qubits() != other.n_qubits() {
            return Err(StabilizerError::LengthMismatch {
                expected: self.n_qubits(),
                got: other.n_qubits(),
            });
        }
        Ok(BinarySymplecticRow {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        })
    }

    /// Number of qubits with X, Y or Z support.
    pub fn weight(&self) -> usize {
        self.x.union_count_ones(&self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// The row as a single vector over 2N columns, x half first.
    pub fn combined(&self) -> BitVec {
        self.x.concat(&self.z)
    }
}

/// Syndrome bits: 0 for eigenvalue +1 (commutes), 1 for eigenvalue -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome(BitVec);

impl Syndrome {
    pub fn from_bits(bits: BitVec) -> Self {
        Syndrome(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }
}

/// How a decoded estimate relates to the true error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidualClass {
    /// Estimate equals the error exactly.
    Exact,
    /// Residual is a stabilizer: acts trivially on the code space.
    DegenerateSuccess,
    /// Residual commutes with every stabilizer but is not one: corrupts
    /// encoded data undetectably.
    LogicalError,
    /// Residual has a non-zero syndrome.
    SyndromeMismatch,
}

/// Stabilizer generators in binary symplectic form `A = (A1 | A2)`:
/// M rows by 2N columns, with `A1` the X-containing half and `A2` the
/// Z-containing half.
///
/// A GF(2) row basis over the 2N-column representation is computed once at
/// construction; rank, the logical-qubit count `K = N - rank` and span
/// membership all come from it. The type is immutable after construction.
#[derive(Debug, Clone)]
pub struct StabilizerMatrix {
    n_qubits: usize,
    rows: Vec<BinarySymplecticRow>,
    n_logical: usize,
    span: Gf2Basis,
}

impl StabilizerMatrix {
    pub fn new(n_qubits: usize, rows: Vec<BinarySymplecticRow>) -> Result<Self, StabilizerError> {
        if n_qubits == 0 {
            return Err(StabilizerError::NoQubits);
        }
        for row in &rows {
            if row.n_qubits() != n_qubits {
                return Err(StabilizerError::LengthMismatch {
                    expected: n_qubits,
                    got: row.n_qubits(),
                });
            }
        }
        let combined: Vec<BitVec> = rows.iter().map(|r| r.combined()).collect();
        let span = Gf2Basis::from_rows(2 * n_qubits, combined.iter());
        let n_logical = n_qubits - span.rank();
        Ok(StabilizerMatrix {
            n_qubits,
            rows,
            n_logical,
            span,
        })
    }

    pub fn from_pauli_strings(strings: &[PauliString]) -> Result<Self, StabilizerError> {
        let n = strings.first().map(PauliString::len).ok_or(StabilizerError::NoQubits)?;
        let rows = strings.iter().map(PauliString::to_binary).collect();
        StabilizerMatrix::new(n, rows)
    }

    /// The `[[5,1]]` code: four generators `ZZXIX, XZZXI, IXZZX, XIXZZ`
    /// encoding one qubit in five (rate 1/5).
    pub fn five_qubit() -> Self {
        let strings: Vec<PauliString> = ["ZZXIX", "XZZXI", "IXZZX", "XIXZZ"]
            .iter()
            .map(|s| s.parse().expect("valid Pauli strings"))
            .collect();
        StabilizerMatrix::from_pauli_strings(&strings).expect("valid five-qubit generators")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Number of encoded qubits `K = N - rank(A)`.
    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// Code rate as the pair (K, N).
    pub fn rate(&self) -> (usize, usize) {
        (self.n_logical, self.n_qubits)
    }

    pub fn rows(&self) -> &[BinarySymplecticRow] {
        &self.rows
    }

    /// True iff every pair of rows commutes, i.e. `A1·A2ᵀ + A2·A1ᵀ = 0`.
    pub fn commutes(&self) -> bool {
        self.commutation_violation().is_none()
    }

    /// First anti-commuting row pair (0-based), if any.
    pub fn commutation_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows.len() {
            for j in (i + 1)..self.rows.len() {
                let anti = self.rows[i]
                    .symplectic_product(&self.rows[j])
                    .expect("rows share qubit count");
                if anti {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Syndrome of an error pattern: bit i is the symplectic product of
    /// row i with the error, `A1_i·e_z + A2_i·e_x` over GF(2).
    pub fn syndrome(&self, error: &PauliErrorPattern) -> Result<Syndrome, StabilizerError> {
        if error.n_qubits() != self.n_qubits {
            return Err(StabilizerError::LengthMismatch {
                expected: self.n_qubits,
                got: error.n_qubits(),
            });
        }
        let mut bits = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.symplectic_product(error).expect("lengths checked") {
                bits.set(i, true);
            }
        }
        Ok(Syndrome(bits))
    }

    /// True iff the rows split into pure-X and pure-Z sets whose binary
    /// matrices H, G satisfy `H·Gᵀ = 0` over GF(2).
    pub fn is_css(&self) -> bool {
        let mut x_rows = Vec::new();
        let mut z_rows = Vec::new();
        for row in &self.rows {
            let pure_x = row.z().is_zero();
            let pure_z = row.x().is_zero();
            if pure_x {
                x_rows.push(row);
            } else if pure_z {
                z_rows.push(row);
            } else {
                return false;
            }
        }
        for h in &x_rows {
            for g in &z_rows {
                if h.x().dot(g.z()) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff `r` is a product of rows (GF(2) span membership over the
    /// 2N-column representation).
    pub fn in_row_span(&self, r: &BinarySymplecticRow) -> bool {
        r.n_qubits() == self.n_qubits && self.span.contains(&r.combined())
    }

    /// Classifies a decoded estimate against the true error via the
    /// residual `r = e_hat ⊕ e_true`.
    pub fn residual_class(
        &self,
        e_true: &PauliErrorPattern,
        e_hat: &PauliErrorPattern,
    ) -> Result<ResidualClass, StabilizerError> {
        let r = e_hat.xor(e_true)?;
        if r.n_qubits() != self.n_qubits {
            return Err(StabilizerError::LengthMismatch {
                expected: self.n_qubits,
                got: r.n_qubits(),
            });
        }
        if r.is_identity() {
            return Ok(ResidualClass::Exact);
        }
        if !self.syndrome(&r)?.is_zero() {
            return Ok(ResidualClass::SyndromeMismatch);
        }
        if self.in_row_span(&r) {
            Ok(ResidualClass::DegenerateSuccess)
        } else {
            Ok(ResidualClass::LogicalError)
        }
    }
}
