//! Packed GF(2) bit vectors and elimination helpers.
//!
//! Everything downstream (symplectic products, syndromes, rank and span
//! queries) reduces to word-parallel AND/XOR/popcount on these vectors.

use std::fmt;

const WORD_BITS: usize = 64;

/// Fixed-length bit vector packed into 64-bit words.
///
/// Unused high bits of the last word are kept at zero, so equality, hashing
/// and word-parallel products never see stale data.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at the given positions.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// GF(2) dot product: parity of the bitwise AND.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount of the bitwise OR with `other`.
    pub fn union_count_ones(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in union");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterator over indices of set bits, in increasing order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * WORD_BITS + bit)
    }
}

/// Row basis in echelon form over GF(2).
///
/// Rows are kept sorted by pivot column with each leading one at its pivot,
/// which makes rank and span-membership queries O(rank) vector reductions.
#[derive(Clone, Debug)]
pub struct Gf2Basis {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Gf2Basis {
    pub fn new(ncols: usize) -> Self {
        Gf2Basis {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a>(ncols: usize, rows: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut basis = Gf2Basis::new(ncols);
        for row in rows {
            basis.insert(row);
        }
        basis
    }

    /// Adds a row to the basis. Returns true when the rank increased.
    pub fn insert(&mut self, row: &BitVec) -> bool {
        assert_eq!(row.len(), self.ncols, "column count mismatch");
        let rem = self.reduce(row);
        match rem.first_one() {
            None => false,
            Some(pivot) => {
                let pos = self.pivots.partition_point(|&p| p < pivot);
                self.pivots.insert(pos, pivot);
                self.rows.insert(pos, rem);
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the remainder is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ncols, "column count mismatch");
        let mut rem = v.clone();
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            if rem.get(pivot) {
                rem.xor_assign(row);
            }
        }
        rem
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert!(v.get(0) && v.get(64) && v.get(129));
        assert!(!v.get(1) && !v.get(63) && !v.get(128));
        assert_eq!(v.count_ones(), 3);
        v.set(64, false);
        assert_eq!(v.count_ones(), 2);
    }

    #[test]
    fn ones_iterates_in_order() {
        let v = BitVec::from_indices(200, &[3, 64, 65, 199]);
        let idx: Vec<usize> = v.ones().collect();
        assert_eq!(idx, vec![3, 64, 65, 199]);
    }

    #[test]
    fn dot_is_and_parity() {
        let a = BitVec::from_indices(70, &[0, 5, 69]);
        let b = BitVec::from_indices(70, &[5, 69]);
        assert!(!a.dot(&b)); // two shared ones -> even
        let c = BitVec::from_indices(70, &[5]);
        assert!(a.dot(&c));
    }

    #[test]
    fn concat_places_bits() {
        let a = BitVec::from_indices(3, &[1]);
        let b = BitVec::from_indices(4, &[0, 3]);
        let c = a.concat(&b);
        let idx: Vec<usize> = c.ones().collect();
        assert_eq!(c.len(), 7);
        assert_eq!(idx, vec![1, 3, 6]);
    }

    #[test]
    fn basis_rank_and_span() {
        let r1 = BitVec::from_indices(4, &[0, 1]);
        let r2 = BitVec::from_indices(4, &[1, 2]);
        let r3 = BitVec::from_indices(4, &[0, 2]); // r1 + r2
        let mut basis = Gf2Basis::new(4);
        assert!(basis.insert(&r1));
        assert!(basis.insert(&r2));
        assert!(!basis.insert(&r3));
        assert_eq!(basis.rank(), 2);
        assert!(basis.contains(&r3));
        assert!(!basis.contains(&BitVec::from_indices(4, &[3])));
        assert!(basis.contains(&BitVec::zeros(4)));
    }
}
