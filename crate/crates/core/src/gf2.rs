//! Dense linear algebra over GF(2).
//!
//! Vectors are packed into `u64` words, bit `i` living in word `i / 64` at
//! position `i % 64`. Unused high bits of the last word are kept at zero so
//! that word-level equality, hashing and popcounts stay meaningful.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    /// The all-zero vector of length `len`.
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// The `i`-th standard basis vector of length `len`.
    ///
    /// # Panics
    /// Panics if `i >= len`.
    #[must_use]
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from raw words; bits beyond `len` are cleared.
    #[must_use]
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { words, len };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    #[must_use]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// In-place addition (XOR).
    ///
    /// # Panics
    /// Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// # Panics
    /// Panics on length mismatch.
    #[must_use]
    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    ///
    /// # Panics
    /// Panics on length mismatch.
    #[must_use]
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Hamming weight.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// `self` followed by `other`.
    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..end` as a new vector.
    ///
    /// # Panics
    /// Panics if the range exceeds the vector.
    #[must_use]
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len, "slice out of range");
        let mut out = Self::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Zero-extends (or truncates) to `len` bits.
    #[must_use]
    pub fn resized(&self, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for i in self.ones().take_while(|&i| i < len) {
            out.set(i, true);
        }
        out
    }
}

/// Lexicographic order of the bit strings, bit 0 most significant, `0 < 1`.
/// Shorter vectors that are a prefix of longer ones come first.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let low = (a ^ b).trailing_zeros();
                return if (a >> low) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = Self::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid bit character {other:?} in {s:?}"
                    )))
                }
            }
        }
        Ok(v)
    }
}

/// A dense matrix over GF(2), stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    ncols: usize,
}

/// Result of [`BitMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(ncols); nrows],
            ncols,
        }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
            ncols: n,
        }
    }

    /// An empty matrix (no rows) with `ncols` columns.
    #[must_use]
    pub fn empty(ncols: usize) -> Self {
        Self {
            rows: Vec::new(),
            ncols,
        }
    }

    /// # Errors
    /// `LengthMismatch` if the rows differ in length from `ncols`.
    pub fn from_rows(rows: Vec<BitVector>, ncols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::LengthMismatch {
                expected: ncols,
                found: bad.len(),
            });
        }
        Ok(Self { rows, ncols })
    }

    /// Parses rows of `'0'`/`'1'` characters. Lines starting with `#` and
    /// blank lines are skipped.
    ///
    /// # Errors
    /// `Parse` on bad characters or ragged rows.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rows.push(line.parse::<BitVector>()?);
        }
        let ncols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(rows, ncols)
            .map_err(|_| Error::Parse("rows of unequal length".to_string()))
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    #[inline]
    #[must_use]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    #[must_use]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    #[must_use]
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// # Panics
    /// Panics if the row length differs from `ncols`.
    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.rows.push(row);
    }

    /// Rows of `self` followed by rows of `other`.
    ///
    /// # Errors
    /// `LengthMismatch` if the column counts differ.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.ncols {
            return Err(Error::LengthMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            rows,
            ncols: self.ncols,
        })
    }

    #[must_use]
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix-vector product `self · x`.
    ///
    /// # Errors
    /// `LengthMismatch` if `x.len() != ncols`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.ncols {
            return Err(Error::LengthMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        Ok(BitVector::from_bools(
            &self.rows.iter().map(|r| r.dot(x)).collect::<Vec<_>>(),
        ))
    }

    /// Row-vector product `xᵀ · self`, i.e. the sum of the rows selected by `x`.
    ///
    /// # Errors
    /// `LengthMismatch` if `x.len() != nrows`.
    pub fn combine_rows(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.nrows(),
                found: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.ncols);
        for i in x.ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    ///
    /// # Errors
    /// `LengthMismatch` if the inner dimensions differ.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.ncols,
                found: other.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| other.combine_rows(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            ncols: other.ncols,
        })
    }

    /// Reduced row-echelon form by Gauss–Jordan elimination.
    #[must_use]
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == m.nrows() {
                break;
            }
            let Some(p) = (r..m.nrows()).find(|&i| m.rows[i].get(c)) else {
                continue;
            };
            m.rows.swap(r, p);
            let pivot_row = m.rows[r].clone();
            for i in 0..m.nrows() {
                if i != r && m.rows[i].get(c) {
                    m.rows[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: pivots.len(),
            pivots,
        }
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Inverse of a square full-rank matrix.
    ///
    /// # Errors
    /// `NotSquare` or `SingularMatrix`.
    pub fn invert(&self) -> Result<Self> {
        let n = self.nrows();
        if n != self.ncols {
            return Err(Error::NotSquare {
                rows: n,
                cols: self.ncols,
            });
        }
        let augmented: Vec<BitVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVector::unit(n, i)))
            .collect();
        let red = Self::from_rows(augmented, 2 * n)?.rref();
        if red.pivots.iter().copied().take(n).ne(0..n) {
            return Err(Error::SingularMatrix);
        }
        Ok(Self {
            rows: red
                .matrix
                .rows
                .iter()
                .map(|r| r.slice(n, 2 * n))
                .collect(),
            ncols: n,
        })
    }

    /// Extends the rows of `self` to a basis of GF(2)^ncols with standard unit
    /// vectors at the non-pivot columns of `rref(self)`.
    ///
    /// # Errors
    /// `RankDeficient` if the rows of `self` are dependent.
    pub fn complete_basis(&self) -> Result<Self> {
        let red = self.rref();
        if red.rank < self.nrows() {
            return Err(Error::RankDeficient {
                rank: red.rank,
                expected: self.nrows(),
            });
        }
        let mut is_pivot = vec![false; self.ncols];
        for &p in &red.pivots {
            is_pivot[p] = true;
        }
        Ok(Self {
            rows: (0..self.ncols)
                .filter(|&c| !is_pivot[c])
                .map(|c| BitVector::unit(self.ncols, c))
                .collect(),
            ncols: self.ncols,
        })
    }

    /// A particular solution of `self · x = b` with free variables set to 0.
    ///
    /// # Errors
    /// `LengthMismatch`, or `Inconsistent` when no solution exists.
    pub fn solve(&self, b: &BitVector) -> Result<BitVector> {
        if b.len() != self.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.nrows(),
                found: b.len(),
            });
        }
        let augmented: Vec<BitVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.resized(self.ncols + 1);
                if b.get(i) {
                    row.set(self.ncols, true);
                }
                row
            })
            .collect();
        let red = Self::from_rows(augmented, self.ncols + 1)?.rref();
        if red.pivots.last() == Some(&self.ncols) {
            return Err(Error::Inconsistent);
        }
        let mut x = BitVector::zeros(self.ncols);
        for (r, &c) in red.pivots.iter().enumerate() {
            if red.matrix.rows[r].get(self.ncols) {
                x.set(c, true);
            }
        }
        Ok(x)
    }

    /// A basis of the right kernel `{x : self · x = 0}`, one vector per row.
    #[must_use]
    pub fn kernel(&self) -> Self {
        let red = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &red.pivots {
            is_pivot[p] = true;
        }
        let mut rows = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVector::unit(self.ncols, free);
            for (r, &c) in red.pivots.iter().enumerate() {
                if red.matrix.rows[r].get(free) {
                    x.set(c, true);
                }
            }
            rows.push(x);
        }
        Self {
            rows,
            ncols: self.ncols,
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.nrows(), self.ncols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> BitMatrix {
        BitMatrix::from_text(text).unwrap()
    }

    #[test]
    fn rref_of_identity_and_zero() {
        let id = BitMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        let z = BitMatrix::zeros(2, 4);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn rref_detects_dependent_row() {
        let r = m("110\n011\n101").rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.matrix, m("101\n011\n000"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            BitMatrix::identity(4).invert().unwrap(),
            BitMatrix::identity(4)
        );
        let a = m("11\n01");
        assert_eq!(a.invert().unwrap(), a);
        assert!(matches!(m("11\n11").invert(), Err(Error::SingularMatrix)));
        assert!(matches!(m("110").invert(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn complete_basis_examples() {
        let g = m("111");
        let ext = g.complete_basis().unwrap();
        assert_eq!(ext.nrows(), 2);
        assert_eq!(g.stack(&ext).unwrap().rank(), 3);
        assert_eq!(ext, m("010\n001"));
        assert_eq!(BitMatrix::identity(2).complete_basis().unwrap().nrows(), 0);
        assert!(matches!(
            m("11\n11").complete_basis(),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let b: BitVector = "101".parse().unwrap();
        assert_eq!(BitMatrix::identity(3).solve(&b).unwrap(), b);
        let x = m("11").solve(&"1".parse().unwrap()).unwrap();
        assert_eq!(x.to_string(), "10");
        assert!(matches!(
            m("10\n10").solve(&"10".parse().unwrap()),
            Err(Error::Inconsistent)
        ));
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = m("1101\n0111");
        let k = a.kernel();
        assert_eq!(k.nrows(), 2);
        for v in k.rows() {
            assert!(a.mul_vec(v).unwrap().is_zero());
        }
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn text_format_skips_comments() {
        let a = m("# generator\n110\n\n# more\n011\n");
        assert_eq!(a.nrows(), 2);
        assert_eq!(a.to_text(), "110\n011\n");
        assert!(BitMatrix::from_text("10\n1").is_err());
        assert!(BitMatrix::from_text("1a").is_err());
    }

    #[test]
    fn lexicographic_order() {
        let a: BitVector = "0110".parse().unwrap();
        let b: BitVector = "1000".parse().unwrap();
        assert!(a < b);
        let c: BitVector = "0111".parse().unwrap();
        assert!(a < c);
        let long = BitVector::unit(130, 129);
        let longer = BitVector::unit(130, 64);
        assert!(long < longer);
    }

    #[test]
    fn words_straddle_boundary() {
        let mut v = BitVector::zeros(130);
        v.set(63, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![63, 64, 129]);
        let w = BitVector::from_words(vec![u64::MAX; 3], 130);
        assert_eq!(w.weight(), 130);
        assert_eq!(v.slice(63, 65).to_string(), "11");
    }
}
