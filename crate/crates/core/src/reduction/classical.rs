//! Binary linear codes given by a full-rank generator matrix.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest dimension enumerated by [`ClassicalCode::brute_force_we`].
pub const MAX_BRUTE_FORCE_K: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    g: BitMatrix,
}

impl ClassicalCode {
    /// # Errors
    /// `RankDeficient` if the rows of `g` are dependent.
    pub fn new(g: BitMatrix) -> Result<Self> {
        let rank = g.rank();
        if rank != g.nrows() {
            return Err(Error::RankDeficient {
                rank,
                expected: g.nrows(),
            });
        }
        Ok(Self { g })
    }

    /// Parses the text matrix format (rows of `0`/`1`, `#` comments).
    ///
    /// # Errors
    /// `Parse` on malformed text, `RankDeficient` on dependent rows.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::new(BitMatrix::from_text(text)?)
    }

    /// `[1 1 … 1]`.
    #[must_use]
    pub fn repetition(n: usize) -> Self {
        Self::new(BitMatrix::from_rows(vec![ones(n)], n).expect("row length")).expect("nonzero row")
    }

    /// The whole space `F₂ⁿ`.
    #[must_use]
    pub fn full_space(n: usize) -> Self {
        Self::new(BitMatrix::identity(n)).expect("identity is full rank")
    }

    /// The [7,4] Hamming code.
    #[must_use]
    pub fn hamming74() -> Self {
        Self::from_text("1000110\n0100101\n0010011\n0001111\n").expect("valid generator")
    }

    /// Uniformly random full-rank `k × n` generator, by rejection.
    ///
    /// # Panics
    /// Panics if `k > n`.
    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        assert!(k <= n, "k > n");
        loop {
            let rows = (0..k)
                .map(|_| {
                    let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                    BitVector::from_bools(&bits)
                })
                .collect();
            if let Ok(c) = Self::new(BitMatrix::from_rows(rows, n).expect("row length")) {
                return c;
            }
        }
    }

    #[must_use]
    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.g.ncols()
    }

    #[must_use]
    pub fn k(&self) -> usize {
        self.g.nrows()
    }

    /// Rows extending the generator to a basis of `F₂ⁿ`.
    #[must_use]
    pub fn complement(&self) -> BitMatrix {
        self.g.complete_basis().expect("generator is full rank")
    }

    /// The same code with `extra` zero coordinates appended.
    #[must_use]
    pub fn padded(&self, extra: usize) -> Self {
        let n = self.n() + extra;
        let rows = self.g.rows().iter().map(|r| r.resized(n)).collect();
        Self::new(BitMatrix::from_rows(rows, n).expect("row length")).expect("rank unchanged")
    }

    /// The code spanned by the generator plus `extra` rows.
    ///
    /// # Errors
    /// `RankDeficient` if the rows are dependent.
    pub fn extended(&self, extra: &[BitVector]) -> Result<Self> {
        let mut rows = self.g.rows().to_vec();
        rows.extend(extra.iter().cloned());
        Self::new(BitMatrix::from_rows(rows, self.n())?)
    }

    /// Weight enumerator `WE_0..WE_n` by listing all codewords.
    ///
    /// # Errors
    /// `TooLarge` if `k > 24`.
    pub fn brute_force_we(&self) -> Result<Vec<u64>> {
        self.coset_we(&BitVector::zeros(self.n()))
    }

    /// Weight enumerator of the coset `C + shift`.
    ///
    /// # Errors
    /// `TooLarge` if `k > 24`; `LengthMismatch` on a wrong shift length.
    pub fn coset_we(&self, shift: &BitVector) -> Result<Vec<u64>> {
        if self.k() > MAX_BRUTE_FORCE_K {
            return Err(Error::TooLarge {
                what: "classical codewords",
                log2: self.k(),
                limit: MAX_BRUTE_FORCE_K,
            });
        }
        if shift.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: shift.len(),
            });
        }
        let mut counts = vec![0u64; self.n() + 1];
        let mut word = shift.clone();
        counts[word.weight()] += 1;
        for i in 1u64..1 << self.k() {
            word.xor_assign(self.g.row(i.trailing_zeros() as usize));
            counts[word.weight()] += 1;
        }
        Ok(counts)
    }

    /// Minimum Hamming weight over the coset `C + shift`.
    ///
    /// # Errors
    /// As [`coset_we`](Self::coset_we).
    pub fn coset_distance(&self, shift: &BitVector) -> Result<usize> {
        let we = self.coset_we(shift)?;
        Ok(we.iter().position(|&c| c > 0).expect("coset is nonempty"))
    }
}

fn ones(n: usize) -> BitVector {
    BitVector::from_bools(&vec![true; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumerators() {
        assert_eq!(ClassicalCode::repetition(3).brute_force_we().unwrap(), vec![1, 0, 0, 1]);
        assert_eq!(ClassicalCode::hamming74().brute_force_we().unwrap(), vec![1, 0, 0, 7, 7, 0, 0, 1]);
        assert_eq!(ClassicalCode::full_space(4).brute_force_we().unwrap(), vec![1, 4, 6, 4, 1]);
        let g = ClassicalCode::from_text("110\n011\n").unwrap();
        assert_eq!(g.brute_force_we().unwrap(), vec![1, 0, 3, 0]);
    }

    #[test]
    fn rank_deficient_rejected() {
        assert!(matches!(
            ClassicalCode::from_text("11\n11\n"),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn cosets() {
        let c = ClassicalCode::repetition(3);
        let comp = c.complement();
        assert_eq!(comp.nrows(), 2);
        let g = comp.row(1);
        assert_eq!(c.coset_we(g).unwrap().iter().sum::<u64>(), 2);
        assert_eq!(c.coset_distance(g).unwrap(), 1);
    }

    #[test]
    fn random_is_full_rank_and_seeded() {
        let a = ClassicalCode::random(4, 2, &mut ChaCha8Rng::seed_from_u64(3));
        let b = ClassicalCode::random(4, 2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.k(), 2);
    }
}
