//! Dense matrices over exact rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<Rational>>,
    ncols: usize,
}

impl RatMatrix {
    #[must_use]
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            rows: vec![vec![Rational::zero(); ncols]; nrows],
            ncols,
        }
    }

    /// # Errors
    /// `LengthMismatch` if a row has the wrong length.
    pub fn from_rows(rows: Vec<Vec<Rational>>, ncols: usize) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::LengthMismatch {
                expected: ncols,
                found: r.len(),
            });
        }
        Ok(Self { rows, ncols })
    }

    #[must_use]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[must_use]
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.rows[r][c]
    }

    /// # Panics
    /// Panics on a row of the wrong length.
    pub fn push_row(&mut self, row: Vec<Rational>) {
        assert_eq!(row.len(), self.ncols, "row length");
        self.rows.push(row);
    }

    #[must_use]
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                t.rows[c][r] = v.clone();
            }
        }
        t
    }

    /// # Panics
    /// Panics on incompatible shapes.
    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows(), "shape mismatch");
        let mut out = Self::zeros(self.nrows(), other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (c, b) in other.rows[k].iter().enumerate() {
                    out.rows[r][c] += a * b;
                }
            }
        }
        out
    }

    /// # Panics
    /// Panics on a vector of the wrong length.
    #[must_use]
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.ncols, "vector length");
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row echelon form in place; returns the pivot columns.
    fn eliminate(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Rational::one() / &rows[r][c];
            for v in &mut rows[r][c..] {
                *v *= &inv;
            }
            let (head, tail) = rows.split_at_mut(r);
            let (pivot_row, tail) = tail.split_first_mut().expect("row r exists");
            for row in head.iter_mut().chain(tail.iter_mut()) {
                let f = row[c].clone();
                if f.is_zero() {
                    continue;
                }
                for (v, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *v -= &f * pv;
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        pivots
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        Self::eliminate(&mut rows, self.ncols).len()
    }

    /// Solves the square system `self · x = b`.
    ///
    /// # Errors
    /// `NotSquare`, `LengthMismatch`, or `SingularSystem`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.nrows();
        if self.ncols != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: self.ncols,
            });
        }
        if b.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut aug: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        let pivots = Self::eliminate(&mut aug, n);
        if pivots.len() < n {
            return Err(Error::SingularSystem);
        }
        Ok(aug.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
    }

    /// Minimizes `‖self · x‖²` subject to `c · x = d` by solving the KKT
    /// system `[[AᵀA, Cᵀ], [C, 0]]`.
    ///
    /// # Errors
    /// `LengthMismatch` on inconsistent shapes, `SingularSystem` if the
    /// constraints are dependent or do not pin down `x` together with `A`.
    pub fn constrained_least_squares(&self, c: &Self, d: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.ncols;
        if c.ncols != n || c.nrows() != d.len() {
            return Err(Error::LengthMismatch {
                expected: n,
                found: c.ncols,
            });
        }
        let m = c.nrows();
        let normal = self.transpose().mul(self);
        let mut kkt = Self::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                kkt.rows[i][j] = normal.rows[i][j].clone();
            }
        }
        for (r, row) in c.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                kkt.rows[n + r][j] = v.clone();
                kkt.rows[j][n + r] = v.clone();
            }
        }
        let mut rhs = vec![Rational::zero(); n];
        rhs.extend(d.iter().cloned());
        let mut sol = kkt.solve(&rhs)?;
        sol.truncate(n);
        Ok(sol)
    }
}
