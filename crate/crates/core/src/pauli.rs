//! Phase-free Pauli operators in symplectic form.
//!
//! An n-qubit operator `Z^z X^x` is stored as the pair `(z, x)`; its η image
//! is the concatenation `z|x`. Two operators anticommute iff
//! `z_a·x_b + x_a·z_b = 1 (mod 2)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Single-qubit Pauli, phases ignored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(z, x)` bits.
    #[must_use]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (false, true),
            Pauli::Y => (true, true),
            Pauli::Z => (true, false),
        }
    }

    #[must_use]
    pub fn from_bits(z: bool, x: bool) -> Self {
        match (z, x) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::X,
            (true, true) => Pauli::Y,
            (true, false) => Pauli::Z,
        }
    }

    #[must_use]
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    z: BitVector,
    x: BitVector,
}

impl PauliOperator {
    /// # Errors
    /// `LengthMismatch` if the parts differ in length.
    pub fn new(z: BitVector, x: BitVector) -> Result<Self> {
        if z.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: z.len(),
                found: x.len(),
            });
        }
        Ok(Self { z, x })
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self {
            z: BitVector::zeros(n),
            x: BitVector::zeros(n),
        }
    }

    /// `P` on qubit `i`, identity elsewhere.
    #[must_use]
    pub fn single(n: usize, i: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(i, p);
        op
    }

    /// `Z` on the support of `bits`.
    #[must_use]
    pub fn z_type(bits: &BitVector) -> Self {
        Self {
            z: bits.clone(),
            x: BitVector::zeros(bits.len()),
        }
    }

    /// `X` on the support of `bits`.
    #[must_use]
    pub fn x_type(bits: &BitVector) -> Self {
        Self {
            z: BitVector::zeros(bits.len()),
            x: bits.clone(),
        }
    }

    #[inline]
    #[must_use]
    pub fn num_qubits(&self) -> usize {
        self.z.len()
    }

    #[inline]
    #[must_use]
    pub fn z(&self) -> &BitVector {
        &self.z
    }

    #[inline]
    #[must_use]
    pub fn x(&self) -> &BitVector {
        &self.x
    }

    #[must_use]
    pub fn get(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.z.get(i), self.x.get(i))
    }

    pub fn set(&mut self, i: usize, p: Pauli) {
        let (z, x) = p.bits();
        self.z.set(i, z);
        self.x.set(i, x);
    }

    /// η image `z|x`.
    #[must_use]
    pub fn eta_encode(&self) -> BitVector {
        self.z.concat(&self.x)
    }

    /// Inverse of [`eta_encode`](Self::eta_encode).
    ///
    /// # Errors
    /// `OddLength` when `b` has odd length.
    pub fn eta_decode(b: &BitVector) -> Result<Self> {
        if !b.len().is_multiple_of(2) {
            return Err(Error::OddLength(b.len()));
        }
        let n = b.len() / 2;
        Ok(Self {
            z: b.slice(0, n),
            x: b.slice(n, 2 * n),
        })
    }

    /// Product up to phase.
    ///
    /// # Errors
    /// `LengthMismatch` on different qubit counts.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            z: self.z.xor(&other.z),
            x: self.x.xor(&other.x),
        })
    }

    /// In-place product up to phase.
    ///
    /// # Panics
    /// Panics on different qubit counts.
    pub fn mul_assign(&mut self, other: &Self) {
        self.z.xor_assign(&other.z);
        self.x.xor_assign(&other.x);
    }

    /// Symplectic product: `true` iff the operators anticommute.
    ///
    /// # Errors
    /// `LengthMismatch` on different qubit counts.
    pub fn symplectic_product(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.anticommutes(other))
    }

    /// # Errors
    /// `LengthMismatch` on different qubit counts.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.symplectic_product(other).map(|s| !s)
    }

    /// Unchecked symplectic product.
    ///
    /// # Panics
    /// Panics on different qubit counts.
    #[inline]
    #[must_use]
    pub fn anticommutes(&self, other: &Self) -> bool {
        self.z.dot(&other.x) ^ self.x.dot(&other.z)
    }

    /// Number of qubits acted on non-trivially.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.z
            .words()
            .iter()
            .zip(self.x.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Hamming weight of the η image (`Y` counts twice).
    #[must_use]
    pub fn symplectic_weight(&self) -> usize {
        self.z.weight() + self.x.weight()
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        self.z.is_zero() && self.x.is_zero()
    }

    /// Tensor product `self ⊗ other`.
    #[must_use]
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            z: self.z.concat(&other.z),
            x: self.x.concat(&other.x),
        }
    }

    /// Zero-extends to `n` qubits (identity on the new ones).
    #[must_use]
    pub fn padded(&self, n: usize) -> Self {
        Self {
            z: self.z.resized(n),
            x: self.x.resized(n),
        }
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.num_qubits() == other.num_qubits() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.num_qubits(),
                found: other.num_qubits(),
            })
        }
    }
}

/// Order of the η images.
impl Ord for PauliOperator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.z
            .cmp(&other.z)
            .then_with(|| self.x.cmp(&other.x))
    }
}

impl PartialOrd for PauliOperator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;

    /// # Panics
    /// Panics on different qubit counts.
    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        self.multiply(rhs).expect("qubit count mismatch")
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.num_qubits() {
            write!(f, "{}", self.get(i).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.chars().count();
        let mut op = Self::identity(n);
        for (i, c) in s.chars().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::Parse(format!(
                        "invalid Pauli character {other:?} in {s:?}"
                    )))
                }
            };
            op.set(i, p);
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn eta_worked_example() {
        assert_eq!(p("XZIY").eta_encode().to_string(), "01011001");
        assert_eq!(p("ZZ").eta_encode().to_string(), "1100");
        assert!(p("IIII").eta_encode().is_zero());
        let b: BitVector = "01011001".parse().unwrap();
        assert_eq!(PauliOperator::eta_decode(&b).unwrap(), p("XZIY"));
        assert_eq!(
            PauliOperator::eta_decode(&"101".parse().unwrap()),
            Err(Error::OddLength(3))
        );
    }

    #[test]
    fn products() {
        let a = p("XZY");
        assert!(a.multiply(&a).unwrap().is_identity());
        let y = p("XI").multiply(&p("ZI")).unwrap();
        assert_eq!(y, p("YI"));
        assert_eq!(y.z().to_string(), "10");
        assert_eq!(y.x().to_string(), "10");
        assert_eq!(&p("ZZ") * &p("ZI"), p("IZ"));
        assert!(matches!(
            p("X").multiply(&p("XX")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn commutation() {
        assert!(p("X").symplectic_product(&p("Z")).unwrap());
        assert!(!p("XX").symplectic_product(&p("ZZ")).unwrap());
        assert!(p("XYZ").commutes_with(&p("III")).unwrap());
    }

    #[test]
    fn weights() {
        let e = p("XZIY");
        assert_eq!(e.weight(), 3);
        assert_eq!(e.symplectic_weight(), 4);
        assert_eq!(p("III").weight(), 0);
        assert_eq!(p("III").symplectic_weight(), 0);
        let y = p("YYYYY");
        assert_eq!(y.weight(), 5);
        assert_eq!(y.symplectic_weight(), 10);
    }

    #[test]
    fn display_roundtrip() {
        assert_eq!(p("xzIy").to_string(), "XZIY");
        assert!("XQ".parse::<PauliOperator>().is_err());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        prop::collection::vec(0u8..4, n).prop_map(|v| {
            let mut op = PauliOperator::identity(v.len());
            for (i, c) in v.into_iter().enumerate() {
                op.set(i, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c as usize]);
            }
            op
        })
    }

    proptest! {
        #[test]
        fn weight_inequality(a in (1usize..80).prop_flat_map(arb_pauli)) {
            let w = a.weight();
            let w2 = a.symplectic_weight();
            prop_assert!(w <= w2 && w2 <= 2 * w);
        }

        #[test]
        fn commutation_symmetric_bilinear(
            (a, b, c) in (1usize..70).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))
        ) {
            prop_assert_eq!(a.anticommutes(&b), b.anticommutes(&a));
            let bc = &b * &c;
            prop_assert_eq!(a.anticommutes(&bc), a.anticommutes(&b) ^ a.anticommutes(&c));
            prop_assert!(!a.anticommutes(&a));
        }

        #[test]
        fn eta_roundtrip(bits in prop::collection::vec(any::<bool>(), 0..60)) {
            let mut bits = bits;
            if bits.len() % 2 == 1 { bits.pop(); }
            let b = BitVector::from_bools(&bits);
            prop_assert_eq!(PauliOperator::eta_decode(&b).unwrap().eta_encode(), b);
        }
    }
}
