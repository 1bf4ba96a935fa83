//! The quantum code built from a classical code, and the oracle interface
//! the reduction is allowed to use.
//!
//! For `C` with generator `G` (k × n) and completed basis `G̃ = [G; g_{k+1};
//! …; g_n]`, let `H = (G̃⁻¹)ᵀ` so that `g_i · h_j = δ_ij`. Qubits are laid
//! out as: `n` data qubits, `n − k − 1` auxiliary qubits, one qubit from the
//! first extension, and the tunable qubit last. Generators:
//!
//! * `Z^{g_i}` for `i ≤ k`;
//! * `Z^{g_{k+i}} ⊗ Z_{aux i}` and `X^{h_{k+i}} ⊗ X_{aux i}` for
//!   `i < n − k`;
//! * `Z^{g_n} ⊗ Z_{ext}` and `X^{h_n} ⊗ X_{ext} ⊗ X_{tun}`.
//!
//! Logicals are `X̄ = X^{h_n} ⊗ X_{ext}` and `Z̄ = Z^{g_n} ⊗ Z_{tun}`. With
//! noise only on the data qubits (X-Z) and the tunable qubit (Z only), the
//! classes at the zero syndrome are `𝕀 ∝ (1−q)·WE_C(p̃)` and
//! `Z̄ ∝ q·WE_{C+g_n}(p̃)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::{PauliChannel, QubitChannel};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::limits::Limits;
use crate::pauli::{Pauli, PauliOperator};
use crate::reduction::classical::ClassicalCode;
use crate::scalar::{Rational, Scalar};
use crate::stabilizer::{LogicalLabel, StabilizerCode, Syndrome};

#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub classical: ClassicalCode,
    /// Completed basis rows `g_{k+1}..g_n`; the last one is `g_n`.
    pub complement: Vec<BitVector>,
    pub code: StabilizerCode,
    /// Minimum Hamming weight over `C + g_n`.
    pub d_coset: usize,
}

impl ReductionInstance {
    /// Uses the standard completion of the generator.
    ///
    /// # Errors
    /// `NoComplement` if `k = n`.
    pub fn new(c: &ClassicalCode) -> Result<Self> {
        Self::with_complement(c, c.complement().rows().to_vec())
    }

    /// Uses the given completion rows; the last one plays `g_n`.
    ///
    /// # Errors
    /// `NoComplement` if `complement` is empty, `RankDeficient` if the rows
    /// do not complete `G` to a basis.
    pub fn with_complement(c: &ClassicalCode, complement: Vec<BitVector>) -> Result<Self> {
        let (n, k) = (c.n(), c.k());
        if complement.is_empty() {
            return Err(Error::NoComplement);
        }
        let mut full = c.generator().rows().to_vec();
        full.extend(complement.iter().cloned());
        let gt = BitMatrix::from_rows(full, n)?;
        if gt.nrows() != n {
            return Err(Error::RankDeficient {
                rank: gt.rank(),
                expected: n,
            });
        }
        let h = gt.invert().map_err(|_| Error::RankDeficient {
            rank: gt.rank(),
            expected: n,
        })?;
        let h = h.transpose();
        let aux = n - k - 1;
        let nq = 2 * n - k + 1;
        let (ext, tun) = (n + aux, n + aux + 1);
        let on = |bits: &BitVector, p: Pauli, extra: &[usize]| {
            let mut op = PauliOperator::identity(nq);
            for i in bits.ones() {
                op.set(i, p);
            }
            for &q in extra {
                op.set(q, p);
            }
            op
        };
        let mut stabs = Vec::with_capacity(nq - 1);
        for i in 0..k {
            stabs.push(on(gt.row(i), Pauli::Z, &[]));
        }
        for i in 0..aux {
            stabs.push(on(gt.row(k + i), Pauli::Z, &[n + i]));
        }
        for i in 0..aux {
            stabs.push(on(h.row(k + i), Pauli::X, &[n + i]));
        }
        stabs.push(on(gt.row(n - 1), Pauli::Z, &[ext]));
        stabs.push(on(h.row(n - 1), Pauli::X, &[ext, tun]));
        let lx = on(h.row(n - 1), Pauli::X, &[ext]);
        let lz = on(gt.row(n - 1), Pauli::Z, &[tun]);
        let code = StabilizerCode::with_logicals(nq, stabs, vec![lx], vec![lz])?;
        let d_coset = c.coset_distance(gt.row(n - 1))?;
        Ok(Self {
            classical: c.clone(),
            complement,
            code,
            d_coset,
        })
    }

    /// Classical length.
    #[must_use]
    pub fn n(&self) -> usize {
        self.classical.n()
    }

    /// `g_n`.
    #[must_use]
    pub fn coset_vector(&self) -> &BitVector {
        self.complement.last().expect("nonempty complement")
    }

    /// X-Z(p) on the data qubits, error-free on the auxiliary and extension
    /// qubits, Z-only(q) on the tunable qubit.
    ///
    /// # Errors
    /// `OutOfRange` unless `p, q ∈ [0, 1]`.
    pub fn channel(&self, p: &Rational, q: &Rational) -> Result<PauliChannel<Rational>> {
        let n = self.n();
        Ok(PauliChannel::compose(&[
            PauliChannel::independent_xz(n, p.clone())?,
            PauliChannel::error_free(self.code.n() - n - 1),
            QubitChannel::z_only(q.clone())?.into(),
        ]))
    }

    /// Joint probabilities `(P(𝕀, 0), P(Z̄, 0))` from the decoder.
    ///
    /// # Errors
    /// Propagates decoder errors.
    pub fn class_pair(&self, p: &Rational, q: &Rational, limits: &Limits) -> Result<(Rational, Rational)> {
        let ch = self.channel(p, q)?;
        let dec = Decoder::new(&self.code, &ch)?.with_limits(*limits);
        let s = Syndrome::zero(self.code.num_generators());
        Ok((
            dec.class_probability(&s, &LogicalLabel::single(false, false))?,
            dec.class_probability(&s, &LogicalLabel::single(false, true))?,
        ))
    }
}

/// Tunable-qubit flip rate for a target ratio `v = (1−q)/q`.
#[must_use]
pub fn q_for_ratio(v: &Rational) -> Rational {
    Rational::one() / (Rational::one() + v)
}

/// `p̃ = p / (2 − p)`.
#[must_use]
pub fn p_tilde(p: &Rational) -> Rational {
    p / (Rational::from_integer(2.into()) - p)
}

/// `Σ c_i x^i`.
#[must_use]
pub fn eval_poly<C>(coeffs: &[C], x: &Rational) -> Rational
where
    C: Clone + Into<num_bigint::BigInt>,
{
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| {
        acc * x + Rational::from_integer(c.clone().into())
    })
}

/// Comparison of the decoder's class probabilities at `(p, q)` with the
/// enumerator forms `(1−q)·N·WE(p̃)` and `q·N·B(p̃)`, `N = (1−p/2)^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub decoder: (Rational, Rational),
    pub formula: (Rational, Rational),
    /// `P(X̄) + P(Ȳ)` at the zero syndrome; zero by construction.
    pub other_classes: Rational,
}

impl IdentityReport {
    #[must_use]
    pub fn holds(&self) -> bool {
        self.decoder == self.formula && self.other_classes.is_zero()
    }
}

/// # Errors
/// Propagates decoder and enumeration errors.
pub fn trivial_class_probability_identity(
    inst: &ReductionInstance,
    p: &Rational,
    q: &Rational,
    limits: &Limits,
) -> Result<IdentityReport> {
    let ch = inst.channel(p, q)?;
    let dec = Decoder::new(&inst.code, &ch)?.with_limits(*limits);
    let s = Syndrome::zero(inst.code.num_generators());
    let probs = dec.class_probabilities(&s)?;
    let get = |x: bool, z: bool| {
        probs
            .iter()
            .find(|(l, _)| *l == LogicalLabel::single(x, z))
            .map(|(_, p)| p.clone())
            .expect("all classes scored")
    };
    let we = inst.classical.brute_force_we()?;
    let b = inst.classical.coset_we(inst.coset_vector())?;
    let norm = (Rational::one() - p / Rational::from_integer(2.into())).pown(2 * inst.n());
    let pt = p_tilde(p);
    Ok(IdentityReport {
        decoder: (get(false, false), get(false, true)),
        formula: (
            (Rational::one() - q) * &norm * eval_poly(&we, &pt),
            q * &norm * eval_poly(&b, &pt),
        ),
        other_classes: get(true, false) + get(true, true),
    })
}

/// Decoder answer at the zero syndrome of a reduction instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "I")]
    Identity,
    #[serde(rename = "Z")]
    LogicalZ,
}

/// A degenerate decoder seen as a black box: only the winning class label
/// comes back.
pub trait ClassOracle {
    /// # Errors
    /// Implementation-defined.
    fn decode(
        &mut self,
        code: &StabilizerCode,
        channel: &PauliChannel<Rational>,
        syndrome: &Syndrome,
    ) -> Result<LogicalLabel>;
}

/// The in-process exact DQMLD decoder.
#[derive(Clone, Debug)]
pub struct ExactDqmld {
    pub limits: Limits,
}

impl Default for ExactDqmld {
    fn default() -> Self {
        Self {
            limits: Limits::from_env(),
        }
    }
}

impl ClassOracle for ExactDqmld {
    fn decode(
        &mut self,
        code: &StabilizerCode,
        channel: &PauliChannel<Rational>,
        syndrome: &Syndrome,
    ) -> Result<LogicalLabel> {
        Ok(Decoder::new(code, channel)?
            .with_limits(self.limits)
            .dqmld(syndrome)?
            .winner)
    }
}

/// One oracle call.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub p: Rational,
    pub q: Rational,
    pub answer: Answer,
}

/// Counts and records every call made through it.
pub struct CountingOracle<O> {
    inner: O,
    pub log: Vec<Query>,
}

impl<O: ClassOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            log: Vec::new(),
        }
    }

    #[must_use]
    pub fn queries(&self) -> usize {
        self.log.len()
    }

    /// Decodes the zero syndrome of `inst` at `(p, q)`.
    ///
    /// # Errors
    /// Propagates oracle errors; `PostCheckFailed` if the oracle names a
    /// class other than `𝕀` or `Z̄`.
    pub fn query(&mut self, inst: &ReductionInstance, p: &Rational, q: &Rational) -> Result<Answer> {
        let ch = inst.channel(p, q)?;
        let s = Syndrome::zero(inst.code.num_generators());
        let label = self.inner.decode(&inst.code, &ch, &s)?;
        let answer = if label == LogicalLabel::single(false, false) {
            Answer::Identity
        } else if label == LogicalLabel::single(false, true) {
            Answer::LogicalZ
        } else {
            return Err(Error::PostCheckFailed(format!(
                "oracle returned class {label} at the zero syndrome"
            )));
        };
        self.log.push(Query {
            p: p.clone(),
            q: q.clone(),
            answer,
        });
        Ok(answer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn repetition_instance() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        assert_eq!((inst.code.n(), inst.code.num_generators(), inst.code.k()), (6, 5, 1));
        assert!(inst.code.validate().is_valid());
        assert_eq!(inst.d_coset, 1);
    }

    #[test]
    fn full_space_has_no_complement() {
        assert_eq!(
            ReductionInstance::new(&ClassicalCode::full_space(2)).unwrap_err(),
            Error::NoComplement
        );
    }

    #[test]
    fn identity_holds() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        let l = Limits::default();
        for (p, q) in [(rat(1, 8), rat(1, 3)), (rat(0, 1), rat(1, 3)), (rat(1, 5), rat(0, 1))] {
            assert!(trivial_class_probability_identity(&inst, &p, &q, &l).unwrap().holds());
        }
        let (_, z) = inst.class_pair(&rat(0, 1), &rat(1, 3), &l).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn oracle_extremes() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        let mut o = CountingOracle::new(ExactDqmld::default());
        let q = q_for_ratio(&rat(1, 10));
        assert_eq!(o.query(&inst, &rat(1, 1 << 20), &q).unwrap(), Answer::Identity);
        assert_eq!(o.query(&inst, &rat(1, 3), &q).unwrap(), Answer::LogicalZ);
        assert_eq!(o.queries(), 2);
    }
}
