//! Exact maximum-likelihood decoding by exhaustive coset summation.
//!
//! Class probabilities are unnormalized joints `P(L, s)`; dividing by
//! `P(s)` gives the conditionals, with identical rankings and gap ratios.

use std::collections::HashMap;

use crate::channel::{PauliChannel, QubitChannel};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pauli::PauliOperator;
use crate::scalar::Scalar;
use crate::stabilizer::{LogicalLabel, StabilizerCode, Syndrome};

/// Counts `A_i` of coset elements by symplectic weight, `i = 0..=2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetEnumerator {
    pub counts: Vec<u64>,
}

impl CosetEnumerator {
    #[must_use]
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(1−p/2)^{2n} Σ A_i p̃^i` with `p̃ = p/(2−p)`: the coset probability
    /// under a uniform independent X-Z channel.
    #[must_use]
    pub fn evaluate_xz<T: Scalar>(&self, p: &T) -> T {
        let two = T::one() + T::one();
        let keep = T::one() - p.clone() / two.clone();
        let pt = p.clone() / (two - p.clone());
        let mut acc = T::zero();
        for &a in self.counts.iter().rev() {
            acc = acc * pt.clone() + count_to_scalar(a);
        }
        acc * keep.pown(self.counts.len() - 1)
    }
}

/// Output of the degenerate decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult<T> {
    pub winner: LogicalLabel,
    /// Joint probability of every class, in label order.
    pub class_probs: Vec<(LogicalLabel, T)>,
    /// `(P* − max_{L≠L*} P(L)) / P*`, zero when `P* = 0`.
    pub achieved_gap: T,
}

impl<T: Scalar> DecodeResult<T> {
    #[must_use]
    pub fn probability(&self, label: &LogicalLabel) -> Option<&T> {
        self.class_probs
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, p)| p)
    }
}

/// Result of the large-gap equivalence check at one syndrome.
#[derive(Clone, Debug, PartialEq)]
pub struct LargeGapReport<T> {
    pub syndrome: Syndrome,
    pub qmld_error: PauliOperator,
    pub qmld_class: LogicalLabel,
    pub dqmld_class: LogicalLabel,
    pub achieved_gap: T,
    /// `1 − 2^{−n−k}`.
    pub gap_threshold: T,
    /// `P(L_min, s) / P(s)`, or one when `P(s) = 0`.
    pub min_class_ratio: T,
    /// `2^{−n−k}`.
    pub ratio_bound: T,
}

impl<T: Scalar> LargeGapReport<T> {
    #[must_use]
    pub fn gap_condition_met(&self) -> bool {
        self.achieved_gap >= self.gap_threshold
    }

    #[must_use]
    pub fn classes_agree(&self) -> bool {
        self.qmld_class == self.dqmld_class
    }

    #[must_use]
    pub fn ratio_ok(&self) -> bool {
        self.min_class_ratio >= self.ratio_bound
    }

    #[must_use]
    pub fn passed(&self) -> bool {
        self.ratio_ok() && (!self.gap_condition_met() || self.classes_agree())
    }
}

/// Histogram of coset elements by symplectic weight.
///
/// # Errors
/// `LengthMismatch` for a wrong syndrome or label size, `TooLarge` past the
/// stabilizer limit.
pub fn coset_enumerator(
    code: &StabilizerCode,
    s: &Syndrome,
    label: &LogicalLabel,
    limits: &Limits,
) -> Result<CosetEnumerator> {
    limits.check_stabilizers(code.num_generators())?;
    let rep = code.coset_representative(s, label)?;
    let walk = CosetWalk::new(code.stabilizers(), code.n());
    let mut counts = vec![0u64; 2 * code.n() + 1];
    walk.for_each(&rep, |z, x| {
        let w: u32 = z.iter().chain(x).map(|w| w.count_ones()).sum();
        counts[w as usize] += 1;
    });
    Ok(CosetEnumerator { counts })
}

/// Exact ML decoders for one code under one channel.
pub struct Decoder<'a, T> {
    code: &'a StabilizerCode,
    channel: &'a PauliChannel<T>,
    groups: Vec<QubitGroup<T>>,
    key_bits: Option<Vec<u32>>,
    limits: Limits,
}

/// Qubits sharing one single-qubit channel.
struct QubitGroup<T> {
    mask: Vec<u64>,
    size: usize,
    /// `powers[c][e] = q_c^e` for `c` in I, X, Y, Z order.
    powers: [Vec<T>; 4],
}

impl<'a, T: Scalar> Decoder<'a, T> {
    /// Limits come from the environment (see [`Limits::from_env`]).
    ///
    /// # Errors
    /// `LengthMismatch` if the channel and code sizes differ.
    pub fn new(code: &'a StabilizerCode, channel: &'a PauliChannel<T>) -> Result<Self> {
        if channel.n() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                found: channel.n(),
            });
        }
        let groups = group_qubits(channel);
        let bits: Vec<u32> = groups
            .iter()
            .map(|g| usize::BITS - g.size.leading_zeros())
            .collect();
        let total: u32 = bits.iter().map(|b| 3 * b).sum();
        Ok(Self {
            code,
            channel,
            groups,
            key_bits: (total <= 128).then_some(bits),
            limits: Limits::from_env(),
        })
    }

    #[must_use]
    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    #[must_use]
    pub fn code(&self) -> &StabilizerCode {
        self.code
    }

    /// # Errors
    /// See [`coset_enumerator`].
    pub fn coset_enumerator(&self, s: &Syndrome, label: &LogicalLabel) -> Result<CosetEnumerator> {
        coset_enumerator(self.code, s, label, &self.limits)
    }

    /// Joint probability `P(L, s) = Σ_S Prob(T_s·L·S)`.
    ///
    /// # Errors
    /// `LengthMismatch` on wrong sizes, `TooLarge` past the stabilizer limit.
    pub fn class_probability(&self, s: &Syndrome, label: &LogicalLabel) -> Result<T> {
        let rep = self.code.coset_representative(s, label)?;
        self.coset_probability(&rep)
    }

    /// `Σ_S Prob(rep·S)` for an explicit representative.
    ///
    /// # Errors
    /// `LengthMismatch` on a wrong size, `TooLarge` past the stabilizer limit.
    pub fn coset_probability(&self, rep: &PauliOperator) -> Result<T> {
        self.limits.check_stabilizers(self.code.num_generators())?;
        if rep.num_qubits() != self.code.n() {
            return Err(Error::LengthMismatch {
                expected: self.code.n(),
                found: rep.num_qubits(),
            });
        }
        let walk = CosetWalk::new(self.code.stabilizers(), self.code.n());
        let Some(bits) = &self.key_bits else {
            let mut acc = T::zero();
            walk.for_each(rep, |z, x| acc = acc.clone() + self.direct(z, x));
            return Ok(acc);
        };
        let mut hist: HashMap<u128, u64> = HashMap::new();
        walk.for_each(rep, |z, x| *hist.entry(self.key(bits, z, x)).or_default() += 1);
        let mut keys: Vec<_> = hist.into_iter().collect();
        keys.sort_unstable();
        let mut acc = T::zero();
        for (key, count) in keys {
            let term = self.key_probability(bits, key);
            if !term.is_zero() {
                acc = acc + term * count_to_scalar(count);
            }
        }
        Ok(acc)
    }

    /// Joint probabilities of all 4^k classes, in label order.
    ///
    /// # Errors
    /// `TooLarge` past the class or stabilizer limits.
    pub fn class_probabilities(&self, s: &Syndrome) -> Result<Vec<(LogicalLabel, T)>> {
        self.limits.check_classes(self.code.k())?;
        LogicalLabel::all(self.code.k())
            .map(|l| {
                let p = self.class_probability(s, &l)?;
                Ok((l, p))
            })
            .collect()
    }

    /// Degenerate ML decoding: the most probable logical class. Exact ties
    /// go to the smaller label.
    ///
    /// # Errors
    /// `TooLarge` past the class or stabilizer limits.
    pub fn dqmld(&self, s: &Syndrome) -> Result<DecodeResult<T>> {
        let class_probs = self.class_probabilities(s)?;
        let mut best = 0;
        for (i, (_, p)) in class_probs.iter().enumerate() {
            if *p > class_probs[best].1 {
                best = i;
            }
        }
        let top = class_probs[best].1.clone();
        let runner_up = class_probs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != best)
            .map(|(_, (_, p))| p.clone())
            .fold(T::zero(), |m, p| if p > m { p } else { m });
        let achieved_gap = if top.is_zero() {
            T::zero()
        } else {
            (top.clone() - runner_up) / top
        };
        Ok(DecodeResult {
            winner: class_probs[best].0.clone(),
            class_probs,
            achieved_gap,
        })
    }

    /// Non-degenerate ML decoding: the single most probable error with
    /// syndrome `s`. Ties go to the smaller η image.
    ///
    /// # Errors
    /// `TooLarge` past the candidate limit.
    pub fn qmld(&self, s: &Syndrome) -> Result<PauliOperator> {
        self.limits.check_candidates(self.code.n() + self.code.k())?;
        let n = self.code.n();
        let walk = CosetWalk::new(self.code.stabilizers(), n);
        let mut best: Option<(T, PauliOperator)> = None;
        let mut consider = |p: T, e: PauliOperator| match &best {
            Some((bp, be)) if p < *bp || (p == *bp && e >= *be) => {}
            _ => best = Some((p, e)),
        };
        for label in LogicalLabel::all(self.code.k()) {
            let rep = self.code.coset_representative(s, &label)?;
            if let Some(bits) = &self.key_bits {
                // Elements sharing a key are equally likely: keep the least
                // η image per key and score each key once.
                let mut least: HashMap<u128, PauliOperator> = HashMap::new();
                walk.for_each(&rep, |z, x| {
                    let key = self.key(bits, z, x);
                    let e = walk.operator(z, x);
                    least
                        .entry(key)
                        .and_modify(|cur| {
                            if e < *cur {
                                *cur = e.clone();
                            }
                        })
                        .or_insert(e);
                });
                for (key, e) in least {
                    consider(self.key_probability(bits, key), e);
                }
            } else {
                walk.for_each(&rep, |z, x| consider(self.direct(z, x), walk.operator(z, x)));
            }
        }
        Ok(best.expect("every coset is nonempty").1)
    }

    /// Checks that a large achieved gap makes QMLD and DQMLD agree, and that
    /// the class of the most likely error carries at least `2^{−n−k}` of the
    /// syndrome's probability.
    ///
    /// # Errors
    /// `TooLarge` past any limit.
    pub fn large_gap_equivalence_check(&self, s: &Syndrome) -> Result<LargeGapReport<T>> {
        let result = self.dqmld(s)?;
        let qmld_error = self.qmld(s)?;
        let qmld_class = self.code.logical_label(&qmld_error);
        let total = result
            .class_probs
            .iter()
            .fold(T::zero(), |acc, (_, p)| acc + p.clone());
        let nk = self.code.n() + self.code.k();
        let ratio_bound = T::one() / (T::one() + T::one()).pown(nk);
        let min_class_ratio = if total.is_zero() {
            T::one()
        } else {
            result
                .probability(&qmld_class)
                .expect("all classes scored")
                .clone()
                / total
        };
        Ok(LargeGapReport {
            syndrome: s.clone(),
            qmld_error,
            qmld_class,
            dqmld_class: result.winner,
            achieved_gap: result.achieved_gap,
            gap_threshold: T::one() - ratio_bound.clone(),
            min_class_ratio,
            ratio_bound,
        })
    }

    /// Packed `(nX, nY, nZ)` counts per qubit group.
    fn key(&self, bits: &[u32], z: &[u64], x: &[u64]) -> u128 {
        let mut key = 0u128;
        for (g, &b) in self.groups.iter().zip(bits) {
            let (mut nx, mut ny, mut nz) = (0u32, 0u32, 0u32);
            for ((m, zw), xw) in g.mask.iter().zip(z).zip(x) {
                nx += (xw & !zw & m).count_ones();
                ny += (xw & zw & m).count_ones();
                nz += (zw & !xw & m).count_ones();
            }
            key = (key << b | u128::from(nx)) << b | u128::from(ny);
            key = key << b | u128::from(nz);
        }
        key
    }

    fn key_probability(&self, bits: &[u32], mut key: u128) -> T {
        let mut prob = T::one();
        for (g, &b) in self.groups.iter().zip(bits).rev() {
            let mask = (1u128 << b) - 1;
            let nz = (key & mask) as usize;
            key >>= b;
            let ny = (key & mask) as usize;
            key >>= b;
            let nx = (key & mask) as usize;
            key >>= b;
            let ni = g.size - nx - ny - nz;
            for (c, e) in [ni, nx, ny, nz].into_iter().enumerate() {
                let f = &g.powers[c][e];
                if f.is_zero() {
                    return T::zero();
                }
                prob = prob * f.clone();
            }
        }
        prob
    }

    fn direct(&self, z: &[u64], x: &[u64]) -> T {
        let mut prob = T::one();
        for i in 0..self.code.n() {
            let (w, b) = (i / 64, i % 64);
            let zi = (z[w] >> b) & 1 == 1;
            let xi = (x[w] >> b) & 1 == 1;
            let q = self.channel.qubit(i);
            let f = match (zi, xi) {
                (false, false) => &q.i,
                (false, true) => &q.x,
                (true, true) => &q.y,
                (true, false) => &q.z,
            };
            if f.is_zero() {
                return T::zero();
            }
            prob = prob * f.clone();
        }
        prob
    }
}

fn group_qubits<T: Scalar>(channel: &PauliChannel<T>) -> Vec<QubitGroup<T>> {
    let n = channel.n();
    let words = n.div_ceil(64).max(1);
    let mut reps: Vec<&QubitChannel<T>> = Vec::new();
    let mut masks: Vec<Vec<u64>> = Vec::new();
    for (i, q) in channel.qubits().iter().enumerate() {
        let g = match reps.iter().position(|r| *r == q) {
            Some(g) => g,
            None => {
                reps.push(q);
                masks.push(vec![0; words]);
                reps.len() - 1
            }
        };
        masks[g][i / 64] |= 1 << (i % 64);
    }
    reps.into_iter()
        .zip(masks)
        .map(|(q, mask)| {
            let size = mask.iter().map(|w| w.count_ones() as usize).sum();
            let table = |v: &T| {
                let mut t = vec![T::one()];
                for e in 1..=size {
                    t.push(t[e - 1].clone() * v.clone());
                }
                t
            };
            QubitGroup {
                powers: [table(&q.i), table(&q.x), table(&q.y), table(&q.z)],
                mask,
                size,
            }
        })
        .collect()
}

fn count_to_scalar<T: Scalar>(c: u64) -> T {
    T::from_ratio(i64::try_from(c).expect("count fits in i64"), 1)
}

/// Gray-code walk over a stabilizer coset on raw words, avoiding per-element
/// allocation.
struct CosetWalk {
    n: usize,
    words: usize,
    gens: Vec<(Vec<u64>, Vec<u64>)>,
}

impl CosetWalk {
    fn new(gens: &[PauliOperator], n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let pad = |w: &[u64]| {
            let mut v = w.to_vec();
            v.resize(words, 0);
            v
        };
        Self {
            n,
            words,
            gens: gens
                .iter()
                .map(|g| (pad(g.z().words()), pad(g.x().words())))
                .collect(),
        }
    }

    fn for_each(&self, start: &PauliOperator, mut f: impl FnMut(&[u64], &[u64])) {
        let mut z = start.z().words().to_vec();
        let mut x = start.x().words().to_vec();
        z.resize(self.words, 0);
        x.resize(self.words, 0);
        f(&z, &x);
        let total = 1u64 << self.gens.len();
        for index in 1..total {
            let (gz, gx) = &self.gens[index.trailing_zeros() as usize];
            for w in 0..self.words {
                z[w] ^= gz[w];
                x[w] ^= gx[w];
            }
            f(&z, &x);
        }
    }

    fn operator(&self, z: &[u64], x: &[u64]) -> PauliOperator {
        use crate::gf2::BitVector;
        PauliOperator::new(
            BitVector::from_words(z.to_vec(), self.n),
            BitVector::from_words(x.to_vec(), self.n),
        )
        .expect("equal lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::stabilizer::GrayCoset;

    fn bit_flip() -> StabilizerCode {
        StabilizerCode::canonical_completion(3, vec!["ZZI".parse().unwrap(), "IZZ".parse().unwrap()])
            .unwrap()
    }

    fn naive(code: &StabilizerCode, ch: &PauliChannel<Rational>, s: &Syndrome, l: &LogicalLabel) -> Rational {
        let rep = code.coset_representative(s, l).unwrap();
        GrayCoset::new(code.stabilizers(), rep)
            .map(|e| ch.error_probability(&e).unwrap())
            .sum()
    }

    #[test]
    fn bit_flip_enumerator() {
        let code = bit_flip();
        let e = coset_enumerator(&code, &Syndrome::zero(2), &LogicalLabel::trivial(1), &Limits::default())
            .unwrap();
        assert_eq!(e.counts, vec![1, 0, 3, 0, 0, 0, 0]);
    }

    #[test]
    fn packed_matches_naive() {
        let code = bit_flip();
        let ch = PauliChannel::compose(&[
            PauliChannel::independent_xz(1, rat(1, 8)).unwrap(),
            PauliChannel::depolarizing(1, rat(1, 5)).unwrap(),
            QubitChannel::z_only(rat(1, 3)).unwrap().into(),
        ]);
        let dec = Decoder::new(&code, &ch).unwrap();
        for s in Syndrome::all(2) {
            for l in LogicalLabel::all(1) {
                assert_eq!(dec.class_probability(&s, &l).unwrap(), naive(&code, &ch, &s, &l));
            }
        }
    }

    #[test]
    fn bit_flip_decoding() {
        let code = bit_flip();
        let ch = PauliChannel::independent_xz(3, rat(1, 8)).unwrap();
        let dec = Decoder::new(&code, &ch).unwrap();
        let s = code.syndrome_of(&"XII".parse().unwrap()).unwrap();
        assert_eq!(s.to_string(), "10");
        assert_eq!(dec.qmld(&s).unwrap(), "XII".parse().unwrap());
        let r = dec.dqmld(&s).unwrap();
        assert_eq!(code.logical_label(&(&"XII".parse().unwrap() * &code.pure_error_for(&s).unwrap())), r.winner);
        assert!(r.achieved_gap > rat(0, 1) && r.achieved_gap <= rat(1, 1));
        let zero = dec.dqmld(&Syndrome::zero(2)).unwrap();
        assert!(zero.winner.is_trivial());
    }

    #[test]
    fn error_free_channel() {
        let code = bit_flip();
        let ch = PauliChannel::<Rational>::error_free(3);
        let dec = Decoder::new(&code, &ch).unwrap();
        let r = dec.dqmld(&Syndrome::zero(2)).unwrap();
        assert_eq!(r.class_probs[0].1, rat(1, 1));
        assert!(r.class_probs[1..].iter().all(|(_, p)| *p == rat(0, 1)));
        assert_eq!(r.achieved_gap, rat(1, 1));
        let bad = dec.dqmld(&"11".parse().unwrap()).unwrap();
        assert_eq!(bad.achieved_gap, rat(0, 1));
        assert!(bad.winner.is_trivial());
        for s in Syndrome::all(2) {
            assert!(dec.large_gap_equivalence_check(&s).unwrap().passed());
        }
    }

    #[test]
    fn enumerator_polynomial_form() {
        let code = bit_flip();
        let p = rat(3, 10);
        let ch = PauliChannel::independent_xz(3, p.clone()).unwrap();
        let dec = Decoder::new(&code, &ch).unwrap();
        for s in Syndrome::all(2) {
            for l in LogicalLabel::all(1) {
                let e = dec.coset_enumerator(&s, &l).unwrap();
                assert_eq!(e.total(), 4);
                assert_eq!(e.evaluate_xz(&p), dec.class_probability(&s, &l).unwrap());
            }
        }
    }

    #[test]
    fn float_decoding_agrees() {
        let code = bit_flip();
        let ch = PauliChannel::<f64>::independent_xz(3, 0.125).unwrap();
        let exact = PauliChannel::independent_xz(3, rat(1, 8)).unwrap();
        let fd = Decoder::new(&code, &ch).unwrap();
        let ed = Decoder::new(&code, &exact).unwrap();
        for s in Syndrome::all(2) {
            let f = fd.dqmld(&s).unwrap();
            let e = ed.dqmld(&s).unwrap();
            assert_eq!(f.winner, e.winner);
            for ((_, a), (_, b)) in f.class_probs.iter().zip(&e.class_probs) {
                assert!((a - crate::scalar::to_f64(b)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn limits_enforced() {
        let code = bit_flip();
        let ch = PauliChannel::independent_xz(3, rat(1, 8)).unwrap();
        let tight = Limits {
            max_stabilizer_log2: 1,
            max_logical_qubits: 0,
            max_candidates_log2: 2,
        };
        let dec = Decoder::new(&code, &ch).unwrap().with_limits(tight);
        let s = Syndrome::zero(2);
        assert!(matches!(dec.class_probability(&s, &LogicalLabel::trivial(1)), Err(Error::TooLarge { .. })));
        assert!(matches!(dec.dqmld(&s), Err(Error::TooLarge { .. })));
        assert!(matches!(dec.qmld(&s), Err(Error::TooLarge { .. })));
        let short = PauliChannel::independent_xz(2, rat(1, 8)).unwrap();
        assert!(Decoder::new(&code, &short).is_err());
    }
}
