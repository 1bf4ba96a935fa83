//! Shor-code lattices used to simulate biased single-qubit channels by
//! concatenation.
//!
//! On an `n1 × n2` lattice (qubit `(r, c)` is index `r·n2 + c`), horizontal
//! links carry `XX` stabilizers and each pair of adjacent rows carries a
//! Z-type stabilizer. `Z̄` is Z on row 0 and `X̄` is X on column 0. A Z
//! chain on row 0 covering columns `0..ℓ` produces a single defect; its
//! complement on the row is the other way to close it.

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::channel::{PauliChannel, QubitChannel};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::limits::Limits;
use crate::pauli::{Pauli, PauliOperator};
use crate::scalar::{Rational, Scalar};
use crate::stabilizer::{LogicalLabel, StabilizerCode, Syndrome};

#[derive(Clone, Debug)]
pub struct ShorLattice {
    pub n1: usize,
    pub n2: usize,
    pub code: StabilizerCode,
}

/// Probabilities of the four logical classes, in the order `𝕀, X̄, Z̄, Ȳ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassProbs {
    pub i: Rational,
    pub x: Rational,
    pub z: Rational,
    pub y: Rational,
}

impl ClassProbs {
    #[must_use]
    pub fn sum(&self) -> Rational {
        &self.i + &self.x + &self.z + &self.y
    }

    /// Each entry divided by the sum.
    ///
    /// # Panics
    /// Panics if all entries are zero.
    #[must_use]
    pub fn normalized(&self) -> Self {
        let t = self.sum();
        Self {
            i: &self.i / &t,
            x: &self.x / &t,
            z: &self.z / &t,
            y: &self.y / &t,
        }
    }

    /// The single-qubit channel seen by the encoded qubit.
    ///
    /// # Errors
    /// `OutOfRange` if the entries are not a distribution.
    pub fn as_channel(&self) -> Result<QubitChannel<Rational>> {
        QubitChannel::new(self.i.clone(), self.x.clone(), self.y.clone(), self.z.clone())
    }
}

/// Integer `ℓ` selected for a target ratio, with the ratio it achieves.
#[derive(Clone, Debug, PartialEq)]
pub struct EllChoice {
    pub ell: usize,
    /// Exact `P(𝕀)/P(Z̄)` at this `ℓ`.
    pub achieved: Rational,
    /// Real-valued `ℓ` from the per-link ratio `p̃`, before quantization.
    pub continuous: f64,
}

/// Outcome of the leakage check.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    /// `Σ_{i≥1} C(n2,i) a^{n1 i} b^{2n1n2−n1 i} / Σ_{i≥0} (…)`.
    pub sum_ratio: Rational,
    /// `p̃^{n1} + n2² p̃^{2n1} / (1 − n2 p̃^{n1})`, `None` when the
    /// denominator is not positive.
    pub sum_bound: Option<Rational>,
    /// `n2·p̃^{n1}`. The ratio equals `1 − (1+p̃^{n1})^{−n2}`, which never
    /// exceeds this; the bound above lacks the factor `n2` in its first term.
    pub corrected_bound: Rational,
    /// Exact normalized `P(X̄) + P(Ȳ)`; independent of `ℓ`.
    pub exact_leakage: Rational,
}

impl LeakageReport {
    #[must_use]
    pub fn holds(&self) -> bool {
        self.sum_bound.as_ref().is_some_and(|b| self.sum_ratio <= *b)
    }

    #[must_use]
    pub fn corrected_holds(&self) -> bool {
        self.sum_ratio <= self.corrected_bound
    }
}

impl ShorLattice {
    /// # Errors
    /// `InvalidCode` if either dimension is zero.
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidCode(format!("Shor lattice {n1}x{n2}")));
        }
        let n = n1 * n2;
        let q = |r: usize, c: usize| r * n2 + c;
        let mut stabs = Vec::with_capacity(n - 1);
        for r in 0..n1 {
            for c in 0..n2 - 1 {
                let mut op = PauliOperator::identity(n);
                op.set(q(r, c), Pauli::X);
                op.set(q(r, c + 1), Pauli::X);
                stabs.push(op);
            }
        }
        for r in 0..n1 - 1 {
            let mut op = PauliOperator::identity(n);
            for c in 0..n2 {
                op.set(q(r, c), Pauli::Z);
                op.set(q(r + 1, c), Pauli::Z);
            }
            stabs.push(op);
        }
        let mut lx = PauliOperator::identity(n);
        for r in 0..n1 {
            lx.set(q(r, 0), Pauli::X);
        }
        let mut lz = PauliOperator::identity(n);
        for c in 0..n2 {
            lz.set(q(0, c), Pauli::Z);
        }
        let code = StabilizerCode::with_logicals(n, stabs, vec![lx], vec![lz])?;
        Ok(Self { n1, n2, code })
    }

    /// Z on row 0, columns `0..ℓ`.
    ///
    /// # Errors
    /// `OutOfRange` if `ℓ > n2`.
    pub fn reference_chain(&self, ell: usize) -> Result<PauliOperator> {
        check_ell(ell, self.n2)?;
        let mut op = PauliOperator::identity(self.code.n());
        for c in 0..ell {
            op.set(c, Pauli::Z);
        }
        Ok(op)
    }

    /// # Errors
    /// `OutOfRange` if `ℓ > n2`.
    pub fn syndrome(&self, ell: usize) -> Result<Syndrome> {
        self.code.syndrome_of(&self.reference_chain(ell)?)
    }

    /// `E_ref · L` for each of `𝕀, X̄, Z̄, Ȳ`.
    ///
    /// # Errors
    /// `OutOfRange` if `ℓ > n2`.
    pub fn class_representatives(&self, ell: usize) -> Result<[PauliOperator; 4]> {
        let e = self.reference_chain(ell)?;
        let x = &self.code.logical_x()[0];
        let z = &self.code.logical_z()[0];
        Ok([e.clone(), &e * x, &e * z, &(&e * x) * z])
    }

    /// Normalized class probabilities by exhaustive coset summation under
    /// the uniform X-Z channel.
    ///
    /// # Errors
    /// `OutOfRange` for invalid `p` or `ℓ`; `TooLarge` past the limits.
    pub fn brute_force_class_probs(&self, p: &Rational, ell: usize, limits: &Limits) -> Result<ClassProbs> {
        let ch = PauliChannel::independent_xz(self.code.n(), p.clone())?;
        let dec = Decoder::new(&self.code, &ch)?.with_limits(*limits);
        let reps = self.class_representatives(ell)?;
        let mut probs = Vec::with_capacity(4);
        for r in &reps {
            probs.push(dec.coset_probability(r)?);
        }
        let [i, x, z, y]: [Rational; 4] = probs.try_into().expect("four classes");
        Ok(ClassProbs { i, x, z, y }.normalized())
    }
}

fn check_ell(ell: usize, n2: usize) -> Result<()> {
    if ell > n2 {
        Err(Error::OutOfRange(format!("ell = {ell} > n2 = {n2}")))
    } else {
        Ok(())
    }
}

fn check_p(p: &Rational) -> Result<()> {
    if *p <= Rational::zero() || *p >= Rational::one() {
        Err(Error::OutOfRange(format!("p = {p} not in (0,1)")))
    } else {
        Ok(())
    }
}

/// Unnormalized joint class probabilities in closed form.
///
/// The channel factorizes into independent Z and X flips at rate `a = p/2`.
/// Z part: row 0 carries the chain or its complement; every other row is
/// clean or fully flipped, with the flip count parity fixing `𝕀` versus `Z̄`.
/// X part: all rows share one parity, even for the classes without `X̄`.
///
/// # Errors
/// `OutOfRange` unless `0 < p < 1` and `ℓ ≤ n2`.
pub fn class_joints_formula(n1: usize, n2: usize, p: &Rational, ell: usize) -> Result<ClassProbs> {
    check_p(p)?;
    check_ell(ell, n2)?;
    let two = Rational::from_integer(2.into());
    let a = p / &two;
    let b = Rational::one() - &a;
    let alpha = a.pown(ell) * b.pown(n2 - ell);
    let beta = a.pown(n2 - ell) * b.pown(ell);
    let up = (b.pown(n2) + a.pown(n2)).pown(n1 - 1);
    let down = (b.pown(n2) - a.pown(n2)).pown(n1 - 1);
    let z_even = (&alpha * (&up + &down) + &beta * (&up - &down)) / &two;
    let z_odd = (&alpha * (&up - &down) + &beta * (&up + &down)) / &two;
    let flip = (Rational::one() - p).pown(n2);
    let even = ((Rational::one() + &flip) / &two).pown(n1);
    let odd = ((Rational::one() - &flip) / &two).pown(n1);
    Ok(ClassProbs {
        i: &z_even * &even,
        x: &z_even * &odd,
        z: &z_odd * &even,
        y: &z_odd * &odd,
    })
}

/// Normalized class probabilities in closed form.
///
/// # Errors
/// As [`class_joints_formula`].
pub fn class_probs_formula(n1: usize, n2: usize, p: &Rational, ell: usize) -> Result<ClassProbs> {
    Ok(class_joints_formula(n1, n2, p, ell)?.normalized())
}

/// Leading-order closed forms for the class probabilities. They keep
/// only the row-0 chain and its complement in the Z part, so they differ
/// from the exact values whenever `n1 > 1`.
///
/// # Errors
/// `OutOfRange` unless `0 < p < 1` and `ℓ ≤ n2`.
pub fn leading_order_class_probs(n1: usize, n2: usize, p: &Rational, ell: usize) -> Result<ClassProbs> {
    check_p(p)?;
    check_ell(ell, n2)?;
    let a = p / Rational::from_integer(2.into());
    let b = Rational::one() - &a;
    let chain = (&a * &b).pown(ell) * (&b * &b).pown(n2 - ell);
    let other = (&a * &b).pown(n2 - ell) * (&b * &b).pown(ell);
    let tail = combinatorial_sum(n1, n2, &a, 1);
    let full = combinatorial_sum(n1, n2, &a, 0);
    let syndrome = (a.pown(ell) * b.pown(2 * n2 - ell) + a.pown(n2 - ell) * b.pown(2 * ell)) * &full;
    Ok(ClassProbs {
        i: &chain / &syndrome,
        x: &chain * &tail / &syndrome,
        z: &other / &syndrome,
        y: &other * &tail / &syndrome,
    })
}

/// `Σ_{i=from}^{n2} C(n2,i) a^{n1 i} (1−a)^{2 n1 n2 − n1 i}`.
fn combinatorial_sum(n1: usize, n2: usize, a: &Rational, from: usize) -> Rational {
    let b = Rational::one() - a;
    (from..=n2)
        .map(|i| {
            Rational::from_integer(binomial(n2, i).into())
                * a.pown(n1 * i)
                * b.pown(2 * n1 * n2 - n1 * i)
        })
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Exact `P(𝕀)/P(Z̄)` at `ℓ`.
///
/// # Errors
/// As [`class_joints_formula`].
pub fn achieved_ratio(n1: usize, n2: usize, p: &Rational, ell: usize) -> Result<Rational> {
    let j = class_joints_formula(n1, n2, p, ell)?;
    Ok(j.i / j.z)
}

/// Integer `ℓ ∈ [0, n2]` whose exact ratio `P(𝕀)/P(Z̄)` is closest to `v`
/// on a log scale. Ratios above one come from `ℓ < n2/2`.
///
/// # Errors
/// `OutOfRange` unless `0 < p < 1/2`, `v > 0`, and `v` lies within the
/// achievable range `[ratio(n2), ratio(0)]`.
pub fn ell_for_ratio(v: &Rational, p: &Rational, n1: usize, n2: usize) -> Result<EllChoice> {
    check_p(p)?;
    if *p >= Rational::new(1.into(), 2.into()) {
        return Err(Error::OutOfRange(format!("p = {p} not below 1/2")));
    }
    if *v <= Rational::zero() {
        return Err(Error::OutOfRange(format!("ratio v = {v} not positive")));
    }
    let ratios = (0..=n2)
        .map(|l| achieved_ratio(n1, n2, p, l))
        .collect::<Result<Vec<_>>>()?;
    if *v > ratios[0] || *v < ratios[n2] {
        return Err(Error::OutOfRange(format!(
            "ratio v = {v} outside the range reachable with n2 = {n2}"
        )));
    }
    // Ratios decrease strictly in ℓ; pick the bracket, then the log-nearer end.
    let mut ell = (0..=n2).rev().find(|&l| ratios[l] >= *v).expect("v ≤ ratio(0)");
    if ell < n2 && &ratios[ell] * &ratios[ell + 1] > v * v {
        ell += 1;
    }
    let pt = crate::scalar::to_f64(&(p / (Rational::from_integer(2.into()) - p)));
    let continuous = 0.5 * (n2 as f64 + crate::scalar::to_f64(v).ln() / pt.ln());
    Ok(EllChoice {
        ell,
        achieved: ratios[ell].clone(),
        continuous,
    })
}

/// Evaluates the leading-order leakage bound on the ratio of combinatorial sums and the
/// exact leakage into `X̄`, `Ȳ`.
///
/// # Errors
/// `OutOfRange` unless `0 < p < 1/2` and both dimensions are positive.
pub fn leakage_bound_check(n1: usize, n2: usize, p: &Rational) -> Result<LeakageReport> {
    check_p(p)?;
    if *p >= Rational::new(1.into(), 2.into()) || n1 == 0 || n2 == 0 {
        return Err(Error::OutOfRange(format!("leakage check at ({n1}, {n2}, {p})")));
    }
    let a = p / Rational::from_integer(2.into());
    let sum_ratio = combinatorial_sum(n1, n2, &a, 1) / combinatorial_sum(n1, n2, &a, 0);
    let pt = p / (Rational::from_integer(2.into()) - p);
    let lead = pt.pown(n1);
    let n2r = Rational::from_integer(n2.into());
    let denom = Rational::one() - &n2r * &lead;
    let sum_bound =
        (denom > Rational::zero()).then(|| &lead + &n2r * &n2r * lead.pown(2) / &denom);
    let corrected_bound = &n2r * &lead;
    let probs = class_probs_formula(n1, n2, p, 0)?;
    Ok(LeakageReport {
        sum_ratio,
        sum_bound,
        corrected_bound,
        exact_leakage: probs.x + probs.y,
    })
}

/// Replaces qubit `target` of `outer` by a Shor block: the outer qubits
/// other than `target` keep their order, the block follows. Outer
/// operators act on the block through its logicals.
///
/// # Errors
/// `OutOfRange` if `target` is not a qubit of `outer`.
pub fn concatenate(outer: &StabilizerCode, target: usize, block: &ShorLattice) -> Result<StabilizerCode> {
    if target >= outer.n() {
        return Err(Error::OutOfRange(format!("qubit {target} of {}", outer.n())));
    }
    let map = |op: &PauliOperator| lift(op, target, block);
    let mut stabs: Vec<PauliOperator> = outer.stabilizers().iter().map(map).collect();
    let inner_n = block.code.n();
    let rest = outer.n() - 1;
    stabs.extend(
        block
            .code
            .stabilizers()
            .iter()
            .map(|s| PauliOperator::identity(rest).tensor(s)),
    );
    let lx = outer.logical_x().iter().map(map).collect();
    let lz = outer.logical_z().iter().map(map).collect();
    StabilizerCode::with_logicals(rest + inner_n, stabs, lx, lz)
}

/// Image of an outer operator under [`concatenate`].
#[must_use]
pub fn lift(op: &PauliOperator, target: usize, block: &ShorLattice) -> PauliOperator {
    let n = op.num_qubits();
    let mut z = BitVector::zeros(n - 1);
    let mut x = BitVector::zeros(n - 1);
    for (j, i) in (0..n).filter(|&i| i != target).enumerate() {
        z.set(j, op.z().get(i));
        x.set(j, op.x().get(i));
    }
    let rest = PauliOperator::new(z, x).expect("equal lengths");
    let mut inner = PauliOperator::identity(block.code.n());
    if op.x().get(target) {
        inner.mul_assign(&block.code.logical_x()[0]);
    }
    if op.z().get(target) {
        inner.mul_assign(&block.code.logical_z()[0]);
    }
    rest.tensor(&inner)
}

/// `E_ref ⊗ lift(T_s · L)`: a representative of outer class `label` in the
/// concatenated code at the syndrome of [`concatenated_syndrome`].
///
/// # Errors
/// As [`concatenated_syndrome`].
pub fn concatenated_representative(
    outer: &StabilizerCode,
    outer_syndrome: &Syndrome,
    label: &LogicalLabel,
    target: usize,
    block: &ShorLattice,
    ell: usize,
) -> Result<PauliOperator> {
    let rep = lift(&outer.coset_representative(outer_syndrome, label)?, target, block);
    let e = PauliOperator::identity(outer.n() - 1).tensor(&block.reference_chain(ell)?);
    Ok(&rep * &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn lattice_shapes() {
        for (n1, n2) in [(3, 3), (1, 1), (2, 3)] {
            let l = ShorLattice::new(n1, n2).unwrap();
            assert_eq!((l.code.n(), l.code.k()), (n1 * n2, 1));
            assert!(l.code.validate().is_valid());
        }
        assert!(ShorLattice::new(0, 2).is_err());
    }

    #[test]
    fn formula_matches_brute_force() {
        let l = ShorLattice::new(2, 3).unwrap();
        for ell in 0..=3 {
            let f = class_probs_formula(2, 3, &rat(1, 4), ell).unwrap();
            let b = l.brute_force_class_probs(&rat(1, 4), ell, &Limits::default()).unwrap();
            assert_eq!(f, b);
        }
    }

    #[test]
    fn symmetric_point() {
        let f = class_probs_formula(3, 4, &rat(1, 8), 2).unwrap();
        assert_eq!(f.i, f.z);
        assert_eq!(achieved_ratio(3, 4, &rat(1, 8), 2).unwrap(), rat(1, 1));
    }

    #[test]
    fn ell_selection() {
        let c = ell_for_ratio(&rat(1, 1), &rat(1, 8), 2, 4).unwrap();
        assert_eq!(c.ell, 2);
        let c = ell_for_ratio(&rat(1, 50), &rat(1, 8), 2, 4).unwrap();
        assert!(c.ell > 2);
        let up = ell_for_ratio(&rat(50, 1), &rat(1, 8), 2, 4).unwrap();
        assert_eq!(up.ell, 4 - c.ell);
        assert!(ell_for_ratio(&rat(1, 1_000_000_000), &rat(1, 8), 2, 4).is_err());
    }

    #[test]
    fn leading_order_matches_exact_for_one_row() {
        // With one row there is nothing to drop, up to the X-sector terms.
        let exact = class_probs_formula(1, 3, &rat(1, 8), 1).unwrap();
        let app = leading_order_class_probs(1, 3, &rat(1, 8), 1).unwrap();
        assert_eq!(exact.i / exact.z, app.i / app.z);
    }

    #[test]
    fn leakage_sum_ratio_closed_form() {
        // The ratio is 1 − (1 + r)^{−n2} with r = p̃^{n1}.
        let r = rat(1, 15).pown(4);
        let expect = Rational::one() - Rational::one() / (Rational::one() + &r).pown(4);
        let rep = leakage_bound_check(4, 4, &rat(1, 8)).unwrap();
        assert_eq!(rep.sum_ratio, expect);
        assert!(rep.corrected_holds());
        assert!(!rep.holds());
    }
}
