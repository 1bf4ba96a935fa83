//! Locating the noise rate where the decoder's answer flips from `𝕀` to `Z̄`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::reduction::instance::{q_for_ratio, Answer, ClassOracle, CountingOracle, ReductionInstance};
use crate::scalar::{fmt_rational, pow2, Rational, Scalar};

/// A bracket `[lo, hi]` with `𝕀` at `lo` and `Z̄` at `hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingPoint {
    pub v: Rational,
    pub lo: Rational,
    pub hi: Rational,
    pub mid: Rational,
    pub queries: usize,
    pub trace: Vec<QueryStep>,
}

/// One oracle call of a search, with the bracket after it.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryStep {
    pub p: Rational,
    pub answer: Answer,
    pub lo: Rational,
    pub hi: Rational,
}

/// `⌈2n log₂ n⌉`, exactly: the least `t` with `2^t ≥ n^{2n}`.
#[must_use]
pub fn search_depth(n: usize) -> usize {
    let target = BigUint::from(n).pow(u32::try_from(2 * n).expect("small n"));
    if target <= BigUint::one() {
        0
    } else {
        usize::try_from((target - 1u32).bits()).expect("small n")
    }
}

/// Most oracle calls one crossing may use: `⌈2n log₂ n⌉ + 4`.
#[must_use]
pub fn query_budget(n: usize) -> usize {
    search_depth(n) + 4
}

/// Bracket width the search guarantees: `n^{−2n} = 4^{−n log₂ n}`.
#[must_use]
pub fn target_width(n: usize) -> Rational {
    Rational::one() / Rational::from_integer(num_bigint::BigInt::from(n).pow(u32::try_from(2 * n).expect("small n")))
}

/// Left end of the search, `2^{−(⌈2n log₂ n⌉ + 8)}`; provably on the `𝕀` side.
#[must_use]
pub fn search_floor(n: usize) -> Rational {
    pow2(-i64::try_from(search_depth(n) + 8).expect("small n"))
}

/// Bisects `(ε, 1/n]` for the flip at ratio `v`, spending at most
/// [`query_budget`] calls: both ends first, then halving.
///
/// # Errors
/// `NoCrossing` if the ends do not answer `𝕀` and `Z̄` respectively.
pub fn find_crossing<O: ClassOracle>(
    oracle: &mut CountingOracle<O>,
    inst: &ReductionInstance,
    v: &Rational,
) -> Result<CrossingPoint> {
    let n = inst.n();
    let q = q_for_ratio(v);
    let start = oracle.queries();
    let mut lo = search_floor(n);
    let mut hi = Rational::new(1.into(), n.into());
    let mut trace = Vec::new();
    let top = oracle.query(inst, &hi, &q)?;
    trace.push(QueryStep {
        p: hi.clone(),
        answer: top,
        lo: lo.clone(),
        hi: hi.clone(),
    });
    if top != Answer::LogicalZ {
        return Err(Error::NoCrossing {
            v: fmt_rational(v),
            answer: format!("{top:?} at p = 1/{n}"),
        });
    }
    let bottom = oracle.query(inst, &lo, &q)?;
    trace.push(QueryStep {
        p: lo.clone(),
        answer: bottom,
        lo: lo.clone(),
        hi: hi.clone(),
    });
    if bottom != Answer::Identity {
        return Err(Error::NoCrossing {
            v: fmt_rational(v),
            answer: format!("{bottom:?} at p = {}", fmt_rational(&lo)),
        });
    }
    for _ in 0..search_depth(n) + 2 {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        let answer = oracle.query(inst, &mid, &q)?;
        match answer {
            Answer::Identity => lo = mid.clone(),
            Answer::LogicalZ => hi = mid.clone(),
        }
        trace.push(QueryStep {
            p: mid,
            answer,
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    let mid = (&lo + &hi) / Rational::from_integer(2.into());
    Ok(CrossingPoint {
        v: v.clone(),
        lo,
        hi,
        mid,
        queries: oracle.queries() - start,
        trace,
    })
}

/// Largest ratio used in the schedule: `min(n^{−d}/2, (2n−1)^{−d})`.
/// The second term keeps the crossing inside `(0, 1/n]`, where `p̃ ≤
/// 1/(2n−1)`.
#[must_use]
pub fn v_max(n: usize, d: usize) -> Rational {
    let d = u32::try_from(d).expect("small d");
    let a = Rational::new(1.into(), num_bigint::BigInt::from(n).pow(d) * 2);
    let b = Rational::new(1.into(), num_bigint::BigInt::from(2 * n - 1).pow(d));
    if a < b {
        a
    } else {
        b
    }
}

/// `v_l = v_max · (l+1)/m` for `l = 0..m`.
#[must_use]
pub fn v_schedule(v_max: &Rational, m: usize) -> Vec<Rational> {
    (1..=m)
        .map(|l| v_max * Rational::new(l.into(), m.into()))
        .collect()
}

/// Crossing-existence check over a grid of `p` on `(0, 1/n]` at `q = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub points: usize,
    pub identity_decreasing: bool,
    pub logical_z_increasing: bool,
    /// Sign changes of `v·P(𝕀) − P(Z̄)` for each tested `v`.
    pub sign_changes: Vec<(Rational, usize)>,
}

impl GridReport {
    #[must_use]
    pub fn passed(&self) -> bool {
        self.identity_decreasing
            && self.logical_z_increasing
            && self.sign_changes.iter().all(|&(_, c)| c == 1)
    }
}

/// Evaluates both class probabilities on `p_i = i/(points·n)`, `i =
/// 1..=points`, and counts sign changes of `v·P(𝕀) − P(Z̄)` for each `v`.
/// At `q = 1/2` that sign matches the decoder's answer at `q = 1/(1+v)`.
///
/// # Errors
/// Propagates decoder errors.
pub fn grid_scan(inst: &ReductionInstance, points: usize, vs: &[Rational], limits: &Limits) -> Result<GridReport> {
    let n = inst.n();
    let half = Rational::new(1.into(), 2.into());
    let mut prev: Option<(Rational, Rational)> = None;
    let mut dec_ok = true;
    let mut inc_ok = true;
    let mut signs: Vec<Option<bool>> = vec![None; vs.len()];
    let mut changes = vec![0usize; vs.len()];
    for i in 1..=points {
        let p = Rational::new(i.into(), (points * n).into());
        let (pi, pz) = inst.class_pair(&p, &half, limits)?;
        if let Some((a, b)) = &prev {
            dec_ok &= pi < *a;
            inc_ok &= pz > *b;
        }
        for (j, v) in vs.iter().enumerate() {
            let diff = v * &pi - &pz;
            if diff.is_zero() {
                continue;
            }
            let positive = diff > Rational::zero();
            if signs[j].is_some_and(|s| s != positive) {
                changes[j] += 1;
            }
            signs[j] = Some(positive);
        }
        prev = Some((pi, pz));
    }
    Ok(GridReport {
        points,
        identity_decreasing: dec_ok,
        logical_z_increasing: inc_ok,
        sign_changes: vs.iter().cloned().zip(changes).collect(),
    })
}

/// Strict monotonicity of both classes on a grid (no ratio tested).
///
/// # Errors
/// Propagates decoder errors.
pub fn monotonicity_check(inst: &ReductionInstance, points: usize, limits: &Limits) -> Result<GridReport> {
    grid_scan(inst, points, &[], limits)
}

/// `P(Z̄)/P(𝕀) ≥ p̃^{d}` at `q = 1/2` for each `p`.
///
/// # Errors
/// Propagates decoder errors.
pub fn lower_bound_check(inst: &ReductionInstance, ps: &[Rational], limits: &Limits) -> Result<bool> {
    let half = Rational::new(1.into(), 2.into());
    for p in ps {
        let (pi, pz) = inst.class_pair(p, &half, limits)?;
        let bound = crate::reduction::instance::p_tilde(p).pown(inst.d_coset);
        if pz < pi * bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::classical::ClassicalCode;
    use crate::reduction::instance::ExactDqmld;
    use crate::scalar::rat;

    #[test]
    fn depth_values() {
        assert_eq!(search_depth(1), 0);
        assert_eq!(search_depth(2), 4);
        // 3^6 = 729 → 10 bits.
        assert_eq!(search_depth(3), 10);
        assert_eq!(query_budget(3), 14);
        assert_eq!(target_width(2), rat(1, 16));
    }

    #[test]
    fn repetition_crossing() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        let mut o = CountingOracle::new(ExactDqmld::default());
        let v = v_max(3, inst.d_coset);
        let c = find_crossing(&mut o, &inst, &v).unwrap();
        assert!(c.queries <= query_budget(3));
        assert!(&c.hi - &c.lo <= target_width(3));
        let q = q_for_ratio(&v);
        assert_eq!(o.query(&inst, &c.lo, &q).unwrap(), Answer::Identity);
        assert_eq!(o.query(&inst, &c.hi, &q).unwrap(), Answer::LogicalZ);
    }

    #[test]
    fn large_ratio_has_no_crossing() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        let mut o = CountingOracle::new(ExactDqmld::default());
        assert!(matches!(
            find_crossing(&mut o, &inst, &rat(10, 1)),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn small_grid() {
        let inst = ReductionInstance::new(&ClassicalCode::repetition(3)).unwrap();
        let l = Limits::default();
        let r = grid_scan(&inst, 200, &[v_max(3, 1)], &l).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(monotonicity_check(&inst, 1, &l).unwrap().passed());
        assert!(lower_bound_check(&inst, &[rat(1, 10), rat(1, 4)], &l).unwrap());
    }
}
