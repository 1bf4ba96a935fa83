//! Linear systems whose rounded solutions are weight enumerators.
//!
//! Unknowns use the layout `ω = (B_0..B_n, WE_0..WE_n)`. A crossing at ratio
//! `v` and rate `p` (with `p̃ = p/(2−p)`) says `B(p̃) − v·WE(p̃) = 0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ratmat::RatMatrix;
use crate::reduction::crossing::{find_crossing, CrossingPoint};
use crate::reduction::instance::{p_tilde, ClassOracle, CountingOracle, ReductionInstance};
use crate::scalar::{fmt_rational, pow2, round_with_error, Rational, Scalar};

/// The square crossing system of a single instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub n: usize,
    pub matrix: RatMatrix,
    pub rhs: Vec<Rational>,
}

/// Integer enumerators of a code and of one of its cosets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumerators {
    pub we: Vec<u64>,
    pub b: Vec<u64>,
}

/// `(p̃^0..p̃^n, −v p̃^0..−v p̃^n)`.
#[must_use]
pub fn crossing_row(n: usize, v: &Rational, p: &Rational) -> Vec<Rational> {
    let pt = p_tilde(p);
    let powers: Vec<Rational> = (0..=n).map(|i| pt.pown(i)).collect();
    let mut row = powers.clone();
    row.extend(powers.iter().map(|x| -(v * x)));
    row
}

/// Rows `crossing_row` for each crossing midpoint, then a row of ones with
/// right-hand side `2^{k+1}` (the sizes of `C` and `C + g_n` together).
#[must_use]
pub fn assemble_constraints(n: usize, k: usize, crossings: &[CrossingPoint]) -> ConstraintSystem {
    let width = 2 * n + 2;
    let mut matrix = RatMatrix::zeros(0, width);
    let mut rhs = Vec::with_capacity(crossings.len() + 1);
    for c in crossings {
        matrix.push_row(crossing_row(n, &c.v, &c.mid));
        rhs.push(Rational::zero());
    }
    matrix.push_row(vec![Rational::one(); width]);
    rhs.push(pow2(i64::try_from(k + 1).expect("small k")));
    ConstraintSystem { n, matrix, rhs }
}

/// Exact solve, rounding and sanity checks of a square system.
///
/// # Errors
/// `SingularSystem`, `RoundingAmbiguous`, or `PostCheckFailed`.
pub fn solve_weight_enumerators(sys: &ConstraintSystem, k: usize) -> Result<Enumerators> {
    let omega = sys.matrix.solve(&sys.rhs)?;
    let ints = round_solution(&omega)?;
    let e = split(sys.n, &ints)?;
    if e.we[0] != 1 || e.b[0] != 0 {
        return Err(Error::PostCheckFailed(format!(
            "WE_0 = {}, B_0 = {}",
            e.we[0], e.b[0]
        )));
    }
    let total: u64 = e.we.iter().chain(&e.b).sum();
    if total != 1 << (k + 1) {
        return Err(Error::PostCheckFailed(format!(
            "enumerators sum to {total}, expected {}",
            1u64 << (k + 1)
        )));
    }
    Ok(e)
}

/// Nearest integers, refusing any component at distance ≥ 1/4.
///
/// # Errors
/// `RoundingAmbiguous` naming the first offending component.
pub fn round_solution(omega: &[Rational]) -> Result<Vec<BigInt>> {
    let quarter = Rational::new(1.into(), 4.into());
    omega
        .iter()
        .enumerate()
        .map(|(index, x)| {
            let (r, err) = round_with_error(x);
            if err >= quarter {
                Err(Error::RoundingAmbiguous {
                    index,
                    value: fmt_rational(x),
                })
            } else {
                Ok(r)
            }
        })
        .collect()
}

/// Largest distance from a component to its nearest integer.
#[must_use]
pub fn max_rounding_error(omega: &[Rational]) -> Rational {
    omega
        .iter()
        .map(|x| round_with_error(x).1)
        .fold(Rational::zero(), |m, e| if e > m { e } else { m })
}

fn split(n: usize, ints: &[BigInt]) -> Result<Enumerators> {
    let conv = |x: &BigInt| {
        if x.is_negative() {
            Err(Error::PostCheckFailed(format!("negative coefficient {x}")))
        } else {
            x.to_u64()
                .ok_or_else(|| Error::PostCheckFailed(format!("coefficient {x} too large")))
        }
    };
    let b = ints[..=n].iter().map(conv).collect::<Result<_>>()?;
    let we = ints[n + 1..].iter().map(conv).collect::<Result<_>>()?;
    Ok(Enumerators { we, b })
}

/// Crossings for a schedule of ratios such that the rows given by `row`
/// reach rank `rank`. A crossing whose row adds nothing while the rank is
/// short is discarded and its ratio replaced by the midpoint towards the
/// next smaller ratio in use. Rows past the target rank are kept.
#[derive(Clone, Debug)]
pub struct IndependentCrossings {
    pub crossings: Vec<CrossingPoint>,
    pub discarded: Vec<CrossingPoint>,
}

/// # Errors
/// `Exhausted` once `cap` crossings were searched without reaching the
/// rank; oracle and search errors propagate.
pub fn ensure_independence<O: ClassOracle>(
    oracle: &mut CountingOracle<O>,
    inst: &ReductionInstance,
    schedule: &[Rational],
    rank: usize,
    cap: usize,
    row: impl Fn(&CrossingPoint) -> Vec<Rational>,
) -> Result<IndependentCrossings> {
    let mut pending: Vec<Rational> = schedule.iter().rev().cloned().collect();
    let mut accepted: Vec<CrossingPoint> = Vec::new();
    let mut discarded = Vec::new();
    let mut matrix: Option<RatMatrix> = None;
    let mut current = 0;
    let mut searched = 0;
    loop {
        let v = match pending.pop() {
            Some(v) => v,
            None if current >= rank => break,
            None => resample(&accepted, discarded.last().map(|c: &CrossingPoint| &c.v)),
        };
        if searched == cap {
            return Err(Error::Exhausted(searched));
        }
        searched += 1;
        let c = find_crossing(oracle, inst, &v)?;
        let r = row(&c);
        let mut trial = matrix.clone().unwrap_or_else(|| RatMatrix::zeros(0, r.len()));
        trial.push_row(r);
        if current < rank {
            let new_rank = trial.rank();
            if new_rank == current {
                pending.push(resample(&accepted, Some(&c.v)));
                discarded.push(c);
                continue;
            }
            current = new_rank;
        }
        matrix = Some(trial);
        accepted.push(c);
    }
    Ok(IndependentCrossings {
        crossings: accepted,
        discarded,
    })
}

/// Midpoint between `v` and the largest accepted ratio below it, or `v/2`.
fn resample(accepted: &[CrossingPoint], v: Option<&Rational>) -> Rational {
    let two = Rational::from_integer(2.into());
    let Some(v) = v else {
        let smallest = accepted
            .iter()
            .map(|c| &c.v)
            .min()
            .cloned()
            .unwrap_or_else(Rational::one);
        return smallest / two;
    };
    let below = accepted.iter().map(|c| &c.v).filter(|u| *u < v).max();
    match below {
        Some(u) => (u + v) / two,
        None => v / two,
    }
}

/// A crossing as used in a solve: the ratio and the point used for `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingSample {
    pub v: Rational,
    pub p: Rational,
}

/// Scales each sample's `p` by `1 + δ·scale` with `δ` uniform on `[−1, 1]`.
pub fn perturb<R: Rng>(samples: &mut [CrossingSample], scale: &Rational, rng: &mut R) {
    const STEPS: i64 = 1 << 20;
    for s in samples {
        let delta = Rational::new(rng.gen_range(-STEPS..=STEPS).into(), STEPS.into());
        s.p = &s.p * (Rational::one() + delta * scale);
    }
}

/// Data row of a chain level in `WE` alone: `(1+v)·p^i·(2−p)^{n−i}`, the
/// form `(1+v)·WE(p̃)` scaled by `(2−p)^n`. The scaling keeps every row over
/// the dyadic denominators of the bisection, which keeps exact elimination
/// cheap; it changes row weights by at most a factor `e^{1/2}`.
#[must_use]
pub fn level_row(n: usize, v: &Rational, p: &Rational) -> Vec<Rational> {
    let q = Rational::from_integer(2.into()) - p;
    let f = Rational::one() + v;
    (0..=n).map(|i| &f * p.pown(i) * q.pown(n - i)).collect()
}

/// One level of the chain: unknown `WE` of a code `C_j` of dimension `j`
/// whose extension `C_j + ⟨g⟩` has known enumerator `above`. The anchors
/// `B_i = above_i − WE_i` are substituted, so each crossing reads
/// `(1+v)·WE(p̃) = above(p̃)`; `WE_0 = 1` and `Σ WE_i = 2^j` are imposed
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSystem {
    pub n: usize,
    pub above: Vec<u64>,
    /// Rows `(level_row, −above(p̃)·(2−p)^n)` over unknowns `(WE, 1)`.
    pub data: RatMatrix,
    pub anchors: RatMatrix,
    pub anchor_rhs: Vec<Rational>,
}

impl LevelSystem {
    #[must_use]
    pub fn new(n: usize, dimension: usize, above: &[u64], samples: &[CrossingSample]) -> Self {
        let width = n + 2;
        let mut data = RatMatrix::zeros(0, width);
        for s in samples {
            let q = Rational::from_integer(2.into()) - &s.p;
            let target: Rational = above
                .iter()
                .enumerate()
                .map(|(i, &a)| Rational::from_integer(a.into()) * s.p.pown(i) * q.pown(n - i))
                .sum();
            let mut row = level_row(n, &s.v, &s.p);
            row.push(-target);
            data.push_row(row);
        }
        let mut anchors = RatMatrix::zeros(0, width);
        let mut row = vec![Rational::zero(); width];
        row[0] = Rational::one();
        anchors.push_row(row);
        let mut row = vec![Rational::one(); width];
        row[n + 1] = Rational::zero();
        anchors.push_row(row);
        let mut row = vec![Rational::zero(); width];
        row[n + 1] = Rational::one();
        anchors.push_row(row);
        let anchor_rhs = vec![
            Rational::one(),
            pow2(i64::try_from(dimension).expect("small dimension")),
            Rational::one(),
        ];
        Self {
            n,
            above: above.to_vec(),
            data,
            anchors,
            anchor_rhs,
        }
    }

    /// Exact constrained least-squares solution, returned in the layout
    /// `ω = (B_0..B_n, WE_0..WE_n)`.
    ///
    /// # Errors
    /// `SingularSystem` if the rows do not determine `WE`.
    pub fn solve(&self) -> Result<Vec<Rational>> {
        let mut we = self
            .data
            .constrained_least_squares(&self.anchors, &self.anchor_rhs)?;
        we.truncate(self.n + 1);
        let mut omega: Vec<Rational> = self
            .above
            .iter()
            .zip(&we)
            .map(|(&a, w)| Rational::from_integer(a.into()) - w)
            .collect();
        omega.extend(we);
        Ok(omega)
    }
}

/// Rounds a level solution and checks it against the known structure.
///
/// # Errors
/// `RoundingAmbiguous` or `PostCheckFailed`.
pub fn round_level(n: usize, dimension: usize, above: &[u64], omega: &[Rational]) -> Result<Enumerators> {
    let ints = round_solution(omega)?;
    let e = split(n, &ints)?;
    if e.we[0] != 1 || e.b[0] != 0 {
        return Err(Error::PostCheckFailed(format!(
            "WE_0 = {}, B_0 = {}",
            e.we[0], e.b[0]
        )));
    }
    for (i, &a) in above.iter().enumerate().take(n + 1) {
        if e.we[i] + e.b[i] != a {
            return Err(Error::PostCheckFailed(format!(
                "WE_{i} + B_{i} = {} but the extension has {}",
                e.we[i] + e.b[i],
                a
            )));
        }
    }
    let total: u64 = e.we.iter().sum();
    if total != 1 << dimension {
        return Err(Error::PostCheckFailed(format!(
            "WE sums to {total}, expected 2^{dimension}"
        )));
    }
    Ok(e)
}

/// Replays recorded oracle answers against integer enumerators: `𝕀` must
/// mean `(1−q)·WE(p̃) ≥ q·B(p̃)` and `Z̄` the strict reverse.
///
/// # Errors
/// `PostCheckFailed` on the first disagreement.
pub fn check_brackets(e: &Enumerators, queries: &[crate::reduction::instance::Query]) -> Result<()> {
    use crate::reduction::instance::{eval_poly, Answer};
    for qr in queries {
        let pt = p_tilde(&qr.p);
        let lhs = (Rational::one() - &qr.q) * eval_poly(&e.we, &pt);
        let rhs = &qr.q * eval_poly(&e.b, &pt);
        let identity = lhs >= rhs;
        if identity != (qr.answer == Answer::Identity) {
            return Err(Error::PostCheckFailed(format!(
                "enumerators contradict the oracle at p = {}",
                fmt_rational(&qr.p)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn row_shape() {
        let r = crossing_row(1, &rat(1, 2), &rat(1, 2));
        assert_eq!(r, vec![rat(1, 1), rat(1, 3), rat(-1, 2), rat(-1, 6)]);
    }

    #[test]
    fn assembled_shape() {
        let c = CrossingPoint {
            v: rat(1, 4),
            lo: rat(1, 8),
            hi: rat(1, 4),
            mid: rat(3, 16),
            queries: 0,
            trace: Vec::new(),
        };
        let sys = assemble_constraints(1, 1, &[c.clone(), c.clone(), c]);
        assert_eq!((sys.matrix.nrows(), sys.matrix.ncols()), (4, 4));
        assert_eq!(sys.rhs[3], rat(4, 1));
        // Duplicate rows leave the system singular.
        assert_eq!(sys.matrix.rank(), 2);
        assert_eq!(solve_weight_enumerators(&sys, 1), Err(Error::SingularSystem));
    }

    #[test]
    fn rounding_rules() {
        assert_eq!(
            round_solution(&[rat(9, 10), rat(-1, 10)]).unwrap(),
            vec![BigInt::from(1), BigInt::from(0)]
        );
        assert!(matches!(
            round_solution(&[rat(1, 1), rat(13, 10), rat(1, 4)]),
            Err(Error::RoundingAmbiguous { index: 1, .. })
        ));
        assert_eq!(max_rounding_error(&[rat(21, 10), rat(3, 1)]), rat(1, 10));
    }

    #[test]
    fn exact_level_recovers_repetition() {
        // C = {000, 111}, C + g = {100, 011}: above = WE of their union.
        let above = [1, 1, 1, 1];
        let samples: Vec<CrossingSample> = [rat(1, 10), rat(1, 5), rat(3, 10)]
            .into_iter()
            .map(|pt| {
                // Exact crossing: v = B(p̃)/WE(p̃).
                let v = (&pt + &pt * &pt) / (Rational::one() + pt.pown(3));
                let p = &pt * rat(2, 1) / (Rational::one() + &pt);
                CrossingSample { v, p }
            })
            .collect();
        let sys = LevelSystem::new(3, 1, &above, &samples);
        let omega = sys.solve().unwrap();
        let e = round_level(3, 1, &above, &omega).unwrap();
        assert_eq!(e.we, vec![1, 0, 0, 1]);
        assert_eq!(e.b, vec![0, 1, 1, 0]);
        assert_eq!(max_rounding_error(&omega), rat(0, 1));
    }
}
