//! End-to-end weight-enumerator extraction from decoder answers.
//!
//! The default chain mode walks a flag of codes `C = C_k ⊂ C_{k+1} ⊂ … ⊂
//! C_n = F₂ⁿ`, where `C_{j+1} = C_j + ⟨g⟩` adds one completed-basis row.
//! The enumerator of `C_n` is binomial; at level `j` each crossing at ratio
//! `v` gives `(1+v)·WE_j(p̃) = WE_{j+1}(p̃)`, so `WE_j` follows from the level
//! above. The single-instance mode solves the square system of one
//! instance instead; it is singular whenever `WE_C` and `B` share a factor.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf2::BitVector;
use crate::reduction::classical::ClassicalCode;
use crate::reduction::constraints::{
    assemble_constraints, check_brackets, crossing_row, ensure_independence, level_row, max_rounding_error,
    perturb, round_level, solve_weight_enumerators, CrossingSample, Enumerators, LevelSystem,
};
use crate::reduction::crossing::{v_max, v_schedule, CrossingPoint};
use crate::reduction::instance::{Answer, ClassOracle, CountingOracle, ExactDqmld, ReductionInstance};
use crate::scalar::{fmt_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Chain,
    SingleInstance,
}

/// Multiplies every crossing midpoint by `1 + δ·scale`, `δ` uniform on
/// `[−1, 1]`, before solving. For robustness tests only.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub seed: u64,
    pub scale: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionConfig {
    pub mode: Mode,
    pub perturbation: Option<Perturbation>,
}

/// Result of a reduction run.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// `WE_0..WE_n` of the input code.
    pub we: Vec<u64>,
    /// Enumerator of `C' + g` where `C'` is the reduced code (the input,
    /// or the input padded with one zero coordinate) and `g` is
    /// [`coset_vector`](Self::coset_vector).
    pub b: Vec<u64>,
    pub coset_vector: BitVector,
    pub transcript: Transcript,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub n: usize,
    pub k: usize,
    pub generator: Vec<String>,
    /// Whether a zero coordinate was appended (needed when `k = n` or
    /// `n < 2`).
    pub padded: bool,
    pub mode: Mode,
    pub levels: Vec<LevelTrace>,
    pub total_queries: usize,
    pub we: Vec<u64>,
    pub b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub dimension: usize,
    pub coset_vector: String,
    pub d_coset: usize,
    pub v_max: String,
    pub crossings: Vec<CrossingTrace>,
    pub discarded_crossings: usize,
    pub solution: Vec<String>,
    pub max_rounding_error: String,
    pub we: Vec<u64>,
    pub b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingTrace {
    pub v: String,
    pub p_lo: String,
    pub p_hi: String,
    pub p_mid: String,
    pub queries: Vec<QueryTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryTrace {
    pub v: String,
    pub p: String,
    /// Bracket after this answer.
    pub p_lo: String,
    pub p_hi: String,
    pub answer: Answer,
}

impl Transcript {
    /// # Panics
    /// Never: the transcript is plain data.
    #[must_use]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

fn trace_crossing(c: &CrossingPoint) -> CrossingTrace {
    let v = fmt_rational(&c.v);
    CrossingTrace {
        v: v.clone(),
        p_lo: fmt_rational(&c.lo),
        p_hi: fmt_rational(&c.hi),
        p_mid: fmt_rational(&c.mid),
        queries: c
            .trace
            .iter()
            .map(|s| QueryTrace {
                v: v.clone(),
                p: fmt_rational(&s.p),
                p_lo: fmt_rational(&s.lo),
                p_hi: fmt_rational(&s.hi),
                answer: s.answer,
            })
            .collect(),
    }
}

/// Runs the chain reduction with the exact in-process decoder.
///
/// # Errors
/// See [`run_reduction_with`].
pub fn run_reduction(c: &ClassicalCode) -> Result<Reduction> {
    run_reduction_with(c, &ReductionConfig::default(), ExactDqmld::default())
}

/// # Errors
/// Search failures (`NoCrossing`, `Exhausted`), `SingularSystem`,
/// `RoundingAmbiguous`, `PostCheckFailed`, and oracle errors.
pub fn run_reduction_with<O: ClassOracle>(
    c: &ClassicalCode,
    config: &ReductionConfig,
    oracle: O,
) -> Result<Reduction> {
    let padded = c.k() == c.n() || c.n() < 2;
    let code = if padded { c.padded(1) } else { c.clone() };
    let mut oracle = CountingOracle::new(oracle);
    let mut rng = config
        .perturbation
        .as_ref()
        .map(|p| ChaCha8Rng::seed_from_u64(p.seed));
    let (mut we, b, coset_vector, levels) = match config.mode {
        Mode::Chain => chain(&code, &mut oracle, config, rng.as_mut())?,
        Mode::SingleInstance => single(&code, &mut oracle, config, rng.as_mut())?,
    };
    if padded {
        debug_assert_eq!(we.last(), Some(&0));
        we.pop();
    }
    let transcript = Transcript {
        n: c.n(),
        k: c.k(),
        generator: c.generator().rows().iter().map(ToString::to_string).collect(),
        padded,
        mode: config.mode,
        levels,
        total_queries: oracle.queries(),
        we: we.clone(),
        b: b.clone(),
    };
    Ok(Reduction {
        we,
        b,
        coset_vector,
        transcript,
    })
}

type Outcome = (Vec<u64>, Vec<u64>, BitVector, Vec<LevelTrace>);

fn samples_of(
    crossings: &[CrossingPoint],
    config: &ReductionConfig,
    rng: Option<&mut ChaCha8Rng>,
) -> Vec<CrossingSample> {
    let mut samples: Vec<CrossingSample> = crossings
        .iter()
        .map(|c| CrossingSample {
            v: c.v.clone(),
            p: c.mid.clone(),
        })
        .collect();
    if let (Some(p), Some(rng)) = (&config.perturbation, rng) {
        perturb(&mut samples, &p.scale, rng);
    }
    samples
}

fn chain<O: ClassOracle>(
    code: &ClassicalCode,
    oracle: &mut CountingOracle<O>,
    config: &ReductionConfig,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<Outcome> {
    let (n, k) = (code.n(), code.k());
    let complement = code.complement().rows().to_vec();
    let mut above: Vec<u64> = (0..=n)
        .map(|i| num_integer::binomial(n as u64, i as u64))
        .collect();
    let m = 2 * n + 1;
    let cap = m * m;
    let mut levels = Vec::new();
    let mut last = None;
    for dimension in (k..n).rev() {
        // C_j = C + the last (j − k) completion rows; the row before them
        // is the designated coset vector, so level k uses g_n itself.
        let split = n - dimension;
        let level_code = code.extended(&complement[split..])?;
        let inst = ReductionInstance::with_complement(&level_code, complement[..split].to_vec())?;
        let vmax = v_max(n, inst.d_coset);
        let start = oracle.log.len();
        let found = ensure_independence(oracle, &inst, &v_schedule(&vmax, m), n + 1, cap, |c| {
            level_row(n, &c.v, &c.mid)
        })?;
        let samples = samples_of(&found.crossings, config, rng.as_deref_mut());
        let sys = LevelSystem::new(n, dimension, &above, &samples);
        let omega = sys.solve()?;
        let e = round_level(n, dimension, &above, &omega)?;
        check_brackets(&e, &oracle.log[start..])?;
        levels.push(LevelTrace {
            dimension,
            coset_vector: inst.coset_vector().to_string(),
            d_coset: inst.d_coset,
            v_max: fmt_rational(&vmax),
            crossings: found.crossings.iter().map(trace_crossing).collect(),
            discarded_crossings: found.discarded.len(),
            solution: omega.iter().map(fmt_rational).collect(),
            max_rounding_error: fmt_rational(&max_rounding_error(&omega)),
            we: e.we.clone(),
            b: e.b.clone(),
        });
        above = e.we.clone();
        last = Some((e, inst.coset_vector().clone()));
    }
    let (e, g) = last.expect("k < n after padding");
    Ok((e.we, e.b, g, levels))
}

fn single<O: ClassOracle>(
    code: &ClassicalCode,
    oracle: &mut CountingOracle<O>,
    config: &ReductionConfig,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Outcome> {
    let (n, k) = (code.n(), code.k());
    let inst = ReductionInstance::new(code)?;
    let m = 2 * n + 1;
    let vmax = v_max(n, inst.d_coset);
    let start = oracle.log.len();
    let found = ensure_independence(oracle, &inst, &v_schedule(&vmax, m), m, m * m, |c| {
        crossing_row(n, &c.v, &c.mid)
    })?;
    let samples = samples_of(&found.crossings[..m], config, rng);
    let points: Vec<CrossingPoint> = samples
        .iter()
        .map(|s| CrossingPoint {
            v: s.v.clone(),
            lo: s.p.clone(),
            hi: s.p.clone(),
            mid: s.p.clone(),
            queries: 0,
            trace: Vec::new(),
        })
        .collect();
    let sys = assemble_constraints(n, k, &points);
    let omega = sys.matrix.solve(&sys.rhs)?;
    let e: Enumerators = solve_weight_enumerators(&sys, k)?;
    check_brackets(&e, &oracle.log[start..])?;
    let level = LevelTrace {
        dimension: k,
        coset_vector: inst.coset_vector().to_string(),
        d_coset: inst.d_coset,
        v_max: fmt_rational(&vmax),
        crossings: found.crossings.iter().map(trace_crossing).collect(),
        discarded_crossings: found.discarded.len(),
        solution: omega.iter().map(fmt_rational).collect(),
        max_rounding_error: fmt_rational(&max_rounding_error(&omega)),
        we: e.we.clone(),
        b: e.b.clone(),
    };
    Ok((e.we, e.b, inst.coset_vector().clone(), vec![level]))
}

/// Smallest `|p_mid − p'_mid|` over crossings adjacent in the schedule of
/// each level.
#[must_use]
pub fn min_adjacent_separation(crossings: &[CrossingPoint]) -> Option<Rational> {
    let mut sorted: Vec<&CrossingPoint> = crossings.iter().collect();
    sorted.sort_by(|a, b| a.v.cmp(&b.v));
    sorted
        .windows(2)
        .map(|w| {
            let d = &w[0].mid - &w[1].mid;
            if d < Rational::zero() {
                -d
            } else {
                d
            }
        })
        .min()
}

/// Rebuilds crossing points from a transcript level.
///
/// # Errors
/// `Parse` on malformed rationals.
pub fn crossings_of(level: &LevelTrace) -> Result<Vec<CrossingPoint>> {
    use crate::scalar::parse_rational;
    level
        .crossings
        .iter()
        .map(|c| {
            Ok(CrossingPoint {
                v: parse_rational(&c.v)?,
                lo: parse_rational(&c.p_lo)?,
                hi: parse_rational(&c.p_hi)?,
                mid: parse_rational(&c.p_mid)?,
                queries: c.queries.len(),
                trace: Vec::new(),
            })
        })
        .collect()
}

/// `2/(2 + n^λ)`: the largest relative perturbation of crossing points
/// under which rounding is claimed to stay correct.
#[must_use]
pub fn delta_budget(n: usize, lambda: usize) -> Rational {
    let p = num_bigint::BigInt::from(n).pow(u32::try_from(lambda).expect("small"));
    Rational::new(2.into(), p + 2)
}

/// Whether the reduced enumerators match brute force.
///
/// # Errors
/// `TooLarge` past the brute-force limit.
pub fn matches_brute_force(c: &ClassicalCode, r: &Reduction) -> Result<bool> {
    let reduced = if r.transcript.padded { c.padded(1) } else { c.clone() };
    Ok(c.brute_force_we()? == r.we && reduced.coset_we(&r.coset_vector)? == r.b)
}
