//! Acceptance checks, one line per criterion.
//!
//! Every comparison is exact (rational or integer equality, zero
//! tolerance). Runtime targets are the only non-exact thresholds and are
//! pinned below. Criteria listed in `KNOWN_FAILURES` are reported as FAIL
//! without failing the run; the reason is printed with the line.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabkit::codes::{bit_flip, random_code, shor9, TwoClassCode};
use stabkit::reduction::crossing::{grid_scan, query_budget, target_width, v_max};
use stabkit::reduction::instance::{ClassOracle, ExactDqmld, ReductionInstance};
use stabkit::reduction::pipeline::{
    crossings_of, delta_budget, matches_brute_force, run_reduction_with, Mode, Perturbation, Reduction,
    ReductionConfig,
};
use stabkit::reduction::ClassicalCode;
use stabkit::scalar::{pow2, rat, to_f64, Scalar};
use stabkit::shor::{class_probs_formula, leakage_bound_check, ShorLattice};
use stabkit::stabilizer::GrayCoset;
use stabkit::{
    coset_enumerator, BitVector, Decoder, ExactChannel, Limits, LogicalLabel, PauliChannel, Rational, Result,
    StabilizerCode, Syndrome,
};

/// Runtime targets for criterion 1.
const SMALL_CODE_BUDGET: Duration = Duration::from_secs(5 * 60);
const HAMMING_BUDGET: Duration = Duration::from_secs(30 * 60);
/// Points per grid in criterion 4.
const GRID_POINTS: usize = 10_000;
/// Random tuples in criterion 2.
const IDENTITY_TUPLES: usize = 200;
/// Seeded perturbation trials per fixture in criterion 6.
const PERTURBATION_TRIALS: u64 = 10;
const FIXTURE_SEED: u64 = 7;

/// Criterion 7's leakage inequality is false as printed for n2 ≥ 2: the
/// ratio of sums is about n2·p̃^{n1} while the bound starts with p̃^{n1}.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    7,
    "the printed leakage inequality omits a factor n2 in its leading term",
)];

struct Fixture {
    name: &'static str,
    code: ClassicalCode,
}

fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "[3,1] repetition",
            code: ClassicalCode::repetition(3),
        },
        Fixture {
            name: "[2,2] identity",
            code: ClassicalCode::full_space(2),
        },
        Fixture {
            name: "[4,2] random",
            code: ClassicalCode::random(4, 2, &mut ChaCha8Rng::seed_from_u64(FIXTURE_SEED)),
        },
        Fixture {
            name: "[7,4] Hamming",
            code: ClassicalCode::hamming74(),
        },
    ]
}

/// The code the reduction actually runs on (padded when `k = n`).
fn reduced(c: &ClassicalCode) -> ClassicalCode {
    if c.k() == c.n() || c.n() < 2 {
        c.padded(1)
    } else {
        c.clone()
    }
}

/// Memoizes decoder answers so repeated runs with the same searches do not
/// decode again. Answers depend only on (code, channel, syndrome).
struct CachedOracle {
    inner: ExactDqmld,
    seen: HashMap<(String, String, String), LogicalLabel>,
}

impl ClassOracle for &mut CachedOracle {
    fn decode(&mut self, code: &StabilizerCode, channel: &ExactChannel, s: &Syndrome) -> Result<LogicalLabel> {
        let key = (code.to_text(), channel.to_json(), s.to_string());
        if let Some(l) = self.seen.get(&key) {
            return Ok(l.clone());
        }
        let l = self.inner.decode(code, channel, s)?;
        self.seen.insert(key, l.clone());
        Ok(l)
    }
}

type Outcome = (bool, String);

fn criterion_1(fx: &[Fixture], runs: &mut Vec<(Reduction, Duration)>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for f in fx {
        let start = Instant::now();
        let r = run_reduction_with(&f.code, &ReductionConfig::default(), ExactDqmld::default());
        let took = start.elapsed();
        let budget = if f.code.n() <= 4 {
            SMALL_CODE_BUDGET
        } else {
            HAMMING_BUDGET
        };
        match r {
            Ok(r) => {
                let exact = matches_brute_force(&f.code, &r).unwrap_or(false);
                ok &= exact && took <= budget;
                notes.push(format!(
                    "{} {} in {:.1}s",
                    f.name,
                    if exact { "exact" } else { "MISMATCH" },
                    took.as_secs_f64()
                ));
                runs.push((r, took));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{} error: {e}", f.name));
            }
        }
    }
    (ok, notes.join("; "))
}

fn random_rate<R: Rng>(rng: &mut R) -> Rational {
    let den: i64 = rng.gen_range(2..=40);
    rat(rng.gen_range(1..den), den)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let limits = Limits::default();
    for t in 0..IDENTITY_TUPLES {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(0..=n);
        let code = random_code(n, k, &mut rng);
        let p = random_rate(&mut rng);
        let bits: Vec<bool> = (0..n - k).map(|_| rng.gen()).collect();
        let s = Syndrome(BitVector::from_bools(&bits));
        let label = LogicalLabel::all(k)
            .nth(rng.gen_range(0..1usize << (2 * k)))
            .expect("label in range");
        let ch = ExactChannel::independent_xz(n, p.clone()).expect("valid rate");
        let rep = code.coset_representative(&s, &label).expect("shapes match");
        let direct = GrayCoset::new(code.stabilizers(), rep)
            .map(|e| ch.error_probability(&e).expect("length matches"))
            .fold(Rational::zero(), |a, b| a + b);
        let poly = coset_enumerator(&code, &s, &label, &limits)
            .expect("small code")
            .evaluate_xz(&p);
        let dec = Decoder::new(&code, &ch)
            .expect("lengths match")
            .class_probability(&s, &label)
            .expect("small code");
        if direct != poly || direct != dec {
            return (false, format!("tuple {t} (n={n}, k={k}, p={p}) differs"));
        }
    }
    (true, format!("{IDENTITY_TUPLES} tuples, n ≤ 8, exact equality"))
}

fn sum_rule_codes() -> Vec<(String, StabilizerCode)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut codes = vec![("bit-flip".to_string(), bit_flip()), ("Shor".to_string(), shor9())];
    for i in 0..6 {
        let n = 2 + i;
        let k = i % 3;
        codes.push((format!("random [{n},{k}]"), random_code(n, k, &mut rng)));
    }
    codes
}

fn criterion_3() -> Outcome {
    let limits = Limits::default();
    let mut cosets = 0usize;
    for (name, code) in sum_rule_codes() {
        let (n, k) = (code.n(), code.k());
        for s in Syndrome::all(n - k) {
            for l in LogicalLabel::all(k) {
                let e = coset_enumerator(&code, &s, &l, &limits).expect("small code");
                if e.total() != 1 << (n - k) {
                    return (false, format!("{name}: coset sum {} ≠ 2^{}", e.total(), n - k));
                }
                cosets += 1;
            }
        }
        for ch in [
            ExactChannel::independent_xz(n, rat(1, 7)).expect("valid"),
            ExactChannel::depolarizing(n, rat(2, 9)).expect("valid"),
        ] {
            let dec = Decoder::new(&code, &ch).expect("lengths match");
            let total = Syndrome::all(n - k)
                .flat_map(|s| dec.class_probabilities(&s).expect("small code"))
                .fold(Rational::zero(), |a, (_, p)| a + p);
            if !total.is_one() {
                return (false, format!("{name}: joint probabilities sum to {total}"));
            }
        }
        let b: u64 = code.normalizer_enumerator(&limits).expect("small code").iter().sum();
        if b != 1 << (n + k) {
            return (false, format!("{name}: normalizer sum {b} ≠ 2^{}", n + k));
        }
    }
    (true, format!("{cosets} cosets, 16 normalizations, 8 normalizer enumerators"))
}

fn criterion_4(fx: &[Fixture]) -> Outcome {
    let limits = Limits::default();
    let mut notes = Vec::new();
    for f in fx {
        let c = reduced(&f.code);
        let inst = ReductionInstance::new(&c).expect("k < n");
        let vm = v_max(c.n(), inst.d_coset);
        let vs: Vec<Rational> = (0..5).map(|i| &vm * pow2(-i)).collect();
        match grid_scan(&inst, GRID_POINTS, &vs, &limits) {
            Ok(r) if r.passed() => notes.push(format!("{} ok", f.name)),
            Ok(r) => return (false, format!("{}: {r:?}", f.name)),
            Err(e) => return (false, format!("{}: {e}", f.name)),
        }
    }
    (true, format!("{GRID_POINTS}-point grids, 5 ratios each: {}", notes.join(", ")))
}

fn criterion_5(fx: &[Fixture], runs: &[(Reduction, Duration)]) -> Outcome {
    if runs.len() != fx.len() {
        return (false, "criterion 1 runs missing".into());
    }
    let mut worst = f64::INFINITY;
    let mut max_queries = 0;
    for (f, (r, _)) in fx.iter().zip(runs) {
        let n = reduced(&f.code).n();
        let width = target_width(n);
        let budget = query_budget(n);
        for level in &r.transcript.levels {
            let mut cs = crossings_of(level).expect("transcript parses");
            cs.sort_by(|a, b| a.v.cmp(&b.v));
            for w in cs.windows(2) {
                let gap = (&w[0].mid - &w[1].mid).abs();
                worst = worst.min(to_f64(&(&gap / &width)));
                if gap < width {
                    return (false, format!("{}: crossings closer than n^(-2n)", f.name));
                }
            }
            for c in &level.crossings {
                max_queries = max_queries.max(c.queries.len());
                if c.queries.len() > budget {
                    return (false, format!("{}: {} queries > {budget}", f.name, c.queries.len()));
                }
            }
        }
    }
    (
        true,
        format!("min separation / n^(-2n) = {worst:.3e}, max queries per crossing {max_queries}"),
    )
}

fn criterion_6(fx: &[Fixture]) -> Outcome {
    let mut correct = 0;
    let mut ambiguous = 0;
    let mut rejected = 0;
    for f in fx {
        let n = reduced(&f.code).n();
        let mut cache = CachedOracle {
            inner: ExactDqmld::default(),
            seen: HashMap::new(),
        };
        for seed in 0..PERTURBATION_TRIALS {
            let config = ReductionConfig {
                mode: Mode::Chain,
                perturbation: Some(Perturbation {
                    seed,
                    scale: delta_budget(n, n),
                }),
            };
            match run_reduction_with(&f.code, &config, &mut cache) {
                Ok(r) if matches_brute_force(&f.code, &r).unwrap_or(false) => correct += 1,
                Ok(r) => {
                    return (
                        false,
                        format!("{} seed {seed}: silently wrong WE {:?}", f.name, r.we),
                    )
                }
                Err(stabkit::Error::RoundingAmbiguous { .. }) => ambiguous += 1,
                Err(stabkit::Error::PostCheckFailed(_)) => rejected += 1,
                Err(e) => return (false, format!("{} seed {seed}: {e}", f.name)),
            }
        }
    }
    (
        true,
        format!("{correct} correct, {ambiguous} RoundingAmbiguous, {rejected} rejected by post-checks, 0 wrong"),
    )
}

fn criterion_7() -> Outcome {
    let limits = Limits::default();
    let mut lattices = 0;
    for n1 in 1..=12 {
        for n2 in 1..=12 / n1 {
            let lattice = ShorLattice::new(n1, n2).expect("positive dimensions");
            for ell in 0..=n2 {
                for p in [rat(1, 8), rat(1, 4), rat(3, 8)] {
                    let f = class_probs_formula(n1, n2, &p, ell).expect("valid");
                    let b = lattice.brute_force_class_probs(&p, ell, &limits).expect("small lattice");
                    if f != b {
                        return (false, format!("({n1},{n2}) ell={ell} p={p}: formula ≠ brute force"));
                    }
                }
            }
            lattices += 1;
        }
    }
    let rep = leakage_bound_check(4, 4, &rat(1, 8)).expect("valid");
    let bound = rep.sum_bound.as_ref().map_or(f64::NAN, to_f64);
    let detail = format!(
        "closed form = brute force on {lattices} lattices; leakage at (4,4,1/8): ratio {:.3e} vs printed bound {bound:.3e} (corrected n2·p̃^n1 bound {:.3e} holds: {})",
        to_f64(&rep.sum_ratio),
        to_f64(&rep.corrected_bound),
        rep.corrected_holds()
    );
    (rep.holds(), detail)
}

fn criterion_8(fx: &[Fixture]) -> Outcome {
    let mut codes: Vec<(String, StabilizerCode)> = fx
        .iter()
        .map(|f| {
            let inst = ReductionInstance::new(&reduced(&f.code)).expect("k < n");
            (format!("instance of {}", f.name), inst.code)
        })
        .collect();
    codes.push(("bit-flip".into(), bit_flip()));
    codes.push(("Shor".into(), shor9()));
    let mut checked = 0;
    let mut gap_met = 0;
    for (name, code) in &codes {
        for p in [rat(1, 32), rat(1, 16)] {
            let ch = PauliChannel::independent_xz(code.n(), p.clone()).expect("valid");
            let dec = Decoder::new(code, &ch).expect("lengths match");
            for s in Syndrome::all(code.num_generators()) {
                let r = match dec.large_gap_equivalence_check(&s) {
                    Ok(r) => r,
                    Err(e) => return (false, format!("{name}: {e}")),
                };
                if !r.passed() {
                    return (false, format!("{name} p={p} s={s}: {r:?}"));
                }
                checked += 1;
                gap_met += usize::from(r.gap_condition_met());
            }
        }
    }
    (
        true,
        format!("{checked} (code, p, syndrome) cases, {gap_met} with gap ≥ 1 − 2^(−n−k)"),
    )
}

/// The threshold `2^(−m)` is leading order: classes cross where
/// `2^m·p̃ = (1 + p̃^(2w))^m`. The families below keep that shift under the
/// 1/16 straddle; (m, w) = (2, 1) would not (its crossing is near 0.295).
const TWO_CLASS_FAMILIES: [(usize, usize); 3] = [(2, 2), (3, 1), (3, 2)];

fn criterion_9() -> Outcome {
    let mut points = 0;
    for (m, w) in TWO_CLASS_FAMILIES {
        let t = TwoClassCode::new(m, w).expect("m, w ≥ 1");
        let threshold = pow2(-i64::try_from(m).expect("small"));
        let scales = [rat(1, 2), rat(15, 16), rat(17, 16), rat(3, 2)];
        for s in scales {
            let pt = &threshold * s;
            let p = &pt * rat(2, 1) / (Rational::one() + &pt);
            let ch = ExactChannel::independent_xz(t.code.n(), p.clone()).expect("valid");
            let dec = Decoder::new(&t.code, &ch).expect("lengths match");
            let d = dec.dqmld(&t.syndrome).expect("small code").winner;
            let q = t.code.logical_label(&dec.qmld(&t.syndrome).expect("small code"));
            let exact = pow2(i64::try_from(m).expect("small")) * &pt > (Rational::one() + pt.pown(2 * w)).pown(m);
            if (d != q) != (pt > threshold) || (d != q) != exact {
                return (false, format!("(m,w)=({m},{w}) p̃={pt}: disagreement does not match the threshold"));
            }
            points += 1;
        }
    }
    (
        true,
        format!("{points} points at p̃ = 2^(−m)·{{1/2, 15/16, 17/16, 3/2}}, (m,w) ∈ {TWO_CLASS_FAMILIES:?}"),
    )
}

type Criterion<'a> = (u32, &'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() -> ExitCode {
    let fx = fixtures();
    let mut runs = Vec::new();
    let criteria: Vec<Criterion> = vec![
        (1, "reduction end-to-end", Box::new(|| criterion_1(&fx, &mut runs))),
        (2, "enumerator polynomial identity", Box::new(criterion_2)),
        (3, "sum rules", Box::new(criterion_3)),
        (4, "crossing uniqueness and monotonicity", Box::new(|| criterion_4(&fx))),
    ];
    let mut unexpected = 0;
    let mut report = |id: u32, title: &str, (ok, detail): Outcome| {
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        let status = if ok { "PASS" } else { "FAIL" };
        match (ok, known) {
            (false, Some((_, why))) => println!("{status} criterion {id} ({title}): {detail} [known: {why}]"),
            (false, None) => {
                unexpected += 1;
                println!("{status} criterion {id} ({title}): {detail}");
            }
            _ => println!("{status} criterion {id} ({title}): {detail}"),
        }
    };
    for (id, title, f) in criteria {
        report(id, title, f());
    }
    report(5, "crossing separation and query budget", criterion_5(&fx, &runs));
    report(6, "rounding robustness", criterion_6(&fx));
    report(7, "Shor-lattice closed forms and leakage", criterion_7());
    report(8, "large-gap equivalence", criterion_8(&fx));
    report(9, "degeneracy threshold", criterion_9());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
