use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use stabkit::codes::{random_code, TwoClassCode};
use stabkit::reduction::pipeline::{run_reduction_with, Mode, Perturbation, ReductionConfig};
use stabkit::reduction::{ClassicalCode, ExactDqmld};
use stabkit::scalar::{fmt_rational, parse_rational, pow2};
use stabkit::shor::{leading_order_class_probs, class_probs_formula, leakage_bound_check, ClassProbs, ShorLattice};
use stabkit::{
    coset_enumerator, BitVector, Decoder, Error, ExactChannel, Limits, LogicalLabel, Rational, StabilizerCode,
    Syndrome,
};

use crate::{Command, DecodeMode, Format, ReductionMode};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    /// A cross-check or post-check failed.
    Mismatch(String),
    Lib(Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io(..) => 2,
            Self::Mismatch(_) => 3,
            Self::Lib(e) => match e {
                Error::Parse(_)
                | Error::LengthMismatch { .. }
                | Error::OutOfRange(_)
                | Error::InvalidCode(_)
                | Error::OddLength(_)
                | Error::NotAbelian(..)
                | Error::DependentGenerators
                | Error::RankDeficient { .. } => 2,
                Error::PostCheckFailed(_)
                | Error::RoundingAmbiguous { .. }
                | Error::NoCrossing { .. }
                | Error::Exhausted(_)
                | Error::SingularSystem => 3,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Mismatch(m) => f.write_str(m),
            Self::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Self::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn csv(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn rate(s: &str) -> CliResult<Rational> {
    let p = parse_rational(s.trim()).map_err(|_| CliError::Usage(format!("bad rational {s:?}")))?;
    if p <= Rational::zero() || p >= Rational::one() {
        return Err(CliError::Usage(format!("rate {s} not in (0, 1)")));
    }
    Ok(p)
}

fn grid(s: &str) -> CliResult<Vec<Rational>> {
    let ps: Vec<Rational> = s.split(',').map(rate).collect::<CliResult<_>>()?;
    if ps.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    Ok(ps)
}

fn json_text(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json value serializes"))
}

pub fn run(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::WeExtract {
            code,
            trace,
            mode,
            verify,
            perturb_seed,
            perturb_scale,
            format,
        } => we_extract(&code, trace.as_deref(), mode, verify, perturb_seed.zip(perturb_scale), format),
        Command::WeBrute { code, coset, format } => we_brute(&code, coset.as_deref(), format),
        Command::Decode {
            code,
            channel,
            syndrome,
            mode,
            format,
        } => decode(&code, &channel, &syndrome, mode, format),
        Command::Enumerate {
            code,
            syndrome,
            class,
            format,
        } => enumerate(&code, syndrome.as_deref(), class.as_deref(), format),
        Command::Compare {
            code,
            two_class,
            p,
            channel,
            format,
        } => match (code, two_class) {
            (Some(code), None) => compare(&code, &p, &channel, format),
            (None, Some(mw)) => compare_two_class(&mw, &p, format),
            _ => Err(CliError::Usage("give exactly one of --code and --two-class".into())),
        },
        Command::ShorValidate {
            n1,
            n2,
            p,
            ell,
            leakage,
            format,
        } => shor_validate(n1, n2, &p, ell, leakage, format),
        Command::Check { seed, trials, max_n } => check(seed, trials, max_n),
    }
}

fn we_extract(
    path: &Path,
    trace: Option<&Path>,
    mode: ReductionMode,
    verify: bool,
    perturb: Option<(u64, String)>,
    format: Format,
) -> CliResult<String> {
    let c = ClassicalCode::from_text(&read(path)?)?;
    let perturbation = match perturb {
        Some((seed, scale)) => Some(Perturbation {
            seed,
            scale: parse_rational(&scale).map_err(|_| CliError::Usage(format!("bad scale {scale:?}")))?,
        }),
        None => None,
    };
    let config = ReductionConfig {
        mode: match mode {
            ReductionMode::Chain => Mode::Chain,
            ReductionMode::SingleInstance => Mode::SingleInstance,
        },
        perturbation,
    };
    let oracle = ExactDqmld {
        limits: Limits::from_env(),
    };
    let r = run_reduction_with(&c, &config, oracle)?;
    if let Some(t) = trace {
        fs::write(t, r.transcript.to_json()).map_err(|e| CliError::Io(t.to_path_buf(), e))?;
    }
    if verify {
        let brute = c.brute_force_we()?;
        if brute != r.we {
            return Err(CliError::Mismatch(format!(
                "extracted {} but brute force gives {}",
                csv(&r.we),
                csv(&brute)
            )));
        }
    }
    Ok(match format {
        Format::Csv => format!("{}\n", csv(&r.we)),
        Format::Table => format!(
            "WE\t{}\nB\t{}\ncoset\t{}\nqueries\t{}\n",
            csv(&r.we),
            csv(&r.b),
            r.coset_vector,
            r.transcript.total_queries
        ),
        Format::Json => json_text(&json!({
            "we": r.we,
            "b": r.b,
            "coset_vector": r.coset_vector.to_string(),
            "total_queries": r.transcript.total_queries,
        })),
    })
}

fn we_brute(path: &Path, coset: Option<&str>, format: Format) -> CliResult<String> {
    let c = ClassicalCode::from_text(&read(path)?)?;
    let we = c.brute_force_we()?;
    let b = match coset {
        Some(word) => Some(c.coset_we(&word.parse::<BitVector>()?)?),
        None => None,
    };
    Ok(match format {
        Format::Csv => {
            let mut s = format!("{}\n", csv(&we));
            if let Some(b) = &b {
                let _ = writeln!(s, "{}", csv(b));
            }
            s
        }
        Format::Table => {
            let mut s = format!("WE\t{}\n", csv(&we));
            if let Some(b) = &b {
                let _ = writeln!(s, "B\t{}", csv(b));
            }
            s
        }
        Format::Json => json_text(&json!({ "we": we, "b": b })),
    })
}

fn load_channel(spec: &str, n: usize) -> CliResult<ExactChannel> {
    let ch = if spec.contains(':') {
        ExactChannel::from_shortcut(spec, n)?
    } else {
        ExactChannel::from_json(&read(Path::new(spec))?)?
    };
    if ch.n() != n {
        return Err(CliError::Usage(format!("channel has {} qubits, code has {n}", ch.n())));
    }
    Ok(ch)
}

fn syndrome_arg(code: &StabilizerCode, s: &str) -> CliResult<Syndrome> {
    let s: Syndrome = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("malformed syndrome {s:?}")))?;
    if s.len() != code.num_generators() {
        return Err(CliError::Usage(format!(
            "syndrome has {} bits, code has {} generators",
            s.len(),
            code.num_generators()
        )));
    }
    Ok(s)
}

fn decode(path: &Path, channel: &str, syndrome: &str, mode: DecodeMode, format: Format) -> CliResult<String> {
    let code = StabilizerCode::from_text(&read(path)?)?;
    let ch = load_channel(channel, code.n())?;
    let s = syndrome_arg(&code, syndrome)?;
    let dec = Decoder::new(&code, &ch)?;
    match mode {
        DecodeMode::Dqmld => {
            let r = dec.dqmld(&s)?;
            Ok(match format {
                Format::Json => json_text(&json!({
                    "winner": r.winner.to_string(),
                    "classes": r.class_probs.iter().map(|(l, p)| json!({
                        "label": l.to_string(),
                        "probability": fmt_rational(p),
                    })).collect::<Vec<_>>(),
                    "achieved_gap": fmt_rational(&r.achieved_gap),
                })),
                Format::Table | Format::Csv => {
                    let sep = if format == Format::Csv { ',' } else { '\t' };
                    let mut out = format!("winner{sep}{}\n", r.winner);
                    for (l, p) in &r.class_probs {
                        let _ = writeln!(out, "{l}{sep}{}", fmt_rational(p));
                    }
                    let _ = writeln!(out, "achieved_gap{sep}{}", fmt_rational(&r.achieved_gap));
                    out
                }
            })
        }
        DecodeMode::Qmld => {
            let e = dec.qmld(&s)?;
            let label = code.logical_label(&e);
            let p = ch.error_probability(&e)?;
            Ok(match format {
                Format::Json => json_text(&json!({
                    "error": e.to_string(),
                    "class": label.to_string(),
                    "probability": fmt_rational(&p),
                })),
                Format::Table | Format::Csv => {
                    let sep = if format == Format::Csv { ',' } else { '\t' };
                    format!("error{sep}{e}\nclass{sep}{label}\nprobability{sep}{}\n", fmt_rational(&p))
                }
            })
        }
    }
}

fn enumerate(path: &Path, syndrome: Option<&str>, class: Option<&str>, format: Format) -> CliResult<String> {
    let code = StabilizerCode::from_text(&read(path)?)?;
    let s = match syndrome {
        Some(s) => syndrome_arg(&code, s)?,
        None => Syndrome::zero(code.num_generators()),
    };
    let label = match class {
        Some(c) => {
            let l: LogicalLabel = c
                .parse()
                .map_err(|_| CliError::Usage(format!("malformed class {c:?}")))?;
            if l.num_logical() != code.k() {
                return Err(CliError::Usage(format!("class {c} does not fit k = {}", code.k())));
            }
            l
        }
        None => LogicalLabel::trivial(code.k()),
    };
    let e = coset_enumerator(&code, &s, &label, &Limits::from_env())?;
    Ok(match format {
        Format::Csv => format!("{}\n", csv(&e.counts)),
        Format::Table => {
            let mut out = String::from("weight\tcount\n");
            for (w, c) in e.counts.iter().enumerate() {
                let _ = writeln!(out, "{w}\t{c}");
            }
            let _ = writeln!(out, "total\t{}", e.total());
            out
        }
        Format::Json => json_text(&json!({
            "syndrome": s.to_string(),
            "class": label.to_string(),
            "counts": e.counts,
            "total": e.total(),
        })),
    })
}

fn compare(path: &Path, ps: &str, family: &str, format: Format) -> CliResult<String> {
    let code = StabilizerCode::from_text(&read(path)?)?;
    let ps = grid(ps)?;
    if family != "xz" && family != "depol" {
        return Err(CliError::Usage(format!("unknown channel family {family:?}")));
    }
    let limits = Limits::from_env();
    if code.num_generators() > limits.max_stabilizer_log2 {
        return Err(Error::TooLarge {
            what: "syndromes",
            log2: code.num_generators(),
            limit: limits.max_stabilizer_log2,
        }
        .into());
    }
    let mut rows = Vec::new();
    for p in &ps {
        let ch = ExactChannel::from_shortcut(&format!("{family}:p={}", fmt_rational(p)), code.n())?;
        let dec = Decoder::new(&code, &ch)?;
        let mut differ = Vec::new();
        for s in Syndrome::all(code.num_generators()) {
            let d = dec.dqmld(&s)?.winner;
            let q = code.logical_label(&dec.qmld(&s)?);
            if d != q {
                differ.push(s.to_string());
            }
        }
        rows.push((p.clone(), differ));
    }
    let total = 1u64 << code.num_generators();
    Ok(match format {
        Format::Json => json_text(&json!(rows
            .iter()
            .map(|(p, d)| json!({
                "p": fmt_rational(p),
                "syndromes": total,
                "disagreements": d.len(),
                "differing_syndromes": d,
            }))
            .collect::<Vec<_>>())),
        Format::Table | Format::Csv => {
            let sep = if format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("p{sep}syndromes{sep}disagreements\n");
            for (p, d) in &rows {
                let _ = writeln!(out, "{}{sep}{total}{sep}{}", fmt_rational(p), d.len());
            }
            out
        }
    })
}

fn compare_two_class(mw: &str, ps: &str, format: Format) -> CliResult<String> {
    let parsed: Option<(usize, usize)> = mw
        .split_once(',')
        .and_then(|(m, w)| Some((m.trim().parse().ok()?, w.trim().parse().ok()?)));
    let Some((m, w)) = parsed else {
        return Err(CliError::Usage(format!("--two-class wants M,W, got {mw:?}")));
    };
    let t = TwoClassCode::new(m, w)?;
    let ps = grid(ps)?;
    let threshold = pow2(-i64::try_from(m).expect("small m"));
    let mut rows = Vec::new();
    for p in &ps {
        let pt = p / (Rational::from_integer(2.into()) - p);
        let ch = ExactChannel::independent_xz(t.code.n(), p.clone())?;
        let dec = Decoder::new(&t.code, &ch)?;
        let d = dec.dqmld(&t.syndrome)?.winner;
        let q = t.code.logical_label(&dec.qmld(&t.syndrome)?);
        rows.push((p.clone(), pt.clone(), pt > threshold, q, d));
    }
    Ok(match format {
        Format::Json => json_text(&json!({
            "m": m,
            "w": w,
            "threshold_p_tilde": fmt_rational(&threshold),
            "points": rows.iter().map(|(p, pt, above, q, d)| json!({
                "p": fmt_rational(p),
                "p_tilde": fmt_rational(pt),
                "above_threshold": above,
                "qmld": q.to_string(),
                "dqmld": d.to_string(),
                "disagree": q != d,
            })).collect::<Vec<_>>(),
        })),
        Format::Table | Format::Csv => {
            let sep = if format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("# threshold p_tilde = {}\n", fmt_rational(&threshold));
            let _ = writeln!(out, "p{sep}p_tilde{sep}above_threshold{sep}qmld{sep}dqmld{sep}disagree");
            for (p, pt, above, q, d) in &rows {
                let _ = writeln!(
                    out,
                    "{}{sep}{}{sep}{above}{sep}{q}{sep}{d}{sep}{}",
                    fmt_rational(p),
                    fmt_rational(pt),
                    q != d
                );
            }
            out
        }
    })
}

fn class_fields(c: &ClassProbs) -> [(&'static str, &Rational); 4] {
    [("I", &c.i), ("X", &c.x), ("Z", &c.z), ("Y", &c.y)]
}

fn shor_validate(n1: usize, n2: usize, p: &str, ell: Option<usize>, leakage: bool, format: Format) -> CliResult<String> {
    let p = rate(p)?;
    let lattice = ShorLattice::new(n1, n2)?;
    let limits = Limits::from_env();
    let ells: Vec<usize> = match ell {
        Some(l) if l > n2 => return Err(CliError::Usage(format!("ell = {l} exceeds n2 = {n2}"))),
        Some(l) => vec![l],
        None => (0..=n2).collect(),
    };
    let mut results = Vec::new();
    let mut mismatches = Vec::new();
    for &l in &ells {
        let formula = class_probs_formula(n1, n2, &p, l)?;
        let leading = leading_order_class_probs(n1, n2, &p, l)?;
        let brute = match lattice.brute_force_class_probs(&p, l, &limits) {
            Ok(b) => Some(b),
            Err(Error::TooLarge { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        if brute.as_ref().is_some_and(|b| *b != formula) {
            mismatches.push(l);
        }
        results.push((l, formula, leading, brute));
    }
    let report = if leakage {
        Some(leakage_bound_check(n1, n2, &p)?)
    } else {
        None
    };
    let out = match format {
        Format::Json => json_text(&json!({
            "n1": n1,
            "n2": n2,
            "p": fmt_rational(&p),
            "ells": results.iter().map(|(l, f, a, b)| json!({
                "ell": l,
                "classes": class_fields(f).iter().enumerate().map(|(j, (name, fv))| json!({
                    "class": name,
                    "formula": fmt_rational(fv),
                    "leading_order": fmt_rational(class_fields(a)[j].1),
                    "brute_force": b.as_ref().map(|b| fmt_rational(class_fields(b)[j].1)),
                })).collect::<Vec<_>>(),
                "brute_force_matches": b.as_ref().map(|b| b == f),
            })).collect::<Vec<_>>(),
            "leakage": report.as_ref().map(|r| json!({
                "sum_ratio": fmt_rational(&r.sum_ratio),
                "sum_bound": r.sum_bound.as_ref().map(fmt_rational),
                "corrected_bound": fmt_rational(&r.corrected_bound),
                "corrected_holds": r.corrected_holds(),
                "exact_leakage": fmt_rational(&r.exact_leakage),
                "holds": r.holds(),
            })),
        })),
        Format::Table | Format::Csv => {
            let sep = if format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("ell{sep}class{sep}formula{sep}leading_order{sep}brute_force\n");
            for (l, f, a, b) in &results {
                for (j, (name, fv)) in class_fields(f).iter().enumerate() {
                    let bf = b
                        .as_ref()
                        .map_or_else(|| "skipped".to_string(), |b| fmt_rational(class_fields(b)[j].1));
                    let _ = writeln!(
                        out,
                        "{l}{sep}{name}{sep}{}{sep}{}{sep}{bf}",
                        fmt_rational(fv),
                        fmt_rational(class_fields(a)[j].1)
                    );
                }
            }
            if let Some(r) = &report {
                let _ = writeln!(out, "# leakage sum ratio {}", fmt_rational(&r.sum_ratio));
                let bound = r.sum_bound.as_ref().map_or_else(|| "undefined".into(), fmt_rational);
                let _ = writeln!(out, "# leakage bound {bound} holds={}", r.holds());
                let _ = writeln!(
                    out,
                    "# corrected bound {} holds={}",
                    fmt_rational(&r.corrected_bound),
                    r.corrected_holds()
                );
                let _ = writeln!(out, "# exact leakage {}", fmt_rational(&r.exact_leakage));
            }
            out
        }
    };
    if !mismatches.is_empty() {
        print!("{out}");
        return Err(CliError::Mismatch(format!("closed form differs from brute force at ell = {mismatches:?}")));
    }
    if report.as_ref().is_some_and(|r| !r.holds()) {
        print!("{out}");
        return Err(CliError::Mismatch("leakage bound violated".into()));
    }
    Ok(out)
}

fn check(seed: u64, trials: usize, max_n: usize) -> CliResult<String> {
    if max_n == 0 {
        return Err(CliError::Usage("--max-n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = Limits::from_env();
    let mut full_checks = 0;
    for t in 0..trials {
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(0..=n.min(3));
        let code = random_code(n, k, &mut rng);
        let den: i64 = rng.gen_range(2..=32);
        let p = Rational::new(rng.gen_range(1..den).into(), den.into());
        let bits: Vec<bool> = (0..code.num_generators()).map(|_| rng.gen()).collect();
        let s = Syndrome(BitVector::from_bools(&bits));
        let label = LogicalLabel::all(k)
            .nth(rng.gen_range(0..1usize << (2 * k)))
            .expect("label index in range");
        let ch = ExactChannel::independent_xz(n, p.clone())?;
        let dec = Decoder::new(&code, &ch)?.with_limits(limits);
        let direct = dec.class_probability(&s, &label)?;
        let e = coset_enumerator(&code, &s, &label, &limits)?;
        if e.evaluate_xz(&p) != direct {
            return Err(CliError::Mismatch(format!(
                "trial {t}: class probability differs from its enumerator polynomial"
            )));
        }
        if e.total() != 1 << (n - k) {
            return Err(CliError::Mismatch(format!("trial {t}: coset has {} elements", e.total())));
        }
        if t % 10 == 0 {
            let mut total = Rational::zero();
            for s in Syndrome::all(code.num_generators()) {
                for (_, q) in dec.class_probabilities(&s)? {
                    total += q;
                }
            }
            if !total.is_one() {
                return Err(CliError::Mismatch(format!(
                    "trial {t}: joint probabilities sum to {}",
                    fmt_rational(&total)
                )));
            }
            full_checks += 1;
        }
    }
    Ok(format!(
        "seed\t{seed}\ntrials\t{trials}\nnormalization checks\t{full_checks}\nresult\tok\n"
    ))
}
