//! Stabilizer codes in canonical form `{S_i, T_i, X̄_j, Z̄_j}`.
//!
//! Any Pauli error decomposes uniquely as `E = T·L·S` with `T` a product of
//! pure errors fixed by the syndrome, `L` a logical representative and `S` a
//! stabilizer element.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::limits::Limits;
use crate::pauli::PauliOperator;

/// Syndrome bits, one per stabilizer generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub BitVector);

impl Syndrome {
    #[must_use]
    pub fn zero(len: usize) -> Self {
        Self(BitVector::zeros(len))
    }

    #[must_use]
    pub fn bits(&self) -> &BitVector {
        &self.0
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All syndromes of the given length in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = Syndrome> {
        assert!(len < 63, "too many syndromes to list");
        (0..1u64 << len).map(move |t| Syndrome(msb_first(t, len)))
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(Syndrome)
    }
}

/// Bits of `t` written most-significant first into a vector of length `len`.
fn msb_first(t: u64, len: usize) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if (t >> (len - 1 - i)) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

/// A logical class `X̄^x Z̄^z` (coset of S in N(S)).
///
/// Ordered lexicographically on `(x, z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalLabel {
    pub x: BitVector,
    pub z: BitVector,
}

impl LogicalLabel {
    #[must_use]
    pub fn trivial(k: usize) -> Self {
        Self {
            x: BitVector::zeros(k),
            z: BitVector::zeros(k),
        }
    }

    #[must_use]
    pub fn num_logical(&self) -> usize {
        self.x.len()
    }

    #[must_use]
    pub fn is_trivial(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// All 4^k labels in lexicographic order, starting with the trivial one.
    pub fn all(k: usize) -> impl Iterator<Item = LogicalLabel> {
        assert!(2 * k < 63, "too many logical classes to list");
        (0..1u64 << (2 * k)).map(move |t| LogicalLabel {
            x: msb_first(t >> k, k),
            z: msb_first(t & ((1u64 << k) - 1), k),
        })
    }

    /// Single-qubit names `I`, `X`, `Y`, `Z` when k = 1.
    #[must_use]
    pub fn single(x: bool, z: bool) -> Self {
        Self {
            x: BitVector::from_bools(&[x]),
            z: BitVector::from_bools(&[z]),
        }
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.len() == 1 {
            let name = match (self.x.get(0), self.z.get(0)) {
                (false, false) => "I",
                (true, false) => "X",
                (false, true) => "Z",
                (true, true) => "Y",
            };
            f.write_str(name)
        } else {
            write!(f, "x{}z{}", self.x, self.z)
        }
    }
}

impl FromStr for LogicalLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "I" => return Ok(Self::single(false, false)),
            "X" => return Ok(Self::single(true, false)),
            "Z" => return Ok(Self::single(false, true)),
            "Y" => return Ok(Self::single(true, true)),
            _ => {}
        }
        let bad = || Error::Parse(format!("invalid logical label {s:?}"));
        let rest = s.strip_prefix('x').ok_or_else(bad)?;
        let (x, z) = rest.split_once('z').ok_or_else(bad)?;
        let (x, z): (BitVector, BitVector) = (x.parse()?, z.parse()?);
        if x.len() != z.len() {
            return Err(bad());
        }
        Ok(Self { x, z })
    }
}

/// The `T·L·S` decomposition of an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub syndrome: Syndrome,
    pub label: LogicalLabel,
    /// Which stabilizer generators multiply into `S`.
    pub stabilizer_coords: BitVector,
}

/// One failed condition found by [`StabilizerCode::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Generator, pure-error and logical counts are inconsistent with n.
    Count(String),
    /// The stabilizer generators are linearly dependent.
    DependentStabilizers,
    /// The full set of 2n basis operators does not span GF(2)^{2n}.
    NotABasis,
    /// Two stabilizer generators anticommute.
    NotAbelian(usize, usize),
    /// A pair of basis operators has the wrong commutation relation.
    Commutation {
        a: String,
        b: String,
        expected_anticommute: bool,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    #[must_use]
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    stabilizers: Vec<PauliOperator>,
    pure_errors: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
}

impl StabilizerCode {
    /// Completes commuting, independent generators to a canonical basis by
    /// symplectic Gram–Schmidt.
    ///
    /// # Errors
    /// `LengthMismatch`, `NotAbelian`, `DependentGenerators`.
    pub fn canonical_completion(n: usize, stabilizers: Vec<PauliOperator>) -> Result<Self> {
        check_generators(n, &stabilizers)?;
        let pure_errors = pure_errors_for(n, &stabilizers, &[])?;

        // Logicals span the symplectic complement of span{S, T}.
        let constraints: Vec<BitVector> = stabilizers
            .iter()
            .chain(&pure_errors)
            .map(swapped_eta)
            .collect();
        let mut pool: Vec<PauliOperator> = BitMatrix::from_rows(constraints, 2 * n)?
            .kernel()
            .rows()
            .iter()
            .map(|b| PauliOperator::eta_decode(b).expect("even length"))
            .collect();

        let mut logical_x = Vec::new();
        let mut logical_z = Vec::new();
        while let Some(u) = pool.first().cloned() {
            let j = pool
                .iter()
                .position(|w| w.anticommutes(&u))
                .ok_or_else(|| Error::InvalidCode("degenerate logical space".into()))?;
            let v = pool[j].clone();
            pool.remove(j);
            pool.remove(0);
            for w in &mut pool {
                let (wu, wv) = (w.anticommutes(&u), w.anticommutes(&v));
                if wv {
                    w.mul_assign(&u);
                }
                if wu {
                    w.mul_assign(&v);
                }
            }
            // Prefer the operator with less X content as Z̄.
            if v.x().weight() < u.x().weight() {
                logical_z.push(v);
                logical_x.push(u);
            } else {
                logical_z.push(u);
                logical_x.push(v);
            }
        }
        let code = Self {
            n,
            stabilizers,
            pure_errors,
            logical_x,
            logical_z,
        };
        debug_assert!(code.validate().is_valid());
        Ok(code)
    }

    /// Builds a code from generators and chosen logical operators; pure
    /// errors are computed to commute with the logicals.
    ///
    /// # Errors
    /// `LengthMismatch`, `NotAbelian`, `DependentGenerators`, or
    /// `InvalidCode` if the logicals violate the canonical relations.
    pub fn with_logicals(
        n: usize,
        stabilizers: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        check_generators(n, &stabilizers)?;
        if logical_x.len() != logical_z.len() || stabilizers.len() + logical_x.len() != n {
            return Err(Error::InvalidCode(format!(
                "{} generators and {}/{} logicals on {n} qubits",
                stabilizers.len(),
                logical_x.len(),
                logical_z.len()
            )));
        }
        for op in logical_x.iter().chain(&logical_z) {
            check_len(n, op)?;
        }
        let logicals: Vec<PauliOperator> = logical_x.iter().chain(&logical_z).cloned().collect();
        let pure_errors = pure_errors_for(n, &stabilizers, &logicals)?;
        let code = Self {
            n,
            stabilizers,
            pure_errors,
            logical_x,
            logical_z,
        };
        let report = code.validate();
        if report.is_valid() {
            Ok(code)
        } else {
            Err(Error::InvalidCode(format!("{:?}", report.violations)))
        }
    }

    /// Assembles a code without any checking; see [`validate`](Self::validate).
    #[must_use]
    pub fn from_raw_parts(
        n: usize,
        stabilizers: Vec<PauliOperator>,
        pure_errors: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Self {
        Self {
            n,
            stabilizers,
            pure_errors,
            logical_x,
            logical_z,
        }
    }

    /// Parses the code file format: a header line `n k`, then n − k Pauli
    /// strings. `#` starts a comment line.
    ///
    /// # Errors
    /// `Parse`, plus anything from [`canonical_completion`](Self::canonical_completion).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing 'n k' header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad header {header:?}")))
            })
            .collect::<Result<_>>()?;
        let [n, k] = nums[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        if k > n {
            return Err(Error::Parse(format!("k = {k} exceeds n = {n}")));
        }
        let gens: Vec<PauliOperator> = lines.map(str::parse).collect::<Result<_>>()?;
        if gens.len() != n - k {
            return Err(Error::Parse(format!(
                "expected {} generators, found {}",
                n - k,
                gens.len()
            )));
        }
        Self::canonical_completion(n, gens)
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k());
        for g in &self.stabilizers {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.logical_x.len()
    }

    /// Number of stabilizer generators, n − k.
    #[inline]
    #[must_use]
    pub fn num_generators(&self) -> usize {
        self.stabilizers.len()
    }

    #[must_use]
    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    #[must_use]
    pub fn pure_errors(&self) -> &[PauliOperator] {
        &self.pure_errors
    }

    #[must_use]
    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    #[must_use]
    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    /// Checks generator count and independence, the full commutation table of
    /// the canonical basis, and that the basis spans GF(2)^{2n}.
    #[must_use]
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let m = self.stabilizers.len();
        let k = self.logical_x.len();
        let all_ops = self
            .stabilizers
            .iter()
            .chain(&self.pure_errors)
            .chain(&self.logical_x)
            .chain(&self.logical_z);
        if all_ops.clone().any(|op| op.num_qubits() != self.n) {
            violations.push(Violation::Count("operator with wrong qubit count".into()));
            return ValidationReport { violations };
        }
        if self.pure_errors.len() != m || self.logical_z.len() != k || m + k != self.n {
            violations.push(Violation::Count(format!(
                "n = {}, {} generators, {} pure errors, {} X̄, {} Z̄",
                self.n,
                m,
                self.pure_errors.len(),
                k,
                self.logical_z.len()
            )));
        }
        let eta = |ops: &[PauliOperator]| {
            BitMatrix::from_rows(ops.iter().map(PauliOperator::eta_encode).collect(), 2 * self.n)
                .expect("uniform lengths")
        };
        if eta(&self.stabilizers).rank() < m {
            violations.push(Violation::DependentStabilizers);
        }
        let everything: Vec<PauliOperator> = all_ops.cloned().collect();
        if eta(&everything).rank() < 2 * self.n {
            violations.push(Violation::NotABasis);
        }

        // Basis element i is paired with i' where (S_i, T_i) and (X̄_j, Z̄_j)
        // anticommute; every other pair commutes.
        let mut named: Vec<(String, &PauliOperator, usize)> = Vec::new();
        for (i, op) in self.stabilizers.iter().enumerate() {
            named.push((format!("S{}", i + 1), op, i));
        }
        for (i, op) in self.pure_errors.iter().enumerate() {
            named.push((format!("T{}", i + 1), op, i));
        }
        for (i, op) in self.logical_x.iter().enumerate() {
            named.push((format!("X̄{}", i + 1), op, m + i));
        }
        for (i, op) in self.logical_z.iter().enumerate() {
            named.push((format!("Z̄{}", i + 1), op, m + i));
        }
        let is_stab = |name: &str| name.starts_with('S');
        for a in 0..named.len() {
            for b in (a + 1)..named.len() {
                let (na, oa, pa) = &named[a];
                let (nb, ob, pb) = &named[b];
                let expected = pa == pb && na.chars().next() != nb.chars().next();
                let found = oa.anticommutes(ob);
                if found != expected {
                    if is_stab(na) && is_stab(nb) {
                        violations.push(Violation::NotAbelian(a, b));
                    } else {
                        violations.push(Violation::Commutation {
                            a: na.clone(),
                            b: nb.clone(),
                            expected_anticommute: expected,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// # Errors
    /// `LengthMismatch` if `e` acts on a different number of qubits.
    pub fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        check_len(self.n, e)?;
        Ok(Syndrome(BitVector::from_bools(
            &self
                .stabilizers
                .iter()
                .map(|s| s.anticommutes(e))
                .collect::<Vec<_>>(),
        )))
    }

    /// `T_s = ∏ T_j^{s_j}`.
    ///
    /// # Errors
    /// `LengthMismatch` if the syndrome has the wrong length.
    pub fn pure_error_for(&self, s: &Syndrome) -> Result<PauliOperator> {
        if s.len() != self.stabilizers.len() {
            return Err(Error::LengthMismatch {
                expected: self.stabilizers.len(),
                found: s.len(),
            });
        }
        let mut t = PauliOperator::identity(self.n);
        for j in s.0.ones() {
            t.mul_assign(&self.pure_errors[j]);
        }
        Ok(t)
    }

    /// `∏ X̄_j^{x_j} Z̄_j^{z_j}`.
    ///
    /// # Errors
    /// `LengthMismatch` if the label has the wrong k.
    pub fn logical_representative(&self, label: &LogicalLabel) -> Result<PauliOperator> {
        if label.x.len() != self.k() || label.z.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                found: label.x.len(),
            });
        }
        let mut l = PauliOperator::identity(self.n);
        for j in label.x.ones() {
            l.mul_assign(&self.logical_x[j]);
        }
        for j in label.z.ones() {
            l.mul_assign(&self.logical_z[j]);
        }
        Ok(l)
    }

    /// `T_s · L`, the canonical representative of a coset.
    ///
    /// # Errors
    /// `LengthMismatch`.
    pub fn coset_representative(&self, s: &Syndrome, label: &LogicalLabel) -> Result<PauliOperator> {
        Ok(&self.pure_error_for(s)? * &self.logical_representative(label)?)
    }

    /// Product of the generators selected by `coords`.
    ///
    /// # Errors
    /// `LengthMismatch`.
    pub fn stabilizer_element(&self, coords: &BitVector) -> Result<PauliOperator> {
        if coords.len() != self.stabilizers.len() {
            return Err(Error::LengthMismatch {
                expected: self.stabilizers.len(),
                found: coords.len(),
            });
        }
        let mut s = PauliOperator::identity(self.n);
        for j in coords.ones() {
            s.mul_assign(&self.stabilizers[j]);
        }
        Ok(s)
    }

    /// Unique `E = T·L·S` decomposition.
    ///
    /// # Errors
    /// `LengthMismatch`.
    pub fn decompose(&self, e: &PauliOperator) -> Result<Decomposition> {
        let syndrome = self.syndrome_of(e)?;
        let in_normalizer = &self.pure_error_for(&syndrome)? * e;
        let label = self.logical_label(&in_normalizer);
        let in_group = &self.logical_representative(&label)? * &in_normalizer;
        let stabilizer_coords = BitVector::from_bools(
            &self
                .pure_errors
                .iter()
                .map(|t| t.anticommutes(&in_group))
                .collect::<Vec<_>>(),
        );
        Ok(Decomposition {
            syndrome,
            label,
            stabilizer_coords,
        })
    }

    /// Inverse of [`decompose`](Self::decompose).
    ///
    /// # Errors
    /// `LengthMismatch`.
    pub fn recompose(&self, d: &Decomposition) -> Result<PauliOperator> {
        Ok(&self.coset_representative(&d.syndrome, &d.label)?
            * &self.stabilizer_element(&d.stabilizer_coords)?)
    }

    /// Logical class of an operator in the normalizer (syndrome ignored).
    #[must_use]
    pub fn logical_label(&self, e: &PauliOperator) -> LogicalLabel {
        let x = self
            .logical_z
            .iter()
            .map(|z| z.anticommutes(e))
            .collect::<Vec<_>>();
        let z = self
            .logical_x
            .iter()
            .map(|x| x.anticommutes(e))
            .collect::<Vec<_>>();
        LogicalLabel {
            x: BitVector::from_bools(&x),
            z: BitVector::from_bools(&z),
        }
    }

    /// All 2^{n−k} stabilizer elements in Gray-code order.
    ///
    /// # Errors
    /// `TooLarge` when n − k exceeds the limit.
    pub fn enumerate_stabilizer_group(&self, limits: &Limits) -> Result<GrayCoset<'_>> {
        limits.check_stabilizers(self.stabilizers.len())?;
        Ok(GrayCoset::new(
            &self.stabilizers,
            PauliOperator::identity(self.n),
        ))
    }

    /// Minimum weight over N(S) \ S; `None` when k = 0.
    ///
    /// # Errors
    /// `TooLarge` when 2^{n+k} exceeds the candidate limit.
    pub fn distance(&self, limits: &Limits) -> Result<Option<usize>> {
        limits.check_candidates(self.n + self.k())?;
        let mut best: Option<usize> = None;
        for label in LogicalLabel::all(self.k()).skip(1) {
            let rep = self.logical_representative(&label)?;
            for e in GrayCoset::new(&self.stabilizers, rep) {
                let w = e.weight();
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        Ok(best)
    }

    /// Counts of N(S) elements by symplectic weight, indices 0..=2n.
    ///
    /// # Errors
    /// `TooLarge` when 2^{n+k} exceeds the candidate limit.
    pub fn normalizer_enumerator(&self, limits: &Limits) -> Result<Vec<u64>> {
        limits.check_candidates(self.n + self.k())?;
        let mut counts = vec![0u64; 2 * self.n + 1];
        for label in LogicalLabel::all(self.k()) {
            let rep = self.logical_representative(&label)?;
            for e in GrayCoset::new(&self.stabilizers, rep) {
                counts[e.symplectic_weight()] += 1;
            }
        }
        Ok(counts)
    }
}

/// `start · S` for every S generated by `gens`, in Gray-code order.
pub struct GrayCoset<'a> {
    gens: &'a [PauliOperator],
    current: PauliOperator,
    index: u64,
    total: u64,
}

impl<'a> GrayCoset<'a> {
    /// # Panics
    /// Panics if there are 64 or more generators.
    #[must_use]
    pub fn new(gens: &'a [PauliOperator], start: PauliOperator) -> Self {
        assert!(gens.len() < 64, "too many generators to enumerate");
        Self {
            gens,
            current: start,
            index: 0,
            total: 1u64 << gens.len(),
        }
    }
}

impl Iterator for GrayCoset<'_> {
    type Item = PauliOperator;

    fn next(&mut self) -> Option<PauliOperator> {
        if self.index == self.total {
            return None;
        }
        if self.index > 0 {
            let j = self.index.trailing_zeros() as usize;
            self.current.mul_assign(&self.gens[j]);
        }
        self.index += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.total - self.index).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// η image with halves swapped, so that `swapped_eta(a) · eta(b)` is the
/// symplectic product of `a` and `b`.
fn swapped_eta(op: &PauliOperator) -> BitVector {
    op.x().concat(op.z())
}

fn check_len(n: usize, op: &PauliOperator) -> Result<()> {
    if op.num_qubits() == n {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: n,
            found: op.num_qubits(),
        })
    }
}

fn check_generators(n: usize, gens: &[PauliOperator]) -> Result<()> {
    for g in gens {
        check_len(n, g)?;
    }
    for a in 0..gens.len() {
        for b in (a + 1)..gens.len() {
            if gens[a].anticommutes(&gens[b]) {
                return Err(Error::NotAbelian(a, b));
            }
        }
    }
    let eta = BitMatrix::from_rows(gens.iter().map(PauliOperator::eta_encode).collect(), 2 * n)?;
    if eta.rank() < gens.len() {
        return Err(Error::DependentGenerators);
    }
    Ok(())
}

/// Pure errors `T_i` with `{T_i, S_j} = δ_ij`, commuting with each other and
/// with every operator in `logicals`.
fn pure_errors_for(
    n: usize,
    stabilizers: &[PauliOperator],
    logicals: &[PauliOperator],
) -> Result<Vec<PauliOperator>> {
    let rows: Vec<BitVector> = stabilizers
        .iter()
        .chain(logicals)
        .map(swapped_eta)
        .collect();
    let system = BitMatrix::from_rows(rows, 2 * n)?;
    let m = stabilizers.len();
    let mut pure: Vec<PauliOperator> = Vec::with_capacity(m);
    for i in 0..m {
        let rhs = BitVector::unit(m + logicals.len(), i);
        let sol = system.solve(&rhs).map_err(|_| {
            Error::InvalidCode(format!("no pure error for generator {}", i + 1))
        })?;
        let mut t = PauliOperator::eta_decode(&sol)?;
        // Multiplying by S_j toggles commutation with T_j only.
        for (j, prev) in pure.iter().enumerate() {
            if t.anticommutes(prev) {
                t.mul_assign(&stabilizers[j]);
            }
        }
        pure.push(t);
    }
    Ok(pure)
}
