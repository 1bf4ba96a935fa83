//! Code fixtures: bit-flip, toric, random, and a two-class family where
//! degenerate and non-degenerate decoding disagree above a known threshold.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::{Pauli, PauliOperator};
use crate::stabilizer::{StabilizerCode, Syndrome};

/// Three-qubit bit-flip code, generators `ZZI`, `IZZ`.
#[must_use]
pub fn bit_flip() -> StabilizerCode {
    StabilizerCode::canonical_completion(3, vec![parse("ZZI"), parse("IZZ")])
        .expect("bit-flip generators are valid")
}

/// Nine-qubit Shor code.
#[must_use]
pub fn shor9() -> StabilizerCode {
    crate::shor::ShorLattice::new(3, 3)
        .expect("3x3 lattice is valid")
        .code
}

fn parse(s: &str) -> PauliOperator {
    s.parse().expect("fixture Pauli string")
}

/// Toric code on an `l × l` periodic lattice: `2l²` qubits, `k = 2`.
///
/// Horizontal edge `(r,c)→(r,c+1)` is qubit `r·l + c`; vertical edge
/// `(r,c)→(r+1,c)` is qubit `l² + r·l + c`. X-type vertex stars and Z-type
/// plaquettes, one of each dropped for independence.
///
/// # Errors
/// `InvalidCode` for `l < 2`.
pub fn toric(l: usize) -> Result<StabilizerCode> {
    if l < 2 {
        return Err(Error::InvalidCode(format!("toric lattice size {l} < 2")));
    }
    let n = 2 * l * l;
    let mut gens = Vec::new();
    for r in 0..l {
        for c in 0..l {
            if r + c == 0 {
                continue;
            }
            gens.push(support(n, &toric_star(l, r, c), Pauli::X));
        }
    }
    for r in 0..l {
        for c in 0..l {
            if r + c == 0 {
                continue;
            }
            gens.push(support(n, &toric_plaquette(l, r, c), Pauli::Z));
        }
    }
    StabilizerCode::canonical_completion(n, gens)
}

/// Qubit index of the horizontal edge leaving vertex `(r, c)` rightwards.
#[must_use]
pub fn toric_h(l: usize, r: usize, c: usize) -> usize {
    (r % l) * l + c % l
}

/// Qubit index of the vertical edge leaving vertex `(r, c)` downwards.
#[must_use]
pub fn toric_v(l: usize, r: usize, c: usize) -> usize {
    l * l + (r % l) * l + c % l
}

fn toric_star(l: usize, r: usize, c: usize) -> [usize; 4] {
    [
        toric_h(l, r, c),
        toric_h(l, r, c + l - 1),
        toric_v(l, r, c),
        toric_v(l, r + l - 1, c),
    ]
}

fn toric_plaquette(l: usize, r: usize, c: usize) -> [usize; 4] {
    [
        toric_h(l, r, c),
        toric_h(l, r + 1, c),
        toric_v(l, r, c),
        toric_v(l, r, c + 1),
    ]
}

fn support(n: usize, qubits: &[usize], p: Pauli) -> PauliOperator {
    let mut op = PauliOperator::identity(n);
    for &q in qubits {
        op.set(q, p);
    }
    op
}

/// Random stabilizer code with `n − k` generators, drawn by rejection:
/// each candidate must commute with and be independent of those kept.
///
/// # Panics
/// Panics if `k > n`.
pub fn random_code<R: Rng>(n: usize, k: usize, rng: &mut R) -> StabilizerCode {
    assert!(k <= n, "k > n");
    let mut gens: Vec<PauliOperator> = Vec::new();
    let mut span = BitMatrix::empty(2 * n);
    while gens.len() < n - k {
        let mut op = PauliOperator::identity(n);
        for i in 0..n {
            op.set(i, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]);
        }
        if op.is_identity() || gens.iter().any(|g| g.anticommutes(&op)) {
            continue;
        }
        let mut trial = span.clone();
        trial.push_row(op.eta_encode());
        if trial.rank() == gens.len() + 1 {
            span = trial;
            gens.push(op);
        }
    }
    StabilizerCode::canonical_completion(n, gens).expect("generators are valid by construction")
}

/// A CSS code with one logical qubit where, at a fixed syndrome, the
/// logical class `L1` holds the most probable error (weight `a`) and class
/// `L2` holds `2^m` errors of weight `c = a + 1`.
#[derive(Clone, Debug)]
pub struct TwoClassCode {
    pub code: StabilizerCode,
    pub m: usize,
    pub w: usize,
    /// Weight of the lightest error, in `L1`.
    pub a: usize,
    /// Weight of every error in `L2`.
    pub c: usize,
    pub syndrome: Syndrome,
    /// The lightest error (Z on the tail).
    pub e1: PauliOperator,
    /// A representative of `L2`.
    pub e2: PauliOperator,
}

impl TwoClassCode {
    /// `m` blocks of `2w` qubits with all-Z block stabilizers, followed by
    /// a tail of `mw − 1` qubits.
    ///
    /// # Errors
    /// `InvalidCode` unless `m ≥ 1` and `w ≥ 1`.
    pub fn new(m: usize, w: usize) -> Result<Self> {
        if m == 0 || w == 0 {
            return Err(Error::InvalidCode("two-class code needs m, w ≥ 1".into()));
        }
        let a = m * w - 1;
        let blocks = 2 * m * w;
        let n = blocks + a;
        let block_vec = |b: usize, len: usize| {
            let mut v = BitVector::zeros(n);
            for q in b * 2 * w..b * 2 * w + len {
                v.set(q, true);
            }
            v
        };
        let d: Vec<BitVector> = (0..m).map(|b| block_vec(b, 2 * w)).collect();
        let mut e1 = BitVector::zeros(n);
        for q in blocks..n {
            e1.set(q, true);
        }
        let mut e2 = BitVector::zeros(n);
        for b in 0..m {
            e2.xor_assign(&block_vec(b, w));
        }
        let zbar = e1.xor(&e2);
        let mut rows = d.clone();
        rows.push(zbar);
        let x_stabs = BitMatrix::from_rows(rows, n)?.kernel();
        let mut gens: Vec<PauliOperator> = d.iter().map(PauliOperator::z_type).collect();
        gens.extend(x_stabs.rows().iter().map(PauliOperator::x_type));
        let code = StabilizerCode::canonical_completion(n, gens)?;
        let e1 = PauliOperator::z_type(&e1);
        let e2 = PauliOperator::z_type(&e2);
        let syndrome = code.syndrome_of(&e1)?;
        Ok(Self {
            code,
            m,
            w,
            a,
            c: m * w,
            syndrome,
            e1,
            e2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_flip_and_shor_validate() {
        assert!(bit_flip().validate().is_valid());
        let shor = shor9();
        assert!(shor.validate().is_valid());
        assert_eq!((shor.n(), shor.k()), (9, 1));
        assert_eq!(shor.distance(&Limits::default()).unwrap(), Some(3));
    }

    #[test]
    fn toric_parameters() {
        let t = toric(3).unwrap();
        assert!(t.validate().is_valid());
        assert_eq!((t.n(), t.k()), (18, 2));
        assert_eq!(t.distance(&Limits::default()).unwrap(), Some(3));
        assert!(toric(1).is_err());
    }

    #[test]
    fn random_codes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..7 {
            for k in 0..=n {
                let c = random_code(n, k, &mut rng);
                assert_eq!((c.n(), c.k()), (n, k));
                assert!(c.validate().is_valid());
            }
        }
    }

    #[test]
    fn two_class_structure() {
        let t = TwoClassCode::new(2, 2).unwrap();
        assert_eq!((t.code.n(), t.code.k()), (11, 1));
        assert!(t.code.validate().is_valid());
        assert_eq!((t.a, t.c), (3, 4));
        assert_eq!(t.code.syndrome_of(&t.e2).unwrap(), t.syndrome);
        assert_ne!(
            t.code.logical_label(&(&t.e1 * &t.e2)),
            crate::stabilizer::LogicalLabel::trivial(1)
        );
    }
}
