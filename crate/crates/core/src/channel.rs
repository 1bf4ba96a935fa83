//! Memoryless Pauli channels: independent per-qubit distributions over
//! `{I, X, Y, Z}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::scalar::{fmt_rational, parse_rational, Rational, Scalar};

/// A probability vector `(q_I, q_X, q_Y, q_Z)` for one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitChannel<T> {
    pub i: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> QubitChannel<T> {
    /// # Errors
    /// `OutOfRange` if an entry lies outside [0,1] or the entries do not sum
    /// to one.
    pub fn new(i: T, x: T, y: T, z: T) -> Result<Self> {
        let ch = Self { i, x, y, z };
        for v in ch.entries() {
            if *v < T::zero() || *v > T::one() {
                return Err(Error::OutOfRange(format!("probability {v:?}")));
            }
        }
        let sum = ch.i.clone() + ch.x.clone() + ch.y.clone() + ch.z.clone();
        if !sum.approx_eq(&T::one()) {
            return Err(Error::OutOfRange(format!("probabilities sum to {sum:?}")));
        }
        Ok(ch)
    }

    /// Independent X and Z flips, each with probability p/2.
    ///
    /// # Errors
    /// `OutOfRange` unless 0 ≤ p ≤ 1.
    pub fn independent_xz(p: T) -> Result<Self> {
        check_unit(&p)?;
        let half = p / (T::one() + T::one());
        let keep = T::one() - half.clone();
        Self::new(
            keep.clone() * keep.clone(),
            half.clone() * keep.clone(),
            half.clone() * half.clone(),
            half * keep,
        )
    }

    /// `(1−p, p/3, p/3, p/3)`.
    ///
    /// # Errors
    /// `OutOfRange` unless 0 ≤ p ≤ 1.
    pub fn depolarizing(p: T) -> Result<Self> {
        check_unit(&p)?;
        let third = p.clone() / T::from_ratio(3, 1);
        Self::new(T::one() - p, third.clone(), third.clone(), third)
    }

    /// `(1−q, 0, 0, q)`.
    ///
    /// # Errors
    /// `OutOfRange` unless 0 ≤ q ≤ 1.
    pub fn z_only(q: T) -> Result<Self> {
        check_unit(&q)?;
        Self::new(T::one() - q.clone(), T::zero(), T::zero(), q)
    }

    #[must_use]
    pub fn error_free() -> Self {
        Self {
            i: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    #[must_use]
    pub fn prob(&self, p: Pauli) -> &T {
        match p {
            Pauli::I => &self.i,
            Pauli::X => &self.x,
            Pauli::Y => &self.y,
            Pauli::Z => &self.z,
        }
    }

    /// Entries in the order I, X, Y, Z.
    #[must_use]
    pub fn entries(&self) -> [&T; 4] {
        [&self.i, &self.x, &self.y, &self.z]
    }
}

fn check_unit<T: Scalar>(p: &T) -> Result<()> {
    if *p < T::zero() || *p > T::one() {
        Err(Error::OutOfRange(format!("rate {p:?} not in [0,1]")))
    } else {
        Ok(())
    }
}

/// An n-qubit memoryless Pauli channel.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel<T> {
    qubits: Vec<QubitChannel<T>>,
}

impl<T: Scalar> PauliChannel<T> {
    #[must_use]
    pub fn from_qubits(qubits: Vec<QubitChannel<T>>) -> Self {
        Self { qubits }
    }

    /// The same single-qubit channel on all n qubits.
    #[must_use]
    pub fn uniform(n: usize, q: &QubitChannel<T>) -> Self {
        Self {
            qubits: vec![q.clone(); n],
        }
    }

    /// # Errors
    /// `OutOfRange` unless 0 ≤ p ≤ 1.
    pub fn independent_xz(n: usize, p: T) -> Result<Self> {
        Ok(Self::uniform(n, &QubitChannel::independent_xz(p)?))
    }

    /// # Errors
    /// `OutOfRange` unless 0 ≤ p ≤ 1.
    pub fn depolarizing(n: usize, p: T) -> Result<Self> {
        Ok(Self::uniform(n, &QubitChannel::depolarizing(p)?))
    }

    #[must_use]
    pub fn error_free(n: usize) -> Self {
        Self::uniform(n, &QubitChannel::error_free())
    }

    /// Channels on consecutive qubit blocks, concatenated.
    #[must_use]
    pub fn compose(parts: &[PauliChannel<T>]) -> Self {
        Self {
            qubits: parts.iter().flat_map(|c| c.qubits.iter().cloned()).collect(),
        }
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    #[must_use]
    pub fn qubit(&self, i: usize) -> &QubitChannel<T> {
        &self.qubits[i]
    }

    #[must_use]
    pub fn qubits(&self) -> &[QubitChannel<T>] {
        &self.qubits
    }

    /// `∏ q_{i,E_i}`.
    ///
    /// # Errors
    /// `LengthMismatch` if `e` acts on a different number of qubits.
    pub fn error_probability(&self, e: &PauliOperator) -> Result<T> {
        if e.num_qubits() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: e.num_qubits(),
            });
        }
        let mut prob = T::one();
        for (i, q) in self.qubits.iter().enumerate() {
            prob = prob * q.prob(e.get(i)).clone();
        }
        Ok(prob)
    }
}

impl<T: Scalar> From<QubitChannel<T>> for PauliChannel<T> {
    fn from(q: QubitChannel<T>) -> Self {
        Self { qubits: vec![q] }
    }
}

#[derive(Serialize, Deserialize)]
struct QubitJson {
    #[serde(rename = "I")]
    i: String,
    #[serde(rename = "X")]
    x: String,
    #[serde(rename = "Y")]
    y: String,
    #[serde(rename = "Z")]
    z: String,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    n: usize,
    qubits: Vec<QubitJson>,
}

impl PauliChannel<Rational> {
    /// JSON form `{"n":…, "qubits":[{"I":"a/b","X":…,"Y":…,"Z":…}, …]}`.
    #[must_use]
    pub fn to_json(&self) -> String {
        let doc = ChannelJson {
            n: self.n(),
            qubits: self
                .qubits
                .iter()
                .map(|q| QubitJson {
                    i: fmt_rational(&q.i),
                    x: fmt_rational(&q.x),
                    y: fmt_rational(&q.y),
                    z: fmt_rational(&q.z),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("channel serializes")
    }

    /// # Errors
    /// `Parse` on malformed JSON, `OutOfRange` on invalid probabilities.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.qubits.len() != doc.n {
            return Err(Error::Parse(format!(
                "n = {} but {} qubit entries",
                doc.n,
                doc.qubits.len()
            )));
        }
        let qubits = doc
            .qubits
            .iter()
            .map(|q| {
                QubitChannel::new(
                    parse_rational(&q.i)?,
                    parse_rational(&q.x)?,
                    parse_rational(&q.y)?,
                    parse_rational(&q.z)?,
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self { qubits })
    }

    /// Named shortcuts `xz:p=a/b` and `depol:p=a/b` on n qubits.
    ///
    /// # Errors
    /// `Parse` on an unknown form, `OutOfRange` on an invalid rate.
    pub fn from_shortcut(spec: &str, n: usize) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown channel spec {spec:?}"));
        let (kind, rest) = spec.trim().split_once(':').ok_or_else(bad)?;
        let value = rest.trim().strip_prefix("p=").ok_or_else(bad)?;
        let p = parse_rational(value)?;
        match kind {
            "xz" => Self::independent_xz(n, p),
            "depol" => Self::depolarizing(n, p),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type Q = QubitChannel<Rational>;

    fn vec4(q: &Q) -> [Rational; 4] {
        [q.i.clone(), q.x.clone(), q.y.clone(), q.z.clone()]
    }

    #[test]
    fn independent_xz_values() {
        assert_eq!(vec4(&Q::independent_xz(rat(0, 1)).unwrap()), vec4(&Q::error_free()));
        assert_eq!(
            vec4(&Q::independent_xz(rat(1, 1)).unwrap()),
            [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]
        );
        assert_eq!(
            vec4(&Q::independent_xz(rat(1, 2)).unwrap()),
            [rat(9, 16), rat(3, 16), rat(1, 16), rat(3, 16)]
        );
        assert!(Q::independent_xz(rat(3, 2)).is_err());
    }

    #[test]
    fn depolarizing_values() {
        assert_eq!(vec4(&Q::depolarizing(rat(0, 1)).unwrap()), vec4(&Q::error_free()));
        assert_eq!(
            vec4(&Q::depolarizing(rat(3, 4)).unwrap()),
            [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]
        );
        assert_eq!(
            vec4(&Q::depolarizing(rat(1, 4)).unwrap()),
            [rat(3, 4), rat(1, 12), rat(1, 12), rat(1, 12)]
        );
        assert!(Q::depolarizing(rat(-1, 4)).is_err());
    }

    #[test]
    fn z_only_values() {
        assert_eq!(vec4(&Q::z_only(rat(0, 1)).unwrap()), vec4(&Q::error_free()));
        assert_eq!(
            vec4(&Q::z_only(rat(1, 3)).unwrap()),
            [rat(2, 3), rat(0, 1), rat(0, 1), rat(1, 3)]
        );
    }

    #[test]
    fn compose_layout() {
        let ch = PauliChannel::compose(&[
            PauliChannel::independent_xz(3, rat(1, 8)).unwrap(),
            PauliChannel::error_free(2),
        ]);
        assert_eq!(ch.n(), 5);
        assert_eq!(ch.qubit(4), &Q::error_free());
        assert_eq!(PauliChannel::<Rational>::compose(&[]).n(), 0);
        let with_tunable = PauliChannel::compose(&[
            PauliChannel::independent_xz(2, rat(1, 8)).unwrap(),
            Q::z_only(rat(1, 3)).unwrap().into(),
        ]);
        assert_eq!(with_tunable.qubit(2).z, rat(1, 3));
    }

    #[test]
    fn error_probability_examples() {
        let ch = PauliChannel::independent_xz(4, rat(1, 4)).unwrap();
        let e: PauliOperator = "XZIY".parse().unwrap();
        let half = rat(1, 8);
        let keep = rat(7, 8);
        let expected = half.pown(4) * keep.pown(4);
        assert_eq!(ch.error_probability(&e).unwrap(), expected);
        let zc: PauliChannel<Rational> = Q::z_only(rat(1, 3)).unwrap().into();
        assert_eq!(
            zc.error_probability(&"X".parse().unwrap()).unwrap(),
            rat(0, 1)
        );
        assert!(ch.error_probability(&"X".parse().unwrap()).is_err());
    }

    #[test]
    fn float_channel_normalizes() {
        let ch = PauliChannel::<f64>::independent_xz(2, 0.3).unwrap();
        let e: PauliOperator = "XY".parse().unwrap();
        let expected = (0.15 * 0.85) * (0.15 * 0.15);
        assert!((ch.error_probability(&e).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn json_and_shortcuts() {
        let ch = PauliChannel::from_shortcut("xz:p=1/8", 2).unwrap();
        let back = PauliChannel::from_json(&ch.to_json()).unwrap();
        assert_eq!(back, ch);
        assert!(ch.to_json().contains("\"I\": \"225/256\""));
        let d = PauliChannel::from_shortcut("depol:p=1/10", 1).unwrap();
        assert_eq!(d.qubit(0).x, rat(1, 30));
        assert!(PauliChannel::from_shortcut("amp:p=1/2", 1).is_err());
        assert!(PauliChannel::from_json("{\"n\":1,\"qubits\":[{\"I\":\"1/2\",\"X\":\"1/2\",\"Y\":\"1/2\",\"Z\":\"0\"}]}").is_err());
    }
}
