//! Stabilizer codes, Pauli channels and maximum-likelihood decoding.

pub mod channel;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod limits;
pub mod pauli;
pub mod ratmat;
pub mod reduction;
pub mod scalar;
pub mod shor;
pub mod stabilizer;

pub use channel::{PauliChannel, QubitChannel};
pub use decoder::{coset_enumerator, CosetEnumerator, DecodeResult, Decoder, LargeGapReport};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use limits::Limits;
pub use pauli::{Pauli, PauliOperator};
pub use reduction::{run_reduction, ClassicalCode, Reduction};
pub use scalar::{Rational, Scalar};
pub use stabilizer::{Decomposition, LogicalLabel, StabilizerCode, Syndrome};

/// Exact channel over arbitrary-precision rationals.
pub type ExactChannel = PauliChannel<Rational>;
/// Floating-point channel.
pub type FloatChannel = PauliChannel<f64>;
