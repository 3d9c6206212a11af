pub mod characters;
pub mod dieudonne;
pub mod error;
pub mod galois;
pub mod hopf_oracle;
pub mod od_modules;
pub mod raynaud;
pub mod serial;

pub use error::{Error, Result};

/// Character sums with machine-integer coefficients.
pub type IntCharSum = characters::CharSum<i64>;
/// Character sums with arbitrary-precision coefficients.
pub type BigCharSum = characters::CharSum<num_bigint::BigInt>;
