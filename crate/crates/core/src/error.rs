use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped by the CLI exit code they map to: validation
/// problems, size gates, and everything else.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid degree {0}")]
    InvalidDegree(u32),
    #[error("size bound exceeded: {what} = {size} > {bound}")]
    SizeBound { what: &'static str, size: u128, bound: u128 },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(u32),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficient overflow")]
    Overflow,
    #[error("negative coefficient {coeff} at character {exponent}")]
    NegativeCoefficient { exponent: u64, coeff: String },
    #[error("character with exponent {0} is not primitive")]
    NotPrimitive(u64),
    #[error("character field degree r = {r} does not divide s = {s}")]
    FieldNotContained { r: u32, s: u32 },
    #[error("{map} has a nonzero entry outside the graded block pattern ({src} -> {dst})")]
    BlockPattern { map: &'static str, src: u64, dst: u64 },
    #[error("identity {0} fails")]
    IdentityFails(&'static str),
    #[error("V is not nilpotent")]
    NotNilpotent,
    #[error("V is not zero")]
    NonzeroV,
    #[error("relation x_{index} * y_{index} != w")]
    RelationViolated { index: usize },
    #[error("w is not in pR")]
    WNotInPR,
    #[error("component ranks {0:?} are not a multiple of n*d^2")]
    BadHeight(Vec<usize>),
    #[error("cokernel of Pi^{0} is not killed by p")]
    CokernelNotKilledByP(u32),
    #[error("unsatisfiable generator configuration: {0}")]
    Unsatisfiable(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors raised by explicit size gates.
    pub fn is_size_gate(&self) -> bool {
        matches!(self, Error::SizeBound { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
