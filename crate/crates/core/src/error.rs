use thiserror::Error;

use crate::identities::BoundReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("p = 2 is unsupported; the modulus must be an odd prime")]
    UnsupportedTwo,

    #[error("{0} exceeds the largest supported modulus 2^31 - 1")]
    ModulusTooLarge(u64),

    #[error("zero has no inverse modulo {0}")]
    ZeroInverse(u32),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("coefficient overflow in cyclotomic arithmetic modulo {0}")]
    Overflow(u32),

    #[error("identity hypotheses violated: p = {p} divides a*b (a = {a}, b = {b})")]
    HypothesisViolated { p: u32, a: i64, b: i64 },

    #[error("a and b are both divisible by p = {0}")]
    BothZero(u32),

    #[error("exponent r must be at least 1")]
    ZeroExponent,

    #[error("no odd primes in range [{lo}, {hi}]")]
    EmptyRange { lo: u64, hi: u64 },

    #[error(
        "bound counterexample at p = {}, a = {}, b = {}: weil {:.12}, kloosterman {:.12}, corollary {:.12}",
        .0.p, .0.a, .0.b, .0.weil_ratio, .0.kloosterman_ratio, .0.corollary_ratio
    )]
    Counterexample(Box<BoundReport>),

    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
