//! Error type shared by every module in the crate.
//!
//! Two failure families matter to callers: violated preconditions (bad
//! parity, non-coprime pairs, composite "primes", out-of-domain inputs) and
//! exhausted p-adic precision. The CLI maps the former to exit code 1 and
//! the latter to exit code 2, so the distinction is kept at the type level.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments that must be coprime are not.
    #[error("h = {h} and k = {k} are not coprime")]
    NotCoprime { h: i64, k: i64 },

    /// A parity hypothesis of one of the alternating sums is violated.
    #[error("{kind} requires {requirement}; got h = {h}, k = {k}")]
    Parity {
        kind: &'static str,
        requirement: &'static str,
        h: i64,
        k: i64,
    },

    /// p must be an odd prime everywhere in this crate.
    #[error("p = {p} is not an odd prime")]
    NotOddPrime { p: u64 },

    /// Modulus outside the supported direct-summation range.
    #[error("modulus k = {k} is outside the supported range 1..={max}")]
    ModulusOutOfRange { k: i64, max: i64 },

    /// Any other violated precondition; the message names the hypothesis.
    #[error("{0}")]
    Domain(String),

    /// Division by an exact zero in a field where that has no meaning.
    #[error("division by zero")]
    DivisionByZero,

    /// Every digit of available p-adic precision has been consumed.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }

    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
