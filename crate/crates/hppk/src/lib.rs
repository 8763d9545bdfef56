//! HPPK: homomorphic polynomial public-key cryptography over hidden rings.
//!
//! Provides a key encapsulation mechanism ([`kem`]) and a digital signature
//! scheme ([`ds`]), both built on symmetric homomorphic encryption of
//! polynomial coefficients via modular multiplication over secret rings.
//! Supporting modules cover multiprecision arithmetic ([`bigmod`]), a
//! deterministic byte generator for reproducible key material ([`drbg`]),
//! bit-exact serialization and known-answer-test files ([`codec`]),
//! toy-scale cryptanalysis ([`attacks`]), and a timing harness ([`bench`]).
//!
//! **Do not use in production.** This is a research implementation with no
//! constant-time guarantees.

use thiserror::Error;

pub mod attacks;
pub mod bench;
pub mod bigmod;
pub mod codec;
pub mod drbg;
pub mod ds;
pub mod kem;

/// Crate-wide error type.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    /// `gcd(a, m) != 1`: signals bad key material or a caller bug.
    #[error("value is not invertible modulo the given modulus")]
    NotInvertible,
    /// DRBG seeds are exactly 32 bytes.
    #[error("seed must be exactly 32 bytes, got {0}")]
    SeedLength(usize),
    /// The measure-zero event `beta(x, u) * h(x) = 0 mod p` (or a tampered
    /// ciphertext that triggers it).
    #[error("decapsulation failure")]
    DecapsulationFailure,
    /// Signature component out of its declared bit bound or wrong shape.
    #[error("malformed signature")]
    MalformedSignature,
    /// Encoded input is not exactly the layout length.
    #[error("encoded length mismatch: expected {expected} bytes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// Decoded field value is at or above its modulus bound.
    #[error("decoded value out of range")]
    RangeViolation,
    /// KAT or artifact container text could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    /// A KAT record did not regenerate byte-identically from its seed.
    #[error("KAT mismatch in record {record}, field {field}")]
    KatMismatch { record: usize, field: String },
    /// Exhaustive search finished without a match (malformed attack input).
    #[error("search exhausted without a match")]
    NotFound,
    /// Parameter combination outside the supported space.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Attack entry points refuse production-size parameter sets.
    #[error("attacks accept toy parameter sets only")]
    ToyOnly,
}

/// NIST-style security level selecting the prime field and hash sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SecurityLevel {
    I,
    III,
    V,
}

impl SecurityLevel {
    /// Parses the CLI encoding 1/3/5.
    pub fn from_number(n: u8) -> Result<Self, Error> {
        match n {
            1 => Ok(SecurityLevel::I),
            3 => Ok(SecurityLevel::III),
            5 => Ok(SecurityLevel::V),
            _ => Err(Error::InvalidParams(format!("unknown security level {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            SecurityLevel::I => 1,
            SecurityLevel::III => 3,
            SecurityLevel::V => 5,
        }
    }

    pub const ALL: [SecurityLevel; 3] = [SecurityLevel::I, SecurityLevel::III, SecurityLevel::V];
}
