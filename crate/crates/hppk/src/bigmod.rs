//! Multiprecision natural-number arithmetic and the modular / Barrett
//! primitives the rest of the crate builds on.
//!
//! All intermediate products are computed at full width and then reduced;
//! nothing here truncates. Bit counts (the Barrett shift `K`, ring sizes `L`)
//! are always carried explicitly and never inferred from operand widths.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Arbitrary-precision unsigned integer, the carrier for every ring and
/// field element in the crate.
pub type Nat = BigUint;

/// Greatest common divisor; `gcd(0, b) = b`.
pub fn gcd(a: &Nat, b: &Nat) -> Nat {
    a.gcd(b)
}

/// Modular inverse by the extended Euclidean algorithm.
///
/// Returns `x` in `[1, m)` with `a * x = 1 (mod m)`. Works for arbitrary
/// moduli `m >= 2`; the hidden-ring moduli are not prime in general.
pub fn mod_inverse(a: &Nat, m: &Nat) -> Result<Nat, Error> {
    if *m < Nat::from(2u8) {
        return Err(Error::InvalidParams("modulus must be >= 2".into()));
    }
    let a = a % m;
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return Err(Error::NotInvertible);
    }
    let m_signed = BigInt::from(m.clone());
    let mut x = e.x % &m_signed;
    if x.is_negative() {
        x += &m_signed;
    }
    Ok(x.to_biguint().expect("non-negative after adjustment"))
}

/// `(a * b) mod m`, full-width product before reduction.
pub fn mul_mod(a: &Nat, b: &Nat, m: &Nat) -> Nat {
    (a * b) % m
}

/// `(a + b) mod m`.
pub fn add_mod(a: &Nat, b: &Nat, m: &Nat) -> Nat {
    (a + b) % m
}

/// `(a - b) mod m` with wraparound; inputs need not be reduced.
pub fn sub_mod(a: &Nat, b: &Nat, m: &Nat) -> Nat {
    let a = a % m;
    let b = b % m;
    if a >= b {
        a - b
    } else {
        m - b + a
    }
}

/// Barrett table entry `floor(c * 2^K / s)` for `c < s`; result `< 2^K`.
pub fn barrett_precompute(c: &Nat, s: &Nat, k: usize) -> Nat {
    debug_assert!(c < s);
    (c << k) / s
}

/// Approximate quotient `floor(h * mu / 2^K)`: full product, then shift.
///
/// Against the true quotient `floor(h * c / s)` this is exact or one short,
/// never above.
pub fn barrett_quotient(h: &Nat, mu: &Nat, k: usize) -> Nat {
    (h * mu) >> k
}

/// Bit length of `n`; 0 for 0.
pub fn bit_length(n: &Nat) -> usize {
    n.bits() as usize
}

/// Deterministic Miller-Rabin over a fixed base set.
///
/// The bases are the first 30 primes, which is a proof for every 64-bit
/// candidate and leaves error below 4^-30 beyond that; the crate only
/// tests fixed published primes with it.
pub fn is_prime(n: &Nat) -> bool {
    const BASES: [u32; 30] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97, 101, 103, 107, 109, 113,
    ];
    let two = Nat::from(2u8);
    if *n < two {
        return false;
    }
    for b in BASES {
        let b = Nat::from(b);
        if b >= *n {
            continue;
        }
        if (n % &b).is_zero() {
            return *n == b;
        }
    }
    // n - 1 = d * 2^r with d odd
    let n_minus_1 = n - 1u8;
    let r = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> r;
    'base: for b in BASES {
        let b = Nat::from(b);
        if b >= *n {
            continue;
        }
        let mut x = b.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..r.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Little-endian encoding padded to exactly `width` bytes.
///
/// Returns `RangeViolation` if the value does not fit.
pub fn to_le_bytes_fixed(n: &Nat, width: usize) -> Result<Vec<u8>, Error> {
    let mut bytes = n.to_bytes_le();
    if bytes.len() > width {
        return Err(Error::RangeViolation);
    }
    bytes.resize(width, 0);
    Ok(bytes)
}

/// Little-endian decoding.
pub fn from_le_bytes(bytes: &[u8]) -> Nat {
    Nat::from_bytes_le(bytes)
}
