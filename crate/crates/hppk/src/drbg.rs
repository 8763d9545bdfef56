//! Deterministic seeded byte generator.
//!
//! Output stream is `SHA-256(seed || LE64(i))` for block index `i = 0, 1, ...`
//! concatenated. Identical seeds give identical streams on every platform,
//! which is what makes key generation and the KAT files reproducible
//! bit-for-bit.

use sha2::{Digest, Sha256};

use crate::bigmod::Nat;
use crate::Error;
use num_traits::{One, Zero};

pub const SEED_LEN: usize = 32;

/// Counter-mode SHA-256 byte stream. Single-owner: not for concurrent use.
#[derive(Debug, Clone)]
pub struct Drbg {
    seed: [u8; SEED_LEN],
    counter: u64,
    buffer: [u8; 32],
    pos: usize,
    consumed: u64,
}

impl Drbg {
    /// Creates a generator from an exactly-32-byte seed.
    pub fn new(seed: &[u8]) -> Result<Self, Error> {
        let seed: [u8; SEED_LEN] = seed
            .try_into()
            .map_err(|_| Error::SeedLength(seed.len()))?;
        Ok(Drbg {
            seed,
            counter: 0,
            buffer: [0u8; 32],
            pos: 32,
            consumed: 0,
        })
    }

    /// Parses a 64-hex-character seed as used on the CLI.
    pub fn from_hex(s: &str) -> Result<Self, Error> {
        let bytes = hex::decode(s).map_err(|_| Error::SeedLength(0))?;
        Drbg::new(&bytes)
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(self.seed);
        h.update(self.counter.to_le_bytes());
        self.buffer = h.finalize().into();
        self.counter += 1;
        self.pos = 0;
    }

    /// Fills `out` with the next stream bytes.
    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out.iter_mut() {
            if self.pos == 32 {
                self.refill();
            }
            *b = self.buffer[self.pos];
            self.pos += 1;
        }
        self.consumed += out.len() as u64;
    }

    /// Next `n` stream bytes.
    pub fn bytes(&mut self, n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n];
        self.fill(&mut out);
        out
    }

    /// Total stream bytes handed out so far (used by tests to pin the
    /// byte-consumption contract).
    pub fn bytes_consumed(&self) -> u64 {
        self.consumed
    }

    /// Uniform value in `[0, bound)` by rejection sampling.
    ///
    /// Each attempt draws `byte-length(bound - 1)` bytes, interprets them
    /// little-endian and retries while the value is out of range, so the
    /// result is unbiased.
    pub fn uniform_below(&mut self, bound: &Nat) -> Nat {
        assert!(!bound.is_zero(), "bound must be >= 1");
        let max = bound - 1u8;
        let width = (max.bits() as usize).div_ceil(8);
        if width == 0 {
            return Nat::zero();
        }
        let mut buf = vec![0u8; width];
        loop {
            self.fill(&mut buf);
            let v = Nat::from_bytes_le(&buf);
            if v < *bound {
                return v;
            }
        }
    }

    /// Uniform value in `[1, bound)`.
    pub fn nonzero_below(&mut self, bound: &Nat) -> Nat {
        self.uniform_below(&(bound - 1u8)) + 1u8
    }

    /// Uniform value of bit length exactly `l`: draw `ceil(l/8)` bytes
    /// little-endian, clear bits at or above `l`, force bit `l - 1`.
    pub fn uniform_exact_bits(&mut self, l: usize) -> Nat {
        assert!(l >= 2, "bit length must be >= 2");
        let width = l.div_ceil(8);
        let buf = self.bytes(width);
        let mask = (Nat::one() << l) - 1u8;
        (Nat::from_bytes_le(&buf) & mask) | (Nat::one() << (l - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_length_enforced() {
        assert_eq!(Drbg::new(&[0u8; 31]).unwrap_err(), Error::SeedLength(31));
        assert_eq!(Drbg::new(&[0u8; 33]).unwrap_err(), Error::SeedLength(33));
        assert!(Drbg::new(&[0u8; 32]).is_ok());
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let mut a = Drbg::new(&[9u8; 32]).unwrap();
        let mut b = Drbg::new(&[9u8; 32]).unwrap();
        assert_eq!(a.bytes(10_000), b.bytes(10_000));
    }

    #[test]
    fn one_bit_seed_difference_diverges() {
        let mut seed = [5u8; 32];
        let mut a = Drbg::new(&seed).unwrap();
        seed[0] ^= 1;
        let mut b = Drbg::new(&seed).unwrap();
        assert_ne!(a.bytes(32), b.bytes(32));
    }

    #[test]
    fn uniform_below_one_is_zero_and_free() {
        let mut g = Drbg::new(&[1u8; 32]).unwrap();
        for _ in 0..10 {
            assert!(g.uniform_below(&Nat::one()).is_zero());
        }
        assert_eq!(g.bytes_consumed(), 0);
    }

    #[test]
    fn uniform_below_256_consumes_one_byte_per_draw() {
        let mut g = Drbg::new(&[2u8; 32]).unwrap();
        for i in 1..=100u64 {
            let v = g.uniform_below(&Nat::from(256u16));
            assert!(v < Nat::from(256u16));
            assert_eq!(g.bytes_consumed(), i);
        }
    }

    #[test]
    fn uniform_below_is_unbiased_on_die() {
        let mut g = Drbg::new(&[4u8; 32]).unwrap();
        let n = 100_000u64;
        let mut counts = [0u64; 6];
        let six = Nat::from(6u8);
        for _ in 0..n {
            let v: u64 = g.uniform_below(&six).try_into().unwrap();
            counts[v as usize] += 1;
        }
        // 5 sigma band around n/6 for a Bernoulli(1/6) count
        let mean = n as f64 / 6.0;
        let sigma = (n as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for (face, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - mean).abs();
            assert!(dev < 5.0 * sigma, "face {face} count {c} outside 5 sigma");
        }
    }

    #[test]
    fn exact_bits_range() {
        let mut g = Drbg::new(&[6u8; 32]).unwrap();
        for _ in 0..1000 {
            let v = g.uniform_exact_bits(2);
            assert!(v == Nat::from(2u8) || v == Nat::from(3u8));
        }
        let lo = Nat::one() << 71;
        let hi = Nat::one() << 72;
        for _ in 0..10_000 {
            let v = g.uniform_exact_bits(72);
            assert!(v >= lo && v < hi);
            assert_eq!(v.bits(), 72);
        }
    }
}
