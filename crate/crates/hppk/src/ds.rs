//! HPPK digital signatures.
//!
//! Key generation reuses the KEM construction with larger rings, then
//! publishes a Barrett-transformed public key so verifiers can evaluate the
//! cross-multiplied verification identity without ever learning the ring
//! moduli. Signing evaluates `f` and `h` at the hashed message and decrypts
//! the values into the opposite rings; verification reconstructs both sides
//! of the identity from the transformed key.

use num_traits::{One, Zero};
use sha2::{Digest, Sha256, Sha384, Sha512};

use crate::bigmod::{self, Nat};
use crate::drbg::Drbg;
use crate::kem::HiddenRing;
use crate::{Error, SecurityLevel};

/// Message hashes are always split into four segments.
pub const SEG_COUNT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashAlg {
    Sha256,
    Sha384,
    Sha512,
}

impl HashAlg {
    pub fn digest(self, msg: &[u8]) -> Vec<u8> {
        match self {
            HashAlg::Sha256 => Sha256::digest(msg).to_vec(),
            HashAlg::Sha384 => Sha384::digest(msg).to_vec(),
            HashAlg::Sha512 => Sha512::digest(msg).to_vec(),
        }
    }

    pub fn output_bytes(self) -> usize {
        match self {
            HashAlg::Sha256 => 32,
            HashAlg::Sha384 => 48,
            HashAlg::Sha512 => 64,
        }
    }
}

/// Parameter record for the signature scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsParams {
    pub level: Option<SecurityLevel>,
    pub prime_bits: usize,
    pub p: Nat,
    pub n: usize,
    pub lambda: usize,
    pub m: usize,
    /// Hidden-ring bit size `L`.
    pub ring_bits: usize,
    /// Barrett shift `K`; the scale is `R = 2^K`.
    pub barrett_bits: usize,
    pub hash: HashAlg,
    /// Bytes of digest per hash segment.
    pub seg_bytes: usize,
}

fn level_prime(level: SecurityLevel) -> (usize, Nat) {
    match level {
        SecurityLevel::I => (64, (Nat::one() << 64) - 59u8),
        SecurityLevel::III => (96, (Nat::one() << 96) - 17u8),
        SecurityLevel::V => (128, (Nat::one() << 128) - 159u8),
    }
}

impl DsParams {
    /// Production parameter set. `barrett_extra` is the margin `K - L` and
    /// must be 32 or 64 (default elsewhere: 64).
    pub fn new(level: SecurityLevel, m: usize, barrett_extra: usize) -> Result<Self, Error> {
        if !(1..=2).contains(&m) {
            return Err(Error::InvalidParams(format!("DS m must be 1 or 2, got {m}")));
        }
        if barrett_extra != 32 && barrett_extra != 64 {
            return Err(Error::InvalidParams(format!(
                "Barrett margin must be 32 or 64 bits, got {barrett_extra}"
            )));
        }
        let (prime_bits, p) = level_prime(level);
        let ring_bits = 2 * prime_bits + 16;
        let hash = match level {
            SecurityLevel::I => HashAlg::Sha256,
            SecurityLevel::III => HashAlg::Sha384,
            SecurityLevel::V => HashAlg::Sha512,
        };
        Ok(DsParams {
            level: Some(level),
            prime_bits,
            p,
            n: 1,
            lambda: 1,
            m,
            ring_bits,
            barrett_bits: ring_bits + barrett_extra,
            hash,
            seg_bytes: hash.output_bytes() / SEG_COUNT,
        })
    }

    /// Arbitrary Barrett margin for experiments; same sizes otherwise.
    pub fn with_barrett_bits(mut self, barrett_bits: usize) -> Self {
        self.barrett_bits = barrett_bits;
        self
    }

    /// Toy parameter set for the attacks module.
    pub fn toy(p: u64, ring_bits: usize, barrett_bits: usize, m: usize) -> Result<Self, Error> {
        let p = Nat::from(p);
        if !bigmod::is_prime(&p) {
            return Err(Error::InvalidParams("toy p must be prime".into()));
        }
        let prime_bits = bigmod::bit_length(&p);
        if !(3..=10).contains(&prime_bits) {
            return Err(Error::InvalidParams("toy prime must be 3..=10 bits".into()));
        }
        if !(10..=22).contains(&ring_bits) {
            return Err(Error::InvalidParams("toy L must be 10..=22 bits".into()));
        }
        if barrett_bits <= ring_bits || barrett_bits > ring_bits + 64 {
            return Err(Error::InvalidParams("toy K must be in (L, L+64]".into()));
        }
        Ok(DsParams {
            level: None,
            prime_bits,
            p,
            n: 1,
            lambda: 1,
            m,
            ring_bits,
            barrett_bits,
            hash: HashAlg::Sha256,
            seg_bytes: HashAlg::Sha256.output_bytes() / SEG_COUNT,
        })
    }

    pub fn coeff_rows(&self) -> usize {
        self.n + self.lambda + 1
    }

    pub fn is_toy(&self) -> bool {
        self.level.is_none()
    }
}

/// Same shape as the KEM private key; the rings are two bytes wider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsPrivateKey {
    pub f: [Nat; 2],
    pub h: [Nat; 2],
    pub ring1: HiddenRing,
    pub ring2: HiddenRing,
}

/// Barrett-transformed verification key. Matrices are row-major
/// `coeff_rows x m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsPublicKey {
    /// `beta * P_ij mod p`.
    pub pprime: Vec<Vec<Nat>>,
    /// `beta * Q_ij mod p`.
    pub qprime: Vec<Vec<Nat>>,
    /// `floor(2^K * P_ij / S1)`.
    pub mu: Vec<Vec<Nat>>,
    /// `floor(2^K * Q_ij / S2)`.
    pub nu: Vec<Vec<Nat>>,
    /// `beta * S1 mod p`.
    pub s1: Nat,
    /// `beta * S2 mod p`.
    pub s2: Nat,
}

/// Construction-time values retained only for tests and the toy attacks.
#[derive(Debug, Clone)]
pub struct DsInternals {
    pub c: Vec<Vec<Nat>>,
    pub p_plain: Vec<Vec<Nat>>,
    pub q_plain: Vec<Vec<Nat>>,
    /// Ring-encrypted coefficients `P_ij = R1 p_ij mod S1`.
    pub p_enc: Vec<Vec<Nat>>,
    pub q_enc: Vec<Vec<Nat>>,
    pub beta: Nat,
}

/// Four `(F, H)` pairs, one per hash segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsSignature {
    pub segments: Vec<(Nat, Nat)>,
}

use crate::kem::convolve;

/// Key generation with retained internals. Sampling order mirrors the KEM:
/// `f`/`h` with the non-proportionality resample loop, `c`, ring 1, ring 2,
/// then the masking scalar `beta`.
pub fn ds_keygen_detailed(params: &DsParams, g: &mut Drbg) -> (DsPrivateKey, DsPublicKey, DsInternals) {
    let p = &params.p;
    let (f, h) = loop {
        let f = [g.nonzero_below(p), g.nonzero_below(p)];
        let h = [g.nonzero_below(p), g.nonzero_below(p)];
        if bigmod::mul_mod(&f[1], &h[0], p) != bigmod::mul_mod(&f[0], &h[1], p) {
            break (f, h);
        }
    };
    let c: Vec<Vec<Nat>> = (0..=params.n)
        .map(|_| (0..params.m).map(|_| g.nonzero_below(p)).collect())
        .collect();
    let rows = params.coeff_rows();
    let p_plain = convolve(&f, &c, rows, params.m, params.n, p);
    let q_plain = convolve(&h, &c, rows, params.m, params.n, p);

    let ring1 = HiddenRing::sample(g, params.ring_bits);
    let ring2 = HiddenRing::sample(g, params.ring_bits);
    let beta = g.nonzero_below(p);

    let k = params.barrett_bits;
    let transform = |plain: &Vec<Vec<Nat>>, ring: &HiddenRing| {
        let enc: Vec<Vec<Nat>> = plain
            .iter()
            .map(|row| row.iter().map(|v| bigmod::mul_mod(&ring.r, v, &ring.s)).collect())
            .collect();
        let masked: Vec<Vec<Nat>> = enc
            .iter()
            .map(|row| row.iter().map(|v| bigmod::mul_mod(&beta, v, p)).collect())
            .collect();
        let table: Vec<Vec<Nat>> = enc
            .iter()
            .map(|row| row.iter().map(|v| bigmod::barrett_precompute(v, &ring.s, k)).collect())
            .collect();
        (enc, masked, table)
    };
    let (p_enc, pprime, mu) = transform(&p_plain, &ring1);
    let (q_enc, qprime, nu) = transform(&q_plain, &ring2);

    let pk = DsPublicKey {
        pprime,
        qprime,
        mu,
        nu,
        s1: bigmod::mul_mod(&beta, &ring1.s, p),
        s2: bigmod::mul_mod(&beta, &ring2.s, p),
    };
    let sk = DsPrivateKey { f, h, ring1, ring2 };
    let internals = DsInternals {
        c,
        p_plain,
        q_plain,
        p_enc,
        q_enc,
        beta,
    };
    (sk, pk, internals)
}

/// Key generation.
pub fn ds_keygen(params: &DsParams, g: &mut Drbg) -> (DsPrivateKey, DsPublicKey) {
    let (sk, pk, _) = ds_keygen_detailed(params, g);
    (sk, pk)
}

/// Hashes the message and splits the digest into four field elements: each
/// chunk is read little-endian and reduced mod p.
pub fn hash_to_segments(msg: &[u8], params: &DsParams) -> Vec<Nat> {
    let digest = params.hash.digest(msg);
    digest
        .chunks(params.seg_bytes)
        .take(SEG_COUNT)
        .map(|chunk| Nat::from_bytes_le(chunk) % &params.p)
        .collect()
}

/// Deterministic signing: per segment evaluate `f` and `h` at `x_t` over
/// `F_p`, then decrypt into the opposite rings.
pub fn sign(sk: &DsPrivateKey, params: &DsParams, msg: &[u8]) -> DsSignature {
    let p = &params.p;
    let segments = hash_to_segments(msg, params)
        .iter()
        .map(|x| {
            let fx = bigmod::add_mod(&sk.f[0], &bigmod::mul_mod(&sk.f[1], x, p), p);
            let hx = bigmod::add_mod(&sk.h[0], &bigmod::mul_mod(&sk.h[1], x, p), p);
            let f_elt = bigmod::mul_mod(&fx, &sk.ring2.r_inv, &sk.ring2.s);
            let h_elt = bigmod::mul_mod(&hx, &sk.ring1.r_inv, &sk.ring1.s);
            (f_elt, h_elt)
        })
        .collect();
    DsSignature { segments }
}

/// Verification per Barrett-transformed identity.
///
/// Rejects (as an error) signatures whose components exceed their declared
/// bit bound; an in-bounds mismatch is an ordinary `Ok(false)`.
pub fn verify(
    pk: &DsPublicKey,
    params: &DsParams,
    msg: &[u8],
    sig: &DsSignature,
) -> Result<bool, Error> {
    if sig.segments.len() != SEG_COUNT {
        return Err(Error::MalformedSignature);
    }
    let bound = Nat::one() << params.ring_bits;
    for (f_elt, h_elt) in &sig.segments {
        if *f_elt >= bound || *h_elt >= bound {
            return Err(Error::MalformedSignature);
        }
    }
    let p = &params.p;
    let k = params.barrett_bits;
    let rows = params.coeff_rows();
    for (x, (f_elt, h_elt)) in hash_to_segments(msg, params).iter().zip(&sig.segments) {
        for j in 0..params.m {
            let mut lhs = Nat::zero();
            let mut rhs = Nat::zero();
            let mut x_pow = Nat::one();
            for i in 0..rows {
                let u = bigmod::sub_mod(
                    &(h_elt * &pk.pprime[i][j]),
                    &(&pk.s1 * bigmod::barrett_quotient(h_elt, &pk.mu[i][j], k)),
                    p,
                );
                let v = bigmod::sub_mod(
                    &(f_elt * &pk.qprime[i][j]),
                    &(&pk.s2 * bigmod::barrett_quotient(f_elt, &pk.nu[i][j], k)),
                    p,
                );
                lhs = bigmod::add_mod(&lhs, &bigmod::mul_mod(&u, &x_pow, p), p);
                rhs = bigmod::add_mod(&rhs, &bigmod::mul_mod(&v, &x_pow, p), p);
                x_pow = bigmod::mul_mod(&x_pow, x, p);
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec;

    fn drbg(tag: u8) -> Drbg {
        Drbg::new(&[tag; 32]).unwrap()
    }

    #[test]
    fn params_match_table_geometry() {
        let d1 = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        assert_eq!((d1.ring_bits, d1.barrett_bits, d1.seg_bytes), (144, 208, 8));
        let d3 = DsParams::new(SecurityLevel::III, 1, 64).unwrap();
        assert_eq!((d3.ring_bits, d3.barrett_bits, d3.hash), (208, 272, HashAlg::Sha384));
        let d5 = DsParams::new(SecurityLevel::V, 2, 32).unwrap();
        assert_eq!((d5.ring_bits, d5.barrett_bits, d5.seg_bytes), (272, 304, 16));
        assert!(DsParams::new(SecurityLevel::I, 3, 64).is_err());
        assert!(DsParams::new(SecurityLevel::I, 1, 48).is_err());
    }

    #[test]
    fn keygen_sizes_and_mu_bound() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let (_, pk) = ds_keygen(&params, &mut drbg(20));
        assert_eq!(codec::encode_ds_public_key(&pk, &params).unwrap().len(), 220);
        let bound = Nat::one() << params.barrett_bits;
        for row in pk.mu.iter().chain(pk.nu.iter()) {
            for v in row {
                assert!(*v < bound);
            }
        }
    }

    #[test]
    fn barrett_table_recovers_encrypted_coefficients() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let (sk, pk, internals) = ds_keygen_detailed(&params, &mut drbg(21));
        let k = params.barrett_bits;
        for i in 0..params.coeff_rows() {
            for j in 0..params.m {
                let prod = &sk.ring1.s * &pk.mu[i][j];
                let recovered = (&prod + (Nat::one() << k) - 1u8) >> k; // ceil
                assert_eq!(recovered, internals.p_enc[i][j]);
            }
        }
    }

    #[test]
    fn empty_message_segments_match_published_digest() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        // SHA-256 of the empty string, as published
        let digest =
            hex::decode("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")
                .unwrap();
        let expected: Vec<Nat> = digest
            .chunks(8)
            .map(|c| Nat::from_bytes_le(c) % &params.p)
            .collect();
        assert_eq!(hash_to_segments(b"", &params), expected);
    }

    #[test]
    fn segments_have_avalanche() {
        let params = DsParams::new(SecurityLevel::V, 1, 64).unwrap();
        assert_eq!(params.hash, HashAlg::Sha512);
        let mut g = drbg(22);
        for _ in 0..200 {
            let mut msg = g.bytes(40);
            let a = hash_to_segments(&msg, &params);
            let byte = (g.bytes(1)[0] as usize) % msg.len();
            let bit = g.bytes(1)[0] % 8;
            msg[byte] ^= 1 << bit;
            let b = hash_to_segments(&msg, &params);
            assert_ne!(a, b);
        }
    }

    #[test]
    fn sign_verify_round_trip() {
        for level in SecurityLevel::ALL {
            let params = DsParams::new(level, 1, 64).unwrap();
            let mut g = drbg(23 + level.number());
            let (sk, pk) = ds_keygen(&params, &mut g);
            for _ in 0..20 {
                let msg = g.bytes(64);
                let sig = sign(&sk, &params, &msg);
                assert_eq!(codec::encode_ds_signature(&sig, &params).unwrap().len(),
                    match level {
                        SecurityLevel::I => 144,
                        SecurityLevel::III => 208,
                        SecurityLevel::V => 272,
                    });
                assert!(verify(&pk, &params, &msg, &sig).unwrap());
                // deterministic
                assert_eq!(sign(&sk, &params, &msg), sig);
            }
        }
    }

    #[test]
    fn signature_elements_invert_correctly() {
        let params = DsParams::new(SecurityLevel::III, 1, 64).unwrap();
        let mut g = drbg(30);
        let (sk, _) = ds_keygen(&params, &mut g);
        let msg = b"ring inversion check";
        let sig = sign(&sk, &params, msg);
        let p = &params.p;
        for (x, (f_elt, h_elt)) in hash_to_segments(msg, &params).iter().zip(&sig.segments) {
            let fx = bigmod::add_mod(&sk.f[0], &bigmod::mul_mod(&sk.f[1], x, p), p);
            assert_eq!(bigmod::mul_mod(f_elt, &sk.ring2.r, &sk.ring2.s), fx);
            let hx = bigmod::add_mod(&sk.h[0], &bigmod::mul_mod(&sk.h[1], x, p), p);
            assert_eq!(bigmod::mul_mod(h_elt, &sk.ring1.r, &sk.ring1.s), hx);
        }
    }

    #[test]
    fn flipped_message_and_signature_reject() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let mut g = drbg(31);
        let (sk, pk) = ds_keygen(&params, &mut g);
        for _ in 0..30 {
            let msg = g.bytes(48);
            let sig = sign(&sk, &params, &msg);
            let mut tampered = msg.clone();
            let byte = (g.bytes(1)[0] as usize) % tampered.len();
            tampered[byte] ^= 1 << (g.bytes(1)[0] % 8);
            assert!(!verify(&pk, &params, &tampered, &sig).unwrap());

            let mut bytes = codec::encode_ds_signature(&sig, &params).unwrap();
            let pos = (g.bytes(1)[0] as usize) % bytes.len();
            bytes[pos] ^= 0xff;
            if bytes[pos] == 0 {
                bytes[pos] = 1;
            }
            let mangled = codec::decode_ds_signature(&bytes, &params).unwrap();
            assert!(!verify(&pk, &params, &msg, &mangled).unwrap());
        }
    }

    #[test]
    fn swapped_pairing_fails() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let mut g = drbg(32);
        let (sk, pk) = ds_keygen(&params, &mut g);
        let msg = b"cross-pairing is load-bearing";
        let sig = sign(&sk, &params, msg);
        let swapped = DsSignature {
            segments: sig.segments.iter().map(|(f, h)| (h.clone(), f.clone())).collect(),
        };
        assert!(!verify(&pk, &params, msg, &swapped).unwrap());
    }

    #[test]
    fn oversized_component_is_malformed() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let mut g = drbg(33);
        let (sk, pk) = ds_keygen(&params, &mut g);
        let msg = b"bound check";
        let mut sig = sign(&sk, &params, msg);
        sig.segments[0].0 = Nat::one() << params.ring_bits;
        assert_eq!(verify(&pk, &params, msg, &sig), Err(Error::MalformedSignature));
        sig.segments.truncate(3);
        assert_eq!(verify(&pk, &params, msg, &sig), Err(Error::MalformedSignature));
    }
}
