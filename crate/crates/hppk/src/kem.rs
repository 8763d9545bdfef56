//! HPPK key encapsulation.
//!
//! Key generation builds two linear polynomials `f`, `h` and a bivariate
//! noise polynomial over `F_p`, multiplies them into product-polynomial
//! coefficients, and hides those coefficients by modular multiplication
//! over one or two secret rings. Encapsulation evaluates the public
//! polynomials at a random secret `x` with random noise values; the integer
//! sums are never reduced, which is what lets the key holder pull the ring
//! reduction inside and cancel the noise.

use num_traits::{One, Zero};

use crate::bigmod::{self, Nat};
use crate::drbg::Drbg;
use crate::{Error, SecurityLevel};

/// Secret payload carried by one KEM exchange.
pub const SECRET_LEN: usize = 32;

/// Parameter record fixing the prime field, ring geometry, and segment
/// layout. Production sets come from [`KemParams::new`]; the toy
/// constructor exists for the cryptanalysis module and carries no level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KemParams {
    pub level: Option<SecurityLevel>,
    /// Prime bit size `|p|`.
    pub prime_bits: usize,
    pub p: Nat,
    /// x-degree of the noise polynomial (always 1 here).
    pub n: usize,
    /// Degree of `f` and `h` (always 1 here).
    pub lambda: usize,
    /// Noise-variable count.
    pub m: usize,
    /// 1 = one hidden ring (shared modulus), 2 = two hidden rings.
    pub rings: usize,
    /// Hidden-ring bit size `L`.
    pub ring_bits: usize,
    /// Bytes of secret carried per segment.
    pub seg_bytes: usize,
    pub num_segments: usize,
    /// Fixed width of one serialized ciphertext value.
    pub ct_value_bytes: usize,
}

fn level_prime(level: SecurityLevel) -> (usize, Nat) {
    // largest primes below the per-level bit sizes
    match level {
        SecurityLevel::I => (32, (Nat::one() << 32) - 5u8),
        SecurityLevel::III => (48, (Nat::one() << 48) - 59u8),
        SecurityLevel::V => (64, (Nat::one() << 64) - 59u8),
    }
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

impl KemParams {
    /// Production parameter set for a security level, noise count
    /// `m in {2, 3}`, and `rings in {1, 2}`.
    pub fn new(level: SecurityLevel, m: usize, rings: usize) -> Result<Self, Error> {
        if !(2..=3).contains(&m) {
            return Err(Error::InvalidParams(format!("KEM m must be 2 or 3, got {m}")));
        }
        let (prime_bits, p) = level_prime(level);
        Self::build(Some(level), prime_bits, p, m, rings, 2 * prime_bits + 8)
    }

    /// Toy parameter set for the attacks module: a small prime and an
    /// explicit ring size decoupled from the production `L = 2|p| + 8` rule.
    pub fn toy(p: u64, ring_bits: usize, m: usize, rings: usize) -> Result<Self, Error> {
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
        Self::build(None, prime_bits, p, m, rings, ring_bits)
    }

    fn build(
        level: Option<SecurityLevel>,
        prime_bits: usize,
        p: Nat,
        m: usize,
        rings: usize,
        ring_bits: usize,
    ) -> Result<Self, Error> {
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidParams(format!("m out of range: {m}")));
        }
        if !(1..=2).contains(&rings) {
            return Err(Error::InvalidParams(format!("rings must be 1 or 2, got {rings}")));
        }
        let (n, lambda) = (1usize, 1usize);
        let mut params = KemParams {
            level,
            prime_bits,
            p,
            n,
            lambda,
            m,
            rings,
            ring_bits,
            seg_bytes: 0,
            num_segments: 0,
            ct_value_bytes: 0,
        };
        params.finish_geometry();
        Ok(params)
    }

    fn finish_geometry(&mut self) {
        self.seg_bytes = self.prime_bits.div_ceil(8);
        self.num_segments = SECRET_LEN.div_ceil(self.seg_bytes);
        self.ct_value_bytes = (self.ring_bits
            + self.prime_bits + ceil_log2(self.coeff_rows() * self.m)).div_ceil(8);
    }

    /// Number of coefficient rows `n + lambda + 1`.
    pub fn coeff_rows(&self) -> usize {
        self.n + self.lambda + 1
    }

    pub fn is_toy(&self) -> bool {
        self.level.is_none()
    }
}

/// Coprime pair `(R, S)` with the cached inverse of `R`: the self-shared
/// symmetric key of the scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenRing {
    pub s: Nat,
    pub r: Nat,
    pub r_inv: Nat,
}

impl HiddenRing {
    /// Builds the ring from `(r, s)`, computing the inverse.
    pub fn from_parts(r: Nat, s: Nat) -> Result<Self, Error> {
        let r_inv = bigmod::mod_inverse(&r, &s)?;
        Ok(HiddenRing { s, r, r_inv })
    }

    /// Samples a fresh modulus of bit length exactly `l` plus a coprime
    /// multiplier.
    pub(crate) fn sample(g: &mut Drbg, l: usize) -> Self {
        let s = g.uniform_exact_bits(l);
        Self::sample_multiplier(g, s)
    }

    /// Samples a multiplier in `[1, s)` coprime to an existing modulus.
    pub(crate) fn sample_multiplier(g: &mut Drbg, s: Nat) -> Self {
        loop {
            let r = g.nonzero_below(&s);
            if bigmod::gcd(&r, &s).is_one() {
                return HiddenRing::from_parts(r, s).expect("coprime by construction");
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KemPrivateKey {
    pub f: [Nat; 2],
    pub h: [Nat; 2],
    pub ring1: HiddenRing,
    pub ring2: HiddenRing,
}

/// Coefficient matrices, row-major `coeff_rows x m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KemPublicKey {
    pub p_mat: Vec<Vec<Nat>>,
    pub q_mat: Vec<Vec<Nat>>,
}

/// Construction-time values retained only for tests and the toy attacks:
/// the noise-polynomial coefficients and the plaintext product coefficients.
#[derive(Debug, Clone)]
pub struct KemInternals {
    /// `c[i][j]` for `i in 0..=n`.
    pub c: Vec<Vec<Nat>>,
    /// `p_plain[i][j] = sum_s f_s c_(i-s)j mod p`.
    pub p_plain: Vec<Vec<Nat>>,
    pub q_plain: Vec<Vec<Nat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    /// Per-segment `(Pbar, Qbar)` integer sums.
    pub segments: Vec<(Nat, Nat)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedSecret(pub [u8; SECRET_LEN]);

/// Convolution `prod[i][j] = sum_s poly[s] * c[(i-s)][j] mod p` producing the
/// product-polynomial coefficient matrix.
pub(crate) fn convolve(poly: &[Nat], c: &[Vec<Nat>], rows: usize, m: usize, n: usize, p: &Nat) -> Vec<Vec<Nat>> {
    let lambda = poly.len() - 1;
    (0..rows)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Nat::zero();
                    let lo = i.saturating_sub(n);
                    for s in lo..=lambda.min(i) {
                        acc += &poly[s] * &c[i - s][j];
                    }
                    acc % p
                })
                .collect()
        })
        .collect()
}

/// Key generation with retained construction internals.
///
/// Sampling order is part of the KAT contract: `f0, f1, h0, h1` (resampled
/// together until `f1 h0 != f0 h1 mod p`), the `c` matrix row-major, ring 1,
/// then ring 2 (a second multiplier over the same modulus when `rings = 1`).
pub fn kem_keygen_detailed(
    params: &KemParams,
    g: &mut Drbg,
) -> (KemPrivateKey, KemPublicKey, KemInternals) {
    let p = &params.p;
    let (f, h) = loop {
        let f = [g.nonzero_below(p), g.nonzero_below(p)];
        let h = [g.nonzero_below(p), g.nonzero_below(p)];
        // non-proportionality: guarantees the decapsulation equation has a
        // unique root for every ratio k
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
    let ring2 = if params.rings == 2 {
        HiddenRing::sample(g, params.ring_bits)
    } else {
        HiddenRing::sample_multiplier(g, ring1.s.clone())
    };

    let encrypt = |plain: &Vec<Vec<Nat>>, ring: &HiddenRing| -> Vec<Vec<Nat>> {
        plain
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| bigmod::mul_mod(&ring.r, v, &ring.s))
                    .collect()
            })
            .collect()
    };
    let pk = KemPublicKey {
        p_mat: encrypt(&p_plain, &ring1),
        q_mat: encrypt(&q_plain, &ring2),
    };
    let sk = KemPrivateKey { f, h, ring1, ring2 };
    (sk, pk, KemInternals { c, p_plain, q_plain })
}

/// Key generation.
pub fn kem_keygen(params: &KemParams, g: &mut Drbg) -> (KemPrivateKey, KemPublicKey) {
    let (sk, pk, _) = kem_keygen_detailed(params, g);
    (sk, pk)
}

/// Evaluates `sum_i sum_j mat[i][j] * (u_j x^i mod p)` as an exact integer.
pub fn eval_matrix(mat: &[Vec<Nat>], x: &Nat, us: &[Nat], p: &Nat) -> Nat {
    let mut acc = Nat::zero();
    let mut x_pow = Nat::one();
    for row in mat {
        for (j, coeff) in row.iter().enumerate() {
            acc += coeff * &bigmod::mul_mod(&us[j], &x_pow, p);
        }
        x_pow = bigmod::mul_mod(&x_pow, x, p);
    }
    acc
}

/// One ciphertext segment from explicit `(x, u)` values. Exposed so tests
/// and the census attack can force degenerate inputs.
pub fn encapsulate_segment(pk: &KemPublicKey, x: &Nat, us: &[Nat], p: &Nat) -> (Nat, Nat) {
    (
        eval_matrix(&pk.p_mat, x, us, p),
        eval_matrix(&pk.q_mat, x, us, p),
    )
}

fn secret_from_segments(xs: &[Nat], params: &KemParams) -> SharedSecret {
    let mut bytes = Vec::with_capacity(params.num_segments * params.seg_bytes);
    for x in xs {
        bytes.extend_from_slice(
            &bigmod::to_le_bytes_fixed(x, params.seg_bytes).expect("x < p fits segment width"),
        );
    }
    bytes.truncate(SECRET_LEN);
    let mut out = [0u8; SECRET_LEN];
    out.copy_from_slice(&bytes[..SECRET_LEN]);
    SharedSecret(out)
}

/// Randomized encapsulation: per segment draws the secret slice `x_t` and the
/// noise vector, in that order. The shared secret is the first 32 bytes of
/// the little-endian concatenation of the `x_t`.
pub fn encapsulate(
    pk: &KemPublicKey,
    params: &KemParams,
    g: &mut Drbg,
) -> (Ciphertext, SharedSecret) {
    let mut segments = Vec::with_capacity(params.num_segments);
    let mut xs = Vec::with_capacity(params.num_segments);
    for _ in 0..params.num_segments {
        let x = g.uniform_below(&params.p);
        let us: Vec<Nat> = (0..params.m).map(|_| g.uniform_below(&params.p)).collect();
        segments.push(encapsulate_segment(pk, &x, &us, &params.p));
        xs.push(x);
    }
    (Ciphertext { segments }, secret_from_segments(&xs, params))
}

/// Noise-free ratio `k = f(x)/h(x) mod p` recovered from one segment.
///
/// Fails when the Q side decrypts to zero (`beta * h(x) = 0 mod p`).
pub fn segment_ratio(
    sk: &KemPrivateKey,
    params: &KemParams,
    pbar: &Nat,
    qbar: &Nat,
) -> Result<Nat, Error> {
    let p = &params.p;
    let a = bigmod::mul_mod(&sk.ring1.r_inv, pbar, &sk.ring1.s) % p;
    let b = bigmod::mul_mod(&sk.ring2.r_inv, qbar, &sk.ring2.s) % p;
    if b.is_zero() {
        return Err(Error::DecapsulationFailure);
    }
    let b_inv = bigmod::mod_inverse(&b, p).map_err(|_| Error::DecapsulationFailure)?;
    Ok(bigmod::mul_mod(&a, &b_inv, p))
}

fn solve_segment(sk: &KemPrivateKey, params: &KemParams, pbar: &Nat, qbar: &Nat) -> Result<Nat, Error> {
    let p = &params.p;
    let k = segment_ratio(sk, params, pbar, qbar)?;
    // linear root of f(x) - k h(x) = 0: x = (k h0 - f0) / (f1 - k h1)
    let denom = bigmod::sub_mod(&sk.f[1], &bigmod::mul_mod(&k, &sk.h[1], p), p);
    if denom.is_zero() {
        return Err(Error::DecapsulationFailure);
    }
    let denom_inv = bigmod::mod_inverse(&denom, p).map_err(|_| Error::DecapsulationFailure)?;
    let num = bigmod::sub_mod(&bigmod::mul_mod(&k, &sk.h[0], p), &sk.f[0], p);
    Ok(bigmod::mul_mod(&num, &denom_inv, p))
}

/// Decapsulation: per segment decrypt both sums into `F_p`, take the ratio,
/// solve the linear equation for `x_t`, and reassemble the secret exactly as
/// encapsulation does.
pub fn decapsulate(
    sk: &KemPrivateKey,
    params: &KemParams,
    ct: &Ciphertext,
) -> Result<SharedSecret, Error> {
    if ct.segments.len() != params.num_segments {
        return Err(Error::LengthMismatch {
            expected: params.num_segments,
            got: ct.segments.len(),
        });
    }
    let xs = ct
        .segments
        .iter()
        .map(|(pbar, qbar)| solve_segment(sk, params, pbar, qbar))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(secret_from_segments(&xs, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec;

    fn drbg(tag: u8) -> Drbg {
        Drbg::new(&[tag; 32]).unwrap()
    }

    #[test]
    fn params_geometry_matches_tables() {
        let p1 = KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        assert_eq!((p1.ring_bits, p1.num_segments, p1.ct_value_bytes), (72, 8, 14));
        let p3 = KemParams::new(SecurityLevel::III, 3, 2).unwrap();
        assert_eq!((p3.ring_bits, p3.num_segments, p3.ct_value_bytes), (104, 6, 20));
        let p5 = KemParams::new(SecurityLevel::V, 2, 2).unwrap();
        assert_eq!((p5.ring_bits, p5.num_segments, p5.ct_value_bytes), (136, 4, 26));
        assert!(KemParams::new(SecurityLevel::I, 4, 1).is_err());
        assert!(KemParams::new(SecurityLevel::I, 2, 3).is_err());
    }

    #[test]
    fn keygen_is_deterministic_and_sized() {
        let params = KemParams::new(SecurityLevel::I, 2, 2).unwrap();
        let (sk_a, pk_a) = kem_keygen(&params, &mut drbg(10));
        let (sk_b, pk_b) = kem_keygen(&params, &mut drbg(10));
        assert_eq!(sk_a, sk_b);
        assert_eq!(pk_a, pk_b);
        assert_eq!(codec::encode_kem_public_key(&pk_a, &params).unwrap().len(), 108);
        assert_eq!(pk_a.p_mat.len(), 3);
        assert_eq!(pk_a.p_mat[0].len(), 2);
    }

    #[test]
    fn public_key_decrypts_to_plain_convolution() {
        let params = KemParams::new(SecurityLevel::I, 2, 2).unwrap();
        let (sk, pk, internals) = kem_keygen_detailed(&params, &mut drbg(11));
        for i in 0..params.coeff_rows() {
            for j in 0..params.m {
                let dec = bigmod::mul_mod(&sk.ring1.r_inv, &pk.p_mat[i][j], &sk.ring1.s);
                assert!(dec < params.p);
                assert_eq!(dec, internals.p_plain[i][j]);
                let dec_q = bigmod::mul_mod(&sk.ring2.r_inv, &pk.q_mat[i][j], &sk.ring2.s);
                assert_eq!(dec_q, internals.q_plain[i][j]);
            }
        }
    }

    #[test]
    fn forced_zero_noise_gives_zero_ciphertext() {
        let params = KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let (_, pk) = kem_keygen(&params, &mut drbg(12));
        let us = vec![Nat::zero(), Nat::zero()];
        let (pbar, qbar) = encapsulate_segment(&pk, &Nat::from(5u8), &us, &params.p);
        assert!(pbar.is_zero() && qbar.is_zero());
    }

    #[test]
    fn forced_zero_x_uses_only_constant_row() {
        let params = KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let (_, pk) = kem_keygen(&params, &mut drbg(13));
        let us = vec![Nat::from(7u8), Nat::from(9u8)];
        let (pbar, _) = encapsulate_segment(&pk, &Nat::zero(), &us, &params.p);
        let expected = &pk.p_mat[0][0] * &us[0] + &pk.p_mat[0][1] * &us[1];
        assert_eq!(pbar, expected);
    }

    #[test]
    fn round_trip_all_configs() {
        for level in SecurityLevel::ALL {
            for m in [2, 3] {
                for rings in [1, 2] {
                    let params = KemParams::new(level, m, rings).unwrap();
                    let mut g = drbg(level.number() + m as u8 * 16 + rings as u8 * 64);
                    let (sk, pk) = kem_keygen(&params, &mut g);
                    for _ in 0..20 {
                        let (ct, ss) = encapsulate(&pk, &params, &mut g);
                        assert_eq!(decapsulate(&sk, &params, &ct).unwrap(), ss);
                    }
                }
            }
        }
    }

    #[test]
    fn decrypted_sum_matches_beta_times_f() {
        // Eq-level identity: the decrypted P side equals beta(x,u) f(x) mod p,
        // and the plaintext integer sum stays under S1.
        let params = KemParams::new(SecurityLevel::V, 3, 2).unwrap();
        let mut g = drbg(14);
        let (sk, pk, internals) = kem_keygen_detailed(&params, &mut g);
        let p = &params.p;
        for _ in 0..50 {
            let x = g.uniform_below(p);
            let us: Vec<Nat> = (0..params.m).map(|_| g.uniform_below(p)).collect();
            let (pbar, qbar) = encapsulate_segment(&pk, &x, &us, p);

            let plain_sum = eval_matrix(&internals.p_plain, &x, &us, p);
            assert!(plain_sum < sk.ring1.s, "homomorphic precondition violated");

            let a = bigmod::mul_mod(&sk.ring1.r_inv, &pbar, &sk.ring1.s) % p;
            let beta = eval_matrix(&internals.c, &x, &us, p) % p;
            let fx = bigmod::add_mod(&sk.f[0], &bigmod::mul_mod(&sk.f[1], &x, p), p);
            assert_eq!(a, bigmod::mul_mod(&beta, &fx, p));

            let b = bigmod::mul_mod(&sk.ring2.r_inv, &qbar, &sk.ring2.s) % p;
            let hx = bigmod::add_mod(&sk.h[0], &bigmod::mul_mod(&sk.h[1], &x, p), p);
            assert_eq!(b, bigmod::mul_mod(&beta, &hx, p));
        }
    }

    #[test]
    fn ratio_is_noise_invariant_and_root_unique() {
        let params = KemParams::new(SecurityLevel::I, 2, 2).unwrap();
        let mut g = drbg(15);
        let (sk, pk) = kem_keygen(&params, &mut g);
        let p = &params.p;
        let x = g.uniform_below(p);
        let mut first_k = None;
        for _ in 0..20 {
            let us: Vec<Nat> = (0..params.m).map(|_| g.nonzero_below(p)).collect();
            let (pbar, qbar) = encapsulate_segment(&pk, &x, &us, p);
            let k = segment_ratio(&sk, &params, &pbar, &qbar).unwrap();
            match &first_k {
                None => first_k = Some(k.clone()),
                Some(k0) => assert_eq!(&k, k0),
            }
            // f1 - k h1 = (f1 h0 - f0 h1) / h(x): nonzero whenever h(x) is
            let hx = bigmod::add_mod(&sk.h[0], &bigmod::mul_mod(&sk.h[1], &x, p), p);
            let denom = bigmod::sub_mod(&sk.f[1], &bigmod::mul_mod(&k, &sk.h[1], p), p);
            let lhs = bigmod::mul_mod(&denom, &hx, p);
            let rhs = bigmod::sub_mod(
                &bigmod::mul_mod(&sk.f[1], &sk.h[0], p),
                &bigmod::mul_mod(&sk.f[0], &sk.h[1], p),
                p,
            );
            assert_eq!(lhs, rhs);
            assert!(!denom.is_zero());
        }
    }

    #[test]
    fn tampered_ciphertext_never_panics() {
        let params = KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let mut g = drbg(16);
        let (sk, pk) = kem_keygen(&params, &mut g);
        let (mut ct, ss) = encapsulate(&pk, &params, &mut g);
        ct.segments[0].1 = Nat::zero();
        match decapsulate(&sk, &params, &ct) {
            Err(Error::DecapsulationFailure) => {}
            Ok(wrong) => assert_ne!(wrong, ss),
            Err(e) => panic!("unexpected error: {e}"),
        }
        ct.segments.pop();
        assert!(matches!(
            decapsulate(&sk, &params, &ct),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn single_ring_shares_modulus() {
        let params = KemParams::new(SecurityLevel::III, 2, 1).unwrap();
        let (sk, _) = kem_keygen(&params, &mut drbg(17));
        assert_eq!(sk.ring1.s, sk.ring2.s);
        assert_ne!(sk.ring1.r, sk.ring2.r);
    }
}
