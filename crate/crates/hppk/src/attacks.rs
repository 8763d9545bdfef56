//! Desk-scale implementations of the key- and secret-recovery attacks at toy
//! parameters, used to validate the claimed complexity bounds empirically.
//!
//! Every entry point refuses production parameter sets: the searches are
//! exponential in the ring size and only make sense for toy rings built via
//! [`KemParams::toy`] / [`DsParams::toy`]. All arithmetic runs in `u128`,
//! which comfortably holds every toy-range intermediate.

use num_traits::ToPrimitive;

use crate::ds::DsParams;
use crate::kem::{KemParams, KemPublicKey};
use crate::Error;

/// Largest toy `L` for the quadratic coprime-pair search (`~2^(2L-1)` pairs).
const MAX_KEM_RING_BITS: usize = 13;
/// Largest toy `L` for the linear modulus scan.
const MAX_DS_RING_BITS: usize = 22;
/// Largest toy prime for the exhaustive `(x, u)` census.
const MAX_CENSUS_P: u128 = 64;

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse_u128(a: u128, m: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let m = m as i128;
    Some(((old_s % m + m) % m) as u128)
}

fn nat_to_u128(v: &crate::bigmod::Nat) -> Result<u128, Error> {
    v.to_u128()
        .ok_or_else(|| Error::InvalidParams("value exceeds u128 range".into()))
}

fn flatten(mat: &[Vec<crate::bigmod::Nat>]) -> Result<Vec<u128>, Error> {
    mat.iter().flatten().map(nat_to_u128).collect()
}

/// Result of the KEM coprime-pair search.
#[derive(Debug, Clone)]
pub struct KemRingRecovery {
    /// All `(R, S)` pairs under which every public coefficient decrypts into
    /// the prime field. The true ring is among them; at toy sizes it is
    /// rarely alone.
    pub candidates: Vec<(u128, u128)>,
    /// Coprime pairs actually run through the decryption filter.
    pub pairs_tried: u64,
    /// All `(R, S)` pairs enumerated, coprime or not.
    pub pairs_enumerated: u64,
}

/// Brute-force search for the first hidden ring of a KEM public key.
///
/// Enumerates `S` over `[2^(L-1), 2^L)` and `R` over `[1, S)`, keeps the
/// coprime pairs, and accepts a pair when `R^-1 * P_ij mod S < p` for every
/// coefficient.
pub fn kem_ring_recovery(
    pk: &KemPublicKey,
    params: &KemParams,
) -> Result<KemRingRecovery, Error> {
    if !params.is_toy() || params.ring_bits > MAX_KEM_RING_BITS {
        return Err(Error::ToyOnly);
    }
    let p = nat_to_u128(&params.p)?;
    let coeffs = flatten(&pk.p_mat)?;
    let l = params.ring_bits;
    let mut out = KemRingRecovery {
        candidates: Vec::new(),
        pairs_tried: 0,
        pairs_enumerated: 0,
    };
    for s in 1u128 << (l - 1)..1u128 << l {
        for r in 1..s {
            out.pairs_enumerated += 1;
            if gcd_u128(r, s) != 1 {
                continue;
            }
            out.pairs_tried += 1;
            let r_inv = mod_inverse_u128(r, s).expect("coprime");
            if coeffs.iter().all(|c| (r_inv * (c % s)) % s < p) {
                out.candidates.push((r, s));
            }
        }
    }
    Ok(out)
}

/// Result of the DS modulus scan.
#[derive(Debug, Clone)]
pub struct DsRingRecovery {
    pub s: u128,
    /// Encrypted coefficients `P_ij` recovered alongside the modulus,
    /// flattened row-major.
    pub coefficients: Vec<u128>,
    pub iterations: u64,
}

/// Linear scan for `S1` using the published Barrett table.
///
/// For each candidate `S` computes `P_ij = ceil(S * mu_ij / 2^K)` and accepts
/// the first `S` whose recomputed table matches the public one. The same
/// procedure applies verbatim to the `nu`/`S2` side.
pub fn ds_ring_recovery(
    mu: &[Vec<crate::bigmod::Nat>],
    params: &DsParams,
) -> Result<DsRingRecovery, Error> {
    if !params.is_toy() || params.ring_bits > MAX_DS_RING_BITS {
        return Err(Error::ToyOnly);
    }
    let k = params.barrett_bits;
    let table = flatten(mu)?;
    let range = 1u128 << (params.ring_bits - 1)..1u128 << params.ring_bits;
    for (idx, s) in range.enumerate() {
        let hit = table.iter().all(|&mu_ij| {
            let p_ij = (s * mu_ij + (1u128 << k) - 1) >> k; // ceil
            (p_ij << k) / s == mu_ij
        });
        if hit {
            let coefficients = table
                .iter()
                .map(|&mu_ij| (s * mu_ij + (1u128 << k) - 1) >> k)
                .collect();
            return Ok(DsRingRecovery {
                s,
                coefficients,
                iterations: idx as u64 + 1,
            });
        }
    }
    Err(Error::NotFound)
}

/// Result of the exhaustive ciphertext census.
#[derive(Debug, Clone)]
pub struct CensusResult {
    /// Number of `(x, u_1..u_m)` tuples reproducing the segment as exact
    /// integers. This is what an eavesdropper holding the raw ciphertext can
    /// check; the unreduced sums carry far more information than the field
    /// equations, so this count is usually 1.
    pub consistent_exact: u64,
    /// Number of tuples reproducing the segment modulo `p` only — the
    /// residual ambiguity after decryption into the field, which grows as
    /// `p^(m-1)`.
    pub consistent_mod_p: u64,
    pub tuples_enumerated: u64,
}

/// Enumerates all `(x, u_1..u_m)` in `F_p^(m+1)` and counts the tuples whose
/// integer evaluations reproduce both ciphertext values exactly.
pub fn ciphertext_census(
    pk: &KemPublicKey,
    segment: &(crate::bigmod::Nat, crate::bigmod::Nat),
    params: &KemParams,
) -> Result<CensusResult, Error> {
    if !params.is_toy() {
        return Err(Error::ToyOnly);
    }
    let p = nat_to_u128(&params.p)?;
    if p > MAX_CENSUS_P {
        return Err(Error::ToyOnly);
    }
    let p_mat = flatten(&pk.p_mat)?;
    let q_mat = flatten(&pk.q_mat)?;
    let pbar = nat_to_u128(&segment.0)?;
    let qbar = nat_to_u128(&segment.1)?;
    let m = params.m;
    let rows = params.coeff_rows();

    let eval = |mat: &[u128], x: u128, us: &[u128]| -> u128 {
        let mut acc = 0u128;
        let mut x_pow = 1u128;
        for i in 0..rows {
            for (j, &u) in us.iter().enumerate() {
                acc += mat[i * m + j] * ((u * x_pow) % p);
            }
            x_pow = (x_pow * x) % p;
        }
        acc
    };

    let mut result = CensusResult {
        consistent_exact: 0,
        consistent_mod_p: 0,
        tuples_enumerated: 0,
    };
    let mut us = vec![0u128; m];
    for x in 0..p {
        loop {
            result.tuples_enumerated += 1;
            let (pv, qv) = (eval(&p_mat, x, &us), eval(&q_mat, x, &us));
            if pv == pbar && qv == qbar {
                result.consistent_exact += 1;
            }
            if pv % p == pbar % p && qv % p == qbar % p {
                result.consistent_mod_p += 1;
            }
            // odometer over the noise vector
            let mut digit = 0;
            loop {
                if digit == m {
                    break;
                }
                us[digit] += 1;
                if us[digit] < p {
                    break;
                }
                us[digit] = 0;
                digit += 1;
            }
            if digit == m {
                break;
            }
        }
    }
    Ok(result)
}
