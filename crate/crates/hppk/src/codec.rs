//! Bit-exact serialization of keys, ciphertexts, and signatures, plus the
//! known-answer-test file format.
//!
//! Every artifact is a fixed-layout sequence of little-endian fixed-width
//! integers with no headers or padding, so the encoded lengths are exactly
//! the published size tables. Field order:
//!
//! * KEM secret key: `f0 f1 h0 h1 R1 R2 S1 [S2]`
//! * KEM public key: `P` row-major, then `Q` row-major
//! * ciphertext: `(Pbar, Qbar)` per segment in order
//! * DS secret key: `f0 f1 h0 h1 R1 R2 S1 S2`
//! * DS public key: `p' q' mu nu` row-major, then `s1 s2`
//! * signature: `(F, H)` per segment in order

use num_traits::{One, Zero};

use crate::bigmod::{self, Nat};
use crate::drbg::{Drbg, SEED_LEN};
use crate::ds::{self, DsParams, DsPrivateKey, DsPublicKey, DsSignature, SEG_COUNT};
use crate::kem::{self, Ciphertext, HiddenRing, KemParams, KemPrivateKey, KemPublicKey};
use crate::{Error, SecurityLevel};

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Per-parameter-set byte widths of the serialized fields.
#[derive(Debug, Clone, Copy)]
pub struct Widths {
    /// Field elements (`f`, `h`, `p'`, `q'`, `s1`, `s2`).
    pub field: usize,
    /// Ring elements (`R`, `S`, signature components).
    pub ring: usize,
    /// Barrett table entries (`mu`, `nu`); 0 for KEM.
    pub barrett: usize,
    /// One ciphertext value; 0 for DS.
    pub ct_value: usize,
}

pub fn kem_widths(params: &KemParams) -> Widths {
    Widths {
        field: ceil_div(params.prime_bits, 8),
        ring: ceil_div(params.ring_bits, 8),
        barrett: 0,
        ct_value: params.ct_value_bytes,
    }
}

pub fn ds_widths(params: &DsParams) -> Widths {
    Widths {
        field: ceil_div(params.prime_bits, 8),
        ring: ceil_div(params.ring_bits, 8),
        barrett: ceil_div(params.barrett_bits, 8),
        ct_value: 0,
    }
}

pub fn kem_public_key_len(params: &KemParams) -> usize {
    2 * params.coeff_rows() * params.m * kem_widths(params).ring
}

pub fn kem_secret_key_len(params: &KemParams) -> usize {
    let w = kem_widths(params);
    4 * w.field + (2 + params.rings) * w.ring
}

pub fn kem_ciphertext_len(params: &KemParams) -> usize {
    params.num_segments * 2 * params.ct_value_bytes
}

pub fn ds_public_key_len(params: &DsParams) -> usize {
    let w = ds_widths(params);
    let n = params.coeff_rows() * params.m;
    2 * n * w.field + 2 * n * w.barrett + 2 * w.field
}

pub fn ds_secret_key_len(params: &DsParams) -> usize {
    let w = ds_widths(params);
    4 * w.field + 4 * w.ring
}

pub fn ds_signature_len(params: &DsParams) -> usize {
    2 * SEG_COUNT * ds_widths(params).ring
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new(capacity: usize) -> Self {
        Writer {
            buf: Vec::with_capacity(capacity),
        }
    }

    fn put(&mut self, v: &Nat, width: usize) -> Result<(), Error> {
        self.buf.extend_from_slice(&bigmod::to_le_bytes_fixed(v, width)?);
        Ok(())
    }

    fn put_matrix(&mut self, mat: &[Vec<Nat>], width: usize) -> Result<(), Error> {
        for row in mat {
            for v in row {
                self.put(v, width)?;
            }
        }
        Ok(())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], expected: usize) -> Result<Self, Error> {
        if bytes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: bytes.len(),
            });
        }
        Ok(Reader { bytes, pos: 0 })
    }

    fn take(&mut self, width: usize) -> Nat {
        let v = bigmod::from_le_bytes(&self.bytes[self.pos..self.pos + width]);
        self.pos += width;
        v
    }

    /// Reads a value that must land in `[1, bound)`.
    fn take_bounded(&mut self, width: usize, bound: &Nat) -> Result<Nat, Error> {
        let v = self.take(width);
        if v.is_zero() || v >= *bound {
            return Err(Error::RangeViolation);
        }
        Ok(v)
    }

    fn take_matrix(&mut self, rows: usize, cols: usize, width: usize) -> Vec<Vec<Nat>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| self.take(width)).collect())
            .collect()
    }
}

pub fn encode_kem_public_key(pk: &KemPublicKey, params: &KemParams) -> Result<Vec<u8>, Error> {
    let w = kem_widths(params);
    let mut out = Writer::new(kem_public_key_len(params));
    out.put_matrix(&pk.p_mat, w.ring)?;
    out.put_matrix(&pk.q_mat, w.ring)?;
    Ok(out.buf)
}

pub fn decode_kem_public_key(bytes: &[u8], params: &KemParams) -> Result<KemPublicKey, Error> {
    let w = kem_widths(params);
    let mut r = Reader::new(bytes, kem_public_key_len(params))?;
    let rows = params.coeff_rows();
    Ok(KemPublicKey {
        p_mat: r.take_matrix(rows, params.m, w.ring),
        q_mat: r.take_matrix(rows, params.m, w.ring),
    })
}

pub fn encode_kem_secret_key(sk: &KemPrivateKey, params: &KemParams) -> Result<Vec<u8>, Error> {
    let w = kem_widths(params);
    let mut out = Writer::new(kem_secret_key_len(params));
    for v in sk.f.iter().chain(sk.h.iter()) {
        out.put(v, w.field)?;
    }
    out.put(&sk.ring1.r, w.ring)?;
    out.put(&sk.ring2.r, w.ring)?;
    out.put(&sk.ring1.s, w.ring)?;
    if params.rings == 2 {
        out.put(&sk.ring2.s, w.ring)?;
    }
    Ok(out.buf)
}

fn check_ring_modulus(s: &Nat, ring_bits: usize) -> Result<(), Error> {
    if bigmod::bit_length(s) != ring_bits {
        return Err(Error::RangeViolation);
    }
    Ok(())
}

pub fn decode_kem_secret_key(bytes: &[u8], params: &KemParams) -> Result<KemPrivateKey, Error> {
    let w = kem_widths(params);
    let mut r = Reader::new(bytes, kem_secret_key_len(params))?;
    let p = &params.p;
    let f = [r.take_bounded(w.field, p)?, r.take_bounded(w.field, p)?];
    let h = [r.take_bounded(w.field, p)?, r.take_bounded(w.field, p)?];
    let r1 = r.take(w.ring);
    let r2 = r.take(w.ring);
    let s1 = r.take(w.ring);
    let s2 = if params.rings == 2 { r.take(w.ring) } else { s1.clone() };
    check_ring_modulus(&s1, params.ring_bits)?;
    check_ring_modulus(&s2, params.ring_bits)?;
    if r1.is_zero() || r1 >= s1 || r2.is_zero() || r2 >= s2 {
        return Err(Error::RangeViolation);
    }
    Ok(KemPrivateKey {
        f,
        h,
        ring1: HiddenRing::from_parts(r1, s1)?,
        ring2: HiddenRing::from_parts(r2, s2)?,
    })
}

pub fn encode_kem_ciphertext(ct: &Ciphertext, params: &KemParams) -> Result<Vec<u8>, Error> {
    let mut out = Writer::new(kem_ciphertext_len(params));
    for (pbar, qbar) in &ct.segments {
        out.put(pbar, params.ct_value_bytes)?;
        out.put(qbar, params.ct_value_bytes)?;
    }
    Ok(out.buf)
}

pub fn decode_kem_ciphertext(bytes: &[u8], params: &KemParams) -> Result<Ciphertext, Error> {
    let mut r = Reader::new(bytes, kem_ciphertext_len(params))?;
    let segments = (0..params.num_segments)
        .map(|_| {
            let pbar = r.take(params.ct_value_bytes);
            let qbar = r.take(params.ct_value_bytes);
            (pbar, qbar)
        })
        .collect();
    Ok(Ciphertext { segments })
}

pub fn encode_ds_public_key(pk: &DsPublicKey, params: &DsParams) -> Result<Vec<u8>, Error> {
    let w = ds_widths(params);
    let mut out = Writer::new(ds_public_key_len(params));
    out.put_matrix(&pk.pprime, w.field)?;
    out.put_matrix(&pk.qprime, w.field)?;
    out.put_matrix(&pk.mu, w.barrett)?;
    out.put_matrix(&pk.nu, w.barrett)?;
    out.put(&pk.s1, w.field)?;
    out.put(&pk.s2, w.field)?;
    Ok(out.buf)
}

pub fn decode_ds_public_key(bytes: &[u8], params: &DsParams) -> Result<DsPublicKey, Error> {
    let w = ds_widths(params);
    let mut r = Reader::new(bytes, ds_public_key_len(params))?;
    let rows = params.coeff_rows();
    let p = &params.p;
    let check_field = |mat: &Vec<Vec<Nat>>| -> Result<(), Error> {
        for row in mat {
            for v in row {
                if v >= p {
                    return Err(Error::RangeViolation);
                }
            }
        }
        Ok(())
    };
    let pprime = r.take_matrix(rows, params.m, w.field);
    let qprime = r.take_matrix(rows, params.m, w.field);
    check_field(&pprime)?;
    check_field(&qprime)?;
    let barrett_bound = Nat::one() << params.barrett_bits;
    let mu = r.take_matrix(rows, params.m, w.barrett);
    let nu = r.take_matrix(rows, params.m, w.barrett);
    for row in mu.iter().chain(nu.iter()) {
        for v in row {
            if *v >= barrett_bound {
                return Err(Error::RangeViolation);
            }
        }
    }
    let s1 = r.take(w.field);
    let s2 = r.take(w.field);
    if s1 >= *p || s2 >= *p {
        return Err(Error::RangeViolation);
    }
    Ok(DsPublicKey {
        pprime,
        qprime,
        mu,
        nu,
        s1,
        s2,
    })
}

pub fn encode_ds_secret_key(sk: &DsPrivateKey, params: &DsParams) -> Result<Vec<u8>, Error> {
    let w = ds_widths(params);
    let mut out = Writer::new(ds_secret_key_len(params));
    for v in sk.f.iter().chain(sk.h.iter()) {
        out.put(v, w.field)?;
    }
    out.put(&sk.ring1.r, w.ring)?;
    out.put(&sk.ring2.r, w.ring)?;
    out.put(&sk.ring1.s, w.ring)?;
    out.put(&sk.ring2.s, w.ring)?;
    Ok(out.buf)
}

pub fn decode_ds_secret_key(bytes: &[u8], params: &DsParams) -> Result<DsPrivateKey, Error> {
    let w = ds_widths(params);
    let mut r = Reader::new(bytes, ds_secret_key_len(params))?;
    let p = &params.p;
    let f = [r.take_bounded(w.field, p)?, r.take_bounded(w.field, p)?];
    let h = [r.take_bounded(w.field, p)?, r.take_bounded(w.field, p)?];
    let r1 = r.take(w.ring);
    let r2 = r.take(w.ring);
    let s1 = r.take(w.ring);
    let s2 = r.take(w.ring);
    check_ring_modulus(&s1, params.ring_bits)?;
    check_ring_modulus(&s2, params.ring_bits)?;
    if r1.is_zero() || r1 >= s1 || r2.is_zero() || r2 >= s2 {
        return Err(Error::RangeViolation);
    }
    Ok(DsPrivateKey {
        f,
        h,
        ring1: HiddenRing::from_parts(r1, s1)?,
        ring2: HiddenRing::from_parts(r2, s2)?,
    })
}

pub fn encode_ds_signature(sig: &DsSignature, params: &DsParams) -> Result<Vec<u8>, Error> {
    let w = ds_widths(params);
    let mut out = Writer::new(ds_signature_len(params));
    for (f_elt, h_elt) in &sig.segments {
        out.put(f_elt, w.ring)?;
        out.put(h_elt, w.ring)?;
    }
    Ok(out.buf)
}

pub fn decode_ds_signature(bytes: &[u8], params: &DsParams) -> Result<DsSignature, Error> {
    let w = ds_widths(params);
    let mut r = Reader::new(bytes, ds_signature_len(params))?;
    let bound = Nat::one() << params.ring_bits;
    let mut segments = Vec::with_capacity(SEG_COUNT);
    for _ in 0..SEG_COUNT {
        let f_elt = r.take(w.ring);
        let h_elt = r.take(w.ring);
        if f_elt >= bound || h_elt >= bound {
            return Err(Error::RangeViolation);
        }
        segments.push((f_elt, h_elt));
    }
    Ok(DsSignature { segments })
}

// ---------------------------------------------------------------------------
// KAT files
// ---------------------------------------------------------------------------

/// Which scheme and parameter set a KAT file exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatScheme {
    Kem {
        level: SecurityLevel,
        m: usize,
        rings: usize,
    },
    Ds {
        level: SecurityLevel,
        m: usize,
        barrett_extra: usize,
    },
}

/// One seeded transcript. `payload`/`check` are the ciphertext and shared
/// secret for KEM, or the message and signature for DS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatRecord {
    pub seed: Vec<u8>,
    pub pk: Vec<u8>,
    pub sk: Vec<u8>,
    pub payload: Vec<u8>,
    pub check: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatFile {
    pub scheme: KatScheme,
    pub records: Vec<KatRecord>,
}

/// Per-record message length for DS KATs.
const DS_KAT_MSG_LEN: usize = 33;

/// Generates `count` seeded records. Record seeds are drawn from a master
/// generator so a single 32-byte seed pins the whole file.
pub fn kat_generate(scheme: KatScheme, master_seed: &[u8], count: usize) -> Result<KatFile, Error> {
    let mut master = Drbg::new(master_seed)?;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let seed = master.bytes(SEED_LEN);
        let mut g = Drbg::new(&seed)?;
        let record = match scheme {
            KatScheme::Kem { level, m, rings } => {
                let params = KemParams::new(level, m, rings)?;
                let (sk, pk) = kem::kem_keygen(&params, &mut g);
                let (ct, ss) = kem::encapsulate(&pk, &params, &mut g);
                KatRecord {
                    seed,
                    pk: encode_kem_public_key(&pk, &params)?,
                    sk: encode_kem_secret_key(&sk, &params)?,
                    payload: encode_kem_ciphertext(&ct, &params)?,
                    check: ss.0.to_vec(),
                }
            }
            KatScheme::Ds {
                level,
                m,
                barrett_extra,
            } => {
                let params = DsParams::new(level, m, barrett_extra)?;
                let (sk, pk) = ds::ds_keygen(&params, &mut g);
                let msg = g.bytes(DS_KAT_MSG_LEN);
                let sig = ds::sign(&sk, &params, &msg);
                KatRecord {
                    seed,
                    pk: encode_ds_public_key(&pk, &params)?,
                    sk: encode_ds_secret_key(&sk, &params)?,
                    payload: msg,
                    check: encode_ds_signature(&sig, &params)?,
                }
            }
        };
        records.push(record);
    }
    Ok(KatFile { scheme, records })
}

/// Regenerates every record from its seed and compares byte-for-byte; for
/// KEM records the decapsulated secret must also match, for DS records the
/// signature must verify.
pub fn kat_verify(file: &KatFile) -> Result<(), Error> {
    for (idx, rec) in file.records.iter().enumerate() {
        let mismatch = |field: &str| Error::KatMismatch {
            record: idx,
            field: field.to_string(),
        };
        let mut g = Drbg::new(&rec.seed)?;
        match file.scheme {
            KatScheme::Kem { level, m, rings } => {
                let params = KemParams::new(level, m, rings)?;
                let (sk, pk) = kem::kem_keygen(&params, &mut g);
                let (ct, ss) = kem::encapsulate(&pk, &params, &mut g);
                if encode_kem_public_key(&pk, &params)? != rec.pk {
                    return Err(mismatch("pk"));
                }
                if encode_kem_secret_key(&sk, &params)? != rec.sk {
                    return Err(mismatch("sk"));
                }
                if encode_kem_ciphertext(&ct, &params)? != rec.payload {
                    return Err(mismatch("ct"));
                }
                if ss.0.as_slice() != rec.check.as_slice() {
                    return Err(mismatch("ss"));
                }
                let decoded_ct = decode_kem_ciphertext(&rec.payload, &params)?;
                let recovered = kem::decapsulate(&sk, &params, &decoded_ct)?;
                if recovered.0.as_slice() != rec.check.as_slice() {
                    return Err(mismatch("decaps"));
                }
            }
            KatScheme::Ds {
                level,
                m,
                barrett_extra,
            } => {
                let params = DsParams::new(level, m, barrett_extra)?;
                let (sk, pk) = ds::ds_keygen(&params, &mut g);
                let msg = g.bytes(DS_KAT_MSG_LEN);
                let sig = ds::sign(&sk, &params, &msg);
                if encode_ds_public_key(&pk, &params)? != rec.pk {
                    return Err(mismatch("pk"));
                }
                if encode_ds_secret_key(&sk, &params)? != rec.sk {
                    return Err(mismatch("sk"));
                }
                if msg != rec.payload {
                    return Err(mismatch("msg"));
                }
                if encode_ds_signature(&sig, &params)? != rec.check {
                    return Err(mismatch("sm"));
                }
                let decoded = decode_ds_signature(&rec.check, &params)?;
                if !ds::verify(&pk, &params, &rec.payload, &decoded)? {
                    return Err(mismatch("verify"));
                }
            }
        }
    }
    Ok(())
}

fn payload_keys(scheme: &KatScheme) -> (&'static str, &'static str) {
    match scheme {
        KatScheme::Kem { .. } => ("ct", "ss"),
        KatScheme::Ds { .. } => ("msg", "sm"),
    }
}

/// Renders the line-oriented text form.
pub fn kat_write(file: &KatFile) -> String {
    let mut out = String::new();
    match file.scheme {
        KatScheme::Kem { level, m, rings } => {
            out.push_str("scheme = kem\n");
            out.push_str(&format!("level = {}\n", level.number()));
            out.push_str(&format!("m = {m}\n"));
            out.push_str(&format!("rings = {rings}\n"));
        }
        KatScheme::Ds {
            level,
            m,
            barrett_extra,
        } => {
            out.push_str("scheme = ds\n");
            out.push_str(&format!("level = {}\n", level.number()));
            out.push_str(&format!("m = {m}\n"));
            out.push_str(&format!("barrett = {barrett_extra}\n"));
        }
    }
    out.push_str(&format!("count = {}\n", file.records.len()));
    let (payload_key, check_key) = payload_keys(&file.scheme);
    for rec in &file.records {
        out.push('\n');
        out.push_str(&format!("seed = {}\n", hex::encode(&rec.seed)));
        out.push_str(&format!("pk = {}\n", hex::encode(&rec.pk)));
        out.push_str(&format!("sk = {}\n", hex::encode(&rec.sk)));
        out.push_str(&format!("{payload_key} = {}\n", hex::encode(&rec.payload)));
        out.push_str(&format!("{check_key} = {}\n", hex::encode(&rec.check)));
    }
    out
}

struct LineParser<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> LineParser<'a> {
    fn new(text: &'a str) -> Self {
        LineParser {
            lines: text.lines().enumerate(),
        }
    }

    /// Next non-blank `key = value` pair.
    fn next_pair(&mut self) -> Result<Option<(usize, &'a str, &'a str)>, Error> {
        for (idx, line) in self.lines.by_ref() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(Error::ParseError {
                line: line_no,
                msg: "expected `key = value`".into(),
            })?;
            return Ok(Some((line_no, key.trim(), value.trim())));
        }
        Ok(None)
    }

    fn expect(&mut self, want: &str) -> Result<(usize, &'a str), Error> {
        match self.next_pair()? {
            Some((line, key, value)) if key == want => Ok((line, value)),
            Some((line, key, _)) => Err(Error::ParseError {
                line,
                msg: format!("expected `{want}`, found `{key}`"),
            }),
            None => Err(Error::ParseError {
                line: 0,
                msg: format!("unexpected end of file, expected `{want}`"),
            }),
        }
    }
}

fn parse_usize(line: usize, value: &str) -> Result<usize, Error> {
    value.parse().map_err(|_| Error::ParseError {
        line,
        msg: format!("not a number: `{value}`"),
    })
}

fn parse_hex(line: usize, value: &str) -> Result<Vec<u8>, Error> {
    hex::decode(value).map_err(|_| Error::ParseError {
        line,
        msg: "invalid hex".into(),
    })
}

/// Parses the text form back into records.
pub fn kat_read(text: &str) -> Result<KatFile, Error> {
    let mut p = LineParser::new(text);
    let (line, scheme_name) = p.expect("scheme")?;
    let (lv_line, lv) = p.expect("level")?;
    let level = SecurityLevel::from_number(parse_usize(lv_line, lv)? as u8).map_err(|_| {
        Error::ParseError {
            line: lv_line,
            msg: format!("bad level `{lv}`"),
        }
    })?;
    let (m_line, m) = p.expect("m")?;
    let m = parse_usize(m_line, m)?;
    let scheme = match scheme_name {
        "kem" => {
            let (r_line, rings) = p.expect("rings")?;
            KatScheme::Kem {
                level,
                m,
                rings: parse_usize(r_line, rings)?,
            }
        }
        "ds" => {
            let (b_line, barrett) = p.expect("barrett")?;
            KatScheme::Ds {
                level,
                m,
                barrett_extra: parse_usize(b_line, barrett)?,
            }
        }
        other => {
            return Err(Error::ParseError {
                line,
                msg: format!("unknown scheme `{other}`"),
            })
        }
    };
    let (c_line, count) = p.expect("count")?;
    let count = parse_usize(c_line, count)?;
    let (payload_key, check_key) = payload_keys(&scheme);
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let (l, seed) = p.expect("seed")?;
        let seed = parse_hex(l, seed)?;
        let (l, pk) = p.expect("pk")?;
        let pk = parse_hex(l, pk)?;
        let (l, sk) = p.expect("sk")?;
        let sk = parse_hex(l, sk)?;
        let (l, payload) = p.expect(payload_key)?;
        let payload = parse_hex(l, payload)?;
        let (l, check) = p.expect(check_key)?;
        let check = parse_hex(l, check)?;
        records.push(KatRecord {
            seed,
            pk,
            sk,
            payload,
            check,
        });
    }
    if let Some((line, key, _)) = p.next_pair()? {
        return Err(Error::ParseError {
            line,
            msg: format!("trailing data `{key}`"),
        });
    }
    Ok(KatFile { scheme, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn drbg(tag: u8) -> Drbg {
        Drbg::new(&[tag; 32]).unwrap()
    }

    #[test]
    fn kem_sizes_match_table() {
        // (level, pk, sk_ohr, sk_thr, ct) for m = 2 and m = 3
        let expect = [
            (SecurityLevel::I, [108, 162], 43, 52, 224),
            (SecurityLevel::III, [156, 234], 63, 76, 240),
            (SecurityLevel::V, [204, 306], 83, 100, 208),
        ];
        for (level, pks, sk1, sk2, ct) in expect {
            for (mi, m) in [2usize, 3].into_iter().enumerate() {
                let ohr = KemParams::new(level, m, 1).unwrap();
                let thr = KemParams::new(level, m, 2).unwrap();
                assert_eq!(kem_public_key_len(&ohr), pks[mi]);
                assert_eq!(kem_secret_key_len(&ohr), sk1);
                assert_eq!(kem_secret_key_len(&thr), sk2);
                assert_eq!(kem_ciphertext_len(&ohr), ct);
            }
        }
    }

    #[test]
    fn ds_sizes_match_table() {
        for (level, pk, sk, sig) in [
            (SecurityLevel::I, 220, 104, 144),
            (SecurityLevel::III, 300, 152, 208),
            (SecurityLevel::V, 380, 200, 272),
        ] {
            let params = DsParams::new(level, 1, 64).unwrap();
            assert_eq!(ds_public_key_len(&params), pk);
            assert_eq!(ds_secret_key_len(&params), sk);
            assert_eq!(ds_signature_len(&params), sig);
        }
        // remaining published rows
        let p = DsParams::new(SecurityLevel::I, 2, 64).unwrap().with_barrett_bits(288);
        assert_eq!(ds_public_key_len(&p), 544);
        let p = DsParams::new(SecurityLevel::I, 1, 32).unwrap();
        assert_eq!(ds_public_key_len(&p), 196);
        let p = DsParams::new(SecurityLevel::V, 2, 32).unwrap();
        assert_eq!(ds_public_key_len(&p), 680);
    }

    #[test]
    fn kem_round_trip_and_length_checks() {
        let params = KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let mut g = drbg(40);
        let (sk, pk) = kem::kem_keygen(&params, &mut g);
        let (ct, _) = kem::encapsulate(&pk, &params, &mut g);

        let pk_bytes = encode_kem_public_key(&pk, &params).unwrap();
        assert_eq!(decode_kem_public_key(&pk_bytes, &params).unwrap(), pk);
        let sk_bytes = encode_kem_secret_key(&sk, &params).unwrap();
        assert_eq!(decode_kem_secret_key(&sk_bytes, &params).unwrap(), sk);
        let ct_bytes = encode_kem_ciphertext(&ct, &params).unwrap();
        assert_eq!(decode_kem_ciphertext(&ct_bytes, &params).unwrap(), ct);

        let mut truncated = pk_bytes.clone();
        truncated.pop();
        assert!(matches!(
            decode_kem_public_key(&truncated, &params),
            Err(Error::LengthMismatch { .. })
        ));
        let mut extended = ct_bytes.clone();
        extended.push(0);
        assert!(matches!(
            decode_kem_ciphertext(&extended, &params),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ds_round_trip_and_range_checks() {
        let params = DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let mut g = drbg(41);
        let (sk, pk) = ds::ds_keygen(&params, &mut g);
        let sig = ds::sign(&sk, &params, b"roundtrip");

        let pk_bytes = encode_ds_public_key(&pk, &params).unwrap();
        assert_eq!(decode_ds_public_key(&pk_bytes, &params).unwrap(), pk);
        let sk_bytes = encode_ds_secret_key(&sk, &params).unwrap();
        assert_eq!(decode_ds_secret_key(&sk_bytes, &params).unwrap(), sk);
        let sig_bytes = encode_ds_signature(&sig, &params).unwrap();
        assert_eq!(decode_ds_signature(&sig_bytes, &params).unwrap(), sig);

        // force a field element to the modulus: must be rejected
        let w = ds_widths(&params);
        let mut bad = pk_bytes.clone();
        let p_bytes = bigmod::to_le_bytes_fixed(&params.p, w.field).unwrap();
        bad[..w.field].copy_from_slice(&p_bytes);
        assert_eq!(decode_ds_public_key(&bad, &params), Err(Error::RangeViolation));
    }

    #[test]
    fn kat_round_trip_and_verify() {
        let scheme = KatScheme::Kem {
            level: SecurityLevel::I,
            m: 2,
            rings: 1,
        };
        let file = kat_generate(scheme, &[50u8; 32], 4).unwrap();
        let text = kat_write(&file);
        let parsed = kat_read(&text).unwrap();
        assert_eq!(parsed, file);
        kat_verify(&parsed).unwrap();

        let ds_file = kat_generate(
            KatScheme::Ds {
                level: SecurityLevel::I,
                m: 1,
                barrett_extra: 64,
            },
            &[51u8; 32],
            3,
        )
        .unwrap();
        kat_verify(&kat_read(&kat_write(&ds_file)).unwrap()).unwrap();
    }

    #[test]
    fn kat_header_only_and_errors() {
        let file = kat_generate(
            KatScheme::Kem {
                level: SecurityLevel::V,
                m: 3,
                rings: 2,
            },
            &[52u8; 32],
            0,
        )
        .unwrap();
        let text = kat_write(&file);
        assert_eq!(text.lines().count(), 5);
        assert_eq!(kat_read(&text).unwrap(), file);

        let err = kat_read("scheme = kem\nlevel = 1\nm = 2\nrings = 1\ncount = nope\n");
        assert!(matches!(err, Err(Error::ParseError { line: 5, .. })));

        // corrupting one hex digit must fail verification
        let file = kat_generate(
            KatScheme::Kem {
                level: SecurityLevel::I,
                m: 2,
                rings: 1,
            },
            &[53u8; 32],
            1,
        )
        .unwrap();
        let text = kat_write(&file);
        let pos = text.find("ss = ").unwrap() + 5;
        let mut corrupted: Vec<char> = text.chars().collect();
        corrupted[pos] = if corrupted[pos] == '0' { '1' } else { '0' };
        let corrupted: String = corrupted.into_iter().collect();
        let parsed = kat_read(&corrupted).unwrap();
        assert!(matches!(kat_verify(&parsed), Err(Error::KatMismatch { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn kem_artifacts_round_trip_any_seed(seed in any::<[u8; 32]>(), m in 2usize..=3, rings in 1usize..=2) {
            let params = KemParams::new(SecurityLevel::I, m, rings).unwrap();
            let mut g = Drbg::new(&seed).unwrap();
            let (sk, pk) = kem::kem_keygen(&params, &mut g);
            let (ct, _) = kem::encapsulate(&pk, &params, &mut g);
            prop_assert_eq!(
                decode_kem_secret_key(&encode_kem_secret_key(&sk, &params).unwrap(), &params).unwrap(),
                sk
            );
            prop_assert_eq!(
                decode_kem_public_key(&encode_kem_public_key(&pk, &params).unwrap(), &params).unwrap(),
                pk
            );
            prop_assert_eq!(
                decode_kem_ciphertext(&encode_kem_ciphertext(&ct, &params).unwrap(), &params).unwrap(),
                ct
            );
        }
    }
}
