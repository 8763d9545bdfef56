//! `hppk` command line: key management, encapsulation, signatures, KAT
//! files, benchmarking, and toy-scale attacks.
//!
//! Exit codes: 0 success / signature accepted, 1 signature rejected,
//! 2 any other error (one-line diagnostic on stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::rngs::OsRng;
use rand::RngCore;

use hppk::bench::{bench_ds, bench_kem, BenchReport};
use hppk::codec;
use hppk::drbg::Drbg;
use hppk::{attacks, bigmod, ds, kem, SecurityLevel};

#[derive(Parser)]
#[command(name = "hppk", version, about = "HPPK KEM and digital signatures over hidden rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key encapsulation mechanism
    Kem {
        #[command(subcommand)]
        cmd: KemCmd,
    },
    /// Digital signature scheme
    Ds {
        #[command(subcommand)]
        cmd: DsCmd,
    },
    /// Known-answer-test files
    Kat {
        #[command(subcommand)]
        cmd: KatCmd,
    },
    /// Timing harness
    Bench(BenchArgs),
    /// Toy-scale attacks
    Attack {
        #[command(subcommand)]
        cmd: AttackCmd,
    },
}

#[derive(Subcommand)]
enum KemCmd {
    /// Generate a key pair and write pk.hppk / sk.hppk into --out
    Keygen {
        #[arg(long, value_parser = clap::value_parser!(u8))]
        level: u8,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        rings: usize,
        /// 64 hex characters; omitted = OS entropy
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encapsulate against a public key
    Encaps {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        ss: PathBuf,
    },
    /// Decapsulate a ciphertext
    Decaps {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        ss: PathBuf,
    },
}

#[derive(Subcommand)]
enum DsCmd {
    Keygen {
        #[arg(long, value_parser = clap::value_parser!(u8))]
        level: u8,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Barrett parameter surplus over L: 32 or 64
        #[arg(long, default_value_t = 64)]
        barrett: usize,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    Sign {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Exit status 0 = accept, 1 = reject
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
}

#[derive(Subcommand)]
enum KatCmd {
    Gen {
        /// kem or ds
        #[arg(long)]
        scheme: String,
        #[arg(long, value_parser = clap::value_parser!(u8))]
        level: u8,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        rings: usize,
        #[arg(long, default_value_t = 64)]
        barrett: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: String,
        #[arg(long)]
        out: PathBuf,
    },
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// kem or ds
    #[arg(long)]
    scheme: String,
    #[arg(long, value_parser = clap::value_parser!(u8))]
    level: u8,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    rings: usize,
    #[arg(long, default_value_t = 64)]
    barrett: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AttackCmd {
    /// Coprime-pair search for the first KEM hidden ring
    KemRing {
        #[arg(long = "toy-p")]
        toy_p: u64,
        #[arg(long = "toy-l")]
        toy_l: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        rings: usize,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Linear modulus scan against the signature Barrett table
    DsRing {
        #[arg(long = "toy-p")]
        toy_p: u64,
        #[arg(long = "toy-l")]
        toy_l: usize,
        /// Barrett parameter K; default toy-l + 16
        #[arg(long)]
        barrett: Option<usize>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Exhaustive (x, u) enumeration against one ciphertext segment
    Census {
        #[arg(long = "toy-p")]
        toy_p: u64,
        #[arg(long = "toy-l")]
        toy_l: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        rings: usize,
        #[arg(long)]
        seed: Option<String>,
    },
}

type AppResult<T> = Result<T, String>;

fn err<T, E: std::fmt::Display>(e: E) -> AppResult<T> {
    Err(e.to_string())
}

fn parse_seed(seed: &Option<String>) -> AppResult<[u8; 32]> {
    let mut out = [0u8; 32];
    match seed {
        Some(text) => {
            let bytes = hex::decode(text).map_err(|e| format!("bad --seed: {e}"))?;
            if bytes.len() != 32 {
                return Err(format!("--seed must be 64 hex characters, got {}", text.len()));
            }
            out.copy_from_slice(&bytes);
        }
        None => OsRng.fill_bytes(&mut out),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Artifact files: one header line `HPPK-KEM v1 level=1 m=2 rings=1 kind=pk`
// followed by the codec bytes as lowercase hex.
// ---------------------------------------------------------------------------

fn write_artifact(path: &Path, header: &str, payload: &[u8]) -> AppResult<()> {
    let text = format!("{header}\n{}\n", hex::encode(payload));
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

struct Artifact {
    scheme: String,
    fields: Vec<(String, String)>,
    payload: Vec<u8>,
}

impl Artifact {
    fn field(&self, name: &str) -> AppResult<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format!("artifact header missing {name}="))
    }

    fn usize_field(&self, name: &str) -> AppResult<usize> {
        self.field(name)?
            .parse()
            .map_err(|e| format!("artifact header {name}: {e}"))
    }

    fn level(&self) -> AppResult<SecurityLevel> {
        let n: u8 = self
            .field("level")?
            .parse()
            .map_err(|e| format!("artifact header level: {e}"))?;
        SecurityLevel::from_number(n).map_err(|e| e.to_string())
    }
}

fn read_artifact(path: &Path, expect_scheme: &str, expect_kind: &str) -> AppResult<Artifact> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| format!("{}: empty file", path.display()))?;
    let mut tokens = header.split_whitespace();
    let scheme = tokens
        .next()
        .ok_or_else(|| format!("{}: empty header", path.display()))?
        .to_string();
    if tokens.next() != Some("v1") {
        return Err(format!("{}: unsupported artifact version", path.display()));
    }
    let mut fields = Vec::new();
    for token in tokens {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| format!("{}: malformed header token {token:?}", path.display()))?;
        fields.push((k.to_string(), v.to_string()));
    }
    let body: String = lines.collect::<Vec<_>>().concat();
    let payload = hex::decode(body.trim()).map_err(|e| format!("{}: {e}", path.display()))?;
    let artifact = Artifact {
        scheme,
        fields,
        payload,
    };
    if artifact.scheme != expect_scheme {
        return Err(format!(
            "{}: expected a {expect_scheme} artifact, found {}",
            path.display(),
            artifact.scheme
        ));
    }
    if artifact.field("kind")? != expect_kind {
        return Err(format!(
            "{}: expected kind={expect_kind}, found kind={}",
            path.display(),
            artifact.field("kind")?
        ));
    }
    Ok(artifact)
}

fn kem_header(params: &kem::KemParams, kind: &str) -> String {
    format!(
        "HPPK-KEM v1 level={} m={} rings={} kind={kind}",
        params.level.map_or(0, SecurityLevel::number),
        params.m,
        params.rings
    )
}

fn ds_header(params: &ds::DsParams, kind: &str) -> String {
    format!(
        "HPPK-DS v1 level={} m={} barrett={} kind={kind}",
        params.level.map_or(0, SecurityLevel::number),
        params.m,
        params.barrett_bits - 2 * params.prime_bits - 16,
    )
}

fn kem_params_from(artifact: &Artifact) -> AppResult<kem::KemParams> {
    kem::KemParams::new(
        artifact.level()?,
        artifact.usize_field("m")?,
        artifact.usize_field("rings")?,
    )
    .map_err(|e| e.to_string())
}

fn ds_params_from(artifact: &Artifact) -> AppResult<ds::DsParams> {
    ds::DsParams::new(
        artifact.level()?,
        artifact.usize_field("m")?,
        artifact.usize_field("barrett")?,
    )
    .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn run_kem(cmd: KemCmd) -> AppResult<ExitCode> {
    match cmd {
        KemCmd::Keygen {
            level,
            m,
            rings,
            seed,
            out,
        } => {
            let level = SecurityLevel::from_number(level).map_err(|e| e.to_string())?;
            let params = kem::KemParams::new(level, m, rings).map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (sk, pk) = kem::kem_keygen(&params, &mut g);
            fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let pk_bytes = codec::encode_kem_public_key(&pk, &params).map_err(|e| e.to_string())?;
            let sk_bytes = codec::encode_kem_secret_key(&sk, &params).map_err(|e| e.to_string())?;
            write_artifact(&out.join("pk.hppk"), &kem_header(&params, "pk"), &pk_bytes)?;
            write_artifact(&out.join("sk.hppk"), &kem_header(&params, "sk"), &sk_bytes)?;
            println!(
                "wrote {} ({} bytes) and {} ({} bytes)",
                out.join("pk.hppk").display(),
                pk_bytes.len(),
                out.join("sk.hppk").display(),
                sk_bytes.len()
            );
        }
        KemCmd::Encaps { pk, seed, ct, ss } => {
            let artifact = read_artifact(&pk, "HPPK-KEM", "pk")?;
            let params = kem_params_from(&artifact)?;
            let pk = codec::decode_kem_public_key(&artifact.payload, &params)
                .map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (ciphertext, secret) = kem::encapsulate(&pk, &params, &mut g);
            let ct_bytes =
                codec::encode_kem_ciphertext(&ciphertext, &params).map_err(|e| e.to_string())?;
            write_artifact(&ct, &kem_header(&params, "ct"), &ct_bytes)?;
            write_artifact(&ss, &kem_header(&params, "ss"), &secret.0)?;
        }
        KemCmd::Decaps { sk, ct, ss } => {
            let sk_art = read_artifact(&sk, "HPPK-KEM", "sk")?;
            let params = kem_params_from(&sk_art)?;
            let sk = codec::decode_kem_secret_key(&sk_art.payload, &params)
                .map_err(|e| e.to_string())?;
            let ct_art = read_artifact(&ct, "HPPK-KEM", "ct")?;
            let ciphertext = codec::decode_kem_ciphertext(&ct_art.payload, &params)
                .map_err(|e| e.to_string())?;
            let secret = kem::decapsulate(&sk, &params, &ciphertext).map_err(|e| e.to_string())?;
            write_artifact(&ss, &kem_header(&params, "ss"), &secret.0)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_ds(cmd: DsCmd) -> AppResult<ExitCode> {
    match cmd {
        DsCmd::Keygen {
            level,
            m,
            barrett,
            seed,
            out,
        } => {
            let level = SecurityLevel::from_number(level).map_err(|e| e.to_string())?;
            let params = ds::DsParams::new(level, m, barrett).map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (sk, pk) = ds::ds_keygen(&params, &mut g);
            fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let pk_bytes = codec::encode_ds_public_key(&pk, &params).map_err(|e| e.to_string())?;
            let sk_bytes = codec::encode_ds_secret_key(&sk, &params).map_err(|e| e.to_string())?;
            write_artifact(&out.join("pk.hppk"), &ds_header(&params, "pk"), &pk_bytes)?;
            write_artifact(&out.join("sk.hppk"), &ds_header(&params, "sk"), &sk_bytes)?;
            println!(
                "wrote {} ({} bytes) and {} ({} bytes)",
                out.join("pk.hppk").display(),
                pk_bytes.len(),
                out.join("sk.hppk").display(),
                sk_bytes.len()
            );
        }
        DsCmd::Sign { sk, msg, sig } => {
            let sk_art = read_artifact(&sk, "HPPK-DS", "sk")?;
            let params = ds_params_from(&sk_art)?;
            let sk = codec::decode_ds_secret_key(&sk_art.payload, &params)
                .map_err(|e| e.to_string())?;
            let message = fs::read(&msg).map_err(|e| format!("{}: {e}", msg.display()))?;
            let signature = ds::sign(&sk, &params, &message);
            let sig_bytes =
                codec::encode_ds_signature(&signature, &params).map_err(|e| e.to_string())?;
            write_artifact(&sig, &ds_header(&params, "sig"), &sig_bytes)?;
        }
        DsCmd::Verify { pk, msg, sig } => {
            let pk_art = read_artifact(&pk, "HPPK-DS", "pk")?;
            let params = ds_params_from(&pk_art)?;
            let pk = codec::decode_ds_public_key(&pk_art.payload, &params)
                .map_err(|e| e.to_string())?;
            let message = fs::read(&msg).map_err(|e| format!("{}: {e}", msg.display()))?;
            let sig_art = read_artifact(&sig, "HPPK-DS", "sig")?;
            let signature = codec::decode_ds_signature(&sig_art.payload, &params)
                .map_err(|e| e.to_string())?;
            match ds::verify(&pk, &params, &message, &signature) {
                Ok(true) => {
                    println!("accept");
                    return Ok(ExitCode::SUCCESS);
                }
                Ok(false) => return Ok(ExitCode::from(1)),
                Err(e) => return err(e),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn kat_scheme(
    scheme: &str,
    level: u8,
    m: Option<usize>,
    rings: usize,
    barrett: usize,
) -> AppResult<codec::KatScheme> {
    let level = SecurityLevel::from_number(level).map_err(|e| e.to_string())?;
    match scheme {
        "kem" => Ok(codec::KatScheme::Kem {
            level,
            m: m.unwrap_or(2),
            rings,
        }),
        "ds" => Ok(codec::KatScheme::Ds {
            level,
            m: m.unwrap_or(1),
            barrett_extra: barrett,
        }),
        other => Err(format!("unknown scheme {other:?}, expected kem or ds")),
    }
}

fn run_kat(cmd: KatCmd) -> AppResult<ExitCode> {
    match cmd {
        KatCmd::Gen {
            scheme,
            level,
            m,
            rings,
            barrett,
            count,
            seed,
            out,
        } => {
            let scheme = kat_scheme(&scheme, level, m, rings, barrett)?;
            let seed = parse_seed(&Some(seed))?;
            let file = codec::kat_generate(scheme, &seed, count).map_err(|e| e.to_string())?;
            fs::write(&out, codec::kat_write(&file))
                .map_err(|e| format!("{}: {e}", out.display()))?;
            println!("wrote {} records to {}", count, out.display());
        }
        KatCmd::Check { input } => {
            let text =
                fs::read_to_string(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let file = codec::kat_read(&text).map_err(|e| e.to_string())?;
            codec::kat_verify(&file).map_err(|e| e.to_string())?;
            println!("{} records verified", file.records.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bench(args: BenchArgs) -> AppResult<ExitCode> {
    let level = SecurityLevel::from_number(args.level).map_err(|e| e.to_string())?;
    let seed = parse_seed(&args.seed)?;
    let mut report = BenchReport::default();
    match args.scheme.as_str() {
        "kem" => {
            let params = kem::KemParams::new(level, args.m.unwrap_or(2), args.rings)
                .map_err(|e| e.to_string())?;
            bench_kem(&params, args.iters, &seed, &mut report).map_err(|e| e.to_string())?;
        }
        "ds" => {
            let params = ds::DsParams::new(level, args.m.unwrap_or(1), args.barrett)
                .map_err(|e| e.to_string())?;
            bench_ds(&params, args.iters, &seed, &mut report).map_err(|e| e.to_string())?;
        }
        other => return Err(format!("unknown scheme {other:?}, expected kem or ds")),
    }
    print!("{}", report.to_table());
    if let Some(path) = args.csv {
        fs::write(&path, report.to_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("csv written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_attack(cmd: AttackCmd) -> AppResult<ExitCode> {
    match cmd {
        AttackCmd::KemRing {
            toy_p,
            toy_l,
            m,
            rings,
            seed,
        } => {
            let params =
                kem::KemParams::toy(toy_p, toy_l, m, rings).map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (sk, pk) = kem::kem_keygen(&params, &mut g);
            let result = attacks::kem_ring_recovery(&pk, &params).map_err(|e| e.to_string())?;
            let truth = (
                nat_u128(&sk.ring1.r)?,
                nat_u128(&sk.ring1.s)?,
            );
            println!(
                "candidates={} pairs_tried={} pairs_enumerated={} truth_included={}",
                result.candidates.len(),
                result.pairs_tried,
                result.pairs_enumerated,
                result.candidates.contains(&truth)
            );
        }
        AttackCmd::DsRing {
            toy_p,
            toy_l,
            barrett,
            m,
            seed,
        } => {
            let k = barrett.unwrap_or(toy_l + 16);
            let params = ds::DsParams::toy(toy_p, toy_l, k, m).map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (sk, pk) = ds::ds_keygen(&params, &mut g);
            let result = attacks::ds_ring_recovery(&pk.mu, &params).map_err(|e| e.to_string())?;
            println!(
                "recovered_s={} iterations={} coefficients={} matches_truth={}",
                result.s,
                result.iterations,
                result.coefficients.len(),
                result.s == nat_u128(&sk.ring1.s)?
            );
        }
        AttackCmd::Census {
            toy_p,
            toy_l,
            m,
            rings,
            seed,
        } => {
            let params =
                kem::KemParams::toy(toy_p, toy_l, m, rings).map_err(|e| e.to_string())?;
            let seed = parse_seed(&seed)?;
            let mut g = Drbg::new(&seed).map_err(|e| e.to_string())?;
            let (_, pk) = kem::kem_keygen(&params, &mut g);
            let x = g.uniform_below(&params.p);
            let us: Vec<bigmod::Nat> =
                (0..params.m).map(|_| g.uniform_below(&params.p)).collect();
            let segment = kem::encapsulate_segment(&pk, &x, &us, &params.p);
            let result =
                attacks::ciphertext_census(&pk, &segment, &params).map_err(|e| e.to_string())?;
            println!(
                "consistent_exact={} consistent_mod_p={} tuples_enumerated={}",
                result.consistent_exact, result.consistent_mod_p, result.tuples_enumerated
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn nat_u128(v: &bigmod::Nat) -> AppResult<u128> {
    use num_traits::ToPrimitive;
    v.to_u128().ok_or_else(|| "value exceeds u128".to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kem { cmd } => run_kem(cmd),
        Command::Ds { cmd } => run_ds(cmd),
        Command::Kat { cmd } => run_kat(cmd),
        Command::Bench(args) => run_bench(args),
        Command::Attack { cmd } => run_attack(cmd),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
