//! Timing harness for the KEM and signature operations.
//!
//! Reports median/mean/min wall time per operation from a monotonic clock,
//! with a raw cycle counter alongside where the platform exposes one
//! (`rdtsc` on x86_64). Medians are the headline number: they are robust to
//! scheduler noise at desk scale.

use std::fmt::Write as _;
use std::time::Instant;

use crate::drbg::Drbg;
use crate::{ds, kem, Error, SecurityLevel};

/// Warmup iterations run before measurement starts.
pub const WARMUP_ITERS: usize = 10;
/// Smallest measured iteration count accepted by [`run`].
pub const MIN_ITERS: usize = 100;

/// Timing statistics for one operation.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub scheme: String,
    pub level: u8,
    pub m: usize,
    pub op: String,
    pub iters: usize,
    pub median_ns: u64,
    pub mean_ns: u64,
    pub min_ns: u64,
    /// Median raw cycle count, when the platform exposes a counter.
    pub median_cycles: Option<u64>,
}

impl BenchRow {
    /// A median above the mean means the sample is not right-skewed the way
    /// timing noise normally leaves it; flag it rather than hide it.
    pub fn outlier_contaminated(&self) -> bool {
        self.median_ns > self.mean_ns
    }
}

/// A set of rows plus the rendering helpers.
#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[cfg(target_arch = "x86_64")]
fn read_cycle_counter() -> Option<u64> {
    // SAFETY: _rdtsc has no preconditions.
    Some(unsafe { core::arch::x86_64::_rdtsc() })
}

#[cfg(not(target_arch = "x86_64"))]
fn read_cycle_counter() -> Option<u64> {
    None
}

fn summarize(mut ns: Vec<u64>, mut cycles: Vec<u64>) -> (u64, u64, u64, Option<u64>) {
    ns.sort_unstable();
    let median = ns[ns.len() / 2];
    let mean = (ns.iter().map(|&v| v as u128).sum::<u128>() / ns.len() as u128) as u64;
    let min = ns[0];
    let median_cycles = if cycles.len() == ns.len() {
        cycles.sort_unstable();
        Some(cycles[cycles.len() / 2])
    } else {
        None
    };
    (median, mean, min, median_cycles)
}

/// Times `op` for `iters` iterations after [`WARMUP_ITERS`] warmup runs.
fn measure(iters: usize, mut op: impl FnMut()) -> (u64, u64, u64, Option<u64>) {
    for _ in 0..WARMUP_ITERS {
        op();
    }
    let mut ns = Vec::with_capacity(iters);
    let mut cycles = Vec::with_capacity(iters);
    for _ in 0..iters {
        let c0 = read_cycle_counter();
        let t0 = Instant::now();
        op();
        let dt = t0.elapsed().as_nanos() as u64;
        if let (Some(a), Some(b)) = (c0, read_cycle_counter()) {
            cycles.push(b.wrapping_sub(a));
        }
        ns.push(dt);
    }
    summarize(ns, cycles)
}

fn push_row(
    report: &mut BenchReport,
    scheme: &str,
    level: u8,
    m: usize,
    op: &str,
    iters: usize,
    stats: (u64, u64, u64, Option<u64>),
) {
    report.rows.push(BenchRow {
        scheme: scheme.into(),
        level,
        m,
        op: op.into(),
        iters,
        median_ns: stats.0,
        mean_ns: stats.1,
        min_ns: stats.2,
        median_cycles: stats.3,
    });
}

/// Benchmarks KeyGen/Encaps/Decaps for one KEM parameter set.
pub fn bench_kem(
    params: &kem::KemParams,
    iters: usize,
    seed: &[u8; 32],
    report: &mut BenchReport,
) -> Result<(), Error> {
    if iters < MIN_ITERS {
        return Err(Error::InvalidParams(format!(
            "iteration count must be at least {MIN_ITERS}"
        )));
    }
    let level = params.level.map_or(0, SecurityLevel::number);
    let mut g = Drbg::new(seed)?;
    let stats = measure(iters, || {
        let _ = kem::kem_keygen(params, &mut g);
    });
    push_row(report, "hppk-kem", level, params.m, "KeyGen", iters, stats);

    let mut g = Drbg::new(seed)?;
    let (sk, pk) = kem::kem_keygen(params, &mut g);
    let stats = measure(iters, || {
        let _ = kem::encapsulate(&pk, params, &mut g);
    });
    push_row(report, "hppk-kem", level, params.m, "Encaps", iters, stats);

    let (ct, ss) = kem::encapsulate(&pk, params, &mut g);
    let stats = measure(iters, || {
        let out = kem::decapsulate(&sk, params, &ct).expect("valid ciphertext");
        assert_eq!(out.0, ss.0);
    });
    push_row(report, "hppk-kem", level, params.m, "Decaps", iters, stats);
    Ok(())
}

/// Benchmarks KeyGen/Sign/Verify for one signature parameter set.
pub fn bench_ds(
    params: &ds::DsParams,
    iters: usize,
    seed: &[u8; 32],
    report: &mut BenchReport,
) -> Result<(), Error> {
    if iters < MIN_ITERS {
        return Err(Error::InvalidParams(format!(
            "iteration count must be at least {MIN_ITERS}"
        )));
    }
    let level = params.level.map_or(0, SecurityLevel::number);
    let mut g = Drbg::new(seed)?;
    let stats = measure(iters, || {
        let _ = ds::ds_keygen(params, &mut g);
    });
    push_row(report, "hppk-ds", level, params.m, "KeyGen", iters, stats);

    let mut g = Drbg::new(seed)?;
    let (sk, pk) = ds::ds_keygen(params, &mut g);
    let mut msg = [0u8; 32];
    g.fill(&mut msg);
    let stats = measure(iters, || {
        let _ = ds::sign(&sk, params, &msg);
    });
    push_row(report, "hppk-ds", level, params.m, "Sign", iters, stats);

    let sig = ds::sign(&sk, params, &msg);
    let stats = measure(iters, || {
        assert!(ds::verify(&pk, params, &msg, &sig).expect("well-formed"));
    });
    push_row(report, "hppk-ds", level, params.m, "Verify", iters, stats);
    Ok(())
}

impl BenchReport {
    /// Aligned text table; rows with median > mean carry an `outliers?` flag.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>3} {:<8} {:>7} {:>12} {:>12} {:>12} {:>14}",
            "scheme", "level", "m", "op", "iters", "median_ns", "mean_ns", "min_ns", "median_cycles"
        );
        for row in &self.rows {
            let cycles = row
                .median_cycles
                .map_or_else(|| "-".into(), |c| c.to_string());
            let flag = if row.outlier_contaminated() {
                "  outliers?"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "{:<10} {:>5} {:>3} {:<8} {:>7} {:>12} {:>12} {:>12} {:>14}{}",
                row.scheme,
                row.level,
                row.m,
                row.op,
                row.iters,
                row.median_ns,
                row.mean_ns,
                row.min_ns,
                cycles,
                flag,
            );
        }
        out
    }

    /// CSV rendering with a fixed header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,level,m,op,iters,median_ns,mean_ns,min_ns\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.scheme,
                row.level,
                row.m,
                row.op,
                row.iters,
                row.median_ns,
                row.mean_ns,
                row.min_ns,
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_iteration_counts() {
        let params = kem::KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let mut report = BenchReport::default();
        assert!(bench_kem(&params, 10, &[1u8; 32], &mut report).is_err());
    }

    #[test]
    fn kem_report_has_all_operations() {
        let params = kem::KemParams::new(SecurityLevel::I, 2, 1).unwrap();
        let mut report = BenchReport::default();
        bench_kem(&params, MIN_ITERS, &[2u8; 32], &mut report).unwrap();
        let ops: Vec<&str> = report.rows.iter().map(|r| r.op.as_str()).collect();
        assert_eq!(ops, ["KeyGen", "Encaps", "Decaps"]);
        for row in &report.rows {
            assert!(row.min_ns <= row.median_ns);
            assert!(row.min_ns <= row.mean_ns);
            assert_eq!(row.iters, MIN_ITERS);
        }
        let table = report.to_table();
        assert!(table.contains("Encaps"));
        let csv = report.to_csv();
        assert!(csv.starts_with("scheme,level,m,op,iters,median_ns,mean_ns,min_ns\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn ds_report_has_all_operations() {
        let params = ds::DsParams::new(SecurityLevel::I, 1, 64).unwrap();
        let mut report = BenchReport::default();
        bench_ds(&params, MIN_ITERS, &[3u8; 32], &mut report).unwrap();
        let ops: Vec<&str> = report.rows.iter().map(|r| r.op.as_str()).collect();
        assert_eq!(ops, ["KeyGen", "Sign", "Verify"]);
    }

    #[test]
    fn outlier_flag_fires_only_when_median_exceeds_mean() {
        let mk = |median_ns, mean_ns| BenchRow {
            scheme: "hppk-kem".into(),
            level: 1,
            m: 2,
            op: "KeyGen".into(),
            iters: 100,
            median_ns,
            mean_ns,
            min_ns: 1,
            median_cycles: None,
        };
        assert!(!mk(5, 10).outlier_contaminated());
        assert!(mk(10, 5).outlier_contaminated());
    }
}
