//! Throughput and accounting harness.

use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DeterministicRng;
use crate::schemes::{FragmentationPolicy, OpCounters, PhaseTimes, SchemeId, Suite};

/// Repetitions per measurement when none is given.
pub const DEFAULT_REPS: usize = 30;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub schemes: Vec<SchemeId>,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub n: usize,
    pub policy: FragmentationPolicy,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(schemes: Vec<SchemeId>, sizes: Vec<usize>) -> Self {
        BenchConfig {
            schemes,
            sizes,
            reps: DEFAULT_REPS,
            n: 4,
            policy: FragmentationPolicy::Contiguous,
            seed: 0,
        }
    }
}

/// Mean seconds per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseSeconds {
    pub encrypt: f64,
    pub transform: f64,
    pub pss: f64,
    pub fragment: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchResult {
    pub scheme: SchemeId,
    pub input_bytes: usize,
    pub reps: usize,
    pub phases: PhaseSeconds,
    /// Mean and sample standard deviation of the total, in seconds.
    pub mean: f64,
    pub std: f64,
    /// Decimal megabytes per second at the mean time.
    pub throughput_mbps: f64,
    pub counters: OpCounters,
    /// Fragment plus IV-share payload bytes over all shares.
    pub stored_bytes: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Share fresh random data `reps` times per (scheme, size), sequentially.
/// Reps are interleaved across schemes after one untimed warm-up each, so
/// slow drift in machine state lands on every scheme alike.
pub fn run_bench(suite: &Suite, cfg: &BenchConfig) -> Result<Vec<BenchResult>> {
    if cfg.reps == 0 {
        return Err(Error::contract("reps must be at least 1"));
    }
    let block_bytes = suite.spec().bytes();
    if let Some(&s) = cfg.sizes.iter().find(|&&s| s < block_bytes) {
        return Err(Error::contract(format!("size {s} is below one block")));
    }
    let mut rng = DeterministicRng::new(cfg.seed);
    let key = suite.spec().random_key(&mut rng);
    let mut out = Vec::with_capacity(cfg.schemes.len() * cfg.sizes.len());
    for &size in &cfg.sizes {
        let mut data = vec![0u8; size];
        let k = cfg.schemes.len();
        let mut totals = vec![Vec::with_capacity(cfg.reps); k];
        let mut phases = vec![PhaseTimes::default(); k];
        let mut last = vec![None; k];
        for &scheme in &cfg.schemes {
            rng.fill_bytes(&mut data);
            suite.share(scheme, Some(&key), &data, cfg.n, cfg.policy, &mut rng)?;
        }
        for _ in 0..cfg.reps {
            for (j, &scheme) in cfg.schemes.iter().enumerate() {
                rng.fill_bytes(&mut data);
                let start = Instant::now();
                let d = suite.share(scheme, Some(&key), &data, cfg.n, cfg.policy, &mut rng)?;
                totals[j].push(secs(start.elapsed()));
                let p = &mut phases[j];
                p.encrypt += d.phases.encrypt;
                p.transform += d.phases.transform;
                p.pss += d.phases.pss;
                p.fragment += d.phases.fragment;
                last[j] = Some((d.counters, d.stored_bytes()));
            }
        }
        let r = cfg.reps as f64;
        for (j, &scheme) in cfg.schemes.iter().enumerate() {
            let (counters, stored_bytes) = last[j].expect("reps >= 1");
            let (mean, std) = mean_std(&totals[j]);
            let p = phases[j];
            out.push(BenchResult {
                scheme,
                input_bytes: size,
                reps: cfg.reps,
                phases: PhaseSeconds {
                    encrypt: secs(p.encrypt) / r,
                    transform: secs(p.transform) / r,
                    pss: secs(p.pss) / r,
                    fragment: secs(p.fragment) / r,
                    total: mean,
                },
                mean,
                std,
                throughput_mbps: size as f64 / 1e6 / mean,
                counters,
                stored_bytes,
            });
        }
    }
    Ok(out)
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    #[serde(rename = "schemeId")]
    pub scheme_id: String,
    #[serde(rename = "inputBytes")]
    pub input_bytes: u64,
    #[serde(rename = "throughputMBps")]
    pub throughput_mbps: f64,
    #[serde(rename = "xorOps")]
    pub xor_ops: u64,
    #[serde(rename = "cipherCalls")]
    pub cipher_calls: u64,
    #[serde(rename = "storedBytes")]
    pub stored_bytes: u64,
    pub mean: f64,
    pub std: f64,
}

pub const CSV_HEADER: &str = "schemeId,inputBytes,throughputMBps,xorOps,cipherCalls,storedBytes,mean,std";

impl From<&BenchResult> for CsvRow {
    fn from(r: &BenchResult) -> Self {
        CsvRow {
            scheme_id: r.scheme.name().to_owned(),
            input_bytes: r.input_bytes as u64,
            throughput_mbps: r.throughput_mbps,
            xor_ops: r.counters.xor_block_ops,
            cipher_calls: r.counters.cipher_block_calls,
            stored_bytes: r.stored_bytes as u64,
            mean: r.mean,
            std: r.std,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv(results: &[BenchResult], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in results {
        w.serialize(CsvRow::from(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(csv_err)
}

pub fn emit_csv(results: &[BenchResult], path: &Path) -> Result<()> {
    write_csv(results, std::fs::File::create(path)?)
}

fn mean_of(results: &[BenchResult], scheme: SchemeId, size: usize) -> Result<f64> {
    results
        .iter()
        .find(|r| r.scheme == scheme && r.input_bytes == size)
        .map(|r| r.mean)
        .ok_or_else(|| Error::contract(format!("no result for {scheme} at {size} bytes")))
}

/// The comparative claims checked at one input size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingReport {
    pub input_bytes: usize,
    /// Throughputs of the ROSSake variant, SSAKE, Bastion and Rivest AON.
    pub throughputs: [f64; 4],
    pub ordered: bool,
    /// `(t_SSAKE - t_CTR) / (t_Bastion - t_CTR)`.
    pub overhead_ratio: f64,
    pub overhead_ok: bool,
}

/// Maximum SSAKE overhead as a fraction of Bastion's.
pub const OVERHEAD_LIMIT: f64 = 0.6;

/// Check `ROSSake >= SSAKE >= Bastion >= AON` throughput and the SSAKE
/// overhead bound, using `rossake` as the ROSSake variant.
pub fn check_ordering(results: &[BenchResult], size: usize, rossake: SchemeId) -> Result<OrderingReport> {
    let t = |s| mean_of(results, s, size);
    let means = [
        t(rossake)?,
        t(SchemeId::Ssake)?,
        t(SchemeId::Bastion)?,
        t(SchemeId::RivestAon)?,
    ];
    let ctr = t(SchemeId::CtrNaive)?;
    let throughputs = means.map(|m| size as f64 / 1e6 / m);
    let ordered = throughputs.windows(2).all(|w| w[0] >= w[1]);
    let overhead_ratio = (means[1] - ctr) / (means[2] - ctr);
    let overhead_ok = means[1] - ctr <= OVERHEAD_LIMIT * (means[2] - ctr);
    Ok(OrderingReport {
        input_bytes: size,
        throughputs,
        ordered,
        overhead_ratio,
        overhead_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Vec<BenchResult> {
        let suite = Suite::production();
        let mut cfg = BenchConfig::new(vec![SchemeId::Ssake, SchemeId::Bastion], vec![16, 1000, 4096]);
        cfg.reps = 3;
        run_bench(&suite, &cfg).unwrap()
    }

    #[test]
    fn accounting_per_result() {
        let rs = small();
        assert_eq!(rs.len(), 6);
        for r in &rs {
            let c = r.input_bytes.div_ceil(16);
            // 4 shares: pad so the transformed length splits evenly
            match r.scheme {
                SchemeId::Ssake => {
                    let p = c.div_ceil(4) * 4;
                    assert_eq!(r.stored_bytes, 16 * (p + 4));
                    assert_eq!(r.counters.xor_block_ops, (p + 1 + 4 - 2) as u64);
                }
                SchemeId::Bastion => {
                    assert_eq!(r.stored_bytes % 16, 0);
                    let cb = r.stored_bytes / 16;
                    assert_eq!(r.counters.xor_block_ops, 2 * cb as u64 - 1);
                }
                _ => unreachable!(),
            }
            let p = r.phases;
            assert!(p.encrypt + p.transform + p.pss + p.fragment <= p.total * 1.0001);
            assert!(r.std >= 0.0 && r.throughput_mbps > 0.0);
        }
    }

    #[test]
    fn csv_round_trip() {
        let rs = small();
        let mut buf = Vec::new();
        write_csv(&rs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 7);
        let back = read_csv(buf.as_slice()).unwrap();
        let expect: Vec<CsvRow> = rs.iter().map(CsvRow::from).collect();
        assert_eq!(back, expect);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn bad_config() {
        let suite = Suite::production();
        let mut cfg = BenchConfig::new(vec![SchemeId::Ssake], vec![8]);
        assert!(run_bench(&suite, &cfg).is_err());
        cfg.sizes = vec![16];
        cfg.reps = 0;
        assert!(run_bench(&suite, &cfg).is_err());
    }

    #[test]
    fn ordering_arithmetic() {
        let mk = |scheme, mean| BenchResult {
            scheme,
            input_bytes: 1_000_000,
            reps: 1,
            phases: PhaseSeconds::default(),
            mean,
            std: 0.0,
            throughput_mbps: 1.0 / mean,
            counters: OpCounters::default(),
            stored_bytes: 0,
        };
        let rs = vec![
            mk(SchemeId::CtrNaive, 1.0),
            mk(SchemeId::RossakeBc, 0.9),
            mk(SchemeId::Ssake, 1.05),
            mk(SchemeId::Bastion, 1.2),
            mk(SchemeId::RivestAon, 3.0),
        ];
        let r = check_ordering(&rs, 1_000_000, SchemeId::RossakeBc).unwrap();
        assert!(r.ordered && r.overhead_ok);
        assert!((r.overhead_ratio - 0.25).abs() < 1e-9);
        assert!(check_ordering(&rs, 1_000_000, SchemeId::RossakeSponge).is_err());
    }
}
