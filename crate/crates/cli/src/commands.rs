use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use kexshard::analysis::{
    adversary_by_name, matrices_check, prop1_check, prop4_check, run_cake_game, run_sake_game,
    Adversary, GameConfig, IvGuessAdversary, SigmaSource, UniformityReport,
};
use kexshard::bench::{run_bench, write_csv, BenchConfig};
use kexshard::block::{Block, BlockSpec, CipherKey};
use kexshard::rng::DeterministicRng;
use kexshard::schemes::{Share, Suite};
use kexshard::storage::{decode_share, disperse, DirectorySite, StorageSite};
use serde_json::json;

use crate::output::{CliError, Outcome, EXIT_ANALYSIS};
use crate::{AnalyzeArgs, AttackArgs, BenchArgs, Check, Game, KeygenArgs, ReconstructArgs, SplitArgs};

type CmdResult = Result<Outcome, CliError>;

fn rng_from(seed: Option<u64>) -> DeterministicRng {
    seed.map_or_else(DeterministicRng::from_entropy, DeterministicRng::new)
}

/// AES at 128 bits, seeded table permutations below.
fn suite_for(bits: u32, toy_seed: u64) -> Result<Suite, CliError> {
    if bits == 128 {
        Ok(Suite::production())
    } else {
        Ok(Suite::toy(bits, toy_seed)?)
    }
}

fn read_key(path: &Path) -> Result<CipherKey, CliError> {
    let bytes = fs::read(path).with_context(|| format!("reading key file {}", path.display()))?;
    if bytes.is_empty() || bytes.len() > 16 {
        return Err(CliError::usage(anyhow!(
            "key file {} holds {} bytes, expected 1 to 16",
            path.display(),
            bytes.len()
        )));
    }
    let spec = BlockSpec::new(bytes.len() as u32 * 8)?;
    Ok(CipherKey(spec.block_from_bytes(&bytes)?))
}

fn key_bits(path: &Path) -> Result<u32, CliError> {
    Ok(fs::metadata(path)
        .with_context(|| format!("reading key file {}", path.display()))?
        .len() as u32
        * 8)
}

pub fn keygen(a: KeygenArgs) -> CmdResult {
    let spec = BlockSpec::new(a.bits)?;
    if !spec.is_byte_aligned() {
        return Err(CliError::usage(anyhow!("key width {} is not a whole number of bytes", a.bits)));
    }
    if a.out.exists() && !a.force {
        return Err(CliError::usage(anyhow!(
            "{} exists; pass --force to overwrite",
            a.out.display()
        )));
    }
    let key = spec.random_key(&mut rng_from(a.seed));
    fs::write(&a.out, spec.block_to_bytes(key.0))
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(Outcome::ok(
        format!("wrote {}-bit key to {}\n", a.bits, a.out.display()),
        json!({ "command": "keygen", "path": a.out, "bits": a.bits }),
    ))
}

pub fn split(a: SplitArgs) -> CmdResult {
    let mut warnings = Vec::new();
    let key = match (&a.key_file, a.scheme.needs_key()) {
        (Some(path), true) => Some(read_key(path)?),
        (Some(_), false) => {
            warnings.push(format!("{} is keyless; --key-file ignored", a.scheme));
            None
        }
        (None, true) => return Err(CliError::usage(anyhow!("{} needs --key-file", a.scheme))),
        (None, false) => None,
    };
    let bits = match (&a.key_file, key) {
        (Some(path), Some(_)) => key_bits(path)?,
        _ => a.bits,
    };
    let suite = suite_for(bits, a.toy_seed)?;
    let data = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let name = match &a.name {
        Some(n) => n.clone(),
        None => a
            .input
            .file_name()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::usage(anyhow!("cannot derive an object name; pass --name")))?
            .to_owned(),
    };
    let d = suite.share(a.scheme, key.as_ref(), &data, a.n, a.policy, &mut rng_from(a.seed))?;

    let site = DirectorySite::new(&a.out_dir)?;
    let sites: Vec<&dyn StorageSite> = vec![&site; d.shares.len()];
    let names = disperse(&d.shares, &sites, &name)?;
    let paths: Vec<_> = names.iter().map(|n| a.out_dir.join(n)).collect();

    let c = d.counters;
    let mut text = String::new();
    for p in &paths {
        let _ = writeln!(text, "{}", p.display());
    }
    let _ = writeln!(
        text,
        "scheme={} n={} xorOps={} cipherCalls={} roBlocks={} storedBytes={}",
        a.scheme,
        a.n,
        c.xor_block_ops,
        c.cipher_block_calls,
        c.ro_blocks_generated,
        d.stored_bytes()
    );
    Ok(Outcome {
        text,
        json: json!({
            "command": "split",
            "scheme": a.scheme.name(),
            "n": a.n,
            "shares": paths,
            "counters": c,
            "storedBytes": d.stored_bytes(),
        }),
        code: 0,
        warnings,
    })
}

fn load_shares(pattern: &str) -> Result<Vec<Share>, CliError> {
    let paths = glob::glob(pattern).map_err(|e| CliError::usage(anyhow!("bad glob '{pattern}': {e}")))?;
    let mut shares = Vec::new();
    for entry in paths {
        let path = entry.map_err(|e| CliError::usage(anyhow!(e)))?;
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let share =
            decode_share(&bytes).map_err(|e| CliError::shares(anyhow!("{}: {e}", path.display())))?;
        shares.push(share);
    }
    if shares.is_empty() {
        return Err(CliError::shares(anyhow!("no containers match '{pattern}'")));
    }
    Ok(shares)
}

pub fn reconstruct(a: ReconstructArgs) -> CmdResult {
    let shares = load_shares(&a.shares)?;
    let head = &shares[0];
    let (scheme, spec) = (head.scheme, head.spec);
    let mut warnings = Vec::new();
    let key = match (&a.key_file, scheme.needs_key()) {
        (Some(path), true) => {
            let k = read_key(path)?;
            if key_bits(path)? != spec.bits() {
                return Err(CliError::usage(anyhow!(
                    "key is {} bits, shares use {}-bit blocks",
                    key_bits(path)?,
                    spec.bits()
                )));
            }
            Some(k)
        }
        (Some(_), false) => {
            warnings.push(format!("{scheme} is keyless; --key-file ignored"));
            None
        }
        (None, true) => return Err(CliError::usage(anyhow!("{scheme} needs --key-file"))),
        (None, false) => None,
    };
    let suite = suite_for(spec.bits(), a.toy_seed)?;
    let plain = suite.reconstruct(key.as_ref(), &shares)?;
    if let Some(out) = &a.out {
        fs::write(out, &plain).with_context(|| format!("writing {}", out.display()))?;
    }
    let verified = match &a.verify {
        Some(path) => {
            let reference = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            Some(reference == plain)
        }
        None => None,
    };
    if verified == Some(false) {
        return Err(CliError::shares(anyhow!("reconstruction differs from {}", a.verify.as_ref().map_or_else(String::new, |p| p.display().to_string()))));
    }
    let mut text = format!("reconstructed {} bytes from {} shares ({scheme})\n", plain.len(), shares.len());
    if verified.is_some() {
        text.push_str("verify: identical\n");
    }
    let json = json!({
        "command": "reconstruct",
        "scheme": scheme.name(),
        "shares": shares.len(),
        "bytes": plain.len(),
        "out": a.out,
        "verified": verified,
    });
    Ok(Outcome {
        text,
        json,
        code: 0,
        warnings,
    })
}

pub fn attack(a: AttackArgs) -> CmdResult {
    let adversary: Box<dyn Adversary> = match (a.adversary.as_str(), a.budget) {
        ("iv-guess", Some(budget)) => Box::new(IvGuessAdversary { budget }),
        (_, Some(_)) => return Err(CliError::usage(anyhow!("--budget only applies to iv-guess"))),
        (name, None) => adversary_by_name(name)?,
    };
    if !adversary.supports(a.scheme) {
        return Err(CliError::usage(anyhow!(
            "adversary {} does not apply to {}",
            adversary.name(),
            a.scheme
        )));
    }
    let suite = Suite::toy(a.toy_bits, a.seed)?;
    let mut cfg = GameConfig::new(a.scheme, a.toy_bits, a.trials);
    cfg.n = a.n;
    cfg.plaintext_blocks = a.blocks;
    cfg.lambda = a.lambda;
    cfg.policy = a.policy;
    cfg.seed = a.seed;
    let report = match a.game {
        Game::Sake => run_sake_game(&suite, adversary.as_ref(), &cfg)?,
        Game::Cake => run_cake_game(&suite, adversary.as_ref(), &cfg)?,
    };
    let game = match a.game {
        Game::Sake => "sake",
        Game::Cake => "cake",
    };
    let text = format!(
        "game={game} scheme={} adversary={} toyBits={}\n{}",
        a.scheme,
        adversary.name(),
        a.toy_bits,
        report.to_kv()
    );
    Ok(Outcome::ok(
        text,
        json!({
            "command": "attack",
            "game": game,
            "scheme": a.scheme.name(),
            "adversary": adversary.name(),
            "toyBits": a.toy_bits,
            "seed": a.seed,
            "report": report,
        }),
    ))
}

fn uniformity_text(r: &UniformityReport) -> String {
    let mut t = String::new();
    for c in &r.coordinates {
        let f = &c.full;
        let _ = write!(
            t,
            "{:<20} chi2={:>10.2} crit={:.2} p={:.4} {}",
            c.label,
            f.statistic,
            f.critical,
            f.p_value,
            if f.pass { "PASS" } else { "FAIL" }
        );
        if let Some(nz) = &c.nonzero {
            let _ = write!(
                t,
                "  nonzero: chi2={:.2} crit={:.2} {}",
                nz.statistic,
                nz.critical,
                if nz.pass { "PASS" } else { "FAIL" }
            );
        }
        t.push('\n');
    }
    t
}

pub fn analyze(a: AnalyzeArgs) -> CmdResult {
    let sigma = match a.linear_sigma {
        Some(v) => {
            let spec = BlockSpec::new(a.toy_bits)?;
            SigmaSource::Linear(spec.check(Block(v))?)
        }
        None => SigmaSource::FreshToy,
    };
    let (pass, text, detail) = match a.check {
        Check::Prop1 | Check::Prop4 => {
            let r = if a.check == Check::Prop1 {
                prop1_check(a.toy_bits, a.c, a.samples, sigma, a.seed)?
            } else {
                prop4_check(a.toy_bits, a.c, a.samples, sigma, a.seed)?
            };
            (r.all_pass(), uniformity_text(&r), json!(r))
        }
        Check::Matrices => {
            let r = matrices_check(a.c)?;
            let text = format!(
                "c={} ssake reduction: {}\nbastion pairs: {} checked, {} not equivalent {:?}\n",
                r.c,
                if r.ssake_reduction { "PASS" } else { "FAIL" },
                r.bastion_pairs,
                r.bastion_failures.len(),
                r.bastion_failures
            );
            (r.pass(), text, json!(r))
        }
    };
    let check = format!("{:?}", a.check).to_ascii_lowercase();
    let text = format!("{text}{check}: {}\n", if pass { "PASS" } else { "FAIL" });
    Ok(Outcome {
        text,
        json: json!({
            "command": "analyze",
            "check": check,
            "toyBits": a.toy_bits,
            "c": a.c,
            "samples": a.samples,
            "seed": a.seed,
            "linearSigma": a.linear_sigma.map(|v| v.to_string()),
            "pass": pass,
            "report": detail,
        }),
        code: if pass { 0 } else { EXIT_ANALYSIS },
        warnings: Vec::new(),
    })
}

pub fn bench(a: BenchArgs) -> CmdResult {
    let mut cfg = BenchConfig::new(a.schemes, a.sizes);
    cfg.reps = a.reps;
    cfg.n = a.n;
    cfg.policy = a.policy;
    cfg.seed = a.seed;
    let results = run_bench(&Suite::production(), &cfg)?;
    let mut text = format!(
        "{:<15} {:>12} {:>10} {:>10} {:>10} {:>12}\n",
        "scheme", "bytes", "MB/s", "mean s", "std s", "xorOps"
    );
    for r in &results {
        let _ = writeln!(
            text,
            "{:<15} {:>12} {:>10.1} {:>10.4} {:>10.4} {:>12}",
            r.scheme.name(),
            r.input_bytes,
            r.throughput_mbps,
            r.mean,
            r.std,
            r.counters.xor_block_ops
        );
    }
    if let Some(path) = &a.out {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&results, file)?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(Outcome::ok(
        text,
        json!({ "command": "bench", "results": results, "csv": a.out }),
    ))
}
