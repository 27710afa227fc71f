use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kexshard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kexshard"))
        .current_dir(dir)
        .env_remove("KEXSHARD_TOY_BITS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 1, "one document: {text}");
    serde_json::from_str(&text).expect("valid json")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let data: Vec<u8> = (0..7777u32).map(|x| (x.wrapping_mul(2654435761) >> 13) as u8).collect();
    fs::write(dir.path().join("in.bin"), data).unwrap();
    let o = kexshard(dir.path(), &["keygen", "k.bin", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    dir
}

#[test]
fn keygen_widths_and_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&kexshard(d, &["keygen", "a.key"])), 0);
    assert_eq!(fs::read(d.join("a.key")).unwrap().len(), 16);
    assert_eq!(code(&kexshard(d, &["keygen", "a.key"])), 1);
    assert_eq!(code(&kexshard(d, &["keygen", "a.key", "--force"])), 0);
    assert_eq!(code(&kexshard(d, &["keygen", "t.key", "--bits", "8"])), 0);
    assert_eq!(fs::read(d.join("t.key")).unwrap().len(), 1);
    assert_eq!(code(&kexshard(d, &["keygen", "bad.key", "--bits", "12"])), 1);
}

#[test]
fn split_reconstruct_every_scheme() {
    let dir = setup();
    let d = dir.path();
    for scheme in [
        "ctr-naive", "ssms", "ssake", "rossake-bc", "rossake-sponge", "bastion", "rivest-aont", "rivest-aon",
    ] {
        for policy in ["contiguous", "interleaved"] {
            let out = format!("{scheme}-{policy}");
            let o = kexshard(
                d,
                &["split", "in.bin", "--scheme", scheme, "--n", "3", "--key-file", "k.bin", "--out-dir", &out, "--policy", policy],
            );
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            let o = kexshard(
                d,
                &["reconstruct", "--shares", &format!("{out}/*.kxsh"), "--key-file", "k.bin", "--verify", "in.bin"],
            );
            assert_eq!(code(&o), 0, "{scheme} {policy}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
}

#[test]
fn toy_width_round_trip() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(code(&kexshard(d, &["keygen", "t.key", "--bits", "16", "--seed", "1"])), 0);
    let args = ["split", "in.bin", "--scheme", "ssake", "--n", "2", "--key-file", "t.key", "--out-dir", "t", "--toy-seed", "9"];
    assert_eq!(code(&kexshard(d, &args)), 0);
    let o = kexshard(d, &["reconstruct", "--shares", "t/*.kxsh", "--key-file", "t.key", "--toy-seed", "9", "--out", "t.out"]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(d.join("t.out")).unwrap(), fs::read(d.join("in.bin")).unwrap());
}

#[test]
fn split_reports_counters() {
    let dir = setup();
    let o = kexshard(
        dir.path(),
        &["--json", "split", "in.bin", "--scheme", "bastion", "--n", "4", "--key-file", "k.bin", "--out-dir", "s"],
    );
    assert_eq!(code(&o), 0);
    let doc = json(&o);
    assert_eq!(doc["shares"].as_array().unwrap().len(), 4);
    // 7777 bytes = 487 blocks; c = 488 is already even and divisible by 4
    assert_eq!(doc["counters"]["xor_block_ops"], 2 * 488 - 1);
    assert_eq!(doc["storedBytes"], 488 * 16);
}

#[test]
fn ssms_ignores_key_with_warning() {
    let dir = setup();
    let o = kexshard(
        dir.path(),
        &["split", "in.bin", "--scheme", "ssms", "--n", "2", "--key-file", "k.bin", "--out-dir", "m"],
    );
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("key-file ignored"));
    let o = kexshard(dir.path(), &["reconstruct", "--shares", "m/*.kxsh", "--verify", "in.bin"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn keyed_scheme_without_key_is_usage_error() {
    let dir = setup();
    let o = kexshard(dir.path(), &["split", "in.bin", "--scheme", "ssake", "--n", "2", "--out-dir", "x"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_and_corrupt_shares_exit_2() {
    let dir = setup();
    let d = dir.path();
    let split = ["split", "in.bin", "--scheme", "ssake", "--n", "4", "--key-file", "k.bin", "--out-dir", "s"];
    assert_eq!(code(&kexshard(d, &split)), 0);

    let path = d.join("s/in.bin.3.kxsh");
    let mut bytes = fs::read(&path).unwrap();
    bytes[40] ^= 1;
    fs::write(&path, &bytes).unwrap();
    let o = kexshard(d, &["reconstruct", "--shares", "s/*.kxsh", "--key-file", "k.bin", "--out", "o"]);
    assert_eq!(code(&o), 2);

    fs::remove_file(&path).unwrap();
    let o = kexshard(d, &["--json", "reconstruct", "--shares", "s/*.kxsh", "--key-file", "k.bin", "--out", "o"]);
    assert_eq!(code(&o), 2);
    assert!(json(&o)["error"].as_str().unwrap().contains("[3]"));

    let o = kexshard(d, &["reconstruct", "--shares", "nothing/*.kxsh", "--key-file", "k.bin", "--out", "o"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn wrong_key_gives_garbage_with_exit_0() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(code(&kexshard(d, &["keygen", "other.bin", "--seed", "6"])), 0);
    let split = ["split", "in.bin", "--scheme", "ssake", "--n", "3", "--key-file", "k.bin", "--out-dir", "s"];
    assert_eq!(code(&kexshard(d, &split)), 0);
    let o = kexshard(d, &["reconstruct", "--shares", "s/*.kxsh", "--key-file", "other.bin", "--out", "o"]);
    assert_eq!(code(&o), 0);
    assert_ne!(fs::read(d.join("o")).unwrap(), fs::read(d.join("in.bin")).unwrap());
    let o = kexshard(d, &["reconstruct", "--shares", "s/*.kxsh", "--key-file", "other.bin", "--verify", "in.bin"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn seeded_split_is_reproducible() {
    let dir = setup();
    let d = dir.path();
    for out in ["r1", "r2"] {
        let args = ["split", "in.bin", "--scheme", "rossake-bc", "--n", "3", "--key-file", "k.bin", "--out-dir", out, "--seed", "42"];
        assert_eq!(code(&kexshard(d, &args)), 0);
    }
    for k in 1..=3 {
        let name = format!("in.bin.{k}.kxsh");
        assert_eq!(fs::read(d.join("r1").join(&name)).unwrap(), fs::read(d.join("r2").join(&name)).unwrap());
    }
}

#[test]
fn attack_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = kexshard(d, &["--json", "attack", "--scheme", "ctr-naive", "--adversary", "prefix", "--trials", "1000", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["win_rate"], 1.0);

    let args = ["--json", "attack", "--scheme", "ssake", "--adversary", "prefix", "--trials", "2000", "--seed", "3"];
    let a = kexshard(d, &args);
    let report = &json(&a)["report"];
    assert_eq!(report["verdict"], "negligible");
    assert_eq!(a.stdout, kexshard(d, &args).stdout);

    let o = kexshard(d, &["attack", "--scheme", "ssake", "--adversary", "prefix", "--trials", "0"]);
    assert_eq!(code(&o), 1);
    let o = kexshard(d, &["attack", "--scheme", "bastion", "--adversary", "iv-collect", "--trials", "100"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not apply"));
}

#[test]
fn toy_bits_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_kexshard"))
        .current_dir(dir.path())
        .env("KEXSHARD_TOY_BITS", "9")
        .args(["--json", "attack", "--scheme", "ssms", "--adversary", "prefix", "--trials", "100"])
        .output()
        .unwrap();
    assert_eq!(json(&o)["toyBits"], 9);
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&kexshard(d, &["analyze", "--check", "matrices", "--c", "8"])), 0);

    let o = kexshard(d, &["--json", "analyze", "--check", "prop1", "--toy-bits", "6", "--samples", "20000", "--linear-sigma"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["pass"], false);

    // zero never occurs in a differential, so only the nonzero-cell test can pass
    let o = kexshard(d, &["--json", "analyze", "--check", "prop1", "--toy-bits", "6", "--samples", "20000", "--seed", "4"]);
    let doc = json(&o);
    for c in doc["report"]["coordinates"].as_array().unwrap() {
        assert_eq!(c["nonzero"]["pass"], true);
    }

    let o = kexshard(d, &["analyze", "--check", "prop4", "--toy-bits", "10", "--samples", "100"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = kexshard(d, &["bench", "--schemes", "ssake,bastion", "--sizes", "1KiB,4K,16000", "--reps", "2", "--out", "b.csv"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.join("b.csv")).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("schemeId,inputBytes,throughputMBps,xorOps,cipherCalls,storedBytes,mean,std"));
}

#[test]
fn unknown_command_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&kexshard(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&kexshard(dir.path(), &["split", "--bogus"])), 1);
    assert_eq!(code(&kexshard(dir.path(), &["--help"])), 0);
}
