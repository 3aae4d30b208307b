use std::path::Path;
use std::process::{Command, Output};

use iscc::experiment::Manifest;
use iscc::io::load_scenario;

fn iscc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iscc"))
        .args(args)
        .current_dir(dir)
        .env("ISCC_WORKERS", "1")
        .output()
        .expect("spawn iscc")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fails(o: &Output) -> String {
    assert!(!o.status.success());
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn generate_applies_overrides_and_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = ["generate", "--small", "--set", "num_sues=3", "--seed", "7", "--with-pso"];
    ok(&iscc(d.path(), &[&args[..], &["-o", "a.toml"]].concat()));
    ok(&iscc(d.path(), &[&args[..], &["-o", "b.toml"]].concat()));
    let a = std::fs::read(d.path().join("a.toml")).unwrap();
    assert_eq!(a, std::fs::read(d.path().join("b.toml")).unwrap());
    let (s, pso) = load_scenario(&d.path().join("a.toml")).unwrap();
    assert_eq!((s.num_bs(), s.num_tues(), s.num_sues()), (5, 25, 3));
    assert!(pso.is_some());
}

#[test]
fn run_then_replay_from_manifest_then_export() {
    let d = tempfile::tempdir().unwrap();
    ok(&iscc(d.path(), &["generate", "--set", "num_bs=2", "--set", "num_sues=3", "-o", "s.toml"]));
    let out = ok(&iscc(
        d.path(),
        &["run", "--kind", "pareto", "--scenario", "s.toml", "--eta", "0,0.5,1", "--strategy", "jsatps,greedy-equal", "-o", "r1"],
    ));
    assert!(out.contains("pareto_jsatps.csv") && out.contains("pareto_greedy-equal.csv"));
    ok(&iscc(d.path(), &["run", "--from-manifest", "r1/manifest.json", "-o", "r2"]));
    for f in ["pareto_jsatps.csv", "pareto_greedy-equal.csv"] {
        let a = std::fs::read(d.path().join("r1").join(f)).unwrap();
        assert_eq!(a, std::fs::read(d.path().join("r2").join(f)).unwrap());
    }
    let m1 = Manifest::load(&d.path().join("r1/manifest.json")).unwrap();
    let m2 = Manifest::load(&d.path().join("r2/manifest.json")).unwrap();
    assert_eq!(m1.config_hash, m2.config_hash);
    assert_eq!(m1.outputs, m2.outputs);

    let out = ok(&iscc(d.path(), &["export", "r1"]));
    assert!(out.starts_with("18 rows"), "{out}");
    assert!(d.path().join("r1/plot_data.csv").exists() && d.path().join("r1/summary.json").exists());
}

#[test]
fn run_accepts_a_spec_file() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("spec.toml"),
        "kind = \"single-eval\"\netas = [0.25, 0.75]\nstrategies = [\"greedy-otps\"]\noutput_dir = \"out\"\n\n[generator]\nnum_bs = 2\ntues_per_bs = 2\nnum_sues = 2\n",
    )
    .unwrap();
    ok(&iscc(d.path(), &["run", "--spec", "spec.toml"]));
    let text = std::fs::read_to_string(d.path().join("out/single_eval.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let d = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["generate", "--set", "bogus=1", "-o", "x.toml"],
        &["generate", "--set", "carrier_hz=-1", "-o", "x.toml"],
        &["run", "--kind", "pareto", "--eta", "0.5"],
        &["run", "--strategy", "simulated-annealing"],
        &["run", "--scenario", "missing.toml"],
        &["export", "nowhere"],
    ];
    for args in cases {
        let err = fails(&iscc(d.path(), args));
        assert!(!err.trim().is_empty(), "{args:?}");
    }
    assert!(!d.path().join("x.toml").exists());
}

#[test]
fn bad_worker_count_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_iscc"))
        .args(["export", "."])
        .current_dir(d.path())
        .env("ISCC_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(fails(&o).contains("ISCC_WORKERS"));
}
