use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decentral"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn train_is_reproducible_and_stamped() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("quadratic_pair.ini");
    for d in [&a, &b] {
        let code = run(&["train", "--config", cfg.to_str().unwrap(), "--out", d.path().to_str().unwrap(), "--seed", "4", "--threads", "2"]);
        assert_eq!(code, 0);
    }
    let names = ["train_summary.csv", "trace_given_gd.csv", "trace_given_algorithm1.csv", "smoothness_given.csv"];
    for n in names {
        let x = std::fs::read_to_string(a.path().join(n)).unwrap();
        let y = std::fs::read_to_string(b.path().join(n)).unwrap();
        assert_eq!(x, y, "{n}");
        let mut lines = x.lines();
        assert!(lines.next().unwrap().starts_with("config_hash,seed,"));
        assert!(lines.all(|l| l.split(',').nth(1) == Some("4")));
    }
    assert_eq!(
        std::fs::read_to_string(a.path().join("config.ini")).unwrap(),
        std::fs::read_to_string(&cfg).unwrap()
    );
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let bad = out.path().join("bad.ini");
    std::fs::write(&bad, "[pep]\nmode = spiral\n").unwrap();
    assert_eq!(run(&["pep-sweep", "--config", bad.to_str().unwrap(), "--out", o]), 1);
    assert_eq!(run(&["pep-sweep", "--config", "/nonexistent.ini", "--out", o]), 1);

    // an iteration budget of one cannot certify: every row fails, the sweep still finishes
    let starved = out.path().join("starved.ini");
    std::fs::write(&starved, "[pep]\nmode = pairs\nk = 2\npairs = 1/3:5/3\nmax_iters = 1\n").unwrap();
    assert_eq!(run(&["pep-sweep", "--config", starved.to_str().unwrap(), "--out", o]), 2);
    assert!(std::fs::read_to_string(out.path().join("pep_sweep.csv")).unwrap().lines().count() == 2);

    let ok = out.path().join("ok.ini");
    std::fs::write(&ok, "[pep]\nmode = pairs\nk = 2\npairs = 1:1\n").unwrap();
    assert_eq!(run(&["pep-sweep", "--config", ok.to_str().unwrap(), "--out", o]), 0);
}

#[test]
fn export_writes_sdpa_and_metadata() {
    let out = tempfile::tempdir().unwrap();
    let cfg = configs().join("export.ini");
    assert_eq!(run(&["export-sdpa", "--config", cfg.to_str().unwrap(), "--out", out.path().to_str().unwrap()]), 0);
    let sdp = std::fs::read_to_string(out.path().join("point1_r1_algorithm1.dat-s")).unwrap();
    let back = decentral_core::sdp::sdpa::read::<f64>(&sdp).unwrap();
    let meta = std::fs::read_to_string(out.path().join("point1_r1_algorithm1.jsonl")).unwrap();
    assert_eq!(meta.lines().count(), back.constraints.len());
}
