use std::path::{Path, PathBuf};

use decentral_core::algorithms::Method;
use decentral_core::ingest::parse_libsvm;
use decentral_core::problem::Objective;
use decentral_core::smoothness::exact_smoothness;
use decentral_harness::estimate::run_estimate;
use decentral_harness::pep_sweep::{self, SweepSettings};
use decentral_harness::synth::{generate_text, SynthSpec};
use decentral_harness::train::run_train;
use decentral_harness::{data, Config, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> Config {
    Config::load(&root().join("configs").join(name)).unwrap()
}

#[test]
fn committed_dataset_matches_generator() {
    let committed = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/w8a_synthetic.libsvm")).unwrap();
    assert_eq!(committed, generate_text(&SynthSpec::default()));
    let d = parse_libsvm::<f64>(&committed).unwrap();
    assert_eq!(d.samples.len(), 1000);
    let pos = d.samples.iter().filter(|s| s.label > 0).count();
    assert!((15..=60).contains(&pos), "{pos} positives");
}

#[test]
fn homogeneous_pair_ratio_is_exactly_one() {
    let cfg = Config::parse("[pep]\nmode = pairs\nmu = 0.1\nk = 3\npairs = 1:1, 1/3:5/3\n", ".").unwrap();
    let s = SweepSettings::from_config(&cfg).unwrap();
    let r = pep_sweep::run(&s, &Output::discard(&cfg, 0)).unwrap();
    assert_eq!(r.ratios[0].ratio, 1.0);
    assert!(r.ratios.iter().all(|row| row.algorithm1.ok() && row.gd.ok()));
    assert_eq!(r.failures(), 0);
}

#[test]
fn curve_mode_covers_every_schedule_and_k() {
    let cfg = Config::parse("[pep]\nmode = curve\nk = 3\nobjective = function_gap\nswitches = 1, none\n", ".").unwrap();
    let s = SweepSettings::from_config(&cfg).unwrap();
    let r = pep_sweep::run(&s, &Output::discard(&cfg, 0)).unwrap();
    assert_eq!(r.curves.len(), 9);
    for sched in ["gd", "1", "none"] {
        let c = r.curve(sched, 1.0);
        assert_eq!(c.iter().map(|c| c.k).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
    // before the switch the schedule is the no-switch one
    assert_eq!(r.curve("1", 1.0)[0].record.value, r.curve("none", 1.0)[0].record.value);
}

#[test]
fn quadratic_pair_algorithm1_beats_gd() {
    let report = run_train(&config("quadratic_pair.ini"), &Output::discard(&config("quadratic_pair.ini"), 0)).unwrap();
    let gd = report.get("given", Method::Gd).unwrap().iterations_to_tol.unwrap();
    let a1 = report.get("given", Method::Algorithm1).unwrap().iterations_to_tol.unwrap();
    assert!(a1 < gd, "algorithm1 {a1} vs gd {gd}");
}

#[test]
fn estimates_by_label_and_pooled() {
    let mut text = config("estimate_l.ini").text().to_string();
    text = text.replace("trials = 10000", "trials = 300");
    let cfg = Config::parse(&text, root().join("configs")).unwrap();
    let rows = run_estimate(&cfg, &Output::discard(&cfg, 0)).unwrap();

    let pooled = rows.iter().find(|r| r.scheme == "none").unwrap();
    assert_eq!(pooled.exact.per_agent_l.len(), 1);
    let loaded = data::load(&cfg).unwrap();
    let all: Vec<usize> = (0..loaded.data.samples.len()).collect();
    let whole: Objective<f64> = data::local_objectives(&loaded, &[all]).unwrap().remove(0);
    let (_, l) = exact_smoothness(&whole).unwrap();
    assert!((pooled.exact.per_agent_l[0] - l).abs() <= 1e-12 * l);

    let by_label = rows.iter().find(|r| r.scheme == "by_label").unwrap();
    let l = &by_label.exact.per_agent_l;
    assert_eq!(l.len(), 2);
    assert!((l[0] - l[1]).abs() > 0.1 * l[0].max(l[1]), "{l:?}");
    for r in &rows {
        for (g, e) in r.grad_diff.per_agent_l.iter().zip(&r.exact.per_agent_l) {
            assert!(g <= &(e * (1.0 + 1e-9)), "{}: {g} > {e}", r.scheme);
        }
    }
}

#[test]
fn dgd_stalls_on_label_split() {
    let mut text = config("logistic_train.ini").text().to_string();
    text = text.replace("schemes = by_label, by_feature_norm, by_max_eigenvalue", "schemes = by_label");
    text = text.replace("methods = gd, algorithm1, dgd, gradient_tracking", "methods = algorithm1, dgd");
    let cfg = Config::parse(&text, root().join("configs")).unwrap();
    let r = run_train(&cfg, &Output::discard(&cfg, 0)).unwrap();
    let dgd = r.get("by_label", Method::Dgd).unwrap().final_gap;
    let a1 = r.get("by_label", Method::Algorithm1).unwrap().final_gap;
    assert!(dgd >= 1e-2 && dgd > 10.0 * a1.max(0.0), "dgd {dgd} algorithm1 {a1}");
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "[pep]\nmode = spiral\n",
        "[pep]\nmode = pairs\n",
        "[pep]\nmode = agents\nagents = 2\nswitch = soon\n",
        "[pep]\nmode = pairs\npairs = 1-2\n",
    ] {
        let cfg = Config::parse(text, ".").unwrap();
        assert!(SweepSettings::from_config(&cfg).is_err(), "{text}");
    }
    let cfg = Config::parse("[data]\npath = missing.libsvm\n", ".").unwrap();
    assert!(run_train(&cfg, &Output::discard(&cfg, 0)).is_err());
}
