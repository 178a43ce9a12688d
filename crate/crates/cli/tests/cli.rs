use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bracketlab"))
        .args(args)
        .env_remove("BRACKETLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn tk1981_experiment_prints_four_ces() {
    let o = run(&["experiment", "tk1981"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for label in ["CE(A): 2.4", "CE(B): 0.625", "CE(C): -7.5", "CE(D): -5.625"] {
        assert!(out.contains(label), "missing {label} in\n{out}");
    }
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn all_experiments_pass() {
    let o = run(&["experiment", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn unknown_experiment_is_an_error() {
    let o = run(&["experiment", "allais"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("allais"));
}

#[test]
fn identical_lotteries_compare_indifferent() {
    let o = run(&["compare", &fixture("eu_exp.json"), &fixture("coin.json"), &fixture("coin.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("Indifferent"));

    // Same lottery written with fractional and decimal probabilities.
    let o = run(&["compare", &fixture("eu_exp.json"), &fixture("coin.json"), &fixture("coin_copy.json")]);
    assert_eq!(stdout(&o).lines().next(), Some("Indifferent"));
}

#[test]
fn tk_pair_splits_nb_and_eu() {
    let (ad, bc) = (fixture("tk_ad.json"), fixture("tk_bc.json"));
    let nb = run(&["compare", &fixture("nb_sqrt.json"), &ad, &bc]);
    assert_eq!(nb.status.code(), Some(1), "sqrt NB cannot take negative outcomes");
    let eu = run(&["--json", "compare", &fixture("eu_exp.json"), &bc, &ad]);
    let v: serde_json::Value = serde_json::from_slice(&eu.stdout).unwrap();
    assert_eq!(v["verdict"], "StrictlyPrefers");
}

#[test]
fn malformed_lottery_exits_one_with_diagnostic() {
    let o = run(&["eval", &fixture("eu_exp.json"), &fixture("malformed.json")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("malformed.json") && err.contains("malformed JSON"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_file_exits_one() {
    let o = run(&["eval", &fixture("eu_exp.json"), &fixture("nope.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn invalid_model_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"family": "edu", "indices": {"u": {"family": "sqrt"}}, "params": {"beta": -2}}"#)
        .unwrap();
    let o = run(&["eval", path.to_str().unwrap(), &fixture("coin.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn usage_errors_are_nonzero() {
    let o = run(&["compare", &fixture("eu_exp.json")]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn ce_of_sqrt_coin() {
    let o = run(&["ce", &fixture("sqrt.json"), &fixture("marginal.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ce: f64 = stdout(&o).trim().parse().unwrap();
    assert!((ce - 4.0).abs() < 1e-12);
}

#[test]
fn timing_premium_zero_for_kmbib_positive_for_ez() {
    let tree = fixture("tree.json");
    let prem = |family: &str| -> f64 {
        let o = run(&[
            "timing-premium", &tree, "--family", family, "--rho", "0.5", "--alpha", "-9", "--beta", "0.97",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o).trim().parse().unwrap()
    };
    assert!(prem("kmbib").abs() <= 1e-12);
    assert!(prem("ez") > 1e-6);
}

#[test]
fn axioms_report_counterexample_for_nb() {
    let o = run(&[
        "axioms",
        &fixture("nb_sqrt.json"),
        "--axiom",
        "MultilinearIndependence",
        "--trials",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("MultilinearIndependence: Violated"), "{out}");
    assert!(out.contains("first counterexample"));
}

#[test]
fn axiom_runs_are_byte_identical() {
    let args = ["--json", "axioms", &fixture("nb_sqrt.json"), "--trials", "300", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_comes_from_environment() {
    let base = ["axioms", &fixture("eu_exp.json"), "--axiom", "Monotonicity", "--trials", "50"];
    let o = Command::new(env!("CARGO_BIN_EXE_bracketlab"))
        .args(base)
        .env("BRACKETLAB_SEED", "17")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("seed 17 "));
    let explicit = run(&[&base[..], &["--seed", "17"]].concat());
    assert_eq!(o.stdout, explicit.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_bracketlab"))
        .args(base)
        .env("BRACKETLAB_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn axiom_report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&[
        "axioms",
        &fixture("nb_sqrt.json"),
        "--axiom",
        "MultilinearIndependence",
        "--trials",
        "300",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["verdict"], "Violated");
}

#[test]
fn narrow_model_classifies_narrow() {
    let o = run(&["classify-bracketing", &fixture("nb_sqrt.json"), "--trials", "300"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("NarrowBoth"));
}

#[test]
fn dataset_subjects_get_labels() {
    let o = run(&["classify-bracketing", &fixture("choices.csv")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("subject narrow: best nb (narrow)"), "{out}");
    assert!(out.contains("subject broad: best eu (broad)"), "{out}");
}

#[test]
fn fit_respects_family_filter() {
    let o = run(&["--json", "fit", &fixture("choices.csv"), "--families", "eu"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for s in v["subjects"].as_array().unwrap() {
        assert_eq!(s["results"].as_array().unwrap().len(), 1);
        assert_eq!(s["best"], "eu");
    }
    let bad = run(&["fit", &fixture("choices.csv"), "--families", "nb,bogus"]);
    assert_eq!(bad.status.code(), Some(1));
}
