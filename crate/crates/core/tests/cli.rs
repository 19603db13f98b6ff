use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sodmetric_core::io::{read_events, read_json};
use sodmetric_core::{EventSequence, Signal};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sodmetric"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn ramp_plateau_below_threshold_is_header_only() {
    let d = tmp();
    assert!(run(d.path(), &["generate", "--kind", "ramp-plateau", "--out", "ramp.json"]).status.success());
    let o = run(d.path(), &["sample", "--input", "ramp.json", "--theta", "1", "--scheme", "sod", "--out", "ev.csv"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(p(d.path(), "ev.csv")).unwrap(), "t,v\n");
    let eta = read_events(&p(d.path(), "ev.csv"), None).unwrap();
    assert!(eta.is_empty());
    assert_eq!(eta.horizon(), 1.0);
}

#[test]
fn alternating_norm_prints_one() {
    let d = tmp();
    run(d.path(), &["generate", "--kind", "alternating", "--n", "9", "--out", "alt.csv"]);
    for kind in ["D", "A", "M"] {
        let o = run(d.path(), &["norm", "--events", "alt.csv", "--kind", kind]);
        assert_eq!(stdout(&o).trim(), "1", "{kind}");
    }
    let o = run(d.path(), &["norm", "--events", "alt.csv", "--kind", "D", "--bruteforce"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn qi_check_reports_zero_violations() {
    let d = tmp();
    let o = run(
        d.path(),
        &["qi-check", "--trials", "1000", "--theta", "0.1", "--norm", "D", "--seed", "42", "--out", "qi.json", "--csv", "qi.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = read_json(&p(d.path(), "qi.json")).unwrap();
    assert_eq!(report["violations"], 0);
    assert_eq!(report["trials"], 1000);
    let rows = std::fs::read_to_string(p(d.path(), "qi.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1001);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let d = tmp();
    for tag in ["a", "b"] {
        let out = format!("c_{tag}.json");
        let csv = format!("c_{tag}.csv");
        let o = run(d.path(), &["certify", "--norm", "A", "--sizes", "4,8,16", "--seed", "3", "--out", &out, "--csv", &csv]);
        assert!(o.status.success());
        let out = format!("q_{tag}.json");
        run(d.path(), &["qi-check", "--trials", "50", "--seed", "9", "--out", &out]);
    }
    for stem in ["c", "q"] {
        let a = std::fs::read(p(d.path(), &format!("{stem}_a.json"))).unwrap();
        let b = std::fs::read(p(d.path(), &format!("{stem}_b.json"))).unwrap();
        assert_eq!(a, b, "{stem}");
    }
    assert_eq!(
        std::fs::read(p(d.path(), "c_a.csv")).unwrap(),
        std::fs::read(p(d.path(), "c_b.csv")).unwrap()
    );
}

#[test]
fn sampled_csv_round_trips_through_the_cli() {
    let d = tmp();
    run(d.path(), &["generate", "--kind", "random-walk", "--n", "30", "--seed", "5", "--horizon", "3", "--out", "w.json"]);
    run(d.path(), &["sample", "--input", "w.json", "--theta", "0.07", "--out", "e.csv"]);
    let eta = read_events(&p(d.path(), "e.csv"), None).unwrap();
    let f: Signal = read_json(&p(d.path(), "w.json")).unwrap();
    let direct = sodmetric_core::sampler::sod_sample(&f, sodmetric_core::Threshold::new(0.07).unwrap());
    assert_eq!(eta, direct);
    // the CLI reads its own CSV back
    let o = run(d.path(), &["norm", "--events", "e.csv", "--kind", "D"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), sodmetric_core::norms::discrepancy_norm(&direct));
}

#[test]
fn lc_and_if_schemes() {
    let d = tmp();
    std::fs::write(
        p(d.path(), "c.json"),
        r#"{"T": 2.0, "segments": [{"t": 0.0, "c0": 1.0, "c1": 0.0, "c2": 0.0}]}"#,
    )
    .unwrap();
    let o = run(d.path(), &["sample", "--input", "c.json", "--theta", "0.5", "--scheme", "if"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "t,v\n0.5,0.5\n1,0.5\n1.5,0.5\n2,0.5\n");
    run(d.path(), &["generate", "--kind", "sine", "--horizon", "7", "--n", "12", "--out", "s.json"]);
    let o = run(d.path(), &["sample", "--input", "s.json", "--theta", "0.1", "--scheme", "lc"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() > 1);
}

#[test]
fn distance_metrics() {
    let d = tmp();
    let a = EventSequence::from_pairs(5.0, &[(1.0, 1.0)]).unwrap();
    let b = EventSequence::from_pairs(5.0, &[(1.25, 1.0)]).unwrap();
    sodmetric_core::io::write_events(&p(d.path(), "a.csv"), &a).unwrap();
    sodmetric_core::io::write_events(&p(d.path(), "b.csv"), &b).unwrap();
    let o = run(d.path(), &["distance", "--a", "a.csv", "--b", "b.csv", "--metric", "vp", "--s", "4"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(d.path(), &["distance", "--a", "a.csv", "--b", "a.csv", "--metric", "vr"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(d.path(), &["distance", "--a", "a.csv", "--b", "a.csv", "--metric", "schreiber"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn decompose_emits_json() {
    let d = tmp();
    run(d.path(), &["generate", "--kind", "mmsn", "--n", "10", "--out", "m.csv"]);
    for what in ["mmd", "chain", "pi"] {
        let o = run(d.path(), &["decompose", "--events", "m.csv", "--what", what]);
        assert!(o.status.success(), "{what}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        if what == "pi" {
            assert_eq!(v["r"], 5);
        }
    }
}

#[test]
fn probe_and_emdm_reports() {
    let d = tmp();
    let o = run(d.path(), &["probe-continuity", "--theta0", "1", "--steps", "20", "--out", "p.json", "--csv", "p.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = read_json(&p(d.path(), "p.json")).unwrap();
    assert_eq!(r["count_drop_above"], 2);
    let o = run(d.path(), &["emdm", "--metric", "A", "--out", "e.json", "--csv", "e.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = read_json(&p(d.path(), "e.json")).unwrap();
    assert_eq!(r["characterization"]["value"], 1.0);
    let o = run(d.path(), &["emdm", "--metric", "vr", "--rate", "1", "--out", "v.json"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn discrepancy_emdm_bound_failure_is_exit_two() {
    // the max-then-min signal has Λ = 2 against a characterization of 1
    let d = tmp();
    let o = run(d.path(), &["emdm", "--metric", "D", "--out", "e.json"]);
    assert_eq!(o.status.code(), Some(2));
    let r: serde_json::Value = read_json(&p(d.path(), "e.json")).unwrap();
    assert_eq!(r["bound_holds"], false);
    assert_eq!(r["max_lambda"], 2.0);
}

#[test]
fn malformed_inputs_are_exit_one_with_location() {
    let d = tmp();
    std::fs::write(p(d.path(), "bad.csv"), "t,v\n0.1,1\n0.2,oops\n").unwrap();
    let o = run(d.path(), &["norm", "--events", "bad.csv", "--horizon", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2") && err.contains("'v'"), "{err}");

    std::fs::write(p(d.path(), "nosidecar.csv"), "t,v\n").unwrap();
    let o = run(d.path(), &["norm", "--events", "nosidecar.csv"]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(p(d.path(), "bad.json"), r#"{"T": 1.0, "segments": [{"t": 0.0, "c0": 0.0}]}"#).unwrap();
    let o = run(d.path(), &["sample", "--input", "bad.json", "--theta", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c1"));

    let o = run(d.path(), &["sample", "--input", "x.json", "--theta", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}
