use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_formalitykit"));
    c.env_remove("FORMALITYKIT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_vec(v).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn pair_graph() -> Value {
    json!({ "vertices": ["1", "2"], "edges": [{ "u": "1", "v": "2" }] })
}

#[test]
fn reports_echo_input_and_version() {
    let r = report(&run(&["certify", "single", "--n", "2", "--k", "2"]));
    assert_eq!(r["tool"], "formalitykit");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["input"], json!({ "n": 2, "k": 2 }));
    assert_eq!(r["result"]["certificate"]["verdict"], "CertifiedFormal");
    assert_eq!(r["result"]["recheck"]["ok"], true);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["certify", "spherical", "--k", "6", "--hmin", "3", "--hmax", "6"][..],
        &["sweep", "pn", "--n", "1..3", "--k", "1..4"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["sweep", "spherical", "--k", "2..9"];
    let outs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|t| {
            let out = bin().args(args).env("FORMALITYKIT_THREADS", t).output().unwrap();
            assert_eq!(code(&out), 0);
            out.stdout
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let bad = bin().args(args).env("FORMALITYKIT_THREADS", "0").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn certificates_recheck_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["certify", "pn-config", "--n", "2", "--k", "2", "--h", "2"]));
    // The whole report is accepted as input.
    let full = write(&dir, "report.json", &r);
    let ok = report(&run(&["recheck", "--cert", s(&full)]));
    assert_eq!(ok["result"]["ok"], true);

    let mut cert = r["result"]["certificate"].clone();
    let bare = write(&dir, "cert.json", &cert);
    assert_eq!(code(&run(&["recheck", "--cert", s(&bare)])), 0);

    let ev = cert["evidence"].as_array_mut().unwrap();
    let chained = ev.iter_mut().find(|e| e.get("chain").is_some_and(|c| c.is_array())).expect("chain evidence");
    let intercept = &mut chained["chain"][0]["value"]["intercept"];
    *intercept = json!(intercept.as_i64().unwrap() + 100);
    let tampered = write(&dir, "tampered.json", &cert);
    let out = run(&["recheck", "--cert", s(&tampered)]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn inconclusive_and_inapplicable_verdicts_exit_zero() {
    let r = report(&run(&["certify", "spherical", "--k", "5", "--hmin", "2", "--hmax", "5"]));
    assert_eq!(r["result"]["certificate"]["verdict"], "Inconclusive");
    let r = report(&run(&["certify", "pn-config", "--n", "3", "--k", "2", "--h", "3"]));
    assert_eq!(r["result"]["certificate"]["verdict"], "CriterionInapplicable");
}

#[test]
fn sweeps() {
    let r = report(&run(&["sweep", "single", "--n", "", "--k", ""]));
    assert_eq!(r["result"]["count"], 0);
    assert_eq!(r["result"]["rows"], json!([]));

    let r = report(&run(&["sweep", "single", "--n", "1..3", "--k", "2,4"]));
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|row| row["verdict"] == "CertifiedFormal"));

    assert_eq!(code(&run(&["sweep", "single", "--n", "3..1", "--k", "2"])), 2);
    assert_eq!(code(&run(&["sweep", "single", "--n", "x", "--k", "2"])), 2);
}

#[test]
fn build_config_feeds_hh_and_tor() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "graph.json", &pair_graph());
    let base = ["build-config", "--graph", s(&graph), "--n", "2", "--k", "2", "--h", "2", "--preset", "zigzag"];
    let built = report(&run(&base));
    assert_eq!(built["result"]["dim"], 8);
    let alg = write(&dir, "alg.json", &built);

    // The center of the zigzag pair is spanned by the unit in degree 0.
    let hh = report(&run(&["hh", "--algebra", s(&alg), "--p", "0", "--q", "0"]));
    assert_eq!(hh["result"]["dim"], 1);
    assert_eq!(hh["result"]["method"], "bar");
    let abs = report(&run(&["hh", "--algebra", s(&alg), "--p", "0", "--q", "0", "--mode", "absolute"]));
    assert_eq!(abs["result"]["dim"], 1);

    let scan = report(&run(&["scan", "--algebra", s(&alg), "--qmax", "4"]));
    assert!(scan["result"]["rows"].is_array());

    let mut with_pres = base.to_vec();
    with_pres.extend(["--presentation", "16"]);
    let pres = write(&dir, "pres.json", &report(&run(&with_pres)));
    let tor = report(&run(&["tor", "--pres", s(&pres), "--q", "2"]));
    assert_eq!(tor["result"]["status"], "ok");
    assert!(tor["result"]["mindeg"].as_i64().is_some());

    // q * maxdeg exceeds the truncation.
    let out = run(&["tor", "--pres", s(&pres), "--q", "5"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least"));
}

#[test]
fn word_cap_exits_three() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "graph.json", &pair_graph());
    let alg = write(
        &dir,
        "alg.json",
        &report(&run(&["build-config", "--graph", s(&graph), "--n", "2", "--k", "2", "--h", "2"])),
    );
    let out = run(&["hh", "--algebra", s(&alg), "--p", "3", "--q", "-6", "--max-words", "2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json").unwrap();
    assert_eq!(code(&run(&["hh", "--algebra", s(&junk), "--p", "0", "--q", "0"])), 2);

    let missing = write(&dir, "missing.json", &json!({ "basis": [{ "label": "1", "degree": 0 }] }));
    let out = run(&["hh", "--algebra", s(&missing), "--p", "0", "--q", "0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mult"));

    let nowhere = dir.path().join("absent.json");
    assert_eq!(code(&run(&["signs", "--graph", s(&nowhere)])), 2);
    // Out-of-range parameters are a verdict, not an input error.
    let r = report(&run(&["certify", "single", "--n", "0", "--k", "2"]));
    assert_eq!(r["result"]["certificate"]["verdict"], "CriterionInapplicable");
}

#[test]
fn odd_cycle_signs_report_a_witness() {
    let dir = TempDir::new().unwrap();
    let edges: Vec<Value> = [("a", "b"), ("b", "c"), ("c", "a")]
        .iter()
        .map(|(u, v)| json!({ "u": u, "v": v, "d": 1 }))
        .collect();
    let g = write(&dir, "tri.json", &json!({ "vertices": ["a", "b", "c"], "edges": edges }));
    let r = report(&run(&["signs", "--graph", s(&g)]));
    assert_eq!(r["result"]["status"], "infeasible");
    assert_eq!(r["result"]["cycle"].as_array().unwrap().len(), 3);
}

#[test]
fn kunneth_respects_the_characteristic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &json!({ "2": 1 }));
    let r = report(&run(&["kunneth", "--poincare", s(&p), "--n", "2", "--same"]));
    assert_eq!(r["result"]["hom"], json!({ "4": 1 }));
    let r = report(&run(&["kunneth", "--poincare", s(&p), "--n", "2", "--different"]));
    assert_eq!(r["result"]["dim"], 0);
    assert_eq!(code(&run(&["kunneth", "--poincare", s(&p), "--n", "2", "--same", "--field", "fp:2"])), 2);
}

#[test]
fn csv_and_human_formats() {
    let out = run(&["certify", "pn-config", "--n", "2", "--k", "2", "--h", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "verdict"));
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r.len() == headers.len()));

    let out = run(&["certify", "single", "--n", "2", "--k", "2", "--format", "human"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("CertifiedFormal"));
}
