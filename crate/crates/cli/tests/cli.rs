use std::path::PathBuf;
use std::process::{Command, Output};

fn nlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlab"))
        .args(args)
        .env_remove("NLAB_MAX_DIGITS")
        .output()
        .expect("spawn nlab")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn diagnostic(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).expect("stderr is one JSON object")
}

#[test]
fn debruijn_text_and_json() {
    let o = nlab(&["debruijn", "--order", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "00010111");

    let o = nlab(&[
        "debruijn", "--base", "3", "--order", "1", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["word"], "012");
}

#[test]
fn analyze_writes_exact_rows() {
    let o = nlab(&[
        "analyze",
        "--word",
        ":0011",
        "--k",
        "2",
        "--truncations",
        "4,2^4",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("truncation,max_deviation,max_deviation_decimal,argmax")
    );
    // "0011": counted windows 00, 01, 11 (the final window is excluded).
    assert_eq!(lines.next(), Some("4,1/4,0.250000000000,10"));
    assert_eq!(lines.next(), Some("16,1/16,0.062500000000,10"));
}

#[test]
fn analyze_marks_short_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.txt");
    // Seven counted windows hold three 1s, so d_1 = 3/8.
    std::fs::write(&input, "0110\n1001\n").unwrap();
    let csv = dir.path().join("out.csv");
    let o = nlab(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "1",
        "--truncations",
        "8,16",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("8,1/8,0.125000000000,1"));
    assert_eq!(text.lines().nth(2), Some("16,insufficient,,"));
}

#[test]
fn analyze_rejects_unsorted_truncations() {
    let o = nlab(&[
        "analyze",
        "--word",
        ":01",
        "--k",
        "1",
        "--truncations",
        "8,4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["error"], "validation");
}

#[test]
fn reduce_d2_full_pair() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = nlab(&[
        "reduce-d2",
        "--l",
        &fixture("full.json"),
        "--f",
        &fixture("full.json"),
        "--x",
        ":0",
        "--bits",
        "21",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "011010011000110011010");
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["initial_index"], "i_{-1} = j_{-1} = 0");
    assert_eq!(r["stages"][0]["alpha"]["case"], "Case1");
}

#[test]
fn reduce_d2_packed_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.bits");
    let o = nlab(&[
        "reduce-d2",
        "--l",
        &fixture("coord.json"),
        "--f",
        &fixture("empty.json"),
        "--x",
        "0:1",
        "--bits",
        "5000",
        "--packed",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"NLAB-BITS v1\n"));
    assert_eq!(bytes.len(), 16 + 5000usize.div_ceil(8));

    let o = nlab(&[
        "analyze",
        "--input",
        out.to_str().unwrap(),
        "--k",
        "1",
        "--truncations",
        "5000",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("5000,"));
}

#[test]
fn reduce_general_runs() {
    let o = nlab(&[
        "reduce-general",
        "--base",
        "2",
        "--r",
        "1",
        "--s",
        "2",
        "--l",
        &fixture("full.json"),
        "--f",
        &fixture("empty.json"),
        "--x",
        ":0",
        "--digits",
        "3000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim().len(), 3000);
}

#[test]
fn reduce_domega_full_family() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("o.json");
    let o = nlab(&[
        "reduce-domega",
        "--family",
        &fixture("triple_full.json"),
        "--x",
        ":0",
        "--stages",
        "4",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let stages = r["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 5);
    assert!(stages.iter().all(|s| s["unmet"].is_null()));
}

#[test]
fn reduce_domega_strict_cap_and_allow_unmet() {
    let args = [
        "reduce-domega",
        "--family",
        &fixture("triple_empty.json"),
        "--x",
        ":0",
        "--stages",
        "2",
    ];
    let o = nlab(&args);
    assert_eq!(o.status.code(), Some(3));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "resource_cap");
    assert!(d["message"].as_str().unwrap().contains("(6b)"));

    let mut relaxed = args.to_vec();
    relaxed.push("--allow-unmet");
    let o = nlab(&relaxed);
    assert!(o.status.success());
}

#[test]
fn arity_mismatch_is_validation() {
    let o = nlab(&[
        "reduce-domega",
        "--family",
        &fixture("full.json"),
        "--x",
        ":0",
        "--stages",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_cap_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_nlab"))
        .args(["debruijn", "--order", "12"])
        .env("NLAB_MAX_DIGITS", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["error"], "resource_cap");
}

#[test]
fn missing_family_file() {
    let o = nlab(&[
        "reduce-d2",
        "--l",
        "/nonexistent.json",
        "--f",
        &fixture("full.json"),
        "--x",
        ":0",
        "--bits",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reduce_domega_second_slice_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("o.json");
    let o = nlab(&[
        "reduce-domega",
        "--family",
        &fixture("f1full_f2empty.json"),
        "--x",
        ":0",
        "--stages",
        "8",
        "--allow-unmet",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let k2: Vec<_> = r["stages"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["k"] == 2)
        .collect();
    assert!(!k2.is_empty());
    for s in k2 {
        assert_eq!(s["case"], "Case2");
        let ids: Vec<_> = s["conditions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["id"].as_str().unwrap())
            .collect();
        assert!(ids.contains(&"5"));
    }
}
