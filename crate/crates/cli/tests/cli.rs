use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn olcodes(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olcodes")).args(args).current_dir(dir).output().expect("run olcodes")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn digest(v: &Value) -> String {
    v["manifest"]["output_digest"].as_str().unwrap().to_string()
}

/// Header-free, comment-free lines of a code file.
fn words(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#') && !l.contains('=')).map(String::from).collect()
}

fn setup(family: &str, spec: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("family.txt"), family).unwrap();
    fs::write(dir.path().join("spec.json"), spec).unwrap();
    dir
}

const BINARY_FAMILY: &str = "q=2 k=2\nL1: 0\nR1: 1\nL2: 01\nR2:\n";

#[test]
fn construct_one_k_gives_two_words() {
    let dir = setup(BINARY_FAMILY, r#"{"kind": "OneK", "n": 4, "k": 2, "family": "family.txt"}"#);
    let out =
        olcodes(&["construct", "--spec", "spec.json", "--out", "code.txt", "--report", "report.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("code.txt")).unwrap();
    assert_eq!(words(&text), ["0011", "0111"]);
    assert!(text.starts_with("# manifest: "));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["materialized"], 2);
    assert_eq!(report["result"]["verified"][0]["ok"], true);
    assert_eq!(report["schema_version"], 1);

    let out = olcodes(&["verify", "--code", "code.txt"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["ok"], true);
}

#[test]
fn construct_non_overlapping_bipartite() {
    let dir = setup("q=4 k=1\nL1: 0 1\nR1: 2 3\n", r#"{"kind": "NonOverlapping", "n": 2}"#);
    let out = olcodes(&["construct", "--spec", "spec.json", "--family", "family.txt"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(words(&String::from_utf8_lossy(&out.stdout)), ["02", "03", "12", "13"]);
}

#[test]
fn construct_rejects_invalid_family() {
    let dir = setup("q=2 k=1\nL1: 0\nR1: 0 1\n", r#"{"kind": "NonOverlapping", "n": 2, "family": "family.txt"}"#);
    let out = olcodes(&["construct", "--spec", "spec.json"], dir.path());
    assert_ne!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("both L and R"));

    let out = olcodes(&["families", "--validate", "family.txt"], dir.path());
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["result"]["valid"], false);
}

#[test]
fn construct_reports_missing_parameter() {
    let dir = setup(BINARY_FAMILY, r#"{"kind": "OneK", "n": 4, "family": "family.txt"}"#);
    let out = olcodes(&["construct", "--spec", "spec.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_flags_overlap() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("code.txt"), "q=2 n=4\n0010\n0011\n").unwrap();
    let out = olcodes(&["verify", "--code", "code.txt", "--t1", "1", "--t2", "1"], dir.path());
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["result"]["ok"], false);
    assert!(v["result"]["witness"].is_object());

    fs::write(dir.path().join("declared.txt"), "q=2 n=4 t1=1 t2=1\n0010\n").unwrap();
    let out = olcodes(&["verify", "--code", "declared.txt"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn bounds_exact_value() {
    let dir = TempDir::new().unwrap();
    let out = olcodes(&["bounds", "--q", "2", "--n", "4", "--t1", "1", "--t2", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["exact"], 2);
    assert!(v["result"]["rules"].as_array().unwrap().iter().all(|r| r["id"].is_string()));

    let out = olcodes(&["bounds", "--q", "2", "--n", "4", "--format", "csv"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "2,4,1,2,2,balanced_partition,2,pair_window,2"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
}

#[test]
fn search_small_window() {
    let dir = TempDir::new().unwrap();
    let out = olcodes(&["search", "--q", "2", "--n", "4", "--t1", "1", "--t2", "3", "--witness", "w.txt"], dir.path());
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!((v["result"]["size"].as_u64(), v["result"]["exact"].as_bool()), (Some(1), Some(true)));
    assert_eq!(v["result"]["witness"].as_array().unwrap().len(), 1);
    assert_eq!(code(&olcodes(&["verify", "--code", "w.txt"], dir.path())), 0);
}

#[test]
fn search_budget_exit() {
    let dir = TempDir::new().unwrap();
    let out =
        olcodes(&["search", "--q", "3", "--n", "5", "--t1", "1", "--t2", "4", "--budget-nodes", "10"], dir.path());
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["result"]["exact"], false);
}

#[test]
fn search_at_most() {
    let dir = TempDir::new().unwrap();
    let args = ["search", "--q", "2", "--n", "6", "--t1", "2", "--t2", "3", "--strategy", "clique"];
    let exact = json(&olcodes(&args, dir.path()))["result"]["size"].as_u64().unwrap();
    let holds = exact.to_string();
    let below = (exact - 1).to_string();
    let out = olcodes(&[&args[..], &["--at-most", &holds]].concat(), dir.path());
    assert_eq!(json(&out)["result"]["verdict"], "holds");
    let out = olcodes(&[&args[..], &["--at-most", &below, "--witness", "w.txt"]].concat(), dir.path());
    assert_eq!(json(&out)["result"]["verdict"], "exceeded");
    assert_eq!(code(&olcodes(&["verify", "--code", "w.txt"], dir.path())), 0);
}

#[test]
fn tables_rows_and_truncation() {
    let dir = TempDir::new().unwrap();
    let out = olcodes(&["tables", "--which", "table1", "--q", "2", "--n-max", "5"], dir.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("table1,2,5,3,1,true,") && l.ends_with(",3,2,true,false")));

    let out = olcodes(&["tables", "--which", "table2", "--q", "2", "--n-max", "6", "--max-families", "1"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("# truncated"));

    let out = olcodes(&["tables", "--which", "table3", "--q", "2", "--n-max", "6"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_edits_and_exhaustive() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("code.txt"), "q=2 n=4 t1=1 t2=2\n0011\n0111\n").unwrap();
    fs::write(
        dir.path().join("edits.json"),
        r#"{"message": [0, 1, 0, 1], "edits": [{"kind": "delete", "position": 5, "burst": 1}]}"#,
    )
    .unwrap();
    let out = olcodes(&["simulate", "--code", "code.txt", "--edits", "edits.json"], dir.path());
    assert_eq!(code(&out), 0);
    let run = &json(&out)["result"]["runs"][0];
    assert!(run["latency"].as_u64().unwrap() <= 8);
    assert!(run["log"]["events"].as_array().unwrap().iter().any(|e| e["event"] == "desync"));

    let out = olcodes(&["simulate", "--code", "code.txt", "--exhaustive", "--histogram", "h.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["result"]["deletion"]["max_latency"].as_u64().unwrap() <= 8);
    assert!(v["result"]["insertion"]["max_latency"].as_u64().unwrap() <= 12);
    let csv = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "kind,latency,runs"));
}

#[test]
fn families_list_and_count() {
    let dir = TempDir::new().unwrap();
    let out = olcodes(&["families", "--q", "2", "--k", "2"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["families"].as_array().unwrap().len(), 4);
    let out = olcodes(&["families", "--q", "2", "--k", "3", "--limit", "2"], dir.path());
    assert_eq!(code(&out), 3);
    let out = olcodes(&["families", "--q", "3", "--k", "1", "--count"], dir.path());
    assert_eq!(json(&out)["result"]["count"], "6");
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&olcodes(&["bounds", "--n", "4"], dir.path())), 2);
    assert_eq!(code(&olcodes(&["search", "-q", "2"], dir.path())), 2);
    assert_eq!(code(&olcodes(&["verify", "--code", "missing.txt"], dir.path())), 2);
}

#[test]
fn identical_inputs_identical_digests() {
    let dir = setup(BINARY_FAMILY, r#"{"kind": "OneK", "n": 4, "k": 2, "family": "family.txt"}"#);
    let runs: Vec<&[&str]> = vec![
        &["bounds", "--q", "3", "--n", "5", "--t1", "2", "--t2", "3"],
        &["search", "--q", "2", "--n", "5", "--t1", "1", "--t2", "2", "--strategy", "clique"],
        &["construct", "--spec", "spec.json", "--report", "/dev/stdout", "--out", "/dev/null"],
    ];
    for args in runs {
        let a = json(&olcodes(args, dir.path()));
        let b = json(&olcodes(args, dir.path()));
        assert_eq!(digest(&a), digest(&b), "{args:?}");
        assert_eq!(a["result"], b["result"]);
    }
    let a = olcodes(&["construct", "--spec", "spec.json", "--seed", "7"], dir.path());
    let b = olcodes(&["construct", "--spec", "spec.json", "--seed", "7"], dir.path());
    assert_eq!(words(&String::from_utf8_lossy(&a.stdout)), words(&String::from_utf8_lossy(&b.stdout)));
    let digest_of = |o: &Output| {
        let text = String::from_utf8_lossy(&o.stdout).to_string();
        let manifest = text.lines().next().unwrap().trim_start_matches("# manifest: ").to_string();
        serde_json::from_str::<Value>(&manifest).unwrap()["output_digest"].clone()
    };
    assert_eq!(digest_of(&a), digest_of(&b));
}

#[test]
fn schemas_match_emitted_version() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema");
    let emitted =
        json(&olcodes(&["bounds", "--q", "2", "--n", "3", "--t1", "1", "--t2", "1"], &dir))["schema_version"].clone();
    let mut envelopes = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let schema: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(schema["$id"].as_str().unwrap().starts_with("urn:olcodes:schema:v1:"), "{}", path.display());
        if let Some(v) = schema["properties"]["schema_version"].get("const") {
            assert_eq!(*v, emitted, "{}", path.display());
            envelopes += 1;
        }
    }
    assert!(envelopes >= 6);
}
