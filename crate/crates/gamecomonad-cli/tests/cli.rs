use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn gcq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcq")).args(args).output().expect("binary runs")
}

/// Runs with corpus file names resolved, expecting success and a JSON document.
fn json(args: &[&str]) -> Value {
    let args: Vec<String> = args.iter().map(|a| if a.ends_with(".json") { corpus(a) } else { a.to_string() }).collect();
    let out = gcq(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn code(args: &[&str]) -> i32 {
    let args: Vec<String> = args.iter().map(|a| if a.ends_with(".json") && !a.starts_with("missing") { corpus(a) } else { a.to_string() }).collect();
    gcq(&args.iter().map(String::as_str).collect::<Vec<_>>()).status.code().expect("exit code")
}

#[test]
fn solve_examples() {
    assert_eq!(json(&["solve", "--game", "bij", "--n", "2", "--k", "2", "C6.json", "2C3.json"])["duplicator_wins"], false);
    assert_eq!(json(&["solve", "--game", "fun", "--positive", "--n", "1", "--k", "2", "K2.json", "K3.json"])["duplicator_wins"], true);
    let same = json(&["solve", "--game", "bij", "--negated", "--n", "2", "--k", "2", "--strategy", "C5.json", "C5.json"]);
    assert_eq!(same["duplicator_wins"], true);
    assert!(!same["strategy"].as_array().unwrap().is_empty());
}

#[test]
fn cube_examples() {
    let all = |v: &Value| v["verdicts"].as_array().unwrap().iter().map(|x| x["duplicator_wins"].as_bool().unwrap()).collect::<Vec<_>>();
    let id = json(&["cube", "--n", "2", "--k", "2", "P3.json", "P3.json"]);
    assert!(all(&id).iter().all(|&w| w) && id["monotone"] == true);
    assert!(all(&json(&["cube", "C6.json", "2C3.json"])).iter().all(|&w| w));
    let k3k2 = json(&["cube", "K3.json", "K2.json"]);
    assert_eq!(all(&k3k2), vec![true, true, true, true, false, false, false, false]);
}

#[test]
fn comonad_examples() {
    let one = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(one.path(), r#"{"signature":[{"name":"E","arity":2}],"universe":["a"],"relations":{"E":[]}}"#).unwrap();
    let p = one.path().to_str().unwrap();
    assert_eq!(json(&["comonad", p, "--n", "1", "--k", "1", "--depth", "2"])["passed"], true);
    assert_eq!(json(&["comonad", "K2.json", "--n", "2", "--k", "2", "--depth", "2"])["passed"], true);
    assert_eq!(json(&["comonad", "K2.json", "--n", "2", "--k", "2", "--depth", "2", "--mutate"])["passed"], false);
    assert_eq!(json(&["comonad", "K2.json", "--comonad", "tk", "--k", "2", "--depth", "2"])["passed"], true);
    let dot = gcq(&["--format", "dot", "comonad", &corpus("K2.json"), "--n", "1", "--k", "1", "--depth", "1"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
}

#[test]
fn decompose_examples() {
    assert_eq!(json(&["decompose", "search", "treeT.json", "--n", "1", "--k", "2", "--round-trip"])["found"], true);
    // the last pebble is forgotten at n = 1, so a triangle fits two pebbles
    assert_eq!(json(&["decompose", "search", "K3.json", "--n", "1", "--k", "2"])["found"], true);
    assert_eq!(json(&["decompose", "search", "K3.json", "--n", "1", "--k", "1"])["found"], false);
    let r = json(&["decompose", "validate", "hypergraphTprime.json", "hypergraphTprime_etd2node.json"]);
    assert_eq!((r["valid"].as_bool(), r["width"].as_u64(), r["arity"].as_u64()), (Some(true), Some(1), Some(2)));
    assert_eq!(json(&["decompose", "treewidth", "hypergraphTprime.json"])["treewidth"], 3);
    let t = json(&["decompose", "td2etd", "treeT.json", "treeT_td_per_edge.json", "--k", "1", "--round-trip"]);
    assert_eq!(t["etd"]["nodes"].as_array().unwrap().len(), 6);
    assert_eq!(t["round_trip"]["ok"], true);
    assert_eq!(json(&["decompose", "etd2td", "treeT.json", "treeT_etd_succinct.json", "--round-trip"])["report"]["valid"], true);
    let c = json(&["decompose", "etd2coalg", "treeT.json", "treeT_etd_succinct.json", "--n", "1", "--k", "2", "--empty-root", "--round-trip"]);
    assert_eq!(c["laws"]["passed"], true);
    assert_eq!(json(&["decompose", "hnk", "K2.json", "--n", "2", "--k", "2", "--depth", "1"])["report"]["structured"], true);
}

#[test]
fn coalgebra_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let found = dir.path().join("found.json");
    let out = gcq(&["decompose", "search", &corpus("C5.json"), "--n", "1", "--k", "2", "--out", found.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&found).unwrap()).unwrap();
    let alpha = dir.path().join("alpha.json");
    std::fs::write(&alpha, doc["coalgebra"].to_string()).unwrap();
    let back = json(&["decompose", "coalg2etd", "C5.json", alpha.to_str().unwrap(), "--round-trip"]);
    assert_eq!(back["report"]["structured"], true);
    assert_eq!(back["round_trip"]["ok"], true);
}

#[test]
fn logic_commands() {
    assert_eq!(json(&["logic", "eval", "K2.json", "formula_loop.json"])["value"], false);
    assert_eq!(json(&["logic", "eval", "P3.json", "formula_two_neighbours.json", "--assign", "x=1"])["value"], true);
    assert_eq!(json(&["logic", "closure", "forall", "--class", "surj"])["passed"], true);
    assert_eq!(json(&["logic", "closure", "forall", "--class", "hom"])["passed"], false);
    assert_eq!(json(&["logic", "qtype", "exists"])["qtype"], serde_json::json!([[["U"]]]));
    let e = json(&["logic", "eliminate", "formula_two_neighbours.json"]);
    assert_eq!(e["node"], "and");
    let g = json(&["logic", "generate", "--seed", "9", "--count", "5"]);
    assert_eq!(g["formulas"].as_array().unwrap().len(), 5);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["cube", "C6.json", "2C3.json"],
        vec!["decompose", "search", "treeT.json"],
        vec!["logic", "generate", "--seed", "4", "--count", "20", "--negation"],
        vec!["--format", "dot", "decompose", "validate", "treeT.json", "treeT_etd_per_edge.json"],
    ] {
        let mut docs = Vec::new();
        for i in 0..2 {
            let path = dir.path().join(format!("run{i}"));
            let mut full: Vec<String> = args.iter().map(|a| if a.ends_with(".json") { corpus(a) } else { a.to_string() }).collect();
            full.extend(["--out".to_string(), path.display().to_string()]);
            assert!(gcq(&full.iter().map(String::as_str).collect::<Vec<_>>()).status.success(), "{args:?}");
            docs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(docs[0], docs[1], "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--definitely-not-a-flag"]), 1);
    assert_eq!(code(&["--format", "dot", "cube", "K2.json", "K2.json"]), 1);
    assert_eq!(code(&["solve", "missing.json", "K2.json"]), 2);
    assert_eq!(code(&["solve", "--n", "3", "--k", "2", "K2.json", "K2.json"]), 2);
    assert_eq!(code(&["decompose", "treewidth", "K3_td_single.json"]), 2);
    assert_eq!(code(&["decompose", "search", "treeT.json", "--bound", "3"]), 3);
    assert_eq!(code(&["logic", "--bound", "2", "eval", "K3.json", "formula_loop.json"]), 3);
    assert_eq!(code(&["decompose", "etd2coalg", "treeT.json", "treeT_etd_succinct.json", "--n", "1", "--k", "2"]), 2);
    assert_eq!(code(&["cube", "K2.json", "K3.json"]), 0);
}
