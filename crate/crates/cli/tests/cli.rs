use std::process::{Command, Output};

use onerel::{Alphabet, ReducedWord};
use serde_json::Value;

fn onerel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onerel"))
        .args(args)
        .env_remove("ONEREL_BUDGET_DEPTH")
        .env_remove("ONEREL_BUDGET_LENGTH")
        .env_remove("ONEREL_BUDGET_CALLS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn decide_torsion_relator() {
    let out = onerel(&["decide", "--gens", "ab", "--rel", "aa", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "NO");
    assert_eq!(v["r"], "a");
    assert_eq!(v["k"], 2);
    assert_eq!(v["max_quotient"]["rel"], "a");
    assert!(v["budget_report"]["oracle_calls"].is_u64());
}

#[test]
fn decide_positive_relator_is_yes() {
    let out = onerel(&["decide", "--gens", "ab", "--rel", "aab"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn decide_baumslag_gersten() {
    let out = onerel(&["decide", "--gens", "at", "--rel", "TataTAtAA", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["r"], "A");
    assert_eq!(v["k"], 1);
    assert_eq!(v["k_sign_folded"], true);
}

#[test]
fn bounded_yes_is_inconclusive() {
    let out = onerel(&[
        "decide",
        "--gens",
        "ab",
        "--rel",
        "aab",
        "--max-r-len",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["verdict"], "INCONCLUSIVE");
    assert_eq!(v["budget_report"]["bounded"], true);
    assert!(v["budget_report"]["reason"].is_string());
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_onerel"))
        .args(["decide", "--gens", "at", "--rel", "TataTAtAA", "--json"])
        .env("ONEREL_BUDGET_DEPTH", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["budget_report"]["max_depth"], 1);
}

#[test]
fn witness_command() {
    let out = onerel(&["witness", "--gens", "ab", "--rel", "aaa", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["r"], "a");
    assert_eq!(v["k"], 3);
}

#[test]
fn word_problem_exit_codes() {
    assert_eq!(
        onerel(&["wp", "--gens", "ab", "--rel", "aa", "--word", "a"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        onerel(&["wp", "--gens", "ab", "--rel", "aa", "--word", "aaa"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        onerel(&["wp", "--gens", "ab", "--rel", "aa", "--word", "bAAB"])
            .status
            .code(),
        Some(0)
    );
    let out = onerel(&[
        "nc-member",
        "--gens",
        "ab",
        "--rel",
        "abAB",
        "--word",
        "baBA",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], "member");
}

#[test]
fn h1_output() {
    let v = json(&onerel(&[
        "h1",
        "--gens",
        "at",
        "--rel",
        "TataTAtAA",
        "--json",
    ]));
    assert_eq!(v["betti"], 1);
    assert_eq!(v["torsion"], serde_json::json!([]));
    let v = json(&onerel(&[
        "h1",
        "--gens",
        "ab",
        "--rel",
        "aaaaaabbbb",
        "--json",
    ]));
    assert_eq!(v["betti"], 1);
    assert_eq!(v["torsion"], serde_json::json!([2]));
}

#[test]
fn ball_output() {
    let v = json(&onerel(&[
        "ball", "--gens", "ab", "--rel", "a", "--radius", "2", "--json",
    ]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.iter().filter(|e| e[1] == "b").count(), 4);
    assert_eq!(edges.iter().filter(|e| e[1] == "a").count(), 5);
}

#[test]
fn fox_output() {
    let v = json(&onerel(&[
        "fox", "--gens", "ab", "--word", "abAB", "--gen", "a", "--json",
    ]));
    assert_eq!(v["terms"], serde_json::json!([[1, ""], [-1, "abA"]]));
}

#[test]
fn presentation_file_and_override() {
    let dir = std::env::temp_dir().join(format!("onerel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bg.txt");
    std::fs::write(&path, "gens: at\nrel: TataTAtAA\n").unwrap();
    let file = path.to_str().unwrap();
    assert_eq!(onerel(&["decide", "--file", file]).status.code(), Some(1));
    assert_eq!(
        onerel(&["decide", "--file", file, "--rel", "aat"])
            .status
            .code(),
        Some(0)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(
        onerel(&["decide", "--gens", "ab", "--rel", "ax"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(onerel(&["decide", "--rel", "ab"]).status.code(), Some(64));
    assert_eq!(onerel(&["nonsense"]).status.code(), Some(64));
    assert_eq!(
        onerel(&["fox", "--gens", "ab", "--word", "a", "--gen", "c"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(onerel(&["--help"]).status.code(), Some(0));
}

#[test]
fn emitted_words_reparse() {
    let a = Alphabet::from_letters("ab").unwrap();
    let out = onerel(&["decide", "--gens", "ab", "--rel", "aabAB", "--json"]);
    let v = json(&out);
    for t in v["trace"].as_array().unwrap() {
        let s = t["candidate"].as_str().unwrap();
        assert_eq!(ReducedWord::parse(s, &a).unwrap().to_text(&a), s);
    }
    let r = v["r"].as_str().unwrap();
    assert_eq!(ReducedWord::parse(r, &a).unwrap().to_text(&a), r);
}

#[test]
fn output_is_deterministic() {
    let args = ["decide", "--gens", "ab", "--rel", "aabAB", "--json"];
    assert_eq!(onerel(&args).stdout, onerel(&args).stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(onerel(&args).stdout, onerel(&threaded).stdout);
}
