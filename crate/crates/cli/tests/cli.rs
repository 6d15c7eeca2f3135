use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_trolley-mc");

fn fixture(rel: &str) -> String {
    format!("{}/../core/fixtures/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_village_claim_is_true() {
    let o = run(&["check", &fixture("games/g_village1.json"), "init", "[m_a : d1,d2,d3 @ m_a:2,m_b:2]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "TRUE");
}

#[test]
fn check_fork_atom_is_false() {
    let o = run(&["check", &fixture("games/g_fork.json"), "w", "p"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "FALSE");
}

#[test]
fn check_json_output() {
    let o = run(&["--json", "check", &fixture("games/g_fork.json"), "w", "p"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], false);
}

#[test]
fn check_errors() {
    let g = fixture("games/g_fork.json");
    assert_eq!(code(&run(&["check", &g, "w", "p &"])), 2);
    assert_eq!(code(&run(&["check", &g, "nowhere", "p"])), 2);
    assert_eq!(code(&run(&["check", &g, "w", "[zz : p @ *:1]"])), 2);
    assert_eq!(code(&run(&["check", "missing.json", "w", "p"])), 2);
    assert_eq!(code(&run(&["--cap-profiles", "1", "check", &g, "w", "[a : p @ *:1]"])), 3);
}

#[test]
fn explore_village_finds_the_triple() {
    let o = run(&[
        "--json",
        "explore",
        &fixture("games/g_village1.json"),
        "init",
        "m_a",
        "m_a:2,m_b:2",
        "d1,d2,d3,d4",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sets = v["minimal_sets"].as_array().unwrap();
    assert!(sets.contains(&serde_json::json!(["d1", "d2", "d3"])));
}

#[test]
fn explore_term_and_pool_cap() {
    let g = fixture("games/g_term.json");
    let o = run(&["--json", "explore", &g, "w", "a", "*:1", "p"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["minimal_sets"], serde_json::json!([["p"]]));

    let pool = (0..13).map(|i| format!("p{i}")).collect::<Vec<_>>().join(",");
    assert_eq!(code(&run(&["explore", &g, "w", "a", "*:1", &pool])), 3);
    assert_eq!(code(&run(&["--cap-pool", "13", "explore", &g, "w", "a", "*:1", &pool])), 0);
}

#[test]
fn prove_alpha_is_accepted() {
    let o = run(&["prove", &fixture("proofs/alpha.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ACCEPTED"));
}

#[test]
fn prove_tampered_names_the_line() {
    let o = run(&["prove", &fixture("proofs/mutations/alpha_tampered.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("REJECTED at line"));
}

#[test]
fn prove_missing_file() {
    assert_eq!(code(&run(&["prove", "no/such/script.json"])), 2);
}

#[test]
fn fuzz_default_run_is_clean() {
    let o = run(&["--json", "fuzz", "--games", "10"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    let props = last["summary"]["properties"].as_object().unwrap();
    for name in ["combination", "monotonicity", "minimality", "noalt", "necessitation", "substitution"] {
        assert_eq!(props[name]["counterexamples"], 0, "{name}");
    }
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn fuzz_falsify_finds_both_variants() {
    let o = run(&["fuzz", "--falsify"]);
    assert_eq!(code(&o), 0);
    let reports: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for p in ["combination_single", "monotonicity_single"] {
        assert!(reports.iter().any(|r| r["property"] == p), "{p}");
    }
}

#[test]
fn fuzz_rejects_bad_density() {
    assert_eq!(code(&run(&["fuzz", "--density", "2"])), 2);
    assert_eq!(code(&run(&["fuzz", "--density", "half"])), 2);
}

#[test]
fn fuzz_output_ignores_thread_count() {
    let args = ["--json", "fuzz", "--games", "8", "--seed", "9"];
    let one = Command::new(BIN).args(args).env("TROLLEY_MC_THREADS", "1").output().unwrap();
    let four = Command::new(BIN).args(args).env("TROLLEY_MC_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn paper_examples_all_pass() {
    let o = run(&["paper-examples"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches("PASS").count(), 7);
}

#[test]
fn paper_examples_with_no_doses_mismatch() {
    let o = run(&["--json", "paper-examples", "--mb-cap", "0"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_pass"], false);
    assert_eq!(v["claims"].as_array().unwrap().len(), 7);
}
