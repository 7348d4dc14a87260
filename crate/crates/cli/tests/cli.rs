use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ncchar_core::constructions::{gen_n1, gen_n2, union_copies};
use ncchar_core::network::CodedNetwork;
use ncchar_core::solutions::solve_n1;
use ncchar_core::PrimeModulus;
use tempfile::TempDir;

fn ncchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncchar"))
        .args(args)
        .env_remove("NCCHAR_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not one JSON document: {e}"))
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn gen(&self, name: &str, args: &[&str]) -> PathBuf {
        let path = self.path(name);
        let mut all = vec!["gen"];
        all.extend_from_slice(args);
        all.extend_from_slice(&["--out", path.to_str().unwrap()]);
        assert_eq!(code(&ncchar(&all)), 0);
        path
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn load(p: &Path) -> CodedNetwork {
    CodedNetwork::load(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gen_matches_library_and_aliases() {
    let w = Work::new();
    let n1 = w.gen("n1.json", &["--family", "n1", "--q", "2", "--n", "1"]);
    let fano = w.gen("fano.json", &["--family", "fano"]);
    assert_eq!(load(&n1), gen_n1(2, 1).unwrap());
    assert_eq!(fs::read(&n1).unwrap(), fs::read(&fano).unwrap());
    let nonfano = w.gen("nf.json", &["--family", "nonfano"]);
    assert_eq!(load(&nonfano), gen_n2(2, 1).unwrap());
}

#[test]
fn gen_with_copies_is_a_union() {
    let w = Work::new();
    let path = w.gen("u.json", &["--family", "n1", "--q", "2", "--n", "2", "--copies", "2"]);
    assert_eq!(load(&path), union_copies(&gen_n1(2, 2).unwrap(), 2).unwrap());
}

#[test]
fn gen_output_is_canonical() {
    let w = Work::new();
    let a = w.gen("a.json", &["--family", "n2", "--q", "3", "--n", "2"]);
    let b = w.gen("b.json", &["--family", "n2", "--q", "3", "--n", "2"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let stdout = ncchar(&["gen", "--family", "n2", "--q", "3", "--n", "2"]).stdout;
    assert_eq!(stdout, fs::read(&a).unwrap());
}

#[test]
fn solve_then_verify_passes() {
    let w = Work::new();
    let net = w.gen("n1.json", &["--family", "n1", "--q", "2", "--n", "2"]);
    let c = w.path("code.json");
    assert_eq!(code(&ncchar(&["solve", s(&net), "--p", "2", "--out", s(&c)])), 0);
    let out = ncchar(&["verify", s(&net), s(&c)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("8 of 8 terminals decode"));
    // Re-solving writes the same bytes.
    let c2 = w.path("code2.json");
    ncchar(&["solve", s(&net), "--p", "2", "--out", s(&c2)]);
    assert_eq!(fs::read(&c).unwrap(), fs::read(&c2).unwrap());
}

#[test]
fn solve_union_and_symbolic() {
    let w = Work::new();
    let net = w.gen("u.json", &["--family", "n2", "--q", "2", "--n", "1", "--copies", "3"]);
    let c = w.path("code.json");
    assert_eq!(code(&ncchar(&["solve", s(&net), "--p", "5", "--out", s(&c)])), 0);
    assert_eq!(code(&ncchar(&["verify", s(&net), s(&c)])), 0);
    let out = ncchar(&["solve", s(&net), "--symbolic"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("INV_Q"));
}

#[test]
fn solve_rejects_inadmissible_characteristics() {
    let w = Work::new();
    let n2 = w.gen("n2.json", &["--family", "n2", "--q", "2", "--n", "1"]);
    let out = ncchar(&["solve", s(&n2), "--p", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("divides q"));
    let n1 = w.gen("n1.json", &["--family", "n1", "--q", "6", "--n", "1"]);
    let out = ncchar(&["solve", s(&n1), "--p", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not divide"));
    assert_eq!(code(&ncchar(&["solve", s(&n1), "--p", "3"])), 0);
}

#[test]
fn solve_needs_a_known_construction() {
    let w = Work::new();
    let net = w.gen("n1.json", &["--family", "n1"]);
    let renamed = w.path("renamed.json");
    fs::write(&renamed, load(&net).with_name("my-network").save()).unwrap();
    assert_eq!(code(&ncchar(&["solve", s(&renamed), "--p", "2"])), 64);
}

#[test]
fn verify_cross_characteristic_lists_ta() {
    let w = Work::new();
    let net = w.gen("n1.json", &["--family", "n1", "--q", "2", "--n", "2"]);
    let c = w.path("p3.json");
    let code3 = solve_n1(2, 2).unwrap().instantiate(PrimeModulus::new(3).unwrap()).unwrap();
    fs::write(&c, code3.save()).unwrap();
    let out = ncchar(&["--json", "verify", s(&net), s(&c)]);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    let failing: Vec<&str> = report["terminals"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["pass"] == false)
        .map(|t| t["terminal"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["Ta:a1", "Ta:a2"]);
}

#[test]
fn verify_rejects_truncated_code() {
    let w = Work::new();
    let net = w.gen("n1.json", &["--family", "n1"]);
    let c = w.path("code.json");
    ncchar(&["solve", s(&net), "--p", "2", "--out", s(&c)]);
    let text = fs::read_to_string(&c).unwrap();
    fs::write(&c, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&ncchar(&["verify", s(&net), s(&c)])), 64);
    assert_eq!(code(&ncchar(&["verify", s(&net), s(&w.path("missing.json"))])), 64);
}

#[test]
fn search_exit_codes() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let nonfano = w.gen("nonfano.json", &["--family", "nonfano"]);
    assert_eq!(code(&ncchar(&["search", s(&fano), "--p", "3"])), 2);
    let witness = w.path("witness.json");
    assert_eq!(code(&ncchar(&["search", s(&nonfano), "--p", "3", "--out", s(&witness)])), 0);
    assert_eq!(code(&ncchar(&["verify", s(&nonfano), s(&witness)])), 0);
    assert_eq!(code(&ncchar(&["search", s(&fano), "--p", "3", "--budget", "1"])), 3);
}

#[test]
fn search_budget_from_environment() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let out = Command::new(env!("CARGO_BIN_EXE_ncchar"))
        .args(["--json", "search", s(&fano), "--p", "3"])
        .env("NCCHAR_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert_eq!(stdout_json(&out), serde_json::json!({"outcome": "inconclusive", "states": 1}));
}

#[test]
fn search_json_reports_states() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let out = ncchar(&["--json", "search", s(&fano), "--p", "2", "--workers", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["outcome"], "solvable");
    assert!(v["states"].as_u64().unwrap() > 0);
    assert_eq!(v["code"]["p"], 2);
}

#[test]
fn gadget_counts_applications() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let g = w.path("g.json");
    let out = ncchar(&["--json", "gadget", s(&fano), "--n", "1", "--out", s(&g)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["applications"], 1);
    assert!(load(&g).is_multiple_unicast());

    // Already multiple-unicast: unchanged.
    let g2 = w.path("g2.json");
    let out = ncchar(&["--json", "gadget", s(&g), "--n", "1", "--out", s(&g2)]);
    assert_eq!(stdout_json(&out)["applications"], 0);
    assert_eq!(fs::read(&g).unwrap(), fs::read(&g2).unwrap());

    let n1q3 = w.gen("n1q3.json", &["--family", "n1", "--q", "3", "--n", "1"]);
    let out = ncchar(&["--json", "gadget", s(&n1q3), "--n", "1", "--out", s(&w.path("g3.json"))]);
    assert_eq!(stdout_json(&out)["applications"], 2);
}

#[test]
fn gadgeted_network_can_be_solved() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let g = w.path("g.json");
    ncchar(&["gadget", s(&fano), "--n", "1", "--out", s(&g)]);
    let c = w.path("c.json");
    assert_eq!(code(&ncchar(&["solve", s(&g), "--p", "2", "--out", s(&c)])), 0);
    assert_eq!(code(&ncchar(&["verify", s(&g), s(&c)])), 0);
}

#[test]
fn union_and_info() {
    let w = Work::new();
    let fano = w.gen("fano.json", &["--family", "fano"]);
    let u = w.path("u.json");
    assert_eq!(code(&ncchar(&["union", s(&fano), "--k", "2", "--out", s(&u)])), 0);
    assert_eq!(load(&u), union_copies(&gen_n1(2, 1).unwrap(), 2).unwrap());
    let out = ncchar(&["--json", "info", s(&fano)]);
    let v = stdout_json(&out);
    assert_eq!(v["sources"], 3);
    assert_eq!(v["terminals"], 4);
    assert_eq!(v["multiple_unicast"], false);
    assert_eq!(v["unicast_violations"][0]["message"], "c1");
    let out = ncchar(&["info", s(&fano), "--dot"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&ncchar(&["frobnicate"])), 64);
    assert_eq!(code(&ncchar(&["gen", "--family", "n3"])), 64);
    assert_eq!(code(&ncchar(&["gen", "--family", "n1", "--q", "1"])), 64);
    assert_eq!(code(&ncchar(&["search", "x.json"])), 64);
    assert_eq!(code(&ncchar(&["--help"])), 0);
}
