use std::path::Path;
use std::process::{Command, Output};

use sagrover_core::{parse_model, serialize_model, QuboModel};
use serde_json::Value;

const FIVE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/five.qubo");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sagrover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn error_line(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    serde_json::from_str(err.trim()).expect("stderr is one JSON line")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn reduce_five_variable_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.qubo");
    let o = run(&["--output", out.to_str().unwrap(), "reduce", FIVE, "--fix", "0=0", "--fix", "3=1"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text, "qubo 1\nn 3\noffset 0\nq 0 1 1\nq 0 2 3\nq 1 2 2\n");
    let v = json(&o);
    assert_eq!(v["result"]["terms_before"], 10);
    assert_eq!(v["result"]["terms_after"], 3);
    assert_eq!(v["result"]["index_map"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["manifest"]["command"], "reduce");
    assert_eq!(v["manifest"]["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn reduce_without_fixes_normalizes() {
    let o = run(&["reduce", FIVE]);
    assert!(o.status.success());
    let v = json(&o);
    let model = QuboModel::five_variable_example();
    assert_eq!(v["result"]["model"].as_str().unwrap(), serialize_model(&model));
}

#[test]
fn reduce_everything_leaves_the_cost() {
    let o = run(&[
        "reduce", FIVE, "--fix", "0=0", "--fix", "1=1", "--fix", "2=1", "--fix", "3=1", "--fix", "4=1",
    ]);
    assert!(o.status.success());
    let m = parse_model(json(&o)["result"]["model"].as_str().unwrap()).unwrap();
    assert_eq!(m.n(), 0);
    assert_eq!(m.offset(), 6.0);
}

#[test]
fn reduce_rejects_bad_fixes() {
    for fixes in [&["--fix", "0=0", "--fix", "0=1"][..], &["--fix", "5=1"], &["--fix", "1=2"], &["--fix", "x"]] {
        let mut args = vec!["reduce", FIVE];
        args.extend(fixes);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{fixes:?}");
        assert_eq!(error_line(&o)["error"], "usage");
    }
}

#[test]
fn solve_reports_bitstring_and_counters() {
    let o = run(&["--seed", "3", "solve", FIVE, "--q", "3", "--backend", "grover-circuit", "--iterations", "300"]);
    assert!(o.status.success());
    let r = &json(&o)["result"];
    assert_eq!(r["best_cost"], -5.0);
    let bits = r["best_assignment"].as_str().unwrap();
    assert!(bits == "00001" || bits == "00101", "{bits}");
    assert_eq!(r["counters"]["classical_evaluations"], 300);
    assert_eq!(r["counters"]["configurations"], 300 * 8);
    assert!(r["counters"]["oracle_calls"].as_u64().unwrap() > 0);
    assert!(r["modeled_runtime"]["measured"]["t_hy"].as_f64().unwrap() > 0.0);
}

#[test]
fn classical_solve_csv() {
    let o = run(&["--format", "csv", "solve", FIVE, "--mode", "classical", "--iterations", "10000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
    let at = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!(at("mode"), "classical");
    assert_eq!(at("oracle_calls"), "0");
    assert_eq!(at("classical_evaluations"), "10000");
}

#[test]
fn solve_capacity_error() {
    let o = run(&["solve", FIVE, "--q", "21", "--backend", "grover-semantic"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "capacity");
}

#[test]
fn io_and_parse_errors() {
    let o = run(&["solve", "/no/such/file.qubo"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_line(&o)["error"], "io");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.qubo", "qubo 1\nn 2\nl 0 1\nl 0 2\n");
    let o = run(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "parse");
}

#[test]
fn synth_verifies_reduced_model() {
    let dir = tempfile::tempdir().unwrap();
    let reduced = write(dir.path(), "r.qubo", "qubo 1\nn 3\noffset 0\nq 0 1 1\nq 0 2 3\nq 1 2 2\n");
    let gates = dir.path().join("c.txt");
    let o = run(&["synth", &reduced, "--verify", "--circuit", gates.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &json(&o)["result"];
    assert_eq!(r["verification"]["passed"], 8);
    assert_eq!(r["verification"]["total"], 8);
    let dump = std::fs::read_to_string(gates).unwrap();
    assert_eq!(dump, r["circuit"].as_str().unwrap());
    assert!(dump.starts_with(&format!("qubits {}\n", r["report"]["qubits"])));

    let o = run(&["--format", "csv", "synth", &reduced, "--verify"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("input,classical,circuit,clean,pass"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",true")).count(), 8);
}

#[test]
fn synth_errors() {
    let dir = tempfile::tempdir().unwrap();
    let frac = write(dir.path(), "f.qubo", "qubo 1\nn 2\nl 0 0.5\n");
    let o = run(&["synth", &frac]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "synthesis");

    let mut wide = String::from("qubo 1\nn 7\n");
    for i in 0..7 {
        wide.push_str(&format!("l {i} 100000\n"));
    }
    let wide = write(dir.path(), "w.qubo", &wide);
    let o = run(&["synth", &wide]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "capacity");
}

#[test]
fn synth_zero_model_has_no_gates() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.qubo", "qubo 1\nn 2\n");
    let o = run(&["synth", &zero, "--verify"]);
    assert!(o.status.success());
    let r = &json(&o)["result"];
    assert!(r["report"]["gate_counts"].as_object().unwrap().values().all(|v| v == 0));
    assert_eq!(r["report"]["monomial_terms"], 0);
    assert_eq!(r["verification"]["passed"], 4);
}

#[test]
fn model_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let o = run(&["--format", "csv", "model", "--plot-output", plot.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,T_Q,T_G,X_QUBO,T_SA,T_hy,X_SA");
    assert_eq!(lines.len(), 11);
    assert!(lines[5].starts_with("10,22800,71250,0.32,22813,71263,"));
    let plot = std::fs::read_to_string(plot).unwrap();
    assert!(plot.starts_with("q,T_SA,T_hy,X_SA,log10_T_SA,log10_T_hy,log10_X_SA\n"));
    assert_eq!(plot.lines().count(), 11);

    let o = run(&["--format", "csv", "model", "--q-oh", "1", "--q-max", "2"]);
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(3), Some("2"));

    let o = run(&["model", "--q-min", "32", "--q-max", "36"]);
    let r = &json(&o)["result"];
    let xs: Vec<f64> = r["rows"].as_array().unwrap().iter().map(|r| r["x_sa"].as_f64().unwrap()).collect();
    assert_eq!(xs.iter().map(|x| x.round() as i64).collect::<Vec<_>>(), [477, 751, 1051]);
    assert_eq!(r["advantage_threshold"], 14);

    let o = run(&["model", "--t-q", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_table() {
    let o = run(&["verify"]);
    assert!(o.status.success());
    let r = &json(&o)["result"];
    assert_eq!(r["passed"], 8);
    assert_eq!(r["minimum"], 0.0);
    assert_eq!(r["minimizers"], serde_json::json!(["000", "100", "010", "001"]));
    for row in r["rows"].as_array().unwrap() {
        let full = row["configuration"].as_str().unwrap();
        assert!(full.starts_with('0') && &full[3..4] == "1");
    }
}

#[test]
fn verify_fault_injection_fails() {
    let o = run(&["verify", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let e = error_line(&o);
    assert_eq!(e["error"], "verification");
    assert!(e["message"].as_str().unwrap().contains("configuration"));
}

#[test]
fn gen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.qubo");
    let o = run(&["--seed", "9", "--output", path.to_str().unwrap(), "gen", "--n", "12"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let m = parse_model(&text).unwrap();
    assert_eq!(m.n(), 12);
    assert_eq!(serialize_model(&m), text);
    let note = error_line(&o);
    assert_eq!(note["manifest"]["params"]["seed"], 9);

    let again = run(&["--seed", "9", "gen", "--n", "12"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn json_outputs_parse() {
    for args in [&["model"][..], &["verify"], &["solve", FIVE, "--iterations", "20", "--trace"]] {
        let o = run(args);
        let v = json(&o);
        assert!(v["manifest"]["version"].is_string(), "{args:?}");
        assert!(v["manifest"]["timestamp"].is_u64());
    }
}
