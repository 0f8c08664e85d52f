use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dpg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpg"))
        .current_dir(dir)
        .env_remove("DPG_SEED")
        .args(args)
        .output()
        .expect("spawn dpg")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = dpg(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn fail(dir: &Path, args: &[&str]) -> String {
    let out = dpg(dir, args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, f: &str) -> String {
    std::fs::read_to_string(dir.join(f)).unwrap()
}

#[test]
fn grow_then_replay_gives_identical_bytes() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    let v = ok(
        d,
        &[
            "grow", "--protocol", "sf:2.5", "--seed-graph", "gen:complete:4", "--n", "300", "--rng-seed", "9",
            "--out", "t.txt", "--graph-out", "g.txt",
        ],
    );
    assert_eq!(v["graph"]["n"], 300);
    ok(d, &["replay", "t.txt", "--seed-graph", "gen:complete:4", "--out", "r.txt"]);
    assert_eq!(read(d, "g.txt"), read(d, "r.txt"));
    ok(d, &["replay", "t.txt", "--seed-graph", "g.txt", "--reverse", "--out", "back.txt"]);
    ok(d, &["grow", "--protocol", "max", "--seed-graph", "gen:complete:4", "--n", "4", "--out", "k4.txt", "--graph-out", "k4g.txt"]);
    // Same edges; the undone ids stay tombstoned.
    let edges = |f: &str| read(d, f).lines().filter(|l| !l.starts_with(['#', '!'])).map(String::from).collect::<Vec<_>>();
    assert_eq!(edges("back.txt"), edges("k4g.txt"));
    assert!(read(d, "back.txt").contains("! removed=4,5,6"));
}

#[test]
fn seed_comes_from_the_environment() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    let args = ["grow", "--protocol", "sf:2.2", "--seed-graph", "gen:cycle:6", "--n", "80"];
    let run = |extra: &[&str], env: Option<&str>, out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dpg"));
        c.current_dir(d).env_remove("DPG_SEED").args(args).args(extra).args(["--out", out]);
        if let Some(s) = env {
            c.env("DPG_SEED", s);
        }
        assert!(c.output().unwrap().status.success());
        read(d, out)
    };
    let a = run(&["--rng-seed", "77"], None, "a.txt");
    let b = run(&[], Some("77"), "b.txt");
    let c = run(&[], Some("78"), "c.txt");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn reduce_trace_undoes_to_the_input() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["grow", "--protocol", "linear:0.8", "--seed-graph", "gen:complete:5", "--n", "40", "--out", "t.txt", "--graph-out", "g.txt"]);
    let v = ok(
        d,
        &["reduce", "g.txt", "--policy", "random", "--backtrack", "1", "--trace-out", "r.txt", "--kernel-out", "k.txt"],
    );
    assert_eq!(v["irreducible"], true);
    assert_eq!(v["removed_count"].as_u64().unwrap() + v["kernel_n"].as_u64().unwrap(), 40);
    assert!(read(d, "r.txt").contains("# direction=reduce"));
    ok(d, &["replay", "r.txt", "--seed-graph", "k.txt", "--reverse", "--out", "back.txt"]);
    assert_eq!(read(d, "back.txt"), read(d, "g.txt"));
    ok(d, &["replay", "r.txt", "--seed-graph", "g.txt", "--out", "fwd.txt"]);
    assert_eq!(read(d, "fwd.txt"), read(d, "k.txt"));
}

#[test]
fn corrupted_trace_reports_the_line() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["grow", "--protocol", "max", "--seed-graph", "gen:complete:3", "--n", "12", "--out", "t.txt"]);
    let text = read(d, "t.txt");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let idx = lines.iter().position(|l| l.starts_with("STEP")).unwrap() + 3;
    lines[idx] = lines[idx].replace("STEP", "STPE");
    std::fs::write(d.join("bad.txt"), lines.join("\n") + "\n").unwrap();
    let err = fail(d, &["replay", "bad.txt", "--seed-graph", "gen:complete:3"]);
    assert!(err.contains(&format!("line {}", idx + 1)), "{err}");
    // A well-formed line that does not fit the graph.
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[idx] = lines[idx].replace("M=", "M=0-1,");
    std::fs::write(d.join("bad2.txt"), lines.join("\n") + "\n").unwrap();
    let err = fail(d, &["replay", "bad2.txt", "--seed-graph", "gen:complete:3"]);
    assert!(err.contains(&format!("line {}", idx + 1)), "{err}");
}

#[test]
fn experiments_are_byte_identical_across_runs_and_threads() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    std::fs::write(d.join("base.cfg"), "protocol = sf:2.5\nseed_graph = gen:complete:4\nchecks = powerlaw\n").unwrap();
    std::fs::write(d.join("exp.cfg"), "# small run\ninclude base.cfg\nname = tiny\nn = 400\nseeds = 1..3\n").unwrap();
    ok(d, &["experiment", "exp.cfg", "--out-dir", "a"]);
    ok(d, &["--threads", "3", "experiment", "exp.cfg", "--out-dir", "b"]);
    for f in ["trace-1.txt", "trace-3.txt", "report-2.json", "summary.json", "manifest.json"] {
        assert_eq!(read(d, &format!("a/{f}")), read(d, &format!("b/{f}")), "{f}");
    }
    let summary: Value = serde_json::from_str(&read(d, "a/summary.json")).unwrap();
    assert_eq!(summary["runs"], 3);
}

#[test]
fn config_errors_exit_nonzero() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    std::fs::write(d.join("empty.cfg"), "# nothing\n").unwrap();
    assert!(fail(d, &["experiment", "empty.cfg"]).contains("config is empty"));
    std::fs::write(d.join("bad.cfg"), "protocol = max\nfrobnicate = 1\n").unwrap();
    assert!(fail(d, &["experiment", "bad.cfg"]).contains("unknown key"));
    std::fs::write(d.join("loop.cfg"), "include loop.cfg\n").unwrap();
    assert!(fail(d, &["experiment", "loop.cfg"]).contains("include cycle"));
    assert!(fail(d, &["experiment", "--preset", "nope"]).contains("unknown preset"));
    assert!(fail(d, &["bounds", "missing.txt"]).contains("missing.txt"));
}

#[test]
fn presets_pass() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    for p in ["maxdpg-1024", "linear-0.75", "regular-4"] {
        let v = ok(d, &["experiment", "--preset", p, "--out-dir", p]);
        assert_eq!(v["passed"], true, "{p}");
    }
}

#[test]
fn gadget_commands() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    std::fs::write(d.join("f.cnf"), "c example\np cnf 3 2\n1 -2 3 0\n-1 2 0\n").unwrap();
    let v = ok(d, &["gadget", "sat", "f.cnf", "--verify", "--out", "g.txt"]);
    assert_eq!(v["verification"]["satisfiable"], true);
    assert_eq!(v["verification"]["removable"], true);
    assert!(v["max_degree"].as_u64().unwrap() <= 28);
    let roles: Value = serde_json::from_str(&read(d, "g.txt.roles.json")).unwrap();
    assert_eq!(roles["variable_vertices"].as_array().unwrap().len(), 3);
    assert_eq!(roles["m_target"], 5);
    let padded = ok(d, &["gadget", "sat", "f.cnf", "--epsilon", "0.5", "--out", "p.txt"]);
    assert_eq!(padded["n"].as_u64().unwrap(), v["n"].as_u64().unwrap() + 28 * 25);
    std::fs::write(d.join("u.cnf"), "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let u = ok(d, &["gadget", "sat", "u.cnf", "--verify", "--out", "u.txt"]);
    assert_eq!(u["verification"]["removable"], false);
    let out = dpg(d, &["gadget", "irreducible4", "--k", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# n=12\n"));
    assert_eq!(text.lines().count(), 25);
    assert!(fail(d, &["gadget", "irreducible4", "--k", "2"]).contains("at least 3"));
}

#[test]
fn bounds_and_analyze() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    let v = ok(d, &["bounds", "gen:petersen", "--exact"]);
    assert_eq!(v["exact_nu"], 5);
    assert!(v["vizing_bound"].as_u64().unwrap() <= 5);
    ok(d, &["grow", "--protocol", "max", "--seed-graph", "gen:complete:2", "--n", "256", "--out", "t.txt"]);
    let r = ok(d, &["analyze", "t.txt", "--check", "maxdpg", "--slack", "6", "--warmup", "64", "--brief"]);
    assert_eq!(r["passed"], true);
    assert!(r.get("samples").is_none());
    let r = ok(d, &["analyze", "t.txt", "--check", "density", "--a", "1.5", "--warmup", "64", "--brief"]);
    assert_eq!(r["passed"], true);
    let r = ok(d, &["analyze", "t.txt", "--check", "linear", "--seed-graph", "gen:complete:2", "--brief"]);
    assert!(r["passed"].is_boolean());
    ok(d, &["grow", "--protocol", "sf:3", "--seed-graph", "gen:complete:4", "--n", "500", "--out", "s.txt", "--graph-out", "sg.txt"]);
    let a = ok(d, &["analyze", "sg.txt", "--check", "powerlaw", "--gamma", "3"]);
    let b = ok(d, &["analyze", "s.txt", "--check", "powerlaw", "--seed-graph", "gen:complete:4"]);
    assert_eq!(a, b);
    assert!(fail(d, &["analyze", "sg.txt", "--check", "maxdpg"]).contains("not a trace"));
}

#[test]
fn manifest_hashes_outputs() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["--manifest", "m.json", "grow", "--protocol", "max", "--seed-graph", "gen:complete:3", "--n", "20", "--out", "t.txt"]);
    let m: Value = serde_json::from_str(&read(d, "m.json")).unwrap();
    let want = {
        use sha2::Digest;
        hex::encode(sha2::Sha256::digest(read(d, "t.txt").as_bytes()))
    };
    assert_eq!(m["outputs"]["t.txt"], want);
    assert_eq!(m["rng_seed"], 0);
    assert_eq!(m["versions"]["dpg-core"], env!("CARGO_PKG_VERSION"));
}
