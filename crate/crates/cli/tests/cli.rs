use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value as Json;

fn spec(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "specs", &format!("{name}.tspec")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn target(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_target")).args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn demo(spec_file: &str, fun: &str) -> String {
    format!("{} --spec {spec_file} --fun {fun}", env!("CARGO_BIN_EXE_target-demo-fut"))
}

#[test]
fn counterexample_exits_with_one() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "rescale", "--builtin", "--depth", "1", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json_of(&o);
    assert_eq!(j["status"], "counterexample");
    assert_eq!(j["inputs"]["r2"], 0);
    assert_eq!(j["failure"]["kind"], "output");
}

#[test]
fn pass_exits_with_zero() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "rescalePos", "--builtin", "--depth", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json_of(&o);
    assert_eq!(j["tests"], 18);
    assert_eq!(j["exhausted"], true);
}

#[test]
fn human_report_lists_inputs() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "rescale", "--builtin", "rescale", "--depth", "1"]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.starts_with("FAILED: rescale"), "{out}");
    assert!(out.contains("r2 = 0"), "{out}");
}

#[test]
fn max_tests_limits_the_run() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "averagePos", "--builtin", "--depth", "3", "--max-tests", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json_of(&o);
    assert_eq!((j["tests"].as_u64(), j["exhausted"].as_bool()), (Some(4), Some(false)));
}

#[test]
fn external_function_over_the_json_protocol() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "average", "--cmd", &demo(&s, "average"), "--depth", "1", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json_of(&o);
    assert_eq!(j["failure"]["kind"], "crash");
    assert_eq!(j["inputs"]["_0"]["ctor"], ":");

    let l = spec("ordlist");
    let o = target(&["check", "--spec", &l, "--fun", "insert", "--cmd", &demo(&l, "insert"), "--depth", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = target(&["check", "--spec", &l, "--fun", "insertBroken", "--cmd", &demo(&l, "insertBroken"), "--depth", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn external_protocol_failures() {
    let s = spec("scores");
    let base = ["check", "--spec", s.as_str(), "--fun", "rescale", "--depth", "1", "--json"];
    let with = |cmd: &str, extra: &[&str]| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend(["--cmd", cmd]);
        a.extend(extra);
        target(&a)
    };

    let o = with("sh -c 'while read l; do echo nonsense; done'", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_of(&o)["status"], "error");

    // exiting without answering is a crash of the function
    let o = with("sh -c 'read l; exit 3'", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["failure"]["kind"], "crash");

    let o = with("sh -c 'while read l; do echo {\\\"error\\\":\\\"nope\\\"}; done'", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["failure"]["message"], "nope");

    let o = with("sh -c 'sleep 5'", &["--fut-timeout", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn function_parameters_need_a_builtin() {
    let s = spec("scores");
    let o = target(&["check", "--spec", &s, "--fun", "padAverage", "--cmd", "cat", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("function"));
}

#[test]
fn usage_errors() {
    let s = spec("scores");
    assert_eq!(target(&["check", "--spec", "/nonexistent.tspec", "--fun", "f", "--builtin", "--depth", "1"]).status.code(), Some(2));
    assert_eq!(target(&["check", "--spec", &s, "--fun", "nope", "--builtin", "--depth", "1"]).status.code(), Some(2));
    assert_eq!(target(&["check", "--spec", &s, "--fun", "rescale", "--depth", "1"]).status.code(), Some(2));
    let o = target(&["check", "--spec", &s, "--fun", "rescale", "--builtin", "--depth", "1", "--solver", "/nonexistent/z3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_funs() {
    let o = target(&["check", "--spec", &spec("rbt"), "--list-funs"]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    let names: Vec<&str> = out.lines().map(|l| l.split(" ::").next().unwrap()).collect();
    assert_eq!(names, ["add", "addNoBalance"]);
}

#[test]
fn bench_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let plots = dir.path().join("plots");
    let o = target(&[
        "bench",
        "--benchmarks",
        "List.insert,OrdList.enum",
        "--max-depth",
        "2",
        "--parallel",
        "--csv",
        csv.to_str().unwrap(),
        "--plot-data",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("benchmark,depth,strategy,seconds,count,timeout"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 3 * 2);
    for d in 0..=2 {
        for b in ["List.insert", "OrdList.enum"] {
            let count = |s: &str| {
                rows.iter()
                    .find(|r| r[0] == b && r[1] == d.to_string() && r[2] == s)
                    .map(|r| r[4].to_string())
                    .unwrap()
            };
            assert_eq!(count("symbolic"), count("baseline"), "{b} depth {d}");
        }
    }
    assert!(plots.join("List_insert.dat").exists());
    assert!(plots.join("plot.gp").exists());
}

#[test]
fn demo_fut_speaks_the_protocol() {
    use std::io::Write;
    let s = spec("scores");
    let mut child = Command::new(env!("CARGO_BIN_EXE_target-demo-fut"))
        .args(["--spec", &s, "--fun", "rescale"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, "{{\"args\":[5,100,2]}}").unwrap();
    writeln!(stdin, "{{\"args\":[0,1,0]}}").unwrap();
    writeln!(stdin, "{{\"args\":[1]}}").unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    let lines: Vec<Json> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["result"], 40);
    assert_eq!(lines[1]["error"], "divide by zero");
    assert!(lines[2]["error"].is_string());
}
