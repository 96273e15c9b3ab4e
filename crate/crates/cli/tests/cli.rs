use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn attdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attdisc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn attdisc_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_attdisc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn greedy_singleton_nodes() {
    let o = attdisc(&[
        "solve",
        "greedy-singleton",
        &data("example3.txt"),
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["nodes"], serde_json::json!([2, 3, 5, 6, 7]));
    assert_eq!(v["method"], "greedy-singleton");
    assert_eq!(v["feasible"], true);
    assert_eq!(v["k"], 1);
    assert!(v["wall_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn exact_singleton_cardinality() {
    let o = attdisc(&[
        "solve",
        "exact-singleton",
        &data("example3.txt"),
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["cardinality"], 5);
    let per_pair = v["per_pair"].as_array().unwrap();
    assert_eq!(per_pair.len(), 3);
    assert!(per_pair.iter().all(|p| p["dist"].as_u64().unwrap() >= 3));
    assert_eq!(per_pair[0]["i1"], 1);
    assert_eq!(per_pair[0]["i2"], 2);
}

#[test]
fn infeasible_exit_code() {
    let o = attdisc(&["solve", "exact-periodic", &data("example1.txt"), "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("INFEASIBLE"));
    let o = attdisc(&[
        "solve",
        "greedy-singleton",
        &data("example3.txt"),
        "--k",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_exit_code() {
    let o = attdisc(&[
        "solve",
        "exact-periodic",
        &data("example2.txt"),
        "--k",
        "1",
        "--max-size",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("BUDGET_EXCEEDED"));
    let o = attdisc(&[
        "solve",
        "exact-periodic",
        &data("example2.txt"),
        "--k",
        "1",
        "--max-seconds",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(
        attdisc(&["solve", "simplex", &data("example1.txt")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(attdisc(&[]).status.code(), Some(1));
    let o = attdisc(&["dump", &data("duplicate.txt")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("identical"), "{}", stderr(&o));
    let o = attdisc_stdin(&["dump", "-"], b"2 3\n1\n01\n1\n000\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    assert_eq!(
        attdisc(&["solve", "greedy-periodic", "/no/such/file"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(attdisc(&["--help"]).status.code(), Some(0));
}

#[test]
fn singleton_methods_reject_periodic_input() {
    let o = attdisc(&[
        "solve",
        "exact-singleton",
        &data("example1.txt"),
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("period 2"), "{}", stderr(&o));
}

#[test]
fn human_output_uses_node_names() {
    let o = attdisc(&["solve", "exact-periodic", &data("example1.txt"), "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("nodes:       v2 v3 v5"), "{out}");
    assert!(out.contains("Att2-Att3: 3"));
}

#[test]
fn verify_examples() {
    let o = attdisc(&[
        "verify",
        &data("example1.txt"),
        "--nodes",
        "1,2,3,5",
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["feasible"], true);
    for p in v["per_pair"].as_array().unwrap() {
        assert!([3, 4].contains(&p["dist"].as_u64().unwrap()));
    }

    let o = attdisc(&[
        "verify",
        &data("example1.txt"),
        "--nodes",
        "1,4",
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["feasible"], false);
    assert_eq!(v["per_pair"][2]["dist"], 0);
    assert_eq!(v["min_distance"], 0);

    let o = attdisc(&["verify", &data("example2.txt"), "--nodes", "1,2,3,4,5,6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict:  feasible"));

    let o = attdisc(&["verify", &data("example1.txt"), "--nodes", "1,6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("out of range"));
}

#[test]
fn json_solution_round_trips_through_verify() {
    for (method, file) in [
        ("exact-periodic", "example1.txt"),
        ("greedy-periodic", "example2.txt"),
        ("exact-singleton", "example3.txt"),
        ("brute-force", "example3.txt"),
    ] {
        let o = attdisc(&["solve", method, &data(file), "--k", "1", "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{method}: {}", stderr(&o));
        let solved = json(&o);
        let v = attdisc_stdin(
            &["verify", &data(file), "--solution", "-", "--format", "json"],
            &o.stdout,
        );
        assert_eq!(v.status.code(), Some(0), "{method}: {}", stderr(&v));
        let verified = json(&v);
        assert_eq!(verified["per_pair"], solved["per_pair"], "{method}");
        assert_eq!(verified["nodes"], solved["nodes"]);
        assert_eq!(verified["k"], 1);
    }
}

#[test]
fn dump_matrices() {
    let o = attdisc(&["dump", &data("example1.txt")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("poa,v1-v2,v1-v3,v1-v4,v1-v5,v2-v3"));
    assert!(lines.next().unwrap().starts_with("Att1-Att2,2,2,1,"));

    let o = attdisc(&["dump", &data("example3.txt")]);
    assert_eq!(
        stdout(&o),
        "poa,v1,v2,v3,v4,v5,v6,v7,v8\n\
         Att1-Att2,0,1,1,0,1,0,0,0\n\
         Att1-Att3,0,0,0,0,1,1,1,1\n\
         Att2-Att3,0,1,1,0,0,1,1,1\n"
    );

    let o = attdisc(&["dump", &data("example1.txt"), "--matrix", "c-att"]);
    assert_eq!(o.status.code(), Some(1));
    let o = attdisc(&["dump", &data("example3.txt"), "--matrix", "d"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("poa,v1-v2"));
}

#[test]
fn gen_is_seeded() {
    let a = attdisc(&["gen", "--n", "12", "--m", "4", "--len", "3", "--seed", "9"]);
    let b = attdisc(&["gen", "--n", "12", "--m", "4", "--len", "3", "--seed", "9"]);
    let c = attdisc(&["gen", "--n", "12", "--m", "4", "--len", "3", "--seed", "10"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    // The generated text is a valid instance.
    let o = attdisc_stdin(&["solve", "greedy-periodic", "-"], &a.stdout);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = attdisc(&["gen", "--n", "3", "--m", "2", "--k", "1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = attdisc_stdin(&["solve", "exact-singleton", "-", "--k", "1"], &o.stdout);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn bench_report() {
    let args = [
        "bench",
        "--n",
        "20",
        "--m",
        "3",
        "--k",
        "1",
        "--reps",
        "3",
        "--seed",
        "4",
        "--no-timing",
    ];
    let a = attdisc(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let out = stdout(&a);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "rep,n,m,K,len,exact_time_ms,greedy_time_ms,exact_size,greedy_size,ratio,status"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("summary,20,3,1,1,"));
    assert_eq!(attdisc(&args).stdout, a.stdout);

    let o = attdisc(&[
        "bench",
        "--n",
        "8",
        "--m",
        "3",
        "--len",
        "2",
        "--reps",
        "2",
        "--parallel",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn thread_count_flag() {
    let o = attdisc(&[
        "--threads",
        "2",
        "solve",
        "exact-periodic",
        &data("example2.txt"),
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
