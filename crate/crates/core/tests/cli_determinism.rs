use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parity-distill"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_twice(args: &[&str]) -> Vec<u8> {
    let a = run(args);
    let b = run(args);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout, "{args:?}");
    a.stdout
}

#[test]
fn sweep_is_byte_identical() {
    for fmt in ["csv", "json"] {
        let out = stdout_twice(&[
            "sweep",
            "--channel",
            "dep",
            "--statistics",
            "fermion",
            "--a-steps",
            "4",
            "--phi",
            "0,pi/2,pi",
            "--t-steps",
            "9",
            "--format",
            fmt,
        ]);
        assert!(!out.is_empty());
    }
    let csv = String::from_utf8(stdout_twice(&[
        "sweep",
        "--channel",
        "ad",
        "--statistics",
        "boson",
    ]))
    .unwrap();
    assert_eq!(csv.lines().count(), 1 + 11 * 2 * 201);
}

#[test]
fn sweep_row_for_balanced_antisymmetric_input() {
    let out = stdout_twice(&[
        "sweep",
        "--channel",
        "pd",
        "--statistics",
        "boson",
        "--a-min",
        "0.7071067811865476",
        "--a-max",
        "0.7071067811865476",
        "--a-steps",
        "1",
        "--phi",
        "pi",
        "--t-steps",
        "1",
        "--t-max",
        "0",
    ]);
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!(col("p_odd").parse::<f64>().unwrap(), 1.0);
    assert_eq!(col("p_even").parse::<f64>().unwrap(), 0.0);
    assert_eq!(col("fidelity_even"), "");
}

#[test]
fn protocol_runs_are_reproducible() {
    let exact = stdout_twice(&[
        "protocol",
        "--scheme",
        "reset-dep",
        "--statistics",
        "fermion",
        "--iterations",
        "10",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&exact).unwrap();
    let last = &v["iterations"][9];
    assert_eq!(last["j"], 10);
    assert!(
        (last["cumulative_success"].as_f64().unwrap() - (1.0 - 0.75f64.powi(10))).abs() <= 1e-12
    );

    let mc = [
        "protocol",
        "--scheme",
        "reset-ad",
        "--statistics",
        "boson",
        "--mode",
        "mc",
        "--trials",
        "20000",
        "--seed",
        "42",
    ];
    let a = stdout_twice(&mc);
    let mut other = mc.to_vec();
    *other.last_mut().unwrap() = "43";
    assert_ne!(a, run(&other).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["trials"], 20000);
    assert!(v["generator"].is_string());
}

#[test]
fn po_graph_is_reproducible() {
    let dot = stdout_twice(&["po-graph", "--statistics", "fermion", "--depth", "3"]);
    assert!(dot.starts_with(b"digraph"));
    let json = stdout_twice(&[
        "po-graph",
        "--statistics",
        "boson",
        "--depth",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["statistics"], "boson");
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["sweep", "--channel", "xx", "--statistics", "boson"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--channel",
            "pd",
            "--statistics",
            "boson",
            "--a-max",
            "1.5"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&["protocol", "--scheme", "non-reset", "--statistics", "boson"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "sweep",
            "--channel",
            "pd",
            "--statistics",
            "boson",
            "--output",
            "/nonexistent/dir/x.csv"
        ])
        .status
        .code(),
        Some(3)
    );
    let v = run(&["verify"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(!String::from_utf8_lossy(&v.stdout).contains("FAIL"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("pd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    let args = [
        "sweep",
        "--channel",
        "pd",
        "--statistics",
        "fermion",
        "--t-steps",
        "3",
        "--format",
        "json",
    ];
    let stdout = run(&args).stdout;
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert_eq!(run(&with_file).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
