use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heunbound"))
        .args(args)
        .output()
        .expect("run heunbound")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(s: &str) -> Vec<Vec<String>> {
    s.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn frequency_closed_form_row() {
    let o = run(&["frequency", "--case", "A", "--m", "1", "--a", "1", "--n", "1", "--l", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "0.5");
}

#[test]
fn spectrum_examples() {
    let o = run(&["spectrum", "--case", "A", "--m", "1", "--a", "1", "--n-max", "2", "--l-max", "1"]);
    let rows = data_rows(&stdout(&o));
    let ground = rows.iter().find(|r| r[1] == "1" && r[2] == "0").unwrap();
    assert_eq!((ground[4].as_str(), ground[5].as_str()), ("0.5", "1.58113883"));
    // n ascending, then l ascending
    let keys: Vec<(i32, i32)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    let o = run(&["spectrum", "--case", "A", "--m", "1", "--a", "2", "--n-max", "1", "--l-max", "1"]);
    let rows = data_rows(&stdout(&o));
    let r = rows.iter().find(|r| r[2] == "1").unwrap();
    assert_eq!((r[4].as_str(), r[5].as_str()), ("0.666666667", "2.081666"));
}

#[test]
fn empty_sweep_is_header_only() {
    let o = run(&["spectrum", "--m", "1", "--a", "1", "--n-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, vec!["case,n,l,root_index,omega,E_plus,E_minus,residual,error"]);
}

#[test]
fn failing_cells_carry_an_error_column() {
    let o = run(&["spectrum", "--case", "B", "--m", "1", "--a", "1", "--chi", "1", "--n-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let row = s.lines().last().unwrap();
    assert!(row.starts_with("B,1,0,,,,,,"), "{row}");
    assert!(row.contains("no physical root"));
}

#[test]
fn sweep_bounds_are_enforced() {
    assert_eq!(run(&["spectrum", "--m", "1", "--a", "1", "--n-max", "65"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--m", "1", "--a", "1", "--l-max", "65"]).status.code(), Some(2));
}

#[test]
fn thread_cap_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_heunbound"))
        .args(["spectrum", "--m", "1", "--a", "1", "--n-max", "1"])
        .env("HEUNBOUND_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frequency", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frequency", "--m", "1", "--a", "1", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frequency", "--case", "A", "--m", "1", "--a", "1", "--chi", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["frequency", "--case", "B", "--m", "1", "--a", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frequency", "--m", "1", "--a", "1", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frequency", "--m", "-1", "--a", "1"]).status.code(), Some(2));
    let o = run(&["nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# comment\ncase = A\nm = 1\na = 2\nl = 1\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["frequency", "--config", p]);
    assert_eq!(data_rows(&stdout(&o))[0][1], "0.666666667");
    let o = run(&["frequency", "--config", p, "--a", "1"]);
    assert_eq!(data_rows(&stdout(&o))[0][1], "0.166666667");

    std::fs::write(&path, "m = 1\na = 1\nbogus = 3\n").unwrap();
    assert_eq!(run(&["frequency", "--config", p]).status.code(), Some(2));
    std::fs::write(&path, "m 1\n").unwrap();
    assert_eq!(run(&["frequency", "--config", p]).status.code(), Some(2));
}

#[test]
fn json_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["frequency", "--m", "1.3", "--a", "-2.7", "--n", "3", "--l", "1"],
        &["spectrum", "--m", "1", "--a", "4", "--chi", "0.1", "--n-max", "2", "--l-max", "1"],
        &["verify", "--m", "1", "--a", "1", "--grid-n", "2000"],
        &["wavefunction", "--m", "0.7", "--a", "-1.1", "--l", "2", "--grid-n", "101"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("out{i}.json"));
        let p = path.to_str().unwrap();
        let mut first: Vec<&str> = args.to_vec();
        first.extend(["--format", "json", "--output", p]);
        assert_eq!(run(&first).status.code(), Some(0), "{args:?}");
        let again = run(&[args[0], "--from-json", p]);
        assert_eq!(again.status.code(), Some(0));
        assert_eq!(again.stdout, std::fs::read(&path).unwrap(), "{args:?}");
    }
    let path = dir.path().join("out0.json");
    let o = run(&["spectrum", "--from-json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frequency", "--from-json", path.to_str().unwrap(), "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_pass_and_fail() {
    let o = run(&["verify", "--case", "B", "--m", "1", "--a", "4", "--chi", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("PASS root 0"));
    assert!(stdout(&o).trim_end().ends_with(",PASS"));

    let o = run(&["verify", "--m", "1", "--a", "1", "--force-omega", "0.4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["pass"], false);
    assert!(v["result"]["report"]["rows"][0]["rel_error"].as_f64().unwrap() > 1e-2);
}

#[test]
fn wavefunction_headers_and_rows() {
    let o = run(&["wavefunction", "--m", "1", "--a", "1"]);
    let s = stdout(&o);
    assert!(s.contains("# nodes=0\n"));
    let norm: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("# norm_constant="))
        .unwrap()
        .parse()
        .unwrap();
    let rows = data_rows(&s);
    assert_eq!(rows[0][0], "0");
    let f0: f64 = rows[0][1].parse().unwrap();
    assert!((f0 - norm).abs() < 1e-8 * norm);
    // decaying tail
    let tail: Vec<f64> = rows[rows.len() - 200..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0]));

    let o = run(&["wavefunction", "--m", "1", "--a", "1", "--l", "1"]);
    assert_eq!(data_rows(&stdout(&o))[0][1], "0");
    let o = run(&["wavefunction", "--m", "1", "--a", "-1"]);
    assert!(stdout(&o).contains("# nodes=1\n"));
    assert_eq!(run(&["wavefunction", "--m", "1", "--a", "1", "--root-index", "3"]).status.code(), Some(2));
    assert_eq!(run(&["wavefunction", "--m", "1", "--a", "1", "--grid-n", "100"]).status.code(), Some(2));
}
