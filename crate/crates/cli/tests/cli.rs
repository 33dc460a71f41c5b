use std::process::{Command, Output};

fn frogcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frogcrit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn qc_plain() {
    let out = frogcrit(&["qc", "--d", "2", "--c", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    let qc: f64 = row[2].parse().unwrap();
    assert!((0.269594..=0.277206).contains(&qc));
}

#[test]
fn qc_csv_is_parse_stable() {
    let out = frogcrit(&["qc", "--d", "3", "--c", "0.5", "--format", "csv"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header.join(","),
        "frogcrit.qc.v1,d,c,q_c,residual,bracket_lo,bracket_hi,lower_c2,upper_c2,lower_c3,upper_c3"
    );
    assert_eq!(rows.len(), 1);
    let qc: f64 = rows[0][3].parse().unwrap();
    let residual: f64 = rows[0][4].parse().unwrap();
    assert!(qc > 0.2281 && qc < 0.2297 && residual < 1e-12);
}

#[test]
fn domain_errors_exit_2() {
    let out = frogcrit(&["qc", "--d", "2", "--c", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c <= 1"));
    assert!(out.stdout.is_empty());
    assert_eq!(
        frogcrit(&["table", "--model", "cone", "--d", ""])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        frogcrit(&["gamma", "--c", "1", "--q", "1.2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        frogcrit(&["qc", "--d", "1", "--c", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn bracket_failure_exits_3() {
    // a tolerance no double-precision root can meet
    let out = frogcrit(&["qc", "--d", "2", "--c", "1", "--tol", "1e-30"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_frogcrit"))
        .args(["gamma", "--c", "1", "--q", "0.2"])
        .env("FROGCRIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cone_table_matches_reference() {
    let out = frogcrit(&[
        "table",
        "--model",
        "cone",
        "--d",
        "2..10,15,20,30,50,100",
        "--format",
        "csv",
    ]);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header.join(","),
        "frogcrit.table_cone.v1,d,c2_lower,prop_lower,known_lower,c2_upper,prop_upper,known_upper"
    );
    assert_eq!(rows.len(), 14);
    let first: Vec<f64> = rows[0][2..].iter().map(|s| s.parse().unwrap()).collect();
    let want = [0.269594, 0.266667, 0.250000, 0.277206, 0.277206, 0.292893];
    for (got, want) in first.iter().zip(want) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    assert_eq!(rows[13][1], "100");
}

#[test]
fn frog_tables() {
    let out = frogcrit(&["table", "--model", "original", "--d", "2,3"]);
    let text = stdout(&out);
    assert!(
        text.contains("0.720836") && text.contains("0.645837"),
        "{text}"
    );
    let out = frogcrit(&[
        "table",
        "--model",
        "selfavoiding",
        "--d",
        "2",
        "--format",
        "jsonl",
    ]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(row["schema"], "frogcrit.table_selfavoiding.v1");
    assert!((row["c2_upper"].as_f64().unwrap() - 0.648045).abs() < 2e-6);
    assert!(frogcrit(&["table", "--model", "removal", "--d", "3..5"])
        .status
        .success());
}

#[test]
fn gamma_at_qc() {
    let out = frogcrit(&["qc", "--d", "2", "--c", "1", "--format", "jsonl"]);
    let row: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let qc = row["q_c"].as_f64().unwrap().to_string();
    let out = frogcrit(&["gamma", "--c", "1", "--q", &qc]);
    let text = stdout(&out);
    let gamma: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(gamma, 2.0);
}

#[test]
fn firework_is_byte_identical() {
    let args = [
        "simulate",
        "firework",
        "--c",
        "1",
        "--q",
        "0.25",
        "--n",
        "20",
        "--replicates",
        "100000",
        "--seed",
        "7",
    ];
    let a = frogcrit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, frogcrit(&args).stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_frogcrit"))
        .args(args)
        .env("FROGCRIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn frog_reports_histogram_and_growth() {
    let args = [
        "simulate",
        "frog",
        "--d",
        "2",
        "--c",
        "1",
        "--q",
        "0.35",
        "--max-depth",
        "12",
        "--replicates",
        "10000",
        "--seed",
        "7",
        "--format",
        "csv",
    ];
    let out = frogcrit(&args);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header.join(","),
        "frogcrit.simulate_frog.v1,depth,reached,hits,hit_fraction,std_error,mean_activations,renewal_growth"
    );
    assert_eq!(rows.len(), 13);
    let reached: u64 = rows.iter().map(|r| r[2].parse::<u64>().unwrap()).sum();
    assert_eq!(reached, 10_000);
    assert!(rows[12][3].parse::<u64>().unwrap() > 0);
    assert!(rows.iter().all(|r| r[7] == "supercritical"));
}

#[test]
fn activation_cap_exits_1() {
    let out = frogcrit(&[
        "simulate",
        "frog",
        "--d",
        "2",
        "--c",
        "1",
        "--q",
        "0.45",
        "--max-depth",
        "60",
        "--replicates",
        "10",
        "--activation-cap",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
