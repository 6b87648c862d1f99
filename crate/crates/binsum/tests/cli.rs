use std::process::{Command, Output};

fn binsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binsum"))
        .args(args)
        .env_remove("BINSUM_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn eval_examples() {
    let out = binsum(&["eval", "--r", "1", "--n", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "17/4, nonintegral, denominator primes: [2^2]");
    assert_eq!(stdout(&binsum(&["eval", "--r", "5", "--n", "0"])).trim(), "0, integral");
    let co = stdout(&binsum(&["eval", "--r", "2", "--n", "1", "--cofactor"]));
    assert!(co.lines().nth(1).unwrap().ends_with("= 5/3"), "{co}");
    let json: serde_json::Value =
        serde_json::from_slice(&binsum(&["eval", "--r", "1", "--n", "3", "--format", "json"]).stdout).unwrap();
    assert_eq!(json["value"], "17/4");
    assert_eq!(json["integral"], false);
}

#[test]
fn witness_examples() {
    let out = stdout(&binsum(&["witness", "--r", "17", "--start", "60462"]));
    assert!(out.contains("rule COND2P") && out.contains("members 60464 and 60472"), "{out}");
    let out = stdout(&binsum(&["witness", "--r", "11", "--n", "2"]));
    assert!(out.contains("start 3") && out.contains("x = 13"), "{out}");
    let out = binsum(&["witness", "--r", "3", "--n", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("exact evaluation"));
    assert_eq!(code(&binsum(&["witness", "--r", "3", "--n", "0"])), 1);
}

#[test]
fn verify_listing_and_exit_codes() {
    let out = binsum(&["verify", "--r", "11", "--range", "half"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("VERIFIED"));
    assert!(text.contains("starts: 2, 114, 115, 116, 200, 468, 510\n"), "{text}");
    let csv = stdout(&binsum(&["verify", "--r", "11", "--range", "full", "--format", "csv"]));
    assert!(csv.lines().nth(1).unwrap().starts_with("11,2310,full,14,14,VERIFIED,"), "{csv}");

    assert_eq!(code(&binsum(&["verify", "--r", "23"])), 1);
    assert_eq!(code(&binsum(&["verify", "--r", "5..2"])), 1);
    assert_eq!(code(&binsum(&["verify", "--no-such-flag"])), 1);
    assert_eq!(code(&binsum(&["verify", "--r", "11", "--range", "most"])), 1);
    assert_eq!(code(&binsum(&["frobnicate"])), 1);
}

#[test]
fn translates_below_four_leave_classes_open() {
    // with one translate only the pair rules remain, and none applies below r = 5
    let out = binsum(&["verify", "--r", "3", "--translates", "1", "--format", "json"]);
    assert_eq!(code(&out), 2);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json[0]["status"], "INCONCLUSIVE");
    assert_eq!(json[0]["uncertified"], serde_json::json!(["2"]));
    let out = stdout(&binsum(&["verify", "--r", "11", "--translates", "1"]));
    assert!(out.contains("VERIFIED") && out.contains("[COND2 14]"), "{out}");
}

#[test]
fn repro_table() {
    let out = binsum(&["verify", "--r", "11..13", "--repro"]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("r = 11: half-period failures 7, expected 7: match"), "{err}");
    assert!(err.contains("r = 13: half-period failures 76, expected 76: match"), "{err}");
}

#[test]
fn json_identical_across_worker_counts() {
    let args = ["verify", "--r", "12..17", "--format", "json"];
    let one = binsum(&[&["--workers", "1"], &args[..]].concat());
    let four = binsum(&[&["--workers", "4"], &args[..]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_binsum"))
        .args(args)
        .env("BINSUM_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&one), 0);
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, env.stdout);
    assert_eq!(code(&binsum(&["--workers", "0", "verify", "--r", "3"])), 1);
}

#[test]
fn report_and_certificate_files_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let summary = dir.path().join("summary.csv");
    let out = binsum(&[
        "verify",
        "--r",
        "13",
        "--format",
        "json",
        "--output",
        report.to_str().unwrap(),
        "--csv",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(&summary).unwrap().starts_with("r,m_r,range,cond1_failures,certified,status,seconds\n13,30030,"));
    let checked = binsum(&["check", report.to_str().unwrap()]);
    assert_eq!(code(&checked), 0);
    assert!(stdout(&checked).contains("152 certificates, 0 failed"));

    let cert = dir.path().join("cert.json");
    let out = binsum(&["witness", "--r", "17", "--start", "60462", "--format", "json", "--output", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&binsum(&["check", cert.to_str().unwrap()])), 0);

    // a witness that is not in its window fails the re-check
    let text = std::fs::read_to_string(&cert).unwrap().replace("\"60472\"", "\"60473\"");
    std::fs::write(&cert, text).unwrap();
    assert_ne!(code(&binsum(&["check", cert.to_str().unwrap()])), 0);

    std::fs::write(&cert, "{\"r\": 17}").unwrap();
    assert_eq!(code(&binsum(&["check", cert.to_str().unwrap()])), 1);
    assert_eq!(code(&binsum(&["check", dir.path().join("missing.json").to_str().unwrap()])), 1);
}

#[test]
fn density_tables() {
    let out = stdout(&binsum(&["density", "--rmax", "5", "--alpha", "2"]));
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3].split(',').nth(4), Some("1/15"));
    let out = stdout(&binsum(&["density", "--rmax", "2"]));
    assert_eq!(out.lines().nth(1).unwrap().split(',').nth(4), Some("0"));

    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("curve.dat");
    let out = stdout(&binsum(&["density", "--rmax", "13", "--alpha", "3", "--plot-data", plot.to_str().unwrap()]));
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")), "{out}");
    assert_eq!(std::fs::read_to_string(&plot).unwrap().lines().count(), 13);
    assert_eq!(code(&binsum(&["density", "--rmax", "20"])), 1);
}

#[test]
fn gaps_histogram() {
    let out = stdout(&binsum(&["gaps", "--r", "5"]));
    assert!(out.starts_with("q = 30  phi = 8  max gap = 6"), "{out}");
    assert!(out.ends_with("gap,count\n2,3\n4,3\n6,2\n"), "{out}");
}
