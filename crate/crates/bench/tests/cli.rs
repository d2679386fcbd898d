use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pso-bench"))
}

#[test]
fn csv_to_stdout() {
    let out = bench()
        .args(["--engine", "serial", "--engine", "queue-lock", "--particles", "64", "--iters", "5"])
        .args(["--repeat", "3", "--seed", "1", "--seed", "2", "--threads", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let records = pso_bench::record::read_records(stdout.as_bytes()).unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0].trace_checksum, records[2].trace_checksum);
}

#[test]
fn markdown_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = bench()
        .args(["--particles", "64", "--particles", "128", "--dims", "3", "--iters", "4", "--repeat", "3"])
        .args(["--fitness", "sphere", "--group-size", "32", "--markdown", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for engine in ["reduction", "unrolled", "queue", "queue-lock"] {
        assert!(stdout.contains(&format!("### {engine}, 3D")), "{stdout}");
    }
    assert!(stdout.contains("| 128 | 4 |"), "{stdout}");
    let records = pso_bench::record::read_records_from_path(&path).unwrap();
    assert_eq!(records.len(), 10);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["--fitness", "ackley"][..],
        &["--engine", "gpu"],
        &["--sweep", "3d"],
        &["--sweep", "1d", "--particles", "5"],
    ] {
        let out = bench().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_fails() {
    let out = bench()
        .args(["--engine", "serial", "--particles", "8", "--iters", "1", "--repeat", "1"])
        .args(["--out", "/nonexistent/dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn invalid_parameters_fail() {
    let out = bench().args(["--particles", "0", "--engine", "serial"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
