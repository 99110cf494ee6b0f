use std::path::Path;
use std::process::{Command, Output};

fn zagier(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zagier"))
        .args(args)
        .arg("--quiet")
        .env("ZAGIER_DATA", data)
        .output()
        .expect("run zagier")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV body (header plus rows) without `#` metadata lines.
fn body(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

fn column(o: &Output, name: &str) -> Vec<f64> {
    let lines = body(o);
    let idx = lines[0].split(',').position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    lines[1..].iter().map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn write_table(dir: &Path, values: &[f64]) {
    let mut text = String::from("# source: synthetic test table\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::create_dir_all(dir.join("eigenvalues")).unwrap();
    std::fs::write(dir.join("eigenvalues/psl2z.txt"), text).unwrap();
}

#[test]
fn psi_both_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let o = zagier(dir.path(), &["psi", "--X", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let direct = column(&o, "direct")[0];
    let via = column(&o, "via_zagier")[0];
    assert!((direct - 1.9248).abs() < 1e-4);
    assert!((direct - via).abs() / direct <= 1e-9);
    assert!(column(&o, "gap")[0] <= 1e-9);
    let meta = stdout(&o);
    assert!(meta.starts_with("# command: psi"));
    assert!(meta.contains("# wall_time_s:"));
}

#[test]
fn verify_identity_reports_every_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = zagier(dir.path(), &["verify-identity", "--n-max", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let gaps = column(&o, "gap");
    assert_eq!(gaps.len(), 98);
    assert!(gaps.iter().all(|g| *g <= 1e-8));
}

#[test]
fn average_below_first_trace_is_minus_main_term() {
    let dir = tempfile::tempdir().unwrap();
    let o = zagier(dir.path(), &["average", "--X", "2.5", "--t", "0"]);
    assert!(o.status.success());
    assert_eq!(column(&o, "sum_re")[0], 0.0);
    assert_eq!(column(&o, "err_re")[0], -column(&o, "main_re")[0]);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["psi", "--X", "0"],
        vec!["verify-identity", "--n-min", "2", "--n-max", "10"],
        vec!["error-scan", "--X-min", "100", "--X-max", "50"],
        vec!["average", "--X", "100", "--t", "500"],
        vec!["kloosterman", "--c-max", "0"],
        vec!["zagier", "--n", "2"],
        vec!["no-such-command"],
    ] {
        let o = zagier(dir.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?} wrote data before validating");
    }
}

#[test]
fn corrupt_cache_is_a_computation_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("cache")).unwrap();
    let name = format!("lvalues_t{:016x}.bin", 0f64.to_bits());
    std::fs::write(dir.path().join("cache").join(name), b"not a store").unwrap();
    let o = zagier(dir.path(), &["average", "--X", "50"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_rows_mirror_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["kloosterman", "--m", "3", "--n", "7", "--c-max", "40"];
    let csv = zagier(dir.path(), &args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json = zagier(dir.path(), &json_args);
    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let lines = body(&csv);
    let header: Vec<&str> = lines[0].split(',').collect();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), lines.len() - 1);
    for (row, line) in rows.iter().zip(&lines[1..]) {
        let obj = row.as_object().unwrap();
        assert_eq!(obj.keys().map(String::as_str).collect::<Vec<_>>(), header);
        for (key, cell) in header.iter().zip(line.split(',')) {
            assert_eq!(obj[*key].as_f64().unwrap(), cell.parse::<f64>().unwrap());
        }
    }
    assert_eq!(doc["truncated"], false);
}

#[test]
fn output_is_deterministic_and_cache_independent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["error-scan", "--X-min", "10", "--X-max", "3000", "--points", "25"];
    let first = zagier(dir.path(), &args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    // The first run filled the store; the second reads it back.
    let cached = zagier(dir.path(), &args);
    let mut fresh_args = args.to_vec();
    fresh_args.push("--no-cache");
    let fresh = zagier(dir.path(), &fresh_args);
    let mut threaded_args = args.to_vec();
    threaded_args.extend(["--threads", "3"]);
    let threaded = zagier(dir.path(), &threaded_args);
    assert_eq!(body(&first), body(&cached));
    assert_eq!(body(&first), body(&fresh));
    assert_eq!(body(&first), body(&threaded));
    assert!(stdout(&first).contains("# fit_slope:"));
}

#[test]
fn data_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    write_table(env_dir.path(), &[9.5, 12.0, 13.5]);
    write_table(flag_dir.path(), &[9.5, 20.0]);
    let from_env = zagier(env_dir.path(), &["spectral-sum", "--X", "100", "--T", "13"]);
    assert!(from_env.status.success(), "{}", String::from_utf8_lossy(&from_env.stderr));
    assert_eq!(column(&from_env, "terms")[0], 2.0);
    let flag = flag_dir.path().to_str().unwrap();
    let from_flag = zagier(env_dir.path(), &["spectral-sum", "--X", "100", "--T", "13", "--data-dir", flag]);
    assert!(from_flag.status.success());
    assert_eq!(column(&from_flag, "terms")[0], 1.0);
    let out_of_table = zagier(env_dir.path(), &["spectral-sum", "--X", "100", "--T", "25", "--data-dir", flag]);
    assert_eq!(out_of_table.status.code(), Some(1));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = zagier(dir.path(), &["linnik", "--n", "1", "--C", "50", "--D", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l == "C,D,n,re,im,abs"));
}

#[cfg(unix)]
#[test]
fn interrupt_flushes_a_truncated_trailer() {
    use std::io::Read;
    use std::process::Stdio;
    use std::time::Duration;

    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_zagier"))
        .args(["kloosterman", "--c-max", "2000000", "--quiet", "--threads", "1"])
        .env("ZAGIER_DATA", dir.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    std::thread::sleep(Duration::from_millis(1500));
    let status = Command::new("kill").args(["-INT", &child.id().to_string()]).status().unwrap();
    assert!(status.success());
    let mut out = String::new();
    child.stdout.take().unwrap().read_to_string(&mut out).unwrap();
    let code = child.wait().unwrap().code();
    assert_eq!(code, Some(2));
    assert_eq!(out.lines().last(), Some("#truncated"));
    let rows = out.lines().filter(|l| !l.starts_with('#')).count();
    assert!(rows > 1, "expected some rows before the interrupt");
}
