//! The `lmp` binary: scan outputs, exit codes and ingestion.

use std::path::PathBuf;
use std::process::Command;

fn lmp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lmp"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lmp-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn small_scan_rows() {
    let dir = scratch("small");
    let st = lmp().args(["scan", "--dmin=-50", "--dmax=-3", "--radius", "5", "--rho", "8", "--out"]).arg(&dir).status().unwrap();
    // the continuous-spectrum check fails for some small fields
    assert_eq!(st.code(), Some(1));
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("disc,group,check_label,computed,error,bound,ratio,pass"));
    let rows: Vec<&str> = lines.collect();
    // 16 fundamental discriminants in [−50, −3]
    let fields: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(fields.len(), 16);
    assert!(rows.len() >= 16 * 10);
    let failing: Vec<&&str> = rows.iter().filter(|r| r.ends_with(",false")).collect();
    assert!(failing.iter().all(|r| r.contains("spectral_remainder")), "{failing:?}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["summary"]["fields"], 16);
    assert_eq!(json["summary"]["d0"], 51);
}

#[test]
fn empty_range_is_header_only() {
    let out = lmp().args(["scan", "--dmin=-2", "--dmax=-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "disc,group,check_label,computed,error,bound,ratio,pass\n");
}

#[test]
fn config_errors_exit_two() {
    let st = lmp().args(["scan", "--rho", "0"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = lmp().args(["scan", "--dmin=-3", "--dmax=-50"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = lmp().args(["ingest", "/nonexistent/table.jsonl"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = lmp().args(["field", "6"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = lmp().args(["scan", "--group", "SO3"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn single_field_commands() {
    let out = lmp().args(["field", "-4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["invariants"]["h"], 1);
    assert_eq!(v["invariants"]["w"], 4);

    let out = lmp().args(["orbital", "3", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);

    let out = lmp().args(["lattice", "-4", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 8);

    let out = lmp().args(["sigma0", "1.2", "--group", "GL2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("# "));

    let out = lmp().args(["bounds", "-1003", "--radius", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for label in ["reg_split", "unip", "reg_ell", "spectral_remainder"] {
        assert!(text.contains(&format!(",{label},")), "{label}");
    }
}

#[test]
fn ingest_reports_rejections() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/quartic_fields.jsonl");
    let out = lmp().args(["ingest", fixture]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fields"].as_array().unwrap().len(), 3);

    let dir = scratch("ingest");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.jsonl");
    let good = std::fs::read_to_string(fixture).unwrap();
    let first = good.lines().next().unwrap();
    let bad = first.replace("\"degree\":4", "\"degree\":3").replace("4.0.144.1", "bad");
    std::fs::write(&path, format!("{first}\n{bad}\n{first}\n")).unwrap();
    let out = lmp().arg("ingest").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("rejected line 2"));
    assert!(err.contains("line 3: duplicate label 4.0.144.1"));

    std::fs::write(&path, format!("{first}\nnot json\n")).unwrap();
    let out = lmp().arg("ingest").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn scan_with_ingested_quartics() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/quartic_fields.jsonl");
    let out = lmp().args(["scan", "--dmin=-4", "--dmax=-4", "--quartics", fixture]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
