use std::process::{Command, Output};

fn eisgor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eisgor")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn companion_and_structure_at_37_32() {
    let out = eisgor(&["companion", "--p", "37", "--k", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["c_m_prime"], 1);
    assert_eq!(v["k_prime"], 6);
    assert!(v["plan_m"]["bound"].as_u64().unwrap() > 0);

    let out = eisgor(&["structure", "--p", "37", "--k", "32", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("37,32,2,1,1,true,true,1"));
}

#[test]
fn regular_index_is_trivial() {
    let out = eisgor(&["structure", "--p", "37", "--k", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim_m_local"], 1);
    assert_eq!(v["verdict"], "regular");
}

#[test]
fn injected_fault_exits_one() {
    let out = eisgor(&["structure", "--p", "37", "--k", "32", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("assertion failed"));
}

#[test]
fn scope_and_usage_errors_exit_two() {
    assert_eq!(eisgor(&["companion", "--p", "7", "--k", "8"]).status.code(), Some(2));
    assert_eq!(eisgor(&["hecke", "--p", "9", "--k", "12"]).status.code(), Some(2));
    assert_eq!(eisgor(&["scan", "100..5"]).status.code(), Some(2));
    assert_eq!(eisgor(&["basis", "--p", "5"]).status.code(), Some(2));
}

#[test]
fn scan_writes_file_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let run = |out: &std::path::Path, shards: &str| {
        eisgor(&[
            "scan",
            "5..300",
            "--shards",
            shards,
            "--checkpoint",
            ck.to_str().unwrap(),
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap(),
        ])
    };
    assert_eq!(run(&out_a, "4").status.code(), Some(0));
    assert_eq!(run(&out_b, "1").status.code(), Some(0));
    let a = std::fs::read_to_string(&out_a).unwrap();
    assert_eq!(a, std::fs::read_to_string(&out_b).unwrap());
    assert!(a.contains("37,32,,"));
    assert!(a.contains("157,62;110,,"));
}

#[test]
fn basis_precision_is_floored() {
    let v = json(&eisgor(&["basis", "--p", "11", "--k", "24", "--prec", "1"]));
    assert_eq!(v["precision"], 3);
    assert_eq!(v["dim"], 3);
}

#[test]
fn specialize_reports_match() {
    let out = eisgor(&["specialize", "--p", "7", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["constant_status"], "matched");
    assert_eq!(v["digits_compared"], 3);
}

#[test]
fn selftest_passes() {
    let out = eisgor(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
