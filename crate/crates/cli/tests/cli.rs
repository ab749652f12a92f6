use std::process::{Command, Output};

fn ehcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehcap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn aloha_sweep_has_header_and_rows() {
    let out = ehcap(&["aloha", "--points", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# ehcap "));
    for key in ["# lambda=0.1", "# p=0.5", "# B=inf", "# seed=42", "# lambda_max=", "# rate=", "# optimum="] {
        assert!(text.contains(key), "missing {key}");
    }
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "q,r,f,lambda_a,p_suc,capacity");
    assert_eq!(data.len(), 12);
}

#[test]
fn single_q_gives_one_row() {
    let out = ehcap(&["aloha", "--q", "0.2"]);
    let text = stdout(&out);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data[1].starts_with("0.2,"));
}

#[test]
fn csma_default_densities() {
    let out = ehcap(&["csma"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "lambda,branch,p_b,r,p_fail,p_out,fkg_bound,capacity");
    assert_eq!(data.len(), 5);
    assert!(data[1].starts_with("0.01,HighEnergy,"));
    assert!(data[4].starts_with("0.1,EnergyLimited,0.72920"));
}

#[test]
fn game_grid_size() {
    let out = ehcap(&["game", "--lambda", "0.01,0.1", "--p", "0.3,0.5,1", "--B", "5"]);
    assert!(out.status.success());
    let rows = stdout(&out).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 6);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        vec!["csma", "--lambda", ""],
        vec!["aloha", "--alpha", "2"],
        vec!["aloha", "--p", "1.5"],
        vec!["csma", "--B", "3"],
        vec!["aloha", "--B", "0"],
        vec!["verify", "--criterion", "nope"],
        vec!["frobnicate"],
    ] {
        let out = ehcap(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn simulation_is_reproducible() {
    let args = ["simulate", "csma", "--seed", "42", "--trials", "2000"];
    let a = ehcap(&args);
    let b = ehcap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = ehcap(&["simulate", "csma", "--seed", "43", "--trials", "2000"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = ehcap(&["verify", "--criterion", "queue-oracle,3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("PASS 01 queue-oracle"));
    assert!(text.contains("PASS 03 access-monotone"));
    assert!(text.trim_end().ends_with("# summary passed=2 failed=0"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# test\nlambda = 0.05\np = 0.3\n").unwrap();
    let out = ehcap(&["aloha", "--q", "1", "--config", path.to_str().unwrap(), "--p", "0.4"]);
    let text = stdout(&out);
    assert!(text.contains("# lambda=0.05"));
    assert!(text.contains("# p=0.4"));
}
