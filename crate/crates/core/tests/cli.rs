use std::fs;
use std::path::Path;
use std::process::Command;

fn trustsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trustsim"))
}

fn short_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("short.conf");
    fs::write(&p, "rounds = 40\ncounts.fire = 20\ncounts.ca = 20\ncounts.adaptable = 20\n").unwrap();
    p
}

#[test]
fn smoke_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustsim()
        .args(["run", "--experiment", "1", "--runs", "2", "--seed", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for kind in ["records.csv", "series.csv", "chart.svg", "summary.txt"] {
        let p = dir.path().join(format!("experiment-1-{kind}"));
        assert!(p.metadata().unwrap().len() > 0, "{kind} missing");
    }
    let records = fs::read_to_string(dir.path().join("experiment-1-records.csv")).unwrap();
    assert!(records.starts_with("experiment,run,round,consumer,group,interaction_index,model_used,served,ug\n"));
    let series = fs::read_to_string(dir.path().join("experiment-1-series.csv")).unwrap();
    assert!(series.starts_with("experiment,group,interaction_index,mean_ug,n\n"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FIRE vs CA"));
}

#[test]
fn unknown_experiment_fails() {
    let out = trustsim().args(["run", "--experiment", "99"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1..=18"));
}

#[test]
fn bad_flag_prints_usage() {
    let out = trustsim().args(["run", "--bogus"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage"));
}

#[test]
fn list_and_dump() {
    let out = trustsim().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 19);

    let out = trustsim().args(["config", "dump", "--experiment", "18"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for (n, start, end) in [(1, 1, 200), (2, 201, 250), (3, 251, 300), (4, 301, 350), (5, 351, 400), (6, 401, 450), (7, 451, 500)] {
        assert!(text.contains(&format!("phase.{n}.start = {start}\nphase.{n}.end = {end}\n")), "phase {n}");
    }
    assert!(text.contains("phase.1.p_ppc = 0.02\nphase.1.p_cpc = 0.05\n"));
}

#[test]
fn bad_config_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.conf");
    fs::write(&p, "no_such_key = 1\n").unwrap();
    let out = trustsim().args(["run", "--experiment", "1", "--config"]).arg(&p).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}

#[test]
fn artifacts_are_byte_identical_across_reruns_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let conf = short_config(dir.path());
    let mut outputs = Vec::new();
    for (name, parallel) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let out_dir = dir.path().join(name);
        let out = trustsim()
            .args(["run", "--experiment", "12", "--runs", "3", "--seed", "42", "--parallel", parallel, "--config"])
            .arg(&conf)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        let files: Vec<Vec<u8>> = ["records.csv", "series.csv", "chart.svg", "summary.txt"]
            .iter()
            .map(|k| fs::read(out_dir.join(format!("experiment-12-{k}"))).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}
