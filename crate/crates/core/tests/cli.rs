use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_porous-channel"))
        .args(args)
        .env("SOLVER_THREADS", "2")
        .output()
        .unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--a",
        "0.8",
        "--R",
        "100",
        "--branch",
        "II",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("turning points y1 = -0.745"), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("y,f,fp,fpp,fppp\n"));
    assert!(dir.path().join("profile.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&d1, &d2] {
        let o = run(&[
            "solve",
            "--a",
            "0.7",
            "--R",
            "60",
            "--branch",
            "III",
            "--out",
            &out_arg(d.path()),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let o = run(&[
            "field",
            "--a",
            "0.7",
            "--R",
            "60",
            "--branch",
            "III",
            "--nx",
            "9",
            "--ny",
            "17",
            "--out",
            &out_arg(d.path()),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    for f in [
        "profile.csv",
        "profile.json",
        "field.csv",
        "streamlines.json",
    ] {
        let a = fs::read(d1.path().join(f)).unwrap();
        let b = fs::read(d2.path().join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# test\na = 0.5\nR = 20\nbranch = I\nformat = json\nout = {}\n",
            out_arg(dir.path())
        ),
    )
    .unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--a", "0.9"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("profile.json")).unwrap())
            .unwrap();
    assert_eq!(v["a"], 0.9);
    assert_eq!(v["R"], 20.0);
    assert!(v["nodes"].is_array());
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    for args in [
        vec!["solve", "--a", "1.5", "--R", "10", "--out", &out],
        vec!["solve", "--a", "0.8", "--R", "-1", "--out", &out],
        vec![
            "solve", "--a", "0.8", "--R", "10", "--branch", "IV", "--out", &out,
        ],
        vec![
            "solve", "--a", "0.8", "--R", "10", "--tol", "0", "--out", &out,
        ],
        vec!["solve", "--R", "10", "--out", &out],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "speed = 3\n").unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_branch_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--a",
        "0.8",
        "--R",
        "5",
        "--branch",
        "II",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!o.stderr.is_empty());
}

#[test]
fn branches_reports_the_fold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "branches",
        "--a",
        "0.8",
        "--Rmin",
        "0",
        "--Rmax",
        "40",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("fold"), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("branches.csv")).unwrap();
    assert!(csv.starts_with("R,skin_friction,K,label,fold_flag\n"));
    assert_eq!(csv.lines().skip(1).filter(|l| l.ends_with(",1")).count(), 1);
}

#[test]
fn scan_finds_only_type_one_on_the_default_window() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scan", "--n", "9", "--out", &out_arg(dir.path())]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(
        stdout.contains("admissible roots in the A*B > 0 quadrants: 0"),
        "{stdout}"
    );
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    // the A = 0 and B = 0 lines are left out of the grid
    assert_eq!(csv.lines().count(), 1 + 8 * 8);
}
