use std::path::Path;
use std::process::{Command, Output};

fn rclb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rclb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_matches_golden_file() {
    let o = rclb(&["table1"]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/table1.txt")).unwrap();
    assert_eq!(stdout(&o), golden);
    // rows as printed in the paper's notation
    assert!(golden.contains("| (111) | (1 1 1^2 1^2) | (1^2 1^2 1^2 1^2 1^2 1^2)"));
    assert!(golden.contains("| (111) | (2 1^2 1^2) | (2^2 2^2 2^2)"));
    assert!(golden.contains("| (1^3) | (1^3 1^3) | (1^3 1^3 1^3 1^3)"));
}

#[test]
fn klein_twist_has_no_second_cohomology() {
    let o = rclb(&["cohom", "--group", "C3", "--module", "klein-twist", "--degree", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("dim H = 0"));
}

#[test]
fn a4_count_over_conductor_seven() {
    let o = rclb(&["a4-count", "--conductor", "7", "--limit", "10000"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("total 21"));
}

#[test]
fn class_group_output() {
    let o = rclb(&["class-group", "--disc", "-23"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("Cl(-23) = C3\nh = 3\nrk2 = 0\n"));
    assert!(s.contains("(1,1,6) (2,-1,3) (2,1,3)"));
    assert_eq!(rclb(&["class-group", "--disc", "-12"]).status.code(), Some(1));
}

#[test]
fn quad_enum_rows() {
    let o = rclb(&["quad-enum", "--limit", "12"]);
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().collect();
    assert_eq!(rows[0], "d,disc,C,omega,rk2,h,group");
    assert_eq!(rows.len(), 14);
    assert!(rows.contains(&"-6,-24,6,2,1,2,C2"));
    assert!(rows.contains(&"5,5,5,1,,,"));
}

#[test]
fn exit_codes() {
    assert_eq!(rclb(&["bound-check", "--limit", "20000"]).status.code(), Some(0));
    assert_eq!(rclb(&["cohom", "--group", "C3", "--module", "nope", "--degree", "1"]).status.code(), Some(1));
    assert_eq!(rclb(&["a4-count", "--conductor", "7", "--limit", "10000000000000"]).status.code(), Some(2));
    assert_eq!(rclb(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(rclb(&["count-family", "--limit", "100000"]).status.code(), Some(1));
}

#[test]
fn reports_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"family": "quadratic", "limit": 1000000, "base_conductor": null, "gamma_max": 4,
            "modulus": 4, "omega_condition": null, "grid_decades": 3}"#,
    )
    .unwrap();
    let mut outs = Vec::new();
    for w in ["1", "4", "8"] {
        let out = dir.path().join(format!("w{w}"));
        let o = rclb(&[
            "--workers", w, "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "count-family",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(out);
    }
    for name in ["estimates.csv", "fit.csv", "verdict.txt"] {
        let a = std::fs::read(outs[0].join(name)).unwrap();
        for o in &outs[1..] {
            assert_eq!(a, std::fs::read(o.join(name)).unwrap(), "{name}");
        }
    }
    let est = std::fs::read_to_string(outs[0].join("estimates.csv")).unwrap();
    assert_eq!(est.lines().count(), 14);
    let fit = rclb(&["fit", "--input", outs[0].join("estimates.csv").to_str().unwrap(), "--alpha", "1"]);
    assert!(fit.status.success());
    assert!(stdout(&fit).lines().nth(1).unwrap().starts_with("alpha=1;b=free;c=0,"));
}
