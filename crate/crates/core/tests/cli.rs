use std::path::Path;
use std::process::Command;

use pipeflow::cli_dispatch;
use pipeflow::config::parse_config;

const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["pipeflow"];
    argv.extend_from_slice(args);
    cli_dispatch(argv)
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn shipped_configs_parse() {
    for name in ["default.cfg", "reflective.cfg"] {
        let text = std::fs::read_to_string(Path::new(CONFIGS).join(name)).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let text = std::fs::read_to_string(Path::new(CONFIGS).join("default.cfg")).unwrap();
    assert_eq!(parse_config(&text).unwrap(), parse_config("").unwrap());
}

#[test]
fn periodic_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(run(&["periodic", "--grid", "32x32", "--quiet", "--out", &out_arg(d.path())]), 0);
    }
    for name in ["periodic_field.csv", "solver_sweeps.csv", "solver_report.txt"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    let field = pipeflow::csv_io::read_field_csv(&a.path().join("periodic_field.csv")).unwrap();
    assert_eq!(field.len(), 32 * 32);
    assert!(field.iter().all(|r| r.lambda1 < 0.0 && r.lambda2 > 0.0));
}

#[test]
fn reflective_config_runs_from_rest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{CONFIGS}/reflective.cfg");
    let out = out_arg(dir.path());
    assert_eq!(run(&["validate", "--config", &cfg, "--quiet"]), 0);
    assert_eq!(run(&["ibvp", "--config", &cfg, "--quiet", "--out", &out]), 0);
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(text.starts_with("t,x,phi1,phi2,rho,u,lambda1,lambda2\n"));
    // 13 snapshots of 65 nodes plus the header
    assert_eq!(text.lines().count(), 13 * 65 + 1);
}

#[test]
fn exit_codes_separate_user_errors_from_regime_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "gas.gamma = 1.0\nstability.mode = reflective\nstability.K1 = 1.5\n").unwrap();
    assert_eq!(run(&["periodic", "--config", bad.to_str().unwrap(), "--out", &out]), 1);

    let missing = dir.path().join("missing.cfg");
    assert_eq!(run(&["periodic", "--config", missing.to_str().unwrap()]), 1);
    assert_eq!(run(&["transmogrify"]), 1);
    assert_eq!(run(&["periodic", "--grid", "4x4"]), 1);

    let strong = dir.path().join("strong.cfg");
    std::fs::write(&strong, "boundary.eps = 10\n").unwrap();
    assert_eq!(run(&["periodic", "--config", strong.to_str().unwrap(), "--grid", "32x32", "--out", &out]), 2);
}

#[test]
fn binary_reports_errors_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "gas.gamma = 1.0\nbogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pipeflow"))
        .args(["periodic", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let lines: Vec<&str> = stderr.lines().filter(|l| l.starts_with("ERROR config: ")).collect();
    assert_eq!(lines.len(), 2, "{stderr}");
    assert!(stderr.contains("gamma must exceed 1"));
    assert!(stderr.contains("unknown key `bogus`"));
}
