use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spatial_ak_cli::presets::Preset;
use spatial_ak_cli::scenario_file::load;

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spatial-ak"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_table(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

const SMALL: &str = r#"
[technology]
kind = "constant"
rate = 0.1

[consumption]
kind = "separable"
spatial = { kind = "fourier", mean = 0.2, cos = [0.05] }
temporal = { kind = "constant", value = 1.0 }

[initial_capital]
kind = "fourier"
mean = 2.0
cos = [0.3]
sin = [0.0, 0.2]

[grid]
points = 32
horizon = 1.0
steps = 10

[tolerances]
fd_dt = 0.005
fd_dx = 0.09817477042468103
"#;

#[test]
fn benchmark_cross_check_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["gen", "ak-benchmark", "--out", "ak.toml"]);
    assert!(o.status.success());
    let o = bin(dir.path(), &["run", "ak.toml", "--solver", "both", "--out", "res"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let res = dir.path().join("res");
    for f in ["field.csv", "field_fd.csv", "detrended.csv", "detrended_fd.csv", "feasibility.csv"] {
        assert!(res.join(f).exists(), "{f}");
    }
    let diag = read_table(&res.join("diagnostics.csv"));
    let last = diag.last().unwrap();
    assert_eq!(last[0], "cross_check");
    assert!(last[1].parse::<f64>().unwrap() <= 1e-6);
    let field = read_table(&res.join("field.csv"));
    assert_eq!(field.len(), 101 * 256);
    assert!(field.iter().all(|r| (r[2].parse::<f64>().unwrap() - 2.0).abs() < 1e-10));
}

#[test]
fn negative_initial_capital_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("mean = 2.0\ncos = [0.3]", "mean = 0.1\ncos = [0.3]");
    fs::write(dir.path().join("neg.toml"), text).unwrap();
    let o = bin(dir.path(), &["run", "neg.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("initial capital negative at index"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn parse_errors_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), SMALL.replace("points = 32", "points = \"many\"")).unwrap();
    let o = bin(dir.path(), &["run", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("bad.toml") && err.contains("line"), "{err}");

    let o = bin(dir.path(), &["run", "bad.toml", "--solver", "magic"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(dir.path(), &["run", "missing.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trade_balance_has_zero_mean_without_consumption() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("mean = 0.2, cos = [0.05]", "mean = 0.0");
    fs::write(dir.path().join("s.toml"), text).unwrap();
    let o = bin(dir.path(), &["run", "s.toml", "--outputs", "trade_balance", "--out", "tb"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!dir.path().join("tb/field.csv").exists());
    let rows = read_table(&dir.path().join("tb/trade_balance.csv"));
    assert_eq!(rows.len(), 11 * 32);
    for chunk in rows.chunks(32) {
        let mean: f64 = chunk.iter().map(|r| r[2].parse::<f64>().unwrap()).sum::<f64>() / 32.0;
        assert!(mean.abs() < 1e-14);
        assert!(chunk.iter().any(|r| r[2].parse::<f64>().unwrap().abs() > 1e-3));
    }
}

#[test]
fn identical_inputs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.toml"), SMALL).unwrap();
    for out in ["a", "b"] {
        let o = bin(dir.path(), &["run", "s.toml", "--solver", "both", "--derived", "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["field.csv", "field_fd.csv", "detrended.csv", "diagnostics.csv", "feasibility.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn derived_columns_satisfy_the_dynamics() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.toml"), SMALL.replace("steps = 10", "steps = 1000")).unwrap();
    let o = bin(dir.path(), &["run", "s.toml", "--derived", "--outputs", "field", "--out", "d"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_table(&dir.path().join("d/field.csv"));
    let n = 32;
    let val = |j: usize, i: usize, c: usize| rows[j * n + i][c].parse::<f64>().unwrap();
    // s = k_t against a centred difference in time
    let dt = 1e-3;
    for j in [100, 500, 900] {
        for i in 0..n {
            let fd = (val(j + 1, i, 2) - val(j - 1, i, 2)) / (2.0 * dt);
            assert!((val(j, i, 5) - fd).abs() < 1e-5);
            assert!((val(j, i, 3) - 0.1 * val(j, i, 2)).abs() < 1e-15);
        }
    }
}

#[test]
fn infeasible_scenarios_still_solve() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(dir.path(), &["gen", "violating", "--out", "v.toml"]).status.success());
    let o = bin(dir.path(), &["run", "v.toml", "--out", "v"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    let feas = read_table(&dir.path().join("v/feasibility.csv"));
    let row = feas.iter().find(|r| r[0] == "max_consumption_bound").unwrap();
    assert_eq!(row[1], "inconclusive");
    assert!((row[2].parse::<f64>().unwrap() + 0.5).abs() < 1e-8);
    let field = read_table(&dir.path().join("v/field.csv"));
    assert!(field.iter().any(|r| r[2].parse::<f64>().unwrap() < 0.0));

    let o = bin(dir.path(), &["check", "v.toml", "--out", "c"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("inconclusive"));
    assert!(dir.path().join("c/feasibility.csv").exists());
}

#[test]
fn fd_only_run_uses_plain_names() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.toml"), SMALL).unwrap();
    let o = bin(dir.path(), &["run", "s.toml", "--solver", "fd", "--fd-dt", "0.01", "--out", "f"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("f/field.csv").exists());
    assert!(!dir.path().join("f/field_fd.csv").exists());

    // 50 points does not refine the 32-point grid
    let o = bin(dir.path(), &["run", "s.toml", "--solver", "fd", "--fd-dx", "0.12566370614359174"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn overrides_reach_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.toml"), SMALL).unwrap();
    let o = bin(dir.path(), &["run", "s.toml", "--horizon", "2", "--modes", "4", "--out", "h"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let diag = read_table(&dir.path().join("h/diagnostics.csv"));
    assert_eq!(diag.last().unwrap()[0], "2");
    let o = bin(dir.path(), &["run", "s.toml", "--modes", "40"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_writes_isolated_runs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.toml"), SMALL).unwrap();
    let o = bin(
        dir.path(),
        &[
            "sweep",
            "s.toml",
            "--param",
            "technology.rate=0.1,0.2",
            "--param",
            "initial_capital.mean=2.0,0.1",
            "--out",
            "sw",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = read_table(&dir.path().join("sw/summary.csv"));
    assert_eq!(summary.len(), 4);
    let codes: Vec<&str> = summary.iter().map(|r| r[3].as_str()).collect();
    // mean 0.1 with a 0.3 cosine is negative somewhere
    assert_eq!(codes, ["0", "2", "0", "2"]);
    for i in [0, 2] {
        let run = dir.path().join(format!("sw/run-{i:03}"));
        assert!(run.join("field.csv").exists() && run.join("scenario.toml").exists());
    }
    let (_, s) = load(&dir.path().join("sw/run-002/scenario.toml")).unwrap();
    assert_eq!(s.technology.as_constant(), Some(0.2));
}

#[test]
fn generated_presets_reparse_identically() {
    let dir = tempfile::tempdir().unwrap();
    for (name, preset) in [
        ("ak-benchmark", Preset::AkBenchmark),
        ("single-mode", Preset::SingleMode),
        ("convergence", Preset::Convergence),
        ("time-varying", Preset::TimeVarying),
        ("violating", Preset::Violating),
    ] {
        let file = format!("{name}.toml");
        assert!(bin(dir.path(), &["gen", name, "--out", &file]).status.success());
        let (parsed, scenario) = load(&dir.path().join(&file)).unwrap();
        assert_eq!(parsed, preset.file());
        assert_eq!(scenario, preset.file().build(dir.path()).unwrap());

        let stdout = bin(dir.path(), &["gen", name]).stdout;
        assert_eq!(stdout, fs::read(dir.path().join(&file)).unwrap());
    }
}
