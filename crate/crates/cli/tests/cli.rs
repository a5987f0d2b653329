use std::path::Path;
use std::process::{Command, Output};

fn pwmlp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwmlp"))
        .args(args)
        .current_dir(cwd)
        .env("PWMLP_THREADS", "2")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "name = \"small\"\nlevels = [-2.0, 0.0, 2.0]\nn_samples = 256\nzero_dc = true\n\
[[harmonics]]\nk = 1\nre = 1.0\nim = -1.0\n[[harmonics]]\nk = 5\nre = 0.0\nim = 0.0\n";

#[test]
fn design_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let o = pwmlp(&["design", "--config", "small.toml", "--out", "res"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let res = dir.path().join("res");
    let wave = std::fs::read_to_string(res.join("waveform.csv")).unwrap();
    let mut lines = wave.lines();
    assert_eq!(lines.next(), Some("index,t_over_n,value"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 256);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        assert_eq!(r[1].parse::<f64>().unwrap(), i as f64 / 256.0);
        assert!(["-2", "0", "2"].contains(&r[2].as_str()), "{r:?}");
    }
    let spectrum = std::fs::read_to_string(res.join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("k,re,im,magnitude\n"));
    assert_eq!(spectrum.lines().count(), 129);

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(res.join("result.json")).unwrap()).unwrap();
    for key in ["thd", "lp_objective", "certificates", "solver"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let bound = json["certificates"]["residual_bound"].as_f64().unwrap();
    let fundamental = spectrum.lines().nth(1).unwrap().split(',').collect::<Vec<_>>();
    assert!((fundamental[1].parse::<f64>().unwrap() - 1.0).abs() <= bound);
    assert!((fundamental[2].parse::<f64>().unwrap() + 1.0).abs() <= bound);
    let leftovers: Vec<_> = std::fs::read_dir(&res)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with('.'))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn plot_data_can_be_disabled() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("zero_dc = true\n", "zero_dc = true\nemit_plot_data = false\noutput_dir = \"o\"\n");
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let o = pwmlp(&["design", "--config", "c.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("o/result.json").exists());
    assert!(!dir.path().join("o/waveform.csv").exists());
}

#[test]
fn infeasible_target_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = "levels = [-1.0, 0.0, 1.0]\nn_samples = 64\n[[harmonics]]\nk = 1\nre = 10.0\nim = 0.0\n";
    std::fs::write(dir.path().join("inf.toml"), text).unwrap();
    let o = pwmlp(&["design", "--config", "inf.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("pwmlp: error=infeasible exit=2 "), "{err}");
}

#[test]
fn config_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.toml"), "n_samples = 64\n").unwrap();
    let o = pwmlp(&["design", "--config", "m.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("field=levels"));

    std::fs::write(dir.path().join("p.toml"), "levels = [1.0,\n").unwrap();
    let o = pwmlp(&["design", "--config", "p.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("error=parse_error"));

    let o = pwmlp(&["design", "--preset", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn empty_batch_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = pwmlp(&["batch", "--presets", "", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("b/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.starts_with(
        "scenario,m,thd,residual_inf,residual_bound,energy_gap,energy_gap_bound,integral_rows,iterations,wall_time_s"
    ));
}

#[test]
fn batch_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.toml"), SMALL).unwrap();
    let bad = SMALL.replace("name = \"small\"", "name = \"too-big\"").replace("re = 1.0", "re = 9.0");
    std::fs::write(dir.path().join("bad.toml"), bad).unwrap();
    let o = pwmlp(&["batch", "--config", "ok.toml", "--config", "bad.toml", "--out", "b"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let summary = std::fs::read_to_string(dir.path().join("b/summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("small,3,") && rows[0].ends_with(",ok"));
    assert!(rows[1].starts_with("too-big,3,") && rows[1].ends_with(",infeasible"));
    assert!(dir.path().join("b/small/result.json").exists());
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = pwmlp(&["selftest"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().all(|l| l.starts_with("ok ")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    for out in ["r1", "r2"] {
        let o = pwmlp(&["design", "--config", "small.toml", "--out", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["result.json", "waveform.csv", "spectrum.csv"] {
        let a = std::fs::read(dir.path().join("r1").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("r2").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}
