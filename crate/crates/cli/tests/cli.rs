use std::path::Path;
use std::process::{Command, Output};

use ecprep_cli::{catalog, config, load, run, validate, write_outputs, RunError};

fn ecprep(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecprep"))
        .args(args)
        .env("ECPREP_OUT", out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
name = "small"
figure = "-"
seed = 3

[model]
kind = "xy_chain"
sites = 3
params = { J = 1.0, B_X = 0.2 }

[[targets.axes]]
name = "B_Z"
lo = 0.0
hi = 2.0
count = 5

[[tasks]]
kind = "ec"
name = "ec"
training = { count = 3 }
method = { kind = "ite", dtau = 0.2, tau_max = 1.0, initial = "haar" }
"#;

#[test]
fn catalog_covers_every_figure() {
    let figures: Vec<String> = catalog::entries().into_iter().map(|e| e.figure).collect();
    for f in ["2", "3", "4/ATEBx0", "5", "7", "8", "A1", "A2", "A5", "A6", "A7", "A8", "A9"] {
        assert!(figures.iter().any(|g| g == f), "no bundled config for figure {f}");
    }
}

#[test]
fn every_bundled_config_validates() {
    for name in catalog::names() {
        let cfg = load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(cfg.name, name);
        validate(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn list_prints_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecprep(&["list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), catalog::names().count());
    assert!(text.contains("fig7_noise"));
}

#[test]
fn trivial_sweep_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecprep(&["run", "trivial"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trivial/gap.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("B_Z,method,quantity,value\n"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trivial/metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 1);
    assert_eq!(meta["library"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["model"]["kind"], "xy_chain");
    assert_eq!(meta["tables"][0]["rows"], 1);
    let timing: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trivial/timing.json")).unwrap()).unwrap();
    assert!(timing["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn out_flag_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let other = dir.path().join("other");
    let out = ecprep(&["run", "trivial", "--out", other.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert!(other.join("trivial/gap.csv").exists());
    assert!(!dir.path().join("trivial").exists());
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("tau_max = 1.0,", "tau_max = 1.0, bogus_knob = 2,");
    let p = write_config(dir.path(), "bad.toml", &text);
    for cmd in ["validate", "run"] {
        let out = ecprep(&[cmd, &p], dir.path());
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_knob"));
    }
    let top = write_config(dir.path(), "bad2.toml", &format!("colour = 1\n{SMALL}"));
    let out = ecprep(&["validate", &top], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn inconsistent_configs_are_config_errors() {
    let cases = [
        // Training count above the k_p guard of N + 2.
        SMALL.replace("count = 3 }", "count = 6 }"),
        // Truncation not a whole number of steps.
        SMALL.replace("tau_max = 1.0", "tau_max = 1.03"),
        // Unknown model parameter.
        SMALL.replace("B_X = 0.2", "B_Y = 0.2"),
        // Target axis the model does not have.
        SMALL.replace("name = \"B_Z\"", "name = \"J_Z\""),
        // Task that needs targets without any.
        SMALL.replace("[[targets.axes]]\nname = \"B_Z\"\nlo = 0.0\nhi = 2.0\ncount = 5\n", ""),
    ];
    for text in cases {
        let cfg = config::parse(&text).unwrap();
        match validate(&cfg) {
            Err(RunError::Config(_)) => {}
            other => panic!("expected a config error, got {other:?} for\n{text}"),
        }
    }
}

#[test]
fn capacity_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("sites = 3", "sites = 30");
    let p = write_config(dir.path(), "big.toml", &text);
    let out = ecprep(&["validate", &p], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("30"));
}

#[test]
fn zero_workers_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecprep(&["run", "trivial", "--workers", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_override_reaches_outputs() {
    let cfg = config::parse(SMALL).unwrap();
    let a = run(&cfg, Some(1)).unwrap();
    let mut cfg7 = cfg.clone();
    cfg7.seed = 7;
    let b = run(&cfg7, Some(1)).unwrap();
    // A Haar start depends on the seed, so the truncated energies move.
    let ea = a.table("ec").unwrap().values("truncated", "energy");
    let eb = b.table("ec").unwrap().values("truncated", "energy");
    assert_ne!(ea, eb);

    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "small.toml", SMALL);
    let out = ecprep(&["run", &p, "--seed", "7"], dir.path());
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("small/metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "small.toml", SMALL);
    let mut snapshots = Vec::new();
    for (i, w) in ["1", "2", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let out = ecprep(&["run", &p, "--workers", w, "--out", out_dir.to_str().unwrap()], dir.path());
        assert!(out.status.success());
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out_dir.join("small"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.file_name().unwrap() != "timing.json")
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        files.sort();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0].len(), 3);
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[0], snapshots[2]);
}

#[test]
fn ec_rows_respect_the_bound() {
    let cfg = config::parse(SMALL).unwrap();
    let out = run(&cfg, None).unwrap();
    let t = out.table("ec").unwrap();
    let ec = t.values("ec", "energy");
    let exact = t.values("exact", "energy");
    assert_eq!(ec.len(), 5);
    for (e, x) in ec.iter().zip(&exact) {
        assert!(*e >= x - 1e-9);
    }
    let summary = out.table("ec_summary").unwrap();
    assert_eq!(summary.scalar("ec", "bound_violations"), Some(0.0));
    let dir = tempfile::tempdir().unwrap();
    let dest = write_outputs(&out, dir.path()).unwrap();
    assert!(dest.join("ec_summary.csv").exists());
}
