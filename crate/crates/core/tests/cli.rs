use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BASE: &str = r#"sigma2 = 0.2
rate = 8.0

[scenario]
N = 4
M = 8
rician_K = 1.0
D = "identity"
Dt = "identity"
los = { kind = "ula" }
entry = { law = "weibull", params = { k = 1.0 }, sigma_r2 = 1.6, sigma_i2 = 0.4 }

[mc]
trials = 400
seed = 5
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmtbias"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .and_then(|rest| rest.split(',').next())
        .unwrap_or_else(|| panic!("no {key} in\n{csv}"))
        .parse()
        .unwrap()
}

#[test]
fn numeric_subcommands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    for args in [
        &["solve"][..],
        &["quantities"],
        &["bias", "--method", "both"],
        &["lss", "--f", "poly:0,1", "--nodes", "64"],
        &["clt", "--bits"],
        &["outage", "--rate", "7,8,9"],
        &["validate"],
    ] {
        let o = run(args, &cfg);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).lines().count() > 1);
    }
}

#[test]
fn bias_methods_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    let o = run(&["bias", "--z", "-0.5+0.3i"], &cfg);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(value(&text, "relative_gap") < 1e-5);
    assert_eq!(value(&text, "z"), -0.5);
}

#[test]
fn clt_bits_scale_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    let nats = stdout(&run(&["clt"], &cfg));
    let bits = stdout(&run(&["clt", "--bits"], &cfg));
    let ratio = value(&bits, "V") / value(&nats, "V");
    assert!((ratio - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);
    let vratio = value(&bits, "Theta") / value(&nats, "Theta");
    assert!((vratio - ratio * ratio).abs() < 1e-12);
}

#[test]
fn outputs_are_reproducible_and_json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    let a = stdout(&run(&["mc"], &cfg));
    let b = stdout(&run(&["mc"], &cfg));
    assert_eq!(a, b);
    let seeded = stdout(&run(&["mc", "--seed", "6"], &cfg));
    assert_ne!(a, seeded);

    let json = stdout(&run(&["mc", "--format", "json"], &cfg));
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["columns"][0], "quantity");
    let mean_row = parsed["rows"].as_array().unwrap().iter().find(|r| r[0] == "mean_C").unwrap();
    assert_eq!(mean_row[1].as_f64().unwrap(), value(&a, "mean_C"));
}

#[test]
fn sample_dump_has_one_value_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    let dump = dir.path().join("samples.txt");
    let out = dir.path().join("mc.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_rmtbias"))
        .args(["mc", "--trials", "300", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--dump-samples")
        .arg(&dump)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().count(), 300);
    assert_eq!(value(&std::fs::read_to_string(&out).unwrap(), "trials"), 300.0);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(&["solve"], &dir.path().join("nope.toml"));
    assert_eq!(missing.status.code(), Some(2));

    let bad = write_config(dir.path(), "bad.toml", "sigma2 = 0.2\n[scenario]\nN = 2\n");
    assert_eq!(run(&["solve"], &bad).status.code(), Some(2));

    let cfg = write_config(dir.path(), "base.toml", BASE);
    assert_eq!(run(&["bias", "--method", "t3"], &cfg).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "fig9"], &cfg).status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", BASE);
    let o = run(&["solve", "--max-iter", "2"], &cfg);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validation_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let zero_d = write_config(
        dir.path(),
        "d0.toml",
        &BASE.replace("D = \"identity\"", "D = [0.0, 0.0, 0.0, 0.0]"),
    );
    let o = run(&["validate"], &zero_d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("variance_profiles,fail"));

    let weights = write_config(dir.path(), "w.toml", &BASE.replace("sigma_i2 = 0.4", "sigma_i2 = 1.4"));
    let o = run(&["validate"], &weights);
    assert!(stdout(&o).contains("entry_normalization,fail"));

    let lognormal = write_config(
        dir.path(),
        "ln.toml",
        &BASE.replace("law = \"weibull\", params = { k = 1.0 }", "law = \"lognormal\", params = { sigma = 1.5 }"),
    );
    let o = run(&["validate"], &lognormal);
    assert!(o.status.success());
    assert!(stdout(&o).contains(",warn,"));
}

#[test]
fn partial_sweeps_flush_rows_and_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BASE}\n[sweep]\nvariable = \"cv\"\nvalues = [0.8, 1.0, 40.0]\n");
    let cfg = write_config(dir.path(), "cv.toml", &text);
    let out = dir.path().join("cv.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_rmtbias"))
        .args(["reproduce", "cv_vs_variance", "--trials", "50", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("# failed"));
}

#[test]
fn reproduce_figures_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BASE}\n[sweep]\nvariable = \"N\"\nvalues = [2, 4]\n");
    let cfg = write_config(dir.path(), "n.toml", &text);
    for fig in ["bias_vs_N", "clt_pdf", "cdf_comparison", "outage_vs_snr", "cv_vs_variance"] {
        let o = run(&["reproduce", fig, "--trials", "200"], &cfg);
        assert!(o.status.success(), "{fig}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(!text.contains("# failed"));
        if fig == "bias_vs_N" {
            assert_eq!(text.lines().count(), 3);
            assert!(text.starts_with("N,M,analytic_bias,"));
        }
    }
}
