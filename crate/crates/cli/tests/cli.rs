//! End-to-end runs of the `mesoscat` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mesoscat"))
}

fn run(cmd: &str, config: &Path, out: &Path) -> Output {
    bin()
        .args([cmd, "--config"])
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

const SCATTER: &str = r#"{
  "scatter": {
    "medium": {"omega": 1.0},
    "cluster": {"ring": {"n": 3, "radius": 1.0, "epsilon": 0.01, "total_mass": 0.3}},
    "source": [3.0, 0.7]
  },
  "output": {"formats": ["csv"]}
}"#;

#[test]
fn malformed_json_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\"scatter\": {");
    let out = dir.path().join("out");
    let o = run("scatter", &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config error"));
    assert!(files(&out).is_empty());
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &SCATTER.replace("\"source\"", "\"sauce\": 1, \"source\""),
    );
    let out = dir.path().join("out");
    let o = run("scatter", &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sauce"));
    assert!(files(&out).is_empty());
}

#[test]
fn missing_section_for_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SCATTER);
    let out = dir.path().join("out");
    let o = run("eigen", &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(files(&out).is_empty());
}

#[test]
fn source_inside_guard_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SCATTER.replace("[3.0, 0.7]", "[1.2, 0.0]"));
    let out = dir.path().join("out");
    let o = run("scatter", &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("finite distance"), "{err}");
    assert!(files(&out).is_empty());
}

#[test]
fn scatter_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SCATTER);
    let out = dir.path().join("out");
    let o = run("scatter", &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(&out), ["betas.csv", "residuals.csv"]);
    let text = fs::read_to_string(out.join("betas.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(
        header.contains(&"beta_re") && header.contains(&"beta_im"),
        "{header:?}"
    );
    assert_eq!(lines.count(), 3);
    assert!(!text.contains('\r'));
}

#[test]
fn threads_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let grid =
        r#""source": [3.0, 0.7], "grid": {"nx": 40, "ny": 30, "x": [-2, 2], "y": [-1.5, 1.5]}"#;
    let cfg = write_config(
        dir.path(),
        &SCATTER
            .replace(r#""source": [3.0, 0.7]"#, grid)
            .replace("[\"csv\"]", "[\"csv\", \"ppm\"]"),
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = bin()
            .args(["scatter", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(&out)
            .args(["--threads", threads])
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push(
            files(&out)
                .into_iter()
                .map(|f| fs::read(out.join(&f)).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(outputs[0].len(), 4);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn zero_threads_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SCATTER);
    let o = bin()
        .args(["scatter", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(dir.path().join("o"))
        .args(["--threads", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eigen_writes_tables_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "eigen": {
    "radius": 7.0,
    "cluster": {"ring": {"n": 16, "center": [1, 0], "radius": 2.0, "epsilon": 0.1}},
    "dirichlet_limit": true,
    "grid": {"nx": 31, "ny": 21, "x": [-7, 7], "y": [-7, 7]}
  },
  "output": {"formats": ["csv", "ppm"]}
}"#,
    );
    let out = dir.path().join("out");
    let o = run("eigen", &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        files(&out),
        ["eigenvalue.csv", "field.csv", "field.ppm", "scan.csv"]
    );
    let table = fs::read_to_string(out.join("eigenvalue.csv")).unwrap();
    let lambda: f64 = table
        .lines()
        .find(|l| l.starts_with("lambda0,"))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((lambda - 0.30678).abs() < 0.005, "{lambda}");
    let ppm = fs::read(out.join("field.ppm")).unwrap();
    let header = b"P6\n31 21\n255\n";
    assert!(ppm.starts_with(header));
    assert_eq!(ppm.len(), header.len() + 31 * 21 * 3);
    // 31 x 21 data rows plus the header.
    assert_eq!(
        fs::read_to_string(out.join("field.csv"))
            .unwrap()
            .lines()
            .count(),
        31 * 21 + 1
    );
}

#[test]
fn formats_filter_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "fieldmap": {"quasistatic": {
    "radius": 7.0,
    "cluster": {"explicit": {"epsilon": 0.01, "inclusions": [{"center": [1, 0]}, {"center": [-1, 1.5]}]}},
    "f": 0.01, "lambda": 1.0,
    "grid": {"nx": 20, "ny": 20, "x": [-7, 7], "y": [-7, 7]}
  }},
  "output": {"formats": ["ppm"]}
}"#,
    );
    let out = dir.path().join("out");
    let o = run("fieldmap", &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(&out), ["field.ppm"]);
}
