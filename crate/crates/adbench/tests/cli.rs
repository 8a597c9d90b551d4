//! End-to-end CLI checks: dataset generation, grid runs, report
//! regeneration, and exit codes.

use std::path::Path;
use std::process::Command;

fn adbench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adbench"))
}

#[test]
fn gen_writes_a_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("data.csv");
    let status = adbench()
        .args(["gen", "--n-per-class", "25", "--seed", "9", "--out"])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let profiles = adbench::data::load_dataset(&csv).unwrap();
    assert_eq!(profiles.len(), 100);
    // Regenerating with the same seed reproduces the file exactly.
    let csv2 = dir.path().join("data2.csv");
    adbench()
        .args(["gen", "--n-per-class", "25", "--seed", "9", "--out"])
        .arg(&csv2)
        .status()
        .unwrap();
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&csv2).unwrap());
}

fn write_small_config(dir: &Path, dataset_csv: &Path) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        format!(
            r#"
[dataset]
path = "{}"

[grid]
normal_classes = [0, 1]
pollution_ratios = [0.0, 0.05]
labeled_ratios = [0.0, 0.05]
seeds = [0]

[[methods]]
name = "rpd"

[[methods]]
name = "iforest"
preprocess = "minmax_pca"

[params]
n_projections = 100
n_trees = 25
"#,
            dataset_csv.display()
        ),
    )
    .unwrap();
    path
}

#[test]
fn run_and_report_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("data.csv");
    adbench().args(["gen", "--n-per-class", "60", "--seed", "3", "--out"]).arg(&csv).status().unwrap();
    let config = write_small_config(dir.path(), &csv);

    let out = dir.path().join("run");
    let status = adbench()
        .args(["run", "--grid", "unsup"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for artifact in ["results.csv", "summary.csv", "plotdata.json", "manifest.json"] {
        assert!(out.join(artifact).exists(), "{artifact} missing");
    }
    // 2 methods x 2 normals x 1 seed x (1 zero + 3 x 1 ratios) = 16 rows.
    let rows = adbench::metrics::load_results(out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 16);

    // report regenerates the same summary from results.csv alone.
    let rep = dir.path().join("rep");
    let status = adbench()
        .args(["report"])
        .arg("--results")
        .arg(out.join("results.csv"))
        .arg("--out")
        .arg(&rep)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        std::fs::read(out.join("summary.csv")).unwrap(),
        std::fs::read(rep.join("summary.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(out.join("plotdata.json")).unwrap(),
        std::fs::read(rep.join("plotdata.json")).unwrap()
    );
}

#[test]
fn sad_grid_runs_dsad() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        r#"
[dataset.synth]
n_per_class = 50
seed = 4

[grid]
normal_classes = [0]
labeled_ratios = [0.0, 0.10]
seeds = [0]

[params]
epochs_cae = 2
epochs_dsvdd = 2
latent_dim = 8
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = adbench()
        .args(["run", "--grid", "sad"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = adbench::metrics::load_results(out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 4); // 1 zero-ratio + 3 labeled classes
    assert!(rows.iter().all(|r| r.method == "dsad"));
}

#[test]
fn bad_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, "[dataset]\n").unwrap();
    let out = dir.path().join("out");
    let status = adbench()
        .args(["run", "--grid", "unsup"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(!status.success());
}
