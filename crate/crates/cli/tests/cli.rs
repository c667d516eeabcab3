use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn seedbank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedbank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn missing_config_file_exits_1_naming_the_path() {
    let o = seedbank(&["simulate", "--config", "/no/such/dir/params.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/no/such/dir/params.json"), "{}", stderr(&o));
}

#[test]
fn unknown_key_and_out_of_range_values_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = seedbank(&["simulate", "--set", "colonisation=0.1", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colonisation"));

    let cfg = repo_file("configs/invasion.json");
    let o = seedbank(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "c=0.7",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("c = 0.7") && msg.contains("1/2"), "{msg}");

    let o = seedbank(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "k=1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k = 1"));

    let o = seedbank(&["pcrit", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("H = missing"));

    let o = seedbank(&["pcrit", "--H", "0", "--jobs", "0", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unparseable_flag_exits_1() {
    let o = seedbank(&["pcrit", "--H", "minus-one"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scan_that_never_accepts_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = seedbank(&[
        "pcrit",
        "--H",
        "0",
        "--half-width",
        "50",
        "--horizon",
        "50",
        "--set",
        "accept_threshold=2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn pcrit_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = seedbank(&[
        "pcrit",
        "--H",
        "0",
        "--half-width",
        "2000",
        "--horizon",
        "2000",
        "--seed",
        "42",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let threshold = fs::read_to_string(dir.path().join("threshold.csv")).unwrap();
    assert_eq!(threshold, golden("pcrit_h0_seed42_threshold.csv"));
    let scan = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(scan, golden("pcrit_h0_seed42_scan.csv"));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn simulate_writes_101_generations_per_replicate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_file("configs/invasion.json");
    let o = seedbank(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--replicates",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("density.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# fingerprint="));
    assert_eq!(
        lines.next().unwrap(),
        "replicate,generation,viable_density,expired_density,extinct"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 101);
    for r in 0..3 {
        let gens: Vec<&str> = rows
            .iter()
            .filter(|row| row[0] == r.to_string())
            .map(|row| row[1])
            .collect();
        assert_eq!(gens.len(), 101);
        assert_eq!(gens[100], "100");
    }
    assert!(!text.contains('\r') && !text.contains('"'));
}

#[test]
fn manifest_reproduces_outputs_byte_for_byte() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let cfg = repo_file("configs/invasion.json");
    // no seed: one is drawn and recorded
    let o = seedbank(&[
        "coupled",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "seed=null",
        "--set",
        "topology={\"torus\": 20}",
        "--generations",
        "6",
        "--out",
        first.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = first.path().join("manifest.json");
    let o = seedbank(&[
        "coupled",
        "--config",
        manifest.to_str().unwrap(),
        "--jobs",
        "3",
        "--out",
        second.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_files(first.path()), csv_files(second.path()));
    assert_eq!(
        fs::read(&manifest).unwrap(),
        fs::read(second.path().join("manifest.json")).unwrap()
    );
}

#[test]
fn flags_override_file_values_and_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_file("configs/invasion.json");
    let o = seedbank(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "p=0.3",
        "--p",
        "0.4",
        "--replicates",
        "1",
        "--generations",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["p"], 0.4);
    assert_eq!(m["replicates"], 1);
    assert_eq!(m["seed"], m["resolved_seed"]);
    assert_eq!(m["command"], "simulate");
    assert!(m["git_describe"].is_string());
}
