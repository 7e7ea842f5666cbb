use std::path::Path;
use std::process::{Command, Output};

use nbp_measures::cli::{ClustersTable, KsTable, SelftestTable, WeightsTable};
use nbp_measures::measure::DiscreteMeasure;

fn nbpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbpm"))
        .args(args)
        .env_remove("NBPM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> Vec<u8> {
    let out = nbpm(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

const SMALL_KS: &[&str] = &[
    "ks-table", "--alpha", "0.5", "--theta", "10", "--r", "20", "--reps", "40",
];
const SMALL_WEIGHTS: &[&str] = &["weights", "--reps", "50", "--top-k", "5"];
const SMALL_CLUSTERS: &[&str] = &[
    "clusters", "--theta", "3", "--n-grid", "50,200", "--reps", "30", "--n", "200",
];

#[test]
fn sample_example() {
    let out = stdout(&[
        "sample",
        "--process",
        "dirichlet",
        "--theta",
        "3",
        "--n",
        "500",
        "--seed",
        "7",
    ]);
    let m = DiscreteMeasure::from_json(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(m.len(), 500);
    assert!((m.weight_sum() - 1.0).abs() <= 1e-12);
}

#[test]
fn outputs_are_byte_identical_and_job_independent() {
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "sample",
            "--process",
            "pdp_series",
            "--alpha",
            "0.5",
            "--theta",
            "2",
            "--n",
            "100",
        ],
        vec![
            "sample",
            "--process",
            "pdp_stick",
            "--alpha",
            "0.5",
            "--theta",
            "2",
            "--n",
            "100",
        ],
        SMALL_KS.to_vec(),
        SMALL_WEIGHTS.to_vec(),
        SMALL_CLUSTERS.to_vec(),
        vec!["selftest"],
    ];
    for cmd in commands {
        for fmt in ["json", "csv"] {
            let mut a = cmd.clone();
            a.extend(["--seed", "42", "--output", fmt, "--jobs", "1"]);
            let mut b = cmd.clone();
            b.extend(["--seed", "42", "--output", fmt, "--jobs", "4"]);
            let first = stdout(&a);
            assert_eq!(first, stdout(&a), "{a:?}");
            assert_eq!(first, stdout(&b), "{b:?}");
        }
    }
}

#[test]
fn outputs_round_trip_through_readers() {
    let json = |args: &[&str]| {
        let mut v = args.to_vec();
        v.extend(["--output", "json"]);
        String::from_utf8(stdout(&v)).unwrap()
    };
    let csv = |args: &[&str]| {
        let mut v = args.to_vec();
        v.extend(["--output", "csv"]);
        stdout(&v)
    };
    let sample = [
        "sample",
        "--process",
        "stable",
        "--alpha",
        "0.4",
        "--n",
        "30",
    ];
    let m = DiscreteMeasure::from_json(&json(&sample)).unwrap();
    assert_eq!(DiscreteMeasure::read_csv(&csv(&sample)[..]).unwrap(), m);

    let ks = KsTable::read_json(&json(SMALL_KS)).unwrap();
    assert_eq!(KsTable::read_csv(&csv(SMALL_KS)[..]).unwrap(), ks);
    assert_eq!(ks.rows.len(), 1);

    let w = WeightsTable::read_json(&json(SMALL_WEIGHTS)).unwrap();
    assert_eq!(WeightsTable::read_csv(&csv(SMALL_WEIGHTS)[..]).unwrap(), w);
    assert_eq!(w.rows.len(), 4 * 5);

    let c = ClustersTable::read_json(&json(SMALL_CLUSTERS)).unwrap();
    assert_eq!(
        ClustersTable::read_csv(&csv(SMALL_CLUSTERS)[..]).unwrap(),
        c
    );

    let s = SelftestTable::read_json(&json(&["selftest"])).unwrap();
    assert_eq!(SelftestTable::read_csv(&csv(&["selftest"])[..]).unwrap(), s);
    assert_eq!(s.meta.failed, 0);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"process":"dirichlet","theta":3.0,"n":40,"seed":5}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = DiscreteMeasure::from_json(
        std::str::from_utf8(&stdout(&["sample", "--config", cfg])).unwrap(),
    )
    .unwrap();
    assert_eq!(from_file.len(), 40);
    assert_eq!(from_file.provenance().seed, 5);
    let overridden = DiscreteMeasure::from_json(
        std::str::from_utf8(&stdout(&[
            "sample", "--config", cfg, "--n", "25", "--seed", "6",
        ]))
        .unwrap(),
    )
    .unwrap();
    assert_eq!(overridden.len(), 25);
    assert_eq!(overridden.provenance().seed, 6);
}

#[test]
fn grid_config_for_ks_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    std::fs::write(
        &cfg,
        r#"{"process":"pdp_series","replications":20,"truncation":{"mode":"fixed_count","n":100},
            "rows":[{"alpha":0.5,"theta":1.0,"r":2.0},{"alpha":0.9,"theta":10.0,"r":11.0}]}"#,
    )
    .unwrap();
    let out = stdout(&["ks-table", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    let t = KsTable::read_json(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.meta.replications, 20);
    assert!(t
        .rows
        .iter()
        .all(|r| r.mean_distance > 0.0 && r.mean_distance < 1.0));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nbpm"))
        .args(["sample", "--theta", "2", "--n", "10", "--output", "csv"])
        .env("NBPM_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let path = dir.path().join("sample.csv");
    assert!(Path::new(&path).exists());
    let m = DiscreteMeasure::read_csv(&std::fs::read(&path).unwrap()[..]).unwrap();
    assert_eq!(m.len(), 10);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| nbpm(args).status.code().unwrap();
    assert_eq!(code(&["selftest"]), 0);
    assert_eq!(
        code(&["sample", "--process", "dirichlet", "--theta", "-3"]),
        1
    );
    assert_eq!(code(&["sample", "--config", "/does/not/exist.json"]), 1);
    assert_eq!(
        code(&["sample", "--process", "pdp_series", "--theta", "1"]),
        1
    );
    assert_eq!(code(&["no-such-command"]), 1);
    let err = nbpm(&["sample", "--config", "/does/not/exist.json"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("cannot read config"));
}
