use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dapc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dapc"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn dapc")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--generate",
        "blobs",
        "--n",
        "1000",
        "--clusters",
        "3",
        "--seed",
        "7",
    ];
    for name in ["a.csv", "b.csv"] {
        let mut a = args.to_vec();
        a.extend(["--output", name]);
        assert!(dapc(&a, dir.path()).status.success());
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1000);
    let truth = fs::read_to_string(dir.path().join("a.truth.csv")).unwrap();
    assert_eq!(truth.lines().count(), 1001);
}

#[test]
fn clustering_writes_one_row_per_point_and_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(dapc(
        &["--generate", "blobs", "--n", "300", "--output", "blobs.csv"],
        p
    )
    .status
    .success());
    let o = dapc(
        &[
            "--algorithm",
            "dapc",
            "--m",
            "3",
            "--input",
            "blobs.csv",
            "--output",
            "labels.csv",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let labels = fs::read_to_string(p.join("labels.csv")).unwrap();
    let mut lines = labels.lines();
    assert_eq!(lines.next(), Some("point_index,cluster_label"));
    assert_eq!(lines.count(), 300);

    let report = stderr(&o);
    assert_eq!(report.trim().lines().count(), 1);
    let clusters = report
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("clusters="))
        .unwrap();
    let distinct: std::collections::BTreeSet<&str> = labels
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .filter(|l| *l != "-1")
        .collect();
    assert_eq!(clusters.parse::<usize>().unwrap(), distinct.len());

    let again = dapc(
        &[
            "--algorithm",
            "dapc",
            "--m",
            "3",
            "--input",
            "blobs.csv",
            "--output",
            "again.csv",
            "--workers",
            "3",
            "--report",
            "r.txt",
        ],
        p,
    );
    assert!(again.status.success());
    assert_eq!(labels, fs::read_to_string(p.join("again.csv")).unwrap());
    assert!(fs::read_to_string(p.join("r.txt"))
        .unwrap()
        .starts_with("algorithm=dapc"));
}

#[test]
fn kmeans_without_k_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.csv"), "0,0\n1,1\n").unwrap();
    let o = dapc(
        &[
            "--algorithm",
            "kmeans",
            "--input",
            "in.csv",
            "--output",
            "o.csv",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
    assert!(!dir.path().join("o.csv").exists());
}

#[test]
fn bad_flags_and_missing_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let o = dapc(&["--algorithm", "spectral"], dir.path());
    assert!(!o.status.success());
    let o = dapc(&["--algorithm", "dapc"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
    let o = dapc(&["--generate", "spiral", "--output", "x.csv"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn input_errors_carry_row_context() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.csv"), "x,y\n0,0\n1\n").unwrap();
    let o = dapc(
        &[
            "--algorithm",
            "naive",
            "--header",
            "--input",
            "in.csv",
            "--output",
            "o.csv",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn svg_output_and_dimension_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(dapc(
        &["--generate", "rings", "--n", "200", "--output", "r.csv"],
        p
    )
    .status
    .success());
    let o = dapc(
        &[
            "--algorithm",
            "dapc",
            "--input",
            "r.csv",
            "--output",
            "l.csv",
            "--svg",
            "r.svg",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(p.join("r.svg"))
            .unwrap()
            .matches("<circle")
            .count(),
        200
    );

    assert!(dapc(
        &[
            "--generate",
            "blobs",
            "--dim",
            "3",
            "--n",
            "50",
            "--output",
            "b.csv"
        ],
        p
    )
    .status
    .success());
    let o = dapc(
        &[
            "--algorithm",
            "dapc",
            "--input",
            "b.csv",
            "--output",
            "l.csv",
            "--svg",
            "b.svg",
        ],
        p,
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("2-dimensional"));
}

#[test]
fn bridge_generation_marks_chain_as_noise() {
    let dir = tempfile::tempdir().unwrap();
    let o = dapc(
        &[
            "--generate",
            "bridge",
            "--n",
            "100",
            "--chain",
            "1",
            "--output",
            "br.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let truth = fs::read_to_string(dir.path().join("br.truth.csv")).unwrap();
    let noise: Vec<&str> = truth.lines().filter(|l| l.ends_with(",-1")).collect();
    assert_eq!(noise, vec!["100,-1"]);
}

#[test]
fn bench_table_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = dapc(&["bench", "--generate", "blobs"], p);
    assert!(!o.status.success());
    let o = dapc(&["bench", "--algorithms", "", "--generate", "blobs"], p);
    assert!(!o.status.success());

    let o = dapc(
        &[
            "bench",
            "--algorithms",
            "dapc,kmeans,dbscan",
            "--k",
            "3",
            "--generate",
            "blobs",
            "--n",
            "300",
            "--eps-grid",
            "4",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    for alg in ["dapc", "kmeans", "dbscan"] {
        assert!(out.lines().any(|l| l.starts_with(alg)), "{out}");
    }
    assert!(out.contains("dbscan eps"));
}

#[test]
fn bench_ari_against_own_labels_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(dapc(
        &["--generate", "blobs", "--n", "300", "--output", "d.csv"],
        p
    )
    .status
    .success());
    assert!(dapc(
        &[
            "--algorithm",
            "naive",
            "--input",
            "d.csv",
            "--output",
            "own.csv"
        ],
        p
    )
    .status
    .success());
    let o = dapc(
        &[
            "bench",
            "--algorithms",
            "naive",
            "--input",
            "d.csv",
            "--truth",
            "own.csv",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o)
        .lines()
        .find(|l| l.starts_with("naive"))
        .unwrap()
        .to_string();
    assert!(row.ends_with("1.0000"), "{row}");
}
