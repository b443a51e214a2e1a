use std::path::Path;
use std::process::{Command, Output};

use rdsim::io::manifest::read_manifest;
use rdsim::io::read_network;

fn rdsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsim"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

const SMALL: &str = r#"
topologies = ["homophily", "inverse_homophily"]
sensitivity_indices = [2, 9]
network_sizes = [400]
coupons = [2, 4]
networks_per_cell = 3
runs_per_network = 3
master_seed = 41
"#;

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

#[test]
fn grid_report_and_manifest_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();

    let a = rdsim(
        &[
            "grid",
            "--config",
            "small.toml",
            "--out",
            "a",
            "--workers",
            "1",
        ],
        d,
    );
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = rdsim(
        &[
            "grid",
            "--config",
            "small.toml",
            "--out",
            "b",
            "--workers",
            "8",
        ],
        d,
    );
    assert!(b.status.success());
    let files = csv_files(&d.join("a"));
    assert_eq!(files, csv_files(&d.join("b")));
    // runs, reports, one summary per coupon count, 2 topologies x 2 seed rules x 3 referrals
    assert_eq!(files.len(), 2 + 2 + 12);
    for f in &files {
        assert_eq!(
            std::fs::read(d.join("a").join(f)).unwrap(),
            std::fs::read(d.join("b").join(f)).unwrap(),
            "{f}"
        );
    }

    let m = read_manifest(&d.join("a/manifest.json")).unwrap();
    assert_eq!(m.files.len(), files.len());
    assert!(m.verify(&d.join("a")).is_empty());

    // re-aggregation from runs.csv reproduces every table
    let r = rdsim(&["report", "--runs", "a/runs.csv", "--out", "r"], d);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for f in &files {
        assert_eq!(
            std::fs::read(d.join("a").join(f)).unwrap(),
            std::fs::read(d.join("r").join(f)).unwrap(),
            "{f}"
        );
    }
    assert_eq!(
        read_manifest(&d.join("r/manifest.json")).unwrap().config,
        m.config
    );

    // the manifest alone reproduces the run
    let c = rdsim(
        &[
            "grid",
            "--config",
            "a/manifest.json",
            "--out",
            "c",
            "--workers",
            "2",
        ],
        d,
    );
    assert!(c.status.success());
    for f in &files {
        assert_eq!(
            std::fs::read(d.join("a").join(f)).unwrap(),
            std::fs::read(d.join("c").join(f)).unwrap(),
            "{f}"
        );
    }

    // a different seed changes the runs
    let s = rdsim(
        &[
            "grid",
            "--config",
            "small.toml",
            "--out",
            "s",
            "--seed",
            "42",
        ],
        d,
    );
    assert!(s.status.success());
    assert_ne!(
        std::fs::read(d.join("a/runs.csv")).unwrap(),
        std::fs::read(d.join("s/runs.csv")).unwrap()
    );
}

#[test]
fn one_cell_grid_writes_single_row_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(
        d.join("one.toml"),
        r#"
topologies = ["homophily"]
sensitivity_indices = [4]
network_sizes = [1000]
coupons = [3]
referrals = ["uniform"]
seed_rules = ["uniform"]
degree_modes = ["exact"]
networks_per_cell = 2
runs_per_network = 2
"#,
    )
    .unwrap();
    let o = rdsim(&["grid", "--config", "one.toml", "--out", "o"], d);
    assert!(o.status.success());
    let tables: Vec<String> = csv_files(&d.join("o"))
        .into_iter()
        .filter(|f| f.starts_with("summary_") || f.starts_with("sensitivity_"))
        .collect();
    assert_eq!(
        tables,
        [
            "sensitivity_homophily_n1000_uniform_uniform.csv",
            "summary_n1000_c3.csv"
        ]
    );
    for t in tables {
        let text = std::fs::read_to_string(d.join("o").join(&t)).unwrap();
        assert_eq!(text.lines().count(), 2, "{t}");
    }
}

#[test]
fn generate_and_simulate_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let g = rdsim(
        &[
            "generate",
            "--topology",
            "rich_get_richer",
            "--sensitivity-index",
            "5",
            "--nodes",
            "500",
            "--count",
            "2",
            "--out",
            "n",
        ],
        d,
    );
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let (net, pop) = read_network(&d.join("n/network_1.txt")).unwrap();
    assert_eq!(net.node_count(), 500);
    assert_eq!(pop.len(), 500);
    let dq = std::fs::read_to_string(d.join("n/degree_quantity_1.csv")).unwrap();
    assert_eq!(dq.lines().count(), 501);
    assert!(read_manifest(&d.join("n/manifest.json"))
        .unwrap()
        .verify(&d.join("n"))
        .is_empty());

    let s = rdsim(
        &[
            "simulate",
            "--topology",
            "inverse_homophily",
            "--nodes",
            "600",
            "--coupons",
            "4",
            "--degree-mode",
            "stochastic",
            "--out",
            "s",
        ],
        d,
    );
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let stdout = String::from_utf8_lossy(&s.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("vh ")), "{stdout}");
    let sample = std::fs::read_to_string(d.join("s/sample.csv")).unwrap();
    assert_eq!(sample.lines().count(), 301);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("bad.toml"), "coupons = [7]\n").unwrap();
    let o = rdsim(&["grid", "--config", "bad.toml", "--out", "x"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("{2..6}"));

    std::fs::write(d.join("typo.toml"), "coupon = [3]\n").unwrap();
    assert_eq!(
        rdsim(&["grid", "--config", "typo.toml"], d).status.code(),
        Some(2)
    );
    assert_eq!(
        rdsim(&["grid", "--config", "absent.toml"], d).status.code(),
        Some(4)
    );

    std::fs::write(d.join("runs.csv"), "topology,sensitivity_index\nx,1\n").unwrap();
    assert_eq!(
        rdsim(&["report", "--runs", "runs.csv", "--out", "r"], d)
            .status
            .code(),
        Some(4)
    );

    let v = rdsim(&["validate", "--steps", "100000", "--graphs", "2"], d);
    assert!(v.status.success());
    assert_eq!(
        String::from_utf8_lossy(&v.stdout)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        5
    );
}
