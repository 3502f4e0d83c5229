use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

/// Parses a `k,rate` CSV.
fn sweep_rows(path: &Path) -> Vec<(usize, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,rate"));
    lines
        .map(|l| {
            let (k, r) = l.split_once(',').unwrap();
            (k.parse().unwrap(), r.parse().unwrap())
        })
        .collect()
}

#[test]
fn capacity_of_builtins() {
    let o = bcast(&["capacity", "--graph", "diamond4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("capacity 2\nsink "));
    let o = bcast(&["capacity", "--graph", "path3"]);
    assert!(stdout(&o).starts_with("capacity 1\n"));
    let o = bcast(&["capacity", "--graph", "star(5)"]);
    assert!(stdout(&o).starts_with("capacity 1\n"));
}

#[test]
fn missing_graph_file_is_a_usage_error() {
    let o = bcast(&["capacity", "--graph", "/no/such/graph.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/graph.txt"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(bcast(&["capacity", "--bogus"]).status.code(), Some(2));
    assert_eq!(bcast(&[]).status.code(), Some(2));
}

#[test]
fn tree_listings() {
    let o = bcast(&["trees", "--graph", "diamond4"]);
    let out = stdout(&o);
    assert!(o.status.success());
    assert_eq!(out.lines().filter(|l| l.starts_with("tree ")).count(), 2);
    assert!(out.contains("pairwise edge-disjoint: yes"));

    let o = bcast(&["trees", "--graph", "path4"]);
    assert!(stdout(&o).contains("tree 0: 0:0->1 1:1->2 2:2->3\n"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cut.txt");
    fs::write(&file, "# node 2 is unreachable\n3 1 0\n1 2\n").unwrap();
    let o = bcast(&["trees", "--graph", file.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "no trees\n");
}

#[test]
fn zero_load_run_delivers_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bcast(&[
        "simulate",
        "--graph",
        "diamond4",
        "--lambda",
        "0",
        "--horizon",
        "500",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("run-seed1.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("slot,admitted,delivered,min_received,backlog")
    );
    for l in lines {
        assert_eq!(l.split(',').nth(2), Some("0"), "{l}");
    }
}

#[test]
fn replications_write_distinct_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bcast(&[
        "simulate",
        "--graph",
        "diamond4",
        "--lambda",
        "1.5",
        "--horizon",
        "2000",
        "--policy",
        "pi_kh",
        "--k",
        "4",
        "--seeds",
        "1,2,3,4,5",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let runs: Vec<String> = (1..=5)
        .map(|s| fs::read_to_string(dir.path().join(format!("run-seed{s}.csv"))).unwrap())
        .collect();
    for i in 0..5 {
        for j in i + 1..5 {
            assert_ne!(runs[i], runs[j]);
        }
    }
    let nodes = fs::read_to_string(dir.path().join("run-seed3-nodes.csv")).unwrap();
    assert!(nodes.starts_with("slot,node0,node1,node2,node3\n"));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate",
        "--graph",
        "random(6,14,2)",
        "--lambda",
        "0.9",
        "--horizon",
        "1500",
        "--policy",
        "pi_rand",
        "--out-dir",
        out,
    ];
    assert!(bcast(&args).status.success());
    let first = fs::read(dir.path().join("run-seed1.csv")).unwrap();
    assert!(bcast(&args).status.success());
    assert_eq!(fs::read(dir.path().join("run-seed1.csv")).unwrap(), first);
}

#[test]
fn fig2_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("fig2.toml");
    let o = bcast(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rates: Vec<f64> = stdout(&o)
        .lines()
        .map(|l| l.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 5);
    for r in rates {
        assert!((1.90..=2.00).contains(&r), "{r}");
    }
    for s in 1..=5 {
        assert!(dir.path().join(format!("fig2-seed{s}.csv")).is_file());
    }
}

#[test]
fn diamond_sweep_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("d4-sweep.toml");
    let o = bcast(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--horizon",
        "20000",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = sweep_rows(&dir.path().join("d4-sweep-sweep-seed1.csv"));
    assert_eq!(
        rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        vec![1, 2, 4, 8, 16]
    );
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1 - 0.05), "{rows:?}");
    assert!(rows[4].1 >= 1.85, "{rows:?}");
}

#[test]
fn single_k_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = bcast(&[
        "sweep",
        "--graph",
        "diamond4",
        "--lambda",
        "1.5",
        "--horizon",
        "1000",
        "--ks",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = sweep_rows(&dir.path().join("run-sweep-seed1.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].0, 3);
}

#[test]
fn more_classes_help_on_a_random_graph() {
    let cap_out = stdout(&bcast(&["capacity", "--graph", "random(20,176,1)"]));
    let cap: usize = cap_out
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("capacity ")
        .parse()
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let lambda = format!("{}", 0.975 * cap as f64);
    let ks = format!("{},{}", (cap / 2).max(1), 2 * cap);
    let o = bcast(&[
        "sweep",
        "--graph",
        "random(20,176,1)",
        "--lambda",
        &lambda,
        "--horizon",
        "4000",
        "--ks",
        &ks,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = sweep_rows(&dir.path().join("run-sweep-seed1.csv"));
    assert!(rows[1].1 >= rows[0].1 - 0.05, "{rows:?}");
}

#[test]
fn config_problems_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[graph]\nsource = \"diamond4\"\n[sim]\npolicy = \"pi_kh\"\nhorizon = 100\nburn_in = 500\ntime_model = \"fast\"\n").unwrap();
    let o = bcast(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in ["lambda", "sim.k", "burn_in", "time_model"] {
        assert!(err.contains(needle), "missing {needle}: {err}");
    }
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        1,
        "no output before validation passes"
    );

    fs::write(&cfg, "[sim]\nlamda = 1.0\n").unwrap();
    let o = bcast(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn capability_limit_is_a_config_error() {
    let o = bcast(&["simulate", "--graph", "path(30)", "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("25"));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = bcast(&[
        "simulate",
        "--graph",
        "diamond4",
        "--lambda",
        "1",
        "--horizon",
        "10",
        "--out-dir",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn slotted_preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("d4-wireless.toml");
    let o = bcast(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--horizon",
        "5000",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
}
