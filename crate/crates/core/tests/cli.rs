//! End-to-end tests of the `radgas` binary: exit codes, files on disk,
//! determinism and restart equivalence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use radgas::cli::{CHECKPOINT_FILE, CONFIG_FILE, DIAGNOSTICS_FILE, OUTPUT_DIR_ENV};
use radgas::io;

fn radgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radgas"))
        .args(args)
        .env_remove(OUTPUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path, extra: &str) -> String {
    format!(
        "[grid]\nL = 8\nN = 161\n[scenario]\nkind = gaussian\n{extra}\n[time]\nt_end = 0.5\n[output]\ndiag_interval = 0.05\nsnap_interval = 0.25\ndir = {}\n",
        dir.display()
    )
}

fn write_config(root: &Path, name: &str, text: &str) -> PathBuf {
    let p = root.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn equilibrium_run_writes_equilibrium_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = small_config(&out, "").replace("kind = gaussian", "kind = equilibrium");
    let cfg = write_config(tmp.path(), "eq.txt", &text);
    let o = radgas(&["run", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let records = io::read_diagnostics(&out.join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(records.len(), 11);
    for r in &records {
        assert_eq!((r.vmin, r.vmax, r.thetamin, r.thetamax), (1.0, 1.0, 1.0, 1.0));
        assert_eq!((r.zmin, r.zmax, r.lyapunov, r.reactant_mass), (0.0, 0.0, 0.0, 0.0));
    }
    for i in 0..3 {
        let [x, v, u, theta, z] = io::read_snapshot(&io::snapshot_path(&out, i)).unwrap();
        assert_eq!(x.len(), 161);
        assert!(v.iter().chain(&theta).all(|&f| f == 1.0));
        assert!(u.iter().chain(&z).all(|&f| f == 0.0));
    }
    assert!(out.join(CHECKPOINT_FILE).exists());
    assert!(out.join(CONFIG_FILE).exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.txt", "[grid]\nN = 100\nspeed = 3\n");
    let o = radgas(&["run", arg(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let cfl = write_config(tmp.path(), "cfl.txt", "[time]\ncfl = 1.5\n");
    assert_eq!(radgas(&["run", arg(&cfl)]).status.code(), Some(2));
    assert_eq!(radgas(&["run", "/nonexistent/config.txt"]).status.code(), Some(2));
    assert_eq!(radgas(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(radgas(&["verify", arg(&cfl)]).status.code(), Some(2));
}

#[test]
fn unstable_cfl_exits_3_and_keeps_partial_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "c.txt", &small_config(&out, ""));
    let o = radgas(&["run", arg(&cfg), "--unstable-cfl", "40"]);
    assert_eq!(o.status.code(), Some(3));
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.contains("blow-up at t ="), "{log}");
    let text = fs::read_to_string(out.join(DIAGNOSTICS_FILE)).unwrap();
    assert!(text.lines().count() >= 2, "header and the initial row survive");
    assert!(!out.join(CHECKPOINT_FILE).exists());
}

#[test]
fn identical_configs_give_identical_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, name) in [(&a, "a.txt"), (&b, "b.txt")] {
        let cfg = write_config(tmp.path(), name, &small_config(dir, "seed = 7\nkind = seeded_random").replace("kind = gaussian\n", ""));
        assert_eq!(radgas(&["run", arg(&cfg)]).status.code(), Some(0));
    }
    let read = |d: &Path| fs::read(d.join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(fs::read(a.join(CHECKPOINT_FILE)).unwrap(), fs::read(b.join(CHECKPOINT_FILE)).unwrap());
}

#[test]
fn resume_reproduces_the_uninterrupted_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (full, part) = (tmp.path().join("full"), tmp.path().join("part"));
    let cfg = write_config(tmp.path(), "full.txt", &small_config(&full, ""));
    assert_eq!(radgas(&["run", arg(&cfg)]).status.code(), Some(0));
    let half = small_config(&part, "").replace("t_end = 0.5", "t_end = 0.25");
    let cfg = write_config(tmp.path(), "part.txt", &half);
    assert_eq!(radgas(&["run", arg(&cfg)]).status.code(), Some(0));

    let ckpt = part.join(CHECKPOINT_FILE);
    let o = radgas(&["resume", arg(&ckpt), "--t-end", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(full.join(DIAGNOSTICS_FILE)).unwrap(),
        fs::read(part.join(DIAGNOSTICS_FILE)).unwrap()
    );
    assert_eq!(
        io::checkpoint_read(&full.join(CHECKPOINT_FILE)).unwrap(),
        io::checkpoint_read(&ckpt).unwrap()
    );
    let snap = |d: &Path| io::read_snapshot(&io::snapshot_path(d, 2)).unwrap();
    assert_eq!(snap(&full), snap(&part));

    // Going backwards is a usage error.
    assert_eq!(radgas(&["resume", arg(&ckpt), "--t-end", "0.1"]).status.code(), Some(2));
}

#[test]
fn output_dir_comes_from_the_environment_when_set() {
    let tmp = tempfile::tempdir().unwrap();
    let (configured, redirected) = (tmp.path().join("configured"), tmp.path().join("redirected"));
    let cfg = write_config(tmp.path(), "c.txt", &small_config(&configured, ""));
    let o = Command::new(env!("CARGO_BIN_EXE_radgas"))
        .args(["run", arg(&cfg)])
        .env(OUTPUT_DIR_ENV, &redirected)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(redirected.join(DIAGNOSTICS_FILE).exists());
    assert!(!configured.exists());
}

#[test]
fn sweep_reports_orders_and_rejects_one_level() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let text = small_config(&out, "").replace("N = 161", "N = 41").replace("kind = gaussian", "kind = equilibrium");
    let cfg = write_config(tmp.path(), "s.txt", &text);
    assert_eq!(radgas(&["sweep", arg(&cfg), "--levels", "1"]).status.code(), Some(2));
    let o = radgas(&["sweep", arg(&cfg), "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let table = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout), table);
    let row: Vec<&str> = table.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[1], "81");
    assert_eq!(&row[8..11], ["exact", "exact", "exact"]);
}

/// A cheap grid keeps the verify runs short; the thresholds are those of
/// the reference scales, so only the verdicts that do not depend on the
/// grid are asserted.
const CHEAP_GRID: &str = "[grid]\nL = 8\nN = 64\n";

#[test]
fn verify_flags_the_pressure_mutation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "m.txt", &format!("[params]\nmutation = flip_radiation_pressure\n{CHEAP_GRID}"));
    let o = radgas(&["verify", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(4));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("1    thermodynamic consistency [FAIL]"), "{table}");
}

#[test]
fn verify_tables_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "v.txt", CHEAP_GRID);
    let first = radgas(&["verify", arg(&cfg)]);
    let second = radgas(&["verify", arg(&cfg)]);
    assert!(matches!(first.status.code(), Some(0) | Some(4)));
    assert_eq!(first.stdout, second.stdout);
    let table = String::from_utf8_lossy(&first.stdout);
    for id in 1..=12 {
        assert!(table.lines().any(|l| l.starts_with(&format!("{id:<4} "))), "criterion {id} missing");
    }
    assert!(table.contains("9    proof exponents [PASS]"));
    assert!(table.contains("11   determinism and persistence [PASS]"));
}
