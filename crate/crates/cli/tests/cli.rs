use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn glnematic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glnematic"))
        .args(args)
        .env_remove("GLNEMATIC_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn quick_minimize(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "minimize",
        "--epsilon",
        "0.1",
        "--n",
        "129",
        "--margin",
        "1.5",
        "--seeds",
        "thomas_fermi random(1)",
        "--out_dir",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    glnematic(&args)
}

#[test]
fn help_lists_every_key_with_its_default() {
    for (cmd, keys) in [
        ("minimize", &["epsilon", "max_iters", "residual_tol", "step_rule", "seeds", "amp_tol", "out_dir"][..]),
        ("radial", &["kind", "r_max", "m"][..]),
        ("painleve", &["alpha", "branch", "s_half", "scheme"][..]),
        ("analyze", &["input", "tf_r_frac", "match_budget"][..]),
        ("sweep", &["epsilons", "scaling", "b_values", "continuation", "keep_fields"][..]),
        ("compare", &["theta", "s1_min", "n2"][..]),
    ] {
        let o = glnematic(&[cmd, "--help"]);
        assert!(o.status.success());
        let text = String::from_utf8_lossy(&o.stdout);
        for k in keys {
            assert!(text.contains(&format!("--{k}")), "{cmd} help lacks {k}");
        }
        let flags = text.matches("--").count();
        let defaults = text.matches("[default: ").count();
        // every key flag carries a default; --config and --threads do not
        assert!(defaults + 3 >= flags, "{cmd}: {defaults} defaults for {flags} flags");
    }
}

#[test]
fn minimize_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = quick_minimize(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["field.glnf", "field.meta", "report.txt", "modulus.ppm", "energy.csv", "config.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let meta = fs::read_to_string(dir.path().join("field.meta")).unwrap();
    assert!(meta.contains("converged = true"));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("phase = NoZero"), "{report}");
}

#[test]
fn nonconvergence_exits_two_and_still_writes_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = quick_minimize(dir.path(), &["--max_iters", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(dir.path().join("field.glnf").exists());
    let meta = fs::read_to_string(dir.path().join("field.meta")).unwrap();
    assert!(meta.contains("converged = false"));
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");

    fs::write(&cfg, "# comment\nepsilon 0.05\n").unwrap();
    let o = glnematic(&["minimize", "--config", cfg.to_str().unwrap(), "--out_dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilon"), "{}", stderr(&o));

    fs::write(&cfg, "epsilon = 0.05\nepsilonn = 0.1\n").unwrap();
    let o = glnematic(&["minimize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilonn"), "{}", stderr(&o));

    fs::write(&cfg, "epsilon = small\n").unwrap();
    let o = glnematic(&["minimize", "--config", cfg.to_str().unwrap(), "--out_dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilon"), "{}", stderr(&o));

    let o = glnematic(&["minimize", "--no_such_flag", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "alpha = 5\nbranch = minus\n").unwrap();
    let out = dir.path().join("p");
    let o = glnematic(&[
        "painleve",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "0",
        "--branch",
        "plus",
        "--out_dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let used = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(used.contains("alpha = 0\n") && used.contains("branch = plus\n"), "{used}");
}

#[test]
fn painleve_plus_branch_is_positive() {
    let dir = tempfile::tempdir().unwrap();
    let o = glnematic(&["painleve", "--out_dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("painleve.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('s'))
        .map(|l| {
            let (s, y) = l.split_once(',').unwrap();
            (s.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2001);
    // the last node carries the Dirichlet value y(S) = 0
    assert!(rows[..2000].iter().all(|(_, y)| *y > 0.0));
    assert!(rows[2000].1 >= 0.0);
}

#[test]
fn radial_vortex_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = glnematic(&["radial", "--kind", "vortex", "--m", "5001", "--out_dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    let slope: f64 = text.split("slope_at_origin ").nth(1).unwrap().trim().parse().unwrap();
    assert!((slope - 0.5832).abs() < 2e-3, "{slope}");
    assert!(dir.path().join("profile.csv").exists());
}

#[test]
fn analyze_and_compare_on_a_stored_field() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = quick_minimize(&run, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let field = run.join("field.glnf");

    let out = dir.path().join("an");
    let o = glnematic(&[
        "analyze",
        "--input",
        field.to_str().unwrap(),
        "--epsilon",
        "0.1",
        "--out_dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("phase = NoZero"));
    assert!(out.join("zeros.csv").exists() && out.join("modulus.ppm").exists());

    let out = dir.path().join("cmp");
    let o = glnematic(&[
        "compare",
        "--input",
        field.to_str().unwrap(),
        "--epsilon",
        "0.1",
        "--s1_min",
        "-2",
        "--s1_max",
        "2",
        "--s2_min",
        "-0.5",
        "--s2_max",
        "0.5",
        "--out_dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cmp = fs::read_to_string(out.join("compare.txt")).unwrap();
    assert!(cmp.contains("layer_sup_rel_error"));
    assert_eq!(fs::read_to_string(out.join("layer.csv")).unwrap().lines().count(), 1 + 61 * 21);

    let o = glnematic(&["analyze", "--out_dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("input"));
}

fn sweep(out: &Path, threads: &str) -> Output {
    glnematic(&[
        "sweep",
        "--threads",
        threads,
        "--epsilons",
        "0.1",
        "--scaling",
        "raw",
        "--b_values",
        "0,1",
        "--seeds",
        "thomas_fermi vortex(0,0,+1) random(4)",
        "--n",
        "129",
        "--margin",
        "1.5",
        "--out_dir",
        out.to_str().unwrap(),
    ])
}

#[test]
fn sweep_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("t1"), dir.path().join("t3"));
    let o = sweep(&a, "1");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = sweep(&b, "3");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ca = fs::read(a.join("sweep.csv")).unwrap();
    let cb = fs::read(b.join("sweep.csv")).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 2);
    assert!(a.join("phase.gp").exists());
}

#[test]
fn threads_env_fallback_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_glnematic"))
        .args(["painleve", "--out_dir", "/nonexistent/never"])
        .env("GLNEMATIC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GLNEMATIC_THREADS"));
}
