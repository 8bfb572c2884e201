use std::path::Path;
use std::process::{Command, Output};

use stochtame::io::read_trajectory;

const HEAT: &str = r#"
seed = 1

[model]
kind = "heat"
dim = 1
resolution = 32
params = { nu = 1.0 }

[initial]
space = "F0"
field = { type = "sine", amplitude = 1.0 }

[stepper]
scheme = "rk4_deterministic"
dt = 1e-3
t_end = 1.0
save_every = 100
"#;

const NOISY: &str = r#"
seed = 1

[model]
kind = "burgers1d"
resolution = 64

[initial]
space = "F0"
field = { type = "sine", amplitude = 0.5 }

[noise]
theta = 2.0
alpha = 1.5
case = "I"

[stepper]
scheme = "milstein"
t_end = 0.2
save_every = 20
"#;

fn stochtame(dir: &Path, args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stochtame"));
    cmd.current_dir(dir).args(args).env_remove("STOCHTAME_SEED");
    if let Some(s) = env_seed {
        cmd.env("STOCHTAME_SEED", s);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn heat_simulate_matches_exact_decay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "heat.toml", HEAT);
    let o = stochtame(dir.path(), &["simulate", &cfg, "--out", "run", "--quiet"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows, _) = read_trajectory(&dir.path().join("run/trajectory.jsonl")).unwrap();
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((last.t - 1.0).abs() < 1e-12);
    let want = (-1.0f64).exp() * first.norm_g;
    assert!((last.norm_g - want).abs() <= 1e-6, "{} vs {want}", last.norm_g);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "noisy.toml", NOISY);
    let run = |out: &str, seed: &str| {
        let o = stochtame(dir.path(), &["simulate", &cfg, "--seed", seed, "--out", out, "--quiet"], None);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join(out).join("trajectory.jsonl")).unwrap()
    };
    let a = run("a", "17");
    assert_eq!(a, run("b", "17"));
    assert_ne!(a, run("c", "18"));
}

#[test]
fn seed_precedence_is_flag_then_env_then_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "noisy.toml", NOISY);
    let seed_of = |args: &[&str], env: Option<&str>| {
        let mut all = vec!["simulate", cfg.as_str(), "--quiet"];
        all.extend_from_slice(args);
        let o = stochtame(dir.path(), &all, env);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let out = all[all.iter().position(|a| *a == "--out").unwrap() + 1];
        read_trajectory(&dir.path().join(out).join("trajectory.jsonl")).unwrap().0.seed
    };
    assert_eq!(seed_of(&["--out", "a"], None), 1);
    assert_eq!(seed_of(&["--out", "b"], Some("5")), 5);
    assert_eq!(seed_of(&["--out", "c", "--seed", "9"], Some("5")), 9);
}

#[test]
fn trivial_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochtame(dir.path(), &["verify", "--suite", "trivial"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() >= 8 && text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochtame(dir.path(), &["simulate"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = stochtame(dir.path(), &["simulate", "missing.toml"], None);
    assert!(!o.status.success());
    let bad = write(dir.path(), "bad.toml", &NOISY.replace("resolution = 64", "resolution = 64\nfoo = 1"));
    let o = stochtame(dir.path(), &["simulate", &bad], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("foo"));
}

#[test]
fn table_commands_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochtame(dir.path(), &["scalefn", "--out", "s", "--quiet"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("s/scalefn.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    let o = stochtame(dir.path(), &["gbm", "--paths", "200", "--out", "g", "--quiet"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("g/gbm.json").exists());
}
