use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
[fields.paper]
type = "automorphic"
truncation = 2

[fields.big]
type = "automorphic"
truncation = 14

[fields.pendulum]
type = "planar"
kind = "pendulum"
k = 1.0

[fields.saddle]
type = "planar"
kind = "saddle"

[fields.dipole]
type = "sphere"
coefficients = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]

[regions.window]
x = [-4.0, 4.0]
y = [-3.0, 3.0]

[regions.unit]
x = [-1.0, 1.0]
y = [-1.0, 1.0]
"#;

struct Env {
    dir: tempfile::TempDir,
}

impl Env {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("cfg.toml"), CONFIG).unwrap();
        Env { dir }
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }

    /// Runs with the shared config, writing into `out`.
    fn run(&self, out: &str, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_autoflow"))
            .arg("--config")
            .arg(self.path("cfg.toml"))
            .arg("--out")
            .arg(self.path(out))
            .args(args)
            .output()
            .unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn heegaard_examples() {
    let env = Env::new();
    let o = env.run("o", &["heegaard", "--indices", "-1,-1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "{1,2}\n"));
    let o = env.run("o", &["heegaard", "--indices", ""]);
    assert_eq!(stdout(&o), "{1}\n");
    let o = env.run("o", &["heegaard", "--twists", "a1 a1 a1 a1 a1", "--genus", "1"]);
    assert_eq!(stdout(&o), "Z/5\n");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(env.path("o/heegaard.json")).unwrap()).unwrap();
    assert_eq!(report["h1"]["torsion"], serde_json::json!([5]));
}

#[test]
fn input_errors_exit_2() {
    let env = Env::new();
    for args in [
        &["synth", "missing"][..],
        &["synth", "pendulum"],
        &["heegaard", "--twists", "a1 x9"],
        &["heegaard", "--indices", "1,two"],
        &["heegaard"],
        &["zeros", "pendulum", "--region", "nowhere"],
        &["--tol", "bogus=1", "demo", "pendulum"],
        &["--tol", "zero_tol=abc", "demo", "pendulum"],
        &["eval", "pendulum", "1;2"],
        &["surgery", "no-such-plan.json"],
        &["extend3", "pendulum"],
        &["frobnicate"],
    ] {
        let o = env.run("o", args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    fs::write(env.path("broken.toml"), "[fields.a]\ntype = \"automorphic\"\nbogus = 1\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_autoflow"))
        .args(["--config", env.path("broken.toml").to_str().unwrap(), "synth", "a"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn surgery_plans() {
    let env = Env::new();
    let good = r#"{
        "inv1": {"genus": 1, "orientable": true, "equilibria": [{"n_e": 0, "n_h": 4}, {"n_e": 0, "n_h": 0}]},
        "inv2": {"genus": 0, "orientable": true, "equilibria": [{"n_e": 0, "n_h": 0}, {"n_e": 0, "n_h": 0}]},
        "plan": {"mode": "dual", "removed1": {"n_e": 0, "n_h": 0}, "removed2": {"n_e": 0, "n_h": 0}}
    }"#;
    fs::write(env.path("good.json"), good).unwrap();
    let o = env.run("o", &["surgery", env.path("good.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(env.path("o/surgery.json")).unwrap()).unwrap();
    assert_eq!(report["audit"]["pass"], true);
    assert_eq!(report["result"]["genus"], 1);

    // a saddle is not the dual of a saddle
    let bad = good.replace(r#""removed1": {"n_e": 0, "n_h": 0}"#, r#""removed1": {"n_e": 0, "n_h": 4}"#);
    fs::write(env.path("bad.json"), bad.replace(r#""removed2": {"n_e": 0, "n_h": 0}"#, r#""removed2": {"n_e": 0, "n_h": 4}"#))
        .unwrap();
    let o = env.run("o2", &["surgery", env.path("bad.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!env.path("o2").exists());
}

#[test]
fn numerical_failures_exit_3() {
    let env = Env::new();
    let o = env.run("o", &["flow", "paper", "--from", "-2,3", "--time", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = env.run("o", &["synth", "big"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("200000"));
}

#[test]
fn commands_succeed() {
    let env = Env::new();
    let o = env.run("o", &["zeros", "pendulum", "--region", "window", "--chi", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(fs::read_to_string(env.path("o/zeros_pendulum.csv")).unwrap().lines().count() == 4);
    let o = env.run("o", &["flow", "pendulum", "--from", "0.5,0", "--time", "2", "--region", "window"]);
    assert!(stdout(&o).starts_with("TimeLimit"));
    let o = env.run("o", &["portrait", "saddle", "--region", "unit"]);
    assert_eq!(stdout(&o), "1 zeros marked\n");
    let o = env.run("o", &["synth", "paper"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = env.run("o", &["extend3", "dipole", "--samples", "2000"]);
    assert!(stdout(&o).contains("0 interior hits"));
    let o = env.run("o", &["eval", "saddle", "0.5,-0.5"]);
    assert!(stdout(&o).contains("\"value\""));
}

#[test]
fn outputs_are_byte_identical() {
    let env = Env::new();
    for out in ["a", "b"] {
        for args in [
            &["demo", "pendulum"][..],
            &["portrait", "saddle", "--region", "unit"],
            &["synth", "paper"],
            &["zeros", "pendulum", "--region", "window"],
            &["flow", "pendulum", "--from", "1,0.5", "--time", "3"],
            &["--seed", "7", "extend3", "dipole", "--samples", "5000"],
            &["heegaard", "--indices", "-1,-1,1,2"],
        ] {
            let o = env.run(out, args);
            assert_eq!(code(&o), 0, "{args:?}");
        }
    }
    let a = read_dir_sorted(&env.path("a"));
    assert_eq!(a.len(), 12);
    assert_eq!(a, read_dir_sorted(&env.path("b")));
}
