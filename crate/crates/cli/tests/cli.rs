use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const ONES: &str = r#"{"c0":1,"c1":1,"c2":1,"c3":1,"c4":1,"h":1,"H":1,"delta":1,"v":1,"B":1,
"beta_pred":1,"xi":1,"m":1,"gamma":1,"sigma":1,"mu":1}"#;

const LINEAR: &str = r#"{"c0":1,"c1":1,"c2":1,"c3":1,"c4":1,"h":1,"H":0,"delta":0,"v":0,"B":0,
"beta_pred":0,"xi":0,"m":1,"gamma":0,"sigma":1,"mu":1}"#;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("ones.json"), ONES).unwrap();
        fs::write(dir.path().join("linear.json"), LINEAR).unwrap();
        Sandbox { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn run(&self, config: &Path, out: &str, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_plankton-fde"))
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(self.path(out))
            .args(args)
            .output()
            .unwrap()
    }

    fn json(&self, out: &str, file: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.path(out).join(file)).unwrap()).unwrap()
    }
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plankton-fde")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BASE: &str = r#"{"params": "ones.json", "initial": [1, 1, 1], "alpha": 0.8, "n_steps": 64}"#;

#[test]
fn simulate_writes_trajectory_and_metadata() {
    let sb = Sandbox::new();
    let cfg = sb.config("run.json", BASE);
    let o = sb.run(&cfg, "out", &["simulate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(sb.path("out/trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 66);
    assert_eq!(lines[0], "t,x1,x2,x3");
    assert_eq!(lines[1], "0,1,1,1");
    assert!(lines[65].starts_with("1,"));
    let meta = sb.json("out", "run_meta.json");
    assert_eq!(meta["version"], "v0.1.0");
    assert_eq!(meta["config_fingerprint"].as_str().unwrap().len(), 16);
    assert_eq!(meta["trajectory"]["n_steps"], 64);
    assert_eq!(meta["trajectory"]["method"], "abm");
}

#[test]
fn linear_run_follows_mittag_leffler_decay() {
    let sb = Sandbox::new();
    for method in ["abm", "mild_picard"] {
        let cfg = sb.config(
            "lin.json",
            &format!(r#"{{"params": "linear.json", "initial": [1, 1, 1], "alpha": 0.8, "n_steps": 512, "method": "{method}"}}"#),
        );
        let o = sb.run(&cfg, method, &["simulate"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let csv = fs::read_to_string(sb.path(method).join("trajectory.csv")).unwrap();
        let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        let exact = plankton_fde::specfun::mittag_leffler(0.8, -1.0).unwrap();
        for v in &last[1..] {
            assert!((v - exact).abs() < 1e-4, "{method}: {v} vs {exact}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let sb = Sandbox::new();
    let cfg = sb.config("run.json", BASE);
    for (args, files) in [
        (vec!["simulate"], vec!["trajectory.csv", "run_meta.json"]),
        (vec!["lipschitz", "--empirical", "20000", "--seed", "3"], vec!["lipschitz_report.json"]),
        (vec!["wellposed"], vec!["wellposed_report.json"]),
    ] {
        assert_eq!(code(&sb.run(&cfg, "a", &args)), 0);
        assert_eq!(code(&sb.run(&cfg, "b", &args)), 0);
        for f in files {
            assert_eq!(fs::read(sb.path("a").join(f)).unwrap(), fs::read(sb.path("b").join(f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn fingerprint_ignores_where_parameters_live() {
    let sb = Sandbox::new();
    let by_path = sb.config("p.json", BASE);
    let inline = sb.config("i.json", &BASE.replace("\"ones.json\"", ONES));
    let changed = sb.config("c.json", &BASE.replace("0.8", "0.7"));
    for (cfg, out) in [(&by_path, "p"), (&inline, "i"), (&changed, "c")] {
        assert_eq!(code(&sb.run(cfg, out, &["simulate"])), 0);
    }
    let fp = |out| sb.json(out, "run_meta.json")["config_fingerprint"].clone();
    assert_eq!(fp("p"), fp("i"));
    assert_ne!(fp("p"), fp("c"));
}

#[test]
fn lipschitz_reports() {
    let sb = Sandbox::new();
    let cfg = sb.config("l.json", r#"{"params": "ones.json", "box": [1, 1, 1]}"#);
    let o = sb.run(&cfg, "one", &["lipschitz", "--empirical", "10000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = sb.json("one", "lipschitz_report.json");
    assert_eq!(r["L"], 9.0);
    assert_eq!(r["K8"], 3.0);
    assert_eq!(r["box"]["M1"], 1.0);
    assert_eq!(r["variant"], "derived");
    assert_eq!(r["empirical"]["pass"], true);
    assert_eq!(r["empirical"]["seed"], 7);

    let zero = sb.config("z.json", r#"{"params": "linear.json"}"#);
    assert_eq!(code(&sb.run(&zero, "zero", &["lipschitz"])), 0);
    let r = sb.json("zero", "lipschitz_report.json");
    assert_eq!(r["L"], 0.0);
    assert!(r.get("empirical").is_none());
}

#[test]
fn wellposed_defaults_pass() {
    let sb = Sandbox::new();
    let cfg = sb.config("w.json", BASE);
    let o = sb.run(&cfg, "w", &["wellposed"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = sb.json("w", "wellposed_report.json");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["uniqueness"]["pass"], true);
    assert_eq!(r["envelope"]["status"], "pass");
    assert_eq!(r["dependence"]["items"].as_array().unwrap().len(), 3);
    assert!(r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn wellposed_with_mixed_step_counts() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "w.json",
        r#"{"params": "ones.json", "initial": [1, 1, 1], "alpha": 0.9, "n_steps": 64,
            "uniqueness_steps": {"picard": 64, "abm": 256}}"#,
    );
    let o = sb.run(&cfg, "w", &["wellposed"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = sb.json("w", "wellposed_report.json");
    assert_eq!(r["uniqueness"]["abm_steps"], 256);
    assert_eq!(r["uniqueness"]["picard_steps"], 64);
}

#[test]
fn leaving_the_box_voids_without_failing() {
    let sb = Sandbox::new();
    let cfg = sb.config(
        "w.json",
        r#"{"params": "ones.json", "initial": [1, 1, 1], "alpha": 0.8, "n_steps": 64,
            "epsilons": [1.5], "direction": {"axis": 1}}"#,
    );
    let o = sb.run(&cfg, "w", &["wellposed"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = sb.json("w", "wellposed_report.json");
    assert_eq!(r["dependence"]["items"][0]["status"], "void");
    assert!(!r["warnings"].as_array().unwrap().is_empty());
    assert!(stderr(&o).contains("void"));
}

#[test]
fn failed_certificate_exits_three() {
    let sb = Sandbox::new();
    let cfg = sb.config("w.json", BASE);
    let o = sb.run(&cfg, "w", &["wellposed", "--tol", "1e-14"]);
    assert_eq!(code(&o), 3);
    assert_eq!(sb.json("w", "wellposed_report.json")["status"], "fail");
}

#[test]
fn gronwall_report_and_truncation_failure() {
    let sb = Sandbox::new();
    let ok = sb.config(
        "g.json",
        r#"{"params": "ones.json", "gronwall": {"h": 1.5, "q": 2.0, "beta": 1.0, "horizon": 1}}"#,
    );
    let o = sb.run(&ok, "g", &["gronwall"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = sb.json("g", "gronwall_report.json");
    let want = 1.5 * 2.0f64.exp();
    assert!((r["series"]["value"].as_f64().unwrap() - want).abs() <= 1e-8 * want);
    assert!((r["mittag_leffler"].as_f64().unwrap() - want).abs() <= 1e-12 * want);

    let short = sb.config(
        "s.json",
        r#"{"params": "ones.json", "gronwall": {"h": 1.0, "q": 2.0, "beta": 0.5, "horizon": 1}}"#,
    );
    let o = sb.run(&short, "s", &["gronwall"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("n_terms"));
    let long = sb.config(
        "l.json",
        r#"{"params": "ones.json", "gronwall": {"h": 1.0, "q": 2.0, "beta": 0.5, "horizon": 1, "n_terms": 200}}"#,
    );
    assert_eq!(code(&sb.run(&long, "l", &["gronwall"])), 0);
}

#[test]
fn input_errors_exit_one() {
    let sb = Sandbox::new();
    let no_mu = ONES.replace(",\"mu\":1", "");
    fs::write(sb.path("bad.json"), no_mu).unwrap();
    let cfg = sb.config("b.json", &BASE.replace("ones.json", "bad.json"));
    let o = sb.run(&cfg, "b", &["simulate"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("mu"), "{}", stderr(&o));

    let unknown = sb.config("u.json", &BASE.replace("\"n_steps\"", "\"steps\""));
    assert_eq!(code(&sb.run(&unknown, "u", &["simulate"])), 1);

    let negative = sb.config("n.json", &BASE.replace("[1, 1, 1]", "[1, -1, 1]"));
    assert_eq!(code(&sb.run(&negative, "n", &["simulate"])), 1);

    let bad_alpha = sb.config("a.json", &BASE.replace("0.8", "1.5"));
    assert_eq!(code(&sb.run(&bad_alpha, "a", &["simulate"])), 1);

    assert_eq!(code(&sb.run(&sb.path("missing.json"), "m", &["simulate"])), 1);
    assert_eq!(code(&bin(&["simulate"])), 1);
    assert_eq!(code(&bin(&["frobnicate"])), 1);
    assert_eq!(code(&bin(&["--help"])), 0);
}

#[test]
fn special_function_commands() {
    let o = bin(&["specfun", "ml", "1", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "2.718281828459045");

    let o = bin(&["specfun", "ml", "0.5", "-1"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.427_583_576_155_807).abs() < 1e-14);

    let o = bin(&["specfun", "ml2", "1", "2", "-4"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (-4.0f64).exp_m1() / -4.0).abs() < 1e-14);

    let o = bin(&["specfun", "zeta", "0.5", "1"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (-0.25f64).exp() / std::f64::consts::PI.sqrt()).abs() < 1e-13);

    let o = bin(&["specfun", "zeta-check", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("normalization"));

    assert_eq!(code(&bin(&["specfun", "ml", "0", "1"])), 1);
    assert_eq!(code(&bin(&["specfun", "zeta-check", "1"])), 1);
    assert_eq!(code(&bin(&["specfun", "zeta", "0.5", "-2"])), 1);
}
