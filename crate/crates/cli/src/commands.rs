use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use plankton_fde::analysis::{
    empirical_lipschitz, gronwall_bound_general_with_tol, gronwall_bound_ml, lipschitz_constants_with,
    DEFAULT_REL_TOL,
};
use plankton_fde::quad::{integrate_half_line, QuadOptions};
use plankton_fde::solver::{solve, solve_abm, solve_mild_picard, Method};
use plankton_fde::specfun::{mittag_leffler, mittag_leffler2, rgamma, zeta_density};
use plankton_fde::wellposed::{
    check_continuous_dependence_with, check_picard_envelope, check_positivity_and_box, check_uniqueness_with_steps,
    Status,
};
use plankton_fde::FractionalOrder64;

use crate::config::{self, Loaded};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Flags shared by every subcommand.
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub empirical: Option<usize>,
    pub tol: Option<f64>,
}

impl Options {
    fn load(&self) -> CliResult<Loaded> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
        config::load(path)
    }

    fn fingerprint(&self, command: &str, loaded: &Loaded) -> String {
        plankton_fde::fingerprint(&json!({
            "command": command,
            "config": loaded.config,
            "options": {"seed": self.seed, "empirical": self.empirical, "tol": self.tol},
        }))
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    fn write_json(&self, name: &str, value: &Value) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, &text)
    }
}

fn stamp(fingerprint: &str, mut body: Value) -> Value {
    let map = body.as_object_mut().expect("report is an object");
    map.insert("version".into(), VERSION.into());
    map.insert("config_fingerprint".into(), fingerprint.into());
    body
}

fn to_value<S: serde::Serialize>(v: &S) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn simulate(opts: &Options) -> CliResult<()> {
    let loaded = opts.load()?;
    let fp = opts.fingerprint("simulate", &loaded);
    let cfg = loaded.config.solver()?;
    let x0 = loaded.config.initial_state()?;
    let (traj, diag) = solve(&loaded.params, &x0, &cfg)?;
    let csv = opts.write("trajectory.csv", &traj.to_csv_string())?;
    let meta = stamp(
        &fp,
        json!({
            "trajectory_file": "trajectory.csv",
            "trajectory": to_value(&traj.meta()),
            "solver_config": to_value(&cfg),
            "solver_config_fingerprint": cfg.fingerprint(),
            "picard": diag.as_ref().map(to_value),
        }),
    );
    opts.write_json("run_meta.json", &meta)?;
    if !traj.roundoff_steps.is_empty() {
        eprintln!(
            "warning: {} grid points carry negative roundoff above -1e-12",
            traj.roundoff_steps.len()
        );
    }
    if let Some(d) = &diag {
        if !d.converged {
            eprintln!(
                "warning: Picard iteration stopped after {} iterations without reaching the tolerance",
                d.iterations_used
            );
        }
    }
    println!("wrote {} rows to {}", traj.states.len(), csv.display());
    Ok(())
}

pub fn lipschitz(opts: &Options) -> CliResult<()> {
    let loaded = opts.load()?;
    let fp = opts.fingerprint("lipschitz", &loaded);
    let bounds = loaded.config.state_box()?;
    let report = lipschitz_constants_with(&loaded.params, &bounds, loaded.config.lipschitz_variant)?;
    let mut doc = stamp(&fp, report.to_json());
    let samples = opts.empirical.or(loaded.config.empirical_samples);
    let mut certified = true;
    if let Some(n) = samples {
        let seed = opts.seed.or(loaded.config.seed).unwrap_or(0);
        let value = empirical_lipschitz(&loaded.params, &bounds, n, seed)?;
        certified = value <= report.l;
        doc["empirical"] = json!({
            "samples": n,
            "seed": seed,
            "value": value,
            "margin": report.l - value,
            "pass": certified,
        });
        println!("empirical ratio = {value} over {n} pairs (seed {seed})");
    }
    let path = opts.write_json("lipschitz_report.json", &doc)?;
    println!("L = {}", report.l);
    println!("wrote {}", path.display());
    if certified {
        Ok(())
    } else {
        Err(CliError::Certificate("sampled ratio exceeds the analytic L".into()))
    }
}

pub fn gronwall(opts: &Options) -> CliResult<()> {
    let loaded = opts.load()?;
    let fp = opts.fingerprint("gronwall", &loaded);
    let spec = loaded
        .config
        .gronwall
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `gronwall` section".into()))?;
    let problem = spec.problem()?;
    let t = spec.time();
    let tol = opts.tol.unwrap_or(DEFAULT_REL_TOL);
    let series = gronwall_bound_general_with_tol(&problem, t, spec.n_terms, tol)?;
    let closed_form = if problem.forcing.is_nondecreasing() {
        Some(gronwall_bound_ml(
            problem.forcing.value_at(t),
            problem.coefficient.value_at(t),
            problem.order,
            t,
        )?)
    } else {
        None
    };
    let doc = stamp(
        &fp,
        json!({
            "t": t,
            "beta": problem.order,
            "series": to_value(&series),
            "mittag_leffler": closed_form,
        }),
    );
    let path = opts.write_json("gronwall_report.json", &doc)?;
    println!("series bound = {} (remainder {:e}, {} terms)", series.value, series.remainder, series.terms);
    if let Some(v) = closed_form {
        println!("Mittag-Leffler bound = {v}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn wellposed(opts: &Options) -> CliResult<()> {
    let loaded = opts.load()?;
    let fp = opts.fingerprint("wellposed", &loaded);
    let c = &loaded.config;
    let p = &loaded.params;
    let cfg = c.solver()?;
    let x0 = c.initial_state()?;
    let bounds = c.state_box()?;
    let tol = opts.tol.unwrap_or(c.uniqueness_tol);
    let (np, na) = c
        .uniqueness_steps
        .map(|s| (s.picard, s.abm))
        .unwrap_or((cfg.n_steps, cfg.n_steps));

    let uniqueness = check_uniqueness_with_steps(p, &x0, &cfg, tol, np, na)?;

    let picard_cfg = cfg.with_method(Method::MildPicard)?.with_envelope_box(bounds);
    let (picard, diag) = solve_mild_picard(p, &x0, &picard_cfg)?;
    let abm = solve_abm(p, &x0, &cfg.with_method(Method::Abm)?)?;
    let box_picard = check_positivity_and_box(&picard, &bounds);
    let box_abm = check_positivity_and_box(&abm, &bounds);
    let envelope = check_picard_envelope(&diag);
    let envelope_status = if !box_picard.pass {
        Status::Void
    } else if envelope.pass {
        Status::Pass
    } else {
        Status::Fail
    };

    let dependence = check_continuous_dependence_with(p, &x0, &c.epsilons, &cfg, &bounds, c.direction)?;

    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    if !uniqueness.pass {
        failures.push(format!("uniqueness: distance {} exceeds {}", uniqueness.distance, uniqueness.tol));
    }
    match envelope_status {
        Status::Fail => failures.push(format!(
            "envelope: d_n above the envelope at n = {}",
            envelope.first_failure.unwrap_or_default()
        )),
        Status::Void => warnings.push("envelope: Picard trajectory leaves the box, certificate void".to_string()),
        Status::Pass => {}
    }
    if !diag.converged {
        warnings.push(format!("envelope: Picard stopped after {} iterations without converging", diag.iterations_used));
    }
    for item in &dependence.items {
        match item.status {
            Status::Fail => failures.push(format!(
                "dependence: deviation {} exceeds bound {} at epsilon {}",
                item.deviation, item.bound, item.epsilon
            )),
            Status::Void => warnings.push(format!(
                "dependence: trajectory leaves the box at epsilon {}, certificate void",
                item.epsilon
            )),
            Status::Pass => {}
        }
    }
    for (name, r) in [("mild_picard", &box_picard), ("abm", &box_abm)] {
        if let Some(v) = &r.first_violation {
            warnings.push(format!(
                "box: {name} trajectory leaves the box at step {} (x{} = {})",
                v.step, v.component, v.value
            ));
        }
    }

    let doc = stamp(
        &fp,
        json!({
            "status": if failures.is_empty() { "pass" } else { "fail" },
            "uniqueness": to_value(&uniqueness),
            "envelope": {
                "status": envelope_status,
                "report": to_value(&envelope),
                "differences": to_value(&diag.differences),
                "envelope": to_value(&diag.envelope),
                "iterations_used": diag.iterations_used,
            },
            "dependence": to_value(&dependence),
            "box": {"mild_picard": to_value(&box_picard), "abm": to_value(&box_abm)},
            "warnings": warnings,
            "failures": failures,
        }),
    );
    let path = opts.write_json("wellposed_report.json", &doc)?;
    println!("uniqueness distance = {:e} (tol {:e})", uniqueness.distance, uniqueness.tol);
    println!("envelope: {envelope_status:?}, {} iterations", diag.iterations_used);
    for item in &dependence.items {
        println!(
            "dependence eps = {:e}: deviation {:e}, bound {:e}, {:?}",
            item.epsilon, item.deviation, item.bound, item.status
        );
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certificate(failures.join("; ")))
    }
}

pub enum SpecfunCall {
    Ml { alpha: f64, z: f64 },
    Ml2 { alpha: f64, beta: f64, z: f64 },
    Zeta { alpha: f64, theta: f64 },
    ZetaCheck { alpha: f64 },
}

pub fn specfun(call: &SpecfunCall) -> CliResult<()> {
    match *call {
        SpecfunCall::Ml { alpha, z } => {
            check_order(alpha)?;
            println!("{}", mittag_leffler(alpha, z)?);
        }
        SpecfunCall::Ml2 { alpha, beta, z } => {
            check_order(alpha)?;
            println!("{}", mittag_leffler2(alpha, beta, z)?);
        }
        SpecfunCall::Zeta { alpha, theta } => {
            let order = FractionalOrder64::new(alpha)?;
            println!("{}", zeta_density(order, theta)?);
        }
        SpecfunCall::ZetaCheck { alpha } => zeta_check(alpha)?,
    }
    Ok(())
}

fn check_order(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 {
        Ok(())
    } else {
        Err(plankton_fde::Error::Domain(format!("order must be positive, got {alpha}")).into())
    }
}

/// Normalization, first moment and Laplace transform at z = 1 of ζ_α by
/// quadrature, against 1, 1/Γ(1+α) and E_α(-1).
fn zeta_check(alpha: f64) -> CliResult<()> {
    let order = FractionalOrder64::new(alpha)?;
    zeta_density(order, 1.0)?;
    let opts = QuadOptions::new(1e-12, 1e-12);
    let mut failure = None;
    let mut integral = |weight: &dyn Fn(f64) -> f64| -> f64 {
        let r = integrate_half_line(
            |theta: f64| match zeta_density(order, theta) {
                Ok(v) => v * weight(theta),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            2.0,
            &opts,
        );
        match r {
            Ok(r) => r.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let rows = [
        ("normalization", integral(&|_| 1.0), 1.0),
        ("first_moment", integral(&|t| t), rgamma(1.0 + alpha)),
        ("laplace_at_1", integral(&|t| (-t).exp()), mittag_leffler(alpha, -1.0)?),
    ];
    if let Some(e) = failure {
        return Err(e.into());
    }
    println!("{:<14} {:>22} {:>22} {:>10}", "quantity", "quadrature", "expected", "abs_error");
    for (name, got, want) in rows {
        println!("{name:<14} {got:>22.16} {want:>22.16} {:>10.2e}", (got - want).abs());
    }
    Ok(())
}

pub fn ensure_exists(path: &Path) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{} does not exist", path.display())))
    }
}
