//! Integrators for d^α x = A x + f(x), x(0) = x0 on a uniform grid over
//! [0, T]: Picard iteration of the mild formulation, the fractional
//! Adams–Bashforth–Moulton predictor–corrector, and classical RK4 at α = 1.

mod abm;
mod picard;
mod rk4;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use abm::solve_abm;
pub use picard::{picard_envelope, solve_mild_picard, PicardDiagnostics};
pub use rk4::solve_rk4_classical;

use crate::analysis::StateBox;
use crate::error::{Error, Result};
use crate::model::{ModelParams, SignStatus, State};
use crate::num::Real;
use crate::specfun::{rgamma, FractionalOrder};

pub const MIN_STEPS: usize = 8;
pub const DEFAULT_PICARD_MAX_ITER: usize = 30;
pub const DEFAULT_PICARD_TOL: f64 = 1e-10;
pub const DEFAULT_ABM_STARTUP_SUBSTEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MildPicard,
    Abm,
    Rk4Classical,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::MildPicard => "mild_picard",
            Method::Abm => "abm",
            Method::Rk4Classical => "rk4_classical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    pub order: FractionalOrder<T>,
    pub horizon: T,
    pub n_steps: usize,
    pub method: Method,
    pub picard_max_iter: usize,
    pub picard_tol: T,
    /// K in M = αKL‖x0‖₁; `None` means 1/Γ(1+α).
    pub envelope_constant_k: Option<T>,
    /// Box for the L in M; `None` means the componentwise sup of the final
    /// iterate.
    pub envelope_box: Option<StateBox<T>>,
    /// Sub-intervals used to resolve the first ABM step, where the t^α
    /// behaviour of the solution is least resolved. The fine values stay in
    /// the memory integral of later steps; 1 gives the plain scheme.
    pub abm_startup_substeps: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(alpha: T, horizon: T, n_steps: usize, method: Method) -> Result<Self> {
        let cfg = Self {
            order: FractionalOrder::new(alpha)?,
            horizon,
            n_steps,
            method,
            picard_max_iter: DEFAULT_PICARD_MAX_ITER,
            picard_tol: T::lit(DEFAULT_PICARD_TOL),
            envelope_constant_k: None,
            envelope_box: None,
            abm_startup_substeps: DEFAULT_ABM_STARTUP_SUBSTEPS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_method(mut self, method: Method) -> Result<Self> {
        self.method = method;
        self.validate()?;
        Ok(self)
    }

    pub fn with_steps(mut self, n_steps: usize) -> Result<Self> {
        self.n_steps = n_steps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_picard(mut self, max_iter: usize, tol: T) -> Result<Self> {
        self.picard_max_iter = max_iter;
        self.picard_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_envelope_constant(mut self, k: T) -> Result<Self> {
        self.envelope_constant_k = Some(k);
        self.validate()?;
        Ok(self)
    }

    pub fn with_abm_startup(mut self, substeps: usize) -> Result<Self> {
        self.abm_startup_substeps = substeps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_envelope_box(mut self, bounds: StateBox<T>) -> Self {
        self.envelope_box = Some(bounds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |name: &str, reason: String| Error::InvalidParameter { name: name.into(), reason };
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive and finite, got {}", self.horizon)));
        }
        if self.n_steps < MIN_STEPS {
            return Err(invalid("n_steps", format!("must be at least {MIN_STEPS}, got {}", self.n_steps)));
        }
        if self.method == Method::Rk4Classical && !self.order.is_classical() {
            return Err(invalid("method", "rk4_classical requires alpha = 1".into()));
        }
        if self.picard_max_iter == 0 {
            return Err(invalid("picard_max_iter", "must be positive".into()));
        }
        if self.abm_startup_substeps == 0 {
            return Err(invalid("abm_startup_substeps", "must be at least 1".into()));
        }
        if !(self.picard_tol > T::zero()) {
            return Err(invalid("picard_tol", format!("must be positive, got {}", self.picard_tol)));
        }
        if let Some(k) = self.envelope_constant_k {
            if !(k > T::zero() && k.is_finite()) {
                return Err(invalid("envelope_constant_K", format!("must be positive, got {k}")));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> T {
        self.order.value()
    }

    pub fn step(&self) -> T {
        self.horizon / T::from_usize_lossy(self.n_steps)
    }

    pub fn grid(&self) -> Vec<T> {
        let h = self.step();
        (0..=self.n_steps)
            .map(|k| if k == self.n_steps { self.horizon } else { h * T::from_usize_lossy(k) })
            .collect()
    }

    pub fn envelope_constant(&self) -> T {
        self.envelope_constant_k
            .unwrap_or_else(|| rgamma(T::one() + self.alpha()))
    }

    pub fn fingerprint(&self) -> String {
        crate::digest::fingerprint(self)
    }
}

/// States on the uniform grid of a [`SolverConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: Vec<T>,
    pub states: Vec<State<T>>,
    pub method: Method,
    pub alpha: T,
    pub params_fingerprint: String,
    /// Steps with a component in [-1e-12, 0).
    pub roundoff_steps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub alpha: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub params_fingerprint: String,
    pub roundoff_steps: Vec<usize>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> State<T> {
        self.states[self.states.len() - 1]
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn meta(&self) -> TrajectoryMeta {
        TrajectoryMeta {
            method: self.method,
            alpha: self.alpha.as_f64(),
            horizon: self.grid[self.grid.len() - 1].as_f64(),
            n_steps: self.n_steps(),
            params_fingerprint: self.params_fingerprint.clone(),
            roundoff_steps: self.roundoff_steps.clone(),
        }
    }

    /// Componentwise maximum over the grid.
    pub fn component_sup(&self) -> [T; 3] {
        let mut m = [T::zero(); 3];
        for s in &self.states {
            for i in 0..3 {
                m[i] = m[i].max(s.0[i]);
            }
        }
        m
    }

    /// max over shared grid points of ‖x(t) - y(t)‖₁. The grids must cover
    /// the same horizon and one step count must divide the other.
    pub fn sup_distance(&self, other: &Trajectory<T>) -> Result<T> {
        let (coarse, fine) = if self.n_steps() <= other.n_steps() { (self, other) } else { (other, self) };
        let (nc, nf) = (coarse.n_steps(), fine.n_steps());
        let same_end = (coarse.grid[nc] - fine.grid[nf]).abs() <= T::epsilon() * coarse.grid[nc].abs();
        if nf % nc != 0 || !same_end {
            return Err(Error::Precondition(format!(
                "trajectories on incompatible grids ({nc} and {nf} steps)"
            )));
        }
        let stride = nf / nc;
        Ok(coarse
            .states
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let y = &fine.states[k * stride];
                (0..3).map(|i| (x.0[i] - y.0[i]).abs()).sum::<T>()
            })
            .fold(T::zero(), T::max))
    }

    /// `t,x1,x2,x3` rows; every value in shortest round-trip decimal form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(b"t,x1,x2,x3\n")?;
        for (t, s) in self.grid.iter().zip(&self.states) {
            writeln!(
                out,
                "{},{},{},{}",
                t.as_f64(),
                s.0[0].as_f64(),
                s.0[1].as_f64(),
                s.0[2].as_f64()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Runs the backend selected by `cfg.method`.
pub fn solve<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SolverConfig<T>,
) -> Result<(Trajectory<T>, Option<PicardDiagnostics<T>>)> {
    match cfg.method {
        Method::MildPicard => solve_mild_picard(p, x0, cfg).map(|(t, d)| (t, Some(d))),
        Method::Abm => solve_abm(p, x0, cfg).map(|t| (t, None)),
        Method::Rk4Classical => solve_rk4_classical(p, x0, cfg).map(|t| (t, None)),
    }
}

fn check_inputs<T: Real>(p: &ModelParams<T>, x0: &State<T>, cfg: &SolverConfig<T>, method: Method) -> Result<()> {
    if cfg.method != method {
        return Err(Error::Precondition(format!(
            "config selects {} but {} was called",
            cfg.method, method
        )));
    }
    cfg.validate()?;
    p.validate()?;
    State::new(x0.0[0], x0.0[1], x0.0[2])?;
    Ok(())
}

/// Accepts a freshly computed state, flagging roundoff negatives and
/// rejecting NaN, overflow and real negatives.
fn accept_state<T: Real>(step: usize, x: [T; 3], roundoff: &mut Vec<usize>) -> Result<State<T>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            context: format!("non-finite state at step {step} (last good step {})", step.saturating_sub(1)),
            partial: x.iter().map(|v| v.as_f64()).fold(f64::NAN, f64::max),
            bound: f64::INFINITY,
        });
    }
    let s = State(x);
    match s.sign_status() {
        SignStatus::Nonnegative => {}
        SignStatus::Roundoff => roundoff.push(step),
        SignStatus::Negative => {
            return Err(Error::InvariantViolation {
                step,
                reason: format!(
                    "negative concentration ({}, {}, {}) beyond roundoff slack",
                    x[0], x[1], x[2]
                ),
            })
        }
    }
    Ok(s)
}

fn trajectory<T: Real>(
    p: &ModelParams<T>,
    cfg: &SolverConfig<T>,
    states: Vec<State<T>>,
    roundoff_steps: Vec<usize>,
) -> Trajectory<T> {
    Trajectory {
        grid: cfg.grid(),
        states,
        method: cfg.method,
        alpha: cfg.alpha(),
        params_fingerprint: p.fingerprint(),
        roundoff_steps,
    }
}
