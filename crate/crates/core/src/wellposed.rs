//! Numerical certificates for existence (Picard envelope), uniqueness
//! (backend agreement) and continuous dependence on the initial state.

use serde::{Deserialize, Serialize};

use crate::analysis::{gronwall_bound_ml, lipschitz_constants, StateBox};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State, NEGATIVE_SLACK};
use crate::num::Real;
use crate::solver::{solve, solve_abm, solve_mild_picard, Method, PicardDiagnostics, SolverConfig, Trajectory};

/// Envelope conformance is checked from this iterate index on.
pub const ENVELOPE_FIRST_CHECKED: usize = 2;
/// Relative slack allowed below the envelope.
pub const ENVELOPE_SLACK: f64 = 1e-9;
/// K* in the dependence bound ε K* E_α(M Γ(α) T^α).
pub const K_STAR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The hypothesis behind the bound (trajectory inside the box) failed.
    Void,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport<T> {
    pub distance: T,
    pub tol: T,
    pub pass: bool,
    pub picard_steps: usize,
    pub abm_steps: usize,
    pub picard_converged: bool,
    pub picard_iterations: usize,
    pub alpha: T,
    pub config_fingerprint: String,
}

/// Runs both fractional backends on the grid of `cfg` and compares them.
pub fn check_uniqueness<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SolverConfig<T>,
    tol: T,
) -> Result<UniquenessReport<T>> {
    check_uniqueness_with_steps(p, x0, cfg, tol, cfg.n_steps, cfg.n_steps)
}

/// As [`check_uniqueness`] with separate step counts; one must divide the
/// other, and the distance is taken on the coarser grid.
pub fn check_uniqueness_with_steps<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SolverConfig<T>,
    tol: T,
    picard_steps: usize,
    abm_steps: usize,
) -> Result<UniquenessReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let picard_cfg = cfg.with_method(Method::MildPicard)?.with_steps(picard_steps)?;
    let abm_cfg = cfg.with_method(Method::Abm)?.with_steps(abm_steps)?;
    let (picard, diag) = solve_mild_picard(p, x0, &picard_cfg)?;
    let abm = solve_abm(p, x0, &abm_cfg)?;
    let distance = picard.sup_distance(&abm)?;
    Ok(UniquenessReport {
        distance,
        tol,
        pass: distance <= tol,
        picard_steps,
        abm_steps,
        picard_converged: diag.converged,
        picard_iterations: diag.iterations_used,
        alpha: cfg.alpha(),
        config_fingerprint: cfg.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport<T> {
    /// e_n - d_n for every recorded iterate.
    pub margins: Vec<T>,
    pub first_checked: usize,
    pub pass: bool,
    /// First checked index with d_n above the envelope, if any.
    pub first_failure: Option<usize>,
    pub m_constant: T,
    pub k_constant: T,
    pub lipschitz_l: T,
    pub bounds: StateBox<T>,
    pub converged: bool,
}

pub fn check_picard_envelope<T: Real>(diag: &PicardDiagnostics<T>) -> EnvelopeReport<T> {
    let slack = T::lit(ENVELOPE_SLACK);
    let margins: Vec<T> = diag
        .envelope
        .iter()
        .zip(&diag.differences)
        .map(|(e, d)| *e - *d)
        .collect();
    let first_failure = margins
        .iter()
        .zip(&diag.envelope)
        .enumerate()
        .skip(ENVELOPE_FIRST_CHECKED)
        .find(|(_, (m, e))| !(**m >= -slack * **e))
        .map(|(n, _)| n);
    EnvelopeReport {
        margins,
        first_checked: ENVELOPE_FIRST_CHECKED,
        pass: first_failure.is_none(),
        first_failure,
        m_constant: diag.m_constant,
        k_constant: diag.k_constant,
        lipschitz_l: diag.lipschitz_l,
        bounds: diag.bounds,
        converged: diag.converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxViolation<T> {
    pub step: usize,
    pub t: T,
    /// 1-based component index.
    pub component: usize,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxReport<T> {
    pub pass: bool,
    pub first_violation: Option<BoxViolation<T>>,
    /// Grid indices where a component sits in [-1e-12, 0).
    pub roundoff_steps: Vec<usize>,
    pub bounds: StateBox<T>,
}

/// Checks 0 ≤ x_i(t_k) ≤ M_i on every grid point, with roundoff slack below 0.
pub fn check_positivity_and_box<T: Real>(traj: &Trajectory<T>, bounds: &StateBox<T>) -> BoxReport<T> {
    let slack = T::lit(NEGATIVE_SLACK);
    let mut first_violation = None;
    let mut roundoff_steps = Vec::new();
    'outer: for (k, (t, s)) in traj.grid.iter().zip(&traj.states).enumerate() {
        for i in 0..3 {
            let v = s.0[i];
            if v.is_nan() || v < -slack || v > bounds.bounds[i] {
                first_violation = Some(BoxViolation { step: k, t: *t, component: i + 1, value: v });
                break 'outer;
            }
        }
        if s.0.iter().any(|v| *v < T::zero()) {
            roundoff_steps.push(k);
        }
    }
    BoxReport {
        pass: first_violation.is_none(),
        first_violation,
        roundoff_steps,
        bounds: *bounds,
    }
}

/// Direction of the initial perturbation, scaled to 1-norm ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// (1, 1, 1) / 3
    #[default]
    Diagonal,
    /// Unit vector along component 1, 2 or 3.
    Axis(usize),
}

impl Direction {
    fn unit<T: Real>(self) -> Result<[T; 3]> {
        match self {
            Direction::Diagonal => Ok([T::one() / T::lit(3.0); 3]),
            Direction::Axis(i @ 1..=3) => {
                let mut v = [T::zero(); 3];
                v[i - 1] = T::one();
                Ok(v)
            }
            Direction::Axis(i) => Err(Error::Precondition(format!("axis must be 1, 2 or 3, got {i}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceItem<T> {
    pub epsilon: T,
    pub deviation: T,
    pub bound: T,
    pub margin: T,
    pub status: Status,
}

/// Least-squares line deviation ≈ slope·ε + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceReport<T> {
    pub items: Vec<DependenceItem<T>>,
    pub k_star: T,
    pub m_constant: T,
    pub k_constant: T,
    pub lipschitz_l: T,
    pub alpha: T,
    pub horizon: T,
    pub bounds: StateBox<T>,
    pub direction: Direction,
    pub method: Method,
    /// Fit over non-void items with ε > 0; `None` with fewer than two.
    pub fit: Option<LinearFit<T>>,
    pub config_fingerprint: String,
}

impl<T: Real> DependenceReport<T> {
    /// Pass unless some non-void item fails.
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.status != Status::Fail)
    }

    pub fn any_void(&self) -> bool {
        self.items.iter().any(|i| i.status == Status::Void)
    }
}

pub fn check_continuous_dependence<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    epsilons: &[T],
    cfg: &SolverConfig<T>,
    bounds: &StateBox<T>,
) -> Result<DependenceReport<T>> {
    check_continuous_dependence_with(p, x0, epsilons, cfg, bounds, Direction::Diagonal)
}

pub fn check_continuous_dependence_with<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    epsilons: &[T],
    cfg: &SolverConfig<T>,
    bounds: &StateBox<T>,
    direction: Direction,
) -> Result<DependenceReport<T>> {
    if epsilons.is_empty() {
        return Err(Error::Precondition("at least one epsilon is required".into()));
    }
    if epsilons.iter().any(|e| !(*e >= T::zero() && e.is_finite())) {
        return Err(Error::Precondition("epsilons must be finite and nonnegative".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("epsilons must be strictly increasing".into()));
    }
    let unit = direction.unit::<T>()?;
    let alpha = cfg.alpha();
    let l = lipschitz_constants(p, bounds)?.l;
    let k_const = cfg.envelope_constant();
    let m_const = alpha * k_const * l * x0.one_norm();
    let k_star = T::lit(K_STAR);
    let growth = gronwall_bound_ml(k_star, m_const, alpha, cfg.horizon)?;

    let (base, _) = solve(p, x0, cfg)?;
    let base_inside = check_positivity_and_box(&base, bounds).pass;

    let mut items = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let shifted = State::new(x0.0[0] + eps * unit[0], x0.0[1] + eps * unit[1], x0.0[2] + eps * unit[2])?;
        let (deviation, inside) = if eps == T::zero() {
            (T::zero(), base_inside)
        } else {
            let (pert, _) = solve(p, &shifted, cfg)?;
            (pert.sup_distance(&base)?, base_inside && check_positivity_and_box(&pert, bounds).pass)
        };
        let bound = eps * growth;
        let status = if !inside {
            Status::Void
        } else if deviation <= bound {
            Status::Pass
        } else {
            Status::Fail
        };
        items.push(DependenceItem { epsilon: eps, deviation, bound, margin: bound - deviation, status });
    }
    let fit = linear_fit(
        items
            .iter()
            .filter(|i| i.status != Status::Void && i.epsilon > T::zero())
            .map(|i| (i.epsilon, i.deviation)),
    );
    Ok(DependenceReport {
        items,
        k_star,
        m_constant: m_const,
        k_constant: k_const,
        lipschitz_l: l,
        alpha,
        horizon: cfg.horizon,
        bounds: *bounds,
        direction,
        method: cfg.method,
        fit,
        config_fingerprint: cfg.fingerprint(),
    })
}

fn linear_fit<T: Real>(points: impl Iterator<Item = (T, T)>) -> Option<LinearFit<T>> {
    let pts: Vec<(T, T)> = points.collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some(LinearFit { slope, intercept: my - slope * mx })
}
