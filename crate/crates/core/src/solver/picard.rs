//! Successive approximations on the mild formulation
//!
//! ```text
//! x_{n+1,i}(t) = x0_i E_α(a_i t^α) + ∫_0^t k_i(t-η) f_i(x_n(η)) dη,
//! k_i(τ) = τ^{α-1} E_{α,α}(a_i τ^α),
//! ```
//!
//! where a_i are the diagonal entries of A. The θ-integrals against ζ_α are
//! already carried out in these kernels; only the time convolution is
//! discretized, by product integration of the piecewise-linear interpolant
//! of f(x_n) against k_i. The kernel moments come from the antiderivatives
//! F1(τ) = τ^α E_{α,α+1}(aτ^α) and F2(τ) = τ^{α+1} E_{α,α+2}(aτ^α).

use serde::Serialize;

use super::{accept_state, check_inputs, trajectory, Method, SolverConfig, Trajectory};
use crate::analysis::{lipschitz_constants, StateBox};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::num::Real;
use crate::specfun::{ln_gamma, mittag_leffler, mittag_leffler2, FractionalOrder};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardDiagnostics<T> {
    /// d_n = max over the grid of ‖x_{n+1} - x_n‖₁, starting from x_0 ≡ x0.
    pub differences: Vec<T>,
    /// e_n = Mⁿ T^{nα} Γ(α)ⁿ / Γ(nα+1), same indexing as `differences`.
    pub envelope: Vec<T>,
    /// M = α K L ‖x0‖₁.
    pub m_constant: T,
    pub k_constant: T,
    pub lipschitz_l: T,
    pub bounds: StateBox<T>,
    pub alpha: T,
    pub horizon: T,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Mⁿ tⁿᵅ Γ(α)ⁿ / Γ(nα+1), evaluated in log space.
pub fn picard_envelope<T: Real>(m: T, alpha: FractionalOrder<T>, t: T, n: usize) -> Result<T> {
    if !(m >= T::zero() && m.is_finite() && t >= T::zero() && t.is_finite()) {
        return Err(Error::Domain(format!("envelope needs M, t ≥ 0, got M = {m}, t = {t}")));
    }
    if n == 0 {
        return Ok(T::one());
    }
    if m == T::zero() || t == T::zero() {
        return Ok(T::zero());
    }
    let a = alpha.value();
    let nf = T::from_usize_lossy(n);
    Ok((nf * (m.ln() + a * t.ln() + ln_gamma(a)) - ln_gamma(nf * a + T::one())).exp())
}

/// Product-trapezoid weights for one diagonal entry: the convolution at
/// grid index k is `tail[k] g_0 + Σ_{j=1}^{k} lag[k-j] g_j`.
struct ConvolutionWeights<T> {
    lag: Vec<T>,
    tail: Vec<T>,
}

impl<T: Real> ConvolutionWeights<T> {
    fn new(alpha: T, a: T, h: T, n: usize) -> Result<Self> {
        let one = T::one();
        let mut f1 = vec![T::zero(); n + 1];
        let mut f2 = vec![T::zero(); n + 1];
        for m in 1..=n {
            let tau = h * T::from_usize_lossy(m);
            let ta = tau.powf(alpha);
            let z = a * ta;
            f1[m] = ta * mittag_leffler2(alpha, alpha + one, z)?;
            f2[m] = tau * ta * mittag_leffler2(alpha, alpha + T::lit(2.0), z)?;
        }
        // On τ ∈ [(m-1)h, mh]: W0 = ∫k, W1 = ∫(mh - τ) k.
        let w0 = |m: usize| f1[m] - f1[m - 1];
        let w1 = |m: usize| f2[m] - f2[m - 1] - h * f1[m - 1];
        let mut lag = vec![T::zero(); n + 1];
        let mut tail = vec![T::zero(); n + 1];
        for m in 0..=n {
            let right = if m < n { w1(m + 1) / h } else { T::zero() };
            let left = if m >= 1 { w0(m) - w1(m) / h } else { T::zero() };
            lag[m] = left + right;
            tail[m] = left;
        }
        Ok(Self { lag, tail })
    }

    fn apply(&self, g: &[T], out: &mut [T]) {
        out[0] = T::zero();
        for k in 1..out.len() {
            let mut acc = self.tail[k] * g[0];
            for j in 1..=k {
                acc = acc + self.lag[k - j] * g[j];
            }
            out[k] = acc;
        }
    }
}

pub fn solve_mild_picard<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SolverConfig<T>,
) -> Result<(Trajectory<T>, PicardDiagnostics<T>)> {
    check_inputs(p, x0, cfg, Method::MildPicard)?;
    let n = cfg.n_steps;
    let alpha = cfg.alpha();
    let grid = cfg.grid();
    let diag = p.linear_part().diag;

    let mut homogeneous = [vec![T::zero(); n + 1], vec![T::zero(); n + 1], vec![T::zero(); n + 1]];
    let mut weights: Vec<ConvolutionWeights<T>> = Vec::with_capacity(3);
    for i in 0..3 {
        let a = diag[i];
        for (k, &t) in grid.iter().enumerate() {
            homogeneous[i][k] = if k == 0 {
                x0.0[i]
            } else {
                x0.0[i] * mittag_leffler(alpha, a * t.powf(alpha))?
            };
        }
        match (0..i).find(|&j| diag[j] == a) {
            Some(j) => weights.push(ConvolutionWeights { lag: weights[j].lag.clone(), tail: weights[j].tail.clone() }),
            None => weights.push(ConvolutionWeights::new(alpha, a, cfg.step(), n)?),
        }
    }

    let mut current: Vec<[T; 3]> = vec![x0.0; n + 1];
    let mut next: Vec<[T; 3]> = vec![[T::zero(); 3]; n + 1];
    let mut forcing = [vec![T::zero(); n + 1], vec![T::zero(); n + 1], vec![T::zero(); n + 1]];
    let mut conv = vec![T::zero(); n + 1];
    let mut differences = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.picard_max_iter {
        for (k, x) in current.iter().enumerate() {
            let f = p.nonlinear(x)?;
            for i in 0..3 {
                forcing[i][k] = f[i];
            }
        }
        for i in 0..3 {
            weights[i].apply(&forcing[i], &mut conv);
            for k in 0..=n {
                next[k][i] = homogeneous[i][k] + conv[k];
            }
        }
        let mut d = T::zero();
        for (k, (a, b)) in next.iter().zip(&current).enumerate() {
            let dk: T = (0..3).map(|i| (a[i] - b[i]).abs()).sum();
            if !dk.is_finite() {
                return Err(Error::numerical(
                    format!("Picard iterate {} at grid index {k}", differences.len() + 1),
                    dk.as_f64(),
                    f64::INFINITY,
                ));
            }
            d = d.max(dk);
        }
        std::mem::swap(&mut current, &mut next);
        differences.push(d);
        if d <= cfg.picard_tol {
            converged = true;
            break;
        }
    }

    let mut roundoff = Vec::new();
    let mut states = Vec::with_capacity(n + 1);
    states.push(*x0);
    for (k, x) in current.iter().enumerate().skip(1) {
        states.push(accept_state(k, *x, &mut roundoff)?);
    }
    let traj = trajectory(p, cfg, states, roundoff);

    let bounds = match cfg.envelope_box {
        Some(b) => b,
        None => {
            let floor = T::min_positive_value();
            let [m1, m2, m3] = traj.component_sup();
            StateBox::new(m1.max(floor), m2.max(floor), m3.max(floor))?
        }
    };
    let l = lipschitz_constants(p, &bounds)?.l;
    let k_const = cfg.envelope_constant();
    let m_const = alpha * k_const * l * x0.one_norm();
    let envelope = (0..differences.len())
        .map(|j| picard_envelope(m_const, cfg.order, cfg.horizon, j))
        .collect::<Result<Vec<_>>>()?;
    let iterations_used = differences.len();
    Ok((
        traj,
        PicardDiagnostics {
            differences,
            envelope,
            m_constant: m_const,
            k_constant: k_const,
            lipschitz_l: l,
            bounds,
            alpha,
            horizon: cfg.horizon,
            converged,
            iterations_used,
        },
    ))
}
