//! Bounds for solutions of the singular integral inequality
//!
//! ```text
//! p(t) ≤ h(t) + q(t) ∫_0^t (t-s)^{β-1} p(s) ds,
//! ```
//!
//! either as the resolvent series h + Σ_k (qΓ(β))^k I^{kβ} h or, for
//! nondecreasing h, in the closed form h(t) E_β(q Γ(β) t^β).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::specfun::{fractional_integral, ln_gamma, mittag_leffler, SampledFunction};

pub const DEFAULT_TERMS: usize = 60;
/// Default ceiling on remainder / value.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// A nonnegative profile on [0, T]: constant or sampled (piecewise linear).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    Constant(T),
    Sampled(SampledFunction<T>),
}

impl<T: Real> Profile<T> {
    pub fn value_at(&self, t: T) -> T {
        match self {
            Profile::Constant(c) => *c,
            Profile::Sampled(f) => f.value_at(t),
        }
    }

    /// max over [0, t]
    fn sup_until(&self, t: T) -> T {
        match self {
            Profile::Constant(c) => *c,
            Profile::Sampled(f) => f
                .grid()
                .iter()
                .zip(f.values())
                .take_while(|(s, _)| **s <= t)
                .map(|(_, v)| *v)
                .fold(f.value_at(t), T::max),
        }
    }

    /// I^order applied to the profile, at t.
    fn integral(&self, order: T, t: T) -> Result<T> {
        match self {
            Profile::Constant(c) => {
                if *c == T::zero() || t == T::zero() {
                    Ok(T::zero())
                } else {
                    Ok(*c * (order * t.ln() - ln_gamma(order + T::one())).exp())
                }
            }
            Profile::Sampled(f) => fractional_integral(order, f, t),
        }
    }

    fn check(&self, name: &str, horizon: T) -> Result<()> {
        let bad = |reason: String| Error::InvalidParameter { name: name.into(), reason };
        match self {
            Profile::Constant(c) => {
                if !(c.is_finite() && *c >= T::zero()) {
                    return Err(bad(format!("must be finite and nonnegative, got {c}")));
                }
            }
            Profile::Sampled(f) => {
                if f.values().iter().any(|v| *v < T::zero()) {
                    return Err(bad("sampled values must be nonnegative".into()));
                }
                if f.end() < horizon {
                    return Err(bad(format!("samples end at {} before the horizon {horizon}", f.end())));
                }
            }
        }
        Ok(())
    }

    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Sampled(f) => f.values().windows(2).all(|w| w[1] >= w[0]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallProblem<T> {
    pub forcing: Profile<T>,
    pub coefficient: Profile<T>,
    pub order: T,
    pub horizon: T,
}

impl<T: Real> GronwallProblem<T> {
    /// Validates nonnegativity, β > 0, finite T and sample coverage of [0, T].
    /// Monotonicity of q is checked by the evaluators that need it.
    pub fn new(forcing: Profile<T>, coefficient: Profile<T>, order: T, horizon: T) -> Result<Self> {
        if !(order > T::zero() && order.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                reason: format!("order must be positive, got {order}"),
            });
        }
        if !(horizon > T::zero() && horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T".into(),
                reason: format!("horizon must be positive and finite, got {horizon}"),
            });
        }
        forcing.check("h", horizon)?;
        coefficient.check("q", horizon)?;
        Ok(Self { forcing, coefficient, order, horizon })
    }

    pub fn constant(h0: T, b: T, order: T, horizon: T) -> Result<Self> {
        Self::new(Profile::Constant(h0), Profile::Constant(b), order, horizon)
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !(t >= T::zero() && t <= self.horizon) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallBound<T> {
    /// Truncated series value.
    pub value: T,
    /// Bound on |value - exact|: series tail plus accumulated rounding.
    pub remainder: T,
    pub terms: usize,
}

/// Series bound with q ≡ b and the default remainder tolerance.
pub fn gronwall_bound_constant_q<T: Real>(
    problem: &GronwallProblem<T>,
    t: T,
    n_terms: usize,
) -> Result<GronwallBound<T>> {
    gronwall_bound_constant_q_with_tol(problem, t, n_terms, T::lit(DEFAULT_REL_TOL))
}

pub fn gronwall_bound_constant_q_with_tol<T: Real>(
    problem: &GronwallProblem<T>,
    t: T,
    n_terms: usize,
    rel_tol: T,
) -> Result<GronwallBound<T>> {
    let Profile::Constant(b) = problem.coefficient else {
        return Err(Error::Precondition("constant-q bound needs a constant coefficient".into()));
    };
    series_bound(problem, b, t, n_terms, rel_tol)
}

/// h0 · E_β(q Γ(β) t^β).
pub fn gronwall_bound_ml<T: Real>(h0: T, q_val: T, order: T, t: T) -> Result<T> {
    for (name, v) in [("h0", h0), ("q", q_val), ("t", t)] {
        if !(v >= T::zero() && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be finite and nonnegative, got {v}")));
        }
    }
    if !(order > T::zero()) {
        return Err(Error::Domain(format!("order must be positive, got {order}")));
    }
    if h0 == T::zero() {
        return Ok(T::zero());
    }
    if q_val == T::zero() || t == T::zero() {
        return Ok(h0);
    }
    let z = q_val * (ln_gamma(order) + order * t.ln()).exp();
    Ok(h0 * mittag_leffler(order, z)?)
}

/// Series bound with the coefficient frozen at q(t).
pub fn gronwall_bound_general<T: Real>(
    problem: &GronwallProblem<T>,
    t: T,
    n_terms: usize,
) -> Result<GronwallBound<T>> {
    gronwall_bound_general_with_tol(problem, t, n_terms, T::lit(DEFAULT_REL_TOL))
}

pub fn gronwall_bound_general_with_tol<T: Real>(
    problem: &GronwallProblem<T>,
    t: T,
    n_terms: usize,
    rel_tol: T,
) -> Result<GronwallBound<T>> {
    if !problem.coefficient.is_nondecreasing() {
        return Err(Error::Precondition("q must be nondecreasing on its sample grid".into()));
    }
    problem.check_time(t)?;
    let b = problem.coefficient.value_at(t);
    series_bound(problem, b, t, n_terms, rel_tol)
}

fn series_bound<T: Real>(
    problem: &GronwallProblem<T>,
    b: T,
    t: T,
    n_terms: usize,
    rel_tol: T,
) -> Result<GronwallBound<T>> {
    if n_terms == 0 {
        return Err(Error::Precondition("n_terms must be positive".into()));
    }
    problem.check_time(t)?;
    let beta = problem.order;
    let h = &problem.forcing;
    let h_t = h.value_at(t);
    if b == T::zero() || t == T::zero() {
        return Ok(GronwallBound { value: h_t, remainder: T::zero(), terms: 0 });
    }
    let one = T::one();
    // (bΓ(β))^k I^{kβ} h(t); ln c = ln b + ln Γ(β)
    let ln_c = b.ln() + ln_gamma(beta);
    let mut value = h_t;
    let mut magnitude = h_t.abs();
    for k in 1..=n_terms {
        let kf = T::from_usize_lossy(k);
        let integral = h.integral(kf * beta, t)?;
        let term = (kf * ln_c).exp() * integral;
        if !term.is_finite() {
            return Err(Error::numerical("Grönwall series", value.as_f64(), f64::INFINITY));
        }
        value = value + term;
        magnitude = magnitude + term.abs();
    }
    // Tail Σ_{k>n} (c t^β)^k / Γ(kβ+1) times sup h, with decreasing term ratios.
    let ln_x = ln_c + beta * t.ln();
    let ln_term = |k: T| k * ln_x - ln_gamma(k * beta + one);
    let next = T::from_usize_lossy(n_terms + 1);
    let ratio = (ln_term(next + one) - ln_term(next)).exp();
    let sup_h = h.sup_until(t);
    let truncation = if sup_h == T::zero() {
        T::zero()
    } else if ratio < one {
        sup_h * ln_term(next).exp() / (one - ratio)
    } else {
        T::infinity()
    };
    let rounding = T::lit(4.0) * T::from_usize_lossy(n_terms + 1) * T::epsilon() * magnitude;
    let remainder = truncation + rounding;
    if !(remainder <= rel_tol * value.abs().max(T::min_positive_value())) {
        return Err(Error::NumericalFailure {
            context: format!("Grönwall series truncated at {n_terms} terms; increase n_terms"),
            partial: value.as_f64(),
            bound: remainder.as_f64(),
        });
    }
    Ok(GronwallBound { value, remainder, terms: n_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_coefficient_returns_forcing() {
        let p = GronwallProblem::constant(2.5, 0.0, 0.5, 1.0).unwrap();
        let r = gronwall_bound_constant_q(&p, 0.7, 10).unwrap();
        assert_eq!(r.value, 2.5);
        assert_eq!(r.remainder, 0.0);
    }

    #[test]
    fn classical_order_is_exponential() {
        let p = GronwallProblem::constant(1.5, 2.0, 1.0, 1.0).unwrap();
        let r = gronwall_bound_constant_q(&p, 1.0, 60).unwrap();
        assert_relative_eq!(r.value, 1.5 * 2.0f64.exp(), max_relative = 1e-12);
    }

    #[test]
    fn ml_form() {
        assert_eq!(gronwall_bound_ml(3.0, 0.0, 0.5, 1.0).unwrap(), 3.0);
        assert_eq!(gronwall_bound_ml(0.0, 2.0, 0.5, 1.0).unwrap(), 0.0);
        assert_relative_eq!(gronwall_bound_ml(2.0, 3.0, 1.0, 1.0).unwrap(), 40.171073846375336, max_relative = 1e-14);
        assert!(gronwall_bound_ml(-1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn too_few_terms_is_reported() {
        let p = GronwallProblem::constant(1.0, 2.0, 0.5, 1.0).unwrap();
        let err = gronwall_bound_constant_q(&p, 1.0, 60).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { .. }));
        assert!(gronwall_bound_constant_q(&p, 1.0, 200).is_ok());
    }

    #[test]
    fn general_q_checks_monotonicity() {
        let q = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 1.0]).unwrap();
        let p = GronwallProblem::new(Profile::Constant(1.0), Profile::Sampled(q), 0.5, 1.0).unwrap();
        assert!(matches!(gronwall_bound_general(&p, 1.0, 60), Err(Error::Precondition(_))));
    }

    #[test]
    fn general_reduces_to_constant() {
        let p = GronwallProblem::constant(1.0, 1.0, 0.8, 1.0).unwrap();
        assert_eq!(
            gronwall_bound_general(&p, 0.6, 60).unwrap(),
            gronwall_bound_constant_q(&p, 0.6, 60).unwrap()
        );
    }

    #[test]
    fn zero_forcing() {
        let q = SampledFunction::uniform(1.0, 10, |t| t).unwrap();
        let p = GronwallProblem::new(Profile::Constant(0.0), Profile::Sampled(q), 0.5, 1.0).unwrap();
        assert_eq!(gronwall_bound_general(&p, 1.0, 60).unwrap().value, 0.0);
    }

    #[test]
    fn problem_validation() {
        assert!(GronwallProblem::constant(-1.0, 1.0, 0.5, 1.0).is_err());
        assert!(GronwallProblem::constant(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(GronwallProblem::constant(1.0, 1.0, 0.5, f64::INFINITY).is_err());
        let short = SampledFunction::uniform(0.5, 4, |_| 1.0).unwrap();
        assert!(GronwallProblem::new(Profile::Sampled(short), Profile::Constant(1.0), 0.5, 1.0).is_err());
    }
}
