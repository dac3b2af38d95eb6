//! The probability density ζ_α on (0, ∞) whose Laplace transform is E_α(-z).
//!
//! In series form
//!
//! ```text
//! ζ_α(θ) = (1/π) Σ_{n≥1} (-θ)^{n-1} Γ(αn) sin(παn) / (n-1)!
//! ```
//!
//! which is the Wright-type series Σ (-1)^{n-1} θ^{n-1} Γ(nα+1) sin(nπα) / (π n!)
//! after the change of variable θ ↦ θ^{-1/α} and its Jacobian (1/α) θ^{-1-1/α}.
//! The alternating series cancels catastrophically for large θ, so beyond
//! θ = 1 the positive integral representation
//!
//! ```text
//! ζ_α(θ) = θ^{α/(1-α)} / (π(1-α)) ∫_0^π a(φ) exp(-θ^{1/(1-α)} a(φ)) dφ,
//! a(φ) = (sin αφ / sin φ)^{1/(1-α)} sin((1-α)φ) / sin(αφ)
//! ```
//!
//! is used instead.

use super::gamma::ln_gamma;
use super::FractionalOrder;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::quad::{integrate, QuadOptions};

const SERIES_LIMIT: f64 = 1.0;
const MAX_TERMS: usize = 20_000;

/// Density value ζ_α(θ). Rejects α = 1, where ζ_α degenerates to a point
/// mass at θ = 1.
pub fn zeta_density<T: Real>(order: FractionalOrder<T>, theta: T) -> Result<T> {
    let alpha = order.value();
    if alpha >= T::one() {
        return Err(Error::DegenerateOrder(
            "ζ_α is a point mass at α = 1; use the exponential formulas".into(),
        ));
    }
    if !(theta > T::zero() && theta.is_finite()) {
        return Err(Error::Domain(format!("ζ_α needs θ > 0, got {theta}")));
    }
    if theta <= T::lit(SERIES_LIMIT) {
        if let Ok(v) = series(alpha, theta) {
            return Ok(v.max(T::zero()));
        }
    }
    kanter(alpha, theta)
}

fn series<T: Real>(alpha: T, theta: T) -> Result<T> {
    let eps = T::epsilon();
    let ln_theta = theta.ln();
    let mut sum = T::zero();
    let mut bound = T::infinity();
    for n in 1..MAX_TERMS {
        let nf = T::from_usize_lossy(n);
        // magnitude θ^{n-1} Γ(αn) / (n-1)!
        let magnitude = ((nf - T::one()) * ln_theta + ln_gamma(alpha * nf) - ln_gamma(nf)).exp();
        let sign = if n % 2 == 1 { T::one() } else { -T::one() };
        sum = sum + sign * magnitude * (T::PI() * alpha * nf).sin();
        // Next-to-current magnitude ratio θ α Γ(αn+α)/Γ(αn+1), decreasing in n.
        let ratio = theta * alpha * (ln_gamma(alpha * nf + alpha) - ln_gamma(alpha * nf + T::one())).exp();
        if ratio < T::one() {
            bound = magnitude * ratio / (T::one() - ratio);
            if bound <= eps * sum.abs().max(eps) {
                return Ok(sum / T::PI());
            }
        }
    }
    Err(Error::numerical(
        "ζ_α series",
        (sum / T::PI()).as_f64(),
        bound.as_f64(),
    ))
}

fn kanter<T: Real>(alpha: T, theta: T) -> Result<T> {
    let one = T::one();
    let inv = one / (one - alpha);
    let c = theta.powf(inv);
    let exp_floor = T::min_positive_value().ln();
    let shape = |phi: T| {
        let sa = (alpha * phi).sin();
        (sa / phi.sin()).powf(inv) * ((one - alpha) * phi).sin() / sa
    };
    let opts = QuadOptions {
        // Values below √(min positive) are indistinguishable from zero for any use here.
        abs_tol: T::min_positive_value().sqrt(),
        rel_tol: T::epsilon() * T::lit(512.0),
        max_intervals: 4000,
    };
    let r = integrate(
        |phi: T| {
            let a = shape(phi);
            let exponent = -c * a;
            if !a.is_finite() || exponent < exp_floor {
                T::zero()
            } else {
                a * exponent.exp()
            }
        },
        T::zero(),
        T::PI(),
        &opts,
    )?;
    Ok(theta.powf(alpha * inv) * r.value / (T::PI() * (one - alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn half_order_is_half_gaussian() {
        // ζ_{1/2}(θ) = exp(-θ²/4) / √π
        for &theta in &[0.01, 0.3, 0.99, 1.0, 1.01, 2.5, 6.0, 12.0] {
            let expected = (-theta * theta / 4.0f64).exp() / std::f64::consts::PI.sqrt();
            assert_abs_diff_eq!(zeta_density(order(0.5), theta).unwrap(), expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn branches_agree_near_the_switch() {
        for &a in &[0.2, 0.4, 0.7, 0.9] {
            let s = series(a, 0.95).unwrap();
            let k = kanter(a, 0.95).unwrap();
            assert_abs_diff_eq!(s, k, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_order_rejected() {
        let e = zeta_density(FractionalOrder::new(1.0).unwrap(), 0.5).unwrap_err();
        assert!(matches!(e, Error::DegenerateOrder(_)));
        assert!(matches!(zeta_density(order(0.5), 0.0), Err(Error::Domain(_))));
        assert!(matches!(zeta_density(order(0.5), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn nonnegative_far_out() {
        for &a in &[0.3, 0.8] {
            for i in 1..60 {
                let v = zeta_density(order(a), i as f64 * 0.5).unwrap();
                assert!(v >= 0.0 && v.is_finite());
            }
        }
    }
}
