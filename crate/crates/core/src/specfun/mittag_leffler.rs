//! Real-argument Mittag-Leffler functions E_α(z) and E_{α,β}(z), 0 < α ≤ 2.
//!
//! Branches:
//! - power series with a rigorous tail bound while the largest term is
//!   harmless (|z|^{1/α} ≤ 3 for z < 0, ≤ 40 for z > 0);
//! - exponential asymptotics for large positive z;
//! - for large negative z, the real-line integral obtained by collapsing the
//!   Bromwich contour of s^{α-β}/(s^α + λ) onto the branch cut, plus the two
//!   pole residues when α > 1;
//! - E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z to bring β below 1 + α.

use std::fmt;

use serde::Serialize;

use super::gamma::{ln_gamma, rgamma};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::quad::{integrate_pieces, QuadOptions};

const NEGATIVE_SERIES_SCALE: f64 = 3.0;
const POSITIVE_SERIES_SCALE: f64 = 40.0;
const MAX_SERIES_TERMS: usize = 20_000;
const ASYMPTOTIC_TERMS: usize = 8;

/// Which evaluation strategy produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MlBranch {
    Origin,
    Exponential,
    Series,
    PositiveAsymptotic,
    Integral,
    UnitOrderIntegral,
}

impl fmt::Display for MlBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MlBranch::Origin => "origin",
            MlBranch::Exponential => "exponential",
            MlBranch::Series => "series",
            MlBranch::PositiveAsymptotic => "positive-asymptotic",
            MlBranch::Integral => "integral",
            MlBranch::UnitOrderIntegral => "unit-order-integral",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlEvaluation<T> {
    pub value: T,
    pub branch: MlBranch,
}

/// One-parameter Mittag-Leffler function E_α(z) = Σ z^k / Γ(αk + 1).
pub fn mittag_leffler<T: Real>(alpha: T, z: T) -> Result<T> {
    mittag_leffler2(alpha, T::one(), z)
}

/// Two-parameter Mittag-Leffler function E_{α,β}(z) = Σ z^k / Γ(αk + β).
pub fn mittag_leffler2<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    mittag_leffler_eval(alpha, beta, z).map(|e| e.value)
}

/// Evaluates E_{α,β}(z) and reports the branch that was used.
pub fn mittag_leffler_eval<T: Real>(alpha: T, beta: T, z: T) -> Result<MlEvaluation<T>> {
    if !(alpha > T::zero() && alpha <= T::lit(2.0)) {
        return Err(Error::Domain(format!(
            "Mittag-Leffler order must lie in (0, 2], got {alpha}"
        )));
    }
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "Mittag-Leffler second parameter must be positive, got {beta}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("Mittag-Leffler argument must be finite, got {z}")));
    }
    eval(alpha, beta, z)
}

fn eval<T: Real>(alpha: T, beta: T, z: T) -> Result<MlEvaluation<T>> {
    let one = T::one();
    if z == T::zero() {
        return Ok(MlEvaluation {
            value: rgamma(beta),
            branch: MlBranch::Origin,
        });
    }
    if alpha == one && beta == one {
        return Ok(MlEvaluation {
            value: z.exp(),
            branch: MlBranch::Exponential,
        });
    }
    let scale = z.abs().powf(one / alpha);
    if z > T::zero() {
        return if scale <= T::lit(POSITIVE_SERIES_SCALE) {
            series(alpha, beta, z).map(|v| MlEvaluation {
                value: v,
                branch: MlBranch::Series,
            })
        } else {
            positive_asymptotic(alpha, beta, z).map(|v| MlEvaluation {
                value: v,
                branch: MlBranch::PositiveAsymptotic,
            })
        };
    }
    if scale <= T::lit(NEGATIVE_SERIES_SCALE) {
        return series(alpha, beta, z).map(|v| MlEvaluation {
            value: v,
            branch: MlBranch::Series,
        });
    }
    if beta >= one + alpha {
        let lower = eval(alpha, beta - alpha, z)?;
        return Ok(MlEvaluation {
            value: (lower.value - rgamma(beta - alpha)) / z,
            branch: lower.branch,
        });
    }
    if alpha == one {
        return unit_order(beta, z).map(|v| MlEvaluation {
            value: v,
            branch: MlBranch::UnitOrderIntegral,
        });
    }
    negative_integral(alpha, beta, -z).map(|v| MlEvaluation {
        value: v,
        branch: MlBranch::Integral,
    })
}

/// Term z^k / Γ(αk + β), switching to logarithms before anything overflows.
fn series_term<T: Real>(alpha: T, beta: T, z: T, k: usize) -> T {
    let kf = T::from_usize_lossy(k);
    let arg = kf * alpha + beta;
    let ln_max = T::max_value().ln() * T::lit(0.9);
    let ln_pow = kf * z.abs().ln();
    // Γ overflows near 171.6 in f64 and 35 in f32.
    let gamma_limit = if ln_max > T::lit(300.0) { T::lit(170.0) } else { T::lit(34.0) };
    if arg < gamma_limit && ln_pow < ln_max {
        z.powi(k as i32) * rgamma(arg)
    } else {
        let sign = if z < T::zero() && k % 2 == 1 { -T::one() } else { T::one() };
        sign * (ln_pow - ln_gamma(arg)).exp()
    }
}

fn series<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    let eps = T::epsilon();
    let az = z.abs();
    let mut sum = T::zero();
    let mut bound = T::infinity();
    for k in 0..MAX_SERIES_TERMS {
        let term = series_term(alpha, beta, z, k);
        sum = sum + term;
        // |t_{k+1}/t_k| = |z| Γ(x)/Γ(x+α) with x = αk + β, nonincreasing in k
        // by log-convexity of Γ, so the tail is dominated by a geometric series.
        let x = T::from_usize_lossy(k) * alpha + beta;
        let ratio = az * (ln_gamma(x) - ln_gamma(x + alpha)).exp();
        if ratio < T::one() {
            bound = term.abs() * ratio / (T::one() - ratio);
            if bound <= eps * sum.abs().max(eps) {
                return Ok(sum);
            }
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::numerical(
        "Mittag-Leffler power series",
        sum.as_f64(),
        bound.as_f64(),
    ))
}

fn positive_asymptotic<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    let one = T::one();
    let ln_lead = (one / alpha).ln() + (one - beta) / alpha * z.ln() + z.powf(one / alpha);
    if ln_lead >= T::max_value().ln() {
        return Err(Error::numerical(
            "Mittag-Leffler asymptotic expansion (overflow)",
            f64::INFINITY,
            f64::INFINITY,
        ));
    }
    let mut value = ln_lead.exp();
    let mut zpow = one;
    for k in 1..=ASYMPTOTIC_TERMS {
        zpow = zpow / z;
        value = value - zpow * rgamma(beta - alpha * T::from_usize_lossy(k));
    }
    Ok(value)
}

/// E_{1,β}(z) for non-integer β < 2 and z < 0.
fn unit_order<T: Real>(beta: T, z: T) -> Result<T> {
    let one = T::one();
    if beta < one {
        let upper = unit_order(beta + one, z)?;
        return Ok(rgamma(beta) + z * upper);
    }
    // E_{1,β}(z) = 1/Γ(β-1) ∫_0^1 (1-s)^{β-2} e^{zs} ds, with w = (1-s)^{β-1}
    // removing the endpoint singularity.
    let p = one / (beta - one);
    let opts = QuadOptions {
        abs_tol: T::epsilon() * T::lit(16.0),
        rel_tol: T::epsilon() * T::lit(16.0),
        max_intervals: 4000,
    };
    let r = integrate_pieces(
        |w: T| (z * (one - w.powf(p))).exp(),
        &[T::zero(), T::one()],
        &opts,
    )?;
    Ok(r.value * rgamma(beta))
}

/// E_{α,β}(-λ) for λ > 0, α ≠ 1, β < 1 + α.
fn negative_integral<T: Real>(alpha: T, beta: T, lambda: T) -> Result<T> {
    let one = T::one();
    let pi = T::PI();
    let e = (one - beta) / alpha;
    let inv_alpha = one / alpha;
    let sin_b = (pi * beta).sin();
    let sin_ab = (pi * (alpha - beta)).sin();
    let cos_a = (pi * alpha).cos();
    // u = w^{1/(1+e)} absorbs the u^e factor: u^e du = dw / (1 + e).
    let q = one / (one + e);
    let prefactor = lambda.powf(e) / (alpha * pi * (one + e));

    let integrand = |w: T| {
        let u = w.powf(q);
        let decay = (-(lambda * u).powf(inv_alpha)).exp();
        if decay == T::zero() {
            return T::zero();
        }
        decay * (u * sin_b - sin_ab) / (u * u + T::lit(2.0) * u * cos_a + one)
    };

    // Beyond this u the exponential underflows.
    let u_max = T::lit(745.0).powf(alpha) / lambda;
    let mut breaks = vec![T::zero()];
    // Geometric breakpoints keep the adaptive rule from sampling only the
    // negligible far end of a long interval.
    let mut interior = Vec::new();
    let mut u = one / lambda;
    while u < u_max {
        interior.push(u);
        u = u * T::lit(4.0);
    }
    if cos_a < T::zero() {
        interior.push(-cos_a);
    }
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for u in interior {
        if u > T::zero() && u < u_max {
            breaks.push(u.powf(one + e));
        }
    }
    breaks.push(u_max.powf(one + e));
    breaks.dedup();

    let tol = T::epsilon() * T::lit(32.0);
    let opts = QuadOptions {
        abs_tol: tol / prefactor,
        rel_tol: tol,
        max_intervals: 4000,
    };
    let integral = integrate_pieces(integrand, &breaks, &opts)?;
    let mut value = prefactor * integral.value;

    if alpha > one {
        // Residues at s = λ^{1/α} e^{±iπ/α}.
        let r = lambda.powf(inv_alpha);
        let phase = r * (pi / alpha).sin() + pi * (one - beta) / alpha;
        value = value
            + T::lit(2.0) / alpha * lambda.powf(e) * (r * (pi / alpha).cos()).exp() * phase.cos();
    }
    if !value.is_finite() {
        return Err(Error::numerical(
            "Mittag-Leffler integral representation",
            value.as_f64(),
            integral.error.as_f64(),
        ));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use approx::assert_relative_eq;

    #[test]
    fn unit_order_is_exponential() {
        assert_relative_eq!(mittag_leffler(1.0, 1.0).unwrap(), std::f64::consts::E, max_relative = 1e-15);
        for i in 0..=130 {
            let z = -10.0 + 0.1 * i as f64;
            let v = mittag_leffler(1.0, z).unwrap();
            assert_abs_diff_eq!(v, z.exp(), epsilon = 1e-12 * z.exp().max(1.0));
        }
    }

    #[test]
    fn origin_and_trivial_reductions() {
        assert_eq!(mittag_leffler(0.7, 0.0).unwrap(), 1.0);
        assert_relative_eq!(mittag_leffler2(1.0, 1.0, 2.0).unwrap(), 2.0f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(
            mittag_leffler2(1.0, 2.0, 1.0).unwrap(),
            std::f64::consts::E - 1.0,
            max_relative = 1e-14
        );
        assert_eq!(
            mittag_leffler2(0.6, 1.0, -0.5).unwrap(),
            mittag_leffler(0.6, -0.5).unwrap()
        );
    }

    #[test]
    fn half_order_closed_form() {
        // E_{1/2}(-1) = e erfc(1)
        assert_abs_diff_eq!(mittag_leffler(0.5, -1.0).unwrap(), 0.427_583_576_155_807, epsilon = 1e-14);
    }

    #[test]
    fn order_two_is_cosine() {
        for &x in &[0.5f64, 2.0, 7.0, 30.0] {
            let v = mittag_leffler(2.0, -x * x).unwrap();
            assert_abs_diff_eq!(v, x.cos(), epsilon = 1e-12);
            let c = mittag_leffler(2.0, x * x).unwrap();
            assert_relative_eq!(c, x.cosh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn unit_order_second_parameter_two() {
        for &z in &[-0.5f64, -4.0, -20.0, -50.0] {
            let v = mittag_leffler2(1.0, 2.0, z).unwrap();
            assert_abs_diff_eq!(v, z.exp_m1() / z, epsilon = 1e-14);
        }
    }

    #[test]
    fn branches_are_reported() {
        assert_eq!(mittag_leffler_eval(0.5, 1.0, -0.5).unwrap().branch, MlBranch::Series);
        assert_eq!(mittag_leffler_eval(0.5, 1.0, -30.0).unwrap().branch, MlBranch::Integral);
        assert_eq!(mittag_leffler_eval(0.9, 1.0, 30.0).unwrap().branch, MlBranch::PositiveAsymptotic);
        assert_eq!(mittag_leffler_eval(0.5, 1.0, 5.0).unwrap().branch, MlBranch::Series);
        assert_eq!(mittag_leffler_eval(1.0, 1.0, -30.0).unwrap().branch, MlBranch::Exponential);
        assert_eq!(mittag_leffler_eval(0.5, 1.0, 0.0).unwrap().branch, MlBranch::Origin);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(mittag_leffler(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(mittag_leffler(2.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(mittag_leffler2(0.5, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(mittag_leffler(0.5, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn overflow_is_a_numerical_failure() {
        let err = mittag_leffler(0.1, 50.0).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { .. }));
    }
}
