//! Fractional integral and Caputo derivative of sampled functions by product
//! integration: the sampled function is interpolated linearly and the weakly
//! singular kernel is integrated exactly on every subinterval.

use super::gamma::rgamma;
use super::SampledFunction;
use crate::error::{Error, Result};
use crate::num::Real;

/// Riemann–Liouville integral (1/Γ(β)) ∫_0^t (t-s)^{β-1} φ(s) ds.
pub fn fractional_integral<T: Real>(beta: T, phi: &SampledFunction<T>, t: T) -> Result<T> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::Domain(format!("integral order must be positive, got {beta}")));
    }
    phi.check_time(t)?;
    if t == T::zero() {
        return Ok(T::zero());
    }
    let one = T::one();
    let grid = phi.grid();
    let values = phi.values();
    let mut acc = T::zero();
    for j in 0..grid.len() - 1 {
        let sa = grid[j];
        if sa >= t {
            break;
        }
        let (sb, vb) = if grid[j + 1] <= t {
            (grid[j + 1], values[j + 1])
        } else {
            (t, phi.value_at(t))
        };
        let va = values[j];
        let u0 = t - sa;
        let u1 = t - sb;
        // ∫ (t-s)^{β-1} ds and ∫ (t-s)^{β-1} (s - sa) ds over [sa, sb]
        let w0 = (u0.powf(beta) - u1.powf(beta)) / beta;
        let w1 = u0 * w0 - (u0.powf(beta + one) - u1.powf(beta + one)) / (beta + one);
        acc = acc + va * w0 + (vb - va) / (sb - sa) * w1;
    }
    Ok(acc * rgamma(beta))
}

/// Caputo derivative of order β ∈ (0, 1]: the order-(1-β) integral of the
/// piecewise-constant derivative of the interpolant. At β = 1 this is the
/// backward difference on the interval ending at `t`.
pub fn caputo_derivative<T: Real>(beta: T, phi: &SampledFunction<T>, t: T) -> Result<T> {
    if !(beta > T::zero() && beta <= T::one()) {
        return Err(Error::Domain(format!("Caputo order must lie in (0, 1], got {beta}")));
    }
    if t <= T::zero() {
        return Err(Error::Domain("Caputo derivative is not evaluated at t = 0".into()));
    }
    phi.check_time(t)?;
    let grid = phi.grid();
    let values = phi.values();
    let slope = |j: usize| (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
    let one = T::one();
    if beta == one {
        let j = grid.partition_point(|&s| s < t).max(1) - 1;
        return Ok(slope(j));
    }
    let p = one - beta;
    let mut acc = T::zero();
    for j in 0..grid.len() - 1 {
        let sa = grid[j];
        if sa >= t {
            break;
        }
        let sb = grid[j + 1].min(t);
        acc = acc + slope(j) * ((t - sa).powf(p) - (t - sb).powf(p));
    }
    // ∫ (t-s)^{-β} ds = [(t-sa)^{1-β} - (t-sb)^{1-β}] / (1-β), and (1-β)Γ(1-β) = Γ(2-β)
    Ok(acc * rgamma(T::lit(2.0) - beta))
}
