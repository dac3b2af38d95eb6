//! Special functions: Γ, Mittag-Leffler functions, the density ζ_α, and
//! reference fractional integral / Caputo derivative operators.

mod fractional;
mod gamma;
mod mittag_leffler;
mod zeta;

use serde::Serialize;

pub use fractional::{caputo_derivative, fractional_integral};
pub use gamma::{gamma, ln_gamma, rgamma};
pub use mittag_leffler::{mittag_leffler, mittag_leffler2, mittag_leffler_eval, MlBranch, MlEvaluation};
pub use zeta::zeta_density;

use crate::error::{Error, Result};
use crate::num::Real;

/// Order α of the fractional derivative, 0 < α ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha <= T::one() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha.as_f64()))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == T::one()
    }
}

/// A function sampled on a strictly increasing grid starting at 0, read as
/// its piecewise-linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::Domain("sampled function needs at least two points".into()));
        }
        if grid[0] != T::zero() {
            return Err(Error::Domain("sample grid must start at 0".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || !grid[grid.len() - 1].is_finite() {
            return Err(Error::Domain("sample grid must be strictly increasing and finite".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at `n + 1` equally spaced points of `[0, t_end]`.
    pub fn uniform(t_end: T, n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        if n == 0 || !(t_end > T::zero()) {
            return Err(Error::Domain("uniform grid needs n ≥ 1 and t_end > 0".into()));
        }
        let h = t_end / T::from_usize_lossy(n);
        let grid: Vec<T> = (0..=n)
            .map(|k| if k == n { t_end } else { h * T::from_usize_lossy(k) })
            .collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn end(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    pub(crate) fn check_time(&self, t: T) -> Result<()> {
        if t < T::zero() || t > self.end() || !t.is_finite() {
            return Err(Error::Domain(format!(
                "t = {t} outside sampled range [0, {}]",
                self.end()
            )));
        }
        Ok(())
    }

    /// Linear interpolation; `t` is clamped to the sampled range.
    pub fn value_at(&self, t: T) -> T {
        let g = &self.grid;
        if t <= g[0] {
            return self.values[0];
        }
        if t >= self.end() {
            return self.values[g.len() - 1];
        }
        let j = g.partition_point(|&s| s <= t) - 1;
        let w = (t - g[j]) / (g[j + 1] - g[j]);
        self.values[j] + w * (self.values[j + 1] - self.values[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_bounds() {
        assert!(FractionalOrder::new(1.0).is_ok());
        assert!(FractionalOrder::new(1e-3).is_ok());
        assert_eq!(FractionalOrder::new(0.0).unwrap_err(), Error::InvalidOrder(0.0));
        assert!(FractionalOrder::new(1.0001).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn sampled_function_validation() {
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![0.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![0.1, 1.0], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        let f = SampledFunction::new(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 4.0]).unwrap();
        assert_eq!(f.value_at(0.5), 2.0);
        assert_eq!(f.value_at(2.0), 3.5);
        assert_eq!(f.value_at(9.0), 4.0);
    }
}
