//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! Used for the Mittag-Leffler integral representation, the ζ_α density and
//! the half-line integrals that check the density identities.

use crate::error::{Error, Result};
use crate::num::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-8),
            rel_tol: T::lit(1e-10),
            max_intervals: 2000,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    Segment {
        a,
        b,
        value: kron * radius,
        error: ((kron - gauss) * radius).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol * |I|)`. The integrand is never
/// evaluated at the endpoints.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature limits must be finite".into()));
    }
    if a > b {
        return integrate(f, b, a, opts).map(|r| QuadResult {
            value: -r.value,
            ..r
        });
    }
    let mut segments = vec![kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let total: T = segments.iter().map(|s| s.value).sum();
        let err: T = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::numerical("quadrature", total.as_f64(), err.as_f64()));
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::numerical("quadrature", total.as_f64(), err.as_f64()));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        // Interval collapsed to floating point resolution: accept as is.
        if mid <= seg.a || mid >= seg.b {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        segments.push(kronrod(&mut f, seg.a, mid));
        segments.push(kronrod(&mut f, mid, seg.b));
        evaluations += 30;
    }
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, splitting the
/// absolute tolerance evenly.
pub fn integrate_pieces<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    let pieces = points.len().saturating_sub(1).max(1);
    let local = QuadOptions {
        abs_tol: opts.abs_tol / T::from_usize_lossy(pieces),
        ..*opts
    };
    let mut acc = QuadResult {
        value: T::zero(),
        error: T::zero(),
        evaluations: 0,
    };
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], &local)?;
        acc.value = acc.value + r.value;
        acc.error = acc.error + r.error;
        acc.evaluations += r.evaluations;
    }
    Ok(acc)
}

/// Integrates `f` over `(0, ∞)`.
///
/// The range is split at `split`; the tail is mapped by `θ = split / u` onto
/// `(0, 1]`, so `f` must decay fast enough for `f(split/u) / u²` to vanish as
/// `u → 0`.
pub fn integrate_half_line<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    split: T,
    opts: &QuadOptions<T>,
) -> Result<QuadResult<T>> {
    let half = QuadOptions {
        abs_tol: opts.abs_tol * T::lit(0.5),
        ..*opts
    };
    let head = integrate(&mut f, T::zero(), split, &half)?;
    let tail = integrate(
        |u: T| {
            let theta = split / u;
            let v = f(theta);
            if v == T::zero() {
                T::zero()
            } else {
                v * split / (u * u)
            }
        },
        T::zero(),
        T::one(),
        &half,
    )?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 64.0 / 6.0 - 4.0, epsilon = 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn endpoint_singularity() {
        let opts = QuadOptions::new(1e-10, 1e-12);
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &opts).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn half_line_gaussian() {
        let opts = QuadOptions::new(1e-12, 1e-12);
        let r = integrate_half_line(|x: f64| (-x * x).exp(), 1.0, &opts).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { .. }));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let opts = QuadOptions::default();
        let fwd = integrate(|x: f64| x.exp(), 0.0, 1.0, &opts).unwrap().value;
        let bwd = integrate(|x: f64| x.exp(), 1.0, 0.0, &opts).unwrap().value;
        assert_abs_diff_eq!(fwd, -bwd, epsilon = 1e-14);
    }
}
