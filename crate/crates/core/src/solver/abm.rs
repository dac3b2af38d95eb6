//! Fractional Adams–Bashforth–Moulton predictor–corrector with full memory:
//! product-rectangle predictor, product-trapezoid corrector.

use super::{accept_state, check_inputs, trajectory, Method, SolverConfig, Trajectory};
use crate::error::Result;
use crate::model::{ModelParams, State};
use crate::num::Real;
use crate::specfun::rgamma;

pub fn solve_abm<T: Real>(p: &ModelParams<T>, x0: &State<T>, cfg: &SolverConfig<T>) -> Result<Trajectory<T>> {
    check_inputs(p, x0, cfg, Method::Abm)?;
    let start = Startup {
        steps: STARTUP_STEPS,
        substeps: cfg.abm_startup_substeps,
    };
    let (states, roundoff) = abm_states(p, x0, cfg.alpha(), cfg.step(), cfg.n_steps, start)?;
    Ok(trajectory(p, cfg, states, roundoff))
}

/// Leading coarse steps that are resolved on a finer grid.
pub const STARTUP_STEPS: usize = 1;

/// The first `steps` intervals are integrated with `substeps` times smaller
/// steps; the coarse recursion then carries that fine history through
/// product weights on the fine intervals.
#[derive(Debug, Clone, Copy)]
struct Startup {
    steps: usize,
    substeps: usize,
}

impl Startup {
    const PLAIN: Startup = Startup { steps: 0, substeps: 1 };

    fn active(&self, n: usize) -> bool {
        self.substeps > 1 && self.steps > 0 && n > 0
    }
}

/// Rectangle weight ∫ (t-s)^{α-1} ds and the two hat-function weights of
/// the trapezoid rule over [t - a, t - c], without the 1/Γ(α) factor.
fn interval_weights<T: Real>(alpha: T, a: T, c: T) -> (T, T, T) {
    let one = T::one();
    let width = a - c;
    if c > T::lit(20.0) * width {
        // Far from the singularity: 5-point Gauss–Legendre avoids the
        // cancellation in differences of nearly equal powers.
        const NODES: [(f64, f64); 5] = [
            (0.0, 0.568_888_888_888_888_9),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let half = width * T::lit(0.5);
        let mid = c + half;
        let (mut rect, mut left, mut right) = (T::zero(), T::zero(), T::zero());
        for (x, w) in NODES {
            let u = mid + half * T::lit(x);
            let k = T::lit(w) * half * u.powf(alpha - one);
            rect = rect + k;
            left = left + k * (u - c) / width;
            right = right + k * (a - u) / width;
        }
        return (rect, left, right);
    }
    let i0 = (a.powf(alpha) - c.powf(alpha)) / alpha;
    let i1 = (a.powf(alpha + one) - c.powf(alpha + one)) / (alpha + one);
    (i0, (i1 - c * i0) / width, (a * i0 - i1) / width)
}

fn abm_states<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    alpha: T,
    h: T,
    n: usize,
    start: Startup,
) -> Result<(Vec<State<T>>, Vec<usize>)> {
    let one = T::one();
    let h_alpha = h.powf(alpha);
    let pred_scale = h_alpha * rgamma(alpha + one);
    let corr_scale = h_alpha * rgamma(alpha + T::lit(2.0));

    // pow_a[m] = m^α, pow_a1[m] = m^{α+1}
    let pow_a: Vec<T> = (0..=n + 1).map(|m| T::from_usize_lossy(m).powf(alpha)).collect();
    let pow_a1: Vec<T> = (0..=n + 1).map(|m| T::from_usize_lossy(m).powf(alpha + one)).collect();
    // predictor weight for lag m = k - j: (m+1)^α - m^α
    let b: Vec<T> = (0..=n).map(|m| pow_a[m + 1] - pow_a[m]).collect();
    // corrector weight for lag m = k - j ≥ 0, j ≥ 1: (m+2)^{α+1} + m^{α+1} - 2(m+1)^{α+1}
    let a: Vec<T> = (0..n).map(|m| pow_a1[m + 2] + pow_a1[m] - T::lit(2.0) * pow_a1[m + 1]).collect();

    let y0 = x0.0;
    let mut states = Vec::with_capacity(n + 1);
    states.push(*x0);
    let mut rhs: Vec<[T; 3]> = Vec::with_capacity(n + 1);
    rhs.push(p.full(&y0)?);
    let mut roundoff = Vec::new();

    // Fine start: coarse nodes 1..=j0 come from the nested run, and the
    // history over [0, j0 h] is integrated on its grid.
    let mut j0 = 0;
    let mut fine: Option<(T, Vec<[T; 3]>)> = None;
    if start.active(n) {
        j0 = start.steps.min(n);
        let s = start.substeps;
        let fine_h = h / T::from_usize_lossy(s);
        let (fs, fr) = abm_states(p, x0, alpha, fine_h, j0 * s, Startup::PLAIN)?;
        for &step in &fr {
            let coarse = step.div_ceil(s);
            if roundoff.last() != Some(&coarse) {
                roundoff.push(coarse);
            }
        }
        let frhs = fs.iter().map(|x| p.full(&x.0)).collect::<Result<Vec<_>>>()?;
        for k in 1..=j0 {
            states.push(fs[k * s]);
            rhs.push(frhs[k * s]);
        }
        fine = Some((fine_h, frhs));
    }
    let g_a = rgamma(alpha);

    for k in j0..n {
        let mut pred = [T::zero(); 3];
        let mut corr = [T::zero(); 3];
        if let Some((fine_h, frhs)) = &fine {
            // Fine history in absolute units, rescaled to the coarse factors.
            let t = T::from_usize_lossy(k + 1) * h;
            let (pu, cu) = (g_a / pred_scale, g_a / corr_scale);
            for i in 0..frhs.len() - 1 {
                let lo = T::from_usize_lossy(i) * *fine_h;
                let (r, l, rt) = interval_weights(alpha, t - lo, t - lo - *fine_h);
                for c in 0..3 {
                    pred[c] = pred[c] + r * frhs[i][c] * pu;
                    corr[c] = corr[c] + (l * frhs[i][c] + rt * frhs[i + 1][c]) * cu;
                }
            }
            // Coarse history from node j0 on; node j0 only closes the
            // interval to its right.
            for j in j0..=k {
                let m = k - j;
                let w = if j == j0 { pow_a1[m] - (T::from_usize_lossy(m) - alpha) * pow_a[m + 1] } else { a[m] };
                for c in 0..3 {
                    pred[c] = pred[c] + b[m] * rhs[j][c];
                    corr[c] = corr[c] + w * rhs[j][c];
                }
            }
        } else {
            let a0 = pow_a1[k] - (T::from_usize_lossy(k) - alpha) * pow_a[k + 1];
            for (j, fj) in rhs.iter().enumerate() {
                let m = k - j;
                let wa = if j == 0 { a0 } else { a[m] };
                for c in 0..3 {
                    pred[c] = pred[c] + b[m] * fj[c];
                    corr[c] = corr[c] + wa * fj[c];
                }
            }
        }
        let mut yp = [T::zero(); 3];
        for i in 0..3 {
            yp[i] = y0[i] + pred_scale * pred[i];
        }
        let fp = p.full(&yp)?;
        let mut y = [T::zero(); 3];
        for i in 0..3 {
            y[i] = y0[i] + corr_scale * (fp[i] + corr[i]);
        }
        let s = accept_state(k + 1, y, &mut roundoff)?;
        rhs.push(p.full(&s.0)?);
        states.push(s);
    }
    Ok((states, roundoff))
}
