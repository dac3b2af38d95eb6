//! Classical fixed-step fourth-order Runge–Kutta at α = 1.

use super::{accept_state, check_inputs, trajectory, Method, SolverConfig, Trajectory};
use crate::error::Result;
use crate::model::{ModelParams, State};
use crate::num::Real;

pub fn solve_rk4_classical<T: Real>(
    p: &ModelParams<T>,
    x0: &State<T>,
    cfg: &SolverConfig<T>,
) -> Result<Trajectory<T>> {
    check_inputs(p, x0, cfg, Method::Rk4Classical)?;
    let h = cfg.step();
    let half = T::lit(0.5) * h;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let shift = |x: &[T; 3], k: &[T; 3], s: T| [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2]];

    let mut states = Vec::with_capacity(cfg.n_steps + 1);
    states.push(*x0);
    let mut roundoff = Vec::new();
    let mut x = x0.0;
    for step in 1..=cfg.n_steps {
        let k1 = p.full(&x)?;
        let k2 = p.full(&shift(&x, &k1, half))?;
        let k3 = p.full(&shift(&x, &k2, half))?;
        let k4 = p.full(&shift(&x, &k3, h))?;
        for i in 0..3 {
            x[i] = x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        states.push(accept_state(step, x, &mut roundoff)?);
    }
    Ok(trajectory(p, cfg, states, roundoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_error(n: usize) -> f64 {
        let p = ModelParams::linear(1.0, 1.0, 1.0);
        let cfg = SolverConfig::new(1.0, 1.0, n, Method::Rk4Classical).unwrap();
        let tr = solve_rk4_classical(&p, &State([1.0; 3]), &cfg).unwrap();
        let x: f64 = tr.final_state().0[0];
        (x - (-1.0f64).exp()).abs()
    }

    #[test]
    fn linear_decay_and_order() {
        assert!(linear_error(256) < 1e-10);
        let ratio = linear_error(16) / linear_error(32);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn first_step_follows_initial_slope() {
        let p = ModelParams::all_ones();
        let cfg = SolverConfig::new(1.0, 1e-6, 8, Method::Rk4Classical).unwrap();
        let tr = solve_rk4_classical(&p, &State([1.0; 3]), &cfg).unwrap();
        let h = cfg.step();
        let expected: [f64; 3] = [-1.5, -2.0, -0.75];
        for i in 0..3 {
            let slope = (tr.states[1].0[i] - 1.0) / h;
            assert!((slope - expected[i]).abs() < 1e-5, "{i}: {slope}");
        }
    }
}
