//! Box-local Lipschitz constants of the interaction term f.
//!
//! Each K bounds one partial difference quotient of one summand of f on the
//! box 0 ≤ x_i ≤ M_i; column sums give L1..L3 and L = max(L1, L2, L3) bounds
//! ‖f(x) - f(y)‖₁ / ‖x - y‖₁.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::num::Real;

/// Componentwise upper bounds M1, M2, M3 on the state over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateBox<T> {
    #[serde(rename = "M")]
    pub bounds: [T; 3],
}

impl<T: Real> StateBox<T> {
    pub fn new(m1: T, m2: T, m3: T) -> Result<Self> {
        let bounds = [m1, m2, m3];
        for (i, m) in bounds.iter().enumerate() {
            if !(m.is_finite() && *m > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: format!("M{}", i + 1),
                    reason: format!("box bound must be positive and finite, got {m}"),
                });
            }
        }
        Ok(Self { bounds })
    }

    pub fn cube(side: T) -> Result<Self> {
        Self::new(side, side, side)
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        let [a, b, c] = self.bounds;
        Self::new(a * factor, b * factor, c * factor)
    }

    /// Inside the box up to `slack` below zero.
    pub fn contains(&self, x: &State<T>, slack: T) -> bool {
        x.0.iter()
            .zip(self.bounds.iter())
            .all(|(v, m)| *v >= -slack && *v <= *m)
    }
}

/// Formulas for K8, K11 and K12. `Literal` is the closed form commonly quoted
/// for this model; `Derived` follows the term-by-term estimates, which keep
/// γ in K8, square c4 in K11 and carry M3 in K12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzVariant {
    /// K8 = BM1/c1 + 2γM2, K11 = 2ξβM1M2M3/(h c4²), K12 = ξβM1²M3/(h c4²).
    #[default]
    Derived,
    /// K8 = BM1/c1 + 2M2, K11 = 2ξβM1M2M3/(h c4⁴), K12 = ξβM1²/(h c4²).
    Literal,
}

impl LipschitzVariant {
    pub fn corrections(self) -> Vec<&'static str> {
        match self {
            LipschitzVariant::Derived => vec![
                "K8 keeps the competition factor: B*M1/c1 + 2*gamma*M2",
                "K11 divides by h*c4^2 (not h*c4^4)",
                "K12 carries the M3 factor from the x3 multiplier: xi*beta*M1^2*M3/(h*c4^2)",
            ],
            LipschitzVariant::Literal => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport<T> {
    /// K1..K13 (index 0 holds K1).
    pub k: [T; 13],
    pub l1: T,
    pub l2: T,
    pub l3: T,
    pub l: T,
    pub variant: LipschitzVariant,
    pub params: ModelParams<T>,
    pub bounds: StateBox<T>,
}

impl<T: Real> LipschitzReport<T> {
    /// Flat JSON document: K1..K13, L1..L3, L, parameters, box and the
    /// corrections that were applied.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (i, k) in self.k.iter().enumerate() {
            map.insert(format!("K{}", i + 1), k.as_f64().into());
        }
        map.insert("L1".into(), self.l1.as_f64().into());
        map.insert("L2".into(), self.l2.as_f64().into());
        map.insert("L3".into(), self.l3.as_f64().into());
        map.insert("L".into(), self.l.as_f64().into());
        map.insert("variant".into(), serde_json::to_value(self.variant).unwrap());
        map.insert("corrections".into(), serde_json::to_value(self.variant.corrections()).unwrap());
        map.insert("params".into(), serde_json::to_value(self.params.to_f64()).unwrap());
        let [m1, m2, m3] = self.bounds.bounds;
        map.insert(
            "box".into(),
            serde_json::json!({"M1": m1.as_f64(), "M2": m2.as_f64(), "M3": m3.as_f64()}),
        );
        serde_json::Value::Object(map)
    }
}

pub fn lipschitz_constants<T: Real>(
    p: &ModelParams<T>,
    bounds: &StateBox<T>,
) -> Result<LipschitzReport<T>> {
    lipschitz_constants_with(p, bounds, LipschitzVariant::Derived)
}

pub fn lipschitz_constants_with<T: Real>(
    p: &ModelParams<T>,
    bounds: &StateBox<T>,
    variant: LipschitzVariant,
) -> Result<LipschitzReport<T>> {
    let zero = T::zero();
    let two = T::lit(2.0);
    let [m1, m2, m3] = bounds.bounds;
    // Zero numerators give zero constants; zero denominators are only fatal
    // under a nonzero numerator.
    let q = |num: T, den: T, name: &'static str| -> Result<T> {
        if num == zero {
            Ok(zero)
        } else if den == zero {
            Err(Error::SingularParameter { name })
        } else {
            Ok(num / den)
        }
    };
    let xb = p.xi * p.beta_pred;
    let c4sq = p.c4 * p.c4;
    let k8_comp = match variant {
        LipschitzVariant::Derived => two * p.gamma * m2,
        LipschitzVariant::Literal => two * m2,
    };
    let k11_den = match variant {
        LipschitzVariant::Derived => p.h * c4sq,
        LipschitzVariant::Literal => p.h * c4sq * c4sq,
    };
    let k12_num = match variant {
        LipschitzVariant::Derived => xb * m1 * m1 * m3,
        LipschitzVariant::Literal => xb * m1 * m1,
    };
    let k = [
        q(p.big_h * m2, p.c0, "c0")?,
        q(p.big_h * (m1 + p.c0), p.c0, "c0")?,
        q(p.delta * m2, p.c2, "c2")?,
        q(p.delta * m1 * (m1 + p.c2), p.c2 * p.c2, "c2")?,
        q(p.v * m3, p.c3, "c3")?,
        q(p.v * m1 * (m1 + p.c3), p.c3 * p.c3, "c3")?,
        q(p.big_b * m2, p.c1, "c1")?,
        q(p.big_b * m1, p.c1, "c1")? + k8_comp,
        q(p.beta_pred * m3, p.h, "h")?,
        q(p.beta_pred * m2, p.h, "h")?,
        q(two * xb * m1 * m2 * m3, k11_den, if p.h == zero { "h" } else { "c4" })?,
        q(k12_num, p.h * c4sq, if p.h == zero { "h" } else { "c4" })?,
        q(xb * m1 * m1 * m2, p.h * c4sq, if p.h == zero { "h" } else { "c4" })?,
    ];
    let l1 = k[0] + k[2] + k[4] + k[6] + k[10];
    let l2 = k[1] + k[3] + k[7] + k[8] + k[11];
    let l3 = k[5] + k[9] + k[12];
    Ok(LipschitzReport {
        k,
        l1,
        l2,
        l3,
        l: l1.max(l2).max(l3),
        variant,
        params: *p,
        bounds: *bounds,
    })
}

const PAIRS_PER_STREAM: usize = 1024;

/// Largest sampled ratio ‖f(x) - f(y)‖₁ / ‖x - y‖₁ over `n_samples`
/// independent uniform pairs in the box.
///
/// Pairs are drawn in fixed-size blocks, block `b` from the ChaCha stream
/// `b` of `seed`, so the result does not depend on the thread count.
pub fn empirical_lipschitz<T: Real>(
    p: &ModelParams<T>,
    bounds: &StateBox<T>,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    if n_samples < 2 {
        return Err(Error::Precondition("empirical_lipschitz needs n_samples ≥ 2".into()));
    }
    let n_blocks = n_samples.div_ceil(PAIRS_PER_STREAM);
    let tiny = T::lit(1e-12);
    let per_block: Result<Vec<T>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = PAIRS_PER_STREAM.min(n_samples - b * PAIRS_PER_STREAM);
            let mut best = T::zero();
            let draw = |rng: &mut ChaCha8Rng| -> [T; 3] {
                let mut x = [T::zero(); 3];
                for (xi, m) in x.iter_mut().zip(bounds.bounds.iter()) {
                    *xi = T::lit(rng.gen::<f64>()) * *m;
                }
                x
            };
            for _ in 0..count {
                let x = draw(&mut rng);
                let y = draw(&mut rng);
                let dist: T = (0..3).map(|i| (x[i] - y[i]).abs()).sum();
                if dist < tiny {
                    continue;
                }
                let fx = p.nonlinear(&x)?;
                let fy = p.nonlinear(&y)?;
                let df: T = (0..3).map(|i| (fx[i] - fy[i]).abs()).sum();
                best = best.max(df / dist);
            }
            Ok(best)
        })
        .collect();
    Ok(per_block?.into_iter().fold(T::zero(), T::max))
}
