//! The plankton–oxygen system d^α x = A x + f(x): parameters, state, the
//! diagonal linear part A and the nonlinear interaction term f.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Components within this distance below zero are treated as roundoff.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// The sixteen model parameters. Every field is nonnegative.
///
/// Serialized names spell out the symbols; the predation rate is
/// `beta_pred` so it cannot be confused with a fractional order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<T> {
    /// Half-saturation constant for oxygen production.
    pub c0: T,
    /// Half-saturation constant for phytoplankton growth.
    pub c1: T,
    /// Half-saturation constant for phytoplankton respiration.
    pub c2: T,
    /// Half-saturation constant for zooplankton respiration.
    pub c3: T,
    /// Half-saturation constant for zooplankton feeding efficiency.
    pub c4: T,
    /// Half-saturation constant for zooplankton predation.
    pub h: T,
    /// Environmental factor on oxygen production (H).
    #[serde(rename = "H")]
    pub big_h: T,
    pub delta: T,
    pub v: T,
    /// Maximum phytoplankton growth rate (B).
    #[serde(rename = "B")]
    pub big_b: T,
    pub beta_pred: T,
    pub xi: T,
    pub m: T,
    pub gamma: T,
    pub sigma: T,
    pub mu: T,
}

impl<T: Real> ModelParams<T> {
    /// Every parameter set to the same value.
    pub fn uniform(value: T) -> Self {
        Self {
            c0: value,
            c1: value,
            c2: value,
            c3: value,
            c4: value,
            h: value,
            big_h: value,
            delta: value,
            v: value,
            big_b: value,
            beta_pred: value,
            xi: value,
            m: value,
            gamma: value,
            sigma: value,
            mu: value,
        }
    }

    pub fn all_ones() -> Self {
        Self::uniform(T::one())
    }

    /// Decoupled linear decay: all interaction coefficients zero, unit
    /// half-saturation constants.
    pub fn linear(m: T, sigma: T, mu: T) -> Self {
        let zero = T::zero();
        Self {
            big_h: zero,
            delta: zero,
            v: zero,
            big_b: zero,
            beta_pred: zero,
            xi: zero,
            gamma: zero,
            m,
            sigma,
            mu,
            ..Self::all_ones()
        }
    }

    pub fn named_fields(&self) -> [(&'static str, T); 16] {
        [
            ("c0", self.c0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("h", self.h),
            ("H", self.big_h),
            ("delta", self.delta),
            ("v", self.v),
            ("B", self.big_b),
            ("beta_pred", self.beta_pred),
            ("xi", self.xi),
            ("m", self.m),
            ("gamma", self.gamma),
            ("sigma", self.sigma),
            ("mu", self.mu),
        ]
    }

    /// Checks nonnegativity and that each half-saturation constant is
    /// positive whenever the coefficient it divides is.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_fields() {
            if !value.is_finite() || value < T::zero() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be a finite nonnegative number, got {value}"),
                });
            }
        }
        let zero = T::zero();
        let pairs = [
            ("c0", self.c0, "H", self.big_h),
            ("c1", self.c1, "B", self.big_b),
            ("c2", self.c2, "delta", self.delta),
            ("c3", self.c3, "v", self.v),
            ("c4", self.c4, "xi*beta_pred", self.xi * self.beta_pred),
            ("h", self.h, "beta_pred", self.beta_pred),
        ];
        for (name, constant, coef_name, coef) in pairs {
            if coef > zero && constant == zero {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("must be positive because {coef_name} > 0"),
                });
            }
        }
        Ok(())
    }

    pub fn linear_part(&self) -> LinearPart<T> {
        LinearPart {
            diag: [-self.m, -self.sigma, -self.mu],
        }
    }

    /// True when f vanishes identically.
    pub fn is_linear(&self) -> bool {
        let zero = T::zero();
        self.big_h == zero
            && self.delta == zero
            && self.v == zero
            && self.big_b == zero
            && self.gamma == zero
            && self.beta_pred == zero
    }

    /// Short hex digest of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        crate::digest::fingerprint(&self.to_f64())
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams {
            c0: self.c0.as_f64(),
            c1: self.c1.as_f64(),
            c2: self.c2.as_f64(),
            c3: self.c3.as_f64(),
            c4: self.c4.as_f64(),
            h: self.h.as_f64(),
            big_h: self.big_h.as_f64(),
            delta: self.delta.as_f64(),
            v: self.v.as_f64(),
            big_b: self.big_b.as_f64(),
            beta_pred: self.beta_pred.as_f64(),
            xi: self.xi.as_f64(),
            m: self.m.as_f64(),
            gamma: self.gamma.as_f64(),
            sigma: self.sigma.as_f64(),
            mu: self.mu.as_f64(),
        }
    }

    /// f(x) on a raw triple. Terms whose rate coefficient is zero are skipped; any
    /// other vanishing denominator is an error.
    pub fn nonlinear(&self, x: &[T; 3]) -> Result<[T; 3]> {
        let zero = T::zero();
        let [x1, x2, x3] = *x;
        let ratio = |coef: T, rest: T, den: T, name: &'static str| -> Result<T> {
            if coef == zero {
                Ok(zero)
            } else if den == zero {
                Err(Error::SingularParameter { name })
            } else {
                Ok(coef * rest / den)
            }
        };
        let production = ratio(self.big_h, self.c0 * x2, x1 + self.c0, "c0")?;
        let phyto_resp = ratio(self.delta, x2 * x1, x1 + self.c2, "c2")?;
        let zoo_resp = ratio(self.v, x1 * x3, x1 + self.c3, "c3")?;
        let growth = ratio(self.big_b, x1, x1 + self.c1, "c1")?;
        let predation = ratio(self.beta_pred, x2 * x3, x2 + self.h, "h")?;
        let feeding = ratio(self.xi, x1 * x1, x1 * x1 + self.c4 * self.c4, "c4")?;
        Ok([
            production - phyto_resp - zoo_resp,
            (growth - self.gamma * x2) * x2 - predation,
            feeding * predation,
        ])
    }

    /// A x + f(x) on a raw triple.
    pub fn full(&self, x: &[T; 3]) -> Result<[T; 3]> {
        let f = self.nonlinear(x)?;
        let a = self.linear_part();
        Ok([
            a.diag[0] * x[0] + f[0],
            a.diag[1] * x[1] + f[1],
            a.diag[2] * x[2] + f[2],
        ])
    }
}

impl<T: Real + DeserializeOwned> ModelParams<T> {
    /// Parses a parameter document: a flat JSON object holding exactly the
    /// sixteen fields plus an optional `metadata` entry.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(value)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let serde_json::Value::Object(mut map) = value else {
            return Err(Error::Parse("parameter document must be a JSON object".into()));
        };
        map.remove("metadata");
        let params: Self = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::Parse(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }
}

/// Concentrations (oxygen, phytoplankton, zooplankton).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State<T>(pub [T; 3]);

/// Sign classification of a state against [`NEGATIVE_SLACK`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignStatus {
    Nonnegative,
    /// Some component in [-slack, 0): accepted, but flagged.
    Roundoff,
    Negative,
}

impl<T: Real> State<T> {
    /// Validated constructor: every component finite and ≥ 0.
    pub fn new(x1: T, x2: T, x3: T) -> Result<Self> {
        let s = Self([x1, x2, x3]);
        for (i, v) in s.0.iter().enumerate() {
            if !v.is_finite() || *v < T::zero() {
                return Err(Error::InvalidParameter {
                    name: format!("x{}", i + 1),
                    reason: format!("concentration must be finite and nonnegative, got {v}"),
                });
            }
        }
        Ok(s)
    }

    pub fn zero() -> Self {
        Self([T::zero(); 3])
    }

    pub fn x1(&self) -> T {
        self.0[0]
    }
    pub fn x2(&self) -> T {
        self.0[1]
    }
    pub fn x3(&self) -> T {
        self.0[2]
    }

    pub fn one_norm(&self) -> T {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn sign_status(&self) -> SignStatus {
        let slack = T::lit(NEGATIVE_SLACK);
        if self.0.iter().any(|v| v.is_nan() || *v < -slack) {
            SignStatus::Negative
        } else if self.0.iter().any(|v| *v < T::zero()) {
            SignStatus::Roundoff
        } else {
            SignStatus::Nonnegative
        }
    }
}

/// Diagonal linear part A = diag(-m, -σ, -μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearPart<T> {
    pub diag: [T; 3],
}

impl<T: Real> LinearPart<T> {
    /// Entrywise 1-norm Σ|a_ij| = m + σ + μ.
    pub fn one_norm(&self) -> T {
        self.diag.iter().map(|v| v.abs()).sum()
    }
}

pub fn rhs_nonlinear<T: Real>(p: &ModelParams<T>, x: &State<T>) -> Result<[T; 3]> {
    p.nonlinear(&x.0)
}

pub fn rhs_full<T: Real>(p: &ModelParams<T>, x: &State<T>) -> Result<[T; 3]> {
    p.full(&x.0)
}

pub fn one_norm_state<T: Real>(x: &State<T>) -> T {
    x.one_norm()
}
