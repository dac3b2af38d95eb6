//! Fractional-order plankton–oxygen model d^α x = A x + f(x), 0 < α ≤ 1:
//! special functions, the model right-hand side, Lipschitz and Grönwall
//! bounds, three integrators and numerical well-posedness certificates.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod analysis;
mod digest;
pub mod error;
pub mod model;
pub mod num;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod wellposed;

pub use digest::fingerprint;
pub use error::{Error, Result};
pub use num::Real;

pub type ModelParams64 = model::ModelParams<f64>;
pub type State64 = model::State<f64>;
pub type StateBox64 = analysis::StateBox<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type PicardDiagnostics64 = solver::PicardDiagnostics<f64>;
pub type LipschitzReport64 = analysis::LipschitzReport<f64>;
pub type FractionalOrder64 = specfun::FractionalOrder<f64>;
