//! Box-local Lipschitz constants of the interaction term and bounds for
//! singular Grönwall-type integral inequalities.

mod gronwall;
mod lipschitz;

pub use gronwall::{
    gronwall_bound_constant_q, gronwall_bound_constant_q_with_tol, gronwall_bound_general,
    gronwall_bound_general_with_tol, gronwall_bound_ml, GronwallBound, GronwallProblem, Profile,
    DEFAULT_REL_TOL, DEFAULT_TERMS,
};
pub use lipschitz::{
    empirical_lipschitz, lipschitz_constants, lipschitz_constants_with, LipschitzReport,
    LipschitzVariant, StateBox,
};
