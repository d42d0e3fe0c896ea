//! Explicit free p-elastica `Γ_λ`, threshold constants, comparison profiles and
//! the exact minimizer for symmetric cone obstacles.

mod comparison;
mod cone;
mod elastica;

pub use comparison::{
    c_p_of, clamped_test_function, comparison_uc, comparison_uc_slope, profile_u0, reparam_graph_to_arclength,
    ArcLengthCurve,
};
pub use cone::{exact_cone_minimizer, ConeMinimizer};
pub use elastica::{
    curvature_k, endpoint_constants, gamma, h_star, omega_lambda, polar_tangential_tan, CurveSamples, PElasticaCurve,
};

use crate::scalar::Real;

/// Conjugate exponent `p′ = p/(p−1)`.
pub fn conjugate<T: Real>(p: T) -> T {
    p / (p - T::one())
}
