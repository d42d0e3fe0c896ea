//! Graph p-elastica above obstacles.
//!
//! The crate covers generalized trigonometric functions, the explicit free
//! p-elastica family, discrete energies `∫|G(u′)′|^p`, a projected solver for the
//! obstacle problem, post-solve diagnostics and the symmetric rearrangement
//! competitor. Numerical routines are generic over [`Real`] (`f32`/`f64`); the
//! aliases below fix the scalar to `f64`.

pub mod curves;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod gentrig;
pub mod quad;
pub mod rearrange;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type GenTrigParams = gentrig::GenTrigParams<f64>;
pub type EuP = energy::EuP<f64>;
pub type GridFunction = energy::GridFunction<f64>;
pub type PElasticaCurve = curves::PElasticaCurve<f64>;
pub type CurveSamples = curves::CurveSamples<f64>;
pub type ConeMinimizer = curves::ConeMinimizer<f64>;
pub type ArcLengthCurve = curves::ArcLengthCurve<f64>;
pub type Obstacle = solver::Obstacle<f64>;
pub type MinimizeOptions = solver::MinimizeOptions<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type DiagnosticsReport = diagnostics::DiagnosticsReport<f64>;
pub type RearrangementResult = rearrange::RearrangementResult<f64>;
