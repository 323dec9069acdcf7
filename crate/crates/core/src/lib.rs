//! Generalized multipartite Bell inequality toolkit.
//!
//! For `n` sites that each choose between two dichotomic measurements, the
//! `2^n` correlation values `E(k)` are mapped to coefficients
//! `c_j = 2^{-n} Σ_k (-1)^{k·j} E(k)`. Every local-hidden-variable model
//! satisfies `Σ_j |c_j| <= 1`; quantum states can exceed it.
//!
//! - [`correlation`]: correlation values, coefficients and the sign transform.
//! - [`quantum`]: exact statevector probabilities and correlations.
//! - [`ghz`]: closed forms for `α|0…0⟩ + β|1…1⟩`.
//! - [`lhv`]: deterministic strategies and mixtures.
//! - [`optimize`]: grid scans and multi-start refinement over phases.
//! - [`io`]: settings files and scan exports.
//!
//! ```
//! use gbell::{ghz, GhzParams};
//!
//! let params = GhzParams::balanced(4).unwrap();
//! let settings = ghz::optimal_settings(&params).unwrap();
//! let value = ghz::prediction_closed_form(&params, &settings).unwrap();
//! assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
//! assert!(ghz::violates(&params));
//! ```

pub mod correlation;
pub mod error;
pub mod ghz;
pub mod io;
pub mod lhv;
pub mod optimize;
pub mod quantum;

pub use correlation::{
    coefficients_from_probabilities, coefficients_from_values, sum_abs, CorrelationTensor,
    CorrelationValues, ProbabilityTable,
};
pub use error::{Error, Result};
pub use ghz::{AngleDecomposition, GhzParams, TwoAngleConfig};
pub use lhv::{DeterministicStrategy, LhvMixture};
pub use optimize::{Axis, RefineResult, ScanGrid, ScanResult};
pub use quantum::{MeasurementSettings, OutcomeDistribution, PureState};

pub use num_complex::Complex64;

/// Quantum prediction `Σ|q|` obtained the long way: statevector
/// probabilities, correlation values, then the coefficient transform.
pub fn transform_path_prediction(
    state: &PureState,
    settings: &MeasurementSettings,
    config: &quantum::SimConfig,
) -> Result<f64> {
    let values = quantum::correlation_values_all_with(state, settings, config)?;
    Ok(coefficients_from_values(&values).sum_abs())
}
