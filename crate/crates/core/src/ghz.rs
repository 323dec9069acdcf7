//! Closed-form quantum predictions for generalized GHZ states
//! `α|0…0⟩ + β|1…1⟩`.
//!
//! Every prediction is written in terms of the half-angles
//! `α_l = (φ_l^1 + φ_l^0)/2` and `β_l = (φ_l^1 - φ_l^0)/2` and the state
//! phase `φ`, defined by `αβ* = |αβ*| e^{-iφ}`:
//!
//! ```text
//! Σ|q| = |αβ*| { (|cos Θ| + |sin Θ|) Π_l (|cos β_l| + |sin β_l|)
//!              + (|cos Θ| - |sin Θ|) Π_l (|cos β_l| - |sin β_l|) },   Θ = φ + Σ_l α_l
//! ```
//!
//! The maximum `|αβ*| 2^{(n+1)/2}` is reached when `Θ` and every `β_l` are
//! odd multiples of `π/4`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::correlation::{PATH_TOL, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::quantum::{MeasurementSettings, PureState};

/// Parameters of the state `α|0…0⟩ + β|1…1⟩` on `n` qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzParams {
    n: usize,
    alpha: Complex64,
    beta: Complex64,
}

impl GhzParams {
    /// Requires `n >= 1` and `|α|² + |β|² = 1` within `1e-12`.
    pub fn new(n: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("number of qubits must be positive"));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > PATH_TOL {
            return Err(Error::validation(format!(
                "|alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self { n, alpha, beta })
    }

    /// Rescales `(α, β)` to unit norm; fails only when both are zero.
    pub fn normalized(n: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalize a zero state"));
        }
        Self::new(n, alpha / norm, beta / norm)
    }

    pub fn real(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(n, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// `α = β = 1/√2`.
    pub fn balanced(n: usize) -> Result<Self> {
        Self::real(n, FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    }

    /// `α = cos ξ`, `β = sin ξ`.
    pub fn from_angle(n: usize, xi: f64) -> Result<Self> {
        Self::real(n, xi.cos(), xi.sin())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `αβ*`.
    pub fn overlap(&self) -> Complex64 {
        self.alpha * self.beta.conj()
    }

    /// `|αβ*|`.
    pub fn abs_overlap(&self) -> f64 {
        self.overlap().norm()
    }

    /// `φ = -arg(αβ*)`, so that `αβ* = |αβ*| e^{-iφ}`.
    pub fn phase(&self) -> f64 {
        -self.overlap().arg()
    }

    /// Both amplitudes multiplied by `e^{iχ}`.
    pub fn with_global_phase(&self, chi: f64) -> Self {
        let f = Complex64::from_polar(1.0, chi);
        Self {
            n: self.n,
            alpha: self.alpha * f,
            beta: self.beta * f,
        }
    }

    pub fn statevector(&self) -> Result<PureState> {
        PureState::ghz(self.n, self.alpha, self.beta)
    }
}

/// Sum and difference half-angles of a measurement configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleDecomposition {
    /// `Σ_l α_l`, also written `β_0`.
    pub sum_alpha: f64,
    /// `β_1 … β_n`.
    pub betas: Vec<f64>,
}

pub fn decompose(settings: &MeasurementSettings) -> AngleDecomposition {
    let mut sum_alpha = 0.0;
    let mut betas = Vec::with_capacity(settings.n());
    for p in settings.phases() {
        sum_alpha += (p[1] + p[0]) / 2.0;
        betas.push((p[1] - p[0]) / 2.0);
    }
    AngleDecomposition { sum_alpha, betas }
}

/// Inverse of [`decompose`] given the per-site `α_l`:
/// `φ_l^0 = α_l - β_l`, `φ_l^1 = α_l + β_l`.
pub fn settings_from_half_angles(alphas: &[f64], betas: &[f64]) -> Result<MeasurementSettings> {
    if alphas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            what: "beta half-angles",
            expected: alphas.len(),
            found: betas.len(),
        });
    }
    MeasurementSettings::new(
        alphas
            .iter()
            .zip(betas)
            .map(|(a, b)| [a - b, a + b])
            .collect(),
    )
}

fn check_n(params: &GhzParams, settings: &MeasurementSettings) -> Result<()> {
    if settings.n() != params.n {
        return Err(Error::DimensionMismatch {
            what: "measurement settings",
            expected: params.n,
            found: settings.n(),
        });
    }
    Ok(())
}

/// `E = 2 Re[αβ* e^{-i Σ_l φ_l^{k_l}}]` for setting choice `k`.
pub fn ghz_correlation(
    params: &GhzParams,
    settings: &MeasurementSettings,
    k: usize,
) -> Result<f64> {
    check_n(params, settings)?;
    if k >> params.n != 0 {
        return Err(Error::validation(format!(
            "setting choice {k} is out of range for n = {}",
            params.n
        )));
    }
    let rot = Complex64::from_polar(1.0, -settings.phase_sum(k));
    Ok(2.0 * (params.overlap() * rot).re)
}

/// `(|cos x| + |sin x|, |cos x| - |sin x|)`.
#[inline]
pub(crate) fn abs_trig_pair(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let (s, c) = (s.abs(), c.abs());
    (c + s, c - s)
}

/// The closed-form prediction from `|αβ*|`, `Θ = φ + Σα_l` and the `β_l`.
pub(crate) fn prediction_from_angles(abs_overlap: f64, theta: f64, betas: &[f64]) -> f64 {
    let (tp, tm) = abs_trig_pair(theta);
    let mut plus = 1.0;
    let mut minus = 1.0;
    for &b in betas {
        let (p, m) = abs_trig_pair(b);
        plus *= p;
        minus *= m;
    }
    abs_overlap * (tp * plus + tm * minus)
}

/// Exact quantum prediction `Σ_j |q_j|` for a generalized GHZ state, valid
/// for complex `α, β`.
pub fn prediction_closed_form(params: &GhzParams, settings: &MeasurementSettings) -> Result<f64> {
    check_n(params, settings)?;
    let d = decompose(settings);
    Ok(prediction_from_angles(
        params.abs_overlap(),
        params.phase() + d.sum_alpha,
        &d.betas,
    ))
}

/// `|αβ*| 2^{(n+1)/2}`, the maximum of the prediction over all settings.
pub fn max_prediction(params: &GhzParams) -> f64 {
    params.abs_overlap() * 2f64.powf((params.n as f64 + 1.0) / 2.0)
}

/// One representative of the optimal family: site 1 measures at
/// `(-φ, π/2 - φ)` and every other site at `(-π/4, π/4)`, which puts
/// `Θ` and all `β_l` at `π/4`.
///
/// Any configuration with `Θ` and all `β_l` equal to `(2k+1)π/4` is optimal
/// as well.
pub fn optimal_settings(params: &GhzParams) -> Result<MeasurementSettings> {
    if params.abs_overlap() == 0.0 {
        return Err(Error::NoOptimum);
    }
    let shift = params.phase();
    let mut phases = vec![[-FRAC_PI_4, FRAC_PI_4]; params.n];
    phases[0] = [-shift, FRAC_PI_2 - shift];
    MeasurementSettings::new(phases)
}

/// The two-angle family: sites `1..=l` measure at `(0, θ1)` and sites
/// `l+1..=n` at `(θ2, -θ2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAngleConfig {
    n: usize,
    l: usize,
    pub theta1: f64,
    pub theta2: f64,
}

impl TwoAngleConfig {
    pub fn new(n: usize, l: usize, theta1: f64, theta2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("number of qubits must be positive"));
        }
        if l > n {
            return Err(Error::validation(format!(
                "l = {l} is out of range 0..={n}"
            )));
        }
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::validation("two-angle parameters must be finite"));
        }
        Ok(Self {
            n,
            l,
            theta1,
            theta2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn settings(&self) -> MeasurementSettings {
        let phases = (0..self.n)
            .map(|i| {
                if i < self.l {
                    [0.0, self.theta1]
                } else {
                    [self.theta2, -self.theta2]
                }
            })
            .collect();
        MeasurementSettings::new(phases).expect("finite angles")
    }
}

/// Prediction over the two-angle family, evaluated with its own product
/// formula rather than through [`prediction_closed_form`]:
///
/// ```text
/// |αβ| [ (|cos lθ1/2| + |sin lθ1/2|)(|cos θ1/2| + |sin θ1/2|)^l (|cos θ2| + |sin θ2|)^{n-l}
///      + (|cos lθ1/2| - |sin lθ1/2|)(|cos θ1/2| - |sin θ1/2|)^l (|cos θ2| - |sin θ2|)^{n-l} ]
/// ```
///
/// Requires `αβ*` to be real (the formula has no state phase).
pub fn two_angle_prediction(params: &GhzParams, cfg: &TwoAngleConfig) -> Result<f64> {
    if cfg.n != params.n {
        return Err(Error::DimensionMismatch {
            what: "two-angle configuration",
            expected: params.n,
            found: cfg.n,
        });
    }
    let w = params.overlap();
    if w.im.abs() > STRUCTURAL_TOL * w.norm().max(1.0) {
        return Err(Error::validation(
            "the two-angle formula requires real alpha * conj(beta)",
        ));
    }
    let l = cfg.l as i32;
    let rest = (cfg.n - cfg.l) as i32;
    let lead = cfg.l as f64 * cfg.theta1 / 2.0;
    let (c0, s0) = (lead.cos().abs(), lead.sin().abs());
    let (c1, s1) = (
        (cfg.theta1 / 2.0).cos().abs(),
        (cfg.theta1 / 2.0).sin().abs(),
    );
    let (c2, s2) = (cfg.theta2.cos().abs(), cfg.theta2.sin().abs());
    let first = (c0 + s0) * (c1 + s1).powi(l) * (c2 + s2).powi(rest);
    let second = (c0 - s0) * (c1 - s1).powi(l) * (c2 - s2).powi(rest);
    Ok(w.norm() * (first + second))
}

/// `2^{-(n+1)/2}`, the value `|αβ*|` must exceed for a violation.
pub fn violation_threshold(n: usize) -> f64 {
    2f64.powf(-(n as f64 + 1.0) / 2.0)
}

/// `|αβ*| > 2^{-(n+1)/2}`: the optimal settings push the prediction above
/// the local bound 1. Equality does not violate.
pub fn violates(params: &GhzParams) -> bool {
    params.abs_overlap() > violation_threshold(params.n)
}

/// `2^{-(n-1)/2}`, the threshold on `sin 2ξ` for `α = cos ξ`, `β = sin ξ`.
pub fn angle_threshold(n: usize) -> f64 {
    2f64.powf(-(n as f64 - 1.0) / 2.0)
}

/// Violation test for `α = cos ξ`, `β = sin ξ`: `|sin 2ξ| > 2^{-(n-1)/2}`.
///
/// Uses `|sin 2ξ| = 2|αβ|` so that it agrees with [`violates`] for every `ξ`,
/// including those where `β/α < 0`.
pub fn violates_angle(n: usize, xi: f64) -> bool {
    (2.0 * xi).sin().abs() > angle_threshold(n)
}
