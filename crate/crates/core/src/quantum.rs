//! Exact statevector evaluation of outcome probabilities and correlation
//! functions for equatorial two-outcome measurements.
//!
//! Each site measures in the basis `|m, φ⟩ = (|0⟩ + m e^{-iφ}|1⟩)/√2` with
//! `m = ±1`. Basis states and outcome strings both follow the crate-wide
//! convention: site 1 is the most significant bit. Outcome bit 0 means
//! `m = +1`, bit 1 means `m = -1`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::correlation::{CorrelationValues, PATH_TOL};
use crate::error::{Error, Result};

/// Default ceiling on the number of qubits for statevector evaluation.
pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Rounding below zero that is silently clamped when forming probabilities.
const CLAMP_TOL: f64 = 1e-15;

/// Per-site pairs of local phase angles `(φ_i^0, φ_i^1)`, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSettings {
    phases: Vec<[f64; 2]>,
}

impl MeasurementSettings {
    pub fn new(phases: Vec<[f64; 2]>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::validation("settings need at least one site"));
        }
        for (i, p) in phases.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::validation(format!(
                    "phases[{i}] = {p:?} is not finite"
                )));
            }
        }
        Ok(Self { phases })
    }

    pub fn n(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[[f64; 2]] {
        &self.phases
    }

    /// The angle used at `site` (0-based) when that site picks setting `choice`.
    pub fn phase(&self, site: usize, choice: usize) -> f64 {
        self.phases[site][choice]
    }

    /// `Σ_i φ_i^{k_i}` for the setting-choice index `k`.
    pub fn phase_sum(&self, k: usize) -> f64 {
        let n = self.n();
        self.phases
            .iter()
            .enumerate()
            .map(|(site, p)| p[(k >> (n - 1 - site)) & 1])
            .sum()
    }

    /// Same settings with the two choices at `site` exchanged.
    pub fn with_swapped_site(&self, site: usize) -> Self {
        let mut phases = self.phases.clone();
        phases[site].swap(0, 1);
        Self { phases }
    }

    /// Same settings with sites reordered: new site `i` is old site `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            phases: perm.iter().map(|&p| self.phases[p]).collect(),
        }
    }
}

/// Pure `n`-qubit state in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
    ghz: Option<(Complex64, Complex64)>,
}

impl PureState {
    /// Checks the length is `2^n` (`n >= 1`) and the norm is 1 within `1e-12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > PATH_TOL {
            return Err(Error::validation(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        let ghz = detect_ghz(&amplitudes);
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amplitudes,
            ghz,
        })
    }

    /// `α|0…0⟩ + β|1…1⟩`.
    pub fn ghz(n: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::validation(format!(
                "GHZ statevector needs 1 <= n <= 30, got {n}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = alpha;
        amplitudes[(1 << n) - 1] += beta;
        Self::new(amplitudes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Multiplies every amplitude by `e^{iχ}`.
    pub fn with_global_phase(&self, chi: f64) -> Self {
        let f = Complex64::from_polar(1.0, chi);
        let amplitudes: Vec<Complex64> = self.amplitudes.iter().map(|a| a * f).collect();
        Self {
            n: self.n,
            ghz: detect_ghz(&amplitudes),
            amplitudes,
        }
    }

    /// `(α, β)` when the only nonzero amplitudes sit on `|0…0⟩` and `|1…1⟩`.
    pub fn ghz_pair(&self) -> Option<(Complex64, Complex64)> {
        self.ghz
    }
}

fn detect_ghz(amplitudes: &[Complex64]) -> Option<(Complex64, Complex64)> {
    let last = amplitudes.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    amplitudes[1..last]
        .iter()
        .all(|a| *a == zero)
        .then(|| (amplitudes[0], amplitudes[last]))
}

/// Which evaluation route the simulator takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimPath {
    /// GHZ-shaped states use the two-amplitude shortcut, everything else the
    /// general route.
    #[default]
    Auto,
    /// Always rotate the full statevector into the measurement basis.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub max_qubits: usize,
    pub path: SimPath,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
            path: SimPath::Auto,
        }
    }
}

/// Outcome probabilities for one setting choice `k`, indexed by outcome
/// string (bit 0 = `+1`, bit 1 = `-1`, site 1 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    k: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn setting_choice(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p(m_1, …, m_n)` for outcomes given as `±1`.
    pub fn prob(&self, outcomes: &[i8]) -> f64 {
        let idx = outcomes
            .iter()
            .fold(0usize, |acc, &m| (acc << 1) | usize::from(m < 0));
        self.probs[idx]
    }

    /// `Σ_m p(m) m_1 m_2 ⋯ m_n`, accumulated in ascending outcome order.
    pub fn correlation(&self) -> f64 {
        let mut acc = 0.0;
        for (idx, p) in self.probs.iter().enumerate() {
            if idx.count_ones() % 2 == 0 {
                acc += p;
            } else {
                acc -= p;
            }
        }
        acc
    }
}

fn check_inputs(state: &PureState, settings: &MeasurementSettings, k: usize) -> Result<()> {
    if settings.n() != state.n {
        return Err(Error::DimensionMismatch {
            what: "measurement settings",
            expected: state.n,
            found: settings.n(),
        });
    }
    if k >> state.n != 0 {
        return Err(Error::validation(format!(
            "setting choice {k} is out of range for n = {}",
            state.n
        )));
    }
    Ok(())
}

fn clamp_probability(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("negative probability {p}")))
    }
}

/// Amplitudes `⟨m_1,φ_1| ⊗ ⋯ ⊗ ⟨m_n,φ_n| ψ⟩` for every outcome string, by
/// applying the 2x2 basis change site by site.
fn measurement_basis_amplitudes(
    state: &PureState,
    settings: &MeasurementSettings,
    k: usize,
) -> Vec<Complex64> {
    let n = state.n;
    let mut amps = state.amplitudes.clone();
    for site in 0..n {
        let phi = settings.phase(site, (k >> (n - 1 - site)) & 1);
        // The bra conjugates e^{-iφ}.
        let rot = Complex64::from_polar(FRAC_1_SQRT_2, phi);
        let bit = 1usize << (n - 1 - site);
        for block in amps.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a0 * FRAC_1_SQRT_2;
                let y = *a1 * rot;
                *a0 = x + y;
                *a1 = x - y;
            }
        }
    }
    amps
}

/// The two distinct outcome probabilities of a GHZ-shaped state: for even
/// and for odd parity outcome strings.
fn ghz_parity_probs(n: usize, alpha: Complex64, beta: Complex64, phase_sum: f64) -> (f64, f64) {
    let scale = 0.5f64.powi(n as i32);
    let b = beta * Complex64::from_polar(1.0, phase_sum);
    (
        (alpha + b).norm_sqr() * scale,
        (alpha - b).norm_sqr() * scale,
    )
}

fn use_fast_path(state: &PureState, path: SimPath) -> Option<(Complex64, Complex64)> {
    match path {
        SimPath::Auto => state.ghz_pair(),
        SimPath::General => None,
    }
}

/// Probabilities of all `2^n` outcome strings when every site `i` measures
/// with phase `φ_i^{k_i}`.
pub fn outcome_probabilities(
    state: &PureState,
    settings: &MeasurementSettings,
    k: usize,
) -> Result<OutcomeDistribution> {
    outcome_probabilities_with(state, settings, k, SimPath::Auto)
}

pub fn outcome_probabilities_with(
    state: &PureState,
    settings: &MeasurementSettings,
    k: usize,
    path: SimPath,
) -> Result<OutcomeDistribution> {
    check_inputs(state, settings, k)?;
    let n = state.n;
    let probs = match use_fast_path(state, path) {
        Some((alpha, beta)) => {
            let (even, odd) = ghz_parity_probs(n, alpha, beta, settings.phase_sum(k));
            let (even, odd) = (clamp_probability(even)?, clamp_probability(odd)?);
            (0..1usize << n)
                .map(|m| if m.count_ones() % 2 == 0 { even } else { odd })
                .collect()
        }
        None => measurement_basis_amplitudes(state, settings, k)
            .iter()
            .map(|a| clamp_probability(a.norm_sqr()))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(OutcomeDistribution { n, k, probs })
}

/// `E(φ_1^{k_1}, …, φ_n^{k_n}) = Σ_m p(m) m_1 ⋯ m_n`.
pub fn correlation_value(
    state: &PureState,
    settings: &MeasurementSettings,
    k: usize,
) -> Result<f64> {
    correlation_value_with(state, settings, k, SimPath::Auto)
}

pub fn correlation_value_with(
    state: &PureState,
    settings: &MeasurementSettings,
    k: usize,
    path: SimPath,
) -> Result<f64> {
    check_inputs(state, settings, k)?;
    match use_fast_path(state, path) {
        Some((alpha, beta)) => {
            // 2^{n-1} outcome strings of each parity share one probability.
            let (even, odd) = ghz_parity_probs(state.n, alpha, beta, settings.phase_sum(k));
            let half = (1u64 << (state.n - 1)) as f64;
            Ok(half * clamp_probability(even)? - half * clamp_probability(odd)?)
        }
        None => Ok(outcome_probabilities_with(state, settings, k, path)?.correlation()),
    }
}

/// Correlation values for all `2^n` setting choices, guarded by
/// [`DEFAULT_MAX_QUBITS`].
pub fn correlation_values_all(
    state: &PureState,
    settings: &MeasurementSettings,
) -> Result<CorrelationValues> {
    correlation_values_all_with(state, settings, &SimConfig::default())
}

pub fn correlation_values_all_with(
    state: &PureState,
    settings: &MeasurementSettings,
    config: &SimConfig,
) -> Result<CorrelationValues> {
    if state.n > config.max_qubits {
        return Err(Error::ResourceLimit {
            what: "statevector evaluation",
            limit: config.max_qubits,
            requested: state.n,
        });
    }
    check_inputs(state, settings, 0)?;
    let values = (0..1usize << state.n)
        .into_par_iter()
        .map(|k| correlation_value_with(state, settings, k, config.path))
        .collect::<Result<Vec<_>>>()?;
    CorrelationValues::new(values)
}
