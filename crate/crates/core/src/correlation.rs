//! Correlation values, correlation coefficients and the sign transform
//! between them.
//!
//! Bit convention, used everywhere in this crate: an integer index `k` over
//! `{0,1}^n` stores the choice for site 1 in its most significant bit and the
//! choice for site `n` in its least significant bit. So for `n = 3`, index
//! `0b100` means site 1 uses setting 1 and sites 2 and 3 use setting 0.

use crate::error::{Error, Result};

/// Tolerance for structural checks on inputs (normalization, ranges).
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Tolerance for asserting that two evaluation routes agree.
pub const PATH_TOL: f64 = 1e-12;

/// The four local vectors `A^0..A^3`. `A^0, A^1` form an orthogonal basis of
/// the plane and `A^{j+2} = -A^j`.
pub const A_BASIS: [[f64; 2]; 4] = [[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]];

/// Returns the bit of site `site` (0-based, site 0 is the first site) in
/// index `k` under the most-significant-first convention.
#[inline]
pub fn site_bit(k: usize, n: usize, site: usize) -> usize {
    (k >> (n - 1 - site)) & 1
}

fn log2_exact(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(len.trailing_zeros() as usize)
}

/// The `2^n` correlation values `E(k)`, one per setting choice `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationValues {
    n: usize,
    values: Vec<f64>,
}

impl CorrelationValues {
    /// Wraps `values` after checking the length is `2^n` with `n >= 1` and
    /// that every entry is a finite number in `[-1, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = log2_exact(values.len())?;
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + STRUCTURAL_TOL)
        {
            return Err(Error::validation(format!(
                "correlation value E[{k}] = {v} lies outside [-1, 1]"
            )));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

/// The `2^n` coefficients `c_j` (or `q_j`) of a correlation tensor in the
/// `A^{j_1} ⊗ … ⊗ A^{j_n}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    n: usize,
    coeffs: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let n = log2_exact(coeffs.len())?;
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coeffs
    }

    /// See [`sum_abs`].
    pub fn sum_abs(&self) -> f64 {
        sum_abs(self)
    }
}

/// `Σ_j |c_j|`, the left-hand side of the generalized Bell inequality.
///
/// Accumulates strictly in ascending index order so the result is bitwise
/// reproducible.
pub fn sum_abs(tensor: &CorrelationTensor) -> f64 {
    let mut acc = 0.0;
    for c in &tensor.coeffs {
        acc += c.abs();
    }
    acc
}

/// Unnormalized in-place sign transform `x_j <- Σ_k (-1)^{popcount(k & j)} x_k`
/// using the `O(n 2^n)` butterfly. `buf.len()` must be a power of two.
///
/// Applying it twice multiplies the input by `buf.len()`.
pub fn sign_transform_in_place(buf: &mut [f64]) {
    debug_assert!(buf.len().is_power_of_two());
    let len = buf.len();
    let mut half = 1;
    while half < len {
        for block in buf.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// Reference `O(4^n)` double loop for the same transform as
/// [`sign_transform_in_place`]. Used as a test oracle.
#[doc(hidden)]
pub fn naive_sign_transform(values: &[f64]) -> Vec<f64> {
    let len = values.len();
    (0..len)
        .map(|j| {
            let mut acc = 0.0;
            for (k, v) in values.iter().enumerate() {
                if (k & j).count_ones() % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc
        })
        .collect()
}

/// `c_j = 2^{-n} Σ_k (-1)^{k·j} E(k)`.
pub fn coefficients_from_values(values: &CorrelationValues) -> CorrelationTensor {
    let mut buf = values.values.clone();
    sign_transform_in_place(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    CorrelationTensor {
        n: values.n,
        coeffs: buf,
    }
}

/// Joint distribution over the local vectors: entry `p_{j_1…j_n}` with each
/// `j_i ∈ {0,1,2,3}` is the probability that site `i` reports `A^{j_i}`.
///
/// Stored densely as `4^n` entries in base 4, site 1 as the most significant
/// digit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    n: usize,
    probs: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("number of sites must be positive"));
        }
        let expected = 4usize
            .checked_pow(n as u32)
            .ok_or_else(|| Error::validation(format!("4^{n} entries do not fit in memory")))?;
        if probs.len() != expected {
            return Err(Error::validation(format!(
                "probability table for n = {n} needs {expected} entries, got {}",
                probs.len()
            )));
        }
        let mut total = 0.0;
        for (idx, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::validation(format!(
                    "probability at index {idx} is {p}, must be a nonnegative number"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::validation(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { n, probs })
    }

    /// Builds a table from sparse `(labels, probability)` entries; labels are
    /// the per-site `A` indices. Repeated labels accumulate.
    pub fn from_entries<I, L>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, f64)>,
        L: AsRef<[u8]>,
    {
        if n == 0 || n > 12 {
            return Err(Error::validation(format!(
                "probability tables support 1 <= n <= 12, got {n}"
            )));
        }
        let mut probs = vec![0.0; 1 << (2 * n)];
        for (labels, p) in entries {
            let labels = labels.as_ref();
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "probability label",
                    expected: n,
                    found: labels.len(),
                });
            }
            let mut idx = 0usize;
            for &d in labels {
                if d > 3 {
                    return Err(Error::validation(format!(
                        "vector label {d} is not in 0..=3"
                    )));
                }
                idx = idx * 4 + d as usize;
            }
            probs[idx] += p;
        }
        Self::new(n, probs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `c_j = Σ_s (-1)^{|s|} p_{j + 2s}`: each site whose label was shifted by
/// two (`A^{j+2} = -A^j`) contributes a factor of `-1`.
///
/// Contracts one base-4 digit at a time, from the last site to the first.
pub fn coefficients_from_probabilities(table: &ProbabilityTable) -> CorrelationTensor {
    let n = table.n;
    let mut cur = table.probs.clone();
    // `cur` has shape [4]^m x [2]^(n-m); contract the last base-4 digit.
    for m in (1..=n).rev() {
        let stride = 1usize << (n - m);
        let outer = 1usize << (2 * (m - 1));
        let mut next = vec![0.0; outer * 2 * stride];
        for hi in 0..outer {
            for b in 0..2 {
                let src_pos = (hi * 4 + b) * stride;
                let src_neg = (hi * 4 + b + 2) * stride;
                let dst = (hi * 2 + b) * stride;
                for low in 0..stride {
                    next[dst + low] = cur[src_pos + low] - cur[src_neg + low];
                }
            }
        }
        cur = next;
    }
    CorrelationTensor { n, coeffs: cur }
}
