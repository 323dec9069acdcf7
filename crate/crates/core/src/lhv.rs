//! Deterministic local-hidden-variable strategies (the vertices of the local
//! polytope) and their mixtures.

use rand::Rng;
use rayon::prelude::*;

use crate::correlation::{coefficients_from_values, CorrelationValues, ProbabilityTable, PATH_TOL};
use crate::error::{Error, Result};

/// Default enumeration guard: `4^8 = 65536` vertices.
pub const DEFAULT_MAX_ENUMERATION_N: usize = 8;

/// Predetermined `±1` outcomes `(s_i^0, s_i^1)` for the two settings of
/// every site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    signs: Vec<[i8; 2]>,
}

impl DeterministicStrategy {
    pub fn new(signs: Vec<[i8; 2]>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::validation("a strategy needs at least one site"));
        }
        if let Some((i, s)) = signs
            .iter()
            .enumerate()
            .find(|(_, s)| s.iter().any(|&v| v != 1 && v != -1))
        {
            return Err(Error::validation(format!(
                "signs[{i}] = {s:?} must contain only +1 and -1"
            )));
        }
        Ok(Self { signs })
    }

    /// The strategy at position `index` of the lexicographic order over
    /// `(s_1^0, s_1^1, s_2^0, …, s_n^1)` with `+1` before `-1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let sign = |bit: u64| if bit == 0 { 1 } else { -1 };
        let signs = (0..n)
            .map(|site| {
                let digit = (index >> (2 * (n - 1 - site))) & 3;
                [sign(digit >> 1), sign(digit & 1)]
            })
            .collect();
        Self { signs }
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[[i8; 2]] {
        &self.signs
    }

    /// Per-site index of the local vector `(s^0, s^1)` in `A^0..A^3`.
    pub fn a_labels(&self) -> Vec<u8> {
        self.signs
            .iter()
            .map(|s| match (s[0], s[1]) {
                (1, 1) => 0,
                (1, -1) => 1,
                (-1, -1) => 2,
                _ => 3,
            })
            .collect()
    }

    /// Site 1 outcomes negated, which negates every correlation value.
    pub fn negated(&self) -> Self {
        let mut signs = self.signs.clone();
        signs[0] = [-signs[0][0], -signs[0][1]];
        Self { signs }
    }
}

/// `E(k) = Π_i s_i^{k_i}`; every entry is `±1`.
pub fn strategy_correlations(strategy: &DeterministicStrategy) -> CorrelationValues {
    let mut values = vec![1.0];
    for s in &strategy.signs {
        values = values
            .iter()
            .flat_map(|&e| [e * f64::from(s[0]), e * f64::from(s[1])])
            .collect();
    }
    CorrelationValues::new(values).expect("products of signs are in [-1, 1]")
}

fn check_guard(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("number of sites must be positive"));
    }
    if n > limit {
        return Err(Error::ResourceLimit {
            what: "exhaustive strategy enumeration",
            limit,
            requested: n,
        });
    }
    Ok(())
}

/// All `4^n` deterministic strategies in lexicographic order.
pub fn enumerate_strategies(n: usize) -> Result<impl Iterator<Item = DeterministicStrategy>> {
    enumerate_strategies_with_limit(n, DEFAULT_MAX_ENUMERATION_N)
}

pub fn enumerate_strategies_with_limit(
    n: usize,
    limit: usize,
) -> Result<impl Iterator<Item = DeterministicStrategy>> {
    check_guard(n, limit.min(31))?;
    Ok((0..1u64 << (2 * n)).map(move |i| DeterministicStrategy::from_index(n, i)))
}

/// Outcome of checking `Σ|c| <= 1` over a set of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub max_sum_abs: f64,
    pub min_sum_abs: f64,
    pub num_strategies: u64,
    /// `false` when vertices were sampled rather than enumerated.
    pub exhaustive: bool,
    /// Seed of the sampler, for sampled reports.
    pub seed: Option<u64>,
}

impl BoundReport {
    /// Every vertex gave `Σ|c| = 1` within `1e-12`.
    pub fn saturated(&self) -> bool {
        (self.max_sum_abs - 1.0).abs() <= PATH_TOL && (self.min_sum_abs - 1.0).abs() <= PATH_TOL
    }
}

fn vertex_sum_abs(n: usize, index: u64) -> f64 {
    coefficients_from_values(&strategy_correlations(&DeterministicStrategy::from_index(
        n, index,
    )))
    .sum_abs()
}

/// Exhaustively evaluates `Σ|c|` on every deterministic strategy.
pub fn certify_bound(n: usize) -> Result<BoundReport> {
    certify_bound_with_limit(n, DEFAULT_MAX_ENUMERATION_N)
}

pub fn certify_bound_with_limit(n: usize, limit: usize) -> Result<BoundReport> {
    check_guard(n, limit.min(31))?;
    let count = 1u64 << (2 * n);
    let (min, max) = (0..count)
        .into_par_iter()
        .map(|i| {
            let v = vertex_sum_abs(n, i);
            (v, v)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    Ok(BoundReport {
        n,
        max_sum_abs: max,
        min_sum_abs: min,
        num_strategies: count,
        exhaustive: true,
        seed: None,
    })
}

/// Non-exhaustive alternative for `n` beyond the enumeration guard:
/// evaluates `samples` uniformly drawn vertices.
pub fn sample_bound(n: usize, samples: u64, seed: u64) -> Result<BoundReport> {
    use rand::SeedableRng;
    if n == 0 || n > 24 {
        return Err(Error::validation(format!(
            "vertex sampling supports 1 <= n <= 24, got {n}"
        )));
    }
    if samples == 0 {
        return Err(Error::validation("need at least one sample"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for _ in 0..samples {
        let v = vertex_sum_abs(n, rng.random_range(0..1u64 << (2 * n)));
        min = min.min(v);
        max = max.max(v);
    }
    Ok(BoundReport {
        n,
        max_sum_abs: max,
        min_sum_abs: min,
        num_strategies: samples,
        exhaustive: false,
        seed: Some(seed),
    })
}

/// Convex combination of deterministic strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvMixture {
    strategies: Vec<DeterministicStrategy>,
    weights: Vec<f64>,
}

impl LhvMixture {
    pub fn new(strategies: Vec<DeterministicStrategy>, weights: Vec<f64>) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::validation("a mixture needs at least one strategy"));
        }
        if strategies.len() != weights.len() {
            return Err(Error::validation(format!(
                "{} strategies but {} weights",
                strategies.len(),
                weights.len()
            )));
        }
        let n = strategies[0].n();
        if let Some(s) = strategies.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch {
                what: "mixture component",
                expected: n,
                found: s.n(),
            });
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::validation(format!(
                "weights[{i}] = {w} must be nonnegative"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PATH_TOL {
            return Err(Error::validation(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            strategies,
            weights,
        })
    }

    /// A mixture of `components` uniformly drawn vertices with weights drawn
    /// uniformly from the simplex.
    pub fn random<R: Rng + ?Sized>(n: usize, components: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > 31 || components == 0 {
            return Err(Error::validation(
                "random mixtures need 1 <= n <= 31 and at least one component",
            ));
        }
        let strategies = (0..components)
            .map(|_| DeterministicStrategy::from_index(n, rng.random_range(0..1u64 << (2 * n))))
            .collect();
        // Exponential spacings give a uniform point on the simplex.
        let raw: Vec<f64> = (0..components)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        Self::new(strategies, weights)
    }

    pub fn n(&self) -> usize {
        self.strategies[0].n()
    }

    pub fn strategies(&self) -> &[DeterministicStrategy] {
        &self.strategies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Distribution over local-vector labels induced by the mixture.
    pub fn label_distribution(&self) -> Result<ProbabilityTable> {
        ProbabilityTable::from_entries(
            self.n(),
            self.strategies
                .iter()
                .zip(&self.weights)
                .map(|(s, &w)| (s.a_labels(), w)),
        )
    }
}

/// `E(k) = Σ_λ w_λ E_λ(k)`.
pub fn mixture_correlations(mix: &LhvMixture) -> CorrelationValues {
    let mut acc = vec![0.0; 1 << mix.n()];
    for (s, &w) in mix.strategies.iter().zip(&mix.weights) {
        for (a, e) in acc.iter_mut().zip(strategy_correlations(s).values()) {
            *a += w * e;
        }
    }
    CorrelationValues::new(acc).expect("convex combination of sign vectors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::coefficients_from_probabilities;
    use rand::SeedableRng;

    fn strat(signs: &[[i8; 2]]) -> DeterministicStrategy {
        DeterministicStrategy::new(signs.to_vec()).unwrap()
    }

    #[test]
    fn correlations_examples() {
        assert_eq!(
            strategy_correlations(&strat(&[[1, 1], [1, 1]])).values(),
            &[1.0; 4]
        );
        assert_eq!(
            strategy_correlations(&strat(&[[1, -1]])).values(),
            &[1.0, -1.0]
        );
        assert_eq!(
            strategy_correlations(&strat(&[[1, -1], [1, 1], [-1, -1]])).values(),
            &[-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn enumeration_counts_and_order() {
        for (n, count) in [(1, 4), (2, 16), (6, 4096)] {
            assert_eq!(enumerate_strategies(n).unwrap().count(), count);
        }
        let all: Vec<_> = enumerate_strategies(1).unwrap().collect();
        assert_eq!(
            all.iter().map(|s| s.signs()[0]).collect::<Vec<_>>(),
            vec![[1, 1], [1, -1], [-1, 1], [-1, -1]]
        );
        let two: Vec<_> = enumerate_strategies(2).unwrap().collect();
        assert_eq!(two[1].signs(), &[[1, 1], [1, -1]]);
        assert_eq!(two[4].signs(), &[[1, -1], [1, 1]]);
        let unique: std::collections::HashSet<_> = enumerate_strategies(3).unwrap().collect();
        assert_eq!(unique.len(), 64);
    }

    #[test]
    fn enumeration_guard() {
        let err = enumerate_strategies(9).err().unwrap();
        assert!(err.is_resource_limit());
        assert!(certify_bound(9).unwrap_err().is_resource_limit());
        assert!(certify_bound_with_limit(9, 9).is_ok());
    }

    #[test]
    fn certify_small_n() {
        for (n, count) in [(2, 16), (4, 256), (6, 4096)] {
            let r = certify_bound(n).unwrap();
            assert_eq!(r.num_strategies, count);
            assert!(r.saturated(), "n = {n}: {r:?}");
            assert!(r.exhaustive);
        }
    }

    #[test]
    fn sampled_bound_records_seed() {
        let r = sample_bound(12, 200, 7).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.seed, Some(7));
        assert!(r.saturated());
    }

    #[test]
    fn mixture_examples() {
        let s = strat(&[[1, -1], [-1, -1]]);
        let single = LhvMixture::new(vec![s.clone()], vec![1.0]).unwrap();
        assert_eq!(mixture_correlations(&single), strategy_correlations(&s));

        let pair = LhvMixture::new(vec![s.clone(), s.negated()], vec![0.5, 0.5]).unwrap();
        assert!(mixture_correlations(&pair)
            .values()
            .iter()
            .all(|&e| e == 0.0));
    }

    #[test]
    fn mixture_validation() {
        let s = strat(&[[1, 1]]);
        assert!(LhvMixture::new(vec![s.clone()], vec![0.5]).is_err());
        assert!(LhvMixture::new(vec![s.clone(), s.clone()], vec![1.5, -0.5]).is_err());
        assert!(
            LhvMixture::new(vec![s.clone(), strat(&[[1, 1], [1, 1]])], vec![0.5, 0.5]).is_err()
        );
        assert!(LhvMixture::new(vec![], vec![]).is_err());
        assert!(DeterministicStrategy::new(vec![[1, 0]]).is_err());
    }

    #[test]
    fn random_mixtures_respect_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let mix = LhvMixture::random(4, 5, &mut rng).unwrap();
            let v = coefficients_from_values(&mixture_correlations(&mix)).sum_abs();
            assert!(v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn label_distribution_matches_values_route() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let mix = LhvMixture::random(n, 6, &mut rng).unwrap();
            let via_values = coefficients_from_values(&mixture_correlations(&mix));
            let via_probs = coefficients_from_probabilities(&mix.label_distribution().unwrap());
            for (a, b) in via_values.coeffs().iter().zip(via_probs.coeffs()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
