//! Angle-space search: grid scans of the two-angle family and multi-start
//! coordinate descent over all `2n` phases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::ghz::{
    abs_trig_pair, max_prediction, prediction_closed_form, two_angle_prediction, GhzParams,
    TwoAngleConfig,
};
use crate::quantum::MeasurementSettings;

/// Inclusive, evenly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    steps: usize,
}

impl Axis {
    /// Requires `steps >= 2` and `hi > lo`.
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::validation("axis bounds must be finite"));
        }
        if steps < 2 {
            return Err(Error::validation(format!(
                "an axis needs at least 2 steps, got {steps}"
            )));
        }
        if hi <= lo {
            return Err(Error::validation(format!(
                "axis upper bound {hi} must exceed lower bound {lo}"
            )));
        }
        Ok(Self { lo, hi, steps })
    }

    /// Degenerate single-node axis.
    pub fn point(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::validation("axis value must be finite"));
        }
        Ok(Self {
            lo: value,
            hi: value,
            steps: 1,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Node `i`, computed as `lo (1 - t) + hi t` with `t = i / (steps - 1)`
    /// so that both endpoints and the midpoint are exact.
    pub fn node(&self, i: usize) -> f64 {
        if self.steps == 1 || i == 0 {
            return self.lo;
        }
        if i == self.steps - 1 {
            return self.hi;
        }
        let t = i as f64 / (self.steps - 1) as f64;
        self.lo * (1.0 - t) + self.hi * t
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub theta1: Axis,
    pub theta2: Axis,
}

impl ScanGrid {
    /// 181 x 91 nodes over `[0, π/2]²`, which places `π/2` and `π/4` on nodes.
    pub fn figure_default() -> Self {
        Self {
            theta1: Axis::new(0.0, PI / 2.0, 181).expect("valid axis"),
            theta2: Axis::new(0.0, PI / 2.0, 91).expect("valid axis"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax {
    pub row: usize,
    pub col: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub value: f64,
}

/// Row-major prediction matrix: row `i` is `θ1_i`, column `j` is `θ2_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub values: Vec<f64>,
    pub argmax: Argmax,
}

impl ScanResult {
    pub fn rows(&self) -> usize {
        self.grid.theta1.steps()
    }

    pub fn cols(&self) -> usize {
        self.grid.theta2.steps()
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    /// `(θ1, θ2, value)` triples in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let c = self.cols();
        self.values.iter().enumerate().map(move |(idx, &v)| {
            (
                self.grid.theta1.node(idx / c),
                self.grid.theta2.node(idx % c),
                v,
            )
        })
    }
}

/// Evaluates the two-angle prediction on every grid node. Ties at the
/// maximum go to the lowest row-major index.
pub fn scan_two_angle(params: &GhzParams, l: usize, grid: &ScanGrid) -> Result<ScanResult> {
    // Validates l and the real-overlap requirement once up front.
    two_angle_prediction(params, &TwoAngleConfig::new(params.n(), l, 0.0, 0.0)?)?;
    let theta2 = grid.theta2.nodes();
    let rows: Vec<Vec<f64>> = (0..grid.theta1.steps())
        .into_par_iter()
        .map(|i| {
            let t1 = grid.theta1.node(i);
            theta2
                .iter()
                .map(|&t2| {
                    let cfg = TwoAngleConfig::new(params.n(), l, t1, t2)?;
                    two_angle_prediction(params, &cfg)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();

    let cols = grid.theta2.steps();
    let mut best = 0;
    for (idx, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = idx;
        }
    }
    let argmax = Argmax {
        row: best / cols,
        col: best % cols,
        theta1: grid.theta1.node(best / cols),
        theta2: grid.theta2.node(best % cols),
        value: values[best],
    };
    Ok(ScanResult {
        grid: *grid,
        values,
        argmax,
    })
}

/// One-row scan at a fixed `θ1`.
pub fn slice_theta(
    params: &GhzParams,
    l: usize,
    theta1: f64,
    theta2_axis: Axis,
) -> Result<ScanResult> {
    let grid = ScanGrid {
        theta1: Axis::point(theta1)?,
        theta2: theta2_axis,
    };
    scan_two_angle(params, l, &grid)
}

/// Step schedule of the coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            initial_step: PI / 8.0,
            min_step: 1e-9,
            max_sweeps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub best_settings: MeasurementSettings,
    pub best_value: f64,
    pub starts: usize,
    /// Sweeps summed over all starts.
    pub iterations: usize,
    pub seed: u64,
}

/// `(α_l, |cos β_l| + |sin β_l|, |cos β_l| - |sin β_l|)` for one site.
fn site_terms(phi0: f64, phi1: f64) -> (f64, f64, f64) {
    let (p, m) = abs_trig_pair((phi1 - phi0) / 2.0);
    ((phi1 + phi0) / 2.0, p, m)
}

/// Incremental evaluator of the closed form: keeps the per-site factors so
/// that moving one phase costs two `sin_cos` calls and `O(n)` products.
struct Landscape {
    abs_overlap: f64,
    state_phase: f64,
    ceiling: f64,
    phases: Vec<f64>,
    alphas: Vec<f64>,
    plus: Vec<f64>,
    minus: Vec<f64>,
    sum_alpha: f64,
    value: f64,
    exceeded: bool,
}

impl Landscape {
    fn new(params: &GhzParams, phases: Vec<f64>) -> Self {
        let n = params.n();
        let mut this = Self {
            abs_overlap: params.abs_overlap(),
            state_phase: params.phase(),
            ceiling: max_prediction(params) + 1e-9,
            alphas: vec![0.0; n],
            plus: vec![0.0; n],
            minus: vec![0.0; n],
            phases,
            sum_alpha: 0.0,
            value: 0.0,
            exceeded: false,
        };
        for site in 0..n {
            let (a, p, m) = site_terms(this.phases[2 * site], this.phases[2 * site + 1]);
            this.alphas[site] = a;
            this.plus[site] = p;
            this.minus[site] = m;
        }
        this.sum_alpha = this.alphas.iter().sum();
        this.value = this.evaluate(usize::MAX, 0.0, 0.0, this.sum_alpha);
        this
    }

    /// Value with site `skip` replaced by factors `(p, m)` and the given `Σα`.
    fn evaluate(&mut self, skip: usize, p: f64, m: f64, sum_alpha: f64) -> f64 {
        let (tp, tm) = abs_trig_pair(self.state_phase + sum_alpha);
        let mut plus = 1.0;
        let mut minus = 1.0;
        for site in 0..self.plus.len() {
            if site == skip {
                plus *= p;
                minus *= m;
            } else {
                plus *= self.plus[site];
                minus *= self.minus[site];
            }
        }
        let v = self.abs_overlap * (tp * plus + tm * minus);
        if v > self.ceiling {
            self.exceeded = true;
        }
        v
    }

    /// Moves coordinate `coord` to `value` if that strictly improves.
    fn try_move(&mut self, coord: usize, value: f64) -> bool {
        let site = coord / 2;
        let (phi0, phi1) = if coord.is_multiple_of(2) {
            (value, self.phases[2 * site + 1])
        } else {
            (self.phases[2 * site], value)
        };
        let (a, p, m) = site_terms(phi0, phi1);
        let sum_alpha = self.sum_alpha - self.alphas[site] + a;
        let v = self.evaluate(site, p, m, sum_alpha);
        if v > self.value {
            self.phases[coord] = value;
            self.alphas[site] = a;
            self.plus[site] = p;
            self.minus[site] = m;
            self.sum_alpha = sum_alpha;
            self.value = v;
            true
        } else {
            false
        }
    }
}

fn descend(params: &GhzParams, start: Vec<f64>, opts: &RefineOptions) -> (Vec<f64>, usize, bool) {
    let mut land = Landscape::new(params, start);
    let mut step = opts.initial_step;
    let mut sweeps = 0;
    while step >= opts.min_step && sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for coord in 0..land.phases.len() {
            let x = land.phases[coord];
            if land.try_move(coord, x + step) || land.try_move(coord, x - step) {
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (land.phases, sweeps, land.exceeded)
}

/// Multi-start coordinate descent over the `2n` phases, maximizing the
/// closed-form prediction. Starts are drawn uniformly from `[0, 2π)` by a
/// ChaCha8 generator seeded with `seed`.
pub fn refine_full(params: &GhzParams, starts: usize, seed: u64) -> Result<RefineResult> {
    refine_full_with(params, starts, seed, &RefineOptions::default())
}

pub fn refine_full_with(
    params: &GhzParams,
    starts: usize,
    seed: u64,
    opts: &RefineOptions,
) -> Result<RefineResult> {
    if starts == 0 {
        return Err(Error::validation("refinement needs at least one start"));
    }
    if !(opts.initial_step > 0.0 && opts.min_step > 0.0) {
        return Err(Error::validation("refinement steps must be positive"));
    }
    let dim = 2 * params.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..starts)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..TAU)).collect())
        .collect();

    let runs: Vec<(Vec<f64>, usize, bool)> = points
        .into_par_iter()
        .map(|p| descend(params, p, opts))
        .collect();

    if runs.iter().any(|r| r.2) {
        return Err(Error::Internal(format!(
            "search exceeded the analytic ceiling {}",
            max_prediction(params)
        )));
    }
    let iterations = runs.iter().map(|r| r.1).sum();

    let mut best: Option<(MeasurementSettings, f64)> = None;
    for (phases, _, _) in runs {
        let settings =
            MeasurementSettings::new(phases.chunks_exact(2).map(|c| [c[0], c[1]]).collect())?;
        let value = prediction_closed_form(params, &settings)?;
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((settings, value));
        }
    }
    let (best_settings, best_value) = best.expect("at least one start");
    if best_value > max_prediction(params) + 1e-9 {
        return Err(Error::Internal(format!(
            "search result {best_value} exceeds the analytic ceiling"
        )));
    }
    Ok(RefineResult {
        best_settings,
        best_value,
        starts,
        iterations,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn axis_nodes_are_exact_at_landmarks() {
        let a = Axis::new(0.0, FRAC_PI_2, 91).unwrap();
        assert_eq!(a.node(0), 0.0);
        assert_eq!(a.node(45), FRAC_PI_4);
        assert_eq!(a.node(90), FRAC_PI_2);
        let b = Axis::new(0.0, FRAC_PI_2, 181).unwrap();
        assert_eq!(b.node(180), FRAC_PI_2);
        assert_eq!(b.node(90), FRAC_PI_4);
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 1.0, 5).is_err());
        assert!(Axis::new(f64::NAN, 1.0, 5).is_err());
        assert_eq!(Axis::point(0.3).unwrap().nodes(), vec![0.3]);
    }

    #[test]
    fn coarse_figure_scan() {
        let p = GhzParams::balanced(4).unwrap();
        let grid = ScanGrid {
            theta1: Axis::new(0.0, FRAC_PI_2, 5).unwrap(),
            theta2: Axis::new(0.0, FRAC_PI_2, 5).unwrap(),
        };
        let r = scan_two_angle(&p, 1, &grid).unwrap();
        assert_eq!((r.argmax.row, r.argmax.col), (4, 2));
        assert_eq!(r.argmax.theta1, FRAC_PI_2);
        assert_eq!(r.argmax.theta2, FRAC_PI_4);
        assert!((r.argmax.value - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grid() {
        let p = GhzParams::balanced(3).unwrap();
        let grid = ScanGrid {
            theta1: Axis::point(0.0).unwrap(),
            theta2: Axis::point(0.0).unwrap(),
        };
        let r = scan_two_angle(&p, 2, &grid).unwrap();
        assert_eq!(r.values.len(), 1);
        assert!((r.values[0] - 2.0 * p.abs_overlap()).abs() < 1e-15);
    }

    #[test]
    fn slice_examples() {
        let p = GhzParams::balanced(4).unwrap();
        let axis = Axis::new(0.0, FRAC_PI_2, 91).unwrap();
        for (l, peak) in [(1, 2.0 * SQRT_2), (3, 2.0 * SQRT_2), (0, 2.0)] {
            let r = slice_theta(&p, l, FRAC_PI_2, axis).unwrap();
            assert_eq!(r.rows(), 1);
            assert_eq!(r.argmax.theta2, FRAC_PI_4, "l = {l}");
            assert!((r.argmax.value - peak).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_rejects_bad_l() {
        let p = GhzParams::balanced(4).unwrap();
        assert!(scan_two_angle(&p, 5, &ScanGrid::figure_default()).is_err());
    }

    #[test]
    fn refine_small_cases() {
        let r = refine_full(&GhzParams::balanced(2).unwrap(), 32, 1).unwrap();
        assert!((r.best_value - SQRT_2).abs() < 1e-6, "{}", r.best_value);
        let r = refine_full(&GhzParams::balanced(5).unwrap(), 32, 1).unwrap();
        assert!((r.best_value - 4.0).abs() < 1e-6, "{}", r.best_value);
        let r = refine_full(&GhzParams::real(3, 1.0, 0.0).unwrap(), 4, 1).unwrap();
        assert_eq!(r.best_value, 0.0);
        assert!(refine_full(&GhzParams::balanced(2).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn refine_is_deterministic() {
        let p = GhzParams::from_angle(4, 0.4).unwrap();
        let a = refine_full(&p, 8, 99).unwrap();
        let b = refine_full(&p, 8, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 99);
    }
}
