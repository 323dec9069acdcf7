use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gbell::correlation::{naive_sign_transform, PATH_TOL};
use gbell::io::{scan_to_json, write_scan_csv, SettingsFile};
use gbell::lhv::{self, mixture_correlations, strategy_correlations};
use gbell::optimize::{refine_full, scan_two_angle, Axis, ScanGrid, ScanResult};
use gbell::quantum::{self, SimConfig, SimPath};
use gbell::{coefficients_from_probabilities, coefficients_from_values, ghz};
use gbell::{transform_path_prediction, Complex64, CorrelationValues, DeterministicStrategy};
use gbell::{GhzParams, LhvMixture, MeasurementSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::{Command, Format, Method, StateArgs};

/// Tolerance on `|α|² + |β|² = 1` for command-line input.
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 0 success, 1 failed check or internal error, 2 validation, 3 guard.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<gbell::Error> for CliError {
    fn from(e: gbell::Error) -> Self {
        if e.is_resource_limit() {
            CliError::Resource(e.to_string())
        } else if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Failed(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Predict {
            settings,
            n,
            method,
            degrees,
            state,
        } => predict(&settings, n, method, degrees, &state),
        Command::Scan {
            n,
            l,
            theta1_lo,
            theta1_hi,
            steps1,
            theta2_lo,
            theta2_hi,
            steps2,
            out,
            format,
            degrees,
            state,
        } => {
            let params = state.params(n)?;
            let grid = ScanGrid {
                theta1: axis(theta1_lo, theta1_hi, steps1, degrees, "theta1")?,
                theta2: axis(theta2_lo, theta2_hi, steps2, degrees, "theta2")?,
            };
            let result = scan_two_angle(&params, l, &grid)?;
            export(&result, n, l, out.as_deref(), format)
        }
        Command::Slice {
            n,
            l,
            theta1,
            theta2_lo,
            theta2_hi,
            steps,
            out,
            format,
            degrees,
            state,
        } => {
            let params = state.params(n)?;
            let theta1 = angle(
                theta1.unwrap_or(if degrees { 90.0 } else { FRAC_PI_2 }),
                degrees,
            );
            let grid = ScanGrid {
                theta1: Axis::point(theta1)?,
                theta2: axis(theta2_lo, theta2_hi, steps, degrees, "theta2")?,
            };
            let result = scan_two_angle(&params, l, &grid)?;
            export(&result, n, l, out.as_deref(), format)
        }
        Command::VerifyLhv {
            n,
            sample,
            seed,
            max_n,
        } => verify_lhv(n, sample, seed, max_n),
        Command::Criterion {
            n,
            xi,
            degrees,
            state,
        } => criterion(n, xi, degrees, &state),
        Command::Optimal {
            n,
            verify,
            starts,
            seed,
            out,
            state,
        } => optimal(n, verify, starts, seed, out.as_deref(), &state),
        Command::OracleCheck { seed, cases, max_n } => oracle_check(seed, cases, max_n),
    }
}

impl StateArgs {
    fn params(&self, n: usize) -> Result<GhzParams> {
        let alpha = Complex64::new(self.alpha_re, self.alpha_im);
        let beta = Complex64::new(self.beta_re, self.beta_im);
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || norm == 0.0 {
            return Err(invalid(format!(
                "normalization failure: |alpha|^2 + |beta|^2 = {norm} cannot be rescaled"
            )));
        }
        if !self.normalize && (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!(
                "normalization failure: |alpha|^2 + |beta|^2 = {norm}, expected 1 (pass --normalize to rescale)"
            )));
        }
        Ok(GhzParams::normalized(n, alpha, beta)?)
    }
}

fn angle(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_radians()
    } else {
        x
    }
}

fn axis(lo: f64, hi: Option<f64>, steps: usize, degrees: bool, name: &str) -> Result<Axis> {
    let hi = hi.unwrap_or(if degrees { 90.0 } else { FRAC_PI_2 });
    Axis::new(angle(lo, degrees), angle(hi, degrees), steps)
        .map_err(|e| invalid(format!("malformed {name} range: {e}")))
}

fn export(
    result: &ScanResult,
    n: usize,
    l: usize,
    out: Option<&Path>,
    format: Format,
) -> Result<()> {
    let write = |w: &mut dyn Write| -> io::Result<()> {
        match format {
            Format::Csv => write_scan_csv(result, w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &scan_to_json(result, n, l))?;
                writeln!(w)
            }
        }
    };
    let a = result.argmax;
    let summary = format!(
        "argmax: theta1={} theta2={} prediction={}",
        a.theta1, a.theta2, a.value
    );
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
            write(&mut BufWriter::new(file))
                .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
            println!("wrote {} rows to {}", result.values.len(), path.display());
            println!("{summary}");
        }
        None => {
            write(&mut io::stdout().lock())
                .map_err(|e| CliError::Failed(format!("cannot write to stdout: {e}")))?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn read_settings(path: &Path, degrees: bool) -> Result<MeasurementSettings> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => invalid(format!("settings file not found: {}", path.display())),
        _ => invalid(format!("cannot read settings file {}: {e}", path.display())),
    })?;
    let file = SettingsFile::from_json(&text)
        .map_err(|e| invalid(format!("cannot parse {}: {e}", path.display())))?;
    Ok(file.to_settings(degrees)?)
}

fn print_verdict(value: f64) {
    println!("LHV bound: 1");
    println!("ratio: {value}");
    println!(
        "{}",
        if value > 1.0 {
            "VIOLATED"
        } else {
            "NOT-VIOLATED"
        }
    );
}

fn predict(
    path: &Path,
    n: Option<usize>,
    method: Method,
    degrees: bool,
    state: &StateArgs,
) -> Result<()> {
    let settings = read_settings(path, degrees)?;
    if let Some(n) = n.filter(|&n| n != settings.n()) {
        return Err(invalid(format!(
            "dimension mismatch: settings file has n = {}, but --n {n} was given",
            settings.n()
        )));
    }
    let params = state.params(settings.n())?;
    let statevector = || -> Result<f64> {
        let config = SimConfig {
            path: SimPath::General,
            ..Default::default()
        };
        Ok(transform_path_prediction(
            &params.statevector()?,
            &settings,
            &config,
        )?)
    };
    println!("n: {}", settings.n());
    let value = match method {
        Method::Closed => {
            let v = ghz::prediction_closed_form(&params, &settings)?;
            println!("prediction: {v}");
            v
        }
        Method::Statevector => {
            let v = statevector()?;
            println!("prediction (statevector): {v}");
            v
        }
        Method::Both => {
            let closed = ghz::prediction_closed_form(&params, &settings)?;
            let sv = statevector()?;
            println!("prediction: {closed}");
            println!("prediction (statevector): {sv}");
            println!("difference: {:e}", (closed - sv).abs());
            closed
        }
    };
    print_verdict(value);
    Ok(())
}

fn verify_lhv(n: usize, sample: Option<u64>, seed: u64, max_n: usize) -> Result<()> {
    let report = match sample {
        Some(samples) => lhv::sample_bound(n, samples, seed)?,
        None => lhv::certify_bound_with_limit(n, max_n).map_err(|e| match e {
            gbell::Error::ResourceLimit { limit, .. } => CliError::Resource(format!(
                "exhaustive enumeration is limited to n <= {limit} (4^{n} vertices requested); \
                 use --sample <count> [--seed <seed>] to check random vertices instead, \
                 or raise --max-n"
            )),
            other => other.into(),
        })?,
    };
    println!("n: {}", report.n);
    if report.exhaustive {
        println!("vertices: {}", report.num_strategies);
    } else {
        println!(
            "sampled vertices: {} (seed {})",
            report.num_strategies, seed
        );
    }
    println!("max sum|c|: {}", report.max_sum_abs);
    println!("min sum|c|: {}", report.min_sum_abs);
    if report.saturated() {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(CliError::Failed(format!(
            "vertex values deviate from 1 by more than {PATH_TOL:e}"
        )))
    }
}

fn criterion(n: usize, xi: Option<f64>, degrees: bool, state: &StateArgs) -> Result<()> {
    let verdict = match xi {
        Some(xi) => {
            let xi = angle(xi, degrees);
            if !xi.is_finite() || n == 0 {
                return Err(invalid("criterion needs n >= 1 and a finite xi"));
            }
            println!("n: {n}");
            println!("|sin 2xi|: {}", (2.0 * xi).sin().abs());
            println!("threshold 2^(-(n-1)/2): {}", ghz::angle_threshold(n));
            ghz::violates_angle(n, xi)
        }
        None => {
            let params = state.params(n)?;
            println!("n: {n}");
            println!("|alpha beta*|: {}", params.abs_overlap());
            println!("threshold 2^(-(n+1)/2): {}", ghz::violation_threshold(n));
            ghz::violates(&params)
        }
    };
    println!("{}", if verdict { "VIOLATED" } else { "NOT-VIOLATED" });
    Ok(())
}

fn optimal(
    n: usize,
    verify: bool,
    starts: usize,
    seed: u64,
    out: Option<&Path>,
    state: &StateArgs,
) -> Result<()> {
    let params = state.params(n)?;
    let settings = ghz::optimal_settings(&params)?;
    let value = ghz::prediction_closed_form(&params, &settings)?;
    println!("n: {n}");
    for (site, p) in settings.phases().iter().enumerate() {
        println!("site {}: phi0={} phi1={}", site + 1, p[0], p[1]);
    }
    println!("prediction: {value}");
    println!("analytic maximum: {}", ghz::max_prediction(&params));
    if verify {
        let config = SimConfig {
            path: SimPath::General,
            ..Default::default()
        };
        let sv = transform_path_prediction(&params.statevector()?, &settings, &config)?;
        let search = refine_full(&params, starts, seed)?;
        println!("statevector: {sv}");
        println!(
            "search ({starts} starts, seed {seed}): {}",
            search.best_value
        );
        let spread = [value, sv, search.best_value];
        let hi = spread.iter().cloned().fold(f64::MIN, f64::max);
        let lo = spread.iter().cloned().fold(f64::MAX, f64::min);
        println!("max disagreement: {:e}", hi - lo);
    }
    if let Some(path) = out {
        fs::write(
            path,
            SettingsFile::from_settings(&settings).to_json() + "\n",
        )
        .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote settings to {}", path.display());
    }
    Ok(())
}

fn random_params(n: usize, rng: &mut ChaCha8Rng) -> GhzParams {
    loop {
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (a, b) = (c(), c());
        if a.norm_sqr() + b.norm_sqr() > 1e-3 {
            return GhzParams::normalized(n, a, b).expect("nonzero amplitudes");
        }
    }
}

fn random_settings(n: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings {
    MeasurementSettings::new(
        (0..n)
            .map(|_| [rng.random_range(-TAU..TAU), rng.random_range(-TAU..TAU)])
            .collect(),
    )
    .expect("finite phases")
}

struct Check {
    name: &'static str,
    worst: f64,
    tol: f64,
}

fn oracle_check(seed: u64, cases: usize, max_n: usize) -> Result<()> {
    if cases == 0 || !(1..=quantum::DEFAULT_MAX_QUBITS).contains(&max_n) {
        return Err(invalid(format!(
            "need --cases >= 1 and 1 <= --max-n <= {}",
            quantum::DEFAULT_MAX_QUBITS
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let general = SimConfig {
        path: SimPath::General,
        ..Default::default()
    };
    let mut checks = vec![
        Check {
            name: "closed form vs statevector transform",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "GHZ fast path vs general statevector",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "butterfly vs naive transform",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "vertex saturation",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "mixtures: probability route vs values route",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "mixtures: local bound",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "optimal settings reach the maximum",
            worst: 0.0,
            tol: PATH_TOL,
        },
        Check {
            name: "search never exceeds the maximum",
            worst: 0.0,
            tol: 1e-9,
        },
    ];
    for _ in 0..cases {
        let n = rng.random_range(1..=max_n);
        let params = random_params(n, &mut rng);
        let settings = random_settings(n, &mut rng);
        let state = params.statevector()?;

        let closed = ghz::prediction_closed_form(&params, &settings)?;
        let via = transform_path_prediction(&state, &settings, &general)?;
        checks[0].worst = checks[0].worst.max((closed - via).abs());

        let k = rng.random_range(0..1usize << n);
        let fast = quantum::correlation_value_with(&state, &settings, k, SimPath::Auto)?;
        let slow = quantum::correlation_value_with(&state, &settings, k, SimPath::General)?;
        checks[1].worst = checks[1].worst.max((fast - slow).abs());

        let m = rng.random_range(1..=10);
        let values: Vec<f64> = (0..1 << m).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let fast = coefficients_from_values(&CorrelationValues::new(values.clone())?);
        let scale = 1.0 / values.len() as f64;
        let naive: Vec<f64> = naive_sign_transform(&values)
            .iter()
            .map(|c| c * scale)
            .collect();
        let dev = fast
            .coeffs()
            .iter()
            .zip(&naive)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks[2].worst = checks[2].worst.max(dev);

        let vertex = DeterministicStrategy::from_index(m, rng.random_range(0..1u64 << (2 * m)));
        let sat = coefficients_from_values(&strategy_correlations(&vertex)).sum_abs();
        checks[3].worst = checks[3].worst.max((sat - 1.0).abs());

        let mix_n = rng.random_range(1..=6);
        let mix = LhvMixture::random(mix_n, rng.random_range(1..=8), &mut rng)?;
        let by_values = coefficients_from_values(&mixture_correlations(&mix));
        let by_probs = coefficients_from_probabilities(&mix.label_distribution()?);
        let dev = by_values
            .coeffs()
            .iter()
            .zip(by_probs.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks[4].worst = checks[4].worst.max(dev);
        checks[5].worst = checks[5].worst.max(by_values.sum_abs() - 1.0);

        let max = ghz::max_prediction(&params);
        let best = ghz::prediction_closed_form(&params, &ghz::optimal_settings(&params)?)?;
        checks[6].worst = checks[6].worst.max((best - max).abs());

        let search = refine_full(&params, 4, rng.random())?;
        checks[7].worst = checks[7].worst.max(search.best_value - max);
    }
    println!("seed: {seed}, cases per check: {cases}");
    let mut failed = 0;
    for c in &checks {
        let ok = c.worst <= c.tol;
        if !ok {
            failed += 1;
        }
        println!(
            "{} {}: worst {:.3e} (tolerance {:e})",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tol
        );
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} oracle checks failed")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(a: f64, b: f64, normalize: bool) -> StateArgs {
        StateArgs {
            alpha_re: a,
            alpha_im: 0.0,
            beta_re: b,
            beta_im: 0.0,
            normalize,
        }
    }

    #[test]
    fn normalization_is_checked() {
        assert!(state(1.0, 1.0, false).params(2).is_err());
        let p = state(1.0, 1.0, true).params(2).unwrap();
        assert!((p.abs_overlap() - 0.5).abs() < 1e-15);
        assert!(state(0.0, 0.0, true).params(2).is_err());
        assert!(state(1.0, 1e-6, false).params(2).is_ok());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        let guard = gbell::Error::ResourceLimit {
            what: "x",
            limit: 1,
            requested: 2,
        };
        assert_eq!(CliError::from(guard).exit_code(), 3);
        assert_eq!(CliError::from(gbell::Error::NoOptimum).exit_code(), 2);
        assert_eq!(
            CliError::from(gbell::Error::Internal("x".into())).exit_code(),
            1
        );
    }

    #[test]
    fn degree_axis_defaults() {
        let a = axis(0.0, None, 3, true, "t").unwrap();
        assert_eq!(a.hi(), 90f64.to_radians());
        assert!(axis(1.0, Some(0.0), 3, false, "t").is_err());
    }
}
