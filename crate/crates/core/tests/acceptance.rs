//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.

use gbell::correlation::sign_transform_in_place;
use gbell::lhv::{certify_bound, mixture_correlations, strategy_correlations};
use gbell::optimize::{refine_full, scan_two_angle, slice_theta, Axis, ScanGrid};
use gbell::quantum::{SimConfig, SimPath};
use gbell::{coefficients_from_values, ghz, transform_path_prediction, Complex64};
use gbell::{CorrelationValues, DeterministicStrategy, GhzParams, LhvMixture, MeasurementSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn random_params(n: usize, rng: &mut ChaCha8Rng) -> GhzParams {
    loop {
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (a, b) = (c(), c());
        if a.norm_sqr() + b.norm_sqr() > 1e-3 {
            return GhzParams::normalized(n, a, b).unwrap();
        }
    }
}

fn random_settings(n: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings {
    MeasurementSettings::new(
        (0..n)
            .map(|_| [rng.random_range(-TAU..TAU), rng.random_range(-TAU..TAU)])
            .collect(),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = GhzParams::balanced(4).unwrap();
    let r = scan_two_angle(&p, 1, &ScanGrid::figure_default()).map_err(|e| e.to_string())?;
    let took = within_time(start, Duration::from_secs(5))?;
    let a = r.argmax;
    check(a.theta1 == FRAC_PI_2 && a.theta2 == FRAC_PI_4, || {
        format!("argmax at ({}, {})", a.theta1, a.theta2)
    })?;
    check((a.value - 2.0 * SQRT_2).abs() <= 1e-9, || {
        format!("max {} != 2√2", a.value)
    })?;
    Ok(format!(
        "181x91 scan n=4 l=1: max {:.12} at ({}, {}) in {took:.2?}",
        a.value, a.theta1, a.theta2
    ))
}

fn criterion_2() -> Outcome {
    let p = GhzParams::balanced(4).unwrap();
    let axis = Axis::new(0.0, FRAC_PI_2, 91).unwrap();
    let mut peaks = Vec::new();
    for l in 0..=4 {
        let r = slice_theta(&p, l, FRAC_PI_2, axis).map_err(|e| e.to_string())?;
        let at_quarter = r.value(0, 45);
        // Flat curves have their argmax at the first node; the value at π/4
        // must still be the curve maximum.
        check((at_quarter - r.argmax.value).abs() <= 1e-12, || {
            format!(
                "l={l}: value at π/4 {at_quarter} below curve max {}",
                r.argmax.value
            )
        })?;
        peaks.push(at_quarter);
    }
    for (l, want) in [(0, 2.0), (1, 2.0 * SQRT_2), (3, 2.0 * SQRT_2)] {
        check((peaks[l] - want).abs() <= 1e-9, || {
            format!("l={l}: peak {} != {want}", peaks[l])
        })?;
    }
    Ok(format!(
        "slices at θ1=π/2, peaks at θ2=π/4 for l=0..4: {}",
        peaks
            .iter()
            .map(|v| format!("{v:.10}"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = Vec::new();
    for n in 2..=10 {
        for _ in 0..20 {
            cases.push((random_params(n, &mut rng), rng.random::<u64>()));
        }
    }
    let worst = cases
        .par_iter()
        .map(|(p, seed)| -> Result<(f64, f64), String> {
            let max = p.abs_overlap() * 2f64.powf((p.n() + 1) as f64 / 2.0);
            let opt = ghz::optimal_settings(p).map_err(|e| e.to_string())?;
            let closed = ghz::prediction_closed_form(p, &opt).map_err(|e| e.to_string())?;
            check((closed - max).abs() <= 1e-12, || {
                format!("n={}: optimal gives {closed}, expected {max}", p.n())
            })?;
            let r = refine_full(p, 32, *seed).map_err(|e| format!("n={}: {e}", p.n()))?;
            check(r.best_value <= max + 1e-9, || {
                format!("n={}: search {} above ceiling {max}", p.n(), r.best_value)
            })?;
            check(max - r.best_value <= 1e-6, || {
                format!("n={}: search {} short of {max}", p.n(), r.best_value)
            })?;
            Ok(((closed - max).abs(), max - r.best_value))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let took = within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "180 states n=2..10: closed-form gap {:.1e}, search gap {:.1e}, {took:.2?}",
        worst.0, worst.1
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let config = SimConfig {
        path: SimPath::General,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for n in 2..=10 {
        for _ in 0..100 {
            let p = random_params(n, &mut rng);
            let s = random_settings(n, &mut rng);
            let closed = ghz::prediction_closed_form(&p, &s).map_err(|e| e.to_string())?;
            let state = p.statevector().map_err(|e| e.to_string())?;
            let via = transform_path_prediction(&state, &s, &config).map_err(|e| e.to_string())?;
            let diff = (closed - via).abs();
            check(diff <= 1e-12, || {
                format!("n={n}: closed {closed} vs transform {via}")
            })?;
            worst = worst.max(diff);
        }
    }
    let took = within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "900 settings n=2..10 via general statevector: max diff {worst:.1e}, {took:.2?}"
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_mix = f64::NEG_INFINITY;
    for n in 1..=6 {
        let r = certify_bound(n).map_err(|e| e.to_string())?;
        check(r.saturated() && r.num_strategies == 1 << (2 * n), || {
            format!("n={n}: {r:?}")
        })?;
        for _ in 0..1000 {
            let components = rng.random_range(1..=8);
            let mix = LhvMixture::random(n, components, &mut rng).map_err(|e| e.to_string())?;
            let v = coefficients_from_values(&mixture_correlations(&mix)).sum_abs();
            check(v <= 1.0 + 1e-12, || format!("n={n}: mixture gives {v}"))?;
            worst_mix = worst_mix.max(v);
        }
    }
    let took = within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "all vertices n=1..6 saturate, 6000 mixtures max {worst_mix:.15}, {took:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    const POINTS: usize = 10_000;
    let start = Instant::now();
    let mut report = Vec::new();
    for n in [3usize, 5, 7] {
        let boundary = ghz::angle_threshold(n);
        let verdicts = (0..POINTS)
            .into_par_iter()
            .map(|i| -> Result<Option<f64>, String> {
                let xi = FRAC_PI_2 * i as f64 / (POINTS - 1) as f64;
                let p = GhzParams::from_angle(n, xi).map_err(|e| e.to_string())?;
                let best = refine_full(&p, 32, i as u64).map_err(|e| e.to_string())?;
                let searched = best.best_value > 1.0 + 1e-6;
                if searched == ghz::violates_angle(n, xi) {
                    return Ok(None);
                }
                let dist = ((2.0 * xi).sin().abs() - boundary).abs();
                check(dist <= 1e-4, || {
                    format!(
                        "n={n} ξ={xi}: criterion says {}, search found {} ({dist:.1e} from boundary)",
                        !searched, best.best_value
                    )
                })?;
                Ok(Some(dist))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let near: Vec<f64> = verdicts.into_iter().flatten().collect();
        report.push(format!("n={n}: {} near-boundary disagreements", near.len()));
    }
    Ok(format!(
        "{POINTS} ξ points in [0, π/2] per n; {}; {:.2?}",
        report.join(", "),
        start.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    for case in 0..CASES {
        let n = rng.random_range(1..=8);
        let p = random_params(n, &mut rng);
        let s = random_settings(n, &mut rng);
        let base = ghz::prediction_closed_form(&p, &s).unwrap();

        let site = rng.random_range(0..n);
        let swapped = ghz::prediction_closed_form(&p, &s.with_swapped_site(site)).unwrap();
        check(close(base, swapped), || {
            format!("swap, case {case}: {base} vs {swapped}")
        })?;

        let mut phases = s.phases().to_vec();
        phases[site][rng.random_range(0..2)] += TAU * f64::from(rng.random_range(-2i32..=2));
        let shifted = MeasurementSettings::new(phases).unwrap();
        let shifted = ghz::prediction_closed_form(&p, &shifted).unwrap();
        check(close(base, shifted), || {
            format!("2π shift, case {case}: {base} vs {shifted}")
        })?;

        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let permuted = ghz::prediction_closed_form(&p, &s.permuted(&perm)).unwrap();
        check(close(base, permuted), || {
            format!("permutation, case {case}: {base} vs {permuted}")
        })?;

        let chi = rng.random_range(-PI..PI);
        let q = p.with_global_phase(chi);
        let rotated = ghz::prediction_closed_form(&q, &s).unwrap();
        check(close(base, rotated), || {
            format!("global phase, case {case}: {base} vs {rotated}")
        })?;
        if n <= 6 {
            let config = SimConfig {
                path: SimPath::General,
                ..Default::default()
            };
            let a = transform_path_prediction(&p.statevector().unwrap(), &s, &config).unwrap();
            let b = transform_path_prediction(
                &p.statevector().unwrap().with_global_phase(chi),
                &s,
                &config,
            )
            .unwrap();
            check(close(a, b), || {
                format!("statevector global phase, case {case}: {a} vs {b}")
            })?;
        }

        let m = rng.random_range(1..=10);
        let values: Vec<f64> = (0..1 << m).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let values = CorrelationValues::new(values).unwrap();
        let coeffs = coefficients_from_values(&values);
        let energy: f64 = coeffs.coeffs().iter().map(|c| c * c).sum();
        let expect = values.values().iter().map(|v| v * v).sum::<f64>() / (1u64 << m) as f64;
        check(close(energy, expect), || {
            format!("Parseval, case {case}: {energy} vs {expect}")
        })?;

        let mut back = coeffs.into_inner();
        sign_transform_in_place(&mut back);
        let err = back
            .iter()
            .zip(values.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        check(err <= 1e-12, || {
            format!("involution, case {case}: error {err:.1e}")
        })?;

        let v = rng.random_range(1..=10);
        let vertex = DeterministicStrategy::from_index(v, rng.random_range(0..1u64 << (2 * v)));
        let sat = coefficients_from_values(&strategy_correlations(&vertex)).sum_abs();
        check(close(sat, 1.0), || {
            format!("vertex saturation, case {case}: {sat}")
        })?;
    }
    Ok(format!(
        "{CASES} seeded cases each: swap, 2π shift, permutation, global phase, Parseval, involution, vertex saturation"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 two-angle surface maximum", criterion_1),
        ("2 fixed-θ1 slices", criterion_2),
        ("3 analytic maximum and search", criterion_3),
        ("4 closed form vs transform path", criterion_4),
        ("5 local bound", criterion_5),
        ("6 violation criterion sweep", criterion_6),
        ("7 property suite", criterion_7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
