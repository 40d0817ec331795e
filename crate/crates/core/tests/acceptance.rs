//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spatial_ak::greens::oscillating_sum;
use spatial_ak::quadrature;
use spatial_ak::{
    check_theorem1, check_theorem2, convergence_report, grid_point, kernel_decay_bound,
    predicted_limit, solve, solve_detrended, solve_fd, ConsumptionField, DecayFit, FdConfig,
    Scenario, SpaceTimeField, SpatialProfile, SpatialShape, TechnologyPath, TimeProfile,
    Tolerances,
};

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn sup_error(field: &SpaceTimeField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let n = field.grid_size();
    let mut worst = 0.0f64;
    for (t, row) in field.times.iter().zip(&field.values) {
        for (i, v) in row.iter().enumerate() {
            worst = worst.max((v - exact(grid_point(i, n), *t)).abs());
        }
    }
    worst
}

// 1. constant benchmark k ≡ 2
fn closed_form_benchmark() -> Outcome {
    let start = Instant::now();
    let s = Scenario::new(
        TechnologyPath::constant(0.05),
        ConsumptionField::constant(0.1),
        SpatialProfile::constant(256, 2.0).unwrap(),
        20.0,
    );
    let (k, c0, a0) = (2.0, 0.1, 0.05);
    let exact = |_x: f64, t: f64| (k - c0 / a0) * (a0 * t).exp() + c0 / a0;
    let spectral = sup_error(&solve(&s).unwrap(), exact);
    let fd = sup_error(&solve_fd(&s, &FdConfig::new(256, 1e-3)).unwrap(), exact);
    let elapsed = start.elapsed();
    Outcome::new(
        spectral <= 1e-10 && fd <= 1e-6 && elapsed < Duration::from_secs(5),
        format!("spectral err {spectral:.3e} (<= 1e-10), fd err {fd:.3e} (<= 1e-6), {elapsed:.2?} (< 5s)"),
    )
}

fn cosine_mode(n: usize, horizon: f64, steps: usize) -> Scenario {
    let k0 = SpatialProfile::from_fn(n, |x| 1.0 + 0.5 * (3.0 * x).cos()).unwrap();
    Scenario::new(TechnologyPath::constant(0.0), ConsumptionField::zero(), k0, horizon)
        .with_steps(steps)
}

// 2. single-mode decay at rate 9
fn single_mode_decay() -> Outcome {
    let exact = |x: f64, t: f64| 1.0 + 0.5 * (-9.0 * t).exp() * (3.0 * x).cos();
    let s = cosine_mode(256, 2.0, 100);
    let field = solve(&s).unwrap();
    let spectral = sup_error(&field, exact);
    let rate = match convergence_report(&field, &s).unwrap().decay_fit {
        DecayFit::Rate { rate, .. } => rate,
        DecayFit::BelowFloor => f64::NAN,
    };
    let rate_ok = ((rate + 9.0) / 9.0).abs() <= 0.01;

    let coarse = cosine_mode(32, 0.5, 1);
    let errors: Vec<f64> = [(64, 0.02), (128, 0.01), (256, 0.005)]
        .iter()
        .map(|&(points, dt)| sup_error(&solve_fd(&coarse, &FdConfig::new(points, dt)).unwrap(), exact))
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let ratios_ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    Outcome::new(
        rate_ok && spectral <= 1e-10 && ratios_ok,
        format!(
            "decay rate {rate:.5} (-9 within 1%), spectral err {spectral:.3e} (<= 1e-10), \
             fd ratios {:.3}, {:.3} (in [3.5, 4.5])",
            ratios[0], ratios[1]
        ),
    )
}

/// Non-negative random profile with eight modes.
fn random_capital(rng: &mut ChaCha8Rng, n: usize, mean: f64) -> SpatialProfile {
    let amps: Vec<(f64, f64)> = (0..8)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let total: f64 = amps.iter().map(|(a, b)| a.abs() + b.abs()).sum();
    let scale = rng.gen_range(0.2..0.9) * mean / total;
    SpatialProfile::from_fn(n, |x| {
        mean + amps
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let m = (k + 1) as f64;
                scale * (a * (m * x).cos() + b * (m * x).sin())
            })
            .sum::<f64>()
    })
    .unwrap()
}

fn random_technology(rng: &mut ChaCha8Rng) -> TechnologyPath {
    if rng.gen_bool(0.5) {
        TechnologyPath::constant(rng.gen_range(0.05..0.4))
    } else {
        let base = rng.gen_range(0.1..0.4);
        let amplitude = rng.gen_range(0.0..base - 0.05);
        TechnologyPath::sinusoidal(base, amplitude, rng.gen_range(0.5..3.0))
    }
}

fn random_consumption(rng: &mut ChaCha8Rng, level: f64, floor_rate: f64) -> ConsumptionField {
    let mean = rng.gen_range(0.2..1.0) * level;
    let c1 = rng.gen_range(-0.3..0.3) * mean;
    let s2 = rng.gen_range(-0.3..0.3) * mean;
    let spatial = SpatialShape::Fourier {
        mean,
        cos: vec![c1],
        sin: vec![0.0, s2],
    };
    let temporal = match rng.gen_range(0..3) {
        0 => TimeProfile::Constant(1.0),
        1 => TimeProfile::Exponential {
            scale: 1.0,
            rate: rng.gen_range(0.0..0.8) * floor_rate,
        },
        _ => TimeProfile::Sinusoidal {
            base: 1.0,
            amplitude: rng.gen_range(0.0..0.5),
            frequency: rng.gen_range(0.5..4.0),
        },
    };
    ConsumptionField::separable(spatial, temporal)
}

fn random_scenario(rng: &mut ChaCha8Rng, n: usize, horizon: f64, level: f64) -> Scenario {
    let technology = random_technology(rng);
    let floor = technology.effective_lower_bound();
    let consumption = random_consumption(rng, level, floor);
    let mean = rng.gen_range(0.5..2.0);
    let k0 = random_capital(rng, n, mean);
    Scenario::new(technology, consumption, k0, horizon).with_steps(20)
}

/// Random scenarios that pass the discounted-consumption check.
fn feasible_scenarios(seed: u64, count: usize, n: usize, horizon: f64, level: f64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = random_scenario(&mut rng, n, horizon, level);
        let report = check_theorem2(&s).unwrap();
        if report.verdict.passed() && report.margin > 1e-6 {
            out.push(s);
        }
    }
    out
}

fn relative_disagreement(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    a.sup_distance(b) / a.sup_norm()
}

// 3. spectral against finite differences
fn solver_equivalence(scenarios: &[Scenario]) -> Outcome {
    let start = Instant::now();
    let cfg = FdConfig::new(256, 5e-4);
    let worst = scenarios
        .iter()
        .map(|s| relative_disagreement(&solve(s).unwrap(), &solve_fd(s, &cfg).unwrap()))
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-3 && elapsed < Duration::from_secs(120),
        format!(
            "{} scenarios, worst relative disagreement {worst:.3e} (<= 1e-3), {elapsed:.2?} (< 2 min)",
            scenarios.len()
        ),
    )
}

// 4. uniform bound on the oscillating kernel part
fn kernel_bound() -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    for t in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let bound = kernel_decay_bound(t).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let d = grid_point(i, 64) - grid_point(j, 64);
                let sum = oscillating_sum(d, t, 1e-15).unwrap();
                worst_excess = worst_excess.max(sum.value.abs() + sum.tail_bound - bound);
            }
        }
    }
    Outcome::new(
        worst_excess <= 1e-12,
        format!("max(|partial sum| + tail - bound) = {worst_excess:.3e} (<= 1e-12)"),
    )
}

// 5. non-negativity under the sufficient condition
fn non_negativity() -> Outcome {
    let scenarios = feasible_scenarios(5, 50, 128, 10.0, 1.5);
    let worst_min = scenarios
        .iter()
        .map(|s| solve(s).unwrap().min_value())
        .fold(f64::INFINITY, f64::min);

    let violating = Scenario::new(
        TechnologyPath::constant(1.0),
        ConsumptionField::constant(1.0),
        SpatialProfile::constant(64, 0.5).unwrap(),
        2.0,
    );
    let report = check_theorem2(&violating).unwrap();
    let flagged = !report.verdict.passed() && (report.margin + 0.5).abs() < 1e-8;
    let goes_negative = solve(&violating).unwrap().min_value() < 0.0;
    Outcome::new(
        worst_min >= -1e-9 && flagged && goes_negative,
        format!(
            "min over 50 feasible fields {worst_min:.6} (>= -1e-9), violating margin {:.10} \
             (flagged: {flagged}), violating field negative: {goes_negative}",
            report.margin
        ),
    )
}

fn asymptotic_scenario(technology: TechnologyPath, horizon: f64) -> Scenario {
    let k0 = SpatialProfile::from_fn(256, |x| 1.0 + 0.5 * x.cos() + 0.25 * (2.0 * x).sin()).unwrap();
    let spatial = SpatialShape::Fourier {
        mean: 0.02,
        cos: vec![0.01],
        sin: vec![],
    };
    let c = ConsumptionField::separable(spatial, TimeProfile::Constant(1.0));
    Scenario::new(technology, c, k0, horizon)
        .with_steps(horizon as usize)
        .with_tolerances(Tolerances {
            quadrature: 1e-12,
            ..Tolerances::default()
        })
}

fn deviation_at(s: &Scenario, t: f64) -> (f64, f64, f64) {
    let field = solve(s).unwrap();
    let report = convergence_report(&field, s).unwrap();
    let j = report.times.iter().position(|u| (u - t).abs() < 1e-9).unwrap();
    (report.predicted_limit, report.sup_deviation[j], report.spatial_inequality[j])
}

// 6. convergence to the detrended limit, constant technology
fn asymptotic_constant() -> Outcome {
    let s = asymptotic_scenario(TechnologyPath::constant(0.1), 40.0);
    let (limit, dev40, _) = deviation_at(&s, 40.0);
    let (_, _, ineq20) = deviation_at(&s, 20.0);
    // consumption still to be drained from the mean after t = 40
    let remaining = 0.2 * (-4.0f64).exp();
    Outcome::new(
        dev40 <= 1e-5 && ineq20 <= 1e-6,
        format!(
            "limit {limit:.10}, sup deviation at t=40 {dev40:.3e} (<= 1e-5; remaining mean drain \
             {remaining:.3e}), spatial inequality at t=20 {ineq20:.3e} (<= 1e-6)"
        ),
    )
}

// 7. convergence to the detrended limit, oscillating technology
fn asymptotic_varying() -> Outcome {
    let s = asymptotic_scenario(TechnologyPath::sinusoidal(0.1, 0.05, 1.0), 60.0);
    let (limit, dev60, _) = deviation_at(&s, 60.0);
    let tail = predicted_limit(&s).unwrap().tail_bound;
    let remaining = quadrature::adaptive(
        |t| s.technology.discount(t) * s.consumption.grid_mean(256, t),
        60.0,
        600.0,
        1e-14,
    )
    .unwrap();
    Outcome::new(
        dev60 <= 1e-5,
        format!(
            "limit {limit:.10} (tail {tail:.1e}), sup deviation at t=60 {dev60:.3e} (<= 1e-5; \
             remaining mean drain {remaining:.3e})"
        ),
    )
}

// 8. spatial mean of the detrended field
fn mean_dynamics(scenarios: &[Scenario]) -> Outcome {
    let mut worst = 0.0f64;
    for s in scenarios {
        let n = s.grid_size();
        let h = solve_detrended(s).unwrap();
        let m0 = s.initial_capital.mean();
        let mut drain = 0.0;
        for (j, pair) in h.times.windows(2).enumerate() {
            drain += quadrature::adaptive(
                |t| s.technology.discount(t) * s.consumption.grid_mean(n, t),
                pair[0],
                pair[1],
                1e-13,
            )
            .unwrap();
            let mean = h.values[j + 1].iter().sum::<f64>() / n as f64;
            worst = worst.max((mean - (m0 - drain)).abs());
        }
    }
    Outcome::new(worst <= 1e-8, format!("worst mean identity error {worst:.3e} (<= 1e-8)"))
}

fn scale_consumption(c: &ConsumptionField, alpha: f64) -> ConsumptionField {
    match c {
        ConsumptionField::Separable { spatial, temporal } => {
            let temporal = match temporal {
                TimeProfile::Constant(v) => TimeProfile::Constant(alpha * v),
                TimeProfile::Exponential { scale, rate } => TimeProfile::Exponential {
                    scale: alpha * scale,
                    rate: *rate,
                },
                TimeProfile::Sinusoidal { base, amplitude, frequency } => TimeProfile::Sinusoidal {
                    base: alpha * base,
                    amplitude: alpha * amplitude,
                    frequency: *frequency,
                },
                TimeProfile::Sampled { times, values } => TimeProfile::Sampled {
                    times: times.clone(),
                    values: values.iter().map(|v| alpha * v).collect(),
                },
            };
            ConsumptionField::separable(spatial.clone(), temporal)
        }
        ConsumptionField::Sampled { .. } => unreachable!("generator only builds separable fields"),
    }
}

// 9. margins move the right way under scaling
fn margin_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..100 {
        let s = random_scenario(&mut rng, 64, 5.0, 1.0);
        let alpha = rng.gen_range(0.05..0.95);
        let beta = rng.gen_range(1.05..3.0);
        let less_c = Scenario {
            consumption: scale_consumption(&s.consumption, alpha),
            ..s.clone()
        };
        let more_k = Scenario {
            initial_capital: SpatialProfile::new(
                s.initial_capital.samples().iter().map(|v| beta * v).collect(),
            )
            .unwrap(),
            ..s.clone()
        };
        let (t1, t2) = (check_theorem1(&s).unwrap(), check_theorem2(&s).unwrap());
        let (t1c, t2c) = (check_theorem1(&less_c).unwrap(), check_theorem2(&less_c).unwrap());
        let t2k = check_theorem2(&more_k).unwrap();
        if t1c.margin < t1.margin || t2c.margin < t2.margin || t2k.margin < t2.margin {
            violations += 1;
        }
    }
    Outcome::new(violations == 0, format!("{violations} of 100 pairs decreased a margin"))
}

fn main() {
    let solver_set = feasible_scenarios(3, 20, 256, 2.0, 0.5);
    let criteria: Vec<Criterion> = vec![
        ("closed-form benchmark", Box::new(closed_form_benchmark)),
        ("single-mode decay", Box::new(single_mode_decay)),
        ("solver equivalence", Box::new(|| solver_equivalence(&solver_set))),
        ("kernel decay bound", Box::new(kernel_bound)),
        ("non-negativity", Box::new(non_negativity)),
        ("asymptotic limit, constant A", Box::new(asymptotic_constant)),
        ("asymptotic limit, time-varying A", Box::new(asymptotic_varying)),
        ("mean dynamics", Box::new(|| mean_dynamics(&solver_set))),
        ("margin monotonicity", Box::new(margin_monotonicity)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
