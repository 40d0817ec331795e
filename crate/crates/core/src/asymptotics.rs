//! Long-run detrended limit and convergence diagnostics.
//!
//! Every location converges to the same detrended level
//! `mean(k0) − ∫_0^∞ e^{-∫A} mean(c(·,s)) ds`. Means are true spatial
//! averages, i.e. `(1/2π)∫`, evaluated on the scenario grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::feasibility::fit_slope;
use crate::model::{Scenario, SpaceTimeField, SpatialProfile};
use crate::quadrature;
use crate::spectral::solve_detrended;

/// Spatial inequality below this is treated as numerically zero.
pub const INEQUALITY_FLOOR: f64 = 1e-14;

/// Largest horizon the limit integral is extended to.
const MAX_LIMIT_HORIZON: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// Certified bound on the consumption integral beyond `horizon`.
    pub tail_bound: f64,
    /// Upper end of the quadrature.
    pub horizon: f64,
}

/// Bound on `∫_T^∞ e^{-∫A} mean(c) ds`, or `None` without a technology floor.
fn mean_tail(s: &Scenario, t: f64) -> Option<f64> {
    let env = s.consumption.envelope();
    if env.bound == 0.0 {
        return Some(0.0);
    }
    let a_plus = s.technology.effective_lower_bound();
    (a_plus > env.rate).then(|| {
        let log = env.rate * t - s.technology.cumulative_unchecked(t);
        env.bound * log.exp() / (a_plus - env.rate)
    })
}

/// Predicted detrended limit, with the consumption integral carried past the
/// horizon until the certified tail is below the quadrature tolerance.
pub fn predicted_limit(s: &Scenario) -> Result<LimitEstimate> {
    s.ensure_valid()?;
    let n = s.grid_size();
    let tol = s.tolerances.quadrature;
    let k_mean = s.initial_capital.mean();

    let mut horizon = s.horizon;
    let mut tail = mean_tail(s, horizon).ok_or_else(|| {
        Error::UnboundedTail(
            "consumption does not grow slower than the technology floor; \
             declare a positive lower bound on A or use a constant rate"
                .into(),
        )
    })?;
    while tail > tol {
        horizon *= 2.0;
        if horizon > MAX_LIMIT_HORIZON {
            return Err(Error::UnboundedTail(format!(
                "tail bound {tail:e} still above tolerance at t = {horizon}"
            )));
        }
        tail = mean_tail(s, horizon).unwrap_or(f64::INFINITY);
    }
    let drain = if s.consumption.envelope().bound == 0.0 {
        0.0
    } else {
        quadrature::adaptive(
            |t| s.technology.discount(t) * s.consumption.grid_mean(n, t),
            0.0,
            horizon,
            tol,
        )?
    };
    Ok(LimitEstimate {
        value: k_mean - drain,
        tail_bound: tail,
        horizon,
    })
}

/// Exponential decay rate of the spatial inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayFit {
    /// Slope of `ln(max − min)` against `t`, with the RMS residual of the fit.
    Rate { rate: f64, residual: f64 },
    /// Inequality stayed below the numerical floor.
    BelowFloor,
}

impl DecayFit {
    pub fn rate(self) -> Option<f64> {
        match self {
            DecayFit::Rate { rate, .. } => Some(rate),
            DecayFit::BelowFloor => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    pub predicted_limit: f64,
    pub times: Vec<f64>,
    /// `sup_x |h(x,t_j) − limit|`.
    pub sup_deviation: Vec<f64>,
    /// `max_x h − min_x h` at each mesh time.
    pub spatial_inequality: Vec<f64>,
    pub decay_fit: DecayFit,
}

/// Measures how the detrended field approaches the predicted limit.
pub fn convergence_report(field: &SpaceTimeField, s: &Scenario) -> Result<ConvergenceDiagnostics> {
    let limit = predicted_limit(s)?.value;
    let detrended = field.detrended_view(&s.technology);
    let mut sup_deviation = Vec::with_capacity(detrended.times.len());
    let mut spatial_inequality = Vec::with_capacity(detrended.times.len());
    for row in &detrended.values {
        let (lo, hi, dev) = row.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0f64),
            |(lo, hi, dev), &v| (lo.min(v), hi.max(v), dev.max((v - limit).abs())),
        );
        sup_deviation.push(dev);
        spatial_inequality.push(hi - lo);
    }

    let start = detrended.times.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = detrended.times[start..]
        .iter()
        .zip(&spatial_inequality[start..])
        .filter(|(t, g)| **t > 0.0 && **g > INEQUALITY_FLOOR)
        .map(|(t, g)| (*t, g.ln()))
        .unzip();
    let decay_fit = if xs.len() < 2 {
        DecayFit::BelowFloor
    } else {
        let (rate, residual) = fit_slope(&xs, &ys);
        DecayFit::Rate { rate, residual }
    };

    Ok(ConvergenceDiagnostics {
        predicted_limit: limit,
        times: detrended.times,
        sup_deviation,
        spatial_inequality,
        decay_fit,
    })
}

/// `Σ_{n≥1} 1/(n² − a)` for `0 ≤ a < 1`.
fn reciprocal_shift_sum(a: f64) -> f64 {
    if a < 1e-4 {
        // ζ(2) + a·ζ(4) + a²·ζ(6) + a³·ζ(8)
        PI.powi(2) / 6.0 + a * PI.powi(4) / 90.0 + a * a * PI.powi(6) / 945.0
            + a * a * a * PI.powi(8) / 9450.0
    } else {
        let r = a.sqrt();
        1.0 / (2.0 * a) - PI / (2.0 * r * (PI * r).tan())
    }
}

/// `Σ_{n≥1} e^{-n²t}/(n² − a)` for `t > 0`.
fn decaying_shift_sum(a: f64, t: f64) -> f64 {
    let mut acc = 0.0;
    let mut n = 1.0f64;
    loop {
        let term = (-n * n * t).exp() / (n * n - a);
        acc += term;
        if term < 1e-18 * acc.abs().max(1e-300) || n > 1e7 {
            return acc;
        }
        n += 1.0;
    }
}

/// Majorant of the non-constant part of the consumption drain at time `t`:
/// `max_{s≤t} c̃(s)·(e^{-A₀t}Σ 1/(n²−A₀) − Σ e^{-n²t}/(n²−A₀))`.
///
/// Here `c̃ = (1/π)∫c`, twice the spatial mean, which bounds every Fourier
/// coefficient amplitude of a non-negative profile. Needs a constant rate
/// `0 ≤ A₀ < 1` so that every `n² − A₀` is positive.
pub fn consumption_deviation_bound(s: &Scenario, t: f64) -> Result<f64> {
    let a0 = match s.technology.as_constant() {
        Some(a) if (0.0..1.0).contains(&a) => a,
        _ => {
            return Err(Error::InvalidConfig(
                "deviation bound needs a constant technology rate in [0, 1)".into(),
            ))
        }
    };
    if !(t >= 0.0) {
        return Err(Error::InvalidTime {
            expected: "non-negative",
            got: t,
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    const SAMPLES: usize = 1000;
    let n = s.grid_size();
    let c_max = (0..=SAMPLES)
        .map(|k| 2.0 * s.consumption.grid_mean(n, t * k as f64 / SAMPLES as f64))
        .fold(0.0, f64::max);
    let series = (-a0 * t).exp() * reciprocal_shift_sum(a0) - decaying_shift_sum(a0, t);
    Ok(c_max * series)
}

/// `sup_x` of the non-constant part of the consumption drain at each mesh
/// time, measured from the spectral solution with zero initial capital.
pub fn consumption_term_deviation(s: &Scenario) -> Result<Vec<f64>> {
    let zero = SpatialProfile::constant(s.grid_size(), 0.0)?;
    let drained = Scenario {
        initial_capital: zero,
        ..s.clone()
    };
    let h = solve_detrended(&drained)?;
    Ok(h
        .values
        .iter()
        .zip(&h.spectra)
        .map(|(row, m)| row.iter().fold(0.0f64, |acc, v| acc.max((v - m.mean).abs())))
        .collect())
}
