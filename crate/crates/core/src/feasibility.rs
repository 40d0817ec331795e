//! Sufficient conditions for a non-negative solution.
//!
//! Both checks bound the discounted consumption flow by the initial capital.
//! The running integral has a non-negative integrand, so its supremum over
//! `t` is the infinite-horizon value; it is computed as a quadrature on
//! `[0, T_end]` plus a certified tail whenever consumption has a growth
//! envelope slower than the technology floor. A failed check is reported as
//! inconclusive: the conditions are sufficient, not necessary.

use std::fmt;

use crate::error::Result;
use crate::model::Scenario;
use crate::quadrature;

/// Outcome of one hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The sufficient condition does not hold; the solution may still be non-negative.
    Inconclusive,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Bound on the discounted consumption beyond the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    Bounded(f64),
    /// No bound available; verdicts only cover `[0, T_end]`.
    Unbounded,
}

impl Tail {
    pub fn value(self) -> f64 {
        match self {
            Tail::Bounded(v) => v,
            Tail::Unbounded => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    /// Consumption is spatially constant (the only periodic concave case).
    pub concavity_ok: bool,
    /// Largest spatial range of `c` seen on the check times.
    pub spatial_range: f64,
    pub bound_ok: bool,
    /// `min_x [k0(x) − ∫ e^{-∫A} c(x,s) ds]`.
    pub margin: f64,
    pub worst_index: usize,
    pub tail: Tail,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Report {
    pub bound_ok: bool,
    /// `floor − budget`.
    pub margin: f64,
    /// `sup_t ∫_0^t e^{-∫A} max_x c ds`, including the tail.
    pub budget: f64,
    /// `min_x k0`.
    pub floor: f64,
    pub tail: Tail,
    pub verdict: Verdict,
}

/// Heuristic necessary condition: `e^{-∫A}·max_x c → 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FootnoteReport {
    pub discounted_c_vanishes: bool,
    /// Fitted slope of `ln(e^{-∫A}·max_x c)` over the last tenth of the horizon.
    pub log_slope: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub theorem1: Theorem1Report,
    pub theorem2: Theorem2Report,
    pub footnote: FootnoteReport,
}

/// Certified bound on `∫_T^∞ e^{-∫_0^s A}·max_x c(x,s) ds`.
///
/// With `max_x c ≤ M·e^{rs}` and `A ≥ A₊ > r` the integral is at most
/// `M·e^{rT}·e^{-∫_0^T A}/(A₊ − r)`.
pub fn horizon_tail(s: &Scenario) -> Tail {
    let env = s.consumption.envelope();
    if env.bound == 0.0 {
        return Tail::Bounded(0.0);
    }
    let a_plus = s.technology.effective_lower_bound();
    if a_plus > env.rate {
        let t = s.horizon;
        let log = env.rate * t - s.technology.cumulative_unchecked(t);
        Tail::Bounded(env.bound * log.exp() / (a_plus - env.rate))
    } else {
        Tail::Unbounded
    }
}

/// Times on which spatial constancy of `c` is inspected.
fn refined_mesh(s: &Scenario) -> Vec<f64> {
    const SUBDIVISIONS: usize = 4;
    let mut out = Vec::with_capacity(s.time_mesh.len() * SUBDIVISIONS);
    for pair in s.time_mesh.windows(2) {
        for k in 0..SUBDIVISIONS {
            out.push(pair[0] + (pair[1] - pair[0]) * k as f64 / SUBDIVISIONS as f64);
        }
    }
    out.push(s.horizon);
    out
}

pub fn check_theorem1(s: &Scenario) -> Result<Theorem1Report> {
    s.ensure_valid()?;
    let n = s.grid_size();
    let tol = s.tolerances.margin;

    let spatial_range = refined_mesh(s)
        .into_iter()
        .map(|t| {
            let c = s.consumption.sample(n, t);
            let (lo, hi) = c
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
            hi - lo
        })
        .fold(0.0, f64::max);
    let concavity_ok = spatial_range <= tol;

    let running = quadrature::adaptive_vec(
        |t, out| {
            let d = s.technology.discount(t);
            for (o, c) in out.iter_mut().zip(s.consumption.sample(n, t)) {
                *o = d * c;
            }
        },
        n,
        0.0,
        s.horizon,
        s.tolerances.quadrature,
    )?;
    let tail = horizon_tail(s);
    let (worst_index, margin) = s
        .initial_capital
        .samples()
        .iter()
        .zip(&running)
        .map(|(k, r)| k - r - tail.value())
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, m)| if m < best.1 { (i, m) } else { best });
    let bound_ok = margin >= -tol;
    Ok(Theorem1Report {
        concavity_ok,
        spatial_range,
        bound_ok,
        margin,
        worst_index,
        tail,
        verdict: Verdict::from_bool(concavity_ok && bound_ok),
    })
}

/// `∫_0^T e^{-∫A}·max_x c(x,s) ds` on the scenario grid.
pub fn discounted_max_consumption(s: &Scenario) -> Result<f64> {
    let n = s.grid_size();
    quadrature::adaptive(
        |t| s.technology.discount(t) * s.consumption.grid_max(n, t),
        0.0,
        s.horizon,
        s.tolerances.quadrature,
    )
}

pub fn check_theorem2(s: &Scenario) -> Result<Theorem2Report> {
    s.ensure_valid()?;
    let tail = horizon_tail(s);
    let budget = discounted_max_consumption(s)? + tail.value();
    let floor = s.initial_capital.min();
    let margin = floor - budget;
    let bound_ok = floor >= budget - s.tolerances.margin;
    Ok(Theorem2Report {
        bound_ok,
        margin,
        budget,
        floor,
        tail,
        verdict: Verdict::from_bool(bound_ok),
    })
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (my + slope * (x - mx));
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

pub fn check_footnote_limits(s: &Scenario) -> Result<FootnoteReport> {
    s.ensure_valid()?;
    const SAMPLES: usize = 21;
    let n = s.grid_size();
    let start = 0.9 * s.horizon;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..SAMPLES)
        .map(|k| start + (s.horizon - start) * k as f64 / (SAMPLES - 1) as f64)
        .filter_map(|t| {
            // work in logs so fast growth does not overflow before discounting
            let c = s.consumption.grid_max(n, t);
            (c > 0.0).then(|| (t, c.ln() - s.technology.cumulative_unchecked(t)))
        })
        .unzip();
    let (vanishes, log_slope) = if xs.len() < 2 {
        (true, f64::NEG_INFINITY)
    } else {
        let (slope, _) = fit_slope(&xs, &ys);
        (slope < 0.0, slope)
    };
    Ok(FootnoteReport {
        discounted_c_vanishes: vanishes,
        log_slope,
        verdict: Verdict::from_bool(vanishes),
    })
}

pub fn check_all(s: &Scenario) -> Result<FeasibilityReport> {
    Ok(FeasibilityReport {
        theorem1: check_theorem1(s)?,
        theorem2: check_theorem2(s)?,
        footnote: check_footnote_limits(s)?,
    })
}
