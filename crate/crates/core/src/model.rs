//! Domain types shared by the solvers, checkers and the CLI.
//!
//! Space is the unit circle, sampled on a uniform grid `x_i = 2πi/N`.
//! Every type here is immutable once built; operations are pure.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Default number of grid points on the circle.
pub const DEFAULT_GRID_SIZE: usize = 256;
/// Default number of uniform steps in a generated time mesh.
pub const DEFAULT_MESH_STEPS: usize = 100;

/// Maps an angle into `[0, 2π)`.
pub fn canonicalize(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Shortest arc length between two angles.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = canonicalize(a - b);
    d.min(TWO_PI - d)
}

/// A location on the circle, stored in canonical form.
///
/// Equality is up to a few ulps of arc, so `x` and `x + 2π` compare equal
/// even though the addition rounds.
#[derive(Debug, Clone, Copy)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        Self(canonicalize(x))
    }

    pub fn angle(self) -> f64 {
        self.0
    }
}

impl PartialEq for CirclePoint {
    fn eq(&self, other: &Self) -> bool {
        circular_distance(self.0, other.0) <= 1e-12
    }
}

/// `i`-th point of an `n`-point uniform grid on the circle.
pub fn grid_point(i: usize, n: usize) -> f64 {
    TWO_PI * i as f64 / n as f64
}

/// Samples of a periodic function at `x_i = 2πi/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialProfile {
    samples: Vec<f64>,
}

impl SpatialProfile {
    pub const MIN_GRID: usize = 4;

    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < Self::MIN_GRID {
            return Err(Error::InvalidProfile(format!(
                "grid of {} points, need at least {}",
                samples.len(),
                Self::MIN_GRID
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("sample {i} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        Self::new((0..n).map(|i| f(grid_point(i, n))).collect())
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn x(&self, i: usize) -> f64 {
        grid_point(i, self.samples.len())
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Periodic piecewise-linear interpolation between samples.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.samples.len();
        let pos = canonicalize(x) / TWO_PI * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        let a = self.samples[i];
        let b = self.samples[(i + 1) % n];
        a + frac * (b - a)
    }
}

/// Linear interpolation in `times` with constant extrapolation outside.
fn interp_linear(times: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return values[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let k = times.partition_point(|&s| s <= t) - 1;
    let (t0, t1) = (times[k], times[k + 1]);
    let w = (t - t0) / (t1 - t0);
    values[k] + w * (values[k + 1] - values[k])
}

/// `∫_0^t` of the linear interpolant of (`times`, `values`), with constant
/// extension before the first and after the last knot.
fn integral_linear(times: &[f64], values: &[f64], t: f64) -> f64 {
    let first = times[0];
    if t <= first {
        return values[0] * t;
    }
    let mut acc = values[0] * first;
    for k in 0..times.len() - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        if t <= t0 {
            break;
        }
        let hi = t.min(t1);
        let v_hi = interp_linear(times, values, hi);
        acc += 0.5 * (hi - t0) * (values[k] + v_hi);
    }
    let last = times.len() - 1;
    if t > times[last] {
        acc += values[last] * (t - times[last]);
    }
    acc
}

fn check_samples(times: &[f64], values: &[f64], what: &str, out: &mut Vec<Violation>) -> bool {
    if times.is_empty() || times.len() != values.len() {
        out.push(Violation::Samples(format!(
            "{what}: {} times vs {} values",
            times.len(),
            values.len()
        )));
        return false;
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        out.push(Violation::Samples(format!("{what}: non-finite entry")));
        return false;
    }
    if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
        out.push(Violation::Samples(format!(
            "{what}: sample times not increasing at index {}",
            k + 1
        )));
        return false;
    }
    true
}

/// How the technology level `A(t)` is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum TechnologyKind {
    Constant { rate: f64 },
    /// Linear interpolation between samples, constant outside the range.
    Sampled { times: Vec<f64>, values: Vec<f64> },
    /// `base + amplitude·sin(frequency·t)`.
    Sinusoidal {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
}

/// Technology level `A(t)`, uniform in space, with an optional declared
/// positive infimum `A₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyPath {
    pub kind: TechnologyKind,
    /// Declared lower bound `A₊` (0 when not declared).
    pub lower_bound: f64,
}

impl TechnologyPath {
    pub fn constant(rate: f64) -> Self {
        Self {
            kind: TechnologyKind::Constant { rate },
            lower_bound: 0.0,
        }
    }

    pub fn sinusoidal(base: f64, amplitude: f64, frequency: f64) -> Self {
        Self {
            kind: TechnologyKind::Sinusoidal {
                base,
                amplitude,
                frequency,
            },
            lower_bound: 0.0,
        }
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            kind: TechnologyKind::Sampled { times, values },
            lower_bound: 0.0,
        }
    }

    pub fn with_lower_bound(mut self, a_plus: f64) -> Self {
        self.lower_bound = a_plus;
        self
    }

    pub fn rate(&self, t: f64) -> f64 {
        match &self.kind {
            TechnologyKind::Constant { rate } => *rate,
            TechnologyKind::Sampled { times, values } => interp_linear(times, values, t),
            TechnologyKind::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => base + amplitude * (frequency * t).sin(),
        }
    }

    /// `∫_0^t A(s) ds`, in closed form for every supported kind.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime {
                expected: "non-negative",
                got: t,
            });
        }
        Ok(self.cumulative_unchecked(t))
    }

    pub(crate) fn cumulative_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            TechnologyKind::Constant { rate } => rate * t,
            TechnologyKind::Sampled { times, values } => integral_linear(times, values, t),
            TechnologyKind::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => {
                if *frequency == 0.0 {
                    base * t
                } else {
                    // 1 - cos(wt) = 2 sin^2(wt/2), no cancellation near 0
                    let half = (0.5 * frequency * t).sin();
                    base * t + amplitude * 2.0 * half * half / frequency
                }
            }
        }
    }

    /// `e^{-∫_0^t A}`.
    pub fn discount(&self, t: f64) -> f64 {
        (-self.cumulative_unchecked(t)).exp()
    }

    /// Largest lower bound on `A(t)` over `t ≥ 0` known from the
    /// declaration or the functional form.
    pub fn effective_lower_bound(&self) -> f64 {
        let intrinsic = match &self.kind {
            TechnologyKind::Constant { rate } => *rate,
            TechnologyKind::Sampled { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
            TechnologyKind::Sinusoidal {
                base, amplitude, ..
            } => base - amplitude.abs(),
        };
        intrinsic.max(self.lower_bound).max(0.0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            TechnologyKind::Constant { rate } => Some(rate),
            _ => None,
        }
    }

    fn validate(&self, out: &mut Vec<Violation>) {
        if !(self.lower_bound >= 0.0) || !self.lower_bound.is_finite() {
            out.push(Violation::Technology(format!(
                "declared lower bound {} must be finite and >= 0",
                self.lower_bound
            )));
        }
        let infimum = match &self.kind {
            TechnologyKind::Constant { rate } => *rate,
            TechnologyKind::Sampled { times, values } => {
                if !check_samples(times, values, "technology", out) {
                    return;
                }
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
            TechnologyKind::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => {
                if ![base, amplitude, frequency].iter().all(|v| v.is_finite()) {
                    out.push(Violation::Technology("non-finite parameter".into()));
                    return;
                }
                base - amplitude.abs()
            }
        };
        if !infimum.is_finite() {
            out.push(Violation::Technology("non-finite rate".into()));
        } else if infimum < 0.0 {
            out.push(Violation::Technology(format!(
                "technology level negative (infimum {infimum})"
            )));
        } else if infimum < self.lower_bound {
            out.push(Violation::Technology(format!(
                "technology level {infimum} below declared lower bound {}",
                self.lower_bound
            )));
        }
    }
}

/// `∫_0^t A(s) ds` for a technology path.
pub fn cumulative_technology(tech: &TechnologyPath, t: f64) -> Result<f64> {
    tech.cumulative(t)
}

/// Scalar function of time used as the temporal factor of separable consumption.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    Constant(f64),
    /// `scale·e^{rate·t}`.
    Exponential { scale: f64, rate: f64 },
    /// `base + amplitude·sin(frequency·t)`.
    Sinusoidal {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant(v) => *v,
            TimeProfile::Exponential { scale, rate } => scale * (rate * t).exp(),
            TimeProfile::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => base + amplitude * (frequency * t).sin(),
            TimeProfile::Sampled { times, values } => interp_linear(times, values, t),
        }
    }

    /// `(M, r)` with `|f(t)| ≤ M·e^{r t}` for all `t ≥ 0`.
    fn envelope(&self) -> (f64, f64) {
        match self {
            TimeProfile::Constant(v) => (v.abs(), 0.0),
            TimeProfile::Exponential { scale, rate } => (scale.abs(), *rate),
            TimeProfile::Sinusoidal {
                base, amplitude, ..
            } => (base.abs() + amplitude.abs(), 0.0),
            TimeProfile::Sampled { values, .. } => {
                (values.iter().fold(0.0, |m, v| m.max(v.abs())), 0.0)
            }
        }
    }

    fn validate(&self, out: &mut Vec<Violation>) {
        let inf = match self {
            TimeProfile::Constant(v) => *v,
            TimeProfile::Exponential { scale, rate } => {
                if !rate.is_finite() {
                    out.push(Violation::Consumption("non-finite growth rate".into()));
                    return;
                }
                *scale
            }
            TimeProfile::Sinusoidal {
                base,
                amplitude,
                frequency,
            } => {
                if !frequency.is_finite() {
                    out.push(Violation::Consumption("non-finite frequency".into()));
                    return;
                }
                base - amplitude.abs()
            }
            TimeProfile::Sampled { times, values } => {
                if !check_samples(times, values, "consumption time profile", out) {
                    return;
                }
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        };
        if !inf.is_finite() {
            out.push(Violation::Consumption("non-finite temporal factor".into()));
        } else if inf < 0.0 {
            out.push(Violation::Consumption(format!(
                "temporal factor negative (infimum {inf})"
            )));
        }
    }
}

/// Spatial factor of separable consumption.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialShape {
    Constant(f64),
    /// `mean + Σ_n cos[n-1]·cos(nx) + sin[n-1]·sin(nx)`.
    Fourier {
        mean: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// Periodic linear interpolation of grid samples.
    Samples(SpatialProfile),
}

impl SpatialShape {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            SpatialShape::Constant(v) => *v,
            SpatialShape::Fourier { mean, cos, sin } => {
                let mut acc = *mean;
                for (k, a) in cos.iter().enumerate() {
                    acc += a * ((k + 1) as f64 * x).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    acc += b * ((k + 1) as f64 * x).sin();
                }
                acc
            }
            SpatialShape::Samples(p) => p.value_at(x),
        }
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        match self {
            SpatialShape::Samples(p) if p.grid_size() == n => p.samples().to_vec(),
            _ => (0..n).map(|i| self.value(grid_point(i, n))).collect(),
        }
    }

    /// Upper bound on `max_x |shape(x)|`.
    fn sup_bound(&self) -> f64 {
        match self {
            SpatialShape::Constant(v) => v.abs(),
            SpatialShape::Fourier { mean, cos, sin } => {
                let n = cos.len().max(sin.len());
                let mut acc = mean.abs();
                for k in 0..n {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    acc += a.hypot(b);
                }
                acc
            }
            SpatialShape::Samples(p) => p.min().abs().max(p.max().abs()),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            SpatialShape::Constant(_) => true,
            SpatialShape::Fourier { cos, sin, .. } => cos.iter().chain(sin).all(|v| *v == 0.0),
            SpatialShape::Samples(p) => p.min() == p.max(),
        }
    }

    fn validate(&self, grid: usize, out: &mut Vec<Violation>) {
        if let SpatialShape::Fourier { mean, cos, sin } = self {
            if !std::iter::once(mean).chain(cos).chain(sin).all(|v| v.is_finite()) {
                out.push(Violation::Consumption("non-finite Fourier coefficient".into()));
                return;
            }
        }
        // the finite-difference oracle may evaluate between scenario grid points
        let fine = grid.max(SpatialProfile::MIN_GRID) * VALIDATION_REFINEMENT;
        let min = (0..fine)
            .map(|i| self.value(grid_point(i, fine)))
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            out.push(Violation::Consumption("non-finite spatial factor".into()));
        } else if min < 0.0 {
            out.push(Violation::Consumption(format!(
                "spatial factor negative (minimum {min})"
            )));
        }
    }
}

const VALIDATION_REFINEMENT: usize = 8;

/// Bound of the form `max_x c(x,t) ≤ bound·e^{rate·t}`, valid for all `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEnvelope {
    pub bound: f64,
    pub rate: f64,
}

/// Consumption flow `c(x,t) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConsumptionField {
    /// `c(x,t) = spatial(x)·temporal(t)`.
    Separable {
        spatial: SpatialShape,
        temporal: TimeProfile,
    },
    /// Rows of samples on a space grid, linear in time between rows and
    /// constant outside the sampled range.
    Sampled {
        times: Vec<f64>,
        rows: Vec<SpatialProfile>,
    },
}

impl ConsumptionField {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c0: f64) -> Self {
        ConsumptionField::Separable {
            spatial: SpatialShape::Constant(c0),
            temporal: TimeProfile::Constant(1.0),
        }
    }

    pub fn separable(spatial: SpatialShape, temporal: TimeProfile) -> Self {
        ConsumptionField::Separable { spatial, temporal }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match self {
            ConsumptionField::Separable { spatial, temporal } => {
                spatial.value(x) * temporal.value(t)
            }
            ConsumptionField::Sampled { times, rows } => {
                let (k, w) = bracket(times, t);
                let a = rows[k].value_at(x);
                if w == 0.0 {
                    a
                } else {
                    a + w * (rows[k + 1].value_at(x) - a)
                }
            }
        }
    }

    /// Values at the `n` grid points at time `t`.
    pub fn sample(&self, n: usize, t: f64) -> Vec<f64> {
        match self {
            ConsumptionField::Separable { spatial, temporal } => {
                let f = temporal.value(t);
                spatial.sample(n).into_iter().map(|v| v * f).collect()
            }
            ConsumptionField::Sampled { times, rows } => {
                let (k, w) = bracket(times, t);
                let row = |p: &SpatialProfile| -> Vec<f64> {
                    if p.grid_size() == n {
                        p.samples().to_vec()
                    } else {
                        (0..n).map(|i| p.value_at(grid_point(i, n))).collect()
                    }
                };
                let a = row(&rows[k]);
                if w == 0.0 {
                    a
                } else {
                    let b = row(&rows[k + 1]);
                    a.iter().zip(&b).map(|(u, v)| u + w * (v - u)).collect()
                }
            }
        }
    }

    pub fn grid_max(&self, n: usize, t: f64) -> f64 {
        self.sample(n, t).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn grid_mean(&self, n: usize, t: f64) -> f64 {
        self.sample(n, t).iter().sum::<f64>() / n as f64
    }

    pub fn separable_parts(&self) -> Option<(&SpatialShape, &TimeProfile)> {
        match self {
            ConsumptionField::Separable { spatial, temporal } => Some((spatial, temporal)),
            ConsumptionField::Sampled { .. } => None,
        }
    }

    pub fn envelope(&self) -> GrowthEnvelope {
        match self {
            ConsumptionField::Separable { spatial, temporal } => {
                let (m, rate) = temporal.envelope();
                GrowthEnvelope {
                    bound: spatial.sup_bound() * m,
                    rate,
                }
            }
            ConsumptionField::Sampled { rows, .. } => GrowthEnvelope {
                bound: rows
                    .iter()
                    .map(|r| r.max().abs().max(r.min().abs()))
                    .fold(0.0, f64::max),
                rate: 0.0,
            },
        }
    }

    fn validate(&self, grid: usize, out: &mut Vec<Violation>) {
        match self {
            ConsumptionField::Separable { spatial, temporal } => {
                spatial.validate(grid, out);
                temporal.validate(out);
            }
            ConsumptionField::Sampled { times, rows } => {
                if times.is_empty() || times.len() != rows.len() {
                    out.push(Violation::Samples(format!(
                        "consumption: {} times vs {} rows",
                        times.len(),
                        rows.len()
                    )));
                    return;
                }
                if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0])) {
                    out.push(Violation::Samples(format!(
                        "consumption: sample times not increasing at index {}",
                        k + 1
                    )));
                }
                for (j, row) in rows.iter().enumerate() {
                    if let Some(i) = row.samples().iter().position(|v| *v < 0.0) {
                        out.push(Violation::Consumption(format!(
                            "consumption negative at row {j}, index {i}"
                        )));
                    }
                }
            }
        }
    }
}

/// Index of the left knot and the interpolation weight, constant outside.
fn bracket(times: &[f64], t: f64) -> (usize, f64) {
    if t <= times[0] || times.len() == 1 {
        return (0, 0.0);
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return (last, 0.0);
    }
    let k = times.partition_point(|&s| s <= t) - 1;
    (k, (t - times[k]) / (times[k + 1] - times[k]))
}

/// Numerical settings carried by a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Truncation target for kernel series.
    pub series_tail: f64,
    /// Absolute target for time quadratures.
    pub quadrature: f64,
    /// Finite-difference time step.
    pub fd_dt: f64,
    /// Finite-difference grid spacing.
    pub fd_dx: f64,
    /// Absolute slack for feasibility margins.
    pub margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            series_tail: 1e-12,
            quadrature: 1e-10,
            fd_dt: 1e-3,
            fd_dx: TWO_PI / DEFAULT_GRID_SIZE as f64,
            margin: 1e-8,
        }
    }
}

/// Full statement of one capital-accumulation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub technology: TechnologyPath,
    pub consumption: ConsumptionField,
    pub initial_capital: SpatialProfile,
    pub horizon: f64,
    pub time_mesh: Vec<f64>,
    pub mode_cutoff: usize,
    pub tolerances: Tolerances,
}

impl Scenario {
    /// Scenario with a uniform 100-step mesh and the largest admissible mode cutoff.
    pub fn new(
        technology: TechnologyPath,
        consumption: ConsumptionField,
        initial_capital: SpatialProfile,
        horizon: f64,
    ) -> Self {
        let mode_cutoff = nyquist_limit(initial_capital.grid_size());
        Self {
            technology,
            consumption,
            initial_capital,
            horizon,
            time_mesh: uniform_mesh(horizon, DEFAULT_MESH_STEPS),
            mode_cutoff,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.time_mesh = uniform_mesh(self.horizon, steps);
        self
    }

    pub fn with_time_mesh(mut self, mesh: Vec<f64>) -> Self {
        self.time_mesh = mesh;
        self
    }

    pub fn with_mode_cutoff(mut self, modes: usize) -> Self {
        self.mode_cutoff = modes;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tolerances = tol;
        self
    }

    pub fn grid_size(&self) -> usize {
        self.initial_capital.grid_size()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_scenario(self)
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(v))
        }
    }

    /// Discounted source `γ(x_i,t) = e^{-∫A}·c(x_i,t)` on the scenario grid.
    pub fn discounted_source(&self, t: f64) -> Result<SpatialProfile> {
        if !(t >= 0.0) {
            return Err(Error::InvalidTime {
                expected: "non-negative",
                got: t,
            });
        }
        let d = self.technology.discount(t);
        let samples = self
            .consumption
            .sample(self.grid_size(), t)
            .into_iter()
            .map(|c| d * c)
            .collect();
        SpatialProfile::new(samples)
    }
}

/// Largest mode strictly below Nyquist on an `n`-point grid.
pub fn nyquist_limit(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

/// `steps + 1` equally spaced times on `[0, horizon]`, last one exactly `horizon`.
pub fn uniform_mesh(horizon: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    let mut mesh: Vec<f64> = (0..=steps)
        .map(|j| horizon * j as f64 / steps as f64)
        .collect();
    mesh[steps] = horizon;
    mesh
}

/// One violated invariant of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    GridTooSmall { size: usize },
    InitialCapitalNonFinite { index: usize },
    InitialCapitalNegative { index: usize, value: f64 },
    HorizonNotPositive { horizon: f64 },
    MeshEmpty,
    MeshStart { first: f64 },
    MeshEnd { last: f64, horizon: f64 },
    MeshNotIncreasing { index: usize },
    ModesAboveNyquist { modes: usize, limit: usize },
    Technology(String),
    Consumption(String),
    Samples(String),
    Tolerance { name: &'static str, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GridTooSmall { size } => write!(
                f,
                "grid of {size} points is smaller than the minimum {}",
                SpatialProfile::MIN_GRID
            ),
            Violation::InitialCapitalNonFinite { index } => {
                write!(f, "initial capital not finite at index {index}")
            }
            Violation::InitialCapitalNegative { index, value } => {
                write!(f, "initial capital negative at index {index} ({value})")
            }
            Violation::HorizonNotPositive { horizon } => {
                write!(f, "horizon {horizon} is not positive")
            }
            Violation::MeshEmpty => write!(f, "time mesh is empty"),
            Violation::MeshStart { first } => write!(f, "time mesh starts at {first}, not 0"),
            Violation::MeshEnd { last, horizon } => {
                write!(f, "time mesh ends at {last}, not at the horizon {horizon}")
            }
            Violation::MeshNotIncreasing { index } => {
                write!(f, "time mesh not increasing at index {index}")
            }
            Violation::ModesAboveNyquist { modes, limit } => {
                write!(f, "mode cutoff {modes} exceeds the Nyquist limit {limit}")
            }
            Violation::Technology(s) => write!(f, "technology: {s}"),
            Violation::Consumption(s) => write!(f, "consumption: {s}"),
            Violation::Samples(s) => write!(f, "samples: {s}"),
            Violation::Tolerance { name, value } => {
                write!(f, "tolerance {name} = {value} must be finite and positive")
            }
        }
    }
}

/// Every violated invariant of `s`; empty when the scenario is valid.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.grid_size();
    if n < SpatialProfile::MIN_GRID {
        out.push(Violation::GridTooSmall { size: n });
    }
    for (index, &v) in s.initial_capital.samples().iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation::InitialCapitalNonFinite { index });
        } else if v < 0.0 {
            out.push(Violation::InitialCapitalNegative { index, value: v });
        }
    }
    if !(s.horizon > 0.0) || !s.horizon.is_finite() {
        out.push(Violation::HorizonNotPositive { horizon: s.horizon });
    }
    match (s.time_mesh.first(), s.time_mesh.last()) {
        (Some(&first), Some(&last)) => {
            if first != 0.0 {
                out.push(Violation::MeshStart { first });
            }
            if last != s.horizon {
                out.push(Violation::MeshEnd {
                    last,
                    horizon: s.horizon,
                });
            }
            if let Some(k) = s.time_mesh.windows(2).position(|w| !(w[1] > w[0])) {
                out.push(Violation::MeshNotIncreasing { index: k + 1 });
            }
        }
        _ => out.push(Violation::MeshEmpty),
    }
    let limit = nyquist_limit(n);
    if s.mode_cutoff > limit {
        out.push(Violation::ModesAboveNyquist {
            modes: s.mode_cutoff,
            limit,
        });
    }
    s.technology.validate(&mut out);
    s.consumption.validate(n, &mut out);
    let t = &s.tolerances;
    for (name, value) in [
        ("series_tail", t.series_tail),
        ("quadrature", t.quadrature),
        ("fd_dt", t.fd_dt),
        ("fd_dx", t.fd_dx),
        ("margin", t.margin),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            out.push(Violation::Tolerance { name, value });
        }
    }
    out
}

/// Solution snapshots `k(x_i, t_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Producer {
    Spectral,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub times: Vec<f64>,
    /// `values[j][i]` at `(x_i, t_j)`.
    pub values: Vec<Vec<f64>>,
    pub producer: Producer,
    /// True when the values are `h = k·e^{-∫A}` rather than `k`.
    pub detrended: bool,
}

impl SpaceTimeField {
    pub fn new(
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
        producer: Producer,
        detrended: bool,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "{} times but {} rows",
                times.len(),
                values.len()
            )));
        }
        if let Some(first) = values.first() {
            if let Some(j) = values.iter().position(|r| r.len() != first.len()) {
                return Err(Error::InvalidProfile(format!(
                    "row {j} has {} points, expected {}",
                    values[j].len(),
                    first.len()
                )));
            }
        }
        Ok(Self {
            times,
            values,
            producer,
            detrended,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn row(&self, j: usize) -> Result<&[f64]> {
        self.values
            .get(j)
            .map(Vec::as_slice)
            .ok_or(Error::RowOutOfRange {
                index: j,
                len: self.values.len(),
            })
    }

    pub fn min_value(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Same snapshots as `h = k·e^{-∫A}` (no-op if already detrended).
    pub fn detrended_view(&self, tech: &TechnologyPath) -> SpaceTimeField {
        if self.detrended {
            return self.clone();
        }
        self.rescaled(|t| tech.discount(t), true)
    }

    /// Same snapshots as raw capital `k` (no-op if already raw).
    pub fn raw_view(&self, tech: &TechnologyPath) -> SpaceTimeField {
        if !self.detrended {
            return self.clone();
        }
        self.rescaled(|t| tech.cumulative_unchecked(t).exp(), false)
    }

    fn rescaled<F: Fn(f64) -> f64>(&self, factor: F, detrended: bool) -> SpaceTimeField {
        let values = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(&t, row)| {
                let f = factor(t);
                row.iter().map(|v| v * f).collect()
            })
            .collect();
        SpaceTimeField {
            times: self.times.clone(),
            values,
            producer: self.producer,
            detrended,
        }
    }

    /// `max |self − other|` over all snapshots; fields must share shape.
    pub fn sup_distance(&self, other: &SpaceTimeField) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "row count mismatch");
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}
