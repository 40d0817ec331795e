//! Closed-form spectral solution of the capital-accumulation equation.
//!
//! The discount transform `h = e^{-∫A}·k` turns `k_t = k_xx + A(t)k − c`
//! into the heat equation with source `h_t = h_xx − γ`, `γ = e^{-∫A}·c`.
//! Each Fourier mode then evolves independently:
//!
//! ```text
//! hₙ(t) = e^{-n²t}·k0ₙ − ∫_0^t e^{-n²(t−s)} γₙ(s) ds
//! ```
//!
//! The time integral is advanced interval by interval along the mesh. The
//! factor `e^{-n²(t−s)}` is integrated exactly against a polynomial
//! interpolant of `γₙ` on Gauss–Legendre panels, so stiff high modes need
//! no extra resolution. Sources that are exponential in time under a
//! constant technology level use an exact formula instead.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fourier::{FourierGrid, ModeSpectrum};
use crate::model::{
    ConsumptionField, Producer, Scenario, SpaceTimeField, SpatialProfile, TimeProfile,
};
use crate::quadrature::GaussLegendre;

/// Interpolation nodes per panel.
const PANEL_NODES: usize = 8;
/// Widest panel used on the first pass.
const MAX_PANEL_WIDTH: f64 = 0.5;
/// Panel count at which refinement gives up.
const MAX_PANELS: usize = 1 << 14;

/// Detrended solution `h(x,t)` and the discounted source `γ` on the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DetrendedField {
    pub times: Vec<f64>,
    /// `values[j][i] = h(x_i, t_j)`.
    pub values: Vec<Vec<f64>>,
    /// Mode coefficients of `h` at each mesh time.
    pub spectra: Vec<ModeSpectrum>,
    /// `γ(x_i, t_j)` at each mesh time.
    pub source: Vec<SpatialProfile>,
}

impl DetrendedField {
    /// `h(x, t_j)` at an arbitrary angle, from the mode coefficients.
    pub fn evaluate(&self, j: usize, x: f64) -> f64 {
        self.spectra[j].evaluate(x)
    }

    pub fn to_field(&self) -> SpaceTimeField {
        SpaceTimeField {
            times: self.times.clone(),
            values: self.values.clone(),
            producer: Producer::Spectral,
            detrended: true,
        }
    }
}

/// `γ(x_i, t) = e^{-∫_0^t A}·c(x_i, t)`.
pub fn discounted_source(s: &Scenario, t: f64) -> Result<SpatialProfile> {
    s.discounted_source(t)
}

/// How the source spectrum `γₙ(s)` is obtained at a given time.
enum SourceModel<'a> {
    /// `γₙ(s) = gₙ·C·e^{βs}` exactly.
    Exponential { shape: ModeSpectrum, scale: f64, beta: f64 },
    /// `γₙ(s) = gₙ·f(s)·e^{-∫A}`, spatial spectrum computed once.
    Separable {
        shape: ModeSpectrum,
        temporal: &'a TimeProfile,
        scenario: &'a Scenario,
    },
    /// Sample and transform at every node.
    General {
        grid: &'a FourierGrid,
        scenario: &'a Scenario,
    },
}

impl<'a> SourceModel<'a> {
    fn new(s: &'a Scenario, grid: &'a FourierGrid) -> Result<Self> {
        let modes = s.mode_cutoff;
        let n = s.grid_size();
        let ConsumptionField::Separable { spatial, temporal } = &s.consumption else {
            return Ok(SourceModel::General { grid, scenario: s });
        };
        let shape = grid.analyze_samples(&spatial.sample(n), modes)?;
        if let Some(a0) = s.technology.as_constant() {
            match temporal {
                TimeProfile::Constant(v) => {
                    return Ok(SourceModel::Exponential { shape, scale: *v, beta: -a0 })
                }
                TimeProfile::Exponential { scale, rate } => {
                    return Ok(SourceModel::Exponential {
                        shape,
                        scale: *scale,
                        beta: rate - a0,
                    })
                }
                _ => {}
            }
        }
        Ok(SourceModel::Separable { shape, temporal, scenario: s })
    }

    fn spectrum_at(&self, t: f64) -> Result<ModeSpectrum> {
        match self {
            SourceModel::Exponential { shape, scale, beta } => {
                Ok(shape.scaled(scale * (beta * t).exp()))
            }
            SourceModel::Separable {
                shape,
                temporal,
                scenario,
            } => Ok(shape.scaled(temporal.value(t) * scenario.technology.discount(t))),
            SourceModel::General { grid, scenario } => {
                let d = scenario.technology.discount(t);
                let mut c = scenario.consumption.sample(scenario.grid_size(), t);
                c.iter_mut().for_each(|v| *v *= d);
                grid.analyze_samples(&c, scenario.mode_cutoff)
            }
        }
    }
}

/// `(e^z − 1)/z`, continuous at 0.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + 0.5 * z
    } else {
        z.exp_m1() / z
    }
}

fn decay_rate(mode: usize) -> f64 {
    let n = mode as f64;
    n * n
}

/// Interpolation nodes on `[0, 1]` with Lagrange denominators.
struct PanelRule {
    nodes: [f64; PANEL_NODES],
    denom: [f64; PANEL_NODES],
    fine: GaussLegendre,
}

impl PanelRule {
    fn new() -> Self {
        let gl = GaussLegendre::new(PANEL_NODES);
        let mut nodes = [0.0; PANEL_NODES];
        for (u, z) in nodes.iter_mut().zip(&gl.nodes) {
            *u = 0.5 * (1.0 + z);
        }
        let mut denom = [1.0; PANEL_NODES];
        for i in 0..PANEL_NODES {
            for j in 0..PANEL_NODES {
                if i != j {
                    denom[i] *= nodes[i] - nodes[j];
                }
            }
        }
        Self {
            nodes,
            denom,
            fine: GaussLegendre::new(16),
        }
    }

    fn basis(&self, u: f64) -> [f64; PANEL_NODES] {
        let mut out = [0.0; PANEL_NODES];
        for (i, o) in out.iter_mut().enumerate() {
            let mut p = 1.0;
            for j in 0..PANEL_NODES {
                if i != j {
                    p *= u - self.nodes[j];
                }
            }
            *o = p / self.denom[i];
        }
        out
    }

    /// `∫_0^1 e^{-μ(1−u)} ℓ_i(u) du` for every node `i`.
    ///
    /// With `v = 1 − u` the weight `e^{-μv}` varies on the scale `1/μ`, so
    /// the integral runs over subintervals `[0,1/μ], [1/μ,2/μ], [2/μ,4/μ], …`
    /// and stops once the exponential is below double precision.
    fn exp_weights(&self, mu: f64) -> [f64; PANEL_NODES] {
        let mut w = [0.0; PANEL_NODES];
        let mut edges = vec![0.0];
        if mu <= 1.0 {
            edges.push(1.0);
        } else {
            let mut e = 1.0 / mu;
            loop {
                if e >= 1.0 {
                    edges.push(1.0);
                    break;
                }
                edges.push(e);
                if e * mu > 45.0 {
                    break;
                }
                e *= 2.0;
            }
        }
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            for (v, gw) in self.fine.nodes_on(lo, hi).zip(&self.fine.weights) {
                let f = (-mu * v).exp() * gw * half;
                let l = self.basis(1.0 - v);
                for (acc, li) in w.iter_mut().zip(l) {
                    *acc += f * li;
                }
            }
        }
        w
    }
}

/// Exponential-integrator weights keyed by panel width.
struct WeightCache {
    rule: PanelRule,
    modes: usize,
    by_width: HashMap<u64, Vec<[f64; PANEL_NODES]>>,
}

impl WeightCache {
    fn new(modes: usize) -> Self {
        Self {
            rule: PanelRule::new(),
            modes,
            by_width: HashMap::new(),
        }
    }

    /// Weights for modes `0..=modes`, already scaled by the panel width.
    fn get(&mut self, width: f64) -> &[[f64; PANEL_NODES]] {
        let rule = &self.rule;
        let modes = self.modes;
        self.by_width.entry(width.to_bits()).or_insert_with(|| {
            (0..=modes)
                .map(|n| {
                    let mut w = rule.exp_weights(decay_rate(n) * width);
                    w.iter_mut().for_each(|v| *v *= width);
                    w
                })
                .collect()
        })
    }
}

/// `Iₙ = ∫_a^b e^{-n²(b−s)} γₙ(s) ds` on `panels` equal panels.
fn duhamel_increment(
    source: &SourceModel<'_>,
    cache: &mut WeightCache,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<ModeSpectrum> {
    let modes = cache.modes;
    let width = (b - a) / panels as f64;
    let nodes = cache.rule.nodes;
    let mut out = ModeSpectrum::zeros(modes);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let hi = if p + 1 == panels { b } else { lo + width };
        let spectra: Vec<ModeSpectrum> = nodes
            .iter()
            .map(|u| source.spectrum_at(lo + width * u))
            .collect::<Result<_>>()?;
        let weights = cache.get(width);
        let lag = b - hi;
        for (n, w) in weights.iter().enumerate().take(modes + 1) {
            let carry = (-decay_rate(n) * lag).exp();
            if carry == 0.0 {
                continue;
            }
            if n == 0 {
                let acc: f64 = spectra.iter().zip(w).map(|(g, wi)| wi * g.mean).sum();
                out.mean += carry * acc;
            } else {
                let (mut ac, mut as_) = (0.0, 0.0);
                for (g, wi) in spectra.iter().zip(w) {
                    ac += wi * g.cos[n - 1];
                    as_ += wi * g.sin[n - 1];
                }
                out.cos[n - 1] += carry * ac;
                out.sin[n - 1] += carry * as_;
            }
        }
    }
    Ok(out)
}

/// Exact increment for `γₙ(s) = gₙ·C·e^{βs}`.
fn exponential_increment(
    shape: &ModeSpectrum,
    scale: f64,
    beta: f64,
    a: f64,
    b: f64,
) -> ModeSpectrum {
    let h = b - a;
    let factor = |n: usize| {
        let z = -(decay_rate(n) + beta) * h;
        scale * (beta * b).exp() * h * phi1(z)
    };
    ModeSpectrum {
        mean: shape.mean * factor(0),
        cos: shape.cos.iter().enumerate().map(|(k, g)| g * factor(k + 1)).collect(),
        sin: shape.sin.iter().enumerate().map(|(k, g)| g * factor(k + 1)).collect(),
    }
}

fn worst_mode(a: &ModeSpectrum, b: &ModeSpectrum) -> (usize, f64) {
    let mut worst = (0, (a.mean - b.mean).abs());
    for k in 0..a.modes() {
        let d = (a.cos[k] - b.cos[k]).abs().max((a.sin[k] - b.sin[k]).abs());
        if d > worst.1 {
            worst = (k + 1, d);
        }
    }
    worst
}

fn max_coeff(m: &ModeSpectrum) -> f64 {
    m.cos
        .iter()
        .chain(&m.sin)
        .fold(m.mean.abs(), |acc, v| acc.max(v.abs()))
}

/// Duhamel increment on `[a, b]` refined until two successive panel
/// counts agree to `tol`.
fn refined_increment(
    source: &SourceModel<'_>,
    cache: &mut WeightCache,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<ModeSpectrum> {
    let mut panels = ((b - a) / MAX_PANEL_WIDTH).ceil().max(1.0) as usize;
    let mut coarse = duhamel_increment(source, cache, a, b, panels)?;
    loop {
        panels *= 2;
        let fine = duhamel_increment(source, cache, a, b, panels)?;
        let (mode, diff) = worst_mode(&coarse, &fine);
        if diff <= tol * max_coeff(&fine).max(1.0) {
            return Ok(fine);
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                mode,
                time: b,
                estimate: diff,
            });
        }
        coarse = fine;
    }
}

/// Detrended solution `h` on the scenario mesh.
pub fn solve_detrended(s: &Scenario) -> Result<DetrendedField> {
    s.ensure_valid()?;
    let n = s.grid_size();
    let modes = s.mode_cutoff;
    let grid = FourierGrid::new(n);
    let source = SourceModel::new(s, &grid)?;
    let mut cache = WeightCache::new(modes);

    let k0 = s.initial_capital.samples();
    let mut h = grid.analyze_samples(k0, modes)?;
    let mut spectra = vec![h.clone()];
    let mut values = vec![k0.to_vec()];
    let mut sources = vec![s.discounted_source(0.0)?];

    for pair in s.time_mesh.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let dt = b - a;
        let tol = s.tolerances.quadrature * dt / s.horizon;
        let increment = match &source {
            SourceModel::Exponential { shape, scale, beta } => {
                exponential_increment(shape, *scale, *beta, a, b)
            }
            _ => refined_increment(&source, &mut cache, a, b, tol)?,
        };
        for k in 0..modes {
            let decay = (-decay_rate(k + 1) * dt).exp();
            h.cos[k] *= decay;
            h.sin[k] *= decay;
        }
        h = h.add_scaled(-1.0, &increment);
        values.push(grid.synthesize_samples(&h)?);
        spectra.push(h.clone());
        sources.push(s.discounted_source(b)?);
    }

    Ok(DetrendedField {
        times: s.time_mesh.clone(),
        values,
        spectra,
        source: sources,
    })
}

/// Capital stock `k = e^{∫A}·h` on the scenario mesh.
pub fn solve(s: &Scenario) -> Result<SpaceTimeField> {
    let h = solve_detrended(s)?;
    Ok(h.to_field().raw_view(&s.technology))
}

/// Trade balance `τ = −k_xx` of one snapshot, computed spectrally.
pub fn trade_balance(field: &SpaceTimeField, t_index: usize) -> Result<SpatialProfile> {
    let row = field.row(t_index)?;
    let grid = FourierGrid::new(row.len());
    let modes = crate::model::nyquist_limit(row.len());
    let mut m = grid.analyze_samples(row, modes)?;
    m.mean = 0.0;
    for k in 0..modes {
        let lambda = decay_rate(k + 1);
        m.cos[k] *= lambda;
        m.sin[k] *= lambda;
    }
    grid.synthesize(&m)
}
