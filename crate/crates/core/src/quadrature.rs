//! Gauss–Legendre rules and a bisection-adaptive integrator.
//!
//! The adaptive routine compares one panel against its two halves and
//! subdivides wherever the difference exceeds the panel's share of the
//! tolerance. It is used for the scalar time integrals of the feasibility
//! and asymptotics modules, and in vector form for pointwise-in-space
//! running integrals.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Order of the panel rule used by the adaptive integrators.
const PANEL_ORDER: usize = 10;
/// Maximum number of accepted panels before giving up.
const PANEL_BUDGET: usize = 1 << 16;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped onto `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().map(move |&z| mid + half * z)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * z);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, d)
}

/// Adaptive integral of a scalar function on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let out = adaptive_vec(|s, buf: &mut [f64]| buf[0] = f(s), 1, a, b, tol)?;
    Ok(out[0])
}

/// Adaptive integral of a vector-valued function. `f(s, out)` writes `dim`
/// values; the error estimate is the max norm over components.
pub fn adaptive_vec<F>(mut f: F, dim: usize, a: f64, b: f64, tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut total = vec![0.0; dim];
    if b <= a {
        return Ok(total);
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let span = b - a;
    let mut scratch = vec![0.0; dim];
    let mut panel = |lo: f64, hi: f64, out: &mut Vec<f64>, scratch: &mut Vec<f64>| {
        out.iter_mut().for_each(|v| *v = 0.0);
        let half = 0.5 * (hi - lo);
        for (s, w) in rule.nodes_on(lo, hi).zip(&rule.weights) {
            f(s, scratch);
            for (o, v) in out.iter_mut().zip(scratch.iter()) {
                *o += w * half * v;
            }
        }
    };

    let mut whole = vec![0.0; dim];
    panel(a, b, &mut whole, &mut scratch);
    let mut stack = vec![(a, b, whole)];
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    let mut accepted = 0usize;
    while let Some((lo, hi, coarse)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        panel(lo, mid, &mut left, &mut scratch);
        panel(mid, hi, &mut right, &mut scratch);
        let estimate = coarse
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(c, (l, r))| (c - l - r).abs())
            .fold(0.0, f64::max);
        let share = tol * (hi - lo) / span;
        if estimate <= share || (hi - lo) <= 1e-13 * span.max(1.0) {
            for (t, (l, r)) in total.iter_mut().zip(left.iter().zip(&right)) {
                *t += l + r;
            }
            accepted += 1;
            if accepted > PANEL_BUDGET {
                return Err(Error::QuadratureBudget { a, b, estimate });
            }
        } else {
            if stack.len() + accepted > PANEL_BUDGET {
                return Err(Error::QuadratureBudget { a, b, estimate });
            }
            stack.push((mid, hi, right.clone()));
            stack.push((lo, mid, left.clone()));
        }
    }
    Ok(total)
}
