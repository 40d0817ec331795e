//! Heat kernel on the circle.
//!
//! `G(x,y,t) = ½ + Σ_{n≥1} e^{-n²t} cos(n(x−y))`, applied as
//! `(1/π)∫ G(x,y,t) f(y) dy`. The constant term carries weight ½ so that
//! the kernel action tends to the identity as `t → 0` and preserves the
//! spatial mean of `f`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::ModeSpectrum;
use crate::model::SpatialProfile;

/// Weight of the constant mode.
pub const MEAN_WEIGHT: f64 = 0.5;

const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluation {
    pub value: f64,
    /// Certified bound on the neglected terms `Σ_{n>M} e^{-n²t}`.
    pub tail_bound: f64,
    /// Number of oscillating terms summed (`M`).
    pub terms_used: usize,
}

fn check_positive(t: f64) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime {
            expected: "positive",
            got: t,
        })
    }
}

/// Geometric majorant of `Σ_{n>m} e^{-n²t}`.
pub fn tail_majorant(m: usize, t: f64) -> f64 {
    let m1 = (m + 1) as f64;
    (-m1 * m1 * t).exp() / -(-(2.0 * m1 + 1.0) * t).exp_m1()
}

/// Number of terms after which the tail majorant drops to `tol`.
pub fn terms_for(t: f64, tol: f64) -> Result<usize> {
    check_positive(t)?;
    let mut m = 0;
    while tail_majorant(m, t) > tol {
        m += 1;
        if m > MAX_TERMS {
            return Err(Error::SeriesTooLong {
                t,
                max_terms: MAX_TERMS,
            });
        }
    }
    Ok(m)
}

/// `Σ_{n≥1} e^{-n²t} cos(n·d)` truncated to `tol`.
pub fn oscillating_sum(d: f64, t: f64, tol: f64) -> Result<KernelEvaluation> {
    let terms = terms_for(t, tol)?;
    let mut value = 0.0;
    // sum smallest terms first
    for n in (1..=terms).rev() {
        let nf = n as f64;
        value += (-nf * nf * t).exp() * (nf * d).cos();
    }
    Ok(KernelEvaluation {
        value,
        tail_bound: tail_majorant(terms, t),
        terms_used: terms,
    })
}

/// Kernel value `G(x,y,t)` with certified truncation.
pub fn kernel(x: f64, y: f64, t: f64, tol: f64) -> Result<KernelEvaluation> {
    let mut e = oscillating_sum(x - y, t, tol)?;
    e.value += MEAN_WEIGHT;
    Ok(e)
}

/// Uniform bound `e^{-t}/(1−e^{-2t})` on `|Σ_{n≥1} e^{-n²t} cos(n(x−y))|`.
pub fn kernel_decay_bound(t: f64) -> Result<f64> {
    check_positive(t)?;
    Ok((-t).exp() / -(-2.0 * t).exp_m1())
}

/// Heat semigroup acting mode-wise: `aₙ, bₙ ↦ e^{-n²t}·(aₙ, bₙ)`.
pub fn smoothed_initial(k0: &ModeSpectrum, t: f64) -> Result<ModeSpectrum> {
    if !(t >= 0.0) {
        return Err(Error::InvalidTime {
            expected: "non-negative",
            got: t,
        });
    }
    let decay = |k: usize| {
        let n = (k + 1) as f64;
        (-n * n * t).exp()
    };
    Ok(ModeSpectrum {
        mean: k0.mean,
        cos: k0.cos.iter().enumerate().map(|(k, a)| a * decay(k)).collect(),
        sin: k0.sin.iter().enumerate().map(|(k, b)| b * decay(k)).collect(),
    })
}

/// `(1/π)∫ G(x_i,y,t) p(y) dy` at the grid points, with the `y`-integral
/// done by the periodic trapezoid rule on the profile's own grid.
pub fn apply_kernel(p: &SpatialProfile, t: f64, tol: f64) -> Result<SpatialProfile> {
    let n = p.grid_size();
    let dy = 2.0 * PI / n as f64;
    // G depends only on x − y, so one row of offsets suffices
    let offsets: Vec<f64> = (0..n)
        .map(|d| kernel(p.x(d), 0.0, t, tol).map(|e| e.value))
        .collect::<Result<_>>()?;
    let samples = (0..n)
        .map(|i| {
            let acc: f64 = p
                .samples()
                .iter()
                .enumerate()
                .map(|(j, v)| offsets[(i + n - j) % n] * v)
                .sum();
            acc * dy / PI
        })
        .collect();
    SpatialProfile::new(samples)
}
