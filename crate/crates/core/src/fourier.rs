//! Real Fourier analysis and synthesis on the uniform circle grid.
//!
//! Coefficients follow the convention
//! `p(x) = mean + Σ_{n≥1} aₙ cos(nx) + bₙ sin(nx)`, so `mean` is the grid
//! average of the samples (the discrete spatial mean).

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{nyquist_limit, SpatialProfile};

/// Real Fourier coefficients of a periodic profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Constant-mode coefficient, equal to the spatial mean.
    pub mean: f64,
    /// `cos[n-1]` multiplies `cos(nx)`.
    pub cos: Vec<f64>,
    /// `sin[n-1]` multiplies `sin(nx)`.
    pub sin: Vec<f64>,
}

impl ModeSpectrum {
    pub fn zeros(modes: usize) -> Self {
        Self {
            mean: 0.0,
            cos: vec![0.0; modes],
            sin: vec![0.0; modes],
        }
    }

    pub fn constant(value: f64, modes: usize) -> Self {
        Self {
            mean: value,
            ..Self::zeros(modes)
        }
    }

    /// Number of non-constant modes carried.
    pub fn modes(&self) -> usize {
        self.cos.len()
    }

    /// Evaluates the truncated series at an arbitrary angle.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut acc = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let nx = (k + 1) as f64 * x;
            acc += a * nx.cos() + b * nx.sin();
        }
        acc
    }

    /// `self + alpha·other`, coefficient-wise; both must carry the same modes.
    pub fn add_scaled(&self, alpha: f64, other: &ModeSpectrum) -> ModeSpectrum {
        assert_eq!(self.modes(), other.modes(), "mode count mismatch");
        ModeSpectrum {
            mean: self.mean + alpha * other.mean,
            cos: self.cos.iter().zip(&other.cos).map(|(a, b)| a + alpha * b).collect(),
            sin: self.sin.iter().zip(&other.sin).map(|(a, b)| a + alpha * b).collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> ModeSpectrum {
        ModeSpectrum {
            mean: alpha * self.mean,
            cos: self.cos.iter().map(|a| alpha * a).collect(),
            sin: self.sin.iter().map(|b| alpha * b).collect(),
        }
    }

    /// Largest coefficient difference, over all modes.
    pub fn max_abs_diff(&self, other: &ModeSpectrum) -> f64 {
        let mut d = (self.mean - other.mean).abs();
        for (a, b) in self.cos.iter().zip(&other.cos).chain(self.sin.iter().zip(&other.sin)) {
            d = d.max((a - b).abs());
        }
        d
    }

    /// Grid mean of the square of the synthesized profile (Parseval).
    pub fn mean_square(&self) -> f64 {
        let tail: f64 = self
            .cos
            .iter()
            .zip(&self.sin)
            .map(|(a, b)| a * a + b * b)
            .sum();
        self.mean * self.mean + 0.5 * tail
    }
}

/// Cached forward and inverse transforms for one grid size.
#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid").field("n", &self.n).finish()
    }
}

impl FourierGrid {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        let limit = nyquist_limit(self.n);
        if modes > limit {
            return Err(Error::Nyquist {
                modes,
                grid_size: self.n,
                limit,
            });
        }
        Ok(())
    }

    /// Discrete real Fourier coefficients of `samples` up to `modes`.
    pub fn analyze_samples(&self, samples: &[f64], modes: usize) -> Result<ModeSpectrum> {
        assert_eq!(samples.len(), self.n, "sample count does not match the grid");
        self.check_modes(modes)?;
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 2.0 / self.n as f64;
        Ok(ModeSpectrum {
            mean: buf[0].re / self.n as f64,
            cos: (1..=modes).map(|k| scale * buf[k].re).collect(),
            sin: (1..=modes).map(|k| -scale * buf[k].im).collect(),
        })
    }

    pub fn analyze(&self, p: &SpatialProfile, modes: usize) -> Result<ModeSpectrum> {
        self.analyze_samples(p.samples(), modes)
    }

    /// Grid values of the truncated series.
    pub fn synthesize_samples(&self, m: &ModeSpectrum) -> Result<Vec<f64>> {
        self.check_modes(m.modes())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        buf[0] = Complex64::new(m.mean, 0.0);
        for (k, (a, b)) in m.cos.iter().zip(&m.sin).enumerate() {
            let c = Complex64::new(0.5 * a, -0.5 * b);
            buf[k + 1] = c;
            buf[self.n - k - 1] = c.conj();
        }
        self.inverse.process(&mut buf);
        Ok(buf.into_iter().map(|z| z.re).collect())
    }

    pub fn synthesize(&self, m: &ModeSpectrum) -> Result<SpatialProfile> {
        SpatialProfile::new(self.synthesize_samples(m)?)
    }
}

/// Fourier coefficients of `p` for modes `1..=modes`.
pub fn analyze(p: &SpatialProfile, modes: usize) -> Result<ModeSpectrum> {
    FourierGrid::new(p.grid_size()).analyze(p, modes)
}

/// Evaluates `m` on an `n`-point grid.
pub fn synthesize(m: &ModeSpectrum, n: usize) -> Result<SpatialProfile> {
    if n < SpatialProfile::MIN_GRID {
        return Err(Error::Nyquist {
            modes: m.modes(),
            grid_size: n,
            limit: nyquist_limit(n),
        });
    }
    FourierGrid::new(n).synthesize(m)
}
