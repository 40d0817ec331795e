//! Independent reference solution by θ-scheme time stepping.
//!
//! Space uses the periodic central second difference on a uniform grid that
//! refines the scenario grid by an integer factor. Each step solves
//!
//! ```text
//! (I − θ·dt·L(t+dt)) k_new = (I + (1−θ)·dt·L(t)) k_old − dt·c(·, t+θ·dt)
//! ```
//!
//! with `L(t) = D₂ + A(t)·I`. θ = ½ is Crank–Nicolson.

use crate::error::{Error, Result};
use crate::fourier::FourierGrid;
use crate::model::{nyquist_limit, Producer, Scenario, SpaceTimeField, TWO_PI};
use crate::tridiagonal::solve_cyclic;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Number of finite-difference grid points; a multiple of the scenario grid.
    pub points: usize,
    pub dt: f64,
    /// Implicitness weight in `[0, 1]`.
    pub theta: f64,
}

impl FdConfig {
    pub fn new(points: usize, dt: f64) -> Self {
        Self {
            points,
            dt,
            theta: 0.5,
        }
    }

    /// Grid from a spacing, rounded to the nearest whole number of points.
    pub fn from_spacing(dx: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidConfig(format!("grid spacing {dx} must be positive")));
        }
        Ok(Self::new((TWO_PI / dx).round() as usize, dt))
    }

    /// Configuration from the scenario's `fd_dx` / `fd_dt` tolerances.
    pub fn for_scenario(s: &Scenario) -> Result<Self> {
        Self::from_spacing(s.tolerances.fd_dx, s.tolerances.fd_dt)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn dx(&self) -> f64 {
        TWO_PI / self.points as f64
    }

    fn check(&self, grid: usize) -> Result<()> {
        if self.points < 3 || !self.points.is_multiple_of(grid) {
            return Err(Error::InvalidConfig(format!(
                "{} finite-difference points is not a multiple of the {grid}-point scenario grid",
                self.points
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("time step {} must be positive", self.dt)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidConfig(format!("theta {} outside [0, 1]", self.theta)));
        }
        let limit = 0.5 * self.dx() * self.dx();
        if self.theta < 0.5 && self.dt > limit {
            return Err(Error::Unstable {
                dt: self.dt,
                limit,
                theta: self.theta,
            });
        }
        Ok(())
    }
}

/// Solves the scenario on its time mesh; the output lives on the scenario grid.
pub fn solve_fd(s: &Scenario, cfg: &FdConfig) -> Result<SpaceTimeField> {
    s.ensure_valid()?;
    let n = s.grid_size();
    cfg.check(n)?;
    let m = cfg.points;
    let stride = m / n;
    let inv_dx2 = 1.0 / (cfg.dx() * cfg.dx());
    let theta = cfg.theta;

    let mut k = if m == n {
        s.initial_capital.samples().to_vec()
    } else {
        // band-limited interpolation of the initial data onto the finer grid
        let coarse = FourierGrid::new(n).analyze(&s.initial_capital, nyquist_limit(n))?;
        FourierGrid::new(m).synthesize_samples(&coarse)?
    };

    let restrict = |k: &[f64]| -> Vec<f64> {
        if stride == 1 {
            k.to_vec()
        } else {
            k.iter().step_by(stride).copied().collect()
        }
    };

    let mut values = vec![s.initial_capital.samples().to_vec()];
    let mut rhs = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut step_index = 0usize;

    for pair in s.time_mesh.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let steps = ((b - a) / cfg.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = (b - a) / steps as f64;
        for step in 0..steps {
            let t = a + step as f64 * dt;
            let t_next = if step + 1 == steps { b } else { t + dt };
            let a_old = s.technology.rate(t);
            let a_new = s.technology.rate(t_next);
            let c = s.consumption.sample(m, t + theta * dt);
            let explicit = (1.0 - theta) * dt;
            for i in 0..m {
                let left = k[(i + m - 1) % m];
                let right = k[(i + 1) % m];
                let lap = (left - 2.0 * k[i] + right) * inv_dx2;
                rhs[i] = k[i] + explicit * (lap + a_old * k[i]) - dt * c[i];
            }
            if theta == 0.0 {
                std::mem::swap(&mut k, &mut rhs);
            } else {
                let off = -theta * dt * inv_dx2;
                let d = 1.0 + 2.0 * theta * dt * inv_dx2 - theta * dt * a_new;
                diag.iter_mut().for_each(|v| *v = d);
                let offs = vec![off; m - 1];
                k = solve_cyclic(&offs, &diag, &offs, off, off, &rhs)
                    .map_err(|_| Error::SolverBreakdown { step: step_index })?;
            }
            step_index += 1;
        }
        values.push(restrict(&k));
    }

    SpaceTimeField::new(s.time_mesh.clone(), values, Producer::FiniteDifference, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConsumptionField, SpatialProfile, TechnologyPath};

    fn flat(a: f64, c: f64, k: f64) -> Scenario {
        Scenario::new(
            TechnologyPath::constant(a),
            ConsumptionField::constant(c),
            SpatialProfile::constant(16, k).unwrap(),
            1.0,
        )
        .with_steps(4)
    }

    #[test]
    fn constant_state_is_preserved() {
        let s = flat(0.0, 0.0, 2.5);
        let f = solve_fd(&s, &FdConfig::new(16, 0.01)).unwrap();
        let dev = f.values.iter().flatten().fold(0.0f64, |m, v| m.max((v - 2.5).abs()));
        // Sherman–Morrison roundoff only, over 100 steps
        assert!(dev < 1e-13, "{dev}");
    }

    #[test]
    fn explicit_scheme_is_checked_for_stability() {
        let s = flat(0.0, 0.0, 1.0);
        let cfg = FdConfig::new(64, 0.01).with_theta(0.0);
        assert!(matches!(solve_fd(&s, &cfg), Err(Error::Unstable { .. })));
        let ok = FdConfig::new(16, 0.05).with_theta(0.0);
        assert!(solve_fd(&s, &ok).is_ok());
    }

    #[test]
    fn grid_must_refine_scenario_grid() {
        let s = flat(0.0, 0.0, 1.0);
        assert!(matches!(solve_fd(&s, &FdConfig::new(24, 0.01)), Err(Error::InvalidConfig(_))));
        assert!(solve_fd(&s, &FdConfig::new(48, 0.01)).is_ok());
    }

    #[test]
    fn spacing_rounds_to_points() {
        let cfg = FdConfig::from_spacing(TWO_PI / 256.0, 1e-3).unwrap();
        assert_eq!(cfg.points, 256);
        assert!(FdConfig::from_spacing(0.0, 1e-3).is_err());
    }

    #[test]
    fn constant_scenario_matches_linear_ode() {
        let (k, c0, a0) = (1.5, 0.2, 0.3);
        let s = flat(a0, c0, k).with_steps(10);
        let f = solve_fd(&s, &FdConfig::new(16, 1e-3)).unwrap();
        for (t, row) in f.times.iter().zip(&f.values) {
            let exact = (k - c0 / a0) * (a0 * t).exp() + c0 / a0;
            assert!(row.iter().all(|v| (v - exact).abs() < 1e-6));
        }
    }

    fn cosine(n: usize, m: f64) -> Scenario {
        let k0 = SpatialProfile::from_fn(n, |x| 1.0 + 0.5 * (m * x).cos()).unwrap();
        Scenario::new(TechnologyPath::constant(0.0), ConsumptionField::zero(), k0, 0.5).with_steps(1)
    }

    #[test]
    fn heat_flow_conserves_mean_and_respects_minimum() {
        let s = cosine(32, 3.0).with_steps(20);
        let f = solve_fd(&s, &FdConfig::new(64, 5e-3)).unwrap();
        let mut prev_min = f64::NEG_INFINITY;
        let mut prev_max = f64::INFINITY;
        for row in &f.values {
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            assert!((mean - 1.0).abs() < 1e-13);
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo >= prev_min - 1e-14 && hi <= prev_max + 1e-14);
            prev_min = lo;
            prev_max = hi;
        }
    }

    #[test]
    fn crank_nicolson_is_second_order() {
        let s = cosine(16, 3.0);
        let exact = |x: f64| 1.0 + 0.5 * (-9.0 * 0.5f64).exp() * (3.0 * x).cos();
        let err = |points: usize, dt: f64| {
            let f = solve_fd(&s, &FdConfig::new(points, dt)).unwrap();
            f.values[1]
                .iter()
                .enumerate()
                .map(|(i, v)| (v - exact(s.initial_capital.x(i))).abs())
                .fold(0.0, f64::max)
        };
        let e = [err(32, 0.02), err(64, 0.01), err(128, 0.005)];
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }
}
