//! Scenarios shared by the benchmarks.

use spatial_ak::{
    ConsumptionField, Scenario, SpatialProfile, SpatialShape, TechnologyPath, TimeProfile,
};

/// Three-mode initial capital with mildly inhomogeneous constant consumption.
pub fn converging(points: usize, horizon: f64, steps: usize) -> Scenario {
    let k0 = SpatialProfile::from_fn(points, |x| 1.0 + 0.5 * x.cos() + 0.25 * (2.0 * x).sin())
        .expect("valid profile");
    let spatial = SpatialShape::Fourier {
        mean: 0.02,
        cos: vec![0.01],
        sin: vec![],
    };
    Scenario::new(
        TechnologyPath::constant(0.1),
        ConsumptionField::separable(spatial, TimeProfile::Constant(1.0)),
        k0,
        horizon,
    )
    .with_steps(steps)
}

/// Same as [`converging`] with an oscillating technology level, which routes
/// the spectral solver through its quadrature path.
pub fn oscillating(points: usize, horizon: f64, steps: usize) -> Scenario {
    Scenario {
        technology: TechnologyPath::sinusoidal(0.1, 0.05, 1.0),
        ..converging(points, horizon, steps)
    }
}
