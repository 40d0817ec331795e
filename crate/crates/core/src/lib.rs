//! Spatial AK growth on the circle.
//!
//! Capital `k(x,t)` on the circle obeys `k_t = k_xx + A(t)k − c(x,t)`. This
//! crate provides:
//!
//! - [`spectral`]: the closed-form Fourier/Duhamel solution,
//! - [`fd_oracle`]: an independent Crank–Nicolson reference solver,
//! - [`feasibility`]: sufficient conditions for a non-negative solution,
//! - [`asymptotics`]: the long-run detrended limit and convergence diagnostics,
//!
//! built on the shared types in [`model`], the transforms in [`fourier`] and
//! the heat kernel in [`greens`].

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fd_oracle;
pub mod feasibility;
pub mod fourier;
pub mod greens;
pub mod model;
pub mod quadrature;
pub mod spectral;
pub mod tridiagonal;

pub use asymptotics::{
    consumption_deviation_bound, consumption_term_deviation, convergence_report,
    predicted_limit, ConvergenceDiagnostics, DecayFit, LimitEstimate,
};
pub use error::{Error, Result};
pub use fd_oracle::{solve_fd, FdConfig};
pub use feasibility::{
    check_all, check_footnote_limits, check_theorem1, check_theorem2, FeasibilityReport,
    FootnoteReport, Tail, Theorem1Report, Theorem2Report, Verdict,
};
pub use fourier::{analyze, synthesize, FourierGrid, ModeSpectrum};
pub use greens::{kernel, kernel_decay_bound, smoothed_initial, KernelEvaluation};
pub use model::{
    canonicalize, cumulative_technology, grid_point, nyquist_limit, uniform_mesh,
    validate_scenario, CirclePoint, ConsumptionField, GrowthEnvelope, Producer, Scenario,
    SpaceTimeField, SpatialProfile, SpatialShape, TechnologyKind, TechnologyPath, TimeProfile,
    Tolerances, Violation, TWO_PI,
};
pub use spectral::{discounted_source, solve, solve_detrended, trade_balance, DetrendedField};
