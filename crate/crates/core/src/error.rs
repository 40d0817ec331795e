use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {}", join_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("time must be {expected}, got {got}")]
    InvalidTime { expected: &'static str, got: f64 },

    #[error("{modes} modes exceed the Nyquist limit {limit} for a grid of {grid_size} points")]
    Nyquist {
        modes: usize,
        grid_size: usize,
        limit: usize,
    },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unstable finite-difference step: dt = {dt} exceeds dx^2/2 = {limit} for theta = {theta}")]
    Unstable { dt: f64, limit: f64, theta: f64 },

    #[error("tridiagonal solve broke down at step {step}")]
    SolverBreakdown { step: usize },

    #[error("quadrature did not converge (mode {mode}, interval ending at t = {time}, error estimate {estimate:e})")]
    QuadratureNonConvergence { mode: usize, time: f64, estimate: f64 },

    #[error("adaptive quadrature on [{a}, {b}] exceeded its subdivision budget (error estimate {estimate:e})")]
    QuadratureBudget { a: f64, b: f64, estimate: f64 },

    #[error("kernel series needs more than {max_terms} terms at t = {t}")]
    SeriesTooLong { t: f64, max_terms: usize },

    #[error("infinite-horizon tail is unbounded: {0}")]
    UnboundedTail(String),

    #[error("index {index} out of range for {len} rows")]
    RowOutOfRange { index: usize, len: usize },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
