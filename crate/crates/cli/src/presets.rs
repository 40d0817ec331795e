//! Named scenario files emitted by `gen`.

use clap::ValueEnum;

use crate::scenario_file::{
    ConsumptionSpec, GridSpec, ProfileSpec, ScenarioFile, TechnologySpec, TimeSpec, ToleranceSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// k0 ≡ 2, c ≡ 0.1, A ≡ 0.05: the capital stock stays at 2.
    AkBenchmark,
    /// k0 = 1 + ½cos 3x without consumption or growth.
    SingleMode,
    /// Three-mode k0 converging under constant A = 0.1.
    Convergence,
    /// Same as `convergence` with A = 0.1 + 0.05 sin t.
    TimeVarying,
    /// k0 ≡ 0.5, c ≡ 1, A ≡ 1: consumption exhausts capital.
    Violating,
}

fn constant(value: f64) -> ProfileSpec {
    ProfileSpec::Constant { value }
}

fn grid(points: usize, horizon: f64, steps: usize) -> GridSpec {
    GridSpec {
        points,
        horizon,
        steps: Some(steps),
        times: None,
        modes: None,
    }
}

fn flat_consumption(c: f64) -> ConsumptionSpec {
    ConsumptionSpec::Separable {
        spatial: constant(c),
        temporal: TimeSpec::Constant { value: 1.0 },
    }
}

fn converging(technology: TechnologySpec, horizon: f64) -> ScenarioFile {
    ScenarioFile {
        technology,
        consumption: ConsumptionSpec::Separable {
            spatial: ProfileSpec::Fourier {
                mean: 0.02,
                cos: vec![0.01],
                sin: vec![],
            },
            temporal: TimeSpec::Constant { value: 1.0 },
        },
        initial_capital: ProfileSpec::Fourier {
            mean: 1.0,
            cos: vec![0.5],
            sin: vec![0.0, 0.25],
        },
        grid: grid(256, horizon, horizon as usize),
        tolerances: Some(ToleranceSpec {
            quadrature: Some(1e-12),
            ..ToleranceSpec::default()
        }),
    }
}

impl Preset {
    pub fn file(self) -> ScenarioFile {
        match self {
            Preset::AkBenchmark => ScenarioFile {
                technology: TechnologySpec::Constant {
                    rate: 0.05,
                    lower_bound: None,
                },
                consumption: flat_consumption(0.1),
                initial_capital: constant(2.0),
                grid: grid(256, 20.0, 100),
                tolerances: None,
            },
            Preset::SingleMode => ScenarioFile {
                technology: TechnologySpec::Constant {
                    rate: 0.0,
                    lower_bound: None,
                },
                consumption: flat_consumption(0.0),
                initial_capital: ProfileSpec::Fourier {
                    mean: 1.0,
                    cos: vec![0.0, 0.0, 0.5],
                    sin: vec![],
                },
                grid: grid(256, 2.0, 100),
                tolerances: None,
            },
            Preset::Convergence => converging(
                TechnologySpec::Constant {
                    rate: 0.1,
                    lower_bound: None,
                },
                40.0,
            ),
            Preset::TimeVarying => converging(
                TechnologySpec::Sinusoidal {
                    base: 0.1,
                    amplitude: 0.05,
                    frequency: 1.0,
                    lower_bound: Some(0.05),
                },
                60.0,
            ),
            Preset::Violating => ScenarioFile {
                technology: TechnologySpec::Constant {
                    rate: 1.0,
                    lower_bound: None,
                },
                consumption: flat_consumption(1.0),
                initial_capital: constant(0.5),
                grid: grid(64, 2.0, 100),
                tolerances: None,
            },
        }
    }
}
