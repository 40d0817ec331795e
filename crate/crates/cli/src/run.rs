use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use spatial_ak::{
    check_all, convergence_report, predicted_limit, solve, solve_fd, validate_scenario, Error,
    FdConfig, FeasibilityReport, Scenario, SpaceTimeField,
};

use crate::error::CliError;
use crate::output;
use crate::scenario_file::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Spectral,
    Fd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Output {
    Field,
    Detrended,
    TradeBalance,
    Diagnostics,
    Feasibility,
}

impl Output {
    pub const DEFAULT: [Output; 4] = [
        Output::Field,
        Output::Detrended,
        Output::Diagnostics,
        Output::Feasibility,
    ];
}

/// Command-line overrides of scenario file settings.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub modes: Option<usize>,
    pub fd_dt: Option<f64>,
    pub fd_dx: Option<f64>,
    pub horizon: Option<f64>,
}

impl Overrides {
    /// Applies the horizon to the file and everything else to the built scenario.
    pub fn build(&self, file: &ScenarioFile, base: &Path) -> Result<Scenario, CliError> {
        let mut file = file.clone();
        if let Some(h) = self.horizon {
            if file.grid.times.is_some() {
                return Err(CliError::Usage(
                    "--horizon cannot rescale an explicit list of grid times".into(),
                ));
            }
            file.grid.horizon = h;
        }
        let mut s = file.build(base)?;
        if let Some(m) = self.modes {
            s.mode_cutoff = m;
        }
        if let Some(dt) = self.fd_dt {
            s.tolerances.fd_dt = dt;
        }
        if let Some(dx) = self.fd_dx {
            s.tolerances.fd_dx = dx;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub scenario_path: PathBuf,
    pub solver: Solver,
    pub outputs: Vec<Output>,
    pub output_dir: PathBuf,
    /// Adds `y`, `tau` and `s` columns to the field files.
    pub derived: bool,
    pub overrides: Overrides,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub feasibility: FeasibilityReport,
    pub min_capital: f64,
    pub predicted_limit: Option<f64>,
    pub decay_rate: Option<f64>,
    pub cross_check: Option<f64>,
    pub warnings: Vec<String>,
}

/// Rejects invalid scenarios with the full violation list.
pub fn validate(s: &Scenario) -> Result<(), CliError> {
    let v = validate_scenario(s);
    if v.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(v))
    }
}

pub fn run(req: &RunRequest) -> Result<RunSummary, CliError> {
    let (file, _) = crate::scenario_file::load(&req.scenario_path)?;
    let base = req.scenario_path.parent().unwrap_or(Path::new("."));
    let s = req.overrides.build(&file, base)?;
    run_scenario(&s, req.solver, &req.outputs, &req.output_dir, req.derived)
}

fn spatial_inequality(h: &SpaceTimeField) -> Vec<f64> {
    h.values
        .iter()
        .map(|row| {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .collect()
}

pub fn run_scenario(
    s: &Scenario,
    solver: Solver,
    outputs: &[Output],
    dir: &Path,
    derived: bool,
) -> Result<RunSummary, CliError> {
    validate(s)?;
    let mut warnings = Vec::new();
    let feasibility = check_all(s)?;
    if !feasibility.theorem2.verdict.passed() {
        warnings.push(format!(
            "non-negativity is not guaranteed (max-consumption margin {}); solving anyway",
            feasibility.theorem2.margin
        ));
    }

    let spectral = match solver {
        Solver::Spectral | Solver::Both => Some(solve(s)?),
        Solver::Fd => None,
    };
    let fd = match solver {
        Solver::Fd | Solver::Both => Some(solve_fd(s, &FdConfig::for_scenario(s)?)?),
        Solver::Spectral => None,
    };
    let primary = spectral.as_ref().or(fd.as_ref()).expect("a solver always runs");
    let cross_check = match (&spectral, &fd) {
        (Some(a), Some(b)) => Some(a.sup_distance(b)),
        _ => None,
    };

    let diagnostics = match predicted_limit(s) {
        Ok(_) => Some(convergence_report(primary, s)?),
        Err(Error::UnboundedTail(msg)) => {
            warnings.push(format!("no predicted limit: {msg}"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let want = |o: Output| outputs.contains(&o);
    let solved = [(spectral.as_ref(), ""), (fd.as_ref(), "_fd")];
    for (i, (field, suffix)) in solved.iter().enumerate() {
        let Some(field) = field else { continue };
        // fd output takes the plain names unless both solvers ran
        let suffix = if i == 1 && spectral.is_none() { "" } else { suffix };
        if want(Output::Field) {
            output::write_field(&dir.join(format!("field{suffix}.csv")), field, s, derived)?;
        }
        if want(Output::Detrended) {
            let h = field.detrended_view(&s.technology);
            output::write_detrended(&dir.join(format!("detrended{suffix}.csv")), &h)?;
        }
    }
    if want(Output::TradeBalance) {
        output::write_trade_balance(&dir.join("trade_balance.csv"), primary)?;
    }
    if want(Output::Feasibility) {
        output::write_feasibility(&dir.join("feasibility.csv"), &feasibility)?;
    }
    if want(Output::Diagnostics) {
        let h = primary.detrended_view(&s.technology);
        output::write_diagnostics(
            &dir.join("diagnostics.csv"),
            &h.times,
            &spatial_inequality(&h),
            diagnostics.as_ref(),
            cross_check,
        )?;
    }

    Ok(RunSummary {
        feasibility,
        min_capital: primary.min_value(),
        predicted_limit: diagnostics.as_ref().map(|d| d.predicted_limit),
        decay_rate: diagnostics.as_ref().and_then(|d| d.decay_fit.rate()),
        cross_check,
        warnings,
    })
}
