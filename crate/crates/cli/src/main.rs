use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spatial_ak::check_all;
use spatial_ak_cli::output::{self, feasibility_rows};
use spatial_ak_cli::presets::Preset;
use spatial_ak_cli::run::{self, Output, Overrides, RunRequest, Solver};
use spatial_ak_cli::scenario_file;
use spatial_ak_cli::sweep::{self, Param, SweepRequest};
use spatial_ak_cli::CliError;

#[derive(Debug, Parser)]
#[command(name = "spatial-ak", version, about = "Spatial AK growth on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate, check feasibility, solve and write CSV results.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Add y = A·k, tau = -k_xx and s = k_t columns to the field files.
        #[arg(long)]
        derived: bool,
    },
    /// Validate and run the feasibility checks only.
    Check {
        scenario: PathBuf,
        /// Directory for feasibility.csv; verdicts are printed either way.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run a scenario over a grid of parameter values.
    Sweep {
        scenario: PathBuf,
        /// Parameter to vary, as dotted.key=v1,v2,...; repeat for a product grid.
        #[arg(long = "param", required = true)]
        params: Vec<Param>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write a preset scenario file.
    Gen {
        #[arg(value_enum)]
        preset: Preset,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "spectral")]
    solver: Solver,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Files to write (default: field, detrended, diagnostics, feasibility).
    #[arg(long, value_enum, value_delimiter = ',')]
    outputs: Vec<Output>,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Debug, Args)]
struct OverrideArgs {
    /// Number of Fourier modes kept by the spectral solver.
    #[arg(long)]
    modes: Option<usize>,
    /// Finite-difference time step.
    #[arg(long)]
    fd_dt: Option<f64>,
    /// Finite-difference grid spacing.
    #[arg(long)]
    fd_dx: Option<f64>,
    /// Replace the horizon; the step count is kept.
    #[arg(long)]
    horizon: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            modes: a.modes,
            fd_dt: a.fd_dt,
            fd_dx: a.fd_dx,
            horizon: a.horizon,
        }
    }
}

fn outputs_or_default(o: Vec<Output>) -> Vec<Output> {
    if o.is_empty() {
        Output::DEFAULT.to_vec()
    } else {
        o
    }
}

fn print_verdicts(report: &spatial_ak::FeasibilityReport) {
    for (check, verdict, margin) in feasibility_rows(report) {
        println!("{check:<30} {verdict:<13} {margin}");
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            scenario,
            solve,
            derived,
        } => {
            let req = RunRequest {
                scenario_path: scenario,
                solver: solve.solver,
                outputs: outputs_or_default(solve.outputs),
                output_dir: solve.out,
                derived,
                overrides: solve.overrides.into(),
            };
            let summary = run::run(&req)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            print_verdicts(&summary.feasibility);
            println!("min k: {}", summary.min_capital);
            if let Some(l) = summary.predicted_limit {
                println!("predicted detrended limit: {l}");
            }
            if let Some(r) = summary.decay_rate {
                println!("inequality decay rate: {r}");
            }
            if let Some(d) = summary.cross_check {
                println!("spectral vs fd sup difference: {d}");
            }
            println!("results in {}", req.output_dir.display());
        }
        Command::Check {
            scenario,
            out,
            overrides,
        } => {
            let (file, _) = scenario_file::load(&scenario)?;
            let base = scenario.parent().unwrap_or(Path::new("."));
            let s = Overrides::from(overrides).build(&file, base)?;
            run::validate(&s)?;
            let report = check_all(&s)?;
            print_verdicts(&report);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                output::write_feasibility(&dir.join("feasibility.csv"), &report)?;
            }
        }
        Command::Sweep {
            scenario,
            params,
            solve,
        } => {
            let req = SweepRequest {
                scenario_path: scenario,
                params,
                solver: solve.solver,
                outputs: outputs_or_default(solve.outputs),
                output_dir: solve.out,
                overrides: solve.overrides.into(),
            };
            let failed = sweep::sweep(&req)?;
            if failed > 0 {
                eprintln!("warning: {failed} run(s) failed; see summary.csv");
            }
            println!("summary in {}", req.output_dir.join("summary.csv").display());
        }
        Command::Gen { preset, out } => {
            let text = preset.file().to_toml();
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
