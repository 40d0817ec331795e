//! CSV writers. Numbers use the shortest representation that parses back
//! to the same `f64`.

use std::fs::File;
use std::path::Path;

use spatial_ak::{
    trade_balance, ConvergenceDiagnostics, FeasibilityReport, Scenario, SpaceTimeField,
};

use crate::error::CliError;

pub type Writer = csv::Writer<File>;

pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn create(path: &Path, header: &[&str]) -> Result<Writer, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    Ok(w)
}

pub fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn finish(mut w: Writer, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `t, x, k` and optionally `y = A·k`, `tau = −k_xx`, `s = k_t`.
pub fn write_field(
    path: &Path,
    field: &SpaceTimeField,
    s: &Scenario,
    derived: bool,
) -> Result<(), CliError> {
    let header: &[&str] = if derived {
        &["t", "x", "k", "y", "tau", "s"]
    } else {
        &["t", "x", "k"]
    };
    let mut w = create(path, header)?;
    let n = field.grid_size();
    for (j, (t, row)) in field.times.iter().zip(&field.values).enumerate() {
        let extra = if derived {
            let tau = trade_balance(field, j)?;
            let c = s.consumption.sample(n, *t);
            Some((s.technology.rate(*t), tau, c))
        } else {
            None
        };
        for (i, k) in row.iter().enumerate() {
            let x = spatial_ak::grid_point(i, n);
            let mut rec = vec![num(*t), num(x), num(*k)];
            if let Some((a, tau, c)) = &extra {
                let y = a * k;
                let tau = tau.samples()[i];
                rec.extend([num(y), num(tau), num(y - tau - c[i])]);
            }
            w.write_record(&rec).map_err(|e| csv_error(path, e))?;
        }
    }
    finish(w, path)
}

/// `t, x, h` for the detrended field.
pub fn write_detrended(path: &Path, h: &SpaceTimeField) -> Result<(), CliError> {
    let mut w = create(path, &["t", "x", "h"])?;
    let n = h.grid_size();
    for (t, row) in h.times.iter().zip(&h.values) {
        for (i, v) in row.iter().enumerate() {
            w.write_record([num(*t), num(spatial_ak::grid_point(i, n)), num(*v)])
                .map_err(|e| csv_error(path, e))?;
        }
    }
    finish(w, path)
}

pub fn write_trade_balance(path: &Path, field: &SpaceTimeField) -> Result<(), CliError> {
    let mut w = create(path, &["t", "x", "tau"])?;
    let n = field.grid_size();
    for (j, t) in field.times.iter().enumerate() {
        let tau = trade_balance(field, j)?;
        for (i, v) in tau.samples().iter().enumerate() {
            w.write_record([num(*t), num(spatial_ak::grid_point(i, n)), num(*v)])
                .map_err(|e| csv_error(path, e))?;
        }
    }
    finish(w, path)
}

/// Rows of `(check, verdict, margin)`.
pub fn feasibility_rows(r: &FeasibilityReport) -> Vec<(&'static str, String, f64)> {
    vec![
        ("spatially_constant_bound", r.theorem1.verdict.to_string(), r.theorem1.margin),
        ("max_consumption_bound", r.theorem2.verdict.to_string(), r.theorem2.margin),
        // decay rate of the discounted peak consumption; positive when it vanishes
        ("discounted_consumption_decay", r.footnote.verdict.to_string(), -r.footnote.log_slope),
    ]
}

pub fn write_feasibility(path: &Path, r: &FeasibilityReport) -> Result<(), CliError> {
    let mut w = create(path, &["check", "verdict", "margin"])?;
    for (check, verdict, margin) in feasibility_rows(r) {
        w.write_record([check.to_string(), verdict, num(margin)])
            .map_err(|e| csv_error(path, e))?;
    }
    finish(w, path)
}

/// Per-time diagnostics. Without a limit the deviation and limit cells are
/// empty. `cross_check` adds a final row holding the sup-norm disagreement
/// between the two solvers.
pub fn write_diagnostics(
    path: &Path,
    times: &[f64],
    inequality: &[f64],
    limit: Option<&ConvergenceDiagnostics>,
    cross_check: Option<f64>,
) -> Result<(), CliError> {
    let mut w = create(path, &["t", "sup_deviation", "spatial_inequality", "predicted_limit"])?;
    for (j, t) in times.iter().enumerate() {
        let (dev, lim) = match limit {
            Some(d) => (num(d.sup_deviation[j]), num(d.predicted_limit)),
            None => (String::new(), String::new()),
        };
        w.write_record([num(*t), dev, num(inequality[j]), lim])
            .map_err(|e| csv_error(path, e))?;
    }
    if let Some(d) = cross_check {
        w.write_record(["cross_check".to_string(), num(d), String::new(), String::new()])
            .map_err(|e| csv_error(path, e))?;
    }
    finish(w, path)
}
