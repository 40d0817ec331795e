//! Batch runs over a grid of scenario-file parameters.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use toml::Value;

use crate::error::CliError;
use crate::output::{self, num};
use crate::run::{run_scenario, Output, Overrides, Solver};
use crate::scenario_file::ScenarioFile;

/// `dotted.key=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub key: String,
    pub values: Vec<Value>,
}

impl std::str::FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, list) = s
            .split_once('=')
            .ok_or_else(|| format!("expected dotted.key=v1,v2,... but got `{s}`"))?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(format!("bad parameter key `{key}`"));
        }
        let values: Vec<Value> = list.split(',').map(|v| parse_value(v.trim())).collect();
        if values.iter().any(|v| matches!(v, Value::String(s) if s.is_empty())) {
            return Err(format!("empty value in `{s}`"));
        }
        Ok(Param {
            key: key.to_string(),
            values,
        })
    }
}

fn parse_value(v: &str) -> Value {
    if let Ok(i) = v.parse::<i64>() {
        Value::Integer(i)
    } else if let Ok(f) = v.parse::<f64>() {
        Value::Float(f)
    } else if let Ok(b) = v.parse::<bool>() {
        Value::Boolean(b)
    } else {
        Value::String(v.to_string())
    }
}

/// Sets `key` inside `root`, creating intermediate tables.
pub fn set_dotted(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts = key.split('.').peekable();
    let mut node = root;
    while let Some(part) = parts.next() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("`{key}`: `{part}` is not inside a table")))?;
        if parts.peek().is_none() {
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Default::default()));
    }
    unreachable!("keys have at least one part")
}

/// Cartesian product of the parameter values, last parameter fastest.
pub fn combinations(params: &[Param]) -> Vec<Vec<Value>> {
    params.iter().fold(vec![vec![]], |acc, p| {
        acc.into_iter()
            .flat_map(|prefix| {
                p.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect()
    })
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub scenario_path: PathBuf,
    pub params: Vec<Param>,
    pub solver: Solver,
    pub outputs: Vec<Output>,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
}

#[derive(Debug, Clone)]
struct RunRecord {
    exit_code: i32,
    min_capital: Option<f64>,
    predicted_limit: Option<f64>,
    margin: Option<f64>,
    message: String,
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Float(f) => num(*f),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn one_run(
    template: &Value,
    req: &SweepRequest,
    base: &Path,
    combo: &[Value],
    dir: &Path,
) -> Result<RunRecord, CliError> {
    let mut doc = template.clone();
    for (p, v) in req.params.iter().zip(combo) {
        set_dotted(&mut doc, &p.key, v.clone())?;
    }
    let file = ScenarioFile::from_value(doc)?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let toml_path = dir.join("scenario.toml");
    fs::write(&toml_path, file.to_toml()).map_err(|e| CliError::io(&toml_path, e))?;
    let s = req.overrides.build(&file, base)?;
    let summary = run_scenario(&s, req.solver, &req.outputs, dir, false)?;
    Ok(RunRecord {
        exit_code: 0,
        min_capital: Some(summary.min_capital),
        predicted_limit: summary.predicted_limit,
        margin: Some(summary.feasibility.theorem2.margin),
        message: summary.warnings.join("; "),
    })
}

/// Runs every combination in parallel into `run-NNN` directories and writes
/// `summary.csv`. Returns the number of failed runs.
pub fn sweep(req: &SweepRequest) -> Result<usize, CliError> {
    let text = fs::read_to_string(&req.scenario_path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", req.scenario_path.display())))?;
    let template: Value = toml::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", req.scenario_path.display())))?;
    let base = req.scenario_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let combos = combinations(&req.params);
    fs::create_dir_all(&req.output_dir).map_err(|e| CliError::io(&req.output_dir, e))?;

    let records: Vec<RunRecord> = combos
        .par_iter()
        .enumerate()
        .map(|(i, combo)| {
            let dir = req.output_dir.join(format!("run-{i:03}"));
            one_run(&template, req, &base, combo, &dir).unwrap_or_else(|e| RunRecord {
                exit_code: e.exit_code(),
                min_capital: None,
                predicted_limit: None,
                margin: None,
                message: e.to_string(),
            })
        })
        .collect();

    let path = req.output_dir.join("summary.csv");
    let mut header = vec!["run".to_string()];
    header.extend(req.params.iter().map(|p| p.key.clone()));
    header.extend(
        ["exit_code", "min_k", "predicted_limit", "max_consumption_margin", "message"]
            .map(String::from),
    );
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = output::create(&path, &header)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for (i, (combo, r)) in combos.iter().zip(&records).enumerate() {
        let mut rec = vec![format!("run-{i:03}")];
        rec.extend(combo.iter().map(value_text));
        rec.extend([
            r.exit_code.to_string(),
            opt(r.min_capital),
            opt(r.predicted_limit),
            opt(r.margin),
            r.message.replace('\n', " "),
        ]);
        w.write_record(&rec).map_err(|e| output::csv_error(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(records.iter().filter(|r| r.exit_code != 0).count())
}
