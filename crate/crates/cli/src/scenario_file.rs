//! TOML scenario files.
//!
//! ```toml
//! [technology]
//! kind = "constant"
//! rate = 0.05
//!
//! [consumption]
//! kind = "separable"
//! spatial = { kind = "fourier", mean = 0.02, cos = [0.01] }
//! temporal = { kind = "constant", value = 1.0 }
//!
//! [initial_capital]
//! kind = "constant"
//! value = 2.0
//!
//! [grid]
//! points = 256
//! horizon = 20.0
//! steps = 100
//! ```
//!
//! Sampled data is given inline (`times`/`values`) or through `csv`, a path
//! relative to the scenario file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use spatial_ak::{
    uniform_mesh, ConsumptionField, Scenario, SpatialProfile, SpatialShape, TechnologyPath,
    TimeProfile, Tolerances,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub technology: TechnologySpec,
    pub consumption: ConsumptionSpec,
    pub initial_capital: ProfileSpec,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TechnologySpec {
    Constant {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower_bound: Option<f64>,
    },
    Sinusoidal {
        base: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower_bound: Option<f64>,
    },
    /// Inline `times`/`values` or a two-column CSV (`t`, value).
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower_bound: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeSpec {
    Constant { value: f64 },
    Exponential { scale: f64, rate: f64 },
    Sinusoidal { base: f64, amplitude: f64, frequency: f64 },
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
    },
}

/// Spatial profile as a constant, a cosine/sine series or grid samples
/// (inline `values` or a one-column CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: f64,
    },
    Fourier {
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConsumptionSpec {
    Separable {
        spatial: ProfileSpec,
        temporal: TimeSpec,
    },
    /// Rows of grid samples. The CSV form has a `t` column followed by one
    /// column per grid point.
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_value(value: toml::Value) -> Result<Self, CliError> {
        value.try_into().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }

    /// Builds the scenario; relative CSV paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Scenario, CliError> {
        let n = self.grid.points;
        let technology = self.technology.build(base)?;
        let consumption = self.consumption.build(base, n)?;
        let k0 = self.initial_capital.profile(base, n, "initial_capital")?;
        let mut s = Scenario::new(technology, consumption, k0, self.grid.horizon);
        s.time_mesh = match (&self.grid.times, self.grid.steps) {
            (Some(_), Some(_)) => {
                return Err(CliError::Parse("grid: give either `steps` or `times`, not both".into()))
            }
            (Some(times), None) => times.clone(),
            (None, Some(steps)) => uniform_mesh(self.grid.horizon, steps),
            (None, None) => s.time_mesh,
        };
        if let Some(m) = self.grid.modes {
            s.mode_cutoff = m;
        }
        if let Some(t) = &self.tolerances {
            let d = Tolerances::default();
            s.tolerances = Tolerances {
                series_tail: t.series_tail.unwrap_or(d.series_tail),
                quadrature: t.quadrature.unwrap_or(d.quadrature),
                fd_dt: t.fd_dt.unwrap_or(d.fd_dt),
                fd_dx: t.fd_dx.unwrap_or(d.fd_dx),
                margin: t.margin.unwrap_or(d.margin),
            };
        }
        Ok(s)
    }
}

/// Reads a scenario file and builds it.
pub fn load(path: &Path) -> Result<(ScenarioFile, Scenario), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file = ScenarioFile::from_toml(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let scenario = file.build(path.parent().unwrap_or(Path::new(".")))?;
    Ok((file, scenario))
}

impl TechnologySpec {
    fn build(&self, base: &Path) -> Result<TechnologyPath, CliError> {
        let (path, lower) = match self {
            TechnologySpec::Constant { rate, lower_bound } => {
                (TechnologyPath::constant(*rate), lower_bound)
            }
            TechnologySpec::Sinusoidal {
                base: b,
                amplitude,
                frequency,
                lower_bound,
            } => (TechnologyPath::sinusoidal(*b, *amplitude, *frequency), lower_bound),
            TechnologySpec::Sampled {
                times,
                values,
                csv,
                lower_bound,
            } => {
                let (t, v) = series(times, values, csv, base, "technology")?;
                (TechnologyPath::sampled(t, v), lower_bound)
            }
        };
        Ok(match lower {
            Some(a) => path.with_lower_bound(*a),
            None => path,
        })
    }
}

impl TimeSpec {
    fn build(&self, base: &Path) -> Result<TimeProfile, CliError> {
        Ok(match self {
            TimeSpec::Constant { value } => TimeProfile::Constant(*value),
            TimeSpec::Exponential { scale, rate } => TimeProfile::Exponential {
                scale: *scale,
                rate: *rate,
            },
            TimeSpec::Sinusoidal {
                base: b,
                amplitude,
                frequency,
            } => TimeProfile::Sinusoidal {
                base: *b,
                amplitude: *amplitude,
                frequency: *frequency,
            },
            TimeSpec::Sampled { times, values, csv } => {
                let (times, values) = series(times, values, csv, base, "consumption.temporal")?;
                TimeProfile::Sampled { times, values }
            }
        })
    }
}

impl ProfileSpec {
    fn shape(&self, base: &Path, n: usize, what: &str) -> Result<SpatialShape, CliError> {
        Ok(match self {
            ProfileSpec::Constant { value } => SpatialShape::Constant(*value),
            ProfileSpec::Fourier { mean, cos, sin } => SpatialShape::Fourier {
                mean: *mean,
                cos: cos.clone(),
                sin: sin.clone(),
            },
            ProfileSpec::Samples { .. } => SpatialShape::Samples(self.profile(base, n, what)?),
        })
    }

    fn profile(&self, base: &Path, n: usize, what: &str) -> Result<SpatialProfile, CliError> {
        let samples = match self {
            ProfileSpec::Samples { values, csv } => match (values, csv) {
                (Some(v), None) => v.clone(),
                (None, Some(p)) => read_columns(&base.join(p), 1)?.remove(0),
                _ => {
                    return Err(CliError::Parse(format!(
                        "{what}: samples need exactly one of `values` or `csv`"
                    )))
                }
            },
            other => other.shape(base, n, what)?.sample(n),
        };
        if samples.len() != n {
            return Err(CliError::Parse(format!(
                "{what}: {} samples for a {n}-point grid",
                samples.len()
            )));
        }
        SpatialProfile::new(samples).map_err(|e| CliError::Parse(format!("{what}: {e}")))
    }
}

impl ConsumptionSpec {
    fn build(&self, base: &Path, n: usize) -> Result<ConsumptionField, CliError> {
        match self {
            ConsumptionSpec::Separable { spatial, temporal } => Ok(ConsumptionField::separable(
                spatial.shape(base, n, "consumption.spatial")?,
                temporal.build(base)?,
            )),
            ConsumptionSpec::Sampled { times, rows, csv } => {
                let (times, rows) = match (times, rows, csv) {
                    (Some(t), Some(r), None) => (t.clone(), r.clone()),
                    (None, None, Some(p)) => {
                        let table = read_rows(&base.join(p))?;
                        let times = table.iter().map(|r| r[0]).collect();
                        let rows = table.into_iter().map(|r| r[1..].to_vec()).collect();
                        (times, rows)
                    }
                    _ => {
                        return Err(CliError::Parse(
                            "consumption: sampled data needs `times` and `rows`, or `csv`".into(),
                        ))
                    }
                };
                let rows = rows
                    .into_iter()
                    .map(SpatialProfile::new)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Parse(format!("consumption: {e}")))?;
                Ok(ConsumptionField::Sampled { times, rows })
            }
        }
    }
}

fn series(
    times: &Option<Vec<f64>>,
    values: &Option<Vec<f64>>,
    csv: &Option<PathBuf>,
    base: &Path,
    what: &str,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    match (times, values, csv) {
        (Some(t), Some(v), None) => Ok((t.clone(), v.clone())),
        (None, None, Some(p)) => {
            let mut cols = read_columns(&base.join(p), 2)?;
            let values = cols.pop().unwrap();
            Ok((cols.pop().unwrap(), values))
        }
        _ => Err(CliError::Parse(format!(
            "{what}: sampled data needs `times` and `values`, or `csv`"
        ))),
    }
}

/// All numeric rows of a CSV file with a header line.
fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Parse(format!("{}: line {}: {e}", path.display(), line + 2)))?;
        out.push(row);
    }
    Ok(out)
}

fn read_columns(path: &Path, count: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = read_rows(path)?;
    let mut cols = vec![Vec::with_capacity(rows.len()); count];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != count {
            return Err(CliError::Parse(format!(
                "{}: line {}: expected {count} columns, found {}",
                path.display(),
                i + 2,
                row.len()
            )));
        }
        for (col, v) in cols.iter_mut().zip(row) {
            col.push(*v);
        }
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BENCHMARK: &str = r#"
[technology]
kind = "constant"
rate = 0.05

[consumption]
kind = "separable"
spatial = { kind = "constant", value = 0.1 }
temporal = { kind = "constant", value = 1.0 }

[initial_capital]
kind = "constant"
value = 2.0

[grid]
points = 16
horizon = 20.0
steps = 40
"#;

    #[test]
    fn parses_benchmark() {
        let f = ScenarioFile::from_toml(BENCHMARK).unwrap();
        let s = f.build(Path::new(".")).unwrap();
        assert_eq!(s.technology.as_constant(), Some(0.05));
        assert_eq!(s.time_mesh.len(), 41);
        assert_eq!(s.mode_cutoff, 7);
        assert!(s.initial_capital.samples().iter().all(|v| *v == 2.0));
        assert!(s.validate().is_empty());
    }

    #[test]
    fn unknown_field_names_line() {
        let text = BENCHMARK.replace("rate = 0.05", "rate = 0.05\nrte = 1.0");
        let err = ScenarioFile::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("rte") && err.contains("line"), "{err}");
    }

    #[test]
    fn steps_and_times_conflict() {
        let text = BENCHMARK.replace("steps = 40", "steps = 40\ntimes = [0.0, 20.0]");
        let f = ScenarioFile::from_toml(&text).unwrap();
        assert!(f.build(Path::new(".")).is_err());
    }

    #[test]
    fn csv_samples_resolve_relative_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("k\n");
        for i in 0..16 {
            body.push_str(&format!("{}\n", 1.0 + i as f64 / 16.0));
        }
        fs::write(dir.path().join("k0.csv"), body).unwrap();
        fs::write(dir.path().join("a.csv"), "t,A\n0,0.1\n10,0.2\n").unwrap();
        let text = BENCHMARK
            .replace("kind = \"constant\"\nvalue = 2.0", "kind = \"samples\"\ncsv = \"k0.csv\"")
            .replace("kind = \"constant\"\nrate = 0.05", "kind = \"sampled\"\ncsv = \"a.csv\"");
        let path = dir.path().join("s.toml");
        fs::write(&path, text).unwrap();
        let (_, s) = load(&path).unwrap();
        assert_eq!(s.initial_capital.samples()[4], 1.25);
        assert!((s.technology.rate(5.0) - 0.15).abs() < 1e-15);
    }
}
