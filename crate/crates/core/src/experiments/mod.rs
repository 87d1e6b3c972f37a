//! Reproducible experiment drivers behind the `inls` command line.
//!
//! Each experiment takes a fully resolved configuration and returns an
//! [`ExperimentOutput`]: the JSON report, named CSV tables and optionally a
//! trajectory for binary dumping. Nothing here touches the filesystem.

mod admissible;
mod lifespan;
mod scatter;
mod solve;
mod strichartz;
mod verify;

use std::collections::BTreeMap;
use std::io::Write;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::field::{ComplexField, Trajectory};
use crate::grid::GridSpec;
use crate::random::{gaussian_random_field, RandomFieldSpec};

pub use admissible::{run_admissible, AdmissibleConfig};
pub use lifespan::{run_lifespan, LifespanExperimentConfig};
pub use scatter::{run_scatter, ScatterConfig};
pub use solve::{run_solve, Method, SolveConfig};
pub use strichartz::{run_strichartz, StrichartzConfig, TripleSpec};
pub use verify::{run_verify, VerifyConfig};

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Option<ProblemParams>,
    pub config: Value,
    pub measurements: BTreeMap<String, f64>,
    pub verdict: BTreeMap<String, bool>,
    pub passed: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    /// Experiment-specific top-level entries.
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

impl ExperimentReport {
    fn new<C: Serialize>(
        experiment: &str,
        params: Option<ProblemParams>,
        config: &C,
        seed: u64,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            params,
            config: serde_json::to_value(config).expect("configs serialize"),
            measurements: BTreeMap::new(),
            verdict: BTreeMap::new(),
            passed: true,
            seed,
            runtime_ms: None,
            details: Map::new(),
        }
    }

    fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.insert(name.into(), value);
    }

    fn judge(&mut self, name: impl Into<String>, ok: bool) {
        self.passed &= ok;
        self.verdict.insert(name.into(), ok);
    }

    fn detail(&mut self, name: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("details serialize");
        self.details.insert(name.to_string(), value);
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.get(name).copied()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub tables: Vec<Table>,
    /// Solver label and trajectory for the binary dump.
    pub trajectory: Option<(String, Trajectory)>,
}

/// Deep-merges `patch` into `base`; objects merge key by key, everything
/// else is replaced.
pub fn merge_json(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Sets a dotted path such as `params.alpha`, creating objects on the way.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidConfig(format!("'{path}' does not name an object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Defaults of `C`, overlaid by an optional config file and then by
/// individual `(path, value)` overrides.
pub fn resolve_config<C>(file: Option<Value>, overrides: &[(String, Value)]) -> Result<C>
where
    C: Default + Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(C::default()).expect("configs serialize");
    if let Some(file) = file {
        if !file.is_object() {
            return Err(Error::InvalidConfig("config file must hold a JSON object".into()));
        }
        merge_json(&mut value, file);
    }
    for (path, v) in overrides {
        set_path(&mut value, path, v.clone())?;
    }
    serde_json::from_value(value).map_err(|e| Error::InvalidConfig(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub half_length: f64,
}

impl GridConfig {
    pub fn new(points: usize, half_length: f64) -> Self {
        Self {
            points,
            half_length,
        }
    }

    pub fn grid(&self, d: u32) -> Result<GridSpec> {
        GridSpec::new(d as usize, self.points, self.half_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    /// `exp(-|x|^2 / (2 width^2))`.
    Gaussian,
    /// Gaussian random field shaped for the `H^s` seminorm of the run.
    Random,
}

/// Initial datum, always rescaled to the given `L^2` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumConfig {
    pub kind: DatumKind,
    pub norm: f64,
    pub width: f64,
}

impl DatumConfig {
    pub fn gaussian(norm: f64, width: f64) -> Self {
        Self {
            kind: DatumKind::Gaussian,
            norm,
            width,
        }
    }

    pub fn build(&self, grid: &GridSpec, s: f64, seed: u64) -> Result<ComplexField> {
        if !(self.norm.is_finite() && self.norm >= 0.0) {
            return Err(Error::InvalidConfig(format!("datum norm {} is invalid", self.norm)));
        }
        let shape = match self.kind {
            DatumKind::Gaussian => {
                if !(self.width.is_finite() && self.width > 0.0) {
                    return Err(Error::InvalidConfig("datum width must be positive".into()));
                }
                ComplexField::gaussian(grid.clone(), 1.0, self.width)
            }
            DatumKind::Random => gaussian_random_field(grid, &RandomFieldSpec::new(s), seed, 0)?,
        };
        Ok(shape.scale_real(self.norm / shape.l2_norm()))
    }
}

fn default_params() -> ProblemParams {
    use crate::exponents::{int, rat};
    ProblemParams::l2(3, int(1), rat(2, 3), 1).expect("valid defaults")
}

fn relative_drift(values: &[f64]) -> f64 {
    let base = values[0];
    if base == 0.0 {
        return 0.0;
    }
    values
        .iter()
        .map(|m| ((m - base) / base).abs())
        .fold(0.0, f64::max)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Binary trajectory dump: one JSON header line with the grid and time mesh,
/// then every snapshot as little-endian `f64` pairs `(re, im)` in row-major
/// order (axis 0 slowest).
pub fn write_trajectory<W: Write>(mut w: W, traj: &Trajectory, label: &str) -> std::io::Result<()> {
    let g = traj.grid();
    let header = serde_json::json!({
        "format": "inls-trajectory",
        "solver": label,
        "dimension": g.dimension(),
        "points_per_axis": g.points_per_axis(),
        "half_length": g.half_length(),
        "spacing": g.spacing(),
        "final_time": traj.final_time(),
        "steps": traj.steps(),
        "snapshots": traj.snapshots().len(),
        "dtype": "f64le",
        "layout": "row-major, interleaved re/im",
    });
    writeln!(w, "{header}")?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for snap in traj.snapshots() {
        buf.clear();
        for z in snap.values() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}
