//! JSON config files for the `fit` and `study` commands.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::distributions::InputVector;
use crate::error::{Error, Result};
use crate::experiments::{BasisConfig, ExperimentConfig, TolerancePolicy, SCHEMA_VERSION};
use crate::fracmoments::{HolderOptions, DEFAULT_ORDERS};
use crate::meigd::FitConfig;

/// Parses JSON, reporting the offending field path on failure.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Config { path, message: e.into_inner().to_string() }
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json_str(&text)
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = load_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Where the fit targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSource {
    /// Hölder estimates from a PCE fitted to the data.
    PceHolder,
    /// Sample averages of the response column.
    Samples,
}

/// Settings for fitting a distribution to one data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitCommandConfig {
    pub schema_version: u32,
    pub inputs: InputVector,
    pub basis: BasisConfig,
    #[serde(default = "default_orders")]
    pub orders: Vec<f64>,
    #[serde(default = "default_source")]
    pub source: TargetSource,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
    #[serde(default)]
    pub holder: HolderOptions,
}

fn default_orders() -> Vec<f64> {
    DEFAULT_ORDERS.to_vec()
}

fn default_source() -> TargetSource {
    TargetSource::PceHolder
}

impl FitCommandConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| Err(Error::Config { path: path.into(), message });
        if self.schema_version != SCHEMA_VERSION {
            return bad("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        if self.basis.p == 0 || !(self.basis.q > 0.0 && self.basis.q <= 1.0) {
            return bad("basis", format!("need p >= 1 and 0 < q <= 1, got {:?}", self.basis));
        }
        if self.orders.is_empty() || self.orders.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("orders", "orders must be non-empty and strictly increasing".into());
        }
        if let Err(e) = self.fit.bounds.validate() {
            return bad("fit.bounds", e.to_string());
        }
        Ok(())
    }
}

pub fn load_fit_config(path: &Path) -> Result<FitCommandConfig> {
    let cfg: FitCommandConfig = load_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Rows of `x_1..x_M, y` from a headed CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

/// Reads a headed CSV whose last column is the response. Errors name the
/// 1-based data row and column.
pub fn read_samples_csv(path: &Path, n_inputs: usize) -> Result<SampleTable> {
    let bad = |row: usize, col: usize, message: String| Error::Config {
        path: format!("{}:row {row}, column {col}", path.display()),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let width = n_inputs + 1;
    let headers = reader.headers().map_err(|e| bad(0, 0, e.to_string()))?.clone();
    if headers.len() != width {
        return Err(bad(0, headers.len(), format!("expected {width} columns (inputs then response), found {}", headers.len())));
    }
    let mut table = SampleTable { x: Vec::new(), y: Vec::new() };
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| bad(row, 0, e.to_string()))?;
        if rec.len() != width {
            return Err(bad(row, rec.len(), format!("expected {width} cells, found {}", rec.len())));
        }
        let mut vals = Vec::with_capacity(width);
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| bad(row, j + 1, format!("`{cell}` in column `{}` is not a number", &headers[j])))?;
            if !v.is_finite() {
                return Err(bad(row, j + 1, format!("non-finite value `{cell}`")));
            }
            vals.push(v);
        }
        table.y.push(vals.pop().unwrap());
        table.x.push(vals);
    }
    if table.y.is_empty() {
        return Err(bad(0, 0, "no data rows".into()));
    }
    Ok(table)
}
