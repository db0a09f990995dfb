//! Benchmark forward models: an additive Gaussian toy problem, a clamped
//! plate and a quarter-car suspension.

pub mod plate;
pub mod quarter_car;

use serde::{Deserialize, Serialize};

use crate::distributions::{InputVariable, InputVector};
use crate::error::{Error, Result};

pub use plate::{plate_solve, PlateConfig, PlateModel, PlateQoi};
pub use quarter_car::{quarter_car_solve, Integrator, QuarterCarConfig, RoadProfile};

/// Scalar response of a model to one input realization.
pub trait ForwardModel: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

/// `20 + x1 + x2 + x3`.
pub fn gaussian_sum(x: &[f64; 3]) -> f64 {
    20.0 + x[0] + x[1] + x[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    GaussianSum,
    PlateFe,
    QuarterCar,
}

impl ModelName {
    pub fn input_dim(self) -> usize {
        3
    }

    /// Default input distributions.
    pub fn default_inputs(self) -> InputVector {
        let vars = match self {
            Self::GaussianSum => vec![InputVariable::normal(10.0, 2.0).unwrap(); 3],
            Self::PlateFe => [(2.1e11, 0.15), (5e-3, 0.1), (0.3, 0.1)]
                .iter()
                .map(|&(m, v)| InputVariable::truncated_normal_cov(m, v).unwrap())
                .collect(),
            Self::QuarterCar => [1e4, 4.8e4, 2e5]
                .iter()
                .map(|&m| InputVariable::truncated_normal_cov(m, 0.1).unwrap())
                .collect(),
        };
        InputVector::new(vars).unwrap()
    }
}

impl std::fmt::Display for ModelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GaussianSum => "gaussian-sum",
            Self::PlateFe => "plate-fe",
            Self::QuarterCar => "quarter-car",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelName,
    pub inputs: InputVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate: Option<PlateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarter_car: Option<QuarterCarConfig>,
}

impl ModelSpec {
    /// Spec with the default inputs and model configuration.
    pub fn default_for(name: ModelName) -> Self {
        let mut spec = Self { name, inputs: name.default_inputs(), plate: None, quarter_car: None };
        match name {
            ModelName::PlateFe => spec.plate = Some(PlateConfig::default()),
            ModelName::QuarterCar => spec.quarter_car = Some(QuarterCarConfig::default()),
            ModelName::GaussianSum => {}
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.name.input_dim();
        if self.inputs.len() != want {
            return Err(Error::Dimension { expected: want, got: self.inputs.len() });
        }
        if self.plate.is_some() && self.name != ModelName::PlateFe {
            return Err(Error::domain(format!("`plate` settings given for model {}", self.name)));
        }
        if self.quarter_car.is_some() && self.name != ModelName::QuarterCar {
            return Err(Error::domain(format!("`quarter_car` settings given for model {}", self.name)));
        }
        if let Some(q) = &self.quarter_car {
            q.validate()?;
        }
        Ok(())
    }

    /// Validates and builds the evaluator, meshing the plate or auto-scaling
    /// the road bump as configured.
    pub fn build(&self) -> Result<Model> {
        self.validate()?;
        Ok(match self.name {
            ModelName::GaussianSum => Model::GaussianSum,
            ModelName::PlateFe => Model::Plate(PlateModel::new(self.plate.unwrap_or_default())?),
            ModelName::QuarterCar => {
                let cfg = self.quarter_car.unwrap_or_default();
                let cfg = match cfg.target_stroke_ratio {
                    Some(ratio) => {
                        let m: Vec<f64> = self.inputs.variables().iter().map(InputVariable::mean).collect();
                        cfg.auto_scaled(m[0], m[1], m[2], ratio)?
                    }
                    None => cfg,
                };
                Model::QuarterCar(cfg)
            }
        })
    }
}

/// A ready-to-evaluate benchmark model.
#[derive(Debug, Clone)]
pub enum Model {
    GaussianSum,
    Plate(PlateModel),
    QuarterCar(QuarterCarConfig),
}

impl ForwardModel for Model {
    fn dim(&self) -> usize {
        3
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let [a, b, c]: [f64; 3] =
            x.try_into().map_err(|_| Error::Dimension { expected: 3, got: x.len() })?;
        match self {
            Self::GaussianSum => Ok(gaussian_sum(&[a, b, c])),
            Self::Plate(m) => m.solve(a, b, c),
            Self::QuarterCar(cfg) => quarter_car_solve(a, b, c, cfg),
        }
    }
}

/// Wraps a closure as a model.
pub struct FnModel<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnModel<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> ForwardModel for FnModel<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        Ok((self.f)(x))
    }
}
