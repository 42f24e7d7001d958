//! Standard test functions with a known global minimum of 0 at the origin.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{Bounds, ObjectiveSpec};

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchFunction {
    Sphere,
    Rastrigin,
}

impl BenchFunction {
    pub const ALL: [BenchFunction; 2] = [BenchFunction::Sphere, BenchFunction::Rastrigin];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchFunction::Sphere => "sphere",
            BenchFunction::Rastrigin => "rastrigin",
        }
    }

    /// The usual `[-5.12, 5.12]^dim` search box.
    pub fn objective(self, dim: usize) -> Result<ObjectiveSpec> {
        let bounds = Bounds::uniform(dim, -5.12, 5.12)?;
        Ok(match self {
            BenchFunction::Sphere => ObjectiveSpec::new(bounds, sphere),
            BenchFunction::Rastrigin => ObjectiveSpec::new(bounds, rastrigin),
        })
    }
}

impl fmt::Display for BenchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(BenchFunction::Sphere),
            "rastrigin" => Ok(BenchFunction::Rastrigin),
            other => Err(Error::config(format!("unknown benchmark function `{other}`"))),
        }
    }
}
