use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mto::{run_mto, MtoConfig};
use crate::objective::ObjectiveSpec;
use crate::pso::{run_pso, PsoConfig};
use crate::rng::RngStream;

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_position: Vec<f64>,
    pub best_loss: f64,
    /// Best loss of the population after initialization, then after every
    /// sweep. Length is `iterations + 1`.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Pso,
    Mto,
    Mtocl,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 3] = [OptimizerKind::Pso, OptimizerKind::Mto, OptimizerKind::Mtocl];

    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Pso => "pso",
            OptimizerKind::Mto => "mto",
            OptimizerKind::Mtocl => "mtocl",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OptimizerKind::Pso => "PSO",
            OptimizerKind::Mto => "MTO",
            OptimizerKind::Mtocl => "MTOCL",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pso" => Ok(OptimizerKind::Pso),
            "mto" => Ok(OptimizerKind::Mto),
            "mtocl" => Ok(OptimizerKind::Mtocl),
            other => Err(Error::config(format!("unknown optimizer `{other}`"))),
        }
    }
}

/// Hyperparameters for every optimizer plus the shared sweep budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub iterations: usize,
    pub pso: PsoConfig,
    pub mto: MtoConfig,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            iterations: 500,
            pso: PsoConfig::default(),
            mto: MtoConfig::default(),
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        PsoConfig {
            iterations: self.iterations,
            ..self.pso.clone()
        }
        .validate()?;
        self.mto.clone().with_iterations(self.iterations).validate()
    }

    /// Runs the selected optimizer with `self.iterations` sweeps.
    pub fn run(
        &self,
        kind: OptimizerKind,
        spec: &ObjectiveSpec,
        rng: &mut RngStream,
    ) -> Result<OptimizationResult> {
        match kind {
            OptimizerKind::Pso => {
                let cfg = PsoConfig {
                    iterations: self.iterations,
                    ..self.pso.clone()
                };
                run_pso(spec, &cfg, rng)
            }
            OptimizerKind::Mto => run_mto(spec, &self.mto.clone().plain(self.iterations), rng),
            OptimizerKind::Mtocl => {
                run_mto(spec, &self.mto.clone().with_iterations(self.iterations), rng)
            }
        }
    }
}
