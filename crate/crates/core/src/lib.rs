//! Population-based optimizers (PSO, MTO, MTOCL) used as trainers for a small
//! feed-forward classifier, plus the data pipeline and experiment harness
//! that run them over the Wisconsin breast-cancer datasets.
//!
//! ```
//! use swarmnet::{benchmarks, OptimizerKind, OptimizerSettings, ObjectiveSpec, Bounds, RngStream};
//!
//! let spec = ObjectiveSpec::new(Bounds::uniform(3, -5.0, 5.0).unwrap(), benchmarks::sphere);
//! let settings = OptimizerSettings { iterations: 100, ..Default::default() };
//! let result = settings.run(OptimizerKind::Pso, &spec, &mut RngStream::new(7)).unwrap();
//! assert!(result.best_loss < 1e-3);
//! assert_eq!(result.trace.len(), 101);
//! ```

pub mod benchmarks;
pub mod data;
pub mod error;
pub mod experiment;
pub mod mto;
pub mod nn;
pub mod objective;
pub mod optimizer;
pub mod population;
pub mod pso;
pub mod rng;

pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, RunReport, Scenario};
pub use nn::NetworkTopology;
pub use objective::{Bounds, ObjectiveSpec};
pub use optimizer::{OptimizationResult, OptimizerKind, OptimizerSettings};
pub use population::{Candidate, Population};
pub use rng::{RngStream, UniformSource};
