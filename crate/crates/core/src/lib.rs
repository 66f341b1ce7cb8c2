//! Semi-supervised clustering of feature data with noisy must-link and
//! cannot-link annotations.
//!
//! The model couples a hard-membership spherical Gaussian mixture with two
//! Poisson stochastic block models, one per annotation graph, and is fitted by
//! maximum likelihood (or maximum posterior with priors derived from a known
//! expert accuracy) using a hybrid genetic search.

pub mod data;
pub mod datagen;
pub mod error;
pub mod estimation;
pub mod matching;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod rng;
pub mod solver;

pub use data::{AnnotationGraphs, Assignment, Dataset, Edge, LinkKind};
pub use error::{Error, Result};
pub use model::{BlockRates, ExpectedEdgeCounts, GaussianParams, PriorConfig, PriorRates};
pub use objective::{evaluate_objective, gmm_loglik, sbm_loglik, ClusterStats, Solution};
pub use solver::{run, RunOutcome, SolverConfig};
