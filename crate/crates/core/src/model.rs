//! Model parameters: spherical Gaussians, block rates and expert-accuracy priors.

use crate::data::LinkKind;
use crate::error::{Error, Result};

/// Distance of a clamped accuracy from 0 and 1.
pub const ACCURACY_CLAMP: f64 = 1e-6;

/// Largest prior rate; used when a graph has no annotations or `p` sits at a clamp.
pub const MAX_PRIOR_RATE: f64 = 1e12;

/// Means (K×D, row-major) and per-cluster variances of a spherical mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub n_features: usize,
}

impl GaussianParams {
    pub fn new(means: Vec<f64>, variances: Vec<f64>, n_features: usize) -> Result<Self> {
        if n_features == 0 || means.len() != variances.len() * n_features {
            return Err(Error::ContractViolation(format!(
                "{} mean values do not match {} variances in dimension {n_features}",
                means.len(),
                variances.len()
            )));
        }
        Ok(Self {
            means,
            variances,
            n_features,
        })
    }

    pub fn n_clusters(&self) -> usize {
        self.variances.len()
    }

    pub fn mean(&self, r: usize) -> &[f64] {
        &self.means[r * self.n_features..(r + 1) * self.n_features]
    }
}

/// Expected-edge-count matrices Ω⁺ and Ω⁻, K×K row-major and symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRates {
    pub n_clusters: usize,
    pub omega_plus: Vec<f64>,
    pub omega_minus: Vec<f64>,
}

impl BlockRates {
    pub fn zeros(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            omega_plus: vec![0.0; n_clusters * n_clusters],
            omega_minus: vec![0.0; n_clusters * n_clusters],
        }
    }

    pub fn get(&self, kind: LinkKind, r: usize, s: usize) -> f64 {
        self.matrix(kind)[r * self.n_clusters + s]
    }

    pub fn matrix(&self, kind: LinkKind) -> &[f64] {
        match kind {
            LinkKind::MustLink => &self.omega_plus,
            LinkKind::CannotLink => &self.omega_minus,
        }
    }
}

/// Whether the objective includes exponential priors derived from an expert accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    pub enabled: bool,
    pub expert_accuracy: f64,
}

impl PriorConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            expert_accuracy: 0.5,
        }
    }

    /// Enables priors; `p` is clamped into `[1e-6, 1 - 1e-6]`.
    pub fn with_accuracy(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "expert accuracy must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self {
            enabled: true,
            expert_accuracy: p.clamp(ACCURACY_CLAMP, 1.0 - ACCURACY_CLAMP),
        })
    }
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self::disabled()
    }
}

/// Prior expected number of edges between two samples of the same group (`in`)
/// or of different groups (`out`), per graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedEdgeCounts {
    pub plus_in: f64,
    pub plus_out: f64,
    pub minus_in: f64,
    pub minus_out: f64,
}

/// Rates of the exponential priors on ω; the reciprocal of [`ExpectedEdgeCounts`],
/// capped at [`MAX_PRIOR_RATE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorRates {
    pub lambda_plus_diag: f64,
    pub lambda_plus_offdiag: f64,
    pub lambda_minus_diag: f64,
    pub lambda_minus_offdiag: f64,
}

impl PriorRates {
    pub fn from_expected(f: &ExpectedEdgeCounts) -> Self {
        let rate = |f: f64| {
            if f > 0.0 {
                (1.0 / f).min(MAX_PRIOR_RATE)
            } else {
                MAX_PRIOR_RATE
            }
        };
        Self {
            lambda_plus_diag: rate(f.plus_in),
            lambda_plus_offdiag: rate(f.plus_out),
            lambda_minus_diag: rate(f.minus_in),
            lambda_minus_offdiag: rate(f.minus_out),
        }
    }

    pub fn get(&self, kind: LinkKind, diagonal: bool) -> f64 {
        match (kind, diagonal) {
            (LinkKind::MustLink, true) => self.lambda_plus_diag,
            (LinkKind::MustLink, false) => self.lambda_plus_offdiag,
            (LinkKind::CannotLink, true) => self.lambda_minus_diag,
            (LinkKind::CannotLink, false) => self.lambda_minus_offdiag,
        }
    }
}
