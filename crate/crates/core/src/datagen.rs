//! Synthetic benchmarks: spherical Gaussian mixtures with noisy pairwise expert
//! annotations.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{AnnotationGraphs, Dataset, LinkKind};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Smallest variance recorded in a [`GroundTruth`].
pub const MIN_TRUE_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_clusters: usize,
    pub mean_range: (f64, f64),
    pub variance_range: (f64, f64),
    pub seed: u64,
}

impl MixtureSpec {
    /// Means uniform in `[-1, 1]`, variances uniform in `[0, 5]`.
    pub fn new(n_samples: usize, n_features: usize, n_clusters: usize, seed: u64) -> Self {
        Self {
            n_samples,
            n_features,
            n_clusters,
            mean_range: (-1.0, 1.0),
            variance_range: (0.0, 5.0),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_clusters == 0 || self.n_features == 0 {
            return bad("mixture needs at least one cluster and one feature".into());
        }
        if self.n_samples < self.n_clusters {
            return bad(format!(
                "{} samples cannot fill {} clusters",
                self.n_samples, self.n_clusters
            ));
        }
        let (lo, hi) = self.mean_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("invalid mean range [{lo}, {hi}]"));
        }
        let (lo, hi) = self.variance_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return bad(format!("invalid variance range [{lo}, {hi}]"));
        }
        Ok(())
    }
}

/// Generating labels and component parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub labels: Vec<usize>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub n_features: usize,
}

impl GroundTruth {
    pub fn n_clusters(&self) -> usize {
        self.variances.len()
    }
}

pub fn generate_mixture(spec: &MixtureSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = stream(spec.seed, 0);
    let (k, d, n) = (spec.n_clusters, spec.n_features, spec.n_samples);
    let (mlo, mhi) = spec.mean_range;
    let (vlo, vhi) = spec.variance_range;

    let means: Vec<f64> = (0..k * d).map(|_| rng.gen_range(mlo..=mhi)).collect();
    let variances: Vec<f64> = (0..k).map(|_| rng.gen_range(vlo..=vhi)).collect();

    let mut labels = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        let r = rng.gen_range(0..k);
        let sd = variances[r].sqrt();
        labels.push(r);
        for f in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            values.push(means[r * d + f] + sd * z);
        }
    }
    let dataset = Dataset::new(n, d, values)?;
    let truth = GroundTruth {
        labels,
        means,
        variances: variances.into_iter().map(|v| v.max(MIN_TRUE_VARIANCE)).collect(),
        n_features: d,
    };
    Ok((dataset, truth))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertSpec {
    pub accuracy: f64,
    pub n_annotations: usize,
    pub seed: u64,
}

/// Annotations from an expert of scalar accuracy `p`: a pair within one
/// cluster is marked must-link with probability `p`, a pair across clusters
/// with probability `1 − p`.
pub fn generate_annotations(truth: &GroundTruth, spec: &ExpertSpec) -> Result<AnnotationGraphs> {
    let p = spec.accuracy;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "expert accuracy must lie in [0, 1], got {p}"
        )));
    }
    let k = truth.n_clusters();
    let must_probability: Vec<f64> = (0..k * k)
        .map(|idx| if idx / k == idx % k { p } else { 1.0 - p })
        .collect();
    generate_annotations_with(truth, &must_probability, spec.n_annotations, spec.seed)
}

/// Annotations with a general K×K must-link probability matrix.
///
/// Pairs are drawn uniformly with replacement among unordered pairs of distinct
/// samples; repeated draws accumulate edge multiplicity.
pub fn generate_annotations_with(
    truth: &GroundTruth,
    must_probability: &[f64],
    n_annotations: usize,
    seed: u64,
) -> Result<AnnotationGraphs> {
    let k = truth.n_clusters();
    let n = truth.labels.len();
    if must_probability.len() != k * k || must_probability.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidInput(format!(
            "must-link probabilities must be a {k}x{k} matrix of values in [0, 1]"
        )));
    }
    if n_annotations > 0 && n < 2 {
        return Err(Error::InvalidInput("annotations need at least two samples".into()));
    }
    let mut rng = stream(seed, 0);
    let mut annotations = Vec::with_capacity(n_annotations);
    for _ in 0..n_annotations {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let p = must_probability[truth.labels[i] * k + truth.labels[j]];
        let kind = if rng.gen_bool(p) {
            LinkKind::MustLink
        } else {
            LinkKind::CannotLink
        };
        annotations.push((i, j, kind));
    }
    AnnotationGraphs::from_annotations(n, annotations)
}
