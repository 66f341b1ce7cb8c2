//! External evaluation metrics: NMI between partitions, matched KL divergence
//! between spherical mixtures and the centroid index.
//!
//! NMI uses the symmetric normalization `2·I(U;V) / (H(U) + H(V))` with natural
//! logarithms. Mixture KL is evaluated as `KL(fitted ‖ reference)` by the caller
//! passing the fitted mixture first.

use crate::data::squared_distance;
use crate::error::{contract, Result};
use crate::matching::{min_cost_matching, CostMatrix};

/// Co-occurrence counts of two labelings over the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<u64>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn new(labels_a: &[usize], labels_b: &[usize]) -> Result<Self> {
        contract(labels_a.len() == labels_b.len(), || {
            format!("label lengths differ: {} vs {}", labels_a.len(), labels_b.len())
        })?;
        contract(!labels_a.is_empty(), || "labelings must not be empty".into())?;
        let rows = labels_a.iter().max().map_or(0, |m| m + 1);
        let cols = labels_b.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; rows * cols];
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for (&a, &b) in labels_a.iter().zip(labels_b) {
            counts[a * cols + b] += 1;
            row_sums[a] += 1;
            col_sums[b] += 1;
        }
        Ok(Self {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            total: labels_a.len() as u64,
        })
    }

    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.counts[u * self.cols + v]
    }
}

fn entropy(marginal: &[u64], total: f64) -> f64 {
    marginal
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information in `[0, 1]`.
pub fn nmi(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(labels_a, labels_b)?;
    let n = table.total as f64;
    let h_a = entropy(&table.row_sums, n);
    let h_b = entropy(&table.col_sums, n);
    if h_a == 0.0 && h_b == 0.0 {
        // both labelings are constant, hence the same partition
        return Ok(1.0);
    }
    let mut mutual = 0.0;
    for u in 0..table.rows {
        for v in 0..table.cols {
            let c = table.get(u, v);
            if c == 0 {
                continue;
            }
            let joint = c as f64 / n;
            let indep = (table.row_sums[u] as f64 / n) * (table.col_sums[v] as f64 / n);
            mutual += joint * (joint / indep).ln();
        }
    }
    if mutual <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * mutual / (h_a + h_b)).clamp(0.0, 1.0))
}

/// `KL(N(μ₁, σ₁²I) ‖ N(μ₂, σ₂²I))` in `mu1.len()` dimensions.
pub fn kl_spherical_gaussian(mu1: &[f64], var1: f64, mu2: &[f64], var2: f64) -> Result<f64> {
    contract(var1 > 0.0 && var2 > 0.0, || {
        format!("variances must be positive (got {var1}, {var2})")
    })?;
    contract(mu1.len() == mu2.len(), || "mean dimensions differ".into())?;
    let d = mu1.len() as f64;
    let kl = 0.5 * d * (var2 / var1).ln() + (d * var1 + squared_distance(mu1, mu2)) / (2.0 * var2) - 0.5 * d;
    Ok(kl.max(0.0))
}

/// Spherical Gaussian mixture: K×D means, K variances, K weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMixture {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub weights: Vec<f64>,
    pub n_features: usize,
}

impl SphericalMixture {
    pub fn uniform(means: Vec<f64>, variances: Vec<f64>, n_features: usize) -> Self {
        let k = variances.len();
        Self {
            means,
            variances,
            weights: vec![1.0 / k as f64; k],
            n_features,
        }
    }

    pub fn n_components(&self) -> usize {
        self.variances.len()
    }

    pub fn mean(&self, r: usize) -> &[f64] {
        &self.means[r * self.n_features..(r + 1) * self.n_features]
    }
}

/// Matching-based approximation of `KL(a ‖ b)` between two mixtures with the
/// same number of components.
pub fn kl_mixtures_matched(a: &SphericalMixture, b: &SphericalMixture) -> Result<f64> {
    let k = a.n_components();
    contract(k == b.n_components(), || {
        format!("component counts differ: {k} vs {}", b.n_components())
    })?;
    contract(a.n_features == b.n_features, || "mixture dimensions differ".into())?;
    contract(
        a.weights.iter().chain(&b.weights).all(|&w| w > 0.0) && a.weights.len() == k && b.weights.len() == k,
        || "mixture weights must be positive, one per component".into(),
    )?;
    let mut costs = Vec::with_capacity(k * k);
    for r in 0..k {
        for s in 0..k {
            let kl = kl_spherical_gaussian(a.mean(r), a.variances[r], b.mean(s), b.variances[s])?;
            costs.push(a.weights[r] * (kl + (a.weights[r] / b.weights[s]).ln()));
        }
    }
    let costs = CostMatrix::new(k, costs)?;
    Ok(min_cost_matching(&costs).cost)
}

fn nearest(center: &[f64], others: &[f64], d: usize) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (s, other) in others.chunks_exact(d).enumerate() {
        let dist = squared_distance(center, other);
        if dist < best_dist {
            best = s;
            best_dist = dist;
        }
    }
    best
}

fn orphans(from: &[f64], to: &[f64], d: usize) -> usize {
    let k = to.len() / d;
    let mut hit = vec![false; k];
    for c in from.chunks_exact(d) {
        hit[nearest(c, to, d)] = true;
    }
    hit.iter().filter(|h| !**h).count()
}

/// Symmetric centroid index between two center sets (K×D row-major).
pub fn centroid_index(centers_a: &[f64], centers_b: &[f64], n_features: usize) -> Result<usize> {
    contract(n_features > 0, || "dimension must be positive".into())?;
    contract(
        centers_a.len() == centers_b.len() && centers_a.len().is_multiple_of(n_features),
        || {
            format!(
                "center sets differ in shape: {} vs {} values",
                centers_a.len(),
                centers_b.len()
            )
        },
    )?;
    Ok(orphans(centers_a, centers_b, n_features).max(orphans(centers_b, centers_a, n_features)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmi_identity_and_constant() {
        let a = [0, 0, 1, 1, 2, 2];
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nmi(&a, &[0; 6]).unwrap(), 0.0);
        assert_eq!(nmi(&[1; 4], &[0; 4]).unwrap(), 1.0);
    }

    #[test]
    fn nmi_independent_labelings() {
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_length_mismatch() {
        assert!(nmi(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn kl_hand_values() {
        assert_eq!(kl_spherical_gaussian(&[1.0, 2.0], 3.0, &[1.0, 2.0], 3.0).unwrap(), 0.0);
        let v = kl_spherical_gaussian(&[0.0], 1.0, &[0.0], 4.0).unwrap();
        assert!((v - (2f64.ln() + 0.125 - 0.5)).abs() < 1e-15);
        assert!((v - 0.318_147_180_559_945_3).abs() < 1e-12);
        assert!((kl_spherical_gaussian(&[1.0], 1.0, &[0.0], 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(kl_spherical_gaussian(&[0.0], 0.0, &[0.0], 1.0).is_err());
    }

    #[test]
    fn mixture_kl_permutation_is_zero() {
        let a = SphericalMixture::uniform(vec![0.0, 0.0, 5.0, 1.0, -3.0, 2.0], vec![1.0, 2.0, 0.5], 2);
        let b = SphericalMixture::uniform(vec![-3.0, 2.0, 0.0, 0.0, 5.0, 1.0], vec![0.5, 1.0, 2.0], 2);
        assert!(kl_mixtures_matched(&a, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mixture_kl_single_component() {
        let a = SphericalMixture::uniform(vec![1.0, 0.0], vec![2.0], 2);
        let b = SphericalMixture::uniform(vec![0.0, 0.5], vec![1.0], 2);
        let direct = kl_spherical_gaussian(&[1.0, 0.0], 2.0, &[0.0, 0.5], 1.0).unwrap();
        assert!((kl_mixtures_matched(&a, &b).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn centroid_index_examples() {
        let a = [0.0, 0.0, 10.0, 10.0];
        assert_eq!(centroid_index(&a, &a, 2).unwrap(), 0);
        assert_eq!(centroid_index(&a, &[0.1, 0.0, 9.9, 10.0], 2).unwrap(), 0);
        assert_eq!(
            centroid_index(&[0.0, 0.0, 0.1, 0.0], &[0.0, 0.0, 10.0, 10.0], 2).unwrap(),
            1
        );
        assert!(centroid_index(&a, &[0.0, 0.0], 2).is_err());
    }
}
