//! Center-based recombination and mutation.

use rand::Rng;

use crate::data::{squared_distance, Assignment, Dataset};
use crate::error::{contract, Result};
use crate::estimation::estimate_means;
use crate::matching::{min_cost_matching, CostMatrix};
use crate::objective::Solution;

/// Label of the closest center; ties go to the lowest index.
pub fn nearest_center(x: &[f64], centers: &[f64], d: usize) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (r, c) in centers.chunks_exact(d).enumerate() {
        let dist = squared_distance(x, c);
        if dist < best_dist {
            best = r;
            best_dist = dist;
        }
    }
    best
}

/// Assigns every sample to its closest center and repairs empty clusters.
pub fn assign_to_centers(dataset: &Dataset, centers: &[f64]) -> Result<Assignment> {
    let d = dataset.n_features();
    let k = centers.len() / d;
    contract(k >= 1 && centers.len() == k * d, || {
        format!("{} center values do not form rows of dimension {d}", centers.len())
    })?;
    contract(k <= dataset.n_samples(), || {
        format!("{k} centers for {} samples", dataset.n_samples())
    })?;
    let mut labels: Vec<usize> = dataset.rows().map(|x| nearest_center(x, centers, d)).collect();
    let mut centers = centers.to_vec();
    repair_empty_clusters(dataset, &mut labels, &mut centers);
    Assignment::new(labels, k)
}

/// Fills every empty cluster with the sample farthest from its own center,
/// taken from a cluster that keeps at least one member. The moved sample
/// becomes the new cluster's center. Returns whether anything moved.
pub fn repair_empty_clusters(dataset: &Dataset, labels: &mut [usize], centers: &mut [f64]) -> bool {
    let d = dataset.n_features();
    let k = centers.len() / d;
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    let mut moved = false;
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut pick = None;
        let mut pick_dist = f64::NEG_INFINITY;
        for (i, x) in dataset.rows().enumerate() {
            let r = labels[i];
            if counts[r] < 2 {
                continue;
            }
            let dist = squared_distance(x, &centers[r * d..(r + 1) * d]);
            if dist > pick_dist {
                pick = Some(i);
                pick_dist = dist;
            }
        }
        let Some(i) = pick else { break };
        counts[labels[i]] -= 1;
        counts[empty] += 1;
        labels[i] = empty;
        centers[empty * d..(empty + 1) * d].copy_from_slice(dataset.row(i));
        moved = true;
    }
    moved
}

/// Child of two parents: centers paired by minimum-cost matching on squared
/// distances, one center of each pair kept at random, samples assigned to the
/// closest kept center.
pub fn crossover<R: Rng + ?Sized>(
    dataset: &Dataset,
    parent1: &Solution,
    parent2: &Solution,
    rng: &mut R,
) -> Result<Assignment> {
    let k = parent1.n_clusters();
    contract(k == parent2.n_clusters(), || {
        format!("parents have {k} and {} clusters", parent2.n_clusters())
    })?;
    let centers = crossover_centers(parent1, parent2, rng)?;
    assign_to_centers(dataset, &centers)
}

pub(crate) fn crossover_centers<R: Rng + ?Sized>(
    parent1: &Solution,
    parent2: &Solution,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let k = parent1.n_clusters();
    let (g1, g2) = (parent1.gaussians(), parent2.gaussians());
    let costs = CostMatrix::from_fn(k, |r, s| squared_distance(g1.mean(r), g2.mean(s)))?;
    let matching = min_cost_matching(&costs);
    let mut centers = Vec::with_capacity(g1.means.len());
    for (r, &s) in matching.assignment.iter().enumerate() {
        let keep_first = rng.gen_bool(0.5);
        centers.extend_from_slice(if keep_first { g1.mean(r) } else { g2.mean(s) });
    }
    Ok(centers)
}

/// Replaces one uniformly chosen center by a uniformly chosen sample, then
/// reassigns every sample to its closest center.
pub fn mutation<R: Rng + ?Sized>(dataset: &Dataset, solution: &Solution, rng: &mut R) -> Result<Assignment> {
    mutate_centers(dataset, &solution.gaussians().means, rng)
}

/// [`mutation`] for an assignment whose means have not been fitted yet.
pub fn mutate_assignment<R: Rng + ?Sized>(
    dataset: &Dataset,
    assignment: &Assignment,
    rng: &mut R,
) -> Result<Assignment> {
    let means = estimate_means(dataset, assignment)?;
    mutate_centers(dataset, &means, rng)
}

pub fn mutate_centers<R: Rng + ?Sized>(dataset: &Dataset, centers: &[f64], rng: &mut R) -> Result<Assignment> {
    let d = dataset.n_features();
    let k = centers.len() / d;
    contract(k >= 1, || "no centers to mutate".into())?;
    let removed = rng.gen_range(0..k);
    let sample = rng.gen_range(0..dataset.n_samples());
    let mut centers = centers.to_vec();
    centers[removed * d..(removed + 1) * d].copy_from_slice(dataset.row(sample));
    assign_to_centers(dataset, &centers)
}
