//! Two-phase local search: likelihood-driven relocation of annotated samples,
//! then K-means iterations over the unannotated ones.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{AnnotationGraphs, Assignment, Dataset};
use crate::error::{Error, Result};
use crate::estimation::estimate_means;
use crate::objective::Solution;
use crate::solver::operators::{nearest_center, repair_empty_clusters};

/// Safety cap on K-means rounds in [`fit_unannotated`].
pub const MAX_KMEANS_ROUNDS: usize = 1000;

/// Applies improving single-sample relocations of `annotated` samples until a
/// full sweep over `(sample, cluster)` pairs, in fresh random order each
/// sweep, finds none.
pub fn fit_annotated<R: Rng + ?Sized>(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    solution: Solution,
    annotated: &[usize],
    tolerance: f64,
    rng: &mut R,
) -> Result<Solution> {
    fit_annotated_observed(dataset, graphs, solution, annotated, tolerance, rng, |_| {})
}

/// [`fit_annotated`] calling `on_move` after every applied relocation.
pub fn fit_annotated_observed<R, F>(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    mut solution: Solution,
    annotated: &[usize],
    tolerance: f64,
    rng: &mut R,
    mut on_move: F,
) -> Result<Solution>
where
    R: Rng + ?Sized,
    F: FnMut(&Solution),
{
    let k = solution.n_clusters();
    if annotated.is_empty() || k < 2 {
        return Ok(solution);
    }
    let mut moves: Vec<(usize, usize)> = annotated.iter().flat_map(|&i| (0..k).map(move |r| (i, r))).collect();
    loop {
        moves.shuffle(rng);
        let mut improved = false;
        for &(i, r) in &moves {
            if solution.labels()[i] == r {
                continue;
            }
            let delta = match solution.relocation_delta(dataset, graphs, i, r) {
                Ok(delta) => delta,
                Err(Error::WouldEmptyCluster { .. }) => continue,
                Err(e) => return Err(e),
            };
            if delta > tolerance {
                let before = solution.objective();
                solution.relocate(dataset, graphs, i, r)?;
                debug_assert!(solution.objective() >= before, "relocation lowered the objective");
                on_move(&solution);
                improved = true;
            }
        }
        if !improved {
            return Ok(solution);
        }
    }
}

/// K-means over the `unannotated` samples with every other label frozen:
/// assign to the closest mean, refit means on all samples, repeat until no
/// label changes. Returns the final assignment and the number of rounds.
pub fn kmeans_unannotated(
    dataset: &Dataset,
    assignment: &Assignment,
    unannotated: &[usize],
) -> Result<(Assignment, usize)> {
    let d = dataset.n_features();
    let k = assignment.n_clusters();
    let mut labels = assignment.labels().to_vec();
    let mut centers = estimate_means(dataset, assignment)?;
    let mut rounds = 0;
    while rounds < MAX_KMEANS_ROUNDS {
        rounds += 1;
        let mut changed = false;
        for &i in unannotated {
            let r = nearest_center(dataset.row(i), &centers, d);
            if r != labels[i] {
                labels[i] = r;
                changed = true;
            }
        }
        changed |= repair_empty_clusters(dataset, &mut labels, &mut centers);
        if !changed {
            break;
        }
        centers = estimate_means(dataset, &Assignment::new(labels.clone(), k)?)?;
    }
    Ok((Assignment::new(labels, k)?, rounds))
}

/// Runs [`kmeans_unannotated`] and refits every parameter and the objective
/// for the resulting assignment.
pub fn fit_unannotated(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    solution: Solution,
    unannotated: &[usize],
) -> Result<Solution> {
    if unannotated.is_empty() {
        return solution.recompute(dataset, graphs);
    }
    let (assignment, _) = kmeans_unannotated(dataset, solution.assignment(), unannotated)?;
    Solution::new(dataset, graphs, assignment, *solution.prior_config())
}

/// Annotated and unannotated sample indices.
pub fn partition_samples(graphs: &AnnotationGraphs) -> (Vec<usize>, Vec<usize>) {
    let annotated = graphs.annotated_samples();
    let mut is_annotated = vec![false; graphs.n_samples()];
    for &i in &annotated {
        is_annotated[i] = true;
    }
    let unannotated = (0..graphs.n_samples()).filter(|&i| !is_annotated[i]).collect();
    (annotated, unannotated)
}
