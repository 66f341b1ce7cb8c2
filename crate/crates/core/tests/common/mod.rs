#![allow(dead_code)]

use ssclust::datagen::{generate_annotations, generate_mixture, ExpertSpec, GroundTruth, MixtureSpec};
use ssclust::{AnnotationGraphs, Assignment, Dataset, LinkKind, PriorConfig, Solution};

/// Synthetic instance with `m` annotations from an expert of accuracy `p`.
pub fn instance(seed: u64, n: usize, d: usize, k: usize, m: usize, p: f64) -> (Dataset, AnnotationGraphs, GroundTruth) {
    let (data, truth) = generate_mixture(&MixtureSpec::new(n, d, k, seed)).unwrap();
    let graphs = generate_annotations(
        &truth,
        &ExpertSpec {
            accuracy: p,
            n_annotations: m,
            seed: seed ^ 0x5eed,
        },
    )
    .unwrap();
    (data, graphs, truth)
}

/// Every labeling of `n` samples into `k` clusters with no empty cluster.
pub fn all_assignments(n: usize, k: usize) -> Vec<Assignment> {
    let total = k.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let labels: Vec<usize> = (0..n)
                .map(|_| {
                    let l = code % k;
                    code /= k;
                    l
                })
                .collect();
            let a = Assignment::new(labels, k).ok()?;
            a.check_non_empty().ok()?;
            Some(a)
        })
        .collect()
}

/// Global optimum by exhaustive enumeration.
pub fn brute_force(data: &Dataset, graphs: &AnnotationGraphs, k: usize, prior: PriorConfig) -> (f64, Vec<usize>) {
    all_assignments(data.n_samples(), k)
        .into_iter()
        .map(|a| {
            let s = Solution::new(data, graphs, a, prior).unwrap();
            (s.objective(), s.labels().to_vec())
        })
        .fold(
            (f64::NEG_INFINITY, Vec::new()),
            |best, cur| if cur.0 > best.0 { cur } else { best },
        )
}

/// Labels renumbered in order of first appearance.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    canonical(a) == canonical(b)
}

/// The six-sample instance shipped with the command-line fixtures.
pub fn six_sample_instance() -> (Dataset, AnnotationGraphs) {
    let data = Dataset::from_rows(&[[0.0, 0.0], [0.6, 0.2], [1.4, 1.1], [3.0, 3.0], [3.5, 2.6], [2.2, 2.4]]).unwrap();
    let graphs = AnnotationGraphs::from_annotations(
        6,
        [
            (0, 1, LinkKind::MustLink),
            (3, 4, LinkKind::MustLink),
            (2, 5, LinkKind::MustLink),
            (0, 5, LinkKind::CannotLink),
            (1, 4, LinkKind::CannotLink),
        ],
    )
    .unwrap();
    (data, graphs)
}
