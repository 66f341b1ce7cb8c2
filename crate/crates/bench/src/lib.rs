//! Benchmark fixtures shared by the criterion benches.

use ssclust::datagen::{generate_annotations, generate_mixture, ExpertSpec, MixtureSpec};
use ssclust::{AnnotationGraphs, Dataset};

/// Synthetic instance of the default benchmark shape with `m` annotations.
pub fn instance(n: usize, d: usize, k: usize, m: usize, seed: u64) -> (Dataset, AnnotationGraphs, Vec<usize>) {
    let (data, truth) = generate_mixture(&MixtureSpec::new(n, d, k, seed)).expect("valid mixture");
    let expert = ExpertSpec {
        accuracy: 0.9,
        n_annotations: m,
        seed: seed + 1,
    };
    let graphs = generate_annotations(&truth, &expert).expect("valid annotations");
    (data, graphs, truth.labels)
}
