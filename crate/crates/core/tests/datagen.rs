use ssclust::datagen::{generate_annotations, generate_mixture, ExpertSpec, GroundTruth, MixtureSpec};
use ssclust::LinkKind;

#[test]
fn single_cluster_sample_mean_obeys_clt_bound() {
    let (n, d) = (10_000, 3);
    let seeds = 100;
    let mut within = 0;
    for seed in 0..seeds {
        let (data, truth) = generate_mixture(&MixtureSpec::new(n, d, 1, seed)).unwrap();
        let bound = 5.0 * truth.variances[0].sqrt() / (n as f64).sqrt();
        let ok = (0..d).all(|f| {
            let mean = data.rows().map(|r| r[f]).sum::<f64>() / n as f64;
            (mean - truth.means[f]).abs() <= bound
        });
        within += usize::from(ok);
    }
    assert!(
        within * 100 >= 99 * seeds as usize,
        "{within}/{seeds} seeds within the bound"
    );
}

fn two_balanced_clusters(n: usize) -> GroundTruth {
    GroundTruth {
        labels: (0..n).map(|i| i % 2).collect(),
        means: vec![0.0, 1.0],
        variances: vec![1.0, 1.0],
        n_features: 1,
    }
}

#[test]
fn correct_annotation_rate_concentrates_at_accuracy() {
    let truth = two_balanced_clusters(1000);
    let spec = ExpertSpec {
        accuracy: 0.8,
        n_annotations: 100_000,
        seed: 5,
    };
    let graphs = generate_annotations(&truth, &spec).unwrap();
    let same = |i: usize, j: usize| truth.labels[i] == truth.labels[j];
    let correct: u64 = graphs
        .must_edges()
        .iter()
        .filter(|e| same(e.i, e.j))
        .chain(graphs.cannot_edges().iter().filter(|e| !same(e.i, e.j)))
        .map(|e| u64::from(e.count))
        .sum();
    let rate = correct as f64 / 100_000.0;
    assert!((0.796..=0.804).contains(&rate), "rate {rate}");
}

#[test]
fn annotation_counts_are_conserved() {
    let (_, truth) = generate_mixture(&MixtureSpec::new(50, 2, 3, 1)).unwrap();
    for m in [0, 1, 7, 50, 2000] {
        for p in [0.0, 0.3, 0.9, 1.0] {
            let graphs = generate_annotations(
                &truth,
                &ExpertSpec {
                    accuracy: p,
                    n_annotations: m,
                    seed: m as u64,
                },
            )
            .unwrap();
            assert_eq!(graphs.m_plus() + graphs.m_minus(), m as u64);
            assert_eq!(graphs.annotations().count(), m);
            for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
                assert!(graphs.edges(kind).iter().all(|e| e.i < e.j));
            }
        }
    }
}

#[test]
fn annotations_need_two_samples() {
    let truth = GroundTruth {
        labels: vec![0],
        means: vec![0.0],
        variances: vec![1.0],
        n_features: 1,
    };
    let spec = |m| ExpertSpec {
        accuracy: 0.9,
        n_annotations: m,
        seed: 0,
    };
    assert!(generate_annotations(&truth, &spec(1)).is_err());
    assert!(generate_annotations(&truth, &spec(0)).unwrap().is_empty());
}
