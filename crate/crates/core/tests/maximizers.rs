//! Closed-form estimates are local maxima: small perturbations in random
//! directions never increase the corresponding objective.

mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use ssclust::estimation::{block_counts, compute_prior_rates, estimate_block_rates, estimate_block_rates_with_priors};
use ssclust::rng::{stream, StreamRng};
use ssclust::{gmm_loglik, sbm_loglik, Assignment, GaussianParams, LinkKind, PriorConfig, Solution};

const EPS: f64 = 1e-3;
const DIRECTIONS: usize = 50;
const INSTANCES: u64 = 50;

fn unit_vector(rng: &mut StreamRng, len: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Balanced random labels, so every cluster holds at least `n / k ≥ 2` samples.
fn balanced_assignment(rng: &mut StreamRng, n: usize, k: usize) -> Assignment {
    let mut labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    labels.shuffle(rng);
    Assignment::new(labels, k).unwrap()
}

struct Case {
    data: ssclust::Dataset,
    graphs: ssclust::AnnotationGraphs,
    assignment: Assignment,
    p: f64,
    rng: StreamRng,
}

fn case(seed: u64) -> Case {
    let mut rng = stream(9000, seed);
    let n = rng.gen_range(20..60);
    let d = rng.gen_range(1..5);
    let k = rng.gen_range(1..5);
    let m = rng.gen_range(10..80);
    let p = rng.gen_range(0.55..0.95);
    let (data, graphs, _) = common::instance(seed, n, d, k, m, p);
    let assignment = balanced_assignment(&mut rng, n, k);
    Case {
        data,
        graphs,
        assignment,
        p,
        rng,
    }
}

#[test]
fn means_and_variances_maximize_the_gmm_term() {
    for seed in 0..INSTANCES {
        let Case {
            data,
            graphs,
            assignment,
            mut rng,
            ..
        } = case(seed);
        let sol = Solution::new(&data, &graphs, assignment.clone(), PriorConfig::disabled()).unwrap();
        let fitted = sol.gaussians().clone();
        let best = gmm_loglik(&data, &assignment, &fitted).unwrap();
        let k = fitted.n_clusters();
        for _ in 0..DIRECTIONS {
            let u = unit_vector(&mut rng, fitted.means.len());
            let means = fitted.means.iter().zip(&u).map(|(m, u)| m + EPS * u).collect();
            let moved = GaussianParams::new(means, fitted.variances.clone(), fitted.n_features).unwrap();
            assert!(
                gmm_loglik(&data, &assignment, &moved).unwrap() < best,
                "instance {seed}: means"
            );

            let v = unit_vector(&mut rng, k);
            let variances = fitted
                .variances
                .iter()
                .zip(&v)
                .map(|(s, v)| s * (1.0 + EPS * v))
                .collect();
            let moved = GaussianParams::new(fitted.means.clone(), variances, fitted.n_features).unwrap();
            assert!(
                gmm_loglik(&data, &assignment, &moved).unwrap() < best,
                "instance {seed}: variances"
            );
        }
    }
}

/// Indices of rate entries with at least one edge, where the optimum is interior.
fn interior_entries(counts: &[u64]) -> Vec<usize> {
    (0..counts.len()).filter(|&e| counts[e] > 0).collect()
}

fn perturb(rates: &[f64], entries: &[usize], direction: &[f64]) -> Vec<f64> {
    let mut out = rates.to_vec();
    for (&e, u) in entries.iter().zip(direction) {
        out[e] *= 1.0 + EPS * u;
    }
    out
}

#[test]
fn block_rates_maximize_the_sbm_term() {
    for seed in 0..INSTANCES {
        let Case {
            graphs,
            assignment,
            mut rng,
            ..
        } = case(seed);
        let rates = estimate_block_rates(&graphs, &assignment).unwrap();
        for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
            let edges = graphs.edges(kind);
            let entries = interior_entries(&block_counts(edges, &assignment).unwrap());
            if entries.is_empty() {
                continue;
            }
            let omega = rates.matrix(kind);
            let best = sbm_loglik(edges, &assignment, omega).unwrap();
            for _ in 0..DIRECTIONS {
                let u = unit_vector(&mut rng, entries.len());
                let moved = perturb(omega, &entries, &u);
                assert!(
                    sbm_loglik(edges, &assignment, &moved).unwrap() < best,
                    "instance {seed}: {kind:?}"
                );
            }
        }
    }
}

/// `Σ_rs m_rs ln ω_rs − (n_r n_s + c_rs λ_rs) ω_rs` with `c = 2` on the diagonal.
fn posterior_entry_sum(counts: &[u64], sizes: &[usize], lambda: (f64, f64), omega: &[f64]) -> f64 {
    let k = sizes.len();
    let mut total = 0.0;
    for r in 0..k {
        for s in 0..k {
            let w = omega[r * k + s];
            let penalty = if r == s { 2.0 * lambda.0 } else { lambda.1 };
            let log_term = if counts[r * k + s] == 0 {
                0.0
            } else {
                counts[r * k + s] as f64 * w.ln()
            };
            total += log_term - ((sizes[r] * sizes[s]) as f64 + penalty) * w;
        }
    }
    total
}

#[test]
fn prior_adjusted_rates_maximize_the_posterior_entries() {
    for seed in 0..INSTANCES {
        let Case {
            graphs,
            assignment,
            p,
            mut rng,
            ..
        } = case(seed);
        let config = PriorConfig::with_accuracy(p).unwrap();
        let priors = compute_prior_rates(&assignment, &config, graphs.m_plus(), graphs.m_minus()).unwrap();
        let rates = estimate_block_rates_with_priors(&graphs, &assignment, &priors).unwrap();
        let sizes = assignment.counts();
        for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
            let counts = block_counts(graphs.edges(kind), &assignment).unwrap();
            let entries = interior_entries(&counts);
            if entries.is_empty() {
                continue;
            }
            let lambda = (priors.get(kind, true), priors.get(kind, false));
            let omega = rates.matrix(kind);
            let best = posterior_entry_sum(&counts, &sizes, lambda, omega);
            for _ in 0..DIRECTIONS {
                let u = unit_vector(&mut rng, entries.len());
                let moved = perturb(omega, &entries, &u);
                assert!(
                    posterior_entry_sum(&counts, &sizes, lambda, &moved) < best,
                    "instance {seed}: {kind:?}"
                );
            }
        }
    }
}
