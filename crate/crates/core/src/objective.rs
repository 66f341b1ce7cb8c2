//! Joint objective: spherical GMM log-likelihood plus one Poisson SBM per
//! annotation graph, optionally with exponential priors on the block rates.
//!
//! Conventions (all terms are the ×2-scaled log-likelihood with constants dropped):
//!
//! * GMM: `−Σ_i (‖x_i − μ_r‖²/σ_r² + D·ln σ_r²)` for the cluster `r` of sample `i`.
//! * SBM: `Σ_rs (m_rs ln ω_rs − ω_rs n_r n_s)` with `m_rs` counted over ordered
//!   sample pairs and `0·ln 0 = 0`.
//! * Priors: `Σ_r (ln λ⁺λ⁻ − λ⁺ω⁺_rr − λ⁻ω⁻_rr) + Σ_{r<s} (ln λ⁺λ⁻ − λ⁺ω⁺_rs − λ⁻ω⁻_rs)`.
//!
//! A [`Solution`] caches per-cluster sufficient statistics so that a single
//! relocation can be scored in `O(D + K + deg)` (likelihood mode) or
//! `O(D + K² + deg)` (posterior mode, where every prior rate moves with the
//! cluster sizes).

use smallvec::{smallvec, SmallVec};

use crate::data::{check_sizes, squared_distance, AnnotationGraphs, Assignment, Dataset, Edge, LinkKind};
use crate::error::{contract, Error, Result};
use crate::estimation::{block_counts, block_rate, prior_penalty, prior_rates_for_sizes, spherical_variance};
use crate::model::{BlockRates, GaussianParams, PriorConfig, PriorRates};

/// GMM term of the objective for explicit parameters.
pub fn gmm_loglik(dataset: &Dataset, assignment: &Assignment, gaussians: &GaussianParams) -> Result<f64> {
    check_sizes(dataset, assignment)?;
    contract(gaussians.n_clusters() == assignment.n_clusters(), || {
        format!(
            "assignment has {} clusters but parameters have {}",
            assignment.n_clusters(),
            gaussians.n_clusters()
        )
    })?;
    contract(gaussians.n_features == dataset.n_features(), || {
        format!(
            "parameters have dimension {} but dataset has {}",
            gaussians.n_features,
            dataset.n_features()
        )
    })?;
    contract(gaussians.variances.iter().all(|&v| v > 0.0), || {
        "variances must be strictly positive".into()
    })?;
    let d = dataset.n_features() as f64;
    let mut total = 0.0;
    for (row, &r) in dataset.rows().zip(assignment.labels()) {
        let var = gaussians.variances[r];
        total -= squared_distance(row, gaussians.mean(r)) / var + d * var.ln();
    }
    Ok(total)
}

/// SBM term of one graph for explicit rates (K×K row-major).
///
/// The ordered double sum over sample pairs is evaluated as the sum over both
/// orientations of each stored edge plus the closed form `−Σ_rs ω_rs n_r n_s`.
pub fn sbm_loglik(edges: &[Edge], assignment: &Assignment, rates: &[f64]) -> Result<f64> {
    let k = assignment.n_clusters();
    contract(rates.len() == k * k, || {
        format!("expected a {k}x{k} rate matrix, got {} entries", rates.len())
    })?;
    let n = assignment.n_samples();
    let mut total = 0.0;
    for e in edges {
        contract(e.i < n && e.j < n, || format!("edge ({}, {}) outside 0..{n}", e.i, e.j))?;
        let (r, s) = (assignment.label(e.i), assignment.label(e.j));
        total += f64::from(e.count) * (rates[r * k + s].ln() + rates[s * k + r].ln());
    }
    let sizes = assignment.counts();
    for r in 0..k {
        for s in 0..k {
            total -= rates[r * k + s] * (sizes[r] * sizes[s]) as f64;
        }
    }
    Ok(total)
}

/// Log-density of the exponential priors at the given rates.
pub fn prior_log_density(priors: &PriorRates, rates: &BlockRates) -> f64 {
    let k = rates.n_clusters;
    let mut total = 0.0;
    for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
        for r in 0..k {
            for s in r..k {
                let lambda = priors.get(kind, r == s);
                total += lambda.ln() - lambda * rates.get(kind, r, s);
            }
        }
    }
    total
}

/// Fits every parameter in closed form for `assignment` and scores it.
pub fn evaluate_objective(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    assignment: &Assignment,
    prior: &PriorConfig,
) -> Result<Solution> {
    Solution::new(dataset, graphs, assignment.clone(), *prior)
}

/// Per-cluster sufficient statistics of a solution.
///
/// Feature sums are taken on coordinates centred at the dataset column means.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub counts: Vec<usize>,
    pub sums: Vec<f64>,
    pub sq_norms: Vec<f64>,
    pub must_pairs: Vec<u64>,
    pub cannot_pairs: Vec<u64>,
}

impl ClusterStats {
    pub fn compute(dataset: &Dataset, graphs: &AnnotationGraphs, assignment: &Assignment) -> Result<Self> {
        let k = assignment.n_clusters();
        let d = dataset.n_features();
        let center = dataset.column_means();
        let mut counts = vec![0; k];
        let mut sums = vec![0.0; k * d];
        let mut sq_norms = vec![0.0; k];
        for (row, &r) in dataset.rows().zip(assignment.labels()) {
            counts[r] += 1;
            for ((s, x), c) in sums[r * d..(r + 1) * d].iter_mut().zip(row).zip(center) {
                let y = x - c;
                *s += y;
                sq_norms[r] += y * y;
            }
        }
        Ok(Self {
            counts,
            sums,
            sq_norms,
            must_pairs: block_counts(graphs.must_edges(), assignment)?,
            cannot_pairs: block_counts(graphs.cannot_edges(), assignment)?,
        })
    }

    fn pairs(&self, kind: LinkKind) -> &[u64] {
        match kind {
            LinkKind::MustLink => &self.must_pairs,
            LinkKind::CannotLink => &self.cannot_pairs,
        }
    }

    fn pairs_mut(&mut self, kind: LinkKind) -> &mut [u64] {
        match kind {
            LinkKind::MustLink => &mut self.must_pairs,
            LinkKind::CannotLink => &mut self.cannot_pairs,
        }
    }
}

/// Scatter, fitted variance and GMM contribution of one cluster.
fn cluster_term(count: usize, sum: &[f64], sq_norm: f64, floor: f64) -> (f64, f64) {
    let norm: f64 = sum.iter().map(|s| s * s).sum();
    cluster_term_from_norm(count, sum.len(), norm, sq_norm, floor)
}

/// [`cluster_term`] given `‖sum‖²` instead of the sum itself.
fn cluster_term_from_norm(count: usize, d: usize, sum_norm: f64, sq_norm: f64, floor: f64) -> (f64, f64) {
    let mut scatter = if count <= 1 {
        0.0
    } else {
        sq_norm - sum_norm / count as f64
    };
    if scatter <= 1e-10 * sq_norm {
        scatter = 0.0;
    }
    let var = spherical_variance(scatter, count, d, floor);
    (var, -(scatter / var + (d * count) as f64 * var.ln()))
}

/// `m ln ω − ω·pairs` at the closed-form ω.
fn graph_entry(m: u64, pairs: f64, penalty: f64) -> (f64, f64) {
    let w = block_rate(m, pairs, penalty);
    if m == 0 {
        (0.0, 0.0)
    } else {
        (w, m as f64 * w.ln() - w * pairs)
    }
}

/// Graph part of the objective (both SBMs and, if present, the priors) for
/// arbitrary cluster sizes and pair counts.
fn graph_total<F>(sizes: &[usize], pairs: F, priors: Option<&PriorRates>) -> f64
where
    F: Fn(LinkKind, usize, usize) -> u64,
{
    let k = sizes.len();
    let mut total = 0.0;
    for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
        for r in 0..k {
            for s in 0..k {
                let penalty = priors.map_or(0.0, |p| prior_penalty(p, kind, r, s));
                let (w, term) = graph_entry(pairs(kind, r, s), (sizes[r] * sizes[s]) as f64, penalty);
                total += term;
                if let Some(p) = priors {
                    if r <= s {
                        let lambda = p.get(kind, r == s);
                        total += lambda.ln() - lambda * w;
                    }
                }
            }
        }
    }
    total
}

type Histogram = SmallVec<[u64; 16]>;

/// A scored assignment together with its fitted parameters and cached statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    assignment: Assignment,
    gaussians: GaussianParams,
    rates: BlockRates,
    priors: Option<PriorRates>,
    prior_config: PriorConfig,
    objective: f64,
    stats: ClusterStats,
    gmm_terms: Vec<f64>,
    graph_term: f64,
}

impl Solution {
    pub fn new(
        dataset: &Dataset,
        graphs: &AnnotationGraphs,
        assignment: Assignment,
        prior_config: PriorConfig,
    ) -> Result<Self> {
        check_sizes(dataset, &assignment)?;
        contract(graphs.n_samples() == dataset.n_samples(), || {
            format!(
                "graphs cover {} samples but dataset has {}",
                graphs.n_samples(),
                dataset.n_samples()
            )
        })?;
        if assignment.n_clusters() > dataset.n_samples() {
            return Err(Error::InvalidInput(format!(
                "{} clusters requested for {} samples",
                assignment.n_clusters(),
                dataset.n_samples()
            )));
        }
        assignment.check_non_empty()?;
        let stats = ClusterStats::compute(dataset, graphs, &assignment)?;
        let k = assignment.n_clusters();
        let d = dataset.n_features();
        let mut solution = Self {
            gaussians: GaussianParams {
                means: vec![0.0; k * d],
                variances: vec![0.0; k],
                n_features: d,
            },
            rates: BlockRates::zeros(k),
            priors: None,
            prior_config,
            objective: 0.0,
            stats,
            gmm_terms: vec![0.0; k],
            graph_term: 0.0,
            assignment,
        };
        for r in 0..k {
            solution.refresh_cluster(dataset, r);
        }
        solution.refresh_graph(graphs)?;
        Ok(solution)
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn labels(&self) -> &[usize] {
        self.assignment.labels()
    }

    pub fn n_clusters(&self) -> usize {
        self.assignment.n_clusters()
    }

    pub fn gaussians(&self) -> &GaussianParams {
        &self.gaussians
    }

    pub fn rates(&self) -> &BlockRates {
        &self.rates
    }

    pub fn priors(&self) -> Option<&PriorRates> {
        self.priors.as_ref()
    }

    pub fn prior_config(&self) -> &PriorConfig {
        &self.prior_config
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn stats(&self) -> &ClusterStats {
        &self.stats
    }

    /// GMM share of the objective.
    pub fn gmm_term(&self) -> f64 {
        self.gmm_terms.iter().sum()
    }

    /// SBM (and prior) share of the objective.
    pub fn graph_term(&self) -> f64 {
        self.graph_term
    }

    pub fn into_assignment(self) -> Assignment {
        self.assignment
    }

    fn refresh_cluster(&mut self, dataset: &Dataset, r: usize) {
        let d = dataset.n_features();
        let n = self.stats.counts[r];
        let sum = &self.stats.sums[r * d..(r + 1) * d];
        let (var, term) = cluster_term(n, sum, self.stats.sq_norms[r], dataset.variance_floor());
        for ((m, s), c) in self.gaussians.means[r * d..(r + 1) * d]
            .iter_mut()
            .zip(sum)
            .zip(dataset.column_means())
        {
            *m = s / n as f64 + c;
        }
        self.gaussians.variances[r] = var;
        self.gmm_terms[r] = term;
    }

    fn refresh_graph(&mut self, graphs: &AnnotationGraphs) -> Result<()> {
        let k = self.n_clusters();
        self.priors = if self.prior_config.enabled {
            Some(prior_rates_for_sizes(
                &self.stats.counts,
                &self.prior_config,
                graphs.m_plus(),
                graphs.m_minus(),
            )?)
        } else {
            None
        };
        let priors = self.priors.as_ref();
        for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
            let pairs = self.stats.pairs(kind);
            let omega = match kind {
                LinkKind::MustLink => &mut self.rates.omega_plus,
                LinkKind::CannotLink => &mut self.rates.omega_minus,
            };
            for r in 0..k {
                for s in 0..k {
                    let penalty = priors.map_or(0.0, |p| prior_penalty(p, kind, r, s));
                    let size = (self.stats.counts[r] * self.stats.counts[s]) as f64;
                    omega[r * k + s] = block_rate(pairs[r * k + s], size, penalty);
                }
            }
        }
        let stats = &self.stats;
        self.graph_term = graph_total(&stats.counts, |kind, r, s| stats.pairs(kind)[r * k + s], priors);
        self.objective = self.gmm_term() + self.graph_term;
        Ok(())
    }

    fn check_move(&self, dataset: &Dataset, graphs: &AnnotationGraphs, sample: usize, target: usize) -> Result<usize> {
        contract(graphs.n_samples() == dataset.n_samples(), || {
            "graphs/dataset size mismatch".into()
        })?;
        contract(sample < self.assignment.n_samples(), || {
            format!("sample {sample} outside 0..{}", self.assignment.n_samples())
        })?;
        contract(target < self.n_clusters(), || {
            format!("cluster {target} outside 0..{}", self.n_clusters())
        })?;
        let source = self.assignment.label(sample);
        contract(source != target, || {
            format!("sample {sample} already in cluster {target}")
        })?;
        if self.stats.counts[source] == 1 {
            return Err(Error::WouldEmptyCluster {
                sample,
                cluster: source,
            });
        }
        Ok(source)
    }

    /// Neighbour counts of `sample` per cluster label, for one graph.
    fn neighbor_histogram(&self, graphs: &AnnotationGraphs, kind: LinkKind, sample: usize) -> Histogram {
        let mut hist: Histogram = smallvec![0; self.n_clusters()];
        for &(j, c) in graphs.neighbors(kind, sample) {
            hist[self.assignment.label(j)] += u64::from(c);
        }
        hist
    }

    /// Change of the objective if `sample` moved to `target`, with every
    /// parameter re-fitted in closed form on both sides.
    pub fn relocation_delta(
        &self,
        dataset: &Dataset,
        graphs: &AnnotationGraphs,
        sample: usize,
        target: usize,
    ) -> Result<f64> {
        let source = self.check_move(dataset, graphs, sample, target)?;
        let d = dataset.n_features();
        let floor = dataset.variance_floor();
        let row = dataset.row(sample);
        let centered = || row.iter().zip(dataset.column_means()).map(|(v, c)| v - c);
        let x_sq: f64 = centered().map(|v| v * v).sum();

        let moved = |r: usize, sign: f64| {
            let sum = &self.stats.sums[r * d..(r + 1) * d];
            let count = if sign > 0.0 {
                self.stats.counts[r] + 1
            } else {
                self.stats.counts[r] - 1
            };
            let norm: f64 = sum.iter().zip(centered()).map(|(s, v)| (s + sign * v).powi(2)).sum();
            cluster_term_from_norm(count, d, norm, self.stats.sq_norms[r] + sign * x_sq, floor).1
        };
        let mut delta = moved(source, -1.0) + moved(target, 1.0) - self.gmm_terms[source] - self.gmm_terms[target];

        let k = self.n_clusters();
        let hist = [
            self.neighbor_histogram(graphs, LinkKind::MustLink, sample),
            self.neighbor_histogram(graphs, LinkKind::CannotLink, sample),
        ];
        let shifted = |kind: LinkKind, r: usize, s: usize| -> u64 {
            let h = &hist[kind as usize];
            let m = self.stats.pairs(kind)[r * k + s] as i64;
            let side = |c: usize| i64::from(c == target) - i64::from(c == source);
            (m + side(r) * h[s] as i64 + side(s) * h[r] as i64) as u64
        };

        if self.prior_config.enabled {
            // every prior rate depends on all cluster sizes
            let mut sizes = self.stats.counts.clone();
            sizes[source] -= 1;
            sizes[target] += 1;
            let priors = prior_rates_for_sizes(&sizes, &self.prior_config, graphs.m_plus(), graphs.m_minus())?;
            delta += graph_total(&sizes, shifted, Some(&priors)) - self.graph_term;
        } else {
            // At the fitted rates the graph term is
            //   Σ_rs m_rs ln m_rs − 2 Σ_r deg_r ln n_r − Σ_rs m_rs,
            // with deg_r the row sum of the pair counts, so only changed
            // entries and the two changed sizes contribute.
            let (n_src, n_tgt) = (self.stats.counts[source], self.stats.counts[target]);
            for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
                let pairs = self.stats.pairs(kind);
                let degree: u64 = hist[kind as usize].iter().sum();
                let mut entry_change = |r: usize, s: usize| {
                    let (old, new) = (pairs[r * k + s], shifted(kind, r, s));
                    if old != new {
                        delta += graphs.xlnx(new) - graphs.xlnx(old);
                    }
                };
                for l in (0..k).filter(|_| degree > 0) {
                    entry_change(source, l);
                    entry_change(target, l);
                    if l != source && l != target {
                        entry_change(l, source);
                        entry_change(l, target);
                    }
                }
                let row_sum = |r: usize| pairs[r * k..(r + 1) * k].iter().sum::<u64>() as f64;
                let (deg_src, deg_tgt) = (row_sum(source), row_sum(target));
                let degree = degree as f64;
                let ln = |n: usize| dataset.ln_count(n);
                delta -= 2.0
                    * ((deg_src - degree) * ln(n_src - 1) - deg_src * ln(n_src) + (deg_tgt + degree) * ln(n_tgt + 1)
                        - deg_tgt * ln(n_tgt));
            }
        }
        Ok(delta)
    }

    /// Moves `sample` to `target`, refits and returns the objective change.
    pub fn relocate(
        &mut self,
        dataset: &Dataset,
        graphs: &AnnotationGraphs,
        sample: usize,
        target: usize,
    ) -> Result<f64> {
        let source = self.check_move(dataset, graphs, sample, target)?;
        let before = self.objective;
        let d = dataset.n_features();
        let k = self.n_clusters();

        for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
            let hist = self.neighbor_histogram(graphs, kind, sample);
            let pairs = self.stats.pairs_mut(kind);
            for (l, &h) in hist.iter().enumerate() {
                pairs[source * k + l] -= h;
                pairs[l * k + source] -= h;
                pairs[target * k + l] += h;
                pairs[l * k + target] += h;
            }
        }
        let mut x_sq = 0.0;
        for ((v, c), f) in dataset.row(sample).iter().zip(dataset.column_means()).zip(0..d) {
            let y = v - c;
            self.stats.sums[source * d + f] -= y;
            self.stats.sums[target * d + f] += y;
            x_sq += y * y;
        }
        self.stats.sq_norms[source] -= x_sq;
        self.stats.sq_norms[target] += x_sq;
        self.stats.counts[source] -= 1;
        self.stats.counts[target] += 1;
        self.assignment.set(sample, target);

        self.refresh_cluster(dataset, source);
        self.refresh_cluster(dataset, target);
        self.refresh_graph(graphs)?;
        Ok(self.objective - before)
    }

    /// Recomputes the solution from its assignment alone.
    pub fn recompute(&self, dataset: &Dataset, graphs: &AnnotationGraphs) -> Result<Solution> {
        Solution::new(dataset, graphs, self.assignment.clone(), self.prior_config)
    }

    /// Checks the cached statistics and objective against a from-scratch rebuild.
    pub fn check_consistency(&self, dataset: &Dataset, graphs: &AnnotationGraphs) -> Result<()> {
        let fresh = self.recompute(dataset, graphs)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        let stats_match = fresh.stats.counts == self.stats.counts
            && fresh.stats.must_pairs == self.stats.must_pairs
            && fresh.stats.cannot_pairs == self.stats.cannot_pairs
            && fresh
                .stats
                .sums
                .iter()
                .zip(&self.stats.sums)
                .all(|(a, b)| close(*a, *b))
            && fresh
                .stats
                .sq_norms
                .iter()
                .zip(&self.stats.sq_norms)
                .all(|(a, b)| close(*a, *b));
        contract(stats_match, || {
            "cached cluster statistics drifted from the assignment".into()
        })?;
        contract((fresh.objective - self.objective).abs() <= 1e-6, || {
            format!(
                "cached objective {} differs from recomputed {}",
                self.objective, fresh.objective
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{estimate_block_rates, estimate_gaussians};

    fn pair_dataset() -> Dataset {
        Dataset::from_rows(&[[0.0, 0.0], [2.0, 2.0]]).unwrap()
    }

    #[test]
    fn gmm_loglik_hand_value() {
        let d = pair_dataset();
        let a = Assignment::new(vec![0, 0], 1).unwrap();
        let g = GaussianParams::new(vec![1.0, 1.0], vec![0.5], 2).unwrap();
        // −(2/0.5 + 2/0.5) − 2·2·2·ln √0.5
        let expected = -8.0 - 8.0 * 0.5f64.sqrt().ln();
        let value = gmm_loglik(&d, &a, &g).unwrap();
        assert!((value - expected).abs() < 1e-12);
        assert!((value - -5.227_411_277_760_218).abs() < 1e-12);
    }

    #[test]
    fn gmm_loglik_zero_at_unit_variance_means() {
        let d = Dataset::from_rows(&[[1.0, -2.0], [3.0, 0.5], [1.0, -2.0]]).unwrap();
        let a = Assignment::new(vec![0, 1, 0], 2).unwrap();
        let g = GaussianParams::new(vec![1.0, -2.0, 3.0, 0.5], vec![1.0, 1.0], 2).unwrap();
        assert_eq!(gmm_loglik(&d, &a, &g).unwrap(), 0.0);
    }

    #[test]
    fn gmm_loglik_dimension_mismatch() {
        let d = pair_dataset();
        let a = Assignment::new(vec![0, 0], 1).unwrap();
        let g = GaussianParams::new(vec![1.0], vec![1.0], 1).unwrap();
        assert!(matches!(gmm_loglik(&d, &a, &g), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn sbm_loglik_empty_graph() {
        let a = Assignment::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(sbm_loglik(&[], &a, &[0.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn sbm_loglik_single_edge() {
        let a = Assignment::new(vec![0, 0, 0], 1).unwrap();
        let edges = [Edge { i: 0, j: 1, count: 1 }];
        let w = 2.0 / 9.0;
        let value = sbm_loglik(&edges, &a, &[w]).unwrap();
        // literal ordered double sum over (i, j)
        let adjacency = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let mut literal = 0.0;
        for row in adjacency {
            for a_ij in row {
                literal += a_ij * f64::ln(w) - w;
            }
        }
        assert!((value - literal).abs() < 1e-12);
        assert!((value - -5.008_154_793_552_548).abs() < 1e-12);
    }

    #[test]
    fn sbm_loglik_rejects_out_of_range_edge() {
        let a = Assignment::new(vec![0, 0], 1).unwrap();
        let edges = [Edge { i: 0, j: 5, count: 1 }];
        assert!(matches!(
            sbm_loglik(&edges, &a, &[1.0]),
            Err(Error::ContractViolation(_))
        ));
    }

    fn small_instance() -> (Dataset, AnnotationGraphs) {
        let d = Dataset::from_rows(&[[0.0, 0.1], [0.4, -0.2], [0.1, 0.3], [3.0, 3.1], [2.7, 2.9], [3.3, 2.6]]).unwrap();
        let g = AnnotationGraphs::from_annotations(
            6,
            [
                (0, 1, LinkKind::MustLink),
                (3, 4, LinkKind::MustLink),
                (2, 5, LinkKind::MustLink),
                (0, 3, LinkKind::CannotLink),
                (1, 5, LinkKind::CannotLink),
            ],
        )
        .unwrap();
        (d, g)
    }

    #[test]
    fn objective_decomposes_into_three_terms() {
        let (d, g) = small_instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 1, 0], 2).unwrap();
        let sol = evaluate_objective(&d, &g, &a, &PriorConfig::disabled()).unwrap();
        let gauss = estimate_gaussians(&d, &a).unwrap();
        let rates = estimate_block_rates(&g, &a).unwrap();
        let expected = gmm_loglik(&d, &a, &gauss).unwrap()
            + sbm_loglik(g.must_edges(), &a, &rates.omega_plus).unwrap()
            + sbm_loglik(g.cannot_edges(), &a, &rates.omega_minus).unwrap();
        assert!((sol.objective() - expected).abs() <= 1e-9 * expected.abs());
    }

    #[test]
    fn no_annotations_means_gmm_only() {
        let (d, _) = small_instance();
        let g = AnnotationGraphs::empty(6);
        let a = Assignment::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let sol = evaluate_objective(&d, &g, &a, &PriorConfig::disabled()).unwrap();
        let gauss = estimate_gaussians(&d, &a).unwrap();
        assert!((sol.objective() - gmm_loglik(&d, &a, &gauss).unwrap()).abs() < 1e-9);
        assert_eq!(sol.graph_term(), 0.0);
    }

    #[test]
    fn rejects_empty_cluster_and_too_many_clusters() {
        let (d, g) = small_instance();
        let a = Assignment::new(vec![0; 6], 2).unwrap();
        assert_eq!(
            evaluate_objective(&d, &g, &a, &PriorConfig::disabled()).unwrap_err(),
            Error::EmptyCluster { cluster: 1 }
        );
        let a = Assignment::new(vec![0, 1, 2, 3, 4, 5], 7).unwrap();
        assert!(matches!(
            evaluate_objective(&d, &g, &a, &PriorConfig::disabled()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn relocation_that_empties_a_cluster_is_distinct_error() {
        let (d, g) = small_instance();
        let a = Assignment::new(vec![0, 0, 0, 0, 0, 1], 2).unwrap();
        let sol = evaluate_objective(&d, &g, &a, &PriorConfig::disabled()).unwrap();
        assert_eq!(
            sol.relocation_delta(&d, &g, 5, 0).unwrap_err(),
            Error::WouldEmptyCluster { sample: 5, cluster: 1 }
        );
        assert!(matches!(
            sol.relocation_delta(&d, &g, 0, 0),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn relocation_delta_matches_recomputation_both_modes() {
        let (d, g) = small_instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 1, 0], 2).unwrap();
        for prior in [PriorConfig::disabled(), PriorConfig::with_accuracy(0.8).unwrap()] {
            let sol = evaluate_objective(&d, &g, &a, &prior).unwrap();
            for i in 0..6 {
                let target = 1 - a.label(i);
                let delta = sol.relocation_delta(&d, &g, i, target).unwrap();
                let mut labels = a.labels().to_vec();
                labels[i] = target;
                let moved = Assignment::new(labels, 2).unwrap();
                let fresh = evaluate_objective(&d, &g, &moved, &prior).unwrap();
                assert!((delta - (fresh.objective() - sol.objective())).abs() < 1e-8);

                let mut applied = sol.clone();
                let applied_delta = applied.relocate(&d, &g, i, target).unwrap();
                assert!((applied_delta - delta).abs() < 1e-8);
                applied.check_consistency(&d, &g).unwrap();
                let back = applied.relocate(&d, &g, i, a.label(i)).unwrap();
                assert!((back + applied_delta).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn posterior_adds_prior_terms() {
        let (d, g) = small_instance();
        let a = Assignment::new(vec![0, 0, 1, 1, 1, 0], 2).unwrap();
        let cfg = PriorConfig::with_accuracy(0.9).unwrap();
        let sol = evaluate_objective(&d, &g, &a, &cfg).unwrap();
        let priors = *sol.priors().unwrap();
        let rates = crate::estimation::estimate_block_rates_with_priors(&g, &a, &priors).unwrap();
        assert_eq!(&rates, sol.rates());
        let gauss = estimate_gaussians(&d, &a).unwrap();
        let expected = gmm_loglik(&d, &a, &gauss).unwrap()
            + sbm_loglik(g.must_edges(), &a, &rates.omega_plus).unwrap()
            + sbm_loglik(g.cannot_edges(), &a, &rates.omega_minus).unwrap()
            + prior_log_density(&priors, &rates);
        assert!((sol.objective() - expected).abs() <= 1e-9 * expected.abs());
    }
}
