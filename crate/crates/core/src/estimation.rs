//! Closed-form parameter estimates for a fixed assignment.
//!
//! Means and variances maximize the spherical GMM term, block rates maximize the
//! Poisson SBM term (optionally under exponential priors whose rates follow from
//! the expert accuracy and the current cluster sizes).

use crate::data::{check_sizes, squared_distance, AnnotationGraphs, Assignment, Dataset, Edge, LinkKind};
use crate::error::{contract, Error, Result};
use crate::model::{BlockRates, ExpectedEdgeCounts, GaussianParams, PriorConfig, PriorRates};

/// Cluster means, K×D row-major.
pub fn estimate_means(dataset: &Dataset, assignment: &Assignment) -> Result<Vec<f64>> {
    check_sizes(dataset, assignment)?;
    assignment.check_non_empty()?;
    let d = dataset.n_features();
    let k = assignment.n_clusters();
    let mut means = vec![0.0; k * d];
    for (row, &r) in dataset.rows().zip(assignment.labels()) {
        for (m, x) in means[r * d..(r + 1) * d].iter_mut().zip(row) {
            *m += x;
        }
    }
    for (r, n) in assignment.counts().into_iter().enumerate() {
        for m in &mut means[r * d..(r + 1) * d] {
            *m /= n as f64;
        }
    }
    Ok(means)
}

/// Per-cluster spherical variances `Σ_{i∈r} ‖x_i − μ_r‖² / (D·n_r)`, floored at
/// the dataset's variance floor.
pub fn estimate_variances(dataset: &Dataset, assignment: &Assignment, means: &[f64]) -> Result<Vec<f64>> {
    check_sizes(dataset, assignment)?;
    assignment.check_non_empty()?;
    let d = dataset.n_features();
    let k = assignment.n_clusters();
    contract(means.len() == k * d, || {
        format!("expected {} mean values, got {}", k * d, means.len())
    })?;
    let mut scatter = vec![0.0; k];
    for (row, &r) in dataset.rows().zip(assignment.labels()) {
        scatter[r] += squared_distance(row, &means[r * d..(r + 1) * d]);
    }
    Ok(scatter
        .into_iter()
        .zip(assignment.counts())
        .map(|(s, n)| spherical_variance(s, n, d, dataset.variance_floor()))
        .collect())
}

pub fn estimate_gaussians(dataset: &Dataset, assignment: &Assignment) -> Result<GaussianParams> {
    let means = estimate_means(dataset, assignment)?;
    let variances = estimate_variances(dataset, assignment, &means)?;
    GaussianParams::new(means, variances, dataset.n_features())
}

pub(crate) fn spherical_variance(scatter: f64, n: usize, d: usize, floor: f64) -> f64 {
    (scatter / (d * n) as f64).max(floor)
}

/// Ordered-pair edge counts `m_rs = Σ_ij A_ij z_ir z_js` (K×K). A stored
/// within-cluster edge contributes twice to the diagonal.
pub fn block_counts(edges: &[Edge], assignment: &Assignment) -> Result<Vec<u64>> {
    let k = assignment.n_clusters();
    let n = assignment.n_samples();
    let mut counts = vec![0u64; k * k];
    for e in edges {
        contract(e.i < n && e.j < n, || format!("edge ({}, {}) outside 0..{n}", e.i, e.j))?;
        let (r, s) = (assignment.label(e.i), assignment.label(e.j));
        counts[r * k + s] += u64::from(e.count);
        counts[s * k + r] += u64::from(e.count);
    }
    Ok(counts)
}

/// Maximum-likelihood block rates `ω̂_rs = m_rs / (n_r n_s)` for both graphs.
pub fn estimate_block_rates(graphs: &AnnotationGraphs, assignment: &Assignment) -> Result<BlockRates> {
    block_rates(graphs, assignment, None)
}

/// Maximum-posterior block rates: `m_rs / (n_r n_s + 2λ_rr)` on the diagonal and
/// `m_rs / (n_r n_s + λ_rs)` off it, each graph with its own λ.
pub fn estimate_block_rates_with_priors(
    graphs: &AnnotationGraphs,
    assignment: &Assignment,
    priors: &PriorRates,
) -> Result<BlockRates> {
    block_rates(graphs, assignment, Some(priors))
}

fn block_rates(graphs: &AnnotationGraphs, assignment: &Assignment, priors: Option<&PriorRates>) -> Result<BlockRates> {
    contract(graphs.n_samples() == assignment.n_samples(), || {
        format!(
            "graphs cover {} samples but assignment has {}",
            graphs.n_samples(),
            assignment.n_samples()
        )
    })?;
    let k = assignment.n_clusters();
    let sizes = assignment.counts();
    let mut rates = BlockRates::zeros(k);
    for kind in [LinkKind::MustLink, LinkKind::CannotLink] {
        let counts = block_counts(graphs.edges(kind), assignment)?;
        let omega = match kind {
            LinkKind::MustLink => &mut rates.omega_plus,
            LinkKind::CannotLink => &mut rates.omega_minus,
        };
        for r in 0..k {
            for s in 0..k {
                let penalty = priors.map_or(0.0, |p| prior_penalty(p, kind, r, s));
                omega[r * k + s] = block_rate(counts[r * k + s], (sizes[r] * sizes[s]) as f64, penalty);
            }
        }
    }
    Ok(rates)
}

/// `m / (n_r n_s + penalty)`, zero whenever `m` is zero.
pub(crate) fn block_rate(m: u64, pairs: f64, penalty: f64) -> f64 {
    if m == 0 {
        0.0
    } else {
        m as f64 / (pairs + penalty)
    }
}

/// Denominator shift from the exponential prior: `2λ` on the diagonal, `λ` off it.
pub(crate) fn prior_penalty(priors: &PriorRates, kind: LinkKind, r: usize, s: usize) -> f64 {
    if r == s {
        2.0 * priors.get(kind, true)
    } else {
        priors.get(kind, false)
    }
}

/// Within-group pair count `Σ_r n_r(n_r+1)/2` and between-group count `Σ_{r<s} n_r n_s`.
pub fn pair_counts(sizes: &[usize]) -> (f64, f64) {
    let within: f64 = sizes.iter().map(|&n| (n * (n + 1)) as f64 / 2.0).sum();
    let total: f64 = sizes.iter().sum::<usize>() as f64;
    let squares: f64 = sizes.iter().map(|&n| (n * n) as f64).sum();
    (within, (total * total - squares) / 2.0)
}

/// Prior expected edge counts implied by accuracy `p` and the annotation totals.
pub fn expected_edge_counts(sizes: &[usize], p: f64, m_plus: u64, m_minus: u64) -> Result<ExpectedEdgeCounts> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ContractViolation(format!(
            "expert accuracy must lie strictly inside (0, 1), got {p}"
        )));
    }
    let (within, between) = pair_counts(sizes);
    let odds_against = (1.0 - p) / p;
    let odds_for = p / (1.0 - p);
    let plus_in = m_plus as f64 / (within + odds_against * between);
    let minus_in = m_minus as f64 / (within + odds_for * between);
    Ok(ExpectedEdgeCounts {
        plus_in,
        plus_out: odds_against * plus_in,
        minus_in,
        minus_out: odds_for * minus_in,
    })
}

pub fn compute_prior_rates(
    assignment: &Assignment,
    config: &PriorConfig,
    m_plus: u64,
    m_minus: u64,
) -> Result<PriorRates> {
    prior_rates_for_sizes(&assignment.counts(), config, m_plus, m_minus)
}

pub(crate) fn prior_rates_for_sizes(
    sizes: &[usize],
    config: &PriorConfig,
    m_plus: u64,
    m_minus: u64,
) -> Result<PriorRates> {
    contract(config.enabled, || "prior rates requested with priors disabled".into())?;
    if m_plus + m_minus == 0 {
        return Err(Error::InvalidInput("priors need at least one annotation".into()));
    }
    let expected = expected_edge_counts(sizes, config.expert_accuracy, m_plus, m_minus)?;
    Ok(PriorRates::from_expected(&expected))
}
