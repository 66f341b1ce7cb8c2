//! Observed inputs: feature matrix, annotation graphs and hard assignments.

use std::collections::BTreeMap;

use crate::error::{contract, Error, Result};

/// Relative variance floor applied to every fitted cluster variance.
pub const VARIANCE_FLOOR_FACTOR: f64 = 1e-8;

/// N samples of D real features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_samples: usize,
    n_features: usize,
    column_means: Vec<f64>,
    variance_floor: f64,
    // ln n for n in 0..=N + 1 (entry 0 unused)
    ln_counts: Vec<f64>,
}

impl Dataset {
    pub fn new(n_samples: usize, n_features: usize, values: Vec<f64>) -> Result<Self> {
        if n_samples == 0 || n_features == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset needs at least one sample and one feature (got {n_samples}x{n_features})"
            )));
        }
        if values.len() != n_samples * n_features {
            return Err(Error::InvalidInput(format!(
                "expected {} values for a {n_samples}x{n_features} dataset, got {}",
                n_samples * n_features,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite feature at sample {}, feature {}",
                pos / n_features,
                pos % n_features
            )));
        }

        let mut column_means = vec![0.0; n_features];
        for row in values.chunks_exact(n_features) {
            for (m, v) in column_means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut column_means {
            *m /= n_samples as f64;
        }
        let mut scatter = 0.0;
        for row in values.chunks_exact(n_features) {
            scatter += squared_distance(row, &column_means);
        }
        let global_variance = scatter / (n_samples * n_features) as f64;
        let variance_floor = (VARIANCE_FLOOR_FACTOR * global_variance).max(f64::MIN_POSITIVE);

        let ln_counts = (0..=n_samples + 1)
            .map(|n| if n == 0 { 0.0 } else { (n as f64).ln() })
            .collect();

        Ok(Self {
            values,
            n_samples,
            n_features,
            column_means,
            variance_floor,
            ln_counts,
        })
    }

    /// Builds a dataset from per-sample rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_features = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_features {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} features, expected {n_features}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), n_features, values)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_features)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    /// Mean per-feature population variance, scaled by [`VARIANCE_FLOOR_FACTOR`].
    pub fn variance_floor(&self) -> f64 {
        self.variance_floor
    }

    /// `ln n` for a cluster size `n ≥ 1`.
    pub(crate) fn ln_count(&self, n: usize) -> f64 {
        match self.ln_counts.get(n) {
            Some(&v) => v,
            None => (n as f64).ln(),
        }
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Kind of a pairwise annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    MustLink,
    CannotLink,
}

/// One stored undirected edge with multiplicity; always `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub count: u32,
}

/// Must-link and cannot-link multigraphs over the samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationGraphs {
    n_samples: usize,
    must_edges: Vec<Edge>,
    cannot_edges: Vec<Edge>,
    m_plus: u64,
    m_minus: u64,
    // neighbour lists, indexed by sample: (other endpoint, count)
    must_adj: Vec<Vec<(usize, u32)>>,
    cannot_adj: Vec<Vec<(usize, u32)>>,
    // v ln v for every possible block pair count v
    xlnx: Vec<f64>,
}

const MAX_XLNX_TABLE: u64 = 1 << 20;

fn xlnx(v: u64) -> f64 {
    if v == 0 {
        0.0
    } else {
        v as f64 * (v as f64).ln()
    }
}

impl AnnotationGraphs {
    /// Graphs without any annotation.
    pub fn empty(n_samples: usize) -> Self {
        Self {
            n_samples,
            must_adj: vec![Vec::new(); n_samples],
            cannot_adj: vec![Vec::new(); n_samples],
            xlnx: vec![0.0],
            ..Self::default()
        }
    }

    /// Builds the graphs from individual annotations. Repeated pairs accumulate
    /// counts and `(i, j)` is the same annotation as `(j, i)`.
    pub fn from_annotations<I>(n_samples: usize, annotations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, LinkKind)>,
    {
        let mut must: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut cannot: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (a, b, kind) in annotations {
            if a >= n_samples || b >= n_samples {
                return Err(Error::InvalidInput(format!(
                    "annotation ({a}, {b}) references a sample outside 0..{n_samples}"
                )));
            }
            if a == b {
                return Err(Error::InvalidInput(format!(
                    "self-annotation on sample {a} is not allowed"
                )));
            }
            let key = (a.min(b), a.max(b));
            let map = match kind {
                LinkKind::MustLink => &mut must,
                LinkKind::CannotLink => &mut cannot,
            };
            *map.entry(key).or_insert(0) += 1;
        }
        let to_edges = |map: BTreeMap<(usize, usize), u32>| {
            map.into_iter()
                .map(|((i, j), count)| Edge { i, j, count })
                .collect::<Vec<_>>()
        };
        Self::from_edges(n_samples, to_edges(must), to_edges(cannot))
    }

    /// Builds the graphs from already-aggregated edge lists.
    pub fn from_edges(n_samples: usize, must: Vec<Edge>, cannot: Vec<Edge>) -> Result<Self> {
        let must_edges = normalize_edges(n_samples, must)?;
        let cannot_edges = normalize_edges(n_samples, cannot)?;
        let m_plus: u64 = must_edges.iter().map(|e| u64::from(e.count)).sum();
        let m_minus: u64 = cannot_edges.iter().map(|e| u64::from(e.count)).sum();
        let must_adj = adjacency(n_samples, &must_edges);
        let cannot_adj = adjacency(n_samples, &cannot_edges);
        let xlnx = (0..=(2 * m_plus.max(m_minus)).min(MAX_XLNX_TABLE)).map(xlnx).collect();
        Ok(Self {
            n_samples,
            must_edges,
            cannot_edges,
            m_plus,
            m_minus,
            must_adj,
            cannot_adj,
            xlnx,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// `v ln v` with `0 ln 0 = 0`.
    pub(crate) fn xlnx(&self, v: u64) -> f64 {
        match self.xlnx.get(v as usize) {
            Some(&t) => t,
            None => xlnx(v),
        }
    }

    pub fn edges(&self, kind: LinkKind) -> &[Edge] {
        match kind {
            LinkKind::MustLink => &self.must_edges,
            LinkKind::CannotLink => &self.cannot_edges,
        }
    }

    pub fn must_edges(&self) -> &[Edge] {
        &self.must_edges
    }

    pub fn cannot_edges(&self) -> &[Edge] {
        &self.cannot_edges
    }

    pub fn neighbors(&self, kind: LinkKind, sample: usize) -> &[(usize, u32)] {
        match kind {
            LinkKind::MustLink => &self.must_adj[sample],
            LinkKind::CannotLink => &self.cannot_adj[sample],
        }
    }

    /// Total must-link annotation count (with multiplicity).
    pub fn m_plus(&self) -> u64 {
        self.m_plus
    }

    /// Total cannot-link annotation count (with multiplicity).
    pub fn m_minus(&self) -> u64 {
        self.m_minus
    }

    pub fn n_annotations(&self) -> u64 {
        self.m_plus + self.m_minus
    }

    pub fn is_empty(&self) -> bool {
        self.n_annotations() == 0
    }

    /// Samples touched by at least one annotation, in increasing order.
    pub fn annotated_samples(&self) -> Vec<usize> {
        (0..self.n_samples)
            .filter(|&i| !self.must_adj[i].is_empty() || !self.cannot_adj[i].is_empty())
            .collect()
    }

    /// Individual annotations, expanded by multiplicity, must-links first.
    pub fn annotations(&self) -> impl Iterator<Item = (usize, usize, LinkKind)> + '_ {
        fn expand(edges: &[Edge], kind: LinkKind) -> impl Iterator<Item = (usize, usize, LinkKind)> + '_ {
            edges
                .iter()
                .flat_map(move |e| std::iter::repeat_n((e.i, e.j, kind), e.count as usize))
        }
        expand(&self.must_edges, LinkKind::MustLink).chain(expand(&self.cannot_edges, LinkKind::CannotLink))
    }
}

fn normalize_edges(n_samples: usize, edges: Vec<Edge>) -> Result<Vec<Edge>> {
    let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for e in edges {
        if e.i >= n_samples || e.j >= n_samples {
            return Err(Error::InvalidInput(format!(
                "edge ({}, {}) references a sample outside 0..{n_samples}",
                e.i, e.j
            )));
        }
        if e.i == e.j {
            return Err(Error::InvalidInput(format!(
                "self-annotation on sample {} is not allowed",
                e.i
            )));
        }
        if e.count == 0 {
            continue;
        }
        *merged.entry((e.i.min(e.j), e.i.max(e.j))).or_insert(0) += e.count;
    }
    Ok(merged.into_iter().map(|((i, j), count)| Edge { i, j, count }).collect())
}

fn adjacency(n_samples: usize, edges: &[Edge]) -> Vec<Vec<(usize, u32)>> {
    let mut adj = vec![Vec::new(); n_samples];
    for e in edges {
        adj[e.i].push((e.j, e.count));
        adj[e.j].push((e.i, e.count));
    }
    adj
}

/// Hard membership of every sample in one of K clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if n_clusters == 0 {
            return Err(Error::InvalidInput("number of clusters must be positive".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= n_clusters) {
            return Err(Error::InvalidInput(format!(
                "sample {i} has label {l}, outside 0..{n_clusters}"
            )));
        }
        Ok(Self { labels, n_clusters })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_clusters];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Fails with [`Error::EmptyCluster`] on the first cluster without members.
    pub fn check_non_empty(&self) -> Result<()> {
        match self.counts().iter().position(|&c| c == 0) {
            Some(cluster) => Err(Error::EmptyCluster { cluster }),
            None => Ok(()),
        }
    }

    pub(crate) fn set(&mut self, i: usize, cluster: usize) {
        self.labels[i] = cluster;
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }
}

pub(crate) fn check_sizes(dataset: &Dataset, assignment: &Assignment) -> Result<()> {
    contract(dataset.n_samples() == assignment.n_samples(), || {
        format!(
            "assignment covers {} samples but dataset has {}",
            assignment.n_samples(),
            dataset.n_samples()
        )
    })
}
