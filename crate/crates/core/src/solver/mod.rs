//! Hybrid genetic search over hard assignments.
//!
//! Each repetition keeps a population of locally optimal solutions. Every
//! iteration recombines two random members, mutates the child, improves it with
//! the two-phase local search and inserts it; when the population reaches
//! `pi2` members only the `pi1` best survive. Repetitions are independent and
//! may run in parallel on the current rayon pool; results do not depend on
//! scheduling.

mod local_search;
mod operators;

use std::time::{Duration, Instant};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;

pub use local_search::{
    fit_annotated, fit_annotated_observed, fit_unannotated, kmeans_unannotated, partition_samples, MAX_KMEANS_ROUNDS,
};
pub use operators::{
    assign_to_centers, crossover, mutate_assignment, mutate_centers, mutation, nearest_center, repair_empty_clusters,
};

use crate::data::{AnnotationGraphs, Dataset};
use crate::error::{Error, Result};
use crate::model::PriorConfig;
use crate::objective::Solution;
use crate::rng::{stream, StreamRng};

/// Safety cap on rounds of the two-phase local search.
pub const MAX_LOCAL_SEARCH_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n_clusters: usize,
    /// Population size kept after survivor selection.
    pub pi1: usize,
    /// Population size that triggers survivor selection.
    pub pi2: usize,
    pub max_iterations: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub prior: PriorConfig,
    pub improvement_tolerance: f64,
    /// Run repetitions on the rayon pool.
    pub parallel: bool,
}

impl SolverConfig {
    pub fn new(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            pi1: 10,
            pi2: 20,
            max_iterations: 500,
            repetitions: 50,
            seed: 0,
            prior: PriorConfig::disabled(),
            improvement_tolerance: 1e-9,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_clusters == 0 {
            return bad("number of clusters must be positive".into());
        }
        if self.pi1 == 0 || self.pi1 >= self.pi2 {
            return bad(format!(
                "population sizes need 1 <= pi1 < pi2 (got {}, {})",
                self.pi1, self.pi2
            ));
        }
        if self.repetitions == 0 {
            return bad("at least one repetition is required".into());
        }
        if self.improvement_tolerance.is_nan() || self.improvement_tolerance < 0.0 {
            return bad("improvement tolerance must be non-negative".into());
        }
        Ok(())
    }
}

/// Multiset of candidate solutions of one repetition.
#[derive(Debug, Clone, Default)]
pub struct Population {
    solutions: Vec<Solution>,
}

impl Population {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn insert(&mut self, solution: Solution) {
        self.solutions.push(solution);
    }

    /// Keeps the `keep` members with the largest objectives; ties favour
    /// earlier insertions.
    pub fn select_survivors(&mut self, keep: usize) {
        self.solutions.sort_by(|a, b| b.objective().total_cmp(&a.objective()));
        self.solutions.truncate(keep);
    }

    /// Best member; ties go to the earliest.
    pub fn best(&self) -> Option<&Solution> {
        self.solutions
            .iter()
            .reduce(|best, s| if s.objective() > best.objective() { s } else { best })
    }
}

/// Read-only inputs shared by every step of a repetition.
struct SearchContext<'a> {
    dataset: &'a Dataset,
    graphs: &'a AnnotationGraphs,
    config: &'a SolverConfig,
    annotated: Vec<usize>,
    unannotated: Vec<usize>,
}

impl<'a> SearchContext<'a> {
    fn new(dataset: &'a Dataset, graphs: &'a AnnotationGraphs, config: &'a SolverConfig) -> Result<Self> {
        config.validate()?;
        if graphs.n_samples() != dataset.n_samples() {
            return Err(Error::InvalidInput(format!(
                "annotations cover {} samples but dataset has {}",
                graphs.n_samples(),
                dataset.n_samples()
            )));
        }
        if config.n_clusters > dataset.n_samples() {
            return Err(Error::InvalidInput(format!(
                "{} clusters requested for {} samples",
                config.n_clusters,
                dataset.n_samples()
            )));
        }
        let (annotated, unannotated) = partition_samples(graphs);
        Ok(Self {
            dataset,
            graphs,
            config,
            annotated,
            unannotated,
        })
    }

    /// Alternates annotated relocations and K-means on the unannotated
    /// samples until a full round leaves the assignment unchanged.
    fn improve(&self, mut solution: Solution, rng: &mut StreamRng) -> Result<Solution> {
        for _ in 0..MAX_LOCAL_SEARCH_ROUNDS {
            let before = solution.labels().to_vec();
            solution = fit_annotated(
                self.dataset,
                self.graphs,
                solution,
                &self.annotated,
                self.config.improvement_tolerance,
                rng,
            )?;
            solution = fit_unannotated(self.dataset, self.graphs, solution, &self.unannotated)?;
            if solution.labels() == before.as_slice() {
                break;
            }
        }
        Ok(solution)
    }

    fn random_start(&self, rng: &mut StreamRng) -> Result<Solution> {
        let d = self.dataset.n_features();
        let picks = sample_indices(rng, self.dataset.n_samples(), self.config.n_clusters);
        let mut centers = Vec::with_capacity(self.config.n_clusters * d);
        for i in picks.iter() {
            centers.extend_from_slice(self.dataset.row(i));
        }
        let assignment = assign_to_centers(self.dataset, &centers)?;
        let solution = Solution::new(self.dataset, self.graphs, assignment, self.config.prior)?;
        let solution = fit_unannotated(self.dataset, self.graphs, solution, &self.unannotated)?;
        self.improve(solution, rng)
    }

    fn offspring(&self, population: &Population, rng: &mut StreamRng) -> Result<Solution> {
        let n = population.len();
        let (a, b) = if n >= 2 {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        } else {
            (0, 0)
        };
        let members = population.solutions();
        let child = crossover(self.dataset, &members[a], &members[b], rng)?;
        let child = mutate_assignment(self.dataset, &child, rng)?;
        let solution = Solution::new(self.dataset, self.graphs, child, self.config.prior)?;
        self.improve(solution, rng)
    }

    fn insert(&self, population: &mut Population, solution: Solution) -> Result<()> {
        if cfg!(debug_assertions) {
            solution.assignment().check_non_empty()?;
            solution.check_consistency(self.dataset, self.graphs)?;
        }
        population.insert(solution);
        Ok(())
    }
}

/// Initial population of `pi1` locally optimal solutions grown from random
/// sample centers.
pub fn initialize_population(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    config: &SolverConfig,
    rng: &mut StreamRng,
) -> Result<Population> {
    let ctx = SearchContext::new(dataset, graphs, config)?;
    init_population(&ctx, rng)
}

fn init_population(ctx: &SearchContext<'_>, rng: &mut StreamRng) -> Result<Population> {
    let mut population = Population::new();
    for _ in 0..ctx.config.pi1 {
        let solution = ctx.random_start(rng)?;
        ctx.insert(&mut population, solution)?;
    }
    Ok(population)
}

/// Result of one independent repetition.
#[derive(Debug, Clone)]
pub struct RepetitionOutcome {
    pub repetition: usize,
    pub best: Solution,
    /// Incumbent objective after initialization and after every iteration.
    pub incumbent_trace: Vec<f64>,
    pub final_population: Vec<f64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best: Solution,
    pub best_repetition: usize,
    pub repetitions: Vec<RepetitionOutcome>,
}

/// One repetition seeded with `seed + repetition`.
pub fn run_repetition(
    dataset: &Dataset,
    graphs: &AnnotationGraphs,
    config: &SolverConfig,
    repetition: usize,
) -> Result<RepetitionOutcome> {
    let ctx = SearchContext::new(dataset, graphs, config)?;
    repetition_with(&ctx, repetition)
}

fn repetition_with(ctx: &SearchContext<'_>, repetition: usize) -> Result<RepetitionOutcome> {
    let start = Instant::now();
    let mut rng = stream(ctx.config.seed, repetition as u64);
    let mut population = init_population(ctx, &mut rng)?;
    let mut best = population.best().expect("pi1 >= 1").clone();
    let mut trace = Vec::with_capacity(ctx.config.max_iterations + 1);
    trace.push(best.objective());
    for _ in 0..ctx.config.max_iterations {
        let child = ctx.offspring(&population, &mut rng)?;
        if child.objective() > best.objective() {
            best = child.clone();
        }
        ctx.insert(&mut population, child)?;
        if population.len() >= ctx.config.pi2 {
            population.select_survivors(ctx.config.pi1);
        }
        trace.push(best.objective());
    }
    Ok(RepetitionOutcome {
        repetition,
        best,
        incumbent_trace: trace,
        final_population: population.solutions().iter().map(Solution::objective).collect(),
        elapsed: start.elapsed(),
    })
}

/// Runs every repetition and returns the overall best solution (ties go to
/// the lowest repetition index).
pub fn run(dataset: &Dataset, graphs: &AnnotationGraphs, config: &SolverConfig) -> Result<RunOutcome> {
    let ctx = SearchContext::new(dataset, graphs, config)?;
    let outcomes: Vec<RepetitionOutcome> = if config.parallel {
        (0..config.repetitions)
            .into_par_iter()
            .map(|rep| repetition_with(&ctx, rep))
            .collect::<Result<_>>()?
    } else {
        (0..config.repetitions)
            .map(|rep| repetition_with(&ctx, rep))
            .collect::<Result<_>>()?
    };
    let best_repetition = outcomes
        .iter()
        .enumerate()
        .reduce(|best, cur| {
            if cur.1.best.objective() > best.1.best.objective() {
                cur
            } else {
                best
            }
        })
        .map(|(i, _)| i)
        .expect("at least one repetition");
    Ok(RunOutcome {
        best: outcomes[best_repetition].best.clone(),
        best_repetition,
        repetitions: outcomes,
    })
}
