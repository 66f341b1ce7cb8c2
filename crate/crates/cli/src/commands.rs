use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use ssclust::datagen::{generate_annotations, generate_mixture, ExpertSpec, GroundTruth, MixtureSpec};
use ssclust::metrics::{centroid_index, kl_mixtures_matched, nmi, SphericalMixture};
use ssclust::rng::derive_seed;
use ssclust::{run as solve, AnnotationGraphs, Dataset, PriorConfig, RunOutcome, Solution, SolverConfig};

use crate::error::{CliError, CliResult};
use crate::io::{self, Params};
use crate::{BenchmarkArgs, ClusterArgs, EvaluateArgs, GenerateArgs, SearchArgs};

const CLUSTER_REPETITIONS: usize = 50;
const BENCHMARK_REPETITIONS: usize = 10;

fn write_stdout(stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let spec = MixtureSpec::new(args.n, args.d, args.k, derive_seed(args.seed, &[0]));
    let (dataset, truth) = generate_mixture(&spec)?;
    let expert = ExpertSpec {
        accuracy: args.p,
        n_annotations: args.m.unwrap_or(args.n),
        seed: derive_seed(args.seed, &[1]),
    };
    let graphs = generate_annotations(&truth, &expert)?;
    let params = Params {
        means: truth.means.clone(),
        variances: truth.variances.clone(),
        n_features: truth.n_features,
    };
    io::write_atomic(
        &io::with_suffix(&args.out, "features.csv"),
        &io::format_features(&dataset),
    )?;
    io::write_atomic(
        &io::with_suffix(&args.out, "labels.txt"),
        &io::format_labels(&truth.labels),
    )?;
    io::write_atomic(
        &io::with_suffix(&args.out, "annotations.txt"),
        &io::format_annotations(&graphs),
    )?;
    io::write_atomic(&io::with_suffix(&args.out, "params.csv"), &io::format_params(&params))?;
    Ok(())
}

fn solver_config(search: &SearchArgs, k: usize, default_reps: usize, prior: PriorConfig) -> SolverConfig {
    SolverConfig {
        pi1: search.pi1,
        pi2: search.pi2,
        max_iterations: search.iters,
        repetitions: search.reps.unwrap_or(default_reps),
        seed: search.seed,
        prior,
        ..SolverConfig::new(k)
    }
}

/// Prior configuration for an expert of accuracy `p`; priors need at least
/// one annotation and are switched off otherwise.
fn prior_config(p: Option<f64>, graphs: &AnnotationGraphs) -> CliResult<(PriorConfig, bool)> {
    match p {
        None => Ok((PriorConfig::disabled(), false)),
        Some(_) if graphs.is_empty() => Ok((PriorConfig::disabled(), true)),
        Some(p) => Ok((PriorConfig::with_accuracy(p)?, false)),
    }
}

/// External quality of one fitted solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quality {
    pub nmi: Option<f64>,
    pub kl: Option<f64>,
    pub ci: Option<usize>,
}

fn fitted_params(solution: &Solution) -> Params {
    let g = solution.gaussians();
    Params {
        means: g.means.clone(),
        variances: g.variances.clone(),
        n_features: g.n_features,
    }
}

/// `KL(predicted ‖ true)` and the centroid index between two parameter sets.
pub fn compare_params(pred: &Params, truth: &Params) -> CliResult<(f64, usize)> {
    if pred.n_features != truth.n_features || pred.variances.len() != truth.variances.len() {
        return Err(CliError::Input(format!(
            "parameter shapes differ: {}x{} vs {}x{}",
            pred.variances.len(),
            pred.n_features,
            truth.variances.len(),
            truth.n_features
        )));
    }
    let mixture = |p: &Params| SphericalMixture::uniform(p.means.clone(), p.variances.clone(), p.n_features);
    let kl = kl_mixtures_matched(&mixture(pred), &mixture(truth))?;
    let ci = centroid_index(&pred.means, &truth.means, pred.n_features)?;
    Ok((kl, ci))
}

fn quality(solution: &Solution, labels: Option<&[usize]>, params: Option<&Params>) -> CliResult<Quality> {
    let nmi = labels.map(|l| nmi(solution.labels(), l)).transpose()?;
    let (kl, ci) = match params {
        Some(p) => {
            let (kl, ci) = compare_params(&fitted_params(solution), p)?;
            (Some(kl), Some(ci))
        }
        None => (None, None),
    };
    Ok(Quality { nmi, kl, ci })
}

fn opt_field<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn milliseconds(elapsed: std::time::Duration, no_timing: bool) -> u128 {
    if no_timing {
        0
    } else {
        elapsed.as_millis()
    }
}

pub fn cluster(args: &ClusterArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let dataset = io::read_features(&args.data)?;
    let n = dataset.n_samples();
    let graphs = match &args.annotations {
        Some(path) => io::read_annotations(path, n)?,
        None => AnnotationGraphs::empty(n),
    };
    let truth = args.truth.as_deref().map(io::read_labels).transpose()?;
    if let Some(labels) = &truth {
        if labels.len() != n {
            return Err(CliError::Input(format!(
                "{} truth labels for {n} samples",
                labels.len()
            )));
        }
    }
    let true_params = args.true_params.as_deref().map(io::read_params).transpose()?;
    if args.k == 0 || args.k > n {
        return Err(CliError::Input(format!(
            "cannot form {} clusters from {n} samples",
            args.k
        )));
    }
    let (prior, forced_off) = prior_config(args.priors, &graphs)?;
    if forced_off {
        eprintln!("warning: no annotations, priors disabled");
    }
    let config = solver_config(&args.search, args.k, CLUSTER_REPETITIONS, prior);
    let outcome = solve(&dataset, &graphs, &config)?;

    let mut report = String::from("repetition,objective,nmi,kl,ci,ms\n");
    for rep in &outcome.repetitions {
        let q = quality(&rep.best, truth.as_deref(), true_params.as_ref())?;
        let ms = milliseconds(rep.elapsed, args.search.no_timing);
        writeln!(
            report,
            "{},{},{},{},{},{ms}",
            rep.repetition,
            rep.best.objective(),
            opt_field(q.nmi),
            opt_field(q.kl),
            opt_field(q.ci)
        )
        .unwrap();
    }
    let best = &outcome.best;
    let q = quality(best, truth.as_deref(), true_params.as_ref())?;
    let total_ms: u128 = outcome
        .repetitions
        .iter()
        .map(|r| milliseconds(r.elapsed, args.search.no_timing))
        .sum();
    writeln!(
        report,
        "best,{},{},{},{},{total_ms}",
        best.objective(),
        opt_field(q.nmi),
        opt_field(q.kl),
        opt_field(q.ci)
    )
    .unwrap();

    io::write_atomic(
        &io::with_suffix(&args.out, "assign.txt"),
        &io::format_labels(best.labels()),
    )?;
    io::write_atomic(
        &io::with_suffix(&args.out, "params.csv"),
        &io::format_params(&fitted_params(best)),
    )?;
    io::write_atomic(&io::with_suffix(&args.out, "report.csv"), &report)?;
    write_stdout(stdout, &format!("objective={}\n", best.objective()))
}

pub fn evaluate(args: &EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pred = io::read_labels(&args.pred)?;
    let truth = io::read_labels(&args.truth)?;
    if pred.len() != truth.len() {
        return Err(CliError::Input(format!(
            "{} predicted labels but {} true labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(CliError::Input("label files are empty".into()));
    }
    let mut out = format!("nmi={:.6}\n", nmi(&pred, &truth)?);
    if let (Some(p), Some(t)) = (&args.pred_params, &args.true_params) {
        let (kl, ci) = compare_params(&io::read_params(p)?, &io::read_params(t)?)?;
        writeln!(out, "kl={kl:.6}\nci={ci}").unwrap();
    }
    write_stdout(stdout, &out)
}

/// One benchmark cell: a dataset, an expert accuracy and an annotation budget.
#[derive(Debug, Clone, Copy)]
struct Cell {
    dataset_id: usize,
    p_index: usize,
    m_index: usize,
    p: f64,
    m: usize,
}

/// One output row of the benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub dataset_id: usize,
    pub p: f64,
    pub m: usize,
    pub priors: bool,
    pub nmi: f64,
    pub kl: f64,
    pub ci: usize,
    pub objective: f64,
    pub ms: u128,
}

impl BenchmarkRow {
    pub const HEADER: &'static str = "dataset_id,p,m,priors,nmi,kl,ci,objective,ms";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dataset_id,
            self.p,
            self.m,
            u8::from(self.priors),
            self.nmi,
            self.kl,
            self.ci,
            self.objective,
            self.ms
        )
    }
}

struct BenchDataset {
    dataset: Dataset,
    truth: GroundTruth,
    params: Params,
}

fn bench_rows(args: &BenchmarkArgs, cell: Cell, data: &BenchDataset) -> CliResult<Vec<BenchmarkRow>> {
    let seed = args.search.seed;
    let expert = ExpertSpec {
        accuracy: cell.p,
        n_annotations: cell.m,
        seed: derive_seed(
            seed,
            &[cell.dataset_id as u64, 1, cell.p_index as u64, cell.m_index as u64],
        ),
    };
    let graphs = generate_annotations(&data.truth, &expert)?;
    let mut search = args.search.clone();
    search.seed = derive_seed(seed, &[cell.dataset_id as u64, 2]);

    let solve_variant = |priors: bool| -> CliResult<(RunOutcome, u128)> {
        let (prior, _) = prior_config(priors.then_some(cell.p), &graphs)?;
        let config = solver_config(&search, args.k, BENCHMARK_REPETITIONS, prior);
        let start = Instant::now();
        let outcome = solve(&data.dataset, &graphs, &config)?;
        Ok((outcome, milliseconds(start.elapsed(), args.search.no_timing)))
    };
    let row = |priors: bool, (outcome, ms): &(RunOutcome, u128)| -> CliResult<BenchmarkRow> {
        let q = quality(&outcome.best, Some(&data.truth.labels), Some(&data.params))?;
        Ok(BenchmarkRow {
            dataset_id: cell.dataset_id,
            p: cell.p,
            m: cell.m,
            priors,
            nmi: q.nmi.unwrap_or_default(),
            kl: q.kl.unwrap_or_default(),
            ci: q.ci.unwrap_or_default(),
            objective: outcome.best.objective(),
            ms: *ms,
        })
    };

    let plain = solve_variant(false)?;
    // without annotations the prior model is the plain model
    let with_priors = if graphs.is_empty() {
        None
    } else {
        Some(solve_variant(true)?)
    };
    Ok(vec![
        row(false, &plain)?,
        row(true, with_priors.as_ref().unwrap_or(&plain))?,
    ])
}

/// All benchmark rows, ordered by dataset, accuracy, budget and variant.
pub fn benchmark_rows(args: &BenchmarkArgs) -> CliResult<Vec<BenchmarkRow>> {
    if args.datasets == 0 {
        return Err(CliError::Input("at least one dataset is required".into()));
    }
    if let Some(p) = args.p_list.0.iter().find(|p| **p > 1.0) {
        return Err(CliError::Input(format!("expert accuracy {p} is not in [0, 1]")));
    }
    let datasets = (0..args.datasets)
        .into_par_iter()
        .map(|id| -> CliResult<BenchDataset> {
            let spec = MixtureSpec::new(args.n, args.d, args.k, derive_seed(args.search.seed, &[id as u64, 0]));
            let (dataset, truth) = generate_mixture(&spec)?;
            let params = Params {
                means: truth.means.clone(),
                variances: truth.variances.clone(),
                n_features: truth.n_features,
            };
            Ok(BenchDataset { dataset, truth, params })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut cells = Vec::new();
    for dataset_id in 0..args.datasets {
        for (p_index, &p) in args.p_list.0.iter().enumerate() {
            for (m_index, &mult) in args.m_list.0.iter().enumerate() {
                let m = (mult * args.n as f64).round() as usize;
                cells.push(Cell {
                    dataset_id,
                    p_index,
                    m_index,
                    p,
                    m,
                });
            }
        }
    }
    let rows = cells
        .par_iter()
        .map(|&cell| bench_rows(args, cell, &datasets[cell.dataset_id]))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn benchmark(args: &BenchmarkArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let rows = benchmark_rows(args)?;
    let mut csv = String::from(BenchmarkRow::HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    match &args.out {
        Some(path) => io::write_atomic(path, &csv),
        None => write_stdout(stdout, &csv),
    }
}

/// Reads `THREADS` and sizes the global worker pool accordingly.
pub fn configure_threads(value: Option<&str>) -> CliResult<()> {
    let Some(value) = value else { return Ok(()) };
    let threads = value
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure {threads} threads: {e}")))
}
