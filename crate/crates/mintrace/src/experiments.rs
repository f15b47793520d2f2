//! Experiment orchestration: seeded replications, parallel execution, and
//! byte-stable CSV/JSON emission.
//!
//! Every replication owns one explicit random stream seeded
//! `base_seed + replication_index`, and all stochastic draws flow from it in
//! a fixed order: edge indicators, edge weights, the variance half-width,
//! the variances, then (where applicable) the data matrix and the random
//! initial ordering. Replications run in parallel and are reduced in index
//! order, so identical configurations produce byte-identical outputs for any
//! worker count.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{self, CensusAggregate, CensusReport};
use crate::cholesky;
use crate::model::{edge_difference, generate_model, sample_data, sigma_from_sem};
use crate::perm::{NeighborhoodKind, Ordering};
use crate::search::{hill_climb_sample, ScoreConfig};
use crate::{tol, Error, Result};

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "MINTRACE_WORKERS";

// ---------------------------------------------------------------------------
// Census (local-optima counts per neighborhood)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CensusParams {
    pub p: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub kinds: Vec<NeighborhoodKind>,
    pub include_global: bool,
    pub trace_tol: f64,
}

impl CensusParams {
    pub fn new(p: usize) -> Self {
        CensusParams {
            p,
            reps: 10_000,
            base_seed: 1,
            kinds: NeighborhoodKind::ALL.to_vec(),
            include_global: false,
            trace_tol: tol::TRACE_REL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRun {
    pub reports: Vec<CensusReport>,
    pub aggregate: CensusAggregate,
}

pub fn run_census(params: &CensusParams) -> Result<CensusRun> {
    let (reports, aggregate) = census::census_experiment(
        params.p,
        params.reps,
        params.base_seed,
        &params.kinds,
        params.include_global,
        params.trace_tol,
    )?;
    Ok(CensusRun { reports, aggregate })
}

/// Per-replication census rows:
/// `replication,kind,strict,weak,global_min_trace,n_global_optima`.
pub fn census_csv(run: &CensusRun) -> String {
    let mut out = String::from("replication,kind,strict,weak,global_min_trace,n_global_optima\n");
    for report in &run.reports {
        for (kind, counts) in &report.counts {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                report.replication,
                kind,
                counts.strict,
                counts.weak,
                report.global_min_trace,
                report.n_global_optima
            ));
        }
    }
    out
}

pub fn write_census_run(run: &CensusRun, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("census.csv");
    std::fs::write(&csv_path, census_csv(run))?;
    let json_path = dir.join("census_summary.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&run.aggregate)? + "\n")?;
    Ok(vec![csv_path, json_path])
}

// ---------------------------------------------------------------------------
// Complexity (finite-sample climbs across p)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityParams {
    pub p_values: Vec<usize>,
    pub n: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub kinds: Vec<NeighborhoodKind>,
    pub score: ScoreConfig,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        ComplexityParams {
            p_values: vec![5, 10, 20, 50, 100],
            n: 1000,
            reps: 50,
            base_seed: 1,
            kinds: vec![NeighborhoodKind::R2r],
            score: ScoreConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityRecord {
    pub p: usize,
    pub kind: NeighborhoodKind,
    pub replication: usize,
    pub seed: u64,
    pub edge_difference: usize,
    pub iterations: usize,
}

/// One row of the aggregate table: recovery error and iteration statistics
/// at a fixed `(p, kind)`.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexityCell {
    pub p: usize,
    pub kind: NeighborhoodKind,
    pub edge_diff_mean: f64,
    pub edge_diff_se: f64,
    pub iter_mean: f64,
    pub iter_se: f64,
    pub iter_max: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexitySummary {
    pub n: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub kinds: Vec<NeighborhoodKind>,
    pub cells: Vec<ComplexityCell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityRun {
    pub records: Vec<ComplexityRecord>,
    pub summary: ComplexitySummary,
}

/// One replication of the finite-sample study: generate a model, sample `n`
/// rows, climb from a uniformly random initial ordering, record the edge
/// difference against the true graph and the number of accepted moves.
fn complexity_replication(
    p: usize,
    n: usize,
    replication: usize,
    seed: u64,
    kind: NeighborhoodKind,
    score: &ScoreConfig,
) -> Result<ComplexityRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sem = generate_model(p, &mut rng)?;
    let cov = sigma_from_sem(&sem)?;
    let data = sample_data(&cov, n, &mut rng)?;
    let init = Ordering::random(p, &mut rng);
    let (estimate, trace) = hill_climb_sample(&data, &init, kind, score)?;
    Ok(ComplexityRecord {
        p,
        kind,
        replication,
        seed,
        edge_difference: edge_difference(&estimate, sem.dag())?,
        iterations: trace.iterations,
    })
}

pub fn run_complexity(params: &ComplexityParams) -> Result<ComplexityRun> {
    if params.reps == 0 {
        return Err(Error::Parameter("reps must be at least 1".into()));
    }
    if params.p_values.is_empty() {
        return Err(Error::Parameter("at least one p value is required".into()));
    }
    if params.kinds.is_empty() {
        return Err(Error::Parameter("at least one neighborhood kind is required".into()));
    }
    let mut records = Vec::new();
    for &p in &params.p_values {
        for &kind in &params.kinds {
            let block: Result<Vec<ComplexityRecord>> = (0..params.reps)
                .into_par_iter()
                .map(|r| {
                    complexity_replication(
                        p,
                        params.n,
                        r,
                        params.base_seed + r as u64,
                        kind,
                        &params.score,
                    )
                })
                .collect();
            records.extend(block?);
        }
    }
    let mut cells = Vec::new();
    for &p in &params.p_values {
        for &kind in &params.kinds {
            let rows: Vec<&ComplexityRecord> =
                records.iter().filter(|rec| rec.p == p && rec.kind == kind).collect();
            let diffs: Vec<f64> = rows.iter().map(|rec| rec.edge_difference as f64).collect();
            let iters: Vec<f64> = rows.iter().map(|rec| rec.iterations as f64).collect();
            let (edge_diff_mean, edge_diff_se) = census::mean_and_se(&diffs);
            let (iter_mean, iter_se) = census::mean_and_se(&iters);
            let iter_max = rows.iter().map(|rec| rec.iterations).max().unwrap_or(0);
            cells.push(ComplexityCell {
                p,
                kind,
                edge_diff_mean,
                edge_diff_se,
                iter_mean,
                iter_se,
                iter_max,
            });
        }
    }
    let summary = ComplexitySummary {
        n: params.n,
        reps: params.reps,
        base_seed: params.base_seed,
        kinds: params.kinds.clone(),
        cells,
    };
    Ok(ComplexityRun { records, summary })
}

/// Per-replication rows: `p,kind,replication,seed,edge_difference,iterations`.
pub fn complexity_csv(run: &ComplexityRun) -> String {
    let mut out = String::from("p,kind,replication,seed,edge_difference,iterations\n");
    for rec in &run.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.p, rec.kind, rec.replication, rec.seed, rec.edge_difference, rec.iterations
        ));
    }
    out
}

pub fn write_complexity_run(run: &ComplexityRun, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("complexity.csv");
    std::fs::write(&csv_path, complexity_csv(run))?;
    let json_path = dir.join("complexity_summary.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&run.summary)? + "\n")?;
    Ok(vec![csv_path, json_path])
}

// ---------------------------------------------------------------------------
// Check (identifiability conditions and their conclusion)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CheckParams {
    pub p: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub trace_tol: f64,
}

impl CheckParams {
    pub fn new(p: usize) -> Self {
        CheckParams { p, reps: 100, base_seed: 1, trace_tol: tol::TRACE_REL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub replication: usize,
    pub seed: u64,
    pub weakly_increasing: bool,
    pub condition5: bool,
    /// Strict R2R local optima among orderings inconsistent with the true
    /// graph; `None` when `p` is beyond the exhaustive guard.
    pub strict_r2r_outside_true: Option<u64>,
}

/// Fractions passing each condition, and whether the no-strict-local-optima
/// conclusion held, split by condition status.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub p: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub weakly_increasing_count: usize,
    pub condition5_pass_count: usize,
    /// Whether the exhaustive verification ran (requires `p ≤ 7`).
    pub exhaustive_verified: bool,
    /// Condition-passing models with zero strict R2R local optima.
    pub passers_conclusion_held: usize,
    /// Condition-violating models where the conclusion held anyway.
    pub violators_conclusion_held: usize,
    /// Models with at least one strict R2R local optimum off the true class.
    pub models_with_strict_optima: usize,
    pub records: Vec<CheckRecord>,
}

/// Largest `p` for which the check verifies the conclusion exhaustively.
pub const CHECK_EXHAUSTIVE_GUARD: usize = 7;

pub fn run_check(params: &CheckParams) -> Result<CheckReport> {
    if params.reps == 0 {
        return Err(Error::Parameter("reps must be at least 1".into()));
    }
    let exhaustive = params.p <= CHECK_EXHAUSTIVE_GUARD;
    let records: Result<Vec<CheckRecord>> = (0..params.reps)
        .into_par_iter()
        .map(|r| {
            let seed = params.base_seed + r as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sem = generate_model(params.p, &mut rng)?;
            let cov = sigma_from_sem(&sem)?;
            let iota = Ordering::identity(params.p);
            let weakly_increasing = cholesky::check_weakly_increasing(&sem, &iota);
            let condition5 = cholesky::check_condition5(&cov, &iota)?;
            let strict = if exhaustive {
                let table = census::enumerate_traces(&cov)?;
                Some(census::count_strict_optima_outside(
                    &table,
                    NeighborhoodKind::R2r,
                    sem.dag(),
                    params.trace_tol,
                ))
            } else {
                None
            };
            Ok(CheckRecord {
                replication: r,
                seed,
                weakly_increasing,
                condition5,
                strict_r2r_outside_true: strict,
            })
        })
        .collect();
    let records = records?;
    let weakly_increasing_count = records.iter().filter(|r| r.weakly_increasing).count();
    let condition5_pass_count = records.iter().filter(|r| r.condition5).count();
    let held = |r: &&CheckRecord| r.strict_r2r_outside_true == Some(0);
    let passers_conclusion_held = records.iter().filter(|r| r.condition5).filter(held).count();
    let violators_conclusion_held =
        records.iter().filter(|r| !r.condition5).filter(held).count();
    let models_with_strict_optima = records
        .iter()
        .filter(|r| matches!(r.strict_r2r_outside_true, Some(k) if k > 0))
        .count();
    Ok(CheckReport {
        p: params.p,
        reps: params.reps,
        base_seed: params.base_seed,
        weakly_increasing_count,
        condition5_pass_count,
        exhaustive_verified: exhaustive,
        passers_conclusion_held,
        violators_conclusion_held,
        models_with_strict_optima,
        records,
    })
}

pub fn write_check_report(report: &CheckReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("check_report.json");
    std::fs::write(&path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(vec![path])
}

// ---------------------------------------------------------------------------
// Single-run reports (climb, decompose)
// ---------------------------------------------------------------------------

/// Output of a single hill climb, ready for JSON emission.
#[derive(Clone, Debug, Serialize)]
pub struct ClimbReport {
    /// `"population"` (exact covariance) or `"sample"` (finite data).
    pub mode: String,
    pub kind: NeighborhoodKind,
    pub trace: crate::search::HillClimbTrace,
    /// Estimated edges, 1-based pairs.
    pub edges: Vec<[usize; 2]>,
    pub final_objective: f64,
    /// Against the true graph, when the model was generated.
    pub edge_difference: Option<usize>,
}

/// Output of a single decomposition, ready for JSON emission.
#[derive(Clone, Debug, Serialize)]
pub struct DecomposeReport {
    pub ordering: Ordering,
    /// Weight matrix rows.
    pub b: Vec<Vec<f64>>,
    pub omega: Vec<f64>,
    pub trace: f64,
}

impl DecomposeReport {
    pub fn from_decomposition(dec: &cholesky::Decomposition) -> Self {
        let p = dec.b.nrows();
        DecomposeReport {
            ordering: dec.ordering.clone(),
            b: (0..p)
                .map(|i| (0..p).map(|j| dec.b[(i, j)]).collect())
                .collect(),
            omega: dec.omega.iter().copied().collect(),
            trace: dec.trace,
        }
    }
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// Flat JSON config mirroring the command-line flags; any flag given on the
/// command line wins over the file. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub command: Option<String>,
    /// One or more node counts (`8` and `[5, 10]` both parse).
    #[serde(deserialize_with = "one_or_many")]
    pub p: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub kinds: Option<Vec<NeighborhoodKind>>,
    pub din: Option<usize>,
    pub c0: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub exhaustive_map: Option<bool>,
    pub include_global: Option<bool>,
    pub trace_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub model: Option<PathBuf>,
    pub sigma_csv: Option<PathBuf>,
    pub order: Option<String>,
    pub init: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Score overrides applied to the defaults.
    pub fn score_config(&self) -> ScoreConfig {
        let mut cfg = ScoreConfig::default();
        if let Some(c0) = self.c0 {
            cfg.c0 = c0;
        }
        if let Some(alpha) = self.alpha {
            cfg.alpha = alpha;
        }
        if let Some(gamma) = self.gamma {
            cfg.gamma = gamma;
        }
        if let Some(kappa) = self.kappa {
            cfg.kappa = kappa;
        }
        cfg.d_in = self.din.or(cfg.d_in);
        cfg.exhaustive_map = self.exhaustive_map.unwrap_or(cfg.exhaustive_map);
        cfg
    }
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Option<Vec<usize>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match Option::<OneOrMany>::deserialize(d)? {
        None => None,
        Some(OneOrMany::One(v)) => Some(vec![v]),
        Some(OneOrMany::Many(v)) => Some(v),
    })
}
