//! Exhaustive census of strict and weak local optima over all `p!` orderings.
//!
//! An ordering σ is a strict local optimum under a neighborhood when
//! `tr(Ω_σ) < tr(Ω_σ')` for every neighbor σ', and a weak local optimum when
//! `tr(Ω_σ) ≤ tr(Ω_σ')` for every neighbor. Global optima satisfy the weak
//! definition trivially (and the strict one whenever they are unique), so by
//! default both counts exclude orderings whose trace ties the global minimum;
//! set `include_global` to count them too.
//!
//! Traces for the full sweep come from a table of conditional variances
//! `Var(X_v | X_S)` over all subsets `S`, so each of the `p!` orderings costs
//! `p` lookups instead of a fresh factorization. A spot audit re-verifies a
//! sample of counted optima against independently computed Cholesky traces.

use rayon::prelude::*;
use serde::Serialize;

use crate::cholesky;
use crate::model::{generate_model, sigma_from_sem, Covariance};
use crate::perm::{neighborhood, NeighborhoodKind, Ordering};
use crate::{tol, Error, Result};

/// Hard guard for the exhaustive sweep; `10! ≈ 3.6M` traces.
pub const CENSUS_GUARD: usize = 10;

/// `tr(Ω_σ)` memoized for every σ ∈ S^p, indexed by lexicographic rank.
pub struct TraceTable {
    p: usize,
    traces: Vec<f64>,
    /// `cond_var[mask * p + v]` = `Var(X_v | X_S)` for the subset `S` encoded
    /// by `mask` (only meaningful for `v ∉ S`).
    cond_var: Vec<f64>,
    global_min: f64,
}

impl TraceTable {
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of table entries, `p!`.
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Memoized trace of σ by rank lookup.
    pub fn get(&self, sigma: &Ordering) -> f64 {
        self.traces[sigma.lexicographic_rank() as usize]
    }

    /// All memoized traces in rank order.
    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    /// Smallest trace over all orderings.
    pub fn global_min(&self) -> f64 {
        self.global_min
    }

    /// Trace of a raw permutation via the conditional-variance table
    /// (identical arithmetic to the memoized entries).
    pub fn trace_of(&self, perm: &[usize]) -> f64 {
        let mut mask = 0usize;
        let mut sum = 0.0;
        for &v in perm {
            sum += self.cond_var[mask * self.p + v];
            mask |= 1 << v;
        }
        sum
    }

    /// True iff `trace` ties the global minimum within [`tol::TRACE_REL`].
    pub fn is_global(&self, trace: f64) -> bool {
        !tol::strictly_less(self.global_min, trace, tol::TRACE_REL)
    }

    /// Number of orderings whose trace ties the global minimum.
    pub fn count_global_optima(&self) -> u64 {
        self.traces.iter().filter(|&&t| self.is_global(t)).count() as u64
    }
}

/// Builds the trace table for every σ ∈ S^p (guarded at `p ≤ 10`). The
/// conditional-variance table is filled first (one Cholesky per subset),
/// then the `p!` prefix sums are accumulated in parallel chunks split by the
/// leading node; output is identical for any worker count.
pub fn enumerate_traces(cov: &Covariance) -> Result<TraceTable> {
    let p = cov.p();
    if p > CENSUS_GUARD {
        return Err(Error::Size(format!(
            "exhaustive census requires p <= {CENSUS_GUARD}, got {p}"
        )));
    }
    let cond_var = conditional_variance_table(cov)?;
    let total: usize = (1..=p).product();
    let chunk_len = total / p;
    let mut traces = vec![0.0f64; total];
    let chunks: Vec<(usize, &mut [f64])> = traces.chunks_mut(chunk_len).enumerate().collect();
    chunks.into_par_iter().for_each(|(first, chunk)| {
        let mut out = chunk.iter_mut();
        let mut used = vec![false; p];
        used[first] = true;
        let base = cond_var[first];
        fill_suffix(p, &cond_var, &mut used, 1 << first, base, 1, &mut out);
        debug_assert!(out.next().is_none());
    });
    let global_min = traces.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TraceTable { p, traces, cond_var, global_min })
}

fn fill_suffix<'a>(
    p: usize,
    cond_var: &[f64],
    used: &mut Vec<bool>,
    mask: usize,
    partial: f64,
    depth: usize,
    out: &mut std::slice::IterMut<'a, f64>,
) {
    if depth == p {
        *out.next().expect("chunk sized to its subtree") = partial;
        return;
    }
    for v in 0..p {
        if !used[v] {
            used[v] = true;
            fill_suffix(
                p,
                cond_var,
                used,
                mask | 1 << v,
                partial + cond_var[mask * p + v],
                depth + 1,
                out,
            );
            used[v] = false;
        }
    }
}

/// `Var(X_v | X_S)` for every subset `S ⊆ [p]` and node `v ∉ S`, via one
/// Cholesky factorization of `Σ_SS` per subset.
fn conditional_variance_table(cov: &Covariance) -> Result<Vec<f64>> {
    let p = cov.p();
    let sigma = cov.matrix();
    let mut table = vec![0.0f64; (1 << p) * p];
    for mask in 0usize..(1 << p) {
        let subset: Vec<usize> = (0..p).filter(|&v| mask >> v & 1 == 1).collect();
        if subset.is_empty() {
            for v in 0..p {
                table[v] = sigma[(v, v)];
            }
            continue;
        }
        let d = subset.len();
        if d == p {
            continue;
        }
        let sub = nalgebra::DMatrix::from_fn(d, d, |r, c| sigma[(subset[r], subset[c])]);
        let chol = nalgebra::Cholesky::new(sub).ok_or_else(|| {
            Error::Degeneracy("principal submatrix is not positive definite".into())
        })?;
        let l = chol.l();
        for v in 0..p {
            if mask >> v & 1 == 1 {
                continue;
            }
            let rhs = nalgebra::DVector::from_fn(d, |r, _| sigma[(subset[r], v)]);
            let y = l
                .solve_lower_triangular(&rhs)
                .ok_or_else(|| Error::Degeneracy("triangular solve failed".into()))?;
            table[mask * p + v] = sigma[(v, v)] - y.norm_squared();
        }
    }
    Ok(table)
}

/// Strict and weak local-optimum counts for one neighborhood.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KindCounts {
    pub strict: u64,
    pub weak: u64,
}

/// Classifies every ordering against one neighborhood. Counts exclude global
/// optima unless `include_global`; `tol_rel` separates genuine ties from
/// round-off in the trace comparisons.
pub fn classify_local_optima(
    table: &TraceTable,
    kind: NeighborhoodKind,
    tol_rel: f64,
    include_global: bool,
) -> KindCounts {
    let (counts, _) = classify_kinds(table, &[kind], tol_rel, include_global, 0);
    counts[0]
}

/// A counted optimum retained for the audit: its rank and whether it was
/// counted strict.
type AuditEntry = (NeighborhoodKind, u64, bool);

/// Shared sweep over S^p for several neighborhoods at once. The `p − 1`
/// adjacent swaps belong to all four neighborhoods, so an ordering beaten by
/// an adjacent swap is classified out of every kind after those lookups.
/// Every `audit_stride`-th counted weak optimum per kind, and every counted
/// strict optimum, is recorded for re-verification; 0 disables collection.
fn classify_kinds(
    table: &TraceTable,
    kinds: &[NeighborhoodKind],
    tol_rel: f64,
    include_global: bool,
    audit_stride: u64,
) -> (Vec<KindCounts>, Vec<AuditEntry>) {
    let p = table.p();
    let mut counts = vec![KindCounts::default(); kinds.len()];
    let mut audit = Vec::new();
    let mut buf = vec![0usize; p];
    crate::perm::for_each_permutation(p, |rank, perm| {
        let t = table.traces()[rank as usize];
        if !include_global && table.is_global(t) {
            return;
        }
        // Adjacent swaps belong to every neighborhood: an ordering beaten by
        // one is weak (hence strict) nowhere, so most of S^p exits here.
        let mut adj_weak = true;
        let mut adj_strict = true;
        for i in 0..p - 1 {
            buf.copy_from_slice(perm);
            buf.swap(i, i + 1);
            let tt = table.trace_of(&buf);
            adj_weak &= tol::approx_le(t, tt, tol_rel);
            adj_strict &= tol::strictly_less(t, tt, tol_rel);
            if !adj_weak {
                return;
            }
        }
        for (slot, &kind) in kinds.iter().enumerate() {
            let (mut weak, mut strict) = (adj_weak, adj_strict);
            if kind != NeighborhoodKind::Adj {
                'scan: for i in 1..p {
                    for j in (i + 2)..=p {
                        apply_into(kind, perm, i, j, &mut buf);
                        let tt = table.trace_of(&buf);
                        weak &= tol::approx_le(t, tt, tol_rel);
                        strict &= tol::strictly_less(t, tt, tol_rel);
                        if !weak {
                            break 'scan;
                        }
                    }
                }
            }
            if weak {
                counts[slot].weak += 1;
                if strict {
                    counts[slot].strict += 1;
                }
                if audit_stride > 0 && (strict || counts[slot].weak % audit_stride == 1) {
                    audit.push((kind, rank, strict));
                }
            }
        }
    });
    (counts, audit)
}

/// Applies a move at 1-based positions `(i, j)` into a scratch buffer without
/// allocating.
fn apply_into(kind: NeighborhoodKind, perm: &[usize], i: usize, j: usize, out: &mut [usize]) {
    out.copy_from_slice(perm);
    match kind {
        NeighborhoodKind::Adj => out.swap(i - 1, i),
        NeighborhoodKind::Rts => out.swap(i - 1, j - 1),
        NeighborhoodKind::R2r => {
            let moved = perm[j - 1];
            out[i..j].copy_from_slice(&perm[i - 1..j - 1]);
            out[i - 1] = moved;
        }
        NeighborhoodKind::R2rRev => {
            let moved = perm[i - 1];
            out[i - 1..j - 1].copy_from_slice(&perm[i..j]);
            out[j - 1] = moved;
        }
    }
}

/// Counts strict `kind`-local optima among the orderings NOT consistent with
/// `dag`. Zero under the R2R neighborhood is the no-strict-local-optima
/// conclusion for models satisfying the conditional-variance dominance
/// condition.
pub fn count_strict_optima_outside(
    table: &TraceTable,
    kind: NeighborhoodKind,
    dag: &crate::model::Dag,
    tol_rel: f64,
) -> u64 {
    let p = table.p();
    let mut count = 0u64;
    let mut inv = vec![0usize; p];
    let mut buf = vec![0usize; p];
    crate::perm::for_each_permutation(p, |rank, perm| {
        for (k, &v) in perm.iter().enumerate() {
            inv[v] = k;
        }
        if dag.edges().all(|(i, j)| inv[i] < inv[j]) {
            return;
        }
        let t = table.traces()[rank as usize];
        let mut strict = true;
        'scan: for i in 1..p {
            if kind == NeighborhoodKind::Adj {
                apply_into(kind, perm, i, i + 1, &mut buf);
                strict &= tol::strictly_less(t, table.trace_of(&buf), tol_rel);
                if !strict {
                    break 'scan;
                }
            } else {
                for j in (i + 1)..=p {
                    apply_into(kind, perm, i, j, &mut buf);
                    strict &= tol::strictly_less(t, table.trace_of(&buf), tol_rel);
                    if !strict {
                        break 'scan;
                    }
                }
            }
        }
        if strict {
            count += 1;
        }
    });
    count
}

/// Census of one replication: per-kind counts plus global-optimum metadata.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub replication: usize,
    pub seed: u64,
    pub p: usize,
    pub counts: Vec<(NeighborhoodKind, KindCounts)>,
    pub global_min_trace: f64,
    pub n_global_optima: u64,
}

/// Mean and standard error of one census cell.
#[derive(Clone, Debug, Serialize)]
pub struct CensusCell {
    pub kind: NeighborhoodKind,
    pub strict_mean: f64,
    pub strict_se: f64,
    pub weak_mean: f64,
    pub weak_se: f64,
}

/// Aggregated census over all replications.
#[derive(Clone, Debug, Serialize)]
pub struct CensusAggregate {
    pub p: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub include_global: bool,
    pub cells: Vec<CensusCell>,
}

/// Sample mean and standard error (sample SD over √reps); SE is 0 for a
/// single replication.
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `reps` census replications at node count `p`. Replication `r` draws
/// its model from seed `base_seed + r`; replications run in parallel and the
/// output is independent of the worker count. One in a hundred counted
/// optima per kind is re-verified against Cholesky-computed traces.
pub fn census_experiment(
    p: usize,
    reps: usize,
    base_seed: u64,
    kinds: &[NeighborhoodKind],
    include_global: bool,
    tol_rel: f64,
) -> Result<(Vec<CensusReport>, CensusAggregate)> {
    if reps == 0 {
        return Err(Error::Parameter("reps must be at least 1".into()));
    }
    if kinds.is_empty() {
        return Err(Error::Parameter("at least one neighborhood kind is required".into()));
    }
    let reports: Result<Vec<CensusReport>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let seed = base_seed + r as u64;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let sem = generate_model(p, &mut rng)?;
            let cov = sigma_from_sem(&sem)?;
            let table = enumerate_traces(&cov)?;
            let (counts, audit) = classify_kinds(&table, kinds, tol_rel, include_global, 100);
            audit_optima(&cov, &table, &audit, tol_rel)?;
            Ok(CensusReport {
                replication: r,
                seed,
                p,
                counts: kinds.iter().copied().zip(counts).collect(),
                global_min_trace: table.global_min(),
                n_global_optima: table.count_global_optima(),
            })
        })
        .collect();
    let reports = reports?;
    let cells = kinds
        .iter()
        .enumerate()
        .map(|(slot, &kind)| {
            let strict: Vec<f64> =
                reports.iter().map(|rep| rep.counts[slot].1.strict as f64).collect();
            let weak: Vec<f64> =
                reports.iter().map(|rep| rep.counts[slot].1.weak as f64).collect();
            let (strict_mean, strict_se) = mean_and_se(&strict);
            let (weak_mean, weak_se) = mean_and_se(&weak);
            CensusCell { kind, strict_mean, strict_se, weak_mean, weak_se }
        })
        .collect();
    let aggregate = CensusAggregate { p, reps, base_seed, include_global, cells };
    Ok((reports, aggregate))
}

/// Re-verifies sampled counted optima with the permuted-Cholesky trace route:
/// every neighbor comparison is recomputed from scratch and must reproduce
/// the classification.
fn audit_optima(
    cov: &Covariance,
    table: &TraceTable,
    audit: &[AuditEntry],
    tol_rel: f64,
) -> Result<()> {
    for &(kind, rank, counted_strict) in audit {
        let sigma = Ordering::from_lexicographic_rank(table.p(), rank)?;
        let t = cholesky::trace_objective(cov, &sigma)?;
        let mut weak = true;
        let mut strict = true;
        for (_, tau) in neighborhood(&sigma, kind) {
            let tt = cholesky::trace_objective(cov, &tau)?;
            weak &= tol::approx_le(t, tt, tol_rel);
            strict &= tol::strictly_less(t, tt, tol_rel);
        }
        if !weak || strict != counted_strict {
            return Err(Error::Degeneracy(format!(
                "census audit mismatch at rank {rank} under {kind}: \
                 weak={weak}, strict={strict}, counted_strict={counted_strict}"
            )));
        }
    }
    Ok(())
}
