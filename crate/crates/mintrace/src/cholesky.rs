//! The per-ordering decomposition of a covariance matrix.
//!
//! For a positive definite Σ and an ordering σ there is a unique pair
//! `(B_σ, Ω_σ)` with `B_σ` consistent with σ and
//! `Σ = (I − B_σᵀ)⁻¹ Ω_σ (I − B_σ)⁻¹`. The diagonal entry `ω_j^σ` is the
//! conditional variance of `X_j` given its predecessors under σ, and
//! `tr(Ω_σ)` is the objective minimized by the ordering search. This module
//! also provides the checkable side conditions: weakly increasing error
//! variances, the conditional-variance dominance condition that rules out
//! strict local optima for the R2R neighborhood, and the trace-gap
//! diagnostic.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::model::{Covariance, Dag, LinearSem};
use crate::perm::{self, Ordering};
use crate::{tol, Error, Result};

/// The unique pair `(B_σ, Ω_σ)` for a covariance and an ordering, plus the
/// trace of `Ω_σ`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Weight matrix consistent with the ordering: `b[i][j] ≠ 0` only if
    /// `i` precedes `j` under σ.
    pub b: DMatrix<f64>,
    /// Conditional error variances `ω_j^σ`, indexed by node.
    pub omega: DVector<f64>,
    /// `tr(Ω_σ) = Σ_j ω_j^σ`, the search objective.
    pub trace: f64,
    /// The ordering this decomposition belongs to.
    pub ordering: Ordering,
}

impl Decomposition {
    /// Edge set supported by `b`, treating magnitudes at or below `zero_tol`
    /// as structural zeros (exact ties in real arithmetic leave round-off
    /// residue in the non-edge entries).
    pub fn dag(&self, zero_tol: f64) -> Result<Dag> {
        Dag::from_support(&self.b, zero_tol)
    }

    /// Rebuilds `Σ(B_σ, Ω_σ)`; used by reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let p = self.b.nrows();
        let m = DMatrix::identity(p, p) - &self.b;
        let inv = m.try_inverse().expect("I - B is unit triangular up to permutation");
        inv.transpose() * DMatrix::from_diagonal(&self.omega) * inv
    }
}

fn permuted(cov: &Covariance, sigma: &Ordering) -> DMatrix<f64> {
    let p = cov.p();
    let s = sigma.as_slice();
    DMatrix::from_fn(p, p, |k, l| cov.matrix()[(s[k], s[l])])
}

fn lower_cholesky(perm_sigma: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = perm_sigma.nrows();
    let chol = nalgebra::Cholesky::new(perm_sigma)
        .ok_or_else(|| Error::Degeneracy("permuted covariance is not positive definite".into()))?;
    let l = chol.unpack();
    for k in 0..p {
        let pivot = l[(k, k)] * l[(k, k)];
        if !pivot.is_finite() || pivot <= tol::PD_FLOOR {
            return Err(Error::Degeneracy(format!(
                "Cholesky pivot {pivot:.3e} below floor {:.1e}",
                tol::PD_FLOOR
            )));
        }
    }
    Ok(l)
}

/// Computes the unique `(B_σ, Ω_σ)` via one Cholesky factorization of the
/// σ-permuted covariance: with `P = L Lᵀ` and `L = L̃ D^{1/2}`, the variance
/// at position `k` is `L[k][k]²` and `B = I − L̃⁻ᵀ` in permuted coordinates.
/// Equivalently, `ω_{σ(k)}^σ = Var(X_{σ(k)} | X_{σ(1)}, …, X_{σ(k−1)})`.
pub fn decompose(cov: &Covariance, sigma: &Ordering) -> Result<Decomposition> {
    let p = cov.p();
    if sigma.p() != p {
        return Err(Error::Parameter(format!(
            "ordering length {} does not match p = {p}",
            sigma.p()
        )));
    }
    let l = lower_cholesky(permuted(cov, sigma))?;
    let s = sigma.as_slice();

    let mut omega = DVector::zeros(p);
    for k in 0..p {
        omega[s[k]] = l[(k, k)] * l[(k, k)];
    }

    // Column-wise inversion of the unit lower factor L̃ = L D^{-1/2}.
    let mut m = DMatrix::<f64>::identity(p, p);
    for j in 0..p {
        for i in (j + 1)..p {
            let mut acc = 0.0;
            for k in j..i {
                acc += l[(i, k)] / l[(k, k)] * m[(k, j)];
            }
            m[(i, j)] = -acc;
        }
    }
    // B = I − Mᵀ in permuted coordinates, i.e. strictly upper with
    // B[m][k] = −M[k][m]; scatter back to node indices.
    let mut b = DMatrix::zeros(p, p);
    for k in 0..p {
        for mm in 0..k {
            b[(s[mm], s[k])] = -m[(k, mm)];
        }
    }
    let trace = omega.iter().sum();
    Ok(Decomposition { b, omega, trace, ordering: sigma.clone() })
}

/// `tr(Ω_σ)` without materializing `B_σ`; maximizing its negation is the
/// ordering-search objective.
pub fn trace_objective(cov: &Covariance, sigma: &Ordering) -> Result<f64> {
    if sigma.p() != cov.p() {
        return Err(Error::Parameter(format!(
            "ordering length {} does not match p = {}",
            sigma.p(),
            cov.p()
        )));
    }
    let l = lower_cholesky(permuted(cov, sigma))?;
    Ok((0..cov.p()).map(|k| l[(k, k)] * l[(k, k)]).sum())
}

/// True iff the SEM's error variances satisfy
/// `omega[σ*(1)] ≤ omega[σ*(2)] ≤ … ≤ omega[σ*(p)]` (non-strict, no
/// tolerance). Meaningful when `sigma_star` is a causal ordering for the
/// SEM's graph, in which case these are the conditional error variances
/// under σ*.
pub fn check_weakly_increasing(sem: &LinearSem, sigma_star: &Ordering) -> bool {
    assert_eq!(sem.p(), sigma_star.p(), "ordering length mismatch");
    let s = sigma_star.as_slice();
    (1..s.len()).all(|k| sem.omega()[s[k - 1]] <= sem.omega()[s[k]])
}

/// Checks the conditional-variance dominance condition: for all `i < j`,
///
/// `Var(X_{σ*(i)} | X_{σ*(1)}, …, X_{σ*(i−1)})
///   ≤ Var(X_{σ*(j)} | all other variables)`,
///
/// within [`tol::CONDITION5_ABS`]. The left sides are the Cholesky pivots of
/// the σ*-permuted covariance; the right sides are the reciprocal diagonal
/// of the precision matrix.
pub fn check_condition5(cov: &Covariance, sigma_star: &Ordering) -> Result<bool> {
    let p = cov.p();
    if sigma_star.p() != p {
        return Err(Error::Parameter(format!(
            "ordering length {} does not match p = {p}",
            sigma_star.p()
        )));
    }
    let l = lower_cholesky(permuted(cov, sigma_star))?;
    let lhs: Vec<f64> = (0..p).map(|k| l[(k, k)] * l[(k, k)]).collect();
    let precision = nalgebra::Cholesky::new(cov.matrix().clone())
        .ok_or_else(|| Error::Degeneracy("covariance factorization failed".into()))?
        .inverse();
    let s = sigma_star.as_slice();
    let rhs: Vec<f64> = (0..p).map(|k| 1.0 / precision[(s[k], s[k])]).collect();
    for (i, &low) in lhs.iter().enumerate() {
        for &high in &rhs[i + 1..] {
            if low > high + tol::CONDITION5_ABS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The trace-gap diagnostic: how much worse the best ordering outside the
/// true class is, relative to the true trace.
#[derive(Clone, Debug, Serialize)]
pub struct GapDiagnostic {
    /// `min_{σ ∉ [σ*]} tr(Ω_σ)`; `+∞` when every ordering is in `[σ*]`.
    #[serde(serialize_with = "crate::io::serialize_f64_or_null")]
    pub min_offtrue_trace: f64,
    /// `tr(Ω_σ)` at the supplied true orderings.
    pub true_trace: f64,
    /// `min_offtrue_trace / true_trace`; at least 1 under weakly increasing
    /// error variances, `+∞` when the off-true set is empty.
    #[serde(serialize_with = "crate::io::serialize_f64_or_null")]
    pub ratio: f64,
    /// `ratio − 1`, a lower bound for the gap constant ξ.
    #[serde(serialize_with = "crate::io::serialize_f64_or_null")]
    pub xi_lower_bound: f64,
}

/// Guard for the exhaustive sweep in [`gap_diagnostic`].
pub const GAP_ENUMERATION_GUARD: usize = 10;

/// Evaluates `tr(Ω_σ)` for every σ ∈ S^p and reports the minimum outside
/// `true_orderings` against the trace inside it. Exhaustive, so guarded at
/// `p ≤ 10`.
pub fn gap_diagnostic(cov: &Covariance, true_orderings: &[Ordering]) -> Result<GapDiagnostic> {
    let p = cov.p();
    if p > GAP_ENUMERATION_GUARD {
        return Err(Error::Size(format!(
            "gap diagnostic requires p <= {GAP_ENUMERATION_GUARD}, got {p}"
        )));
    }
    if true_orderings.is_empty() {
        return Err(Error::Parameter("at least one true ordering is required".into()));
    }
    let mut members = std::collections::HashSet::new();
    for sigma in true_orderings {
        if sigma.p() != p {
            return Err(Error::Parameter("true ordering length mismatch".into()));
        }
        members.insert(sigma.as_slice().to_vec());
    }
    let mut true_trace = f64::INFINITY;
    for sigma in true_orderings {
        true_trace = true_trace.min(trace_objective(cov, sigma)?);
    }
    let mut min_off = f64::INFINITY;
    let mut failure: Option<Error> = None;
    perm::for_each_permutation(p, |_, perm| {
        if failure.is_some() || members.contains(perm) {
            return;
        }
        let sigma = Ordering::new(perm.to_vec()).expect("enumerated permutation");
        match trace_objective(cov, &sigma) {
            Ok(t) => min_off = min_off.min(t),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let ratio = if min_off.is_finite() { min_off / true_trace } else { f64::INFINITY };
    Ok(GapDiagnostic {
        min_offtrue_trace: min_off,
        true_trace,
        ratio,
        xi_lower_bound: ratio - 1.0,
    })
}
