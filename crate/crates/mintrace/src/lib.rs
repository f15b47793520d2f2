//! Minimum-trace DAG learning for Gaussian linear structural equation models.
//!
//! A Gaussian linear SEM with weighted adjacency matrix `B` and diagonal error
//! variances `Ω` induces the covariance `Σ(B, Ω) = (I − Bᵀ)⁻¹ Ω (I − B)⁻¹`.
//! For every ordering σ of the variables there is a unique pair `(B_σ, Ω_σ)`
//! reproducing a given covariance, and when the true error variances are
//! weakly increasing along the causal ordering, the true DAG is the unique
//! minimizer of `tr(Ω_σ)`. This crate provides:
//!
//! - [`model`]: DAGs, SEMs, covariance construction, random model generation,
//!   and multivariate-normal sampling;
//! - [`cholesky`]: the per-ordering decomposition `(B_σ, Ω_σ)`, the trace
//!   objective, and checkable side conditions (weakly increasing variances,
//!   the conditional-variance dominance condition, the trace-gap diagnostic);
//! - [`perm`]: orderings, cycle composition, and the ADJ / RTS / R2R /
//!   R2R-REV move operators with their neighborhoods;
//! - [`search`]: steepest-ascent hill climbing over orderings, both on a
//!   population covariance (trace objective) and on finite samples (Bayesian
//!   order score with MAP parent selection);
//! - [`census`]: exhaustive classification of strict and weak local optima
//!   over all `p!` orderings per neighborhood;
//! - [`experiments`]: seeded, parallel, byte-reproducible experiment runners
//!   with CSV/JSON emission.
//!
//! Start with the runnable examples (`cargo run --example population_climb`,
//! `cargo run --example local_optima_census`, ...) or the `mintrace` binary.

pub mod census;
pub mod cholesky;
pub mod experiments;
pub mod io;
pub mod model;
pub mod perm;
pub mod search;

/// Numeric tolerances used across the crate.
///
/// None of these are dictated by the underlying mathematics (ties that are
/// exact in real arithmetic become near-ties in floats); they are collected
/// here so every comparison site uses one documented constant.
pub mod tol {
    /// Absolute tolerance for covariance symmetry checks.
    pub const SYMMETRY_ABS: f64 = 1e-12;
    /// Positive-definiteness floor on Cholesky pivots (squared diagonal,
    /// i.e. conditional-variance scale).
    pub const PD_FLOOR: f64 = 1e-10;
    /// Relative tolerance for trace equality/comparison (tie detection).
    pub const TRACE_REL: f64 = 1e-9;
    /// Relative tolerance for covariance reconstruction checks.
    pub const RECONSTRUCTION_REL: f64 = 1e-9;
    /// Absolute tolerance for the log-determinant identity.
    pub const LOGDET_ABS: f64 = 1e-8;
    /// Allowed slack on majorization partial sums.
    pub const MAJORIZATION_SLACK: f64 = 1e-9;
    /// Absolute tolerance for conditional-variance dominance checks.
    pub const CONDITION5_ABS: f64 = 1e-12;
    /// Entries of a decomposed weight matrix below this magnitude are
    /// treated as structural zeros when extracting an edge set.
    pub const EDGE_ZERO: f64 = 1e-8;
    /// Minimum relative improvement for a population hill-climb move.
    pub const MOVE_REL: f64 = 1e-12;

    /// `a ≤ b` up to relative tolerance `rel`.
    pub fn approx_le(a: f64, b: f64, rel: f64) -> bool {
        a <= b + rel * a.abs().max(b.abs())
    }

    /// `a < b` by more than relative tolerance `rel`.
    pub fn strictly_less(a: f64, b: f64, rel: f64) -> bool {
        a < b - rel * a.abs().max(b.abs())
    }

    /// `|a − b|` within relative tolerance `rel` (absolute for tiny values).
    pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }
}

/// Errors produced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A model object violated a structural invariant (cyclic support,
    /// nonpositive variance, asymmetric covariance, ...).
    #[error("invalid model: {0}")]
    Model(String),
    /// A factorization or inversion fell below the positive-definiteness
    /// floor, or an internal numeric audit failed.
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),
    /// A combinatorial guard was exceeded (exhaustive enumeration requested
    /// for a problem too large to enumerate).
    #[error("size guard exceeded: {0}")]
    Size(String),
    /// A regression design was rank deficient or otherwise too
    /// ill-conditioned to score.
    #[error("ill-conditioned design: {0}")]
    Conditioning(String),
    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
