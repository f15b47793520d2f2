//! DAGs, weighted Gaussian linear SEMs, covariance construction, the random
//! model generator used by the simulation studies, and finite-sample data
//! generation.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand_distr::StandardNormal;

use crate::perm::Ordering;
use crate::{tol, Error, Result};

/// A directed acyclic graph on nodes `0..p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dag {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Dag {
    /// Builds a DAG, rejecting out-of-range nodes, self-loops, duplicate
    /// edges, and cycles (detected by topological sort).
    pub fn new(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Parameter("node count must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= p || j >= p {
                return Err(Error::Parameter(format!(
                    "edge ({i}, {j}) out of range for p = {p}"
                )));
            }
            if i == j {
                return Err(Error::Model(format!("self-loop at node {i}")));
            }
            if !set.insert((i, j)) {
                return Err(Error::Model(format!("duplicate edge ({i}, {j})")));
            }
        }
        let dag = Dag { p, edges: set };
        if dag.topological_order().is_none() {
            return Err(Error::Model("edge set contains a cycle".into()));
        }
        Ok(dag)
    }

    /// Extracts the DAG supported by the nonzero pattern of a weight matrix;
    /// entries with `|b[i][j]| > zero_tol` become edges `i → j`.
    pub fn from_support(b: &DMatrix<f64>, zero_tol: f64) -> Result<Self> {
        let p = b.nrows();
        if b.ncols() != p {
            return Err(Error::Parameter("weight matrix must be square".into()));
        }
        let mut edges = Vec::new();
        for i in 0..p {
            for j in 0..p {
                if b[(i, j)].abs() > zero_tol {
                    edges.push((i, j));
                }
            }
        }
        Dag::new(p, edges)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of edges, `|G|`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Parent set of node `j`, ascending.
    pub fn parents(&self, j: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, t)| t == j)
            .map(|&(s, _)| s)
            .collect()
    }

    /// Kahn topological order, or `None` if the edge set is cyclic.
    fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.p];
        for &(_, j) in &self.edges {
            indeg[j] += 1;
        }
        let mut queue: Vec<usize> = (0..self.p).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.p);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &(s, t) in &self.edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push(t);
                    }
                }
            }
        }
        (order.len() == self.p).then_some(order)
    }

    /// True iff σ is a causal ordering for this graph: no edge `i → j` places
    /// `j` before `i`.
    pub fn is_consistent_with(&self, sigma: &Ordering) -> bool {
        if sigma.p() != self.p {
            return false;
        }
        let inv = sigma.inverse_positions();
        self.edges.iter().all(|&(i, j)| inv[i] < inv[j])
    }
}

/// Cardinality of the symmetric difference of two directed edge sets.
pub fn edge_difference(g1: &Dag, g2: &Dag) -> Result<usize> {
    if g1.p() != g2.p() {
        return Err(Error::Parameter(format!(
            "node counts differ: {} vs {}",
            g1.p(),
            g2.p()
        )));
    }
    Ok(g1.edges.symmetric_difference(&g2.edges).count())
}

/// Guard for exhaustive enumeration over all `p!` orderings.
pub const ENUMERATION_GUARD: usize = 10;

/// All orderings consistent with `g`, in lexicographic order. Exhaustive, so
/// guarded at `p ≤ 10`; for a single membership test use
/// [`Dag::is_consistent_with`]. Never empty (every DAG has a topological
/// order).
pub fn consistent_orderings(g: &Dag) -> Result<Vec<Ordering>> {
    let p = g.p();
    if p > ENUMERATION_GUARD {
        return Err(Error::Size(format!(
            "consistent-ordering enumeration requires p <= {ENUMERATION_GUARD}, got {p}"
        )));
    }
    let parents: Vec<Vec<usize>> = (0..p).map(|j| g.parents(j)).collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(p);
    let mut placed = vec![false; p];
    fn rec(
        p: usize,
        parents: &[Vec<usize>],
        placed: &mut Vec<bool>,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Ordering>,
    ) {
        if prefix.len() == p {
            out.push(Ordering::new(prefix.clone()).expect("prefix is a permutation"));
            return;
        }
        for v in 0..p {
            if !placed[v] && parents[v].iter().all(|&u| placed[u]) {
                placed[v] = true;
                prefix.push(v);
                rec(p, parents, placed, prefix, out);
                prefix.pop();
                placed[v] = false;
            }
        }
    }
    rec(p, &parents, &mut placed, &mut prefix, &mut out);
    Ok(out)
}

/// A Gaussian linear SEM: weight matrix `B` (edge `i → j` has weight
/// `b[i][j]`) and strictly positive error variances `Ω = diag(omega)`.
#[derive(Clone, Debug)]
pub struct LinearSem {
    b: DMatrix<f64>,
    omega: DVector<f64>,
    dag: Dag,
    weakly_increasing_wrt: Option<Ordering>,
}

impl LinearSem {
    /// Validates acyclic support (exact nonzeros of `b`) and positive
    /// variances.
    pub fn new(b: DMatrix<f64>, omega: DVector<f64>) -> Result<Self> {
        let p = b.nrows();
        if b.ncols() != p || omega.len() != p {
            return Err(Error::Parameter(
                "weight matrix must be square with matching variance length".into(),
            ));
        }
        if omega.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::Model("error variances must be strictly positive".into()));
        }
        let dag = Dag::from_support(&b, 0.0)?;
        Ok(LinearSem { b, omega, dag, weakly_increasing_wrt: None })
    }

    /// Marks this SEM as having weakly increasing error variances with
    /// respect to `sigma_star`, validating the chain
    /// `omega[σ*(1)] ≤ … ≤ omega[σ*(p)]`.
    pub fn flag_weakly_increasing(mut self, sigma_star: Ordering) -> Result<Self> {
        if sigma_star.p() != self.p() {
            return Err(Error::Parameter("ordering length mismatch".into()));
        }
        let s = sigma_star.as_slice();
        for k in 1..s.len() {
            if self.omega[s[k - 1]] > self.omega[s[k]] {
                return Err(Error::Model(format!(
                    "variances not weakly increasing at positions {k}, {}",
                    k + 1
                )));
            }
        }
        self.weakly_increasing_wrt = Some(sigma_star);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// The ordering this SEM was flagged weakly increasing against, if any.
    pub fn weakly_increasing_wrt(&self) -> Option<&Ordering> {
        self.weakly_increasing_wrt.as_ref()
    }
}

/// A validated covariance matrix: symmetric within [`tol::SYMMETRY_ABS`] and
/// positive definite with every Cholesky pivot (conditional variance) above
/// the floor.
#[derive(Clone, Debug)]
pub struct Covariance {
    sigma: DMatrix<f64>,
}

impl Covariance {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        Self::with_floor(sigma, tol::PD_FLOOR)
    }

    pub fn with_floor(sigma: DMatrix<f64>, floor: f64) -> Result<Self> {
        let p = sigma.nrows();
        if sigma.ncols() != p || p == 0 {
            return Err(Error::Parameter("covariance must be square and nonempty".into()));
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > tol::SYMMETRY_ABS {
                    return Err(Error::Model(format!(
                        "asymmetric at ({i}, {j}): {} vs {}",
                        sigma[(i, j)],
                        sigma[(j, i)]
                    )));
                }
            }
        }
        let chol = nalgebra::Cholesky::new(sigma.clone())
            .ok_or_else(|| Error::Degeneracy("covariance is not positive definite".into()))?;
        let l = chol.l();
        for k in 0..p {
            let pivot = l[(k, k)] * l[(k, k)];
            if !pivot.is_finite() || pivot <= floor {
                return Err(Error::Degeneracy(format!(
                    "Cholesky pivot {pivot:.3e} at index {k} below floor {floor:.1e}"
                )));
            }
        }
        Ok(Covariance { sigma })
    }

    pub fn p(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }
}

/// Builds `Σ(B, Ω) = (I − Bᵀ)⁻¹ Ω (I − B)⁻¹` for a valid SEM. The product is
/// symmetrized before validation to absorb the last-ulp asymmetry of the
/// two matrix multiplies.
pub fn sigma_from_sem(sem: &LinearSem) -> Result<Covariance> {
    let p = sem.p();
    let m = DMatrix::identity(p, p) - sem.b();
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Model("I - B is singular".into()))?;
    let omega = DMatrix::from_diagonal(sem.omega());
    let raw = inv.transpose() * omega * &inv;
    let sym = DMatrix::from_fn(p, p, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    Covariance::new(sym)
}

/// An `n × p` data matrix of i.i.d. rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::Parameter("dataset must have at least one row and column".into()));
        }
        Ok(Dataset { x })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> DVector<f64> {
        self.x.column(j).into_owned()
    }
}

/// Draws `n` rows from `MVN_p(0, Σ)` as `x = L z` with `L` the lower Cholesky
/// factor of Σ and `z` standard normal. Draw order: row by row, `p` normals
/// per row.
pub fn sample_data<R: rand::Rng + ?Sized>(
    cov: &Covariance,
    n: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Parameter("sample count must be at least 1".into()));
    }
    let p = cov.p();
    let chol = nalgebra::Cholesky::new(cov.matrix().clone())
        .ok_or_else(|| Error::Degeneracy("covariance factorization failed".into()))?;
    let l = chol.l();
    let mut x = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for r in 0..n {
        for k in 0..p {
            z[k] = rng.sample(StandardNormal);
        }
        let row = &l * &z;
        for k in 0..p {
            x[(r, k)] = row[k];
        }
    }
    Dataset::new(x)
}

/// Generates a random SEM with true ordering ι = (1, …, p):
///
/// 1. each pair `i < j` receives edge `i → j` with probability
///    `min(1, 3/(2p−2))` (one uniform draw per pair, row-major);
/// 2. each present edge gets a weight uniform on `±[0.3, 1)` (one draw,
///    mapped sign-then-magnitude);
/// 3. a half-width `a ~ U[0, 1)` is drawn once;
/// 4. `p` variances are drawn uniform on `[1−a, 1+a)` and sorted ascending,
///    so `omega[j]` is the j-th smallest (weakly increasing along ι).
///
/// The expected edge count is `3p/4` for `p ≥ 3`; at `p = 2` the formula
/// exceeds one and the single candidate edge is always included.
pub fn generate_model<R: rand::Rng + ?Sized>(p: usize, rng: &mut R) -> Result<LinearSem> {
    if p < 2 {
        return Err(Error::Parameter(format!("model generation requires p >= 2, got {p}")));
    }
    let p_edge = (3.0 / (2.0 * p as f64 - 2.0)).min(1.0);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if rng.random::<f64>() < p_edge {
                edges.push((i, j));
            }
        }
    }
    let mut b = DMatrix::zeros(p, p);
    for &(i, j) in &edges {
        let u: f64 = rng.random();
        let w = if u < 0.5 {
            -(0.3 + 0.7 * (2.0 * u))
        } else {
            0.3 + 0.7 * (2.0 * u - 1.0)
        };
        b[(i, j)] = w;
    }
    let a: f64 = rng.random();
    let mut omega: Vec<f64> = (0..p)
        .map(|_| {
            let u: f64 = rng.random();
            (1.0 - a) + 2.0 * a * u
        })
        .collect();
    omega.sort_by(|x, y| x.partial_cmp(y).expect("variances are finite"));
    LinearSem::new(b, DVector::from_vec(omega))?.flag_weakly_increasing(Ordering::identity(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cholesky;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_node_sem() -> LinearSem {
        let mut b = DMatrix::zeros(2, 2);
        b[(0, 1)] = 0.5;
        LinearSem::new(b, DVector::from_vec(vec![1.0, 1.0])).unwrap()
    }

    #[test]
    fn no_edges_leaves_sigma_diagonal() {
        let sem = LinearSem::new(
            DMatrix::zeros(3, 3),
            DVector::from_vec(vec![0.5, 1.0, 2.0]),
        )
        .unwrap();
        let cov = sigma_from_sem(&sem).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.0, 2.0]));
        assert_eq!(cov.matrix(), &expect);
    }

    #[test]
    fn two_node_covariance_by_hand() {
        // (I − Bᵀ)⁻¹ Ω (I − B)⁻¹ expanded by hand for upper-triangular 2×2 B.
        let cov = sigma_from_sem(&two_node_sem()).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.25]);
        assert_relative_eq!(cov.matrix(), &expect, max_relative = 1e-14);
    }

    #[test]
    fn chain_covariance_matches_monte_carlo_oracle() {
        // Simulate the structural equations directly and compare the sample
        // covariance entrywise within 3 standard errors.
        let (b1, b2) = (0.8, -0.6);
        let mut b = DMatrix::zeros(3, 3);
        b[(0, 1)] = b1;
        b[(1, 2)] = b2;
        let omega = DVector::from_vec(vec![1.0, 1.2, 1.5]);
        let sem = LinearSem::new(b, omega.clone()).unwrap();
        let cov = sigma_from_sem(&sem).unwrap();

        let n = 1_000_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sums = DMatrix::zeros(3, 3);
        for _ in 0..n {
            let e0: f64 = rng.sample::<f64, _>(StandardNormal) * omega[0].sqrt();
            let e1: f64 = rng.sample::<f64, _>(StandardNormal) * omega[1].sqrt();
            let e2: f64 = rng.sample::<f64, _>(StandardNormal) * omega[2].sqrt();
            let x0 = e0;
            let x1 = b1 * x0 + e1;
            let x2 = b2 * x1 + e2;
            let x = [x0, x1, x2];
            for i in 0..3 {
                for j in 0..3 {
                    sums[(i, j)] += x[i] * x[j];
                }
            }
        }
        let sample = sums / n as f64;
        for i in 0..3 {
            for j in 0..3 {
                let sij = cov.matrix()[(i, j)];
                let var_est =
                    (cov.matrix()[(i, i)] * cov.matrix()[(j, j)] + sij * sij) / n as f64;
                let se = var_est.sqrt();
                assert!(
                    (sample[(i, j)] - sij).abs() <= 3.0 * se,
                    "entry ({i},{j}): sample {} vs exact {} (3se = {})",
                    sample[(i, j)],
                    sij,
                    3.0 * se
                );
            }
        }
    }

    #[test]
    fn cyclic_support_rejected() {
        let mut b = DMatrix::zeros(2, 2);
        b[(0, 1)] = 0.5;
        b[(1, 0)] = 0.5;
        assert!(matches!(
            LinearSem::new(b, DVector::from_vec(vec![1.0, 1.0])),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn generated_edge_count_averages_three_quarters_p() {
        let p = 8;
        let reps = 4000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut total = 0usize;
        for _ in 0..reps {
            total += generate_model(p, &mut rng).unwrap().dag().edge_count();
        }
        let mean = total as f64 / reps as f64;
        // Binomial(28, 3/14): sd ≈ 2.17, so 4000 reps give se ≈ 0.034.
        assert!((mean - 6.0).abs() < 0.15, "mean edge count {mean}");
    }

    #[test]
    fn p2_always_includes_the_single_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let sem = generate_model(2, &mut rng).unwrap();
            assert_eq!(sem.dag().edge_count(), 1);
            assert!(sem.dag().contains_edge(0, 1));
        }
        assert!(generate_model(1, &mut rng).is_err());
    }

    #[test]
    fn generated_variances_sorted_and_weights_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let sem = generate_model(6, &mut rng).unwrap();
            let om = sem.omega();
            assert!((1..om.len()).all(|k| om[k - 1] <= om[k]));
            assert_eq!(sem.weakly_increasing_wrt(), Some(&Ordering::identity(6)));
            for (i, j) in sem.dag().edges() {
                let w = sem.b()[(i, j)].abs();
                assert!((0.3..1.0).contains(&w), "weight magnitude {w}");
            }
        }
    }

    #[test]
    fn generate_model_is_reproducible_bit_for_bit() {
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate_model(7, &mut rng).unwrap()
        };
        let (a, b) = (run(123), run(123));
        assert_eq!(a.b(), b.b());
        assert_eq!(a.omega(), b.omega());
        assert_ne!(run(123).b(), run(124).b());
    }

    #[test]
    fn decompose_under_identity_recovers_generated_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let sem = generate_model(7, &mut rng).unwrap();
            let cov = sigma_from_sem(&sem).unwrap();
            let dec = cholesky::decompose(&cov, &Ordering::identity(7)).unwrap();
            let scale = sem.b().amax().max(1.0);
            assert!((dec.b.clone() - sem.b()).amax() <= 1e-9 * scale);
            for j in 0..7 {
                assert_relative_eq!(dec.omega[j], sem.omega()[j], max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn sample_covariance_converges_to_identity() {
        let cov = Covariance::new(DMatrix::identity(4, 4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ds = sample_data(&cov, 100_000, &mut rng).unwrap();
        let x = ds.matrix();
        let sample = x.transpose() * x / ds.n() as f64;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (sample[(i, j)] - expect).abs() < 0.05,
                    "entry ({i},{j}) = {}",
                    sample[(i, j)]
                );
            }
        }
    }

    #[test]
    fn empty_sample_rejected_and_sampling_deterministic() {
        let cov = Covariance::new(DMatrix::identity(3, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_data(&cov, 0, &mut rng), Err(Error::Parameter(_))));
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_data(&cov, 50, &mut rng).unwrap()
        };
        assert_eq!(draw(77), draw(77));
    }

    #[test]
    fn edge_difference_examples() {
        let g = |edges: &[(usize, usize)]| Dag::new(3, edges.iter().copied()).unwrap();
        assert_eq!(edge_difference(&g(&[(0, 1)]), &g(&[(0, 1)])).unwrap(), 0);
        assert_eq!(edge_difference(&g(&[(0, 1)]), &g(&[(1, 0)])).unwrap(), 2);
        assert_eq!(edge_difference(&g(&[(0, 1), (0, 2)]), &g(&[(0, 1)])).unwrap(), 1);
        let g4 = Dag::new(4, [(0, 1)]).unwrap();
        assert!(edge_difference(&g(&[]), &g4).is_err());
    }

    #[test]
    fn consistent_ordering_examples() {
        let empty = Dag::new(3, []).unwrap();
        assert_eq!(consistent_orderings(&empty).unwrap().len(), 6);

        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let got = consistent_orderings(&chain).unwrap();
        assert_eq!(got, vec![Ordering::identity(3)]);

        let single = Dag::new(3, [(0, 2)]).unwrap();
        let got = consistent_orderings(&single).unwrap();
        assert_eq!(got.len(), 3);
        for sigma in &got {
            let inv = sigma.inverse_positions();
            assert!(inv[0] < inv[2]);
        }

        let big = Dag::new(11, []).unwrap();
        assert!(matches!(consistent_orderings(&big), Err(Error::Size(_))));
    }

    #[test]
    fn covariance_validation() {
        let mut asym = DMatrix::identity(2, 2);
        asym[(0, 1)] = 1e-6;
        assert!(matches!(Covariance::new(asym), Err(Error::Model(_))));

        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(Covariance::new(indef), Err(Error::Degeneracy(_))));
    }

    proptest! {
        #[test]
        fn edge_difference_is_a_metric(seed in 0u64..2000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g1 = generate_model(6, &mut rng).unwrap().dag().clone();
            let g2 = generate_model(6, &mut rng).unwrap().dag().clone();
            let g3 = generate_model(6, &mut rng).unwrap().dag().clone();
            let d12 = edge_difference(&g1, &g2).unwrap();
            let d21 = edge_difference(&g2, &g1).unwrap();
            let d13 = edge_difference(&g1, &g3).unwrap();
            let d23 = edge_difference(&g2, &g3).unwrap();
            prop_assert_eq!(d12, d21);
            prop_assert_eq!(edge_difference(&g1, &g1).unwrap(), 0);
            prop_assert!((d12 == 0) == (g1 == g2));
            prop_assert!(d13 <= d12 + d23);
        }

        #[test]
        fn every_generated_dag_admits_an_ordering(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sem = generate_model(6, &mut rng).unwrap();
            let all = consistent_orderings(sem.dag()).unwrap();
            prop_assert!(!all.is_empty());
            for sigma in &all {
                prop_assert!(sem.dag().is_consistent_with(sigma));
            }
        }
    }
}
