//! Orderings of a node set, cycle composition, and the four local move
//! operators (ADJ, RTS, R2R, R2R-REV) with their neighborhoods.
//!
//! Nodes are 0-based (`0..p`) throughout the crate. Positions are 1-based in
//! the operator API so that worked examples read exactly like the usual
//! one-indexed notation: with σ = (3,6,4,1,5,2), `R2R(σ, 3, 6)` inserts the
//! 6th element into the 3rd position, giving (3,6,2,4,1,5). Use
//! [`Ordering::from_one_based`] to write such literals in tests and docs.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A permutation σ of the nodes `{0, …, p−1}`; `σ(k)` is the node placed at
/// (1-based) position `k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    perm: Vec<usize>,
}

impl std::fmt::Debug for Ordering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ordering{:?}", self.to_one_based())
    }
}

impl std::fmt::Display for Ordering {
    /// Displays 1-based, e.g. `(3,6,4,1,5,2)`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let vals: Vec<String> = self.to_one_based().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", vals.join(","))
    }
}

impl Serialize for Ordering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ordering {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vals = Vec::<usize>::deserialize(d)?;
        Ordering::from_one_based(&vals).map_err(serde::de::Error::custom)
    }
}

impl Ordering {
    /// The identity ordering ι = (1, …, p).
    pub fn identity(p: usize) -> Self {
        Ordering { perm: (0..p).collect() }
    }

    /// Builds an ordering from 0-based node ids; fails unless `perm` is a
    /// bijection of `{0, …, p−1}`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let p = perm.len();
        let mut seen = vec![false; p];
        for &v in &perm {
            if v >= p || seen[v] {
                return Err(Error::Parameter(format!(
                    "not a permutation of 0..{p}: {perm:?}"
                )));
            }
            seen[v] = true;
        }
        Ok(Ordering { perm })
    }

    /// Builds an ordering from 1-based values, e.g. `&[3,6,4,1,5,2]`.
    pub fn from_one_based(values: &[usize]) -> Result<Self> {
        if values.contains(&0) {
            return Err(Error::Parameter("1-based ordering contains 0".into()));
        }
        Ordering::new(values.iter().map(|&v| v - 1).collect())
    }

    /// The 1-based value vector, e.g. `[3,6,4,1,5,2]`.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|&v| v + 1).collect()
    }

    pub fn p(&self) -> usize {
        self.perm.len()
    }

    /// Slice of 0-based node ids; `as_slice()[k]` is the node at position `k+1`.
    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// Node at 1-based position `pos`.
    pub fn node_at(&self, pos: usize) -> usize {
        self.perm[pos - 1]
    }

    /// Inverse map: `inv[node]` is the 0-based position of `node`.
    pub fn inverse_positions(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.perm.len()];
        for (k, &v) in self.perm.iter().enumerate() {
            inv[v] = k;
        }
        inv
    }

    /// Uniformly random ordering by Fisher–Yates: starting from the identity,
    /// for `k = p−1, …, 1` draw `j ∈ {0, …, k}` and swap positions `k`, `j`.
    /// Consumes exactly `p−1` draws from `rng`.
    pub fn random<R: rand::Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..p).collect();
        for k in (1..p).rev() {
            let j = rng.random_range(0..=k);
            perm.swap(k, j);
        }
        Ordering { perm }
    }

    /// Composition σ ∘ μ with μ given in cycle notation over 1-based
    /// positions: μ maps `cycle[t] → cycle[t+1]` (wrapping) and fixes every
    /// other position, and `(σ ∘ μ)(i) = σ(μ(i))`. An empty or singleton
    /// cycle returns σ unchanged.
    pub fn compose_cycle(&self, cycle: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut seen = vec![false; p];
        for &c in cycle {
            if c == 0 || c > p {
                return Err(Error::Parameter(format!(
                    "cycle position {c} out of range 1..={p}"
                )));
            }
            if seen[c - 1] {
                return Err(Error::Parameter(format!("repeated cycle position {c}")));
            }
            seen[c - 1] = true;
        }
        let mut out = self.perm.clone();
        for (t, &c) in cycle.iter().enumerate() {
            let next = cycle[(t + 1) % cycle.len()];
            out[c - 1] = self.perm[next - 1];
        }
        Ok(Ordering { perm: out })
    }

    /// Applies one move operator at 1-based positions `(i, j)`:
    ///
    /// - `Adj`: swaps positions `i` and `i+1` (requires `1 ≤ i ≤ p−1`;
    ///   `j` is ignored);
    /// - `Rts`: swaps positions `i` and `j`;
    /// - `R2r`: removes the element at position `j` and reinserts it at
    ///   position `i`, shifting the block `i..j−1` right;
    /// - `R2rRev`: removes the element at position `i` and reinserts it at
    ///   position `j`, shifting the block `i+1..j` left.
    ///
    /// The non-adjacent operators require `1 ≤ i < j ≤ p`.
    pub fn apply_op(&self, kind: NeighborhoodKind, i: usize, j: usize) -> Result<Self> {
        let p = self.p();
        if kind == NeighborhoodKind::Adj {
            if i == 0 || i >= p {
                return Err(Error::Parameter(format!(
                    "ADJ position {i} out of range 1..={}",
                    p - 1
                )));
            }
            let mut out = self.perm.clone();
            out.swap(i - 1, i);
            return Ok(Ordering { perm: out });
        }
        if i == 0 || j > p || i >= j {
            return Err(Error::Parameter(format!(
                "positions ({i}, {j}) must satisfy 1 <= i < j <= {p}"
            )));
        }
        let mut out = self.perm.clone();
        match kind {
            NeighborhoodKind::Adj => unreachable!(),
            NeighborhoodKind::Rts => out.swap(i - 1, j - 1),
            NeighborhoodKind::R2r => {
                let moved = out.remove(j - 1);
                out.insert(i - 1, moved);
            }
            NeighborhoodKind::R2rRev => {
                let moved = out.remove(i - 1);
                out.insert(j - 1, moved);
            }
        }
        Ok(Ordering { perm: out })
    }

    /// Lexicographic rank of this permutation among all `p!` permutations of
    /// its node set (factorial number system). Requires `p ≤ 20`.
    pub fn lexicographic_rank(&self) -> u64 {
        let p = self.p();
        assert!(p <= 20, "rank overflows u64 beyond p = 20");
        let mut rank: u64 = 0;
        for k in 0..p {
            let smaller_later = self.perm[k + 1..]
                .iter()
                .filter(|&&v| v < self.perm[k])
                .count() as u64;
            rank += smaller_later * factorial(p - 1 - k);
        }
        rank
    }

    /// Inverse of [`Ordering::lexicographic_rank`].
    pub fn from_lexicographic_rank(p: usize, rank: u64) -> Result<Self> {
        if p > 20 {
            return Err(Error::Size(format!("p = {p} exceeds rank guard 20")));
        }
        if rank >= factorial(p) {
            return Err(Error::Parameter(format!("rank {rank} out of range for p = {p}")));
        }
        let mut avail: Vec<usize> = (0..p).collect();
        let mut rest = rank;
        let mut perm = Vec::with_capacity(p);
        for k in 0..p {
            let f = factorial(p - 1 - k);
            let idx = (rest / f) as usize;
            rest %= f;
            perm.push(avail.remove(idx));
        }
        Ok(Ordering { perm })
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Visits all `p!` permutations of `0..p` in lexicographic order, passing
/// `(rank, perm)` to the callback. Intended for exhaustive sweeps with small
/// `p`; callers enforce their own size guards.
pub fn for_each_permutation<F: FnMut(u64, &[usize])>(p: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..p).collect();
    let mut used = vec![false; p];
    let mut rank = 0u64;
    fn rec<F: FnMut(u64, &[usize])>(
        p: usize,
        depth: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        rank: &mut u64,
        f: &mut F,
    ) {
        if depth == p {
            f(*rank, perm);
            *rank += 1;
            return;
        }
        for v in 0..p {
            if !used[v] {
                used[v] = true;
                perm[depth] = v;
                rec(p, depth + 1, perm, used, rank, f);
                used[v] = false;
            }
        }
    }
    rec(p, 0, &mut perm, &mut used, &mut rank, &mut f);
}

/// The four neighborhood schemes on the permutation space.
///
/// `Adj` has `p−1` neighbors; the other three each have `p(p−1)/2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum NeighborhoodKind {
    #[serde(rename = "ADJ")]
    Adj,
    #[serde(rename = "RTS")]
    Rts,
    #[serde(rename = "R2R")]
    R2r,
    #[serde(rename = "R2R-REV")]
    R2rRev,
}

impl NeighborhoodKind {
    /// All four kinds in reporting order.
    pub const ALL: [NeighborhoodKind; 4] = [
        NeighborhoodKind::Adj,
        NeighborhoodKind::Rts,
        NeighborhoodKind::R2rRev,
        NeighborhoodKind::R2r,
    ];

    /// Closed-form neighborhood size at dimension `p`.
    pub fn size(self, p: usize) -> usize {
        match self {
            NeighborhoodKind::Adj => p - 1,
            _ => p * (p - 1) / 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NeighborhoodKind::Adj => "ADJ",
            NeighborhoodKind::Rts => "RTS",
            NeighborhoodKind::R2r => "R2R",
            NeighborhoodKind::R2rRev => "R2R-REV",
        }
    }
}

impl std::fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NeighborhoodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "ADJ" => Ok(NeighborhoodKind::Adj),
            "RTS" => Ok(NeighborhoodKind::Rts),
            "R2R" => Ok(NeighborhoodKind::R2r),
            "R2R-REV" | "R2RREV" => Ok(NeighborhoodKind::R2rRev),
            other => Err(Error::Parameter(format!(
                "unknown neighborhood kind '{other}' (expected ADJ, RTS, R2R, or R2R-REV)"
            ))),
        }
    }
}

/// A move descriptor `(kind, i, j)` with 1-based positions, carried alongside
/// each neighbor for trace logging. For `Adj` moves `j = i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Move {
    pub kind: NeighborhoodKind,
    pub i: usize,
    pub j: usize,
}

/// Enumerates the `kind`-neighborhood of σ in deterministic order: `i`
/// ascending, then `j` ascending. Every yielded ordering differs from σ.
pub fn neighborhood(sigma: &Ordering, kind: NeighborhoodKind) -> Vec<(Move, Ordering)> {
    let p = sigma.p();
    let mut out = Vec::with_capacity(kind.size(p));
    match kind {
        NeighborhoodKind::Adj => {
            for i in 1..p {
                let mv = Move { kind, i, j: i + 1 };
                out.push((mv, sigma.apply_op(kind, i, i + 1).expect("valid adj move")));
            }
        }
        _ => {
            for i in 1..p {
                for j in i + 1..=p {
                    let mv = Move { kind, i, j };
                    out.push((mv, sigma.apply_op(kind, i, j).expect("valid move")));
                }
            }
        }
    }
    out
}
