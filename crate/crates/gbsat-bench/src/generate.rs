use gbsat::{Lit, Var};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A random graph from G(n, m) to color with `k` colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KColorSpec {
    pub vertices: usize,
    pub edges: usize,
    pub colors: usize,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KColorError {
    #[error("{edges} edges do not fit a simple graph on {vertices} vertices")]
    TooManyEdges { vertices: usize, edges: usize },
    #[error("at least one color is needed")]
    NoColors,
}

impl KColorSpec {
    /// Variable of "vertex `v` has color `c`".
    pub fn var(&self, v: usize, c: usize) -> Var {
        Var::from_index(v * self.colors + c)
    }

    pub fn num_vars(&self) -> usize {
        self.vertices * self.colors
    }

    /// Edges sampled uniformly without replacement, sorted.
    pub fn sample_edges(&self) -> Result<Vec<(usize, usize)>, KColorError> {
        let n = self.vertices;
        let pairs = n * n.saturating_sub(1) / 2;
        if self.edges > pairs {
            return Err(KColorError::TooManyEdges {
                vertices: n,
                edges: self.edges,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut edges: Vec<(usize, usize)> = index::sample(&mut rng, pairs, self.edges)
            .into_iter()
            .map(|i| pair_of(n, i))
            .collect();
        edges.sort_unstable();
        Ok(edges)
    }
}

/// The `i`-th pair (u, v), u < v, in row-major order.
fn pair_of(n: usize, mut i: usize) -> (usize, usize) {
    let mut u = 0;
    while i >= n - 1 - u {
        i -= n - 1 - u;
        u += 1;
    }
    (u, u + 1 + i)
}

/// Color-assignment encoding of k-colorability: at least one color per
/// vertex, at most one color per vertex, and differing colors on each edge.
pub fn gen_kcolor(spec: &KColorSpec) -> Result<Vec<Vec<Lit>>, KColorError> {
    let k = spec.colors;
    if k == 0 {
        return Err(KColorError::NoColors);
    }
    let edges = spec.sample_edges()?;
    let mut out = Vec::with_capacity(spec.vertices * (1 + k * (k - 1) / 2) + edges.len() * k);
    for v in 0..spec.vertices {
        out.push((0..k).map(|c| spec.var(v, c).pos()).collect());
    }
    for v in 0..spec.vertices {
        for c in 0..k {
            for d in c + 1..k {
                out.push(vec![spec.var(v, c).neg(), spec.var(v, d).neg()]);
            }
        }
    }
    for &(u, v) in &edges {
        for c in 0..k {
            out.push(vec![spec.var(u, c).neg(), spec.var(v, c).neg()]);
        }
    }
    Ok(out)
}

/// Uniform random k-CNF: each clause has `k` distinct variables with
/// random signs.
pub fn random_ksat(num_vars: usize, num_clauses: usize, k: usize, seed: u64) -> Vec<Vec<Lit>> {
    assert!(k <= num_vars, "clause width exceeds the variable count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_clauses)
        .map(|_| {
            index::sample(&mut rng, num_vars, k)
                .into_iter()
                .map(|v| Var::from_index(v).lit(rng.gen()))
                .collect()
        })
        .collect()
}
