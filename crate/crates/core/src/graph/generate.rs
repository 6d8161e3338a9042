use super::{BipartiteGraph, Graph, Hypergraph};
use crate::error::{Error, Result};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    Gnp { n: usize, p: f64 },
    Complete { n: usize },
    RandomRegular { n: usize, d: usize },
}

/// Deterministic generator: the same kind, parameters and seed always give
/// the same graph.
pub fn generate(kind: &GraphKind, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        GraphKind::Path { n } => {
            Ok(Graph::from_edges_dedup(n, (1..n).map(|i| (i - 1, i))))
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(Error::invalid("cycle needs at least 3 nodes"));
            }
            Ok(Graph::from_edges_dedup(n, (0..n).map(|i| (i, (i + 1) % n))))
        }
        GraphKind::Grid { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Ok(Graph::from_edges_dedup(rows * cols, edges))
        }
        GraphKind::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::invalid(format!("edge probability {p} outside [0, 1]")));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Graph::from_edges_dedup(n, edges))
        }
        GraphKind::Complete { n } => Ok(Graph::from_edges_dedup(
            n,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
        )),
        GraphKind::RandomRegular { n, d } => random_regular(n, d, &mut rng),
    }
}

// Pairing model with restarts; fine for the small degrees used here.
fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(Error::invalid(format!("degree {d} times n = {n} is odd")));
    }
    if d >= n && n > 0 && d > 0 {
        return Err(Error::invalid(format!("degree {d} needs more than {n} nodes")));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    'attempt: for _ in 0..10_000 {
        points.shuffle(rng);
        let mut edges = std::collections::HashSet::new();
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !edges.insert((u, v)) {
                continue 'attempt;
            }
        }
        let mut edges: Vec<_> = edges.into_iter().collect();
        edges.sort_unstable();
        return Graph::from_edges(n, &edges);
    }
    Err(Error::invalid(format!("could not sample a simple {d}-regular graph on {n} nodes")))
}

/// `m` edges, each a uniformly random `k`-subset of `0..n`.
pub fn random_uniform_hypergraph(n: usize, m: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("edge size {k} must be in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..m).map(|_| index::sample(&mut rng, n, k).into_vec()).collect();
    Hypergraph::new(n, edges)
}

/// Every left node gets a uniformly random neighbor set whose size is drawn
/// from `min_degree..=max_degree`.
pub fn random_bipartite(
    left: usize,
    right: usize,
    min_degree: usize,
    max_degree: usize,
    seed: u64,
) -> Result<BipartiteGraph> {
    if min_degree > max_degree || max_degree > right {
        return Err(Error::invalid(format!(
            "degree range {min_degree}..={max_degree} invalid for {right} right nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..left {
        let d = rng.gen_range(min_degree..=max_degree);
        for v in index::sample(&mut rng, right, d) {
            edges.push((u, v));
        }
    }
    BipartiteGraph::new(left, right, &edges)
}
