use super::Graph;
use crate::error::{Error, Result};

/// Hypergraph on nodes `0..n`. Edges are non-empty sorted sets; the same set
/// may appear more than once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            if e.is_empty() {
                return Err(Error::invalid(format!("hyperedge {i} is empty")));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("hyperedge {i} repeats a node")));
            }
            if *e.last().unwrap() >= n {
                return Err(Error::invalid(format!("hyperedge {i} has a node >= {n}")));
            }
            out.push(e);
        }
        Ok(Hypergraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Maximum edge cardinality (0 for an edgeless hypergraph).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// For every node, the ids of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    /// Two nodes are adjacent iff some edge contains both.
    pub fn primal_graph(&self) -> Graph {
        let n = self.n;
        let incidence = self.incidence();
        let mut mark = vec![usize::MAX; n];
        let mut adj = vec![Vec::new(); n];
        for (x, list) in adj.iter_mut().enumerate() {
            mark[x] = x;
            for &e in &incidence[x] {
                // A node already adjacent to everything needs no more scans.
                if list.len() + 1 == n {
                    break;
                }
                for &w in &self.edges[e] {
                    if mark[w] != x {
                        mark[w] = x;
                        list.push(w);
                    }
                }
            }
            list.sort_unstable();
        }
        Graph::from_sorted_adjacency(adj)
    }

    /// Keep only the edges selected by `keep`, same node set.
    pub fn filter_edges(&self, mut keep: impl FnMut(&[usize]) -> bool) -> Hypergraph {
        Hypergraph {
            n: self.n,
            edges: self.edges.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }
}
