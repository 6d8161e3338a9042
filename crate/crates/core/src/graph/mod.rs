//! Immutable graph structures and distance queries.

mod bipartite;
mod generate;
mod hyper;
pub mod io;
mod regularize;

pub use bipartite::BipartiteGraph;
pub use generate::{generate, random_bipartite, random_uniform_hypergraph, GraphKind};
pub use hyper::Hypergraph;
pub use regularize::{regularize, EmbeddingMap};

use crate::error::{Error, Result};
use std::collections::VecDeque;

pub const UNREACHED: usize = usize::MAX;

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("duplicate edge at node {u}")));
            }
        }
        Ok(Graph { adj })
    }

    /// Like `from_edges` but silently merges duplicates. Used by generators.
    pub(crate) fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            debug_assert!(u != v && u < n && v < n);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Graph { adj }
    }

    /// Adjacency lists must already be sorted, symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().enumerate().all(|(v, l)| l.windows(2).all(|w| w[0] < w[1]) && !l.contains(&v)));
        Graph { adj }
    }

    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges in canonical order: `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::invalid(format!("node {v} out of range (n = {})", self.n())));
        }
        Ok(())
    }

    /// All nodes within hop distance `radius` of `center`, sorted.
    pub fn ball(&self, center: usize, radius: usize) -> Result<Vec<usize>> {
        self.check_node(center)?;
        let mut out: Vec<usize> = self
            .bfs_within(center, radius, |_| true)
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// BFS from `src` restricted to nodes accepted by `alive`, stopping at
    /// depth `radius`. Returns (node, distance) pairs in BFS order. The source
    /// is always included.
    pub fn bfs_within(
        &self,
        src: usize,
        radius: usize,
        alive: impl Fn(usize) -> bool,
    ) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashMap::new();
        seen.insert(src, 0usize);
        let mut order = vec![(src, 0)];
        let mut head = 0;
        while head < order.len() {
            let (u, d) = order[head];
            head += 1;
            if d == radius {
                continue;
            }
            for &w in &self.adj[u] {
                if alive(w) && !seen.contains_key(&w) {
                    seen.insert(w, d + 1);
                    order.push((w, d + 1));
                }
            }
        }
        order
    }

    /// Sizes of the balls of radius 0, 1, 2, ... around `src` inside the
    /// subgraph of alive nodes, until the component is exhausted.
    pub fn ball_sizes(&self, src: usize, alive: &[bool]) -> Vec<usize> {
        let layers = self.bfs_layers(src, alive, UNREACHED);
        let mut sizes = Vec::with_capacity(layers.len());
        let mut acc = 0;
        for layer in &layers {
            acc += layer.len();
            sizes.push(acc);
        }
        sizes
    }

    /// BFS layers (layer r holds nodes at distance exactly r) in the subgraph
    /// of alive nodes, at most `max_radius + 1` layers.
    pub fn bfs_layers(&self, src: usize, alive: &[bool], max_radius: usize) -> Vec<Vec<usize>> {
        let mut dist = vec![UNREACHED; self.n()];
        dist[src] = 0;
        let mut layers = vec![vec![src]];
        while layers.len() <= max_radius {
            let mut next = Vec::new();
            for &u in layers.last().unwrap() {
                for &w in &self.adj[u] {
                    if alive[w] && dist[w] == UNREACHED {
                        dist[w] = layers.len();
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layers.push(next);
        }
        layers
    }

    /// Hop distances from `src` to every node (`UNREACHED` if disconnected).
    pub fn distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHED; self.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == UNREACHED {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Hop distance between two nodes, or `None` if disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        let d = self.distances(u)[v];
        (d != UNREACHED).then_some(d)
    }

    /// Edge between every pair at distance `1..=r`.
    pub fn power_graph(&self, r: usize) -> Result<Graph> {
        if r == 0 {
            return Err(Error::invalid("power graph radius must be at least 1"));
        }
        if r == 1 {
            return Ok(self.clone());
        }
        let adj = (0..self.n())
            .map(|v| {
                let mut list: Vec<usize> = self
                    .bfs_within(v, r, |_| true)
                    .into_iter()
                    .map(|(w, _)| w)
                    .filter(|&w| w != v)
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Ok(Graph { adj })
    }

    /// Subgraph induced by `nodes` (any order, no duplicates). Node `i` of the
    /// result is `nodes[i]`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut index = std::collections::HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            index.insert(v, i);
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> =
                    self.adj[v].iter().filter_map(|w| index.get(w).copied()).collect();
                list.sort_unstable();
                list
            })
            .collect();
        Graph { adj }
    }

    /// Largest distance between two nodes of `set`, measured in this graph.
    /// Returns the pair realizing it. Disconnected members yield `UNREACHED`.
    pub fn weak_diameter(&self, set: &[usize]) -> (usize, (usize, usize)) {
        let mut best = (0, (set.first().copied().unwrap_or(0), set.first().copied().unwrap_or(0)));
        if set.len() <= 1 {
            return best;
        }
        let mut is_member = vec![false; self.n()];
        for &v in set {
            is_member[v] = true;
        }
        let mut dist = vec![UNREACHED; self.n()];
        let mut touched = Vec::new();
        for &s in set {
            // BFS until every member is found.
            let mut remaining = set.len() - 1;
            dist[s] = 0;
            touched.push(s);
            let mut head = 0;
            let mut far = (0, s);
            while head < touched.len() && remaining > 0 {
                let u = touched[head];
                head += 1;
                for &w in &self.adj[u] {
                    if dist[w] == UNREACHED {
                        dist[w] = dist[u] + 1;
                        touched.push(w);
                        if is_member[w] {
                            remaining -= 1;
                            far = (dist[w], w);
                        }
                    }
                }
            }
            if remaining > 0 {
                let missing = set.iter().copied().find(|&v| dist[v] == UNREACHED).unwrap();
                for &t in &touched {
                    dist[t] = UNREACHED;
                }
                return (UNREACHED, (s, missing));
            }
            if far.0 > best.0 {
                best = (far.0, (s, far.1));
            }
            for &t in &touched {
                dist[t] = UNREACHED;
            }
            touched.clear();
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        generate(&GraphKind::Path { n }, 0).unwrap()
    }

    #[test]
    fn ball_examples() {
        let p5 = path(5);
        assert_eq!(p5.ball(3, 0).unwrap(), vec![3]);
        assert_eq!(p5.ball(2, 1).unwrap(), vec![1, 2, 3]);
        assert_eq!(p5.ball(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(p5.ball(5, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn power_graph_examples() {
        let p4 = path(4);
        assert_eq!(p4.power_graph(1).unwrap(), p4);
        let sq: Vec<_> = p4.power_graph(2).unwrap().edges().collect();
        assert_eq!(sq, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let cube = p4.power_graph(3).unwrap();
        assert_eq!(cube, generate(&GraphKind::Complete { n: 4 }, 0).unwrap());
        assert!(p4.power_graph(0).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn weak_diameter_measures_in_host_graph() {
        let c6 = generate(&GraphKind::Cycle { n: 6 }, 0).unwrap();
        assert_eq!(c6.weak_diameter(&[0, 3]).0, 3);
        assert_eq!(c6.weak_diameter(&[0, 1, 5]).0, 2);
        assert_eq!(c6.weak_diameter(&[4]).0, 0);
        let split = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(split.weak_diameter(&[0, 2]).0, UNREACHED);
    }

    #[test]
    fn induced_keeps_internal_edges() {
        let c5 = generate(&GraphKind::Cycle { n: 5 }, 0).unwrap();
        let sub = c5.induced(&[4, 0, 1]);
        let e: Vec<_> = sub.edges().collect();
        assert_eq!(e, vec![(0, 1), (1, 2)]);
    }
}
