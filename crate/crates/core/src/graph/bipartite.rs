use crate::error::{Error, Result};

/// Bipartite graph with a left side `U` and a right side `V`, both indexed
/// from zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut left_adj = vec![Vec::new(); left];
        let mut right_adj = vec![Vec::new(); right];
        for &(u, v) in edges {
            if u >= left || v >= right {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range")));
            }
            left_adj[u].push(v);
            right_adj[v].push(u);
        }
        for (u, list) in left_adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("duplicate edge at left node {u}")));
            }
        }
        for list in right_adj.iter_mut() {
            list.sort_unstable();
        }
        Ok(BipartiteGraph { left_adj, right_adj })
    }

    pub fn left_count(&self) -> usize {
        self.left_adj.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_adj.len()
    }

    pub fn left_neighbors(&self, u: usize) -> &[usize] {
        &self.left_adj[u]
    }

    pub fn right_neighbors(&self, v: usize) -> &[usize] {
        &self.right_adj[v]
    }

    pub fn left_degree(&self, u: usize) -> usize {
        self.left_adj[u].len()
    }

    /// Minimum left degree, 0 if the left side is empty.
    pub fn min_left_degree(&self) -> usize {
        self.left_adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.left_adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    /// Total node count |U| + |V|.
    pub fn node_count(&self) -> usize {
        self.left_count() + self.right_count()
    }
}
