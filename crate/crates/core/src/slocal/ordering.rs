use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinct integer labels; nodes are processed by ascending label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    labels: Vec<u64>,
}

impl Ordering {
    pub fn from_labels(labels: Vec<u64>) -> Result<Self> {
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("label {} used twice", w[0])));
        }
        Ok(Ordering { labels })
    }

    pub fn identity(n: usize) -> Self {
        Ordering { labels: (0..n as u64).collect() }
    }

    /// Uniformly random permutation, deterministic in `seed`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut labels: Vec<u64> = (0..n as u64).collect();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ordering { labels }
    }

    /// Processing order given as a node sequence.
    pub fn from_sequence(sequence: &[usize]) -> Result<Self> {
        let n = sequence.len();
        let mut labels = vec![u64::MAX; n];
        for (rank, &v) in sequence.iter().enumerate() {
            if v >= n || labels[v] != u64::MAX {
                return Err(Error::invalid("sequence is not a permutation"));
            }
            labels[v] = rank as u64;
        }
        Ok(Ordering { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Nodes sorted by ascending label.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = (0..self.labels.len()).collect();
        seq.sort_unstable_by_key(|&v| self.labels[v]);
        seq
    }
}

/// Largest graph distance between two nodes joined by a label-increasing
/// path. Zero when no such path has length above zero.
pub fn ordering_diameter(graph: &Graph, order: &Ordering) -> usize {
    let n = graph.n();
    let mut best = 0;
    let mut reach = vec![false; n];
    let mut stack = Vec::new();
    let mut visited = Vec::new();
    for s in 0..n {
        // Reachability along edges oriented toward the larger label.
        reach[s] = true;
        visited.push(s);
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &w in graph.neighbors(u) {
                if !reach[w] && order.label(w) > order.label(u) {
                    reach[w] = true;
                    visited.push(w);
                    stack.push(w);
                }
            }
        }
        if visited.len() > 1 {
            let dist = graph.distances(s);
            for &t in &visited {
                debug_assert!(dist[t] != UNREACHED);
                best = best.max(dist[t]);
            }
        }
        for &t in &visited {
            reach[t] = false;
        }
        visited.clear();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn examples() {
        assert_eq!(ordering_diameter(&Graph::empty(1), &Ordering::identity(1)), 0);
        let p3 = generate(&GraphKind::Path { n: 3 }, 0).unwrap();
        let up = Ordering::from_labels(vec![1, 2, 3]).unwrap();
        assert_eq!(ordering_diameter(&p3, &up), 2);
        let bent = Ordering::from_labels(vec![1, 3, 2]).unwrap();
        assert_eq!(ordering_diameter(&p3, &bent), 1);
    }

    #[test]
    fn rejects_duplicate_labels() {
        assert!(Ordering::from_labels(vec![4, 1, 4]).is_err());
        assert!(Ordering::from_sequence(&[0, 0, 1]).is_err());
    }

    #[test]
    fn sequence_round_trip() {
        let o = Ordering::random(20, 3);
        assert_eq!(Ordering::from_sequence(&o.sequence()).unwrap().sequence(), o.sequence());
        let o = Ordering::from_labels(vec![30, 10, 20]).unwrap();
        assert_eq!(o.sequence(), vec![1, 2, 0]);
    }
}
