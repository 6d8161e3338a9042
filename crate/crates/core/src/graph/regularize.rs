use super::Graph;
use crate::error::{Error, Result};

/// Relates the nodes of a padded graph to the graph it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingMap {
    pub original_count: usize,
    /// `Some(v)` for original node `v`, `None` for gadget nodes.
    pub mapping: Vec<Option<usize>>,
}

impl EmbeddingMap {
    pub fn is_gadget(&self, v: usize) -> bool {
        self.mapping[v].is_none()
    }
}

/// Pads `graph` to a `d`-regular graph by hanging gadgets off every node that
/// is short of degree `d`. Original nodes keep their ids.
pub fn regularize(graph: &Graph, d: usize) -> Result<(Graph, EmbeddingMap)> {
    if d % 2 == 0 {
        return Err(Error::invalid(format!("target degree {d} must be odd")));
    }
    if d < graph.max_degree() {
        return Err(Error::invalid(format!(
            "target degree {d} below max degree {}",
            graph.max_degree()
        )));
    }
    let n = graph.n();
    let mut edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut next = n;

    // K_{d+1} minus a matching of size deficit/2; the matched endpoints take
    // the edges to `anchor`.
    let attach_even = |anchor: usize, deficit: usize, edges: &mut Vec<(usize, usize)>, next: &mut usize| {
        if deficit == 0 {
            return;
        }
        let base = *next;
        *next += d + 1;
        for i in 0..=d {
            for j in i + 1..=d {
                let matched = j == i + 1 && i % 2 == 0 && i < deficit;
                if !matched {
                    edges.push((base + i, base + j));
                }
            }
        }
        for i in 0..deficit {
            edges.push((anchor, base + i));
        }
    };

    for v in 0..n {
        let deficit = d - graph.degree(v);
        if deficit % 2 == 1 {
            let pendant = next;
            next += 1;
            edges.push((v, pendant));
            attach_even(v, deficit - 1, &mut edges, &mut next);
            attach_even(pendant, d - 1, &mut edges, &mut next);
        } else {
            attach_even(v, deficit, &mut edges, &mut next);
        }
    }
    let padded = Graph::from_edges(next, &edges)?;
    let mapping = (0..next).map(|v| (v < n).then_some(v)).collect();
    Ok((padded, EmbeddingMap { original_count: n, mapping }))
}
