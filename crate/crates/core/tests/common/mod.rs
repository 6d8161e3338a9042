#![allow(dead_code)]

use proptest::prelude::*;
use slocal_core::Graph;
use std::collections::BTreeSet;

/// Simple graph on `1..=max_n` nodes with roughly `density` of all pairs present.
pub fn arb_graph(max_n: usize, density: f64) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        proptest::collection::vec(proptest::bool::weighted(density), len).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// All-pairs distances by Floyd-Warshall; `usize::MAX` when disconnected.
pub fn apsp(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in g.neighbors(u) {
            d[u][v] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    for row in d.iter_mut() {
        for x in row.iter_mut() {
            if *x >= inf {
                *x = usize::MAX;
            }
        }
    }
    d
}

pub fn edge_set(g: &Graph) -> BTreeSet<(usize, usize)> {
    g.edges().collect()
}
