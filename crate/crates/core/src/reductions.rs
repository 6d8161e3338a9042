//! Pipelines that solve one problem with an oracle for another: conflict-free
//! multicoloring from a splitting oracle, and network decomposition from a
//! conflict-free multicoloring oracle.

use crate::cf::{lowrank_cf, unique_color, verify_cf, MultiColoring};
use crate::decomposition::{verify_decomposition, NetworkDecomposition};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Graph, Hypergraph, UNREACHED};
use crate::splitting::{verify_lambda_split, SplitColoring};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug)]
pub struct CfFromSplitRun {
    pub coloring: MultiColoring,
    /// Rank of the hypergraph at the start of each phase.
    pub ranks: Vec<usize>,
    /// Phase in which each hyperedge was resolved.
    pub resolved_in: Vec<usize>,
    /// Colors spent by the low-rank solver in each phase.
    pub palette_sizes: Vec<usize>,
    pub oracle_calls: usize,
    pub phase_bound: usize,
}

/// `ceil(2 delta ln R) + 1`, the phase budget for initial rank `R`.
pub fn split_phase_bound(delta: usize, rank: usize) -> usize {
    (2.0 * delta as f64 * (rank.max(1) as f64).ln()).ceil() as usize + 1
}

/// Repeatedly colors the hyperedges of size at most `delta` with a fresh
/// palette, splits the remaining ones with `split_oracle` at `1/delta`,
/// deletes the blue nodes and recurses on what is left of each edge. Nodes
/// that end up without a color get one extra trailing color.
pub fn cf_from_split(
    h: &Hypergraph,
    delta: usize,
    mut split_oracle: impl FnMut(&BipartiteGraph) -> Result<SplitColoring>,
) -> Result<CfFromSplitRun> {
    if delta < 2 {
        return Err(Error::invalid("delta must be at least 2"));
    }
    let n = h.n();
    let lambda = 1.0 / delta as f64;
    let mut alive = vec![true; n];
    let mut colors_of = vec![BTreeSet::new(); n];
    let mut open: Vec<usize> = (0..h.edge_count()).collect();
    let mut resolved_in = vec![usize::MAX; h.edge_count()];
    let mut ranks = Vec::new();
    let mut palette_sizes = Vec::new();
    let mut offset = 0;
    let mut oracle_calls = 0;
    let phase_bound = split_phase_bound(delta, h.rank());
    let current = |e: usize, alive: &[bool]| -> Vec<usize> { h.edges()[e].iter().copied().filter(|&v| alive[v]).collect() };

    while !open.is_empty() {
        let phase = ranks.len();
        if phase >= phase_bound {
            return Err(Error::invariant(format!("{} edges still open after {phase_bound} phases", open.len())));
        }
        let sets: Vec<Vec<usize>> = open.iter().map(|&e| current(e, &alive)).collect();
        let rank = sets.iter().map(Vec::len).max().unwrap();
        if let Some(&prev) = ranks.last() {
            if rank > prev - prev / delta || rank as f64 > (1.0 - 1.0 / (2.0 * delta as f64)) * prev as f64 {
                return Err(Error::invariant(format!("rank went from {prev} to {rank}")));
            }
        }
        ranks.push(rank);

        let (small, big): (Vec<usize>, Vec<usize>) = (0..open.len()).partition(|&i| sets[i].len() <= delta);
        let mut palette = 0;
        if !small.is_empty() {
            // Low-rank solve on the nodes the small edges touch.
            let mut local: BTreeMap<usize, usize> = BTreeMap::new();
            for &i in &small {
                for &v in &sets[i] {
                    let next = local.len();
                    local.entry(v).or_insert(next);
                }
            }
            let lh = Hypergraph::new(local.len(), small.iter().map(|&i| sets[i].iter().map(|v| local[v]).collect()).collect())?;
            let run = lowrank_cf(&lh)?;
            for (&v, &lv) in &local {
                colors_of[v].extend(run.coloring.colors_of[lv].iter().map(|c| c + offset));
            }
            palette = run.coloring.q;
            for &i in &small {
                resolved_in[open[i]] = phase;
            }
        }
        palette_sizes.push(palette);
        offset += palette;
        if big.is_empty() {
            break;
        }

        let right: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let index: HashMap<usize, usize> = right.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = big
            .iter()
            .enumerate()
            .flat_map(|(li, &i)| sets[i].iter().map(move |v| (li, v)))
            .map(|(li, v)| (li, index[v]))
            .collect();
        let b = BipartiteGraph::new(big.len(), right.len(), &edges)?;
        let split = split_oracle(&b)?;
        oracle_calls += 1;
        let rep = verify_lambda_split(&b, &split, lambda);
        if !rep.valid {
            return Err(Error::OracleFailure(format!(
                "split oracle missed the 1/{delta} split at {} of {} edges",
                rep.violators.len(),
                big.len()
            )));
        }
        for (i, &v) in right.iter().enumerate() {
            if !split.red[i] {
                alive[v] = false;
            }
        }
        open = big.iter().map(|&i| open[i]).collect();
    }

    let trailing = offset + 1;
    for s in colors_of.iter_mut().filter(|s| s.is_empty()) {
        s.insert(trailing);
    }
    let coloring = MultiColoring::new(colors_of);
    let rep = verify_cf(h, &coloring);
    if !rep.valid {
        return Err(Error::invariant(format!("composed coloring fails at edges {:?}", rep.violations)));
    }
    Ok(CfFromSplitRun {
        coloring,
        ranks,
        resolved_in,
        palette_sizes,
        oracle_calls,
        phase_bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    pub center_of: Vec<usize>,
    pub color_of: Vec<usize>,
    pub radius_of: Vec<usize>,
    pub epsilon: f64,
    pub q: usize,
}

impl ClusterAssignment {
    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = (0..self.center_of.len())
            .map(|v| {
                (
                    v.to_string(),
                    json!({ "center": self.center_of[v], "color": self.color_of[v], "r_v": self.radius_of[v] }),
                )
            })
            .collect();
        Value::Object(map)
    }
}

#[derive(Clone, Debug)]
pub struct CfDecompositionRun {
    pub assignment: ClusterAssignment,
    pub decomposition: NetworkDecomposition,
    /// Ball-size class of every hypergraph handed to the oracle, ascending.
    pub classes: Vec<usize>,
    pub d_bound: usize,
    pub c_bound: usize,
}

/// `ceil(q log_{1+eps/3} n)`.
pub fn radius_bound(n: usize, epsilon: f64, q: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    (q as f64 * (n as f64).ln() / (1.0 + epsilon / 3.0).ln()).ceil() as usize
}

/// Builds a network decomposition from conflict-free colorings of ball
/// hypergraphs. Every node picks the smallest radius whose `q`-step growth
/// is at most `1 + eps/3`, contributes its `q + 1` balls to the hypergraph
/// of its size class, and joins the cluster of the unique holder of a color
/// that witnesses two of its balls.
pub fn decomposition_from_cf(
    g: &Graph,
    epsilon: f64,
    q: usize,
    mut cf_oracle: impl FnMut(&Hypergraph) -> Result<MultiColoring>,
) -> Result<CfDecompositionRun> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    let n = g.n();
    let growth = 1.0 + epsilon / 3.0;
    let bound = radius_bound(n, epsilon, q);

    // Per node: nodes sorted by distance, and prefix ball sizes.
    let mut order_of = Vec::with_capacity(n);
    let mut sizes_of = Vec::with_capacity(n);
    let mut dist_of = Vec::with_capacity(n);
    let mut radius_of = vec![0; n];
    for v in 0..n {
        let dist = g.distances(v);
        let mut reach: Vec<usize> = (0..n).filter(|&u| dist[u] != UNREACHED).collect();
        reach.sort_by_key(|&u| (dist[u], u));
        let ecc = dist[*reach.last().unwrap()];
        let mut sizes = vec![0; ecc + 1];
        for &u in &reach {
            sizes[dist[u]] += 1;
        }
        for r in 1..sizes.len() {
            sizes[r] += sizes[r - 1];
        }
        let size = |r: usize| sizes[r.min(ecc)];
        let r = (0..)
            .find(|&r| size(r + q) as f64 <= growth * size(r) as f64)
            .unwrap();
        if r > bound {
            return Err(Error::invariant(format!("node {v}: radius {r} exceeds {bound}")));
        }
        radius_of[v] = r;
        order_of.push(reach);
        sizes_of.push(sizes);
        dist_of.push(dist);
    }
    let ball = |v: usize, r: usize| -> Vec<usize> {
        let sizes = &sizes_of[v];
        let mut b = order_of[v][..sizes[r.min(sizes.len() - 1)]].to_vec();
        b.sort_unstable();
        b
    };
    let class_of: Vec<usize> = (0..n)
        .map(|v| {
            let s = sizes_of[v][radius_of[v].min(sizes_of[v].len() - 1)];
            // Guard the floor against log rounding at exact powers.
            let mut i = ((s as f64).ln() / growth.ln()).floor() as usize;
            while i > 0 && growth.powi(i as i32) > s as f64 + 1e-9 {
                i -= 1;
            }
            while growth.powi(i as i32 + 1) <= s as f64 + 1e-9 {
                i += 1;
            }
            i
        })
        .collect();
    let classes: Vec<usize> = class_of.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();

    // One oracle call per size class, duplicate balls merged.
    let mut coloring_of_class: HashMap<usize, (usize, Vec<BTreeSet<usize>>)> = HashMap::new();
    for (rank, &class) in classes.iter().enumerate() {
        let mut edges: Vec<Vec<usize>> = (0..n)
            .filter(|&v| class_of[v] == class)
            .flat_map(|v| (0..=q).map(move |j| (v, j)))
            .map(|(v, j)| ball(v, radius_of[v] + j))
            .collect();
        edges.sort();
        edges.dedup();
        let (lo, hi) = edges.iter().fold((usize::MAX, 0), |(lo, hi), e| (lo.min(e.len()), hi.max(e.len())));
        if hi as f64 > growth * growth * lo as f64 + 1e-9 {
            return Err(Error::invariant(format!("class {class}: edge sizes {lo}..{hi} not almost uniform")));
        }
        let h = Hypergraph::new(n, edges)?;
        let coloring = cf_oracle(&h)?;
        if coloring.colors_of.len() != n {
            return Err(Error::OracleFailure(format!("class {class}: coloring covers {} of {n} nodes", coloring.colors_of.len())));
        }
        if coloring.colors_of.iter().flatten().any(|&c| c == 0 || c > q) {
            return Err(Error::OracleFailure(format!("class {class}: colors outside 1..={q}")));
        }
        let rep = verify_cf(&h, &coloring);
        if !rep.valid {
            return Err(Error::OracleFailure(format!("class {class}: {} edges without a unique color", rep.violations.len())));
        }
        coloring_of_class.insert(class, (rank * q, coloring.colors_of));
    }

    let mut center_of = vec![0; n];
    let mut color_of = vec![0; n];
    for v in 0..n {
        let (offset, colors) = &coloring_of_class[&class_of[v]];
        let witnesses: Vec<usize> = (0..=q)
            .map(|j| {
                unique_color(&ball(v, radius_of[v] + j), colors)
                    .ok_or_else(|| Error::invariant(format!("node {v}: ball {j} has no unique color")))
            })
            .collect::<Result<_>>()?;
        let (a, c) = (0..=q)
            .find_map(|a| ((a + 1)..=q).find(|&b| witnesses[b] == witnesses[a]).map(|_| (a, witnesses[a])))
            .ok_or_else(|| Error::invariant(format!("node {v}: no repeated witness color")))?;
        let center = ball(v, radius_of[v] + a)
            .into_iter()
            .find(|&u| colors[u].contains(&c))
            .unwrap();
        let reach = dist_of[v][center] + 1;
        if let Some(other) = order_of[v]
            .iter()
            .take_while(|&&u| dist_of[v][u] <= reach)
            .find(|&&u| u != center && colors[u].contains(&c))
        {
            return Err(Error::invariant(format!("node {v}: center {center} and node {other} share color {c}")));
        }
        center_of[v] = center;
        color_of[v] = offset + c;
    }
    for (u, v) in g.edges() {
        if color_of[u] == color_of[v] && center_of[u] != center_of[v] {
            return Err(Error::invariant(format!(
                "adjacent nodes {u}, {v} share color {} but not a center",
                color_of[u]
            )));
        }
    }

    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut cluster_color = Vec::new();
    let cluster_of: Vec<Option<usize>> = (0..n)
        .map(|v| {
            let key = (color_of[v], center_of[v]);
            let next = ids.len();
            Some(*ids.entry(key).or_insert_with(|| {
                cluster_color.push(color_of[v]);
                next
            }))
        })
        .collect();
    let decomposition = NetworkDecomposition::from_assignment(g, cluster_of, cluster_color, 1);
    let d_bound = 2 * (0..n).map(|v| radius_of[v] + q).max().unwrap_or(0);
    let c_bound = q * classes.len();
    let rep = verify_decomposition(g, &decomposition, d_bound, c_bound);
    if !rep.valid {
        return Err(Error::invariant(format!("decomposition fails verification: {}", rep.to_json())));
    }
    Ok(CfDecompositionRun {
        assignment: ClusterAssignment { center_of, color_of, radius_of, epsilon, q },
        decomposition,
        classes,
        d_bound,
        c_bound,
    })
}
