//! Weak and λ-local splitting of bipartite graphs.
//!
//! A splitting colors the right side red or blue so that every left node
//! sees enough of both colors among its neighbors.

use crate::decomposition::{ball_growing_decomposition, NetworkDecomposition};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Graph};
use crate::rng::{node_stream, Stream};
use crate::slocal::{run_slocal, Ctx, ExecutionTrace, Ordering, Phase, SlocalAlgorithm};
use rand::Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

const RED: &str = "red";

/// Red/blue assignment of the right side; `true` is red.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitColoring {
    pub red: Vec<bool>,
}

impl SplitColoring {
    pub fn all_red(n: usize) -> Self {
        SplitColoring { red: vec![true; n] }
    }

    pub fn to_json(&self) -> Value {
        let (red, blue): (Vec<usize>, Vec<usize>) = (0..self.red.len()).partition(|&v| self.red[v]);
        json!({ "red": red, "blue": blue })
    }

    pub fn from_json(value: &Value, n: usize) -> Result<Self> {
        let ids = |key: &str| -> Result<Vec<usize>> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::invalid(format!("split JSON: missing \"{key}\"")))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|x| x as usize)
                        .filter(|&x| x < n)
                        .ok_or_else(|| Error::invalid(format!("split JSON: bad node {x}")))
                })
                .collect()
        };
        let mut seen = vec![None; n];
        for (key, is_red) in [("red", true), ("blue", false)] {
            for v in ids(key)? {
                if seen[v].replace(is_red).is_some() {
                    return Err(Error::invalid(format!("split JSON: node {v} listed twice")));
                }
            }
        }
        let red = seen
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| Error::invalid(format!("split JSON: node {v} uncolored"))))
            .collect::<Result<_>>()?;
        Ok(SplitColoring { red })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideCounts {
    pub red: usize,
    pub blue: usize,
    pub threshold: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub valid: bool,
    pub counts: Vec<SideCounts>,
    pub violators: Vec<usize>,
}

impl SplitReport {
    pub fn to_json(&self) -> Value {
        let counts: Vec<Value> = self
            .counts
            .iter()
            .enumerate()
            .map(|(u, c)| json!({ "u": u, "red": c.red, "blue": c.blue, "threshold": c.threshold }))
            .collect();
        json!({ "valid": self.valid, "violators": self.violators, "counts": counts })
    }
}

/// `floor(lambda * d)`, tolerant of rounding in `lambda`.
pub fn split_threshold(lambda: f64, degree: usize) -> usize {
    (lambda * degree as f64 + 1e-9).floor().max(0.0) as usize
}

fn verify_with(b: &BipartiteGraph, coloring: &SplitColoring, threshold: impl Fn(usize) -> usize) -> SplitReport {
    let mut counts = Vec::with_capacity(b.left_count());
    let mut violators = Vec::new();
    for u in 0..b.left_count() {
        let nbrs = b.left_neighbors(u);
        let red = nbrs.iter().filter(|&&v| coloring.red.get(v).copied().unwrap_or(false)).count();
        let blue = nbrs.len() - red;
        let t = threshold(nbrs.len());
        if red.min(blue) < t {
            violators.push(u);
        }
        counts.push(SideCounts { red, blue, threshold: t });
    }
    let valid = violators.is_empty() && coloring.red.len() == b.right_count();
    SplitReport { valid, counts, violators }
}

/// Every left node needs at least `floor(lambda * d(u))` neighbors of each color.
pub fn verify_lambda_split(b: &BipartiteGraph, coloring: &SplitColoring, lambda: f64) -> SplitReport {
    verify_with(b, coloring, |d| split_threshold(lambda, d))
}

/// Every left node needs at least one neighbor of each color.
pub fn verify_weak_split(b: &BipartiteGraph, coloring: &SplitColoring) -> SplitReport {
    verify_with(b, coloring, |_| 1)
}

/// Zero-round solver: each right node flips its own fair coin.
pub fn random_split(b: &BipartiteGraph, seed: u64) -> SplitColoring {
    SplitColoring { red: (0..b.right_count()).map(|v| node_stream(seed, v).gen_bool(0.5)).collect() }
}

/// Right nodes are adjacent when they share a left neighbor. Quadratic in
/// the left degrees.
pub fn conflict_graph(b: &BipartiteGraph) -> Graph {
    let n = b.right_count();
    let mut mark = vec![usize::MAX; n];
    let mut adj = vec![Vec::new(); n];
    for (v, list) in adj.iter_mut().enumerate() {
        mark[v] = v;
        for &u in b.right_neighbors(v) {
            for &w in b.left_neighbors(u) {
                if mark[w] != v {
                    mark[w] = v;
                    list.push(w);
                }
            }
        }
        list.sort_unstable();
    }
    Graph::from_sorted_adjacency(adj)
}

/// Requires `lo <= #red - #blue <= hi` over `members`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceConstraint {
    pub members: Vec<usize>,
    pub lo: i64,
    pub hi: i64,
}

impl BalanceConstraint {
    pub fn symmetric(members: Vec<usize>, bound: i64) -> Self {
        BalanceConstraint { members, lo: -bound, hi: bound }
    }
}

pub const EXHAUSTIVE_LIMIT: usize = 20;

struct Indexed {
    members: Vec<usize>,
    lo: i64,
    hi: i64,
}

fn satisfied(cons: &[Indexed], red: &[bool]) -> bool {
    cons.iter().all(|c| {
        let r = c.members.iter().filter(|&&i| red[i]).count() as i64;
        let d = 2 * r - c.members.len() as i64;
        c.lo <= d && d <= c.hi
    })
}

/// Fixes nodes one by one, each time picking the color that keeps the sum
/// over constraints of `E[exp(eta (D - hi))] + E[exp(eta (lo - D))]` smallest
/// when the rest is colored at random. Ties go to red.
fn conditional_expectation(n: usize, cons: &[Indexed], by_node: &[Vec<usize>], eta: f64) -> Option<Vec<bool>> {
    let log_cosh = eta.cosh().ln();
    let phi = |c: &Indexed, fixed: i64, open: usize| {
        let base = open as f64 * log_cosh;
        (base + eta * (fixed - c.hi) as f64).exp() + (base + eta * (c.lo - fixed) as f64).exp()
    };
    let mut fixed = vec![0i64; cons.len()];
    let mut open: Vec<usize> = cons.iter().map(|c| c.members.len()).collect();
    let mut red = vec![false; n];
    for x in 0..n {
        let (mut pr, mut pb) = (0.0, 0.0);
        for &c in &by_node[x] {
            pr += phi(&cons[c], fixed[c] + 1, open[c] - 1);
            pb += phi(&cons[c], fixed[c] - 1, open[c] - 1);
        }
        if !pr.is_finite() || !pb.is_finite() {
            return None;
        }
        red[x] = pr <= pb;
        for &c in &by_node[x] {
            fixed[c] += if red[x] { 1 } else { -1 };
            open[c] -= 1;
        }
    }
    satisfied(cons, &red).then_some(red)
}

fn exhaustive(n: usize, cons: &[Indexed]) -> Option<Vec<bool>> {
    let masks: Vec<(u32, i64, i64, i64)> = cons
        .iter()
        .map(|c| (c.members.iter().fold(0u32, |m, &i| m | 1 << i), c.members.len() as i64, c.lo, c.hi))
        .collect();
    (0u32..1 << n)
        .find(|&assign| {
            masks.iter().all(|&(m, s, lo, hi)| {
                let d = 2 * (assign & m).count_ones() as i64 - s;
                lo <= d && d <= hi
            })
        })
        .map(|assign| (0..n).map(|i| assign >> i & 1 == 1).collect())
}

/// Finds a red/blue assignment of `nodes` meeting every constraint. Tries
/// the deterministic conditional-expectation pass, then `retries` random
/// draws, then exhaustive search when there are at most
/// [`EXHAUSTIVE_LIMIT`] nodes. The result is aligned with `nodes`.
pub fn balanced_coloring_search(
    nodes: &[usize],
    constraints: &[BalanceConstraint],
    retries: usize,
    rng: &mut Stream,
) -> Result<Vec<bool>> {
    let n = nodes.len();
    let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut cons = Vec::with_capacity(constraints.len());
    let mut by_node = vec![Vec::new(); n];
    for (ci, c) in constraints.iter().enumerate() {
        let members = c
            .members
            .iter()
            .map(|v| pos.get(v).copied().ok_or_else(|| Error::invalid(format!("constraint {ci} names node {v} outside the cluster"))))
            .collect::<Result<Vec<usize>>>()?;
        for &i in &members {
            by_node[i].push(ci);
        }
        cons.push(Indexed { members, lo: c.lo, hi: c.hi });
    }
    let infeasible = || Error::InfeasibleBound(format!("no balanced coloring of {n} nodes under {} constraints", cons.len()));
    if cons.iter().any(|c| c.lo > c.hi) {
        return Err(infeasible());
    }
    for eta in [0.1, 0.3, 1.0, 0.03] {
        if let Some(red) = conditional_expectation(n, &cons, &by_node, eta) {
            return Ok(red);
        }
    }
    for _ in 0..retries {
        let red: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if satisfied(&cons, &red) {
            return Ok(red);
        }
    }
    if n <= EXHAUSTIVE_LIMIT {
        if let Some(red) = exhaustive(n, &cons) {
            return Ok(red);
        }
    }
    Err(infeasible())
}

/// What each left node asks of the sequential splitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitTarget {
    /// Per-cluster discrepancy at most `alpha (sqrt(s ln n) + ln n)`.
    Discrepancy,
    /// At least `floor(lambda d(u))` of each color.
    Lambda(f64),
    /// At least one of each color.
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitParams {
    pub alpha: f64,
    pub target: SplitTarget,
    pub retries: usize,
}

impl Default for SplitParams {
    fn default() -> Self {
        SplitParams { alpha: 4.0, target: SplitTarget::Discrepancy, retries: 64 }
    }
}

pub fn ln_n(b: &BipartiteGraph) -> f64 {
    (b.node_count().max(2) as f64).ln()
}

/// `alpha (sqrt(s ln n) + ln n)` for a cluster meeting `s` neighbors of a left node.
pub fn cluster_bound(alpha: f64, s: usize, ln_n: f64) -> f64 {
    alpha * ((s as f64 * ln_n).sqrt() + ln_n)
}

/// `alpha (sqrt(k d ln n) + k ln n)` for a left node of degree `d` touching `k` clusters.
pub fn combined_bound(alpha: f64, k: usize, d: usize, ln_n: f64) -> f64 {
    alpha * ((k as f64 * d as f64 * ln_n).sqrt() + k as f64 * ln_n)
}

/// Colors still missing after `r` of the `s` cluster nodes go red.
fn deficit(s: usize, need_red: usize, need_blue: usize, r: usize) -> usize {
    need_red.saturating_sub(r) + need_blue.saturating_sub(s - r)
}

/// Range of `r` in `0..=s` leaving at most `slack` missing colors. The
/// deficit is convex in `r`, so the range is contiguous.
fn reds_within(s: usize, need_red: usize, need_blue: usize, slack: usize) -> Option<(usize, usize)> {
    let ok = |r: usize| deficit(s, need_red, need_blue, r) <= slack;
    let lo = (0..=s).find(|&r| ok(r))?;
    let hi = (lo..=s).rev().find(|&r| ok(r))?;
    Some((lo, hi))
}

fn cluster_phase(
    b: Arc<BipartiteGraph>,
    dec: Arc<NetworkDecomposition>,
    members: Arc<Vec<Vec<usize>>>,
    params: SplitParams,
    locality: usize,
    write_radius: usize,
) -> Phase {
    let ln = ln_n(&b);
    Phase::new(locality, write_radius, move |ctx: &mut dyn Ctx| {
        let v = ctx.node();
        if ctx.query(0)?.get(v).is_some_and(|view| view.memory.contains_key(RED)) {
            return Ok(());
        }
        let c = dec.cluster_of[v].ok_or_else(|| Error::invariant(format!("right node {v} unclustered")))?;
        let cluster = &members[c];
        let snap = ctx.query(dec.weak_diameters[c] + 1)?;
        let mut touching: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in cluster {
            for &u in b.right_neighbors(x) {
                touching.entry(u).or_default().push(x);
            }
        }
        // Each left node gets a preferred range for #red - #blue inside the
        // cluster and a wider fallback range.
        let mut tight = Vec::with_capacity(touching.len());
        let mut loose = Vec::with_capacity(touching.len());
        for (u, inside) in touching {
            let s = inside.len();
            let (mut red, mut blue, mut future) = (0usize, 0usize, 0usize);
            for &w in b.left_neighbors(u) {
                if dec.cluster_of[w] == Some(c) {
                    continue;
                }
                let view = snap
                    .get(w)
                    .ok_or_else(|| Error::invariant(format!("neighbor {w} of left node {u} outside the gathered ball")))?;
                match view.memory.get(RED).and_then(Value::as_bool) {
                    Some(true) => red += 1,
                    Some(false) => blue += 1,
                    None => future += 1,
                }
            }
            let to_signed = |(rl, rh): (usize, usize)| (2 * rl as i64 - s as i64, 2 * rh as i64 - s as i64);
            let (pref, wide) = match params.target {
                SplitTarget::Discrepancy => {
                    // Lean against the imbalance left by earlier clusters.
                    let bound = cluster_bound(params.alpha, s, ln).floor() as i64;
                    let prior = red as i64 - blue as i64;
                    let shifted = ((-bound).max(-prior - bound), bound.min(-prior + bound));
                    (shifted, (-bound, bound))
                }
                SplitTarget::Lambda(_) | SplitTarget::Weak => {
                    let t = match params.target {
                        SplitTarget::Lambda(l) => split_threshold(l, b.left_degree(u)),
                        _ => 1,
                    };
                    let (nr, nb) = (t.saturating_sub(red), t.saturating_sub(blue));
                    let wide = reds_within(s, nr, nb, future).ok_or_else(|| {
                        Error::InfeasibleBound(format!("left node {u} cannot reach {t} neighbors of each color"))
                    })?;
                    let best = (0..=s).map(|r| deficit(s, nr, nb, r)).min().unwrap();
                    (to_signed(reds_within(s, nr, nb, best).unwrap()), to_signed(wide))
                }
            };
            tight.push(BalanceConstraint { members: inside.clone(), lo: pref.0, hi: pref.1 });
            loose.push(BalanceConstraint { members: inside, lo: wide.0, hi: wide.1 });
        }
        let red = match balanced_coloring_search(cluster, &tight, params.retries, ctx.rng()) {
            Ok(red) => red,
            Err(Error::InfeasibleBound(_)) => balanced_coloring_search(cluster, &loose, params.retries, ctx.rng())?,
            Err(e) => return Err(e),
        };
        for (&x, &r) in cluster.iter().zip(&red) {
            ctx.write(x, RED, json!(r))?;
        }
        Ok(())
    })
}

#[derive(Clone, Debug)]
pub struct SlocalSplitRun {
    pub coloring: SplitColoring,
    pub trace: ExecutionTrace,
    pub decomposition: NetworkDecomposition,
    /// Clusters met by each left node's neighborhood.
    pub touched: Vec<usize>,
    /// `#red - #blue` over each left node's neighborhood.
    pub discrepancy: Vec<i64>,
    /// Lower bound on `min(#red, #blue) / d(u)` implied by the discrepancy
    /// bound at the minimum left degree; 0 when the bound is vacuous.
    pub lambda_reported: f64,
}

/// Sequential splitter on the conflict graph: decompose it, then the first
/// node of each cluster in `order` colors the whole cluster, seeing every
/// earlier color within one hop of the cluster.
pub fn slocal_lambda_split(b: &BipartiteGraph, order: &Ordering, params: SplitParams, seed: u64) -> Result<SlocalSplitRun> {
    let nv = b.right_count();
    if order.len() != nv {
        return Err(Error::invalid(format!("ordering has {} labels for {nv} right nodes", order.len())));
    }
    if !(params.alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }
    if let SplitTarget::Lambda(l) = params.target {
        if !(0.0..=0.5).contains(&l) {
            return Err(Error::invalid(format!("lambda {l} outside [0, 1/2]")));
        }
    }
    let g = conflict_graph(b);
    let dec = ball_growing_decomposition(&g)?;
    let max_wd = dec.max_weak_diameter();
    let alg = SlocalAlgorithm::new(
        "slocal-split",
        vec![cluster_phase(
            Arc::new(b.clone()),
            Arc::new(dec.clone()),
            Arc::new(dec.clusters()),
            params,
            max_wd + 1,
            max_wd,
        )],
    );
    let trace = run_slocal(&g, &alg, order, seed)?;
    let red = trace
        .states
        .iter()
        .enumerate()
        .map(|(v, s)| s.memory.get(RED).and_then(Value::as_bool).ok_or_else(|| Error::invariant(format!("right node {v} left uncolored"))))
        .collect::<Result<Vec<bool>>>()?;
    let coloring = SplitColoring { red };

    let ln = ln_n(b);
    let mut touched = Vec::with_capacity(b.left_count());
    let mut discrepancy = Vec::with_capacity(b.left_count());
    for u in 0..b.left_count() {
        let mut per: BTreeMap<usize, (usize, i64)> = BTreeMap::new();
        for &w in b.left_neighbors(u) {
            let e = per.entry(dec.cluster_of[w].unwrap()).or_default();
            e.0 += 1;
            e.1 += if coloring.red[w] { 1 } else { -1 };
        }
        let total: i64 = per.values().map(|p| p.1).sum();
        if params.target == SplitTarget::Discrepancy {
            for (&c, &(s, d)) in &per {
                if d.unsigned_abs() as f64 > cluster_bound(params.alpha, s, ln) {
                    return Err(Error::invariant(format!("left node {u}, cluster {c}: discrepancy {d} over {s} nodes")));
                }
            }
            if total.unsigned_abs() as f64 > combined_bound(params.alpha, per.len(), b.left_degree(u), ln) {
                return Err(Error::invariant(format!("left node {u}: combined discrepancy {total}")));
            }
        }
        touched.push(per.len());
        discrepancy.push(total);
    }
    let report = match params.target {
        SplitTarget::Discrepancy => None,
        SplitTarget::Lambda(l) => Some(verify_lambda_split(b, &coloring, l)),
        SplitTarget::Weak => Some(verify_weak_split(b, &coloring)),
    };
    if let Some(rep) = report.filter(|r| !r.valid) {
        return Err(Error::invariant(format!("split misses its target at left nodes {:?}", rep.violators)));
    }
    let k_max = touched.iter().copied().max().unwrap_or(0);
    let delta = b.min_left_degree();
    let lambda_reported = if delta == 0 {
        0.0
    } else {
        let ratio = k_max as f64 * ln / delta as f64;
        (0.5 - params.alpha * (ratio.sqrt() + ratio) / 2.0).max(0.0)
    };
    Ok(SlocalSplitRun { coloring, trace, decomposition: dec, touched, discrepancy, lambda_reported })
}

/// The sequential splitter aiming only at one neighbor of each color.
pub fn slocal_weak_split(b: &BipartiteGraph, order: &Ordering, seed: u64) -> Result<SlocalSplitRun> {
    slocal_lambda_split(b, order, SplitParams { target: SplitTarget::Weak, ..SplitParams::default() }, seed)
}

/// Cuts a neighborhood into consecutive parts of size `delta`; a short
/// remainder is evened out with the part before it (or merged into it when
/// halves would drop below two nodes).
pub fn partition_neighborhood(nbrs: &[usize], delta: usize) -> Vec<Vec<usize>> {
    let mut parts: Vec<Vec<usize>> = nbrs.chunks(delta.max(1)).map(<[usize]>::to_vec).collect();
    let rem = nbrs.len() % delta.max(1);
    if parts.len() >= 2 && rem > 0 && 2 * rem <= delta {
        let tail = parts.pop().unwrap();
        let mut last = parts.pop().unwrap();
        last.extend(tail);
        let total = last.len();
        if total / 2 >= 2 {
            let second = last.split_off(total.div_ceil(2));
            parts.push(last);
            parts.push(second);
        } else {
            parts.push(last);
        }
    }
    parts
}

#[derive(Clone, Debug)]
pub struct WeakReduction {
    pub coloring: SplitColoring,
    /// One left node per part.
    pub reduced: BipartiteGraph,
    /// Original left node owning each part.
    pub owner: Vec<usize>,
}

/// Solves `1/delta`-splitting with a weak splitter: every left node of
/// degree at least `delta` is replaced by one left node per part of its
/// neighborhood, and a bichromatic part gives one neighbor of each color.
pub fn reduce_lambda_to_weak(
    b: &BipartiteGraph,
    delta: usize,
    weak_oracle: impl FnOnce(&BipartiteGraph) -> Result<SplitColoring>,
) -> Result<WeakReduction> {
    if delta < 2 {
        return Err(Error::invalid("delta must be at least 2"));
    }
    let mut owner = Vec::new();
    let mut edges = Vec::new();
    for u in 0..b.left_count() {
        if b.left_degree(u) < delta {
            continue;
        }
        for part in partition_neighborhood(b.left_neighbors(u), delta) {
            if part.len() < 2 {
                return Err(Error::invariant(format!("left node {u}: part of size {}", part.len())));
            }
            edges.extend(part.iter().map(|&v| (owner.len(), v)));
            owner.push(u);
        }
    }
    let reduced = BipartiteGraph::new(owner.len(), b.right_count(), &edges)?;
    let coloring = weak_oracle(&reduced)?;
    let weak = verify_weak_split(&reduced, &coloring);
    if !weak.valid {
        return Err(Error::OracleFailure(format!(
            "weak splitter failed at reduced left nodes {:?}",
            weak.violators
        )));
    }
    let rep = verify_lambda_split(b, &coloring, 1.0 / delta as f64);
    if !rep.valid {
        return Err(Error::invariant(format!("reduction lost the 1/{delta} split at {:?}", rep.violators)));
    }
    Ok(WeakReduction { coloring, reduced, owner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_bipartite;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star(d: usize) -> BipartiteGraph {
        BipartiteGraph::new(1, d, &(0..d).map(|v| (0, v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn verifier_examples() {
        let b = star(2);
        let mixed = SplitColoring { red: vec![true, false] };
        assert!(verify_lambda_split(&b, &mixed, 0.5).valid);
        let rep = verify_lambda_split(&b, &SplitColoring::all_red(2), 0.5);
        assert_eq!(rep.violators, vec![0]);
        assert_eq!(rep.counts[0], SideCounts { red: 2, blue: 0, threshold: 1 });
        assert!(verify_lambda_split(&star(5), &SplitColoring::all_red(5), 0.1).valid);
        assert!(!verify_weak_split(&star(5), &SplitColoring::all_red(5)).valid);
    }

    #[test]
    fn thresholds_survive_rounding() {
        assert_eq!(split_threshold(1.0 / 3.0, 3), 1);
        assert_eq!(split_threshold(1.0 / 4.0, 10), 2);
        assert_eq!(split_threshold(0.1, 5), 0);
    }

    #[test]
    fn json_round_trip() {
        let c = SplitColoring { red: vec![true, false, false, true] };
        let j = c.to_json();
        assert_eq!(j, json!({"red": [0, 3], "blue": [1, 2]}));
        assert_eq!(SplitColoring::from_json(&j, 4).unwrap(), c);
        assert!(SplitColoring::from_json(&json!({"red": [0], "blue": [0]}), 1).is_err());
        assert!(SplitColoring::from_json(&json!({"red": [0], "blue": []}), 2).is_err());
    }

    #[test]
    fn random_split_basics() {
        let empty = BipartiteGraph::new(3, 0, &[]).unwrap();
        assert!(random_split(&empty, 1).red.is_empty());
        let b = star(8);
        assert_eq!(random_split(&b, 5), random_split(&b, 5));
        assert_eq!(random_split(&b, 5).to_json(), json!({"red": [0, 1, 5], "blue": [2, 3, 4, 6, 7]}));
    }

    #[test]
    fn conflict_graph_is_shared_neighbors() {
        let b = BipartiteGraph::new(2, 4, &[(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        let g = conflict_graph(&b);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.degree(3), 0);
    }

    fn rng() -> Stream {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn search_examples() {
        let red = balanced_coloring_search(&[4, 9], &[BalanceConstraint::symmetric(vec![4, 9], 5)], 0, &mut rng()).unwrap();
        assert_eq!(red.iter().filter(|&&r| r).count(), 1);
        let red = balanced_coloring_search(&[0, 1, 2], &[BalanceConstraint::symmetric(vec![0, 1, 2], 1)], 4, &mut rng()).unwrap();
        let r = red.iter().filter(|&&r| r).count();
        assert!(r == 1 || r == 2);
        let err = balanced_coloring_search(&[0, 1], &[BalanceConstraint { members: vec![0, 1], lo: 1, hi: 1 }], 4, &mut rng());
        assert!(matches!(err, Err(Error::InfeasibleBound(_))));
        assert!(balanced_coloring_search(&[0], &[BalanceConstraint::symmetric(vec![3], 1)], 1, &mut rng()).is_err());
    }

    #[test]
    fn search_matches_exhaustive_feasibility() {
        let mut r = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = r.gen_range(1..=10);
            let nodes: Vec<usize> = (0..n).collect();
            let cons: Vec<BalanceConstraint> = (0..r.gen_range(1..=5))
                .map(|_| {
                    let members: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.6)).collect();
                    let bound = r.gen_range(0..=2);
                    let shift = r.gen_range(-1..=1);
                    BalanceConstraint { members, lo: shift - bound, hi: shift + bound }
                })
                .collect();
            let exists = (0u32..1 << n).any(|mask| {
                cons.iter().all(|c| {
                    let d: i64 = c.members.iter().map(|&i| if mask >> i & 1 == 1 { 1 } else { -1 }).sum();
                    c.lo <= d && d <= c.hi
                })
            });
            let found = balanced_coloring_search(&nodes, &cons, 2, &mut r);
            assert_eq!(found.is_ok(), exists);
            if let Ok(red) = found {
                for c in &cons {
                    let d: i64 = c.members.iter().map(|&i| if red[i] { 1 } else { -1 }).sum();
                    assert!(c.lo <= d && d <= c.hi);
                }
            }
        }
    }

    #[test]
    fn overlapping_windows_with_tight_bounds() {
        // Twelve nodes, five overlapping windows; bounds are the alpha = 4
        // cluster bounds scaled down until only a few assignments survive.
        let nodes: Vec<usize> = (0..12).collect();
        let cons: Vec<BalanceConstraint> = (0..5)
            .map(|i| {
                let members: Vec<usize> = (2 * i..2 * i + 4).collect();
                let bound = (cluster_bound(4.0, members.len(), 1.0) / 24.0).floor() as i64;
                BalanceConstraint::symmetric(members, bound)
            })
            .collect();
        assert!(cons.iter().all(|c| c.hi == 0));
        let red = balanced_coloring_search(&nodes, &cons, 0, &mut rng()).unwrap();
        for c in &cons {
            assert_eq!(c.members.iter().filter(|&&i| red[i]).count(), 2);
        }
    }

    #[test]
    fn two_node_example() {
        // The single conflict edge does not double the ball, so each node is
        // its own cluster; the second cluster leans against the first.
        let b = star(2);
        let run = slocal_lambda_split(&b, &Ordering::identity(2), SplitParams::default(), 0).unwrap();
        assert_eq!(run.decomposition.cluster_count(), 2);
        assert_eq!(run.coloring.red, vec![true, false]);
        assert_eq!(run.discrepancy, vec![0]);
    }

    #[test]
    fn empty_left_side_is_all_red() {
        let b = BipartiteGraph::new(0, 4, &[]).unwrap();
        let run = slocal_lambda_split(&b, &Ordering::identity(4), SplitParams::default(), 0).unwrap();
        assert_eq!(run.coloring, SplitColoring::all_red(4));
    }

    #[test]
    fn discrepancy_bounds_on_dense_instance() {
        let b = random_bipartite(6, 400, 300, 400, 2).unwrap();
        let ln = ln_n(&b);
        let run = slocal_lambda_split(&b, &Ordering::random(400, 1), SplitParams::default(), 9).unwrap();
        for u in 0..6 {
            let bound = combined_bound(4.0, run.touched[u], b.left_degree(u), ln);
            assert!(run.discrepancy[u].unsigned_abs() as f64 <= bound);
        }
        if run.lambda_reported > 0.0 {
            assert!(verify_lambda_split(&b, &run.coloring, run.lambda_reported).valid);
        }
    }

    #[test]
    fn lambda_and_weak_targets_are_met() {
        for seed in 0..10 {
            let b = random_bipartite(30, 60, 4, 12, seed).unwrap();
            let order = Ordering::random(60, seed);
            let run = slocal_lambda_split(&b, &order, SplitParams { target: SplitTarget::Lambda(0.25), ..SplitParams::default() }, seed).unwrap();
            assert!(verify_lambda_split(&b, &run.coloring, 0.25).valid);
            let run = slocal_weak_split(&b, &order, seed).unwrap();
            assert!(verify_weak_split(&b, &run.coloring).valid);
        }
    }

    #[test]
    fn weak_target_rejects_degree_one() {
        let b = star(1);
        assert!(matches!(slocal_weak_split(&b, &Ordering::identity(1), 0), Err(Error::InfeasibleBound(_))));
    }

    #[test]
    fn partition_examples() {
        let nbrs: Vec<usize> = (0..10).collect();
        let sizes: Vec<usize> = partition_neighborhood(&nbrs, 4).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(partition_neighborhood(&nbrs[..4], 4), vec![vec![0, 1, 2, 3]]);
        let sizes: Vec<usize> = partition_neighborhood(&nbrs[..5], 4).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 2]);
        let sizes: Vec<usize> = partition_neighborhood(&nbrs[..5], 2).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 3]);
        let sizes: Vec<usize> = partition_neighborhood(&nbrs[..7], 4).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 3]);
    }

    #[test]
    fn partition_rule_holds() {
        for delta in 2..12 {
            for d in delta..80 {
                let nbrs: Vec<usize> = (0..d).collect();
                let parts = partition_neighborhood(&nbrs, delta);
                let flat: Vec<usize> = parts.iter().flatten().copied().collect();
                assert_eq!(flat, nbrs);
                assert!(parts.len() >= d / delta);
                let hi = if delta == 2 { 3 } else { delta };
                for p in &parts {
                    assert!(p.len() >= delta.div_ceil(2).max(2) && p.len() <= hi, "d={d} delta={delta} {parts:?}");
                }
            }
        }
    }

    #[test]
    fn reduction_with_sequential_weak_oracle() {
        for seed in 0..20 {
            let b = random_bipartite(25, 80, 8, 30, seed).unwrap();
            let delta = 8;
            let red = reduce_lambda_to_weak(&b, delta, |bp| {
                slocal_weak_split(bp, &Ordering::random(bp.right_count(), seed), seed).map(|r| r.coloring)
            })
            .unwrap();
            assert!(verify_lambda_split(&b, &red.coloring, 0.125).valid);
        }
    }

    #[test]
    fn reduction_rejects_bad_oracle() {
        let b = star(6);
        let err = reduce_lambda_to_weak(&b, 3, |bp| Ok(SplitColoring::all_red(bp.right_count())));
        assert!(matches!(err, Err(Error::OracleFailure(_))));
    }
}
