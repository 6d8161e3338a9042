//! Conflict-free multicoloring of hypergraphs.
//!
//! Every node receives a non-empty set of colors; a hyperedge is happy when
//! some color is held by exactly one of its members.

use crate::error::{Error, Result};
use crate::graph::{Graph, Hypergraph, UNREACHED};
use crate::rng::node_stream;
use crate::slocal::{run_slocal_until, Ctx, ExecutionTrace, Ordering, Phase, SlocalAlgorithm};
use rand::Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiColoring {
    pub colors_of: Vec<BTreeSet<usize>>,
    pub q: usize,
}

impl MultiColoring {
    /// Palette size is the largest color used.
    pub fn new(colors_of: Vec<BTreeSet<usize>>) -> Self {
        let q = colors_of.iter().filter_map(|s| s.last().copied()).max().unwrap_or(0);
        MultiColoring { colors_of, q }
    }

    pub fn to_json(&self) -> Value {
        let colors: serde_json::Map<String, Value> = self
            .colors_of
            .iter()
            .enumerate()
            .map(|(v, s)| (v.to_string(), json!(s)))
            .collect();
        json!({ "q": self.q, "colors": colors })
    }

    pub fn from_json(value: &Value, n: usize) -> Result<Self> {
        let bad = |m: &str| Error::invalid(format!("coloring JSON: {m}"));
        let colors = value.get("colors").and_then(Value::as_object).ok_or_else(|| bad("missing colors"))?;
        let mut colors_of = vec![BTreeSet::new(); n];
        for (k, list) in colors {
            let v: usize = k.parse().map_err(|_| bad("node key"))?;
            if v >= n {
                return Err(bad("node out of range"));
            }
            for c in list.as_array().ok_or_else(|| bad("color list"))? {
                colors_of[v].insert(c.as_u64().ok_or_else(|| bad("color"))? as usize);
            }
        }
        let mut mc = MultiColoring::new(colors_of);
        if let Some(q) = value.get("q").and_then(Value::as_u64) {
            mc.q = mc.q.max(q as usize);
        }
        Ok(mc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfReport {
    pub valid: bool,
    /// Smallest uniquely held color per hyperedge.
    pub witnesses: Vec<Option<usize>>,
    /// Hyperedges without a unique color.
    pub violations: Vec<usize>,
    /// Nodes with an empty color set or a color outside `1..=q`.
    pub bad_nodes: Vec<usize>,
}

impl CfReport {
    pub fn to_json(&self) -> Value {
        json!({
            "valid": self.valid,
            "violations": self.violations,
            "bad_nodes": self.bad_nodes,
            "witnesses": self.witnesses,
        })
    }
}

/// Smallest color held by exactly one member of `edge`.
pub fn unique_color(edge: &[usize], colors_of: &[BTreeSet<usize>]) -> Option<usize> {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in edge {
        for &c in &colors_of[v] {
            *count.entry(c).or_default() += 1;
        }
    }
    count.into_iter().find(|&(_, k)| k == 1).map(|(c, _)| c)
}

pub fn verify_cf(h: &Hypergraph, coloring: &MultiColoring) -> CfReport {
    let n = h.n();
    let mut bad_nodes = Vec::new();
    for v in 0..n {
        match coloring.colors_of.get(v) {
            Some(s) if !s.is_empty() && s.iter().all(|&c| c >= 1 && c <= coloring.q) => {}
            _ => bad_nodes.push(v),
        }
    }
    if coloring.colors_of.len() < n {
        let witnesses = vec![None; h.edge_count()];
        return CfReport { valid: false, violations: (0..h.edge_count()).collect(), witnesses, bad_nodes };
    }
    let witnesses: Vec<Option<usize>> = h.edges().iter().map(|e| unique_color(e, &coloring.colors_of)).collect();
    let violations: Vec<usize> = (0..witnesses.len()).filter(|&i| witnesses[i].is_none()).collect();
    CfReport { valid: violations.is_empty() && bad_nodes.is_empty(), witnesses, violations, bad_nodes }
}

/// Zero-round coloring: every node takes each color of `1..q` independently
/// with probability `1/k`, where `k` is the smallest edge size; nodes left
/// empty take color `q`.
pub fn random_cf(h: &Hypergraph, q: usize, seed: u64) -> Result<MultiColoring> {
    if q < 2 {
        return Err(Error::invalid("random coloring needs q >= 2"));
    }
    let k = h.min_edge_size().max(1);
    let p = 1.0 / k as f64;
    let colors_of = (0..h.n())
        .map(|v| {
            let mut rng = node_stream(seed, v);
            let mut s: BTreeSet<usize> = (1..q).filter(|_| rng.gen_bool(p)).collect();
            if s.is_empty() {
                s.insert(q);
            }
            s
        })
        .collect();
    Ok(MultiColoring { colors_of, q })
}

/// Undirected multigraph stored as neighbor -> multiplicity maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    adj: Vec<BTreeMap<usize, usize>>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { adj: vec![BTreeMap::new(); n] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n() || v >= self.n() {
            return Err(Error::invalid(format!("bad multigraph edge ({u}, {v})")));
        }
        *self.adj[u].entry(v).or_default() += 1;
        *self.adj[v].entry(u).or_default() += 1;
        Ok(())
    }

    /// One parallel edge per pair of members, per hyperedge.
    pub fn from_hyperedges<'a>(n: usize, edges: impl IntoIterator<Item = &'a Vec<usize>>) -> Self {
        let mut g = Multigraph::new(n);
        for e in edges {
            for (i, &a) in e.iter().enumerate() {
                for &b in &e[i + 1..] {
                    *g.adj[a].entry(b).or_default() += 1;
                    *g.adj[b].entry(a).or_default() += 1;
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().map(|(&w, &m)| (w, m))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].values().sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectiveColoring {
    pub color_of: Vec<usize>,
    pub defect: usize,
}

fn same_color_count(g: &Multigraph, color_of: &[usize], v: usize, c: usize) -> usize {
    g.neighbors(v).filter(|&(w, _)| color_of[w] == c).map(|(_, m)| m).sum()
}

/// Largest number of same-colored incident edges, parallel edges counted.
pub fn measure_defect(g: &Multigraph, color_of: &[usize]) -> usize {
    (0..g.n()).map(|v| same_color_count(g, color_of, v, color_of[v])).max().unwrap_or(0)
}

/// Greedy pass in ascending id (least-loaded color among colored neighbors,
/// ties to the smaller color), then local moves until every node `v` has at
/// most `floor(deg(v) / q)` same-colored incident edges. Every move strictly
/// lowers the number of monochromatic edges, so the repair terminates.
pub fn greedy_defective_coloring(g: &Multigraph, q: usize) -> Result<DefectiveColoring> {
    if q == 0 {
        return Err(Error::invalid("defective coloring needs q >= 1"));
    }
    let n = g.n();
    let mut color_of = vec![0usize; n];
    let load = |color_of: &[usize], v: usize| {
        let mut count = vec![0usize; q + 1];
        for (w, m) in g.neighbors(v) {
            count[color_of[w]] += m;
        }
        count
    };
    for v in 0..n {
        let count = load(&color_of, v);
        color_of[v] = (1..=q).min_by_key(|&c| (count[c], c)).unwrap();
    }
    let mut queue: Vec<usize> = (0..n).collect();
    let mut queued = vec![true; n];
    while let Some(v) = queue.pop() {
        queued[v] = false;
        let count = load(&color_of, v);
        let limit = g.degree(v) / q;
        if count[color_of[v]] <= limit {
            continue;
        }
        let best = (1..=q).min_by_key(|&c| (count[c], c)).unwrap();
        color_of[v] = best;
        for (w, _) in g.neighbors(v) {
            if !queued[w] {
                queued[w] = true;
                queue.push(w);
            }
        }
    }
    let defect = measure_defect(g, &color_of);
    Ok(DefectiveColoring { color_of, defect })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowRankRun {
    pub coloring: MultiColoring,
    /// Max multigraph degree before each phase.
    pub deltas: Vec<usize>,
    pub phases: usize,
}

/// Phase `i` uses the fresh palette `(i-1)*2κ + 1 ..= i*2κ`: color the
/// pair multigraph of the remaining hyperedges with defect at most
/// `Δ_i / 2κ`, then drop every hyperedge that now has a unique color.
/// Nodes left without colors get one trailing default color.
pub fn lowrank_cf(h: &Hypergraph) -> Result<LowRankRun> {
    let n = h.n();
    let kappa = h.rank().max(1);
    let q = 2 * kappa;
    let mut colors_of = vec![BTreeSet::new(); n];
    let mut remaining: Vec<usize> = (0..h.edge_count()).collect();
    let mut deltas = Vec::new();
    let mut phase = 0;
    while !remaining.is_empty() {
        let mg = Multigraph::from_hyperedges(n, remaining.iter().map(|&i| &h.edges()[i]));
        let delta = mg.max_degree();
        if let Some(&prev) = deltas.last() {
            if 2 * delta > prev {
                return Err(Error::invariant(format!("phase {phase}: degree {delta} is more than half of {prev}")));
            }
        }
        deltas.push(delta);
        let dc = greedy_defective_coloring(&mg, q)?;
        let offset = phase * q;
        let mut touched = vec![false; n];
        for &i in &remaining {
            for &v in &h.edges()[i] {
                touched[v] = true;
            }
        }
        for v in (0..n).filter(|&v| touched[v]) {
            colors_of[v].insert(offset + dc.color_of[v]);
        }
        phase += 1;
        remaining.retain(|&i| unique_color(&h.edges()[i], &colors_of).is_none());
    }
    let default = phase * q + 1;
    for s in colors_of.iter_mut().filter(|s| s.is_empty()) {
        s.insert(default);
    }
    Ok(LowRankRun { coloring: MultiColoring::new(colors_of), deltas, phases: phase })
}

/// Expected number of uniquely hit edges when every undecided node joins
/// with probability `p`. `state[v]`: None undecided, Some(b) decided.
fn unique_estimate(edges: &[Vec<usize>], state: &HashMap<usize, bool>, p: f64) -> f64 {
    edges
        .iter()
        .map(|e| {
            let (mut fixed_in, mut open) = (0, 0);
            for v in e {
                match state.get(v) {
                    Some(true) => fixed_in += 1,
                    Some(false) => {}
                    None => open += 1,
                }
            }
            match fixed_in {
                0 => open as f64 * p * (1.0 - p).powi(open as i32 - 1),
                1 => (1.0 - p).powi(open as i32),
                _ => 0.0,
            }
        })
        .sum()
}

fn uniquely_hit(edges: &[Vec<usize>], chosen: &HashSet<usize>) -> usize {
    edges.iter().filter(|e| e.iter().filter(|v| chosen.contains(v)).count() == 1).count()
}

/// A subset of `nodes` hitting at least a `theta` fraction of `edges` in
/// exactly one node. Tries `retries` random draws (inclusion probability
/// `1/k`), then fixes nodes one by one by conditional expectations.
pub fn unique_subset_search(
    nodes: &[usize],
    edges: &[Vec<usize>],
    k: usize,
    theta: f64,
    retries: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let need = (theta * edges.len() as f64).ceil() as usize;
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let p = 1.0 / k.max(1) as f64;
    for _ in 0..retries {
        let chosen: HashSet<usize> = nodes.iter().copied().filter(|_| rng.gen_bool(p)).collect();
        if uniquely_hit(edges, &chosen) >= need {
            let mut s: Vec<usize> = chosen.into_iter().collect();
            s.sort_unstable();
            return Ok(s);
        }
    }
    let mut state = HashMap::new();
    for &v in nodes {
        state.insert(v, true);
        let with = unique_estimate(edges, &state, p);
        state.insert(v, false);
        let without = unique_estimate(edges, &state, p);
        state.insert(v, with > without);
    }
    let chosen: HashSet<usize> = state.iter().filter(|&(_, &b)| b).map(|(&v, _)| v).collect();
    let hit = uniquely_hit(edges, &chosen);
    if hit < need {
        return Err(Error::InfeasibleThreshold(format!(
            "best subset hits {hit} of {} edges uniquely, need {need} (theta = {theta})",
            edges.len()
        )));
    }
    let mut s: Vec<usize> = chosen.into_iter().collect();
    s.sort_unstable();
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfParams {
    pub theta: f64,
    pub retries: usize,
}

impl Default for CfParams {
    fn default() -> Self {
        CfParams { theta: 1.0 / 20.0, retries: 200 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlocalCfRun {
    pub coloring: MultiColoring,
    pub trace: ExecutionTrace,
    /// Phases that colored at least one node.
    pub phases: usize,
    /// Unresolved hyperedges before phase 1, after phase 1, ...
    pub unresolved: Vec<usize>,
    /// Largest ball radius chosen in any phase.
    pub max_radius: usize,
    pub radius_bound: usize,
    pub phase_cap: usize,
}

fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Ball radius limit when growing until `|E[B_{r+2}]| <= 2 |E[B_r]|`.
/// The edge count doubles every two failed steps once it is positive, and
/// it is positive by radius 2 whenever the test fails at radius 0.
pub fn cf_radius_bound(m: usize) -> usize {
    2 * ceil_log2(m.max(1)) + 2
}

/// Phases after which fewer than one edge can remain at shrink rate
/// `1 - theta/2`.
pub fn cf_phase_cap(m: usize, theta: f64) -> usize {
    if m == 0 {
        return 0;
    }
    ((m as f64).ln() / -(1.0 - theta / 2.0).ln()).ceil() as usize + 1
}

const COLORS: &str = "colors";
const DONE: &str = "done";

fn colors_in(view: &crate::slocal::NodeView) -> BTreeSet<usize> {
    view.memory
        .get(COLORS)
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_u64).map(|c| c as usize).collect())
        .unwrap_or_default()
}

fn cf_phase(
    h: Arc<Hypergraph>,
    incidence: Arc<Vec<Vec<usize>>>,
    phase: usize,
    k: usize,
    params: CfParams,
    bound: usize,
) -> Phase {
    Phase::new(bound + 2, bound + 1, move |ctx: &mut dyn Ctx| {
        let v = ctx.node();
        let done_here = |view: &crate::slocal::NodeView| view.memory.get(DONE).and_then(Value::as_u64) == Some(phase as u64);
        let own = ctx.query(0)?;
        if done_here(own.get(v).unwrap()) {
            return Ok(());
        }
        let graph = ctx.shared_graph();
        let mut r = 0;
        let mut count = vec![0usize; phase + 1];
        let mut seen = vec![0usize; h.edge_count()];
        let mut stamp = 1;
        let (snap, dist, local) = loop {
            let snap = ctx.query(r + 2)?;
            // Distances inside the part of the ball not yet claimed this phase.
            let mut dist = vec![UNREACHED; graph.n()];
            dist[v] = 0;
            let mut ball = vec![v];
            let mut frontier = vec![v];
            for d in 1..=r + 2 {
                let mut next = Vec::new();
                for &x in &frontier {
                    for &y in graph.neighbors(x) {
                        if dist[y] == UNREACHED && snap.get(y).is_some_and(|s| !done_here(s)) {
                            dist[y] = d;
                            next.push(y);
                        }
                    }
                }
                ball.extend(&next);
                frontier = next;
            }
            let mut colors: Vec<Vec<usize>> = vec![Vec::new(); graph.n()];
            for &x in &ball {
                colors[x] = colors_in(snap.get(x).unwrap()).into_iter().collect();
            }
            let mut candidates = Vec::new();
            for &x in &ball {
                for &e in &incidence[x] {
                    if seen[e] != stamp {
                        seen[e] = stamp;
                        candidates.push(e);
                    }
                }
            }
            stamp += 1;
            // Unresolved edges with every member alive, keyed by their farthest member.
            let mut by_reach: Vec<(usize, usize)> = Vec::new();
            'edges: for e in candidates {
                let members = &h.edges()[e];
                let mut reach = 0;
                for &m in members {
                    if dist[m] == UNREACHED {
                        continue 'edges;
                    }
                    reach = reach.max(dist[m]);
                }
                for m in members {
                    for &c in &colors[*m] {
                        count[c] += 1;
                    }
                }
                let resolved = members.iter().any(|&m| colors[m].iter().any(|&c| count[c] == 1));
                for m in members {
                    for &c in &colors[*m] {
                        count[c] = 0;
                    }
                }
                if !resolved {
                    by_reach.push((e, reach));
                }
            }
            let inner = by_reach.iter().filter(|&&(_, d)| d <= r).count();
            if by_reach.len() <= 2 * inner {
                let local: Vec<usize> = by_reach.iter().filter(|&&(_, d)| d <= r).map(|&(e, _)| e).collect();
                break (snap, (ball, dist), local);
            }
            r += 1;
            if r > bound {
                return Err(Error::invariant(format!("node {v}: ball growth passed radius bound {bound}")));
            }
        };
        let (ball, dist) = dist;
        let mut members: Vec<usize> = ball.iter().copied().filter(|&x| dist[x] <= r).collect();
        members.sort_unstable();
        let mut edges: Vec<Vec<usize>> = local.iter().map(|&e| h.edges()[e].clone()).collect();
        edges.sort();
        let chosen = unique_subset_search(&members, &edges, k, params.theta, params.retries, ctx.rng())?;
        for x in chosen {
            let mut set = colors_in(snap.get(x).unwrap());
            set.insert(phase);
            ctx.write(x, COLORS, json!(set))?;
        }
        let mut claimed: Vec<usize> = ball.iter().copied().filter(|&x| dist[x] <= r + 1).collect();
        claimed.sort_unstable();
        for x in claimed {
            ctx.write(x, DONE, json!(phase))?;
        }
        ctx.write(v, "radius", json!(r))?;
        Ok(())
    })
}

/// The multi-phase sequential algorithm; phase `i` hands out color `i`.
pub fn slocal_cf_algorithm(h: &Hypergraph, params: CfParams) -> SlocalAlgorithm {
    let m = h.edge_count();
    let bound = cf_radius_bound(m);
    let k = h.min_edge_size().max(1);
    let shared = Arc::new(h.clone());
    let incidence = Arc::new(h.incidence());
    let phases = (1..=cf_phase_cap(m, params.theta))
        .map(|i| cf_phase(shared.clone(), incidence.clone(), i, k, params, bound))
        .collect();
    SlocalAlgorithm::new("slocal-cf", phases)
}

/// Runs the sequential algorithm on the primal graph under `order` and
/// checks the per-phase shrink `unresolved_i <= (1 - theta/2) unresolved_{i-1}`.
pub fn slocal_cf(h: &Hypergraph, order: &Ordering, params: CfParams, seed: u64) -> Result<SlocalCfRun> {
    if !(params.theta > 0.0 && params.theta <= 1.0) {
        return Err(Error::invalid("theta must lie in (0, 1]"));
    }
    let primal: Graph = h.primal_graph();
    let alg = slocal_cf_algorithm(h, params);
    let cap = alg.phases.len();
    // Once every edge has a unique color the remaining phases hand out nothing.
    let trace = run_slocal_until(&primal, &alg, order, seed, vec![Value::Null; h.n()], |views| {
        let colors: Vec<BTreeSet<usize>> = views.iter().map(colors_in).collect();
        h.edges().iter().all(|e| unique_color(e, &colors).is_some())
    })?;
    let mut colors_of: Vec<BTreeSet<usize>> = trace.states.iter().map(colors_in).collect();
    let max_radius = trace
        .states
        .iter()
        .filter_map(|s| s.memory.get("radius").and_then(Value::as_u64))
        .max()
        .unwrap_or(0) as usize;
    let used = colors_of.iter().filter_map(|s| s.last().copied()).max().unwrap_or(0);
    let mut unresolved = vec![h.edge_count()];
    for i in 1..=used {
        let upto: Vec<BTreeSet<usize>> = colors_of.iter().map(|s| s.range(..=i).copied().collect()).collect();
        let left = h.edges().iter().filter(|e| unique_color(e, &upto).is_none()).count();
        let prev = *unresolved.last().unwrap();
        if left as f64 > (1.0 - params.theta / 2.0) * prev as f64 {
            return Err(Error::invariant(format!("phase {i}: {left} unresolved edges after {prev}")));
        }
        unresolved.push(left);
    }
    if *unresolved.last().unwrap() > 0 {
        return Err(Error::invariant(format!("{} edges unresolved after {cap} phases", unresolved.last().unwrap())));
    }
    for s in colors_of.iter_mut().filter(|s| s.is_empty()) {
        s.insert(used + 1);
    }
    Ok(SlocalCfRun {
        coloring: MultiColoring::new(colors_of),
        trace,
        phases: used,
        unresolved,
        max_radius,
        radius_bound: cf_radius_bound(h.edge_count()),
        phase_cap: cap,
    })
}
