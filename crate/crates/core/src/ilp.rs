//! Sequential approximation schemes for maximum independent set and minimum
//! dominating set, built from ball growing plus exact solves inside balls.

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::slocal::{run_slocal, Ctx, ExecutionTrace, Ordering, Phase, Snapshot, SlocalAlgorithm};
use serde_json::{json, Value};

pub const DEFAULT_CAP: usize = 25;

/// Exact solvers use 64-bit masks, so no ball may exceed this.
pub const HARD_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxParams {
    pub epsilon: f64,
    pub ball_node_cap: usize,
}

impl ApproxParams {
    pub fn new(epsilon: f64, ball_node_cap: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if ball_node_cap == 0 || ball_node_cap > HARD_CAP {
            return Err(Error::invalid(format!("ball cap must lie in 1..={HARD_CAP}")));
        }
        Ok(ApproxParams { epsilon, ball_node_cap })
    }
}

fn check_cap(size: usize, cap: usize, radius: Option<usize>) -> Result<()> {
    if size > cap.min(HARD_CAP) {
        return Err(Error::Capacity { size, cap, radius });
    }
    Ok(())
}

fn mis_search(cand: u64, adj: &[u64], cur: u64, best: &mut u64) {
    if cand == 0 {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    }
    if cur.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    let mut pick = None;
    let mut pick_deg = 0;
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        if pick.is_none() || d > pick_deg {
            pick = Some(v);
            pick_deg = d;
        }
    }
    let v = pick.unwrap();
    if pick_deg == 0 {
        mis_search(0, adj, cur | cand, best);
        return;
    }
    let bit = 1u64 << v;
    mis_search(cand & !bit & !adj[v], adj, cur | bit, best);
    mis_search(cand & !bit, adj, cur, best);
}

/// Maximum independent set of the subgraph induced by `nodes`, by
/// branch and bound on the highest-degree node. Returned ascending.
pub fn exact_mis_within(g: &Graph, nodes: &[usize], cap: usize) -> Result<Vec<usize>> {
    check_cap(nodes.len(), cap, None)?;
    let mut local = vec![UNREACHED; g.n()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<u64> = nodes
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| local[w] != UNREACHED)
                .fold(0u64, |m, &w| m | 1 << local[w])
        })
        .collect();
    let all = if nodes.len() == 64 { u64::MAX } else { (1u64 << nodes.len()) - 1 };
    let mut best = 0u64;
    mis_search(all, &adj, 0, &mut best);
    let mut out: Vec<usize> = (0..nodes.len()).filter(|&i| best >> i & 1 == 1).map(|i| nodes[i]).collect();
    out.sort_unstable();
    Ok(out)
}

pub fn exact_mis(g: &Graph, cap: usize) -> Result<Vec<usize>> {
    exact_mis_within(g, &(0..g.n()).collect::<Vec<_>>(), cap)
}

fn cover_search(uncovered: u128, options: &[u128], by_target: &[Vec<usize>], chosen: &mut Vec<usize>, best: &mut Option<Vec<usize>>) {
    if uncovered == 0 {
        if best.as_ref().map_or(true, |b| chosen.len() < b.len()) {
            *best = Some(chosen.clone());
        }
        return;
    }
    let widest = options.iter().map(|o| (o & uncovered).count_ones()).max().unwrap_or(0);
    if widest == 0 {
        return;
    }
    let needed = uncovered.count_ones().div_ceil(widest) as usize;
    if best.as_ref().is_some_and(|b| chosen.len() + needed >= b.len()) {
        return;
    }
    // Branch on the uncovered target with the fewest covering options.
    let mut rest = uncovered;
    let mut target = rest.trailing_zeros() as usize;
    let mut fewest = usize::MAX;
    while rest != 0 {
        let t = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if by_target[t].len() < fewest {
            fewest = by_target[t].len();
            target = t;
        }
    }
    let mut branches = by_target[target].clone();
    branches.sort_by_key(|&o| std::cmp::Reverse((options[o] & uncovered).count_ones()));
    for o in branches {
        chosen.push(o);
        cover_search(uncovered & !options[o], options, by_target, chosen, best);
        chosen.pop();
    }
}

/// Smallest subset of `dominators` whose closed neighborhoods cover
/// `targets`. Returned ascending.
pub fn exact_mds(g: &Graph, dominators: &[usize], targets: &[usize], cap: usize) -> Result<Vec<usize>> {
    check_cap(dominators.len(), cap, None)?;
    if targets.len() > 128 {
        return Err(Error::Capacity { size: targets.len(), cap: 128, radius: None });
    }
    let mut local = vec![UNREACHED; g.n()];
    for (i, &t) in targets.iter().enumerate() {
        local[t] = i;
    }
    let options: Vec<u128> = dominators
        .iter()
        .map(|&d| {
            std::iter::once(d)
                .chain(g.neighbors(d).iter().copied())
                .filter(|&w| local[w] != UNREACHED)
                .fold(0u128, |m, w| m | 1 << local[w])
        })
        .collect();
    let mut by_target = vec![Vec::new(); targets.len()];
    for (o, &mask) in options.iter().enumerate() {
        for (t, list) in by_target.iter_mut().enumerate() {
            if mask >> t & 1 == 1 {
                list.push(o);
            }
        }
    }
    if let Some(t) = by_target.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("node {} cannot be dominated", targets[t])));
    }
    let all = if targets.len() == 128 { u128::MAX } else { (1u128 << targets.len()) - 1 };
    let mut best = None;
    cover_search(all, &options, &by_target, &mut Vec::new(), &mut best);
    let mut out: Vec<usize> = best.unwrap().into_iter().map(|o| dominators[o]).collect();
    out.sort_unstable();
    Ok(out)
}

/// Minimum dominating set of the whole graph.
pub fn exact_mds_graph(g: &Graph, cap: usize) -> Result<Vec<usize>> {
    let all: Vec<usize> = (0..g.n()).collect();
    exact_mds(g, &all, &all, cap)
}

pub fn verify_independent(g: &Graph, set: &[usize]) -> bool {
    let mut member = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return false;
        }
        member[v] = true;
    }
    g.edges().all(|(u, v)| !(member[u] && member[v]))
}

pub fn verify_dominating(g: &Graph, set: &[usize]) -> bool {
    let mut covered = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return false;
        }
        covered[v] = true;
        for &w in g.neighbors(v) {
            covered[w] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// `ceil(log_{1+eps} n)`.
pub fn log_radius_bound(n: usize, epsilon: f64) -> usize {
    if n <= 1 {
        return 0;
    }
    ((n as f64).ln() / (1.0 + epsilon).ln()).ceil() as usize
}

#[derive(Clone, Debug)]
pub struct ApproxSolution {
    pub nodes: Vec<usize>,
    pub trace: ExecutionTrace,
    /// Radius chosen by every node that started a ball, in processing order.
    pub radii: Vec<(usize, usize)>,
    /// Dominating set runs only: the alive part of each ball's inner radius.
    pub central_balls: Vec<Vec<usize>>,
    pub ratio_vs_exact: Option<f64>,
}

impl ApproxSolution {
    pub fn to_json(&self) -> Value {
        let mut j = json!({
            "nodes": self.nodes,
            "size": self.nodes.len(),
            "locality": self.trace.max_locality(),
        });
        if let Some(r) = self.ratio_vs_exact {
            j["ratio_vs_exact"] = json!(r);
        }
        j
    }
}

const DELETED: &str = "deleted";
const CHOSEN: &str = "chosen";
const RADIUS: &str = "radius";
const CENTRAL: &str = "central";

fn alive(snap: &Snapshot, x: usize) -> bool {
    snap.get(x).is_some_and(|s| !s.memory.contains_key(DELETED))
}

/// Nodes of the snapshot within `radius` of its center, with distances, in
/// the graph restricted to nodes for which `keep` holds.
fn ball_in(graph: &Graph, snap: &Snapshot, center: usize, radius: usize, keep: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    graph
        .bfs_within(center, radius, |x| snap.contains(x) && keep(x))
        .into_iter()
        .collect()
}

fn upto(ball: &[(usize, usize)], r: usize) -> Vec<usize> {
    let mut out: Vec<usize> = ball.iter().filter(|&&(_, d)| d <= r).map(|&(x, _)| x).collect();
    out.sort_unstable();
    out
}

fn collect(trace: &ExecutionTrace, key: &str) -> Vec<usize> {
    (0..trace.states.len()).filter(|&v| trace.states[v].memory.contains_key(key)).collect()
}

fn radii(trace: &ExecutionTrace) -> Vec<(usize, usize)> {
    trace
        .order
        .iter()
        .filter_map(|&v| trace.states[v].memory.get(RADIUS).and_then(Value::as_u64).map(|r| (v, r as usize)))
        .collect()
}

fn mis_phase(params: ApproxParams, bound: usize) -> Phase {
    Phase::new(bound + 1, bound + 1, move |ctx: &mut dyn Ctx| {
        let v = ctx.node();
        if !alive(&ctx.query(0)?, v) {
            return Ok(());
        }
        let graph = ctx.shared_graph();
        let mut r = 0;
        let mut inner = vec![v];
        let mut inner_alpha = 1;
        let (inside, ball) = loop {
            let snap = ctx.query(r + 1)?;
            let ball = ball_in(&graph, &snap, v, r + 1, |x| alive(&snap, x));
            let outer = upto(&ball, r + 1);
            check_cap(outer.len(), params.ball_node_cap, Some(r + 1))?;
            let outer_alpha = exact_mis_within(&graph, &outer, params.ball_node_cap)?.len();
            if outer_alpha as f64 <= (1.0 + params.epsilon) * inner_alpha as f64 {
                break (inner, ball);
            }
            r += 1;
            if r > bound {
                return Err(Error::invariant(format!("node {v}: radius passed {bound}")));
            }
            inner = outer;
            inner_alpha = outer_alpha;
        };
        for x in exact_mis_within(&graph, &inside, params.ball_node_cap)? {
            ctx.write(x, CHOSEN, json!(true))?;
        }
        for x in upto(&ball, r + 1) {
            ctx.write(x, DELETED, json!(true))?;
        }
        ctx.write(v, RADIUS, json!(r))?;
        Ok(())
    })
}

/// Process nodes in `order`; a node still present grows `r` until the
/// independence number of the next ball is within `1 + eps` of the
/// current one, keeps a maximum independent set of `B_r` and deletes
/// `B_{r+1}`.
pub fn slocal_mis_approx(g: &Graph, order: &Ordering, params: ApproxParams) -> Result<ApproxSolution> {
    let bound = log_radius_bound(g.n(), params.epsilon);
    let alg = SlocalAlgorithm::new("slocal-mis-approx", vec![mis_phase(params, bound)]);
    let trace = run_slocal(g, &alg, order, 0)?;
    let nodes = collect(&trace, CHOSEN);
    if !verify_independent(g, &nodes) {
        return Err(Error::invariant("approximate independent set has an inner edge"));
    }
    Ok(ApproxSolution { radii: radii(&trace), nodes, trace, central_balls: Vec::new(), ratio_vs_exact: None })
}

fn mds_phase(params: ApproxParams, bound: usize) -> Phase {
    Phase::new(bound + 3, bound + 3, move |ctx: &mut dyn Ctx| {
        let v = ctx.node();
        if !alive(&ctx.query(0)?, v) {
            return Ok(());
        }
        let graph = ctx.shared_graph();
        let cap = params.ball_node_cap;
        // Dominators may be any node of the ball; only alive nodes need cover.
        let solve = |ball: &[(usize, usize)], snap: &Snapshot, r: usize| -> Result<Vec<usize>> {
            let dominators = upto(ball, r + 1);
            check_cap(dominators.len(), cap, Some(r + 1))?;
            let targets: Vec<usize> = upto(ball, r).into_iter().filter(|&x| alive(snap, x)).collect();
            exact_mds(&graph, &dominators, &targets, cap)
        };
        let mut r = 0;
        let (chosen, central, removed) = loop {
            let snap = ctx.query(r + 3)?;
            let ball = ball_in(&graph, &snap, v, r + 3, |_| true);
            let inner = solve(&ball, &snap, r)?;
            let outer = solve(&ball, &snap, r + 2)?;
            if outer.len() as f64 <= (1.0 + params.epsilon) * inner.len() as f64 {
                let central: Vec<usize> = upto(&ball, r).into_iter().filter(|&x| alive(&snap, x)).collect();
                let removed: Vec<usize> = upto(&ball, r + 2).into_iter().filter(|&x| alive(&snap, x)).collect();
                break (outer, central, removed);
            }
            r += 1;
            if r > bound {
                return Err(Error::invariant(format!("node {v}: radius passed {bound}")));
            }
        };
        for x in chosen {
            ctx.write(x, CHOSEN, json!(true))?;
        }
        for x in removed {
            ctx.write(x, DELETED, json!(true))?;
        }
        ctx.write(v, RADIUS, json!(r))?;
        ctx.write(v, CENTRAL, json!(central))?;
        Ok(())
    })
}

/// Process nodes in `order`; a node still present grows `r` until the
/// cost of dominating `B_{r+2}` is within `1 + eps` of the cost of
/// dominating `B_r`, adds an optimal dominator set of `B_{r+2}` drawn from
/// `B_{r+3}` and deletes `B_{r+2}`. Balls are taken in the input graph;
/// deleted nodes may still serve as dominators but need no cover.
pub fn slocal_mds_approx(g: &Graph, order: &Ordering, params: ApproxParams) -> Result<ApproxSolution> {
    let bound = 2 * log_radius_bound(g.n(), params.epsilon);
    let alg = SlocalAlgorithm::new("slocal-mds-approx", vec![mds_phase(params, bound)]);
    let trace = run_slocal(g, &alg, order, 0)?;
    let nodes = collect(&trace, CHOSEN);
    if !verify_dominating(g, &nodes) {
        return Err(Error::invariant("approximate dominating set misses a node"));
    }
    let central_balls: Vec<Vec<usize>> = trace
        .order
        .iter()
        .filter_map(|&v| trace.states[v].memory.get(CENTRAL))
        .map(|c| c.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect())
        .collect();
    for (i, a) in central_balls.iter().enumerate() {
        for b in &central_balls[i + 1..] {
            let near = a.iter().any(|&x| g.bfs_within(x, 2, |_| true).iter().any(|(y, _)| b.contains(y)));
            if near {
                return Err(Error::invariant(format!("central balls {a:?} and {b:?} are closer than 3")));
            }
        }
    }
    Ok(ApproxSolution { radii: radii(&trace), nodes, trace, central_balls, ratio_vs_exact: None })
}
