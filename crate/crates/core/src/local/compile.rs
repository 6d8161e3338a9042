//! Turning a single-phase SLOCAL algorithm into a LOCAL program.
//!
//! Both compilers replay the sequential run inside LOCAL steps using the
//! sandboxed context from the SLOCAL engine, then check the result against a
//! direct sequential run under the same order and seed.

use super::{run_local, LocalCtx, LocalProgram, LocalStep, LocalTrace};
use crate::decomposition::{
    ball_growing_decomposition, charged_decomposition_rounds, decomposition_to_ordering, NetworkDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::node_stream;
use crate::slocal::sim::{Guard, SimCtx};
use crate::slocal::{ordering_diameter, run_slocal, NodeView, Ordering, Phase, SlocalAlgorithm, Snapshot};
use serde_json::{json, Value};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Scale of the charged decomposition cost.
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct NodeDiff {
    pub node: usize,
    pub compiled: NodeView,
    pub reference: NodeView,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompilationReport {
    pub rounds_measured: usize,
    /// Rounds for work that is not simulated (the decomposition), charged by formula.
    pub rounds_charged: usize,
    pub round_bound: usize,
    pub phases: usize,
    pub equality: bool,
    pub diff: Vec<NodeDiff>,
}

impl CompilationReport {
    pub fn to_json(&self) -> Value {
        let diff: Vec<Value> = self
            .diff
            .iter()
            .map(|d| json!({ "node": d.node, "compiled": d.compiled, "reference": d.reference }))
            .collect();
        json!({
            "rounds_measured": self.rounds_measured,
            "rounds_charged": self.rounds_charged,
            "round_bound": self.round_bound,
            "phases": self.phases,
            "equality": self.equality,
            "diff": diff,
        })
    }
}

pub struct Compiled {
    pub program: LocalProgram,
    pub report: CompilationReport,
    pub trace: LocalTrace,
    /// Order of the sequential run the program reproduces.
    pub order: Ordering,
    /// Ordering diameter in the power graph (ordering compiler only).
    pub ordering_diameter: Option<usize>,
    /// Decomposition of the power graph (decomposition compiler only).
    pub decomposition: Option<NetworkDecomposition>,
}

fn single_pure_phase(alg: &SlocalAlgorithm) -> Result<Phase> {
    match alg.phases.as_slice() {
        [p] if p.write_radius == 0 => Ok(p.clone()),
        [_] => Err(Error::invalid("compilation needs write radius 0; eliminate writes first")),
        ps => Err(Error::invalid(format!("compilation needs one phase, got {}; reduce phases first", ps.len()))),
    }
}

fn views_of(snap: &Snapshot) -> HashMap<usize, NodeView> {
    snap.iter().map(|(v, _, view)| (v, view.clone())).collect()
}

/// Runs `phase` for each node of `sequence` against `views`.
fn replay(
    graph: &Arc<Graph>,
    phase: &Phase,
    sequence: &[usize],
    views: &mut HashMap<usize, NodeView>,
    seed: u64,
    guard: &Guard<'_>,
) -> Result<()> {
    let mut rng_of = |v: usize| Ok(node_stream(seed, v));
    for &x in sequence {
        SimCtx {
            node: x,
            graph: graph.clone(),
            views,
            locality: phase.locality,
            write_radius: 0,
            rng: node_stream(seed, x),
            rng_of: &mut rng_of,
            guard,
            observed: 0,
            reach: Default::default(),
        }
        .run(&phase.procedure)?;
    }
    Ok(())
}

fn commit(ctx: &mut LocalCtx, view: &NodeView) {
    for (k, v) in &view.memory {
        ctx.set_memory(k, v.clone());
    }
    if let Some(out) = &view.output {
        ctx.set_output(out.clone());
    }
}

fn report(
    graph: &Graph,
    alg: &SlocalAlgorithm,
    order: &Ordering,
    seed: u64,
    trace: &LocalTrace,
    rounds_charged: usize,
    round_bound: usize,
    phases: usize,
) -> Result<CompilationReport> {
    let reference = run_slocal(graph, alg, order, seed)?;
    let diff: Vec<NodeDiff> = (0..graph.n())
        .filter(|&v| {
            let (a, b) = (&trace.states[v], &reference.states[v]);
            a.output != b.output || a.memory != b.memory
        })
        .map(|v| NodeDiff { node: v, compiled: trace.states[v].clone(), reference: reference.states[v].clone() })
        .collect();
    if trace.rounds > round_bound {
        return Err(Error::invariant(format!("compiled program used {} rounds > bound {round_bound}", trace.rounds)));
    }
    Ok(CompilationReport {
        rounds_measured: trace.rounds,
        rounds_charged,
        round_bound,
        phases,
        equality: diff.is_empty(),
        diff,
    })
}

/// One LOCAL step of radius `l*r + r`, where `l` is the ordering diameter
/// of `order` in `G^r`: each node collects everything it transitively
/// depends on through label-decreasing steps of length at most `r`, replays
/// those nodes in label order, and keeps its own result.
pub fn compile_via_ordering(graph: &Graph, alg: &SlocalAlgorithm, order: &Ordering, seed: u64) -> Result<Compiled> {
    let phase = single_pure_phase(alg)?;
    if order.len() != graph.n() {
        return Err(Error::invalid(format!("ordering has {} labels for {} nodes", order.len(), graph.n())));
    }
    let r = phase.locality;
    let ell = if r == 0 { 0 } else { ordering_diameter(&graph.power_graph(r)?, order) };
    let gather = ell * r + r;
    let labels: Arc<Vec<u64>> = Arc::new(order.labels().to_vec());
    let step_phase = phase.clone();
    let step = LocalStep::new(gather, move |ctx: &mut LocalCtx| {
        let v = ctx.node();
        let snap = ctx.query(gather)?;
        let g = ctx.shared_graph();
        let mut closure = vec![v];
        let mut seen = HashSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for (y, _) in g.bfs_within(x, r, |_| true) {
                if labels[y] < labels[x] && seen.insert(y) {
                    if snap.dist(y).map_or(true, |d| d > ell * r) {
                        return Err(Error::CompilationSoundness {
                            node: v,
                            msg: format!("dependency {y} lies beyond distance {}", ell * r),
                        });
                    }
                    closure.push(y);
                    stack.push(y);
                }
            }
        }
        closure.sort_unstable_by_key(|&x| labels[x]);
        let mut views = views_of(&snap);
        replay(&g, &step_phase, &closure, &mut views, seed, &|_, _| Ok(()))?;
        commit(ctx, &views[&v]);
        Ok(())
    });
    let program = LocalProgram::new(vec![step]);
    let trace = run_local(graph, &program, seed)?;
    let report = report(graph, alg, order, seed, &trace, 0, gather, 1)?;
    Ok(Compiled {
        program,
        report,
        trace,
        order: order.clone(),
        ordering_diameter: Some(ell),
        decomposition: None,
    })
}

/// Decomposes `G^{r+1}`, derives the cluster order, and spends one LOCAL
/// step per color. In the step of color `i`, every node of an `i`-colored
/// cluster gathers the cluster's `r`-neighborhood (radius `wd*(r+1) + r`),
/// replays the whole cluster in order exactly as the cluster's lowest-id
/// node would, and commits its own result. A replayed node touching a
/// different cluster of the same color is a separation error.
pub fn compile_via_decomposition(graph: &Graph, alg: &SlocalAlgorithm, seed: u64, beta: f64) -> Result<Compiled> {
    let phase = single_pure_phase(alg)?;
    let r = phase.locality;
    let power = graph.power_graph(r + 1)?;
    let mut dec = ball_growing_decomposition(&power)?;
    dec.base_graph_radius = r + 1;
    let order = decomposition_to_ordering(&dec)?;
    let cluster_of: Arc<Vec<usize>> = Arc::new(dec.cluster_of.iter().map(|c| c.expect("ball growing is total")).collect());
    let color: Arc<Vec<usize>> = Arc::new(dec.cluster_color.clone());
    let members: Arc<Vec<Vec<usize>>> = Arc::new(dec.clusters());
    let mut steps = Vec::with_capacity(dec.num_colors);
    for i in 1..=dec.num_colors {
        let wd = (0..dec.cluster_count())
            .filter(|&c| dec.cluster_color[c] == i)
            .map(|c| dec.weak_diameters[c])
            .max()
            .unwrap_or(0);
        let radius = wd * (r + 1) + r;
        let (cluster_of, color, members, phase) = (cluster_of.clone(), color.clone(), members.clone(), phase.clone());
        steps.push(LocalStep::new(radius, move |ctx: &mut LocalCtx| {
            let v = ctx.node();
            let c = cluster_of[v];
            if color[c] != i {
                return Ok(());
            }
            let snap = ctx.query(radius)?;
            let g = ctx.shared_graph();
            let mut views = views_of(&snap);
            let guard = |x: usize, y: usize| {
                let cy = cluster_of[y];
                if cy != c && color[cy] == i {
                    Err(Error::SeparationViolation { node: x, cluster: c, other: y, other_cluster: cy })
                } else {
                    Ok(())
                }
            };
            replay(&g, &phase, &members[c], &mut views, seed, &guard)?;
            commit(ctx, &views[&v]);
            Ok(())
        }));
    }
    let program = LocalProgram::new(steps);
    let trace = run_local(graph, &program, seed)?;
    let bound = dec.num_colors * (dec.max_weak_diameter() * (r + 1) + r);
    let charged = charged_decomposition_rounds(graph.n(), r + 1, beta);
    let report = report(graph, alg, &order, seed, &trace, charged, bound, dec.num_colors)?;
    Ok(Compiled {
        program,
        report,
        trace,
        order,
        ordering_diameter: None,
        decomposition: Some(dec),
    })
}
