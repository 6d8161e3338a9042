//! Sequential-local execution engine.
//!
//! Nodes are processed one at a time in ascending label order. When its turn
//! comes, a node may read the current state of every node within some radius
//! and update its own state (and, with a positive write radius, the memory of
//! nearby nodes). The engine records the largest radius each node read.

pub mod algorithms;
mod ordering;
pub(crate) mod sim;
mod transform;

pub use ordering::{ordering_diameter, Ordering};
pub use transform::{eliminate_writes, reduce_phases};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{node_stream, Stream};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Memory = BTreeMap<String, Value>;

/// What other nodes can see of a node.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NodeView {
    pub input: Value,
    pub memory: Memory,
    pub output: Option<Value>,
}

/// States of all nodes within some radius of a center, as of the moment of
/// the query.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub center: usize,
    pub radius: usize,
    nodes: BTreeMap<usize, (usize, NodeView)>,
}

impl Snapshot {
    pub(crate) fn new(center: usize, radius: usize, nodes: BTreeMap<usize, (usize, NodeView)>) -> Self {
        Snapshot { center, radius, nodes }
    }

    pub fn get(&self, v: usize) -> Option<&NodeView> {
        self.nodes.get(&v).map(|(_, view)| view)
    }

    pub fn dist(&self, v: usize) -> Option<usize> {
        self.nodes.get(&v).map(|(d, _)| *d)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.contains_key(&v)
    }

    /// Node ids in the snapshot, ascending.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.keys().copied()
    }

    /// (node, distance, view) triples, ascending by node id.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &NodeView)> {
        self.nodes.iter().map(|(&v, (d, view))| (v, *d, view))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Neighbors of `v` inside the snapshot.
    pub fn neighbors_within(&self, graph: &Graph, v: usize) -> Vec<usize> {
        graph.neighbors(v).iter().copied().filter(|w| self.contains(*w)).collect()
    }
}

/// The only interface a node procedure has to the world.
pub trait Ctx {
    fn node(&self) -> usize;
    /// Topology. Procedures must only inspect the part covered by their queries.
    fn graph(&self) -> &Graph;
    /// Same topology, detached from the borrow of the context.
    fn shared_graph(&self) -> Arc<Graph>;
    fn query(&mut self, radius: usize) -> Result<Snapshot>;
    fn write(&mut self, target: usize, key: &str, value: Value) -> Result<()>;
    fn set_output(&mut self, value: Value);
    /// This node's private random stream.
    fn rng(&mut self) -> &mut Stream;
    /// A fresh copy of the private stream of `v`, which must lie inside the
    /// largest ball queried so far.
    fn node_rng(&mut self, v: usize) -> Result<Stream>;
}

pub type Procedure = Arc<dyn Fn(&mut dyn Ctx) -> Result<()> + Send + Sync>;

#[derive(Clone)]
pub struct Phase {
    pub locality: usize,
    /// 0 means the node may only write its own memory.
    pub write_radius: usize,
    pub procedure: Procedure,
}

impl Phase {
    pub fn new(
        locality: usize,
        write_radius: usize,
        procedure: impl Fn(&mut dyn Ctx) -> Result<()> + Send + Sync + 'static,
    ) -> Self {
        Phase { locality, write_radius, procedure: Arc::new(procedure) }
    }
}

#[derive(Clone)]
pub struct SlocalAlgorithm {
    pub name: String,
    pub phases: Vec<Phase>,
}

impl SlocalAlgorithm {
    pub fn new(name: impl Into<String>, phases: Vec<Phase>) -> Self {
        SlocalAlgorithm { name: name.into(), phases }
    }

    pub fn is_pure(&self) -> bool {
        self.phases.iter().all(|p| p.write_radius == 0)
    }

    pub fn declared_locality(&self) -> usize {
        self.phases.iter().map(|p| p.locality).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExecutionTrace {
    pub states: Vec<NodeView>,
    /// Largest radius each node queried, over all phases.
    pub locality: Vec<usize>,
    pub phase_locality: Vec<usize>,
    /// Nodes in processing order.
    pub order: Vec<usize>,
}

impl ExecutionTrace {
    pub fn max_locality(&self) -> usize {
        self.locality.iter().copied().max().unwrap_or(0)
    }

    pub fn outputs(&self) -> Vec<Option<Value>> {
        self.states.iter().map(|s| s.output.clone()).collect()
    }

    /// node -> {output, locality, memory_keys}
    pub fn to_json(&self) -> Value {
        let nodes: serde_json::Map<String, Value> = self
            .states
            .iter()
            .enumerate()
            .map(|(v, s)| {
                (
                    v.to_string(),
                    json!({
                        "output": s.output,
                        "locality": self.locality[v],
                        "memory_keys": s.memory.keys().collect::<Vec<_>>(),
                    }),
                )
            })
            .collect();
        Value::Object(nodes)
    }
}

struct NodeState {
    view: NodeView,
    rng: Stream,
}

struct EngineCtx<'a> {
    graph: &'a Arc<Graph>,
    states: &'a mut [NodeState],
    node: usize,
    locality: usize,
    write_radius: usize,
    seed: u64,
    observed: usize,
    queried: bool,
    reach: ReachCache,
}

impl Ctx for EngineCtx<'_> {
    fn node(&self) -> usize {
        self.node
    }

    fn graph(&self) -> &Graph {
        self.graph
    }

    fn shared_graph(&self) -> Arc<Graph> {
        self.graph.clone()
    }

    fn query(&mut self, radius: usize) -> Result<Snapshot> {
        if radius > self.locality {
            return Err(Error::LocalityViolation {
                node: self.node,
                requested: radius,
                allowed: self.locality,
            });
        }
        self.observed = self.observed.max(radius);
        self.queried = true;
        let nodes = self
            .graph
            .bfs_within(self.node, radius, |_| true)
            .into_iter()
            .map(|(v, d)| (v, (d, self.states[v].view.clone())))
            .collect();
        Ok(Snapshot::new(self.node, radius, nodes))
    }

    fn write(&mut self, target: usize, key: &str, value: Value) -> Result<()> {
        if target >= self.graph.n() || !self.reach.contains(self.graph, self.node, self.write_radius, target) {
            return Err(Error::WriteViolation {
                node: self.node,
                target,
                allowed: self.write_radius,
            });
        }
        self.states[target].view.memory.insert(key.to_string(), value);
        Ok(())
    }

    fn set_output(&mut self, value: Value) {
        self.states[self.node].view.output = Some(value);
    }

    fn rng(&mut self) -> &mut Stream {
        &mut self.states[self.node].rng
    }

    fn node_rng(&mut self, v: usize) -> Result<Stream> {
        if v != self.node && (!self.queried || !within(self.graph, self.node, v, self.observed)) {
            return Err(Error::LocalityViolation {
                node: self.node,
                requested: self.observed + 1,
                allowed: self.observed,
            });
        }
        Ok(node_stream(self.seed, v))
    }
}

pub(crate) fn within(graph: &Graph, from: usize, to: usize, radius: usize) -> bool {
    from == to || graph.bfs_within(from, radius, |_| true).iter().any(|&(v, _)| v == to)
}

/// Remembers the last ball computed, for repeated membership tests.
#[derive(Default)]
pub(crate) struct ReachCache {
    key: Option<(usize, usize)>,
    ball: std::collections::HashSet<usize>,
}

impl ReachCache {
    pub fn contains(&mut self, graph: &Graph, from: usize, radius: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        if self.key != Some((from, radius)) {
            self.ball = graph.bfs_within(from, radius, |_| true).into_iter().map(|(v, _)| v).collect();
            self.key = Some((from, radius));
        }
        self.ball.contains(&to)
    }
}

/// Runs every phase over all nodes in label order. Inputs default to null.
pub fn run_slocal(graph: &Graph, alg: &SlocalAlgorithm, order: &Ordering, seed: u64) -> Result<ExecutionTrace> {
    run_slocal_with_inputs(graph, alg, order, seed, vec![Value::Null; graph.n()])
}

pub fn run_slocal_with_inputs(
    graph: &Graph,
    alg: &SlocalAlgorithm,
    order: &Ordering,
    seed: u64,
    inputs: Vec<Value>,
) -> Result<ExecutionTrace> {
    run_slocal_until(graph, alg, order, seed, inputs, |_| false)
}

/// Like [`run_slocal_with_inputs`], but skips the remaining phases as soon
/// as `finished` holds for the states after a phase. Meant for algorithms
/// whose later phases are no-ops once some global condition is reached.
pub fn run_slocal_until(
    graph: &Graph,
    alg: &SlocalAlgorithm,
    order: &Ordering,
    seed: u64,
    inputs: Vec<Value>,
    finished: impl Fn(&[NodeView]) -> bool,
) -> Result<ExecutionTrace> {
    let n = graph.n();
    if order.len() != n {
        return Err(Error::invalid(format!("ordering has {} labels for {n} nodes", order.len())));
    }
    if inputs.len() != n {
        return Err(Error::invalid(format!("{} inputs for {n} nodes", inputs.len())));
    }
    let mut states: Vec<NodeState> = inputs
        .into_iter()
        .enumerate()
        .map(|(v, input)| NodeState {
            view: NodeView { input, ..NodeView::default() },
            rng: node_stream(seed, v),
        })
        .collect();
    let sequence = order.sequence();
    let shared = Arc::new(graph.clone());
    let mut locality = vec![0; n];
    let mut phase_locality = Vec::with_capacity(alg.phases.len());
    for phase in &alg.phases {
        let mut phase_max = 0;
        for &v in &sequence {
            let mut ctx = EngineCtx {
                graph: &shared,
                states: &mut states,
                node: v,
                locality: phase.locality,
                write_radius: phase.write_radius,
                seed,
                observed: 0,
                queried: false,
                reach: ReachCache::default(),
            };
            (phase.procedure)(&mut ctx)?;
            let observed = ctx.observed;
            locality[v] = locality[v].max(observed);
            phase_max = phase_max.max(observed);
        }
        phase_locality.push(phase_max);
        let views: Vec<NodeView> = states.iter().map(|s| s.view.clone()).collect();
        if finished(&views) {
            break;
        }
    }
    Ok(ExecutionTrace {
        states: states.into_iter().map(|s| s.view).collect(),
        locality,
        phase_locality,
        order: sequence,
    })
}
