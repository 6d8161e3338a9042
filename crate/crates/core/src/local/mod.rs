//! Synchronous LOCAL execution and the SLOCAL-to-LOCAL compilers.
//!
//! A program is a list of steps. In a step of radius `t`, every node reads a
//! snapshot of all states within distance `t` as they were when the step
//! started, then replaces its own state. A step costs `t` rounds.

mod compile;

pub use compile::{compile_via_decomposition, compile_via_ordering, Compiled, CompilationReport, DEFAULT_BETA};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{node_stream, Stream};
use crate::slocal::{NodeView, Snapshot};
use serde_json::Value;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type LocalProcedure = Arc<dyn Fn(&mut LocalCtx) -> Result<()> + Send + Sync>;

#[derive(Clone)]
pub struct LocalStep {
    pub radius: usize,
    pub procedure: LocalProcedure,
}

impl LocalStep {
    pub fn new(radius: usize, procedure: impl Fn(&mut LocalCtx) -> Result<()> + Send + Sync + 'static) -> Self {
        LocalStep { radius, procedure: Arc::new(procedure) }
    }
}

#[derive(Clone, Default)]
pub struct LocalProgram {
    pub steps: Vec<LocalStep>,
}

impl LocalProgram {
    pub fn new(steps: Vec<LocalStep>) -> Self {
        LocalProgram { steps }
    }

    pub fn rounds(&self) -> usize {
        self.steps.iter().map(|s| s.radius).sum()
    }
}

/// Per-node handle during one step.
pub struct LocalCtx<'a> {
    node: usize,
    graph: &'a Arc<Graph>,
    before: &'a [NodeView],
    next: NodeView,
    rng: &'a mut Stream,
    radius: usize,
    observed: Option<usize>,
    seed: u64,
}

impl LocalCtx<'_> {
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        self.graph.clone()
    }

    /// States within `radius` as of the start of the step.
    pub fn query(&mut self, radius: usize) -> Result<Snapshot> {
        if radius > self.radius {
            return Err(Error::ReadViolation { node: self.node, requested: radius, allowed: self.radius });
        }
        self.observed = Some(self.observed.map_or(radius, |o| o.max(radius)));
        let nodes: BTreeMap<usize, (usize, NodeView)> = self
            .graph
            .bfs_within(self.node, radius, |_| true)
            .into_iter()
            .map(|(v, d)| (v, (d, self.before[v].clone())))
            .collect();
        Ok(Snapshot::new(self.node, radius, nodes))
    }

    /// This node's state as it will be after the step.
    pub fn state(&self) -> &NodeView {
        &self.next
    }

    pub fn set_memory(&mut self, key: &str, value: Value) {
        self.next.memory.insert(key.to_string(), value);
    }

    pub fn set_output(&mut self, value: Value) {
        self.next.output = Some(value);
    }

    pub fn rng(&mut self) -> &mut Stream {
        self.rng
    }

    /// The initial private stream of `v`, which must lie inside a ball
    /// already read in this step.
    pub fn node_rng(&self, v: usize) -> Result<Stream> {
        let seen = v == self.node
            || self
                .observed
                .is_some_and(|r| crate::slocal::within(self.graph, self.node, v, r));
        if !seen {
            return Err(Error::ReadViolation {
                node: self.node,
                requested: self.observed.map_or(0, |r| r + 1),
                allowed: self.radius,
            });
        }
        Ok(node_stream(self.seed, v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalTrace {
    pub states: Vec<NodeView>,
    /// Largest radius each node read, over all steps.
    pub locality: Vec<usize>,
    /// Declared radius of each step.
    pub step_rounds: Vec<usize>,
    pub rounds: usize,
}

impl LocalTrace {
    pub fn outputs(&self) -> Vec<Option<Value>> {
        self.states.iter().map(|s| s.output.clone()).collect()
    }
}

pub fn run_local(graph: &Graph, program: &LocalProgram, seed: u64) -> Result<LocalTrace> {
    run_local_with_inputs(graph, program, seed, vec![Value::Null; graph.n()])
}

pub fn run_local_with_inputs(
    graph: &Graph,
    program: &LocalProgram,
    seed: u64,
    inputs: Vec<Value>,
) -> Result<LocalTrace> {
    let n = graph.n();
    if inputs.len() != n {
        return Err(Error::invalid(format!("{} inputs for {n} nodes", inputs.len())));
    }
    let shared = Arc::new(graph.clone());
    let mut states: Vec<NodeView> =
        inputs.into_iter().map(|input| NodeView { input, ..NodeView::default() }).collect();
    let mut rngs: Vec<Stream> = (0..n).map(|v| node_stream(seed, v)).collect();
    let mut locality = vec![0; n];
    let mut step_rounds = Vec::with_capacity(program.steps.len());
    for step in &program.steps {
        let mut next = Vec::with_capacity(n);
        for (v, rng) in rngs.iter_mut().enumerate() {
            let mut ctx = LocalCtx {
                node: v,
                graph: &shared,
                before: &states,
                next: states[v].clone(),
                rng,
                radius: step.radius,
                observed: None,
                seed,
            };
            (step.procedure)(&mut ctx)?;
            locality[v] = locality[v].max(ctx.observed.unwrap_or(0));
            next.push(ctx.next);
        }
        states = next;
        step_rounds.push(step.radius);
    }
    Ok(LocalTrace { states, locality, rounds: step_rounds.iter().sum(), step_rounds })
}
