//! Replaying a node procedure against a private copy of node states.
//!
//! Used wherever one node (or one LOCAL round) has to re-run the sequential
//! computation of other nodes from gathered information.

use super::{within, Ctx, NodeView, Procedure, ReachCache, Snapshot};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Stream;
use serde_json::Value;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Called for every node a simulated query touches: (simulated node, touched node).
pub(crate) type Guard<'a> = dyn Fn(usize, usize) -> Result<()> + 'a;

pub(crate) struct SimCtx<'a> {
    pub node: usize,
    pub graph: Arc<Graph>,
    pub views: &'a mut HashMap<usize, NodeView>,
    pub locality: usize,
    pub write_radius: usize,
    pub rng: Stream,
    pub rng_of: &'a mut dyn FnMut(usize) -> Result<Stream>,
    pub guard: &'a Guard<'a>,
    pub observed: usize,
    pub reach: ReachCache,
}

impl SimCtx<'_> {
    /// Runs `procedure` as node `self.node`; returns the radius it read.
    pub fn run(mut self, procedure: &Procedure) -> Result<usize> {
        procedure(&mut self)?;
        Ok(self.observed)
    }
}

impl Ctx for SimCtx<'_> {
    fn node(&self) -> usize {
        self.node
    }

    fn graph(&self) -> &Graph {
        &self.graph
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
        let mut nodes = BTreeMap::new();
        for (v, d) in self.graph.bfs_within(self.node, radius, |_| true) {
            (self.guard)(self.node, v)?;
            let view = self.views.get(&v).cloned().ok_or_else(|| Error::CompilationSoundness {
                node: self.node,
                msg: format!("simulated query reached node {v} outside the gathered region"),
            })?;
            nodes.insert(v, (d, view));
        }
        Ok(Snapshot::new(self.node, radius, nodes))
    }

    fn write(&mut self, target: usize, key: &str, value: Value) -> Result<()> {
        if !self.reach.contains(&self.graph, self.node, self.write_radius, target) {
            return Err(Error::WriteViolation {
                node: self.node,
                target,
                allowed: self.write_radius,
            });
        }
        let view = self.views.get_mut(&target).ok_or_else(|| Error::CompilationSoundness {
            node: self.node,
            msg: format!("simulated write to node {target} outside the gathered region"),
        })?;
        view.memory.insert(key.to_string(), value);
        Ok(())
    }

    fn set_output(&mut self, value: Value) {
        if let Some(view) = self.views.get_mut(&self.node) {
            view.output = Some(value);
        }
    }

    fn rng(&mut self) -> &mut Stream {
        &mut self.rng
    }

    fn node_rng(&mut self, v: usize) -> Result<Stream> {
        if v != self.node && !within(&self.graph, self.node, v, self.observed) {
            return Err(Error::LocalityViolation {
                node: self.node,
                requested: self.observed + 1,
                allowed: self.observed,
            });
        }
        (self.rng_of)(v)
    }
}
