//! Algorithm-to-algorithm transforms: removing remote writes and folding
//! several phases into one.

use super::sim::SimCtx;
use super::{Ctx, Memory, NodeView, Phase, SlocalAlgorithm, Snapshot};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Stream;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

const RECORDS: &str = "__records";
const STAMP: &str = "__stamp";

/// Replaces remote writes by locally stored records that readers merge in.
///
/// The result has write radius 0 and locality `R + w`. A record carries a
/// stamp that is larger than every stamp within distance `2w` at the time it
/// is taken, so any two writers to a common target are ordered exactly as the
/// processing order ordered them.
pub fn eliminate_writes(alg: &SlocalAlgorithm) -> Result<SlocalAlgorithm> {
    if alg.phases.len() != 1 {
        return Err(Error::invalid(format!(
            "write elimination takes a single phase, got {}",
            alg.phases.len()
        )));
    }
    let phase = &alg.phases[0];
    if phase.write_radius == 0 {
        return Ok(alg.clone());
    }
    Ok(SlocalAlgorithm::new(format!("{}/local-writes", alg.name), vec![local_writes(phase)?]))
}

fn local_writes(phase: &Phase) -> Result<Phase> {
    let (r, w) = (phase.locality, phase.write_radius);
    if w > r {
        return Err(Error::invalid(format!("write radius {w} exceeds locality {r}")));
    }
    let inner = phase.procedure.clone();
    Ok(Phase {
        locality: r + w,
        write_radius: 0,
        procedure: Arc::new(move |ctx: &mut dyn Ctx| {
            let mut em = Emulated { outer: ctx, locality: r, w, stamp: None, records: Vec::new(), reach: Default::default() };
            inner(&mut em)
        }),
    })
}

struct Emulated<'a> {
    outer: &'a mut dyn Ctx,
    locality: usize,
    w: usize,
    stamp: Option<u64>,
    records: Vec<Value>,
    reach: super::ReachCache,
}

fn record_parts(rec: &Value) -> Option<(usize, &str, &Value, u64, u64)> {
    let a = rec.as_array()?;
    Some((
        a.first()?.as_u64()? as usize,
        a.get(1)?.as_str()?,
        a.get(2)?,
        a.get(3)?.as_u64()?,
        a.get(4)?.as_u64()?,
    ))
}

fn merged_memory(graph: &Graph, snap: &Snapshot, u: usize, w: usize) -> Memory {
    let mut found: Vec<(u64, u64, &str, &Value)> = Vec::new();
    for (x, _) in graph.bfs_within(u, w, |_| true) {
        let Some(view) = snap.get(x) else { continue };
        let Some(Value::Array(recs)) = view.memory.get(RECORDS) else { continue };
        for rec in recs {
            if let Some((target, key, value, stamp, seq)) = record_parts(rec) {
                if target == u {
                    found.push((stamp, seq, key, value));
                }
            }
        }
    }
    found.sort_by_key(|&(stamp, seq, _, _)| (stamp, seq));
    let mut memory = Memory::new();
    for (_, _, key, value) in found {
        memory.insert(key.to_string(), value.clone());
    }
    memory
}

impl Ctx for Emulated<'_> {
    fn node(&self) -> usize {
        self.outer.node()
    }

    fn graph(&self) -> &Graph {
        self.outer.graph()
    }

    fn shared_graph(&self) -> Arc<Graph> {
        self.outer.shared_graph()
    }

    fn query(&mut self, radius: usize) -> Result<Snapshot> {
        if radius > self.locality {
            return Err(Error::LocalityViolation {
                node: self.node(),
                requested: radius,
                allowed: self.locality,
            });
        }
        let wide = self.outer.query(radius + self.w)?;
        let graph = self.outer.graph();
        let mut nodes = BTreeMap::new();
        for (u, d, view) in wide.iter() {
            if d <= radius {
                let memory = merged_memory(graph, &wide, u, self.w);
                let view = NodeView { input: view.input.clone(), memory, output: view.output.clone() };
                nodes.insert(u, (d, view));
            }
        }
        Ok(Snapshot::new(wide.center, radius, nodes))
    }

    fn write(&mut self, target: usize, key: &str, value: Value) -> Result<()> {
        let me = self.node();
        let graph = self.outer.shared_graph();
        if target >= graph.n() || !self.reach.contains(&graph, me, self.w, target) {
            return Err(Error::WriteViolation { node: me, target, allowed: self.w });
        }
        let stamp = match self.stamp {
            Some(s) => s,
            None => {
                let near = self.outer.query(2 * self.w)?;
                let top = near
                    .iter()
                    .filter_map(|(_, _, v)| v.memory.get(STAMP).and_then(Value::as_u64))
                    .max()
                    .unwrap_or(0);
                self.outer.write(me, STAMP, json!(top + 1))?;
                self.stamp = Some(top + 1);
                top + 1
            }
        };
        let seq = self.records.len() as u64;
        if target == me && key != RECORDS && key != STAMP {
            // Plain copy for readers that do not merge records.
            self.outer.write(me, key, value.clone())?;
        }
        self.records.push(json!([target, key, value, stamp, seq]));
        self.outer.write(me, RECORDS, Value::Array(self.records.clone()))
    }

    fn set_output(&mut self, value: Value) {
        self.outer.set_output(value)
    }

    fn rng(&mut self) -> &mut Stream {
        self.outer.rng()
    }

    fn node_rng(&mut self, v: usize) -> Result<Stream> {
        self.outer.node_rng(v)
    }
}

/// Folds a pure k-phase algorithm into a single phase of locality
/// `r1 + 2 * (r2 + ... + rk)`.
///
/// Phases are folded pairwise from the left. When node `u` runs the folded
/// pair, it reads radius `ra + rb`, replays the first phase for every node
/// within `rb` that nobody has replayed yet (ascending node id), stores those
/// results at the replayed nodes, then runs the second phase for itself.
/// Outputs are valid but may differ from the multi-phase run because the
/// first phase is replayed in a different order.
pub fn reduce_phases(alg: &SlocalAlgorithm) -> Result<SlocalAlgorithm> {
    if alg.phases.is_empty() {
        return Err(Error::invalid("phase reduction needs at least one phase"));
    }
    if !alg.is_pure() {
        return Err(Error::invalid("phase reduction needs write radius 0 in every phase"));
    }
    if alg.phases.len() == 1 {
        return Ok(alg.clone());
    }
    let mut acc = alg.phases[0].clone();
    for next in &alg.phases[1..] {
        acc = local_writes(&fold_pair(&acc, next))?;
    }
    Ok(SlocalAlgorithm::new(format!("{}/one-phase", alg.name), vec![acc]))
}

const FIRST: &str = "first";
const SECOND: &str = "second";

fn stored_view(input: &Value, rec: &Value) -> NodeView {
    let memory = rec
        .get("memory")
        .and_then(Value::as_object)
        .map(|m| m.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
        .unwrap_or_default();
    let output = rec.get("output").filter(|v| !v.is_null()).cloned();
    NodeView { input: input.clone(), memory, output }
}

fn store(view: &NodeView) -> Value {
    json!({ "memory": view.memory, "output": view.output })
}

fn fold_pair(a: &Phase, b: &Phase) -> Phase {
    let (ra, rb) = (a.locality, b.locality);
    let (pa, pb) = (a.procedure.clone(), b.procedure.clone());
    Phase {
        locality: ra + rb,
        write_radius: rb,
        procedure: Arc::new(move |ctx: &mut dyn Ctx| {
            let u = ctx.node();
            let snap = ctx.query(ra + rb)?;
            let graph = ctx.shared_graph();
            let mut first: HashMap<usize, NodeView> = snap
                .iter()
                .map(|(y, _, view)| {
                    let v = match view.memory.get(FIRST) {
                        Some(rec) => stored_view(&view.input, rec),
                        None => NodeView { input: view.input.clone(), ..NodeView::default() },
                    };
                    (y, v)
                })
                .collect();
            let no_guard = |_: usize, _: usize| Ok(());
            for (x, d, view) in snap.iter() {
                if d > rb || view.memory.contains_key(FIRST) {
                    continue;
                }
                let rng = ctx.node_rng(x)?;
                SimCtx {
                    node: x,
                    graph: graph.clone(),
                    views: &mut first,
                    locality: ra,
                    write_radius: 0,
                    rng,
                    rng_of: &mut |v| ctx.node_rng(v),
                    guard: &no_guard,
                    observed: 0,
                    reach: Default::default(),
                }
                .run(&pa)?;
                ctx.write(x, FIRST, store(&first[&x]))?;
            }
            let mut second: HashMap<usize, NodeView> = snap
                .iter()
                .filter(|&(_, d, _)| d <= rb)
                .map(|(y, _, view)| {
                    let v = match view.memory.get(SECOND) {
                        Some(rec) => stored_view(&view.input, rec),
                        None => first[&y].clone(),
                    };
                    (y, v)
                })
                .collect();
            let rng = ctx.rng().clone();
            SimCtx {
                node: u,
                graph: graph.clone(),
                views: &mut second,
                locality: rb,
                write_radius: 0,
                rng,
                rng_of: &mut |v| ctx.node_rng(v),
                guard: &no_guard,
                observed: 0,
                reach: Default::default(),
            }
            .run(&pb)?;
            let mine = second.remove(&u).expect("own view present");
            ctx.write(u, SECOND, store(&mine))?;
            // Later phases read the plain keys.
            for (k, v) in &mine.memory {
                if ![FIRST, SECOND, RECORDS, STAMP].contains(&k.as_str()) {
                    ctx.write(u, k, v.clone())?;
                }
            }
            if let Some(out) = mine.output {
                ctx.set_output(out);
            }
            Ok(())
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::super::algorithms::*;
    use super::super::{run_slocal, Ordering};
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn no_writes_means_identity() {
        let alg = greedy_mis();
        let same = eliminate_writes(&alg).unwrap();
        let g = generate(&GraphKind::Cycle { n: 7 }, 0).unwrap();
        let o = Ordering::random(7, 1);
        assert_eq!(run_slocal(&g, &alg, &o, 0).unwrap(), run_slocal(&g, &same, &o, 0).unwrap());
    }

    #[test]
    fn flags_survive_elimination_on_c5() {
        let g = generate(&GraphKind::Cycle { n: 5 }, 0).unwrap();
        let o = Ordering::identity(5);
        let alg = flag_neighbors();
        let direct = run_slocal(&g, &alg, &o, 0).unwrap();
        let local = eliminate_writes(&alg).unwrap();
        assert_eq!(local.phases[0].write_radius, 0);
        let emulated = run_slocal(&g, &local, &o, 0).unwrap();
        assert_eq!(direct.outputs(), emulated.outputs());
        assert!(emulated.max_locality() <= 2);
        // node 1 was flagged by node 0, node 4 last by node 3
        assert_eq!(direct.outputs()[1], Some(json!(0)));
        assert_eq!(direct.outputs()[4], Some(json!(3)));
    }

    #[test]
    fn later_writer_wins() {
        let g = generate(&GraphKind::Path { n: 3 }, 0).unwrap();
        let alg = flag_neighbors();
        let local = eliminate_writes(&alg).unwrap();
        for (seq, winner) in [(vec![0, 2, 1], 2), (vec![2, 0, 1], 0)] {
            let o = Ordering::from_sequence(&seq).unwrap();
            let a = run_slocal(&g, &alg, &o, 0).unwrap();
            let b = run_slocal(&g, &local, &o, 0).unwrap();
            assert_eq!(a.outputs()[1], Some(json!(winner)));
            assert_eq!(b.outputs()[1], Some(json!(winner)));
        }
    }

    #[test]
    fn elimination_rejects_multi_phase() {
        assert!(eliminate_writes(&neighbor_sum_two_phase()).is_err());
    }

    #[test]
    fn reduction_rejects_empty_and_impure() {
        assert!(reduce_phases(&SlocalAlgorithm::new("none", vec![])).is_err());
        assert!(reduce_phases(&flag_neighbors()).is_err());
    }

    #[test]
    fn single_phase_reduction_is_identity() {
        let alg = greedy_coloring();
        let red = reduce_phases(&alg).unwrap();
        let g = generate(&GraphKind::Gnp { n: 25, p: 0.2 }, 4).unwrap();
        let o = Ordering::random(25, 4);
        assert_eq!(run_slocal(&g, &alg, &o, 1).unwrap(), run_slocal(&g, &red, &o, 1).unwrap());
    }

    #[test]
    fn neighbor_sum_folds_exactly() {
        let g = generate(&GraphKind::Gnp { n: 20, p: 0.3 }, 11).unwrap();
        let alg = neighbor_sum_two_phase();
        let red = reduce_phases(&alg).unwrap();
        assert_eq!(red.phases[0].locality, 3);
        for s in 0..5 {
            let o = Ordering::random(20, s);
            let a = run_slocal(&g, &alg, &o, s).unwrap();
            let b = run_slocal(&g, &red, &o, s).unwrap();
            assert_eq!(a.outputs(), b.outputs());
            assert!(b.max_locality() <= 3);
        }
    }

    #[test]
    fn three_phases_fold_within_bound() {
        let g = generate(&GraphKind::Gnp { n: 18, p: 0.25 }, 2).unwrap();
        let alg = mis_pointer_count_three_phase();
        let red = reduce_phases(&alg).unwrap();
        assert_eq!(red.phases[0].locality, 1 + 2 * (1 + 1));
        for s in 0..5 {
            let o = Ordering::random(18, 100 + s);
            let t = run_slocal(&g, &red, &o, s).unwrap();
            assert!(t.max_locality() <= 5);
            assert!(verify_mis_pointer_count(&g, &t.outputs()));
        }
    }
}
