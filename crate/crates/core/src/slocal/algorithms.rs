//! Bundled SLOCAL algorithms and the verifiers for their outputs.

use super::{Ctx, Phase, SlocalAlgorithm};
use crate::graph::Graph;
use serde_json::{json, Value};

/// Join the independent set unless an earlier neighbor already joined.
/// Output: `true` / `false`.
pub fn greedy_mis() -> SlocalAlgorithm {
    SlocalAlgorithm::new(
        "greedy-mis",
        vec![Phase::new(1, 0, |ctx: &mut dyn Ctx| {
            let snap = ctx.query(1)?;
            let blocked = snap
                .iter()
                .any(|(_, d, view)| d == 1 && view.output == Some(Value::Bool(true)));
            ctx.set_output(Value::Bool(!blocked));
            Ok(())
        })],
    )
}

/// Smallest positive color not taken by an earlier neighbor.
pub fn greedy_coloring() -> SlocalAlgorithm {
    SlocalAlgorithm::new(
        "greedy-coloring",
        vec![Phase::new(1, 0, |ctx: &mut dyn Ctx| {
            let snap = ctx.query(1)?;
            let mut taken: Vec<u64> = snap
                .iter()
                .filter(|&(_, d, _)| d == 1)
                .filter_map(|(_, _, view)| view.output.as_ref().and_then(Value::as_u64))
                .collect();
            taken.sort_unstable();
            let mut c = 1;
            for t in taken {
                if t == c {
                    c += 1;
                }
            }
            ctx.set_output(json!(c));
            Ok(())
        })],
    )
}

/// Outputs the id of the last earlier neighbor that flagged it (or null),
/// then flags all of its neighbors. Uses remote writes at radius 1.
pub fn flag_neighbors() -> SlocalAlgorithm {
    SlocalAlgorithm::new(
        "flag-neighbors",
        vec![Phase::new(1, 1, |ctx: &mut dyn Ctx| {
            let u = ctx.node();
            let snap = ctx.query(1)?;
            let seen = snap.get(u).and_then(|v| v.memory.get("flag").cloned()).unwrap_or(Value::Null);
            ctx.set_output(seen);
            let nbrs: Vec<usize> = snap.iter().filter(|&(_, d, _)| d == 1).map(|(w, _, _)| w).collect();
            for w in nbrs {
                ctx.write(w, "flag", json!(u))?;
            }
            Ok(())
        })],
    )
}

/// Phase 1 stores the degree, phase 2 outputs the sum of neighbor degrees.
pub fn neighbor_sum_two_phase() -> SlocalAlgorithm {
    SlocalAlgorithm::new(
        "neighbor-sum",
        vec![
            Phase::new(1, 0, |ctx: &mut dyn Ctx| {
                let snap = ctx.query(1)?;
                let deg = snap.iter().filter(|&(_, d, _)| d == 1).count();
                let u = ctx.node();
                ctx.write(u, "deg", json!(deg))
            }),
            Phase::new(1, 0, |ctx: &mut dyn Ctx| {
                let snap = ctx.query(1)?;
                let sum: u64 = snap
                    .iter()
                    .filter(|&(_, d, _)| d == 1)
                    .filter_map(|(_, _, view)| view.memory.get("deg").and_then(Value::as_u64))
                    .sum();
                ctx.set_output(json!(sum));
                Ok(())
            }),
        ],
    )
}

pub fn neighbor_sum_reference(g: &Graph) -> Vec<Option<Value>> {
    (0..g.n())
        .map(|v| Some(json!(g.neighbors(v).iter().map(|&w| g.degree(w) as u64).sum::<u64>())))
        .collect()
}

fn mis_phase() -> Phase {
    Phase::new(1, 0, |ctx: &mut dyn Ctx| {
        let snap = ctx.query(1)?;
        let blocked = snap
            .iter()
            .any(|(_, d, view)| d == 1 && view.memory.get("mis") == Some(&Value::Bool(true)));
        let u = ctx.node();
        ctx.write(u, "mis", Value::Bool(!blocked))
    })
}

fn pointer_phase() -> Phase {
    Phase::new(1, 0, |ctx: &mut dyn Ctx| {
        let u = ctx.node();
        let snap = ctx.query(1)?;
        let in_mis = |v: usize| snap.get(v).and_then(|s| s.memory.get("mis")) == Some(&Value::Bool(true));
        let ptr = if in_mis(u) {
            u
        } else {
            snap.iter()
                .filter(|&(w, d, _)| d == 1 && in_mis(w))
                .map(|(w, _, _)| w)
                .min()
                .unwrap_or(u)
        };
        ctx.write(u, "ptr", json!(ptr))?;
        ctx.set_output(json!(ptr));
        Ok(())
    })
}

/// Phase 1 computes a greedy MIS, phase 2 points every node at its smallest
/// MIS neighbor (MIS nodes point at themselves).
pub fn mis_pointer_two_phase() -> SlocalAlgorithm {
    SlocalAlgorithm::new("mis-pointer", vec![mis_phase(), pointer_phase()])
}

/// Adds a third phase: output `[ptr, load]` where `load` counts the
/// neighbors pointing at an MIS node.
pub fn mis_pointer_count_three_phase() -> SlocalAlgorithm {
    let load = Phase::new(1, 0, |ctx: &mut dyn Ctx| {
        let u = ctx.node();
        let snap = ctx.query(1)?;
        let ptr_of = |v: usize| snap.get(v).and_then(|s| s.memory.get("ptr")).and_then(Value::as_u64);
        let mine = ptr_of(u).unwrap_or(u as u64);
        let load = snap
            .iter()
            .filter(|&(w, d, _)| d == 1 && ptr_of(w) == Some(u as u64))
            .count();
        ctx.set_output(json!([mine, load]));
        Ok(())
    });
    SlocalAlgorithm::new("mis-pointer-load", vec![mis_phase(), pointer_phase(), load])
}

fn as_flag(v: &Option<Value>) -> Option<bool> {
    v.as_ref().and_then(Value::as_bool)
}

/// Outputs mark a maximal independent set.
pub fn verify_mis_outputs(g: &Graph, outputs: &[Option<Value>]) -> bool {
    let Some(flags) = outputs.iter().map(as_flag).collect::<Option<Vec<bool>>>() else {
        return false;
    };
    verify_maximal_independent(g, &flags)
}

pub fn verify_maximal_independent(g: &Graph, in_set: &[bool]) -> bool {
    (0..g.n()).all(|v| {
        let hit = g.neighbors(v).iter().any(|&w| in_set[w]);
        if in_set[v] {
            !hit
        } else {
            hit
        }
    })
}

/// Outputs form a proper coloring with colors in `1..=Δ+1`.
pub fn verify_coloring_outputs(g: &Graph, outputs: &[Option<Value>]) -> bool {
    let Some(colors) = outputs
        .iter()
        .map(|o| o.as_ref().and_then(Value::as_u64))
        .collect::<Option<Vec<u64>>>()
    else {
        return false;
    };
    let limit = g.max_degree() as u64 + 1;
    colors.iter().all(|&c| (1..=limit).contains(&c)) && g.edges().all(|(u, v)| colors[u] != colors[v])
}

fn pointers_valid(g: &Graph, ptr: &[usize]) -> bool {
    let in_set: Vec<bool> = (0..g.n()).map(|v| ptr[v] == v).collect();
    verify_maximal_independent(g, &in_set)
        && (0..g.n()).all(|v| {
            in_set[v] || g.neighbors(v).iter().copied().filter(|&w| in_set[w]).min() == Some(ptr[v])
        })
}

/// MIS nodes point at themselves and every other node at its smallest MIS
/// neighbor.
pub fn verify_mis_pointer(g: &Graph, outputs: &[Option<Value>]) -> bool {
    let Some(ptr) = outputs
        .iter()
        .map(|o| o.as_ref().and_then(Value::as_u64).map(|p| p as usize))
        .collect::<Option<Vec<usize>>>()
    else {
        return false;
    };
    ptr.iter().all(|&p| p < g.n()) && pointers_valid(g, &ptr)
}

pub fn verify_mis_pointer_count(g: &Graph, outputs: &[Option<Value>]) -> bool {
    let Some(pairs) = outputs
        .iter()
        .map(|o| {
            let a = o.as_ref()?.as_array()?;
            Some((a.first()?.as_u64()? as usize, a.get(1)?.as_u64()? as usize))
        })
        .collect::<Option<Vec<_>>>()
    else {
        return false;
    };
    let ptr: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    if ptr.iter().any(|&p| p >= g.n()) || !pointers_valid(g, &ptr) {
        return false;
    }
    (0..g.n()).all(|v| pairs[v].1 == g.neighbors(v).iter().filter(|&&w| ptr[w] == v).count())
}
