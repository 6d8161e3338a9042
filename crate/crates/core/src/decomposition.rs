//! Network decompositions: sequential ball growing, verification, and the
//! induced processing order.

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::slocal::Ordering;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkDecomposition {
    /// Cluster id per node; `None` marks an unclustered node.
    pub cluster_of: Vec<Option<usize>>,
    /// Color per cluster, in `1..=num_colors`.
    pub cluster_color: Vec<usize>,
    pub num_colors: usize,
    /// Measured weak diameter per cluster, in the decomposed graph.
    pub weak_diameters: Vec<usize>,
    /// The decomposed graph is the base graph raised to this power.
    pub base_graph_radius: usize,
}

impl NetworkDecomposition {
    /// Builds a decomposition from per-node cluster ids and per-cluster
    /// colors, measuring weak diameters in `graph`.
    pub fn from_assignment(
        graph: &Graph,
        cluster_of: Vec<Option<usize>>,
        cluster_color: Vec<usize>,
        base_graph_radius: usize,
    ) -> Self {
        let num_colors = cluster_color.iter().copied().max().unwrap_or(0);
        let mut dec = NetworkDecomposition {
            cluster_of,
            cluster_color,
            num_colors,
            weak_diameters: Vec::new(),
            base_graph_radius,
        };
        dec.weak_diameters = dec.clusters().iter().map(|c| graph.weak_diameter(c).0).collect();
        dec
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_color.len()
    }

    /// Members of every cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (v, c) in self.cluster_of.iter().enumerate() {
            if let Some(c) = *c {
                if c < out.len() {
                    out[c].push(v);
                }
            }
        }
        out
    }

    pub fn color_of_node(&self, v: usize) -> Option<usize> {
        self.cluster_of[v].and_then(|c| self.cluster_color.get(c).copied())
    }

    pub fn max_weak_diameter(&self) -> usize {
        self.weak_diameters.iter().copied().max().unwrap_or(0)
    }

    /// `{"colors", "clusters": [{"id", "color", "nodes", "weak_diameter"}]}`
    pub fn to_json(&self) -> Value {
        let clusters: Vec<Value> = self
            .clusters()
            .into_iter()
            .enumerate()
            .map(|(id, nodes)| {
                json!({
                    "id": id,
                    "color": self.cluster_color[id],
                    "nodes": nodes,
                    "weak_diameter": self.weak_diameters.get(id),
                })
            })
            .collect();
        json!({ "colors": self.num_colors, "clusters": clusters })
    }

    /// Reads the JSON form back; nodes not listed in any cluster stay
    /// unclustered. Weak diameters are re-measured in `graph`.
    pub fn from_json(graph: &Graph, value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::invalid(format!("decomposition JSON: {m}"));
        let clusters = value.get("clusters").and_then(Value::as_array).ok_or_else(|| bad("missing clusters"))?;
        let mut cluster_of = vec![None; graph.n()];
        let mut colors = vec![0; clusters.len()];
        for c in clusters {
            let id = c.get("id").and_then(Value::as_u64).ok_or_else(|| bad("cluster without id"))? as usize;
            if id >= clusters.len() {
                return Err(bad("cluster ids must be 0..k-1"));
            }
            colors[id] = c.get("color").and_then(Value::as_u64).ok_or_else(|| bad("cluster without color"))? as usize;
            for v in c.get("nodes").and_then(Value::as_array).ok_or_else(|| bad("cluster without nodes"))? {
                let v = v.as_u64().ok_or_else(|| bad("node id"))? as usize;
                if v >= graph.n() {
                    return Err(bad("node id out of range"));
                }
                if cluster_of[v].replace(id).is_some() {
                    return Err(bad("node in two clusters"));
                }
            }
        }
        let mut dec = Self::from_assignment(graph, cluster_of, colors, 1);
        if let Some(c) = value.get("colors").and_then(Value::as_u64) {
            dec.num_colors = dec.num_colors.max(c as usize);
        }
        Ok(dec)
    }
}

/// One emitted cluster, kept for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrownBall {
    pub center: usize,
    pub radius: usize,
    pub color: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallGrowingRun {
    pub decomposition: NetworkDecomposition,
    pub balls: Vec<GrownBall>,
    /// Unclustered node count before each block, plus the final 0.
    pub remaining: Vec<usize>,
}

pub fn floor_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// Sequential ball growing: block by block, repeatedly take the lowest-id
/// node still in the block's graph, grow the ball until the next layer would
/// not double it, emit the ball as a cluster and remove the ball plus one
/// layer from the block's graph.
pub fn ball_growing_decomposition(graph: &Graph) -> Result<NetworkDecomposition> {
    ball_growing_run(graph).map(|r| r.decomposition)
}

pub fn ball_growing_run(graph: &Graph) -> Result<BallGrowingRun> {
    let n = graph.n();
    let log = floor_log2(n);
    let mut cluster_of: Vec<Option<usize>> = vec![None; n];
    let mut cluster_color = Vec::new();
    let mut weak = Vec::new();
    let mut balls = Vec::new();
    let mut remaining_counts = Vec::new();
    let mut unclustered = n;
    let mut color = 0;
    while unclustered > 0 {
        color += 1;
        remaining_counts.push(unclustered);
        let before = unclustered;
        let mut active: Vec<bool> = cluster_of.iter().map(Option::is_none).collect();
        let mut cursor = 0;
        loop {
            while cursor < n && !active[cursor] {
                cursor += 1;
            }
            if cursor == n {
                break;
            }
            let v = cursor;
            let layers = graph.bfs_layers(v, &active, UNREACHED);
            let mut size = 1;
            let mut r = 0;
            // Smallest r with |B_{r+1}| <= 2 |B_r|; layers past the end are empty.
            while r + 1 < layers.len() && size + layers[r + 1].len() > 2 * size {
                size += layers[r + 1].len();
                r += 1;
            }
            if r > log {
                return Err(Error::invariant(format!("ball radius {r} at node {v} exceeds floor(log2 n) = {log}")));
            }
            let id = cluster_color.len();
            let members: Vec<usize> = layers[..=r].iter().flatten().copied().collect();
            for &u in &members {
                cluster_of[u] = Some(id);
            }
            for layer in layers.iter().take(r + 2) {
                for &u in layer {
                    active[u] = false;
                }
            }
            unclustered -= members.len();
            let (wd, _) = graph.weak_diameter(&members);
            if wd > 2 * log {
                return Err(Error::invariant(format!("cluster {id} weak diameter {wd} > 2 floor(log2 n)")));
            }
            cluster_color.push(color);
            weak.push(wd);
            balls.push(GrownBall { center: v, radius: r, color });
        }
        if 2 * unclustered > before {
            return Err(Error::invariant(format!(
                "block {color} left {unclustered} of {before} nodes unclustered"
            )));
        }
    }
    remaining_counts.push(0);
    if color > log + 1 {
        return Err(Error::invariant(format!("{color} colors > floor(log2 n) + 1")));
    }
    Ok(BallGrowingRun {
        decomposition: NetworkDecomposition {
            cluster_of,
            cluster_color,
            num_colors: color,
            weak_diameters: weak,
            base_graph_radius: 1,
        },
        balls,
        remaining: remaining_counts,
    })
}

/// Labels nodes by the rank of (cluster color, cluster id, node id).
pub fn decomposition_to_ordering(dec: &NetworkDecomposition) -> Result<Ordering> {
    let mut keys = Vec::with_capacity(dec.cluster_of.len());
    for (v, c) in dec.cluster_of.iter().enumerate() {
        let c = c.ok_or_else(|| Error::invalid(format!("node {v} is unclustered")))?;
        keys.push((dec.cluster_color[c], c, v));
    }
    keys.sort_unstable();
    let seq: Vec<usize> = keys.into_iter().map(|k| k.2).collect();
    Ordering::from_sequence(&seq)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Unclustered { node: usize },
    BadCluster { node: usize, cluster: usize },
    Diameter { cluster: usize, measured: Option<usize>, bound: usize, witness: (usize, usize) },
    ColorOutOfRange { cluster: usize, color: usize },
    TooManyColors { colors: usize, bound: usize },
    SameColorAdjacent { edge: (usize, usize), color: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub max_weak_diameter: Option<usize>,
    pub colors: usize,
}

impl DecompositionReport {
    pub fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| match v {
                Violation::Unclustered { node } => json!({"kind": "unclustered", "node": node}),
                Violation::BadCluster { node, cluster } => json!({"kind": "bad-cluster", "node": node, "cluster": cluster}),
                Violation::Diameter { cluster, measured, bound, witness } => json!({
                    "kind": "diameter", "cluster": cluster, "measured": measured, "bound": bound, "witness": [witness.0, witness.1]
                }),
                Violation::ColorOutOfRange { cluster, color } => json!({"kind": "color-range", "cluster": cluster, "color": color}),
                Violation::TooManyColors { colors, bound } => json!({"kind": "too-many-colors", "colors": colors, "bound": bound}),
                Violation::SameColorAdjacent { edge, color } => json!({"kind": "same-color-adjacent", "edge": [edge.0, edge.1], "color": color}),
            })
            .collect();
        json!({
            "valid": self.valid,
            "colors": self.colors,
            "max_weak_diameter": self.max_weak_diameter,
            "violations": violations,
        })
    }
}

/// Checks totality, weak diameter (measured in `graph`), color count and
/// that no edge joins two distinct clusters of the same color.
pub fn verify_decomposition(
    graph: &Graph,
    dec: &NetworkDecomposition,
    d_bound: usize,
    c_bound: usize,
) -> DecompositionReport {
    let mut violations = Vec::new();
    let k = dec.cluster_count();
    for v in 0..graph.n() {
        match dec.cluster_of.get(v).copied().flatten() {
            None => violations.push(Violation::Unclustered { node: v }),
            Some(c) if c >= k => violations.push(Violation::BadCluster { node: v, cluster: c }),
            Some(_) => {}
        }
    }
    let mut max_wd = Some(0);
    for (id, members) in dec.clusters().iter().enumerate() {
        let (wd, witness) = graph.weak_diameter(members);
        let measured = (wd != UNREACHED).then_some(wd);
        max_wd = match (max_wd, measured) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        if measured.map_or(true, |w| w > d_bound) {
            violations.push(Violation::Diameter { cluster: id, measured, bound: d_bound, witness });
        }
    }
    let mut used = std::collections::BTreeSet::new();
    for (id, &color) in dec.cluster_color.iter().enumerate() {
        if color == 0 || color > c_bound {
            violations.push(Violation::ColorOutOfRange { cluster: id, color });
        }
        used.insert(color);
    }
    if used.len() > c_bound {
        violations.push(Violation::TooManyColors { colors: used.len(), bound: c_bound });
    }
    for (u, v) in graph.edges() {
        if let (Some(Some(a)), Some(Some(b))) = (dec.cluster_of.get(u), dec.cluster_of.get(v)) {
            if a != b && *a < k && *b < k && dec.cluster_color[*a] == dec.cluster_color[*b] {
                violations.push(Violation::SameColorAdjacent { edge: (u, v), color: dec.cluster_color[*a] });
            }
        }
    }
    DecompositionReport {
        valid: violations.is_empty(),
        violations,
        max_weak_diameter: max_wd,
        colors: used.len(),
    }
}

/// Round cost charged for a distributed decomposition of `G^r` that is not
/// simulated: `ceil(beta * r * log2(n)^2)`.
pub fn charged_decomposition_rounds(n: usize, r: usize, beta: f64) -> usize {
    if n <= 1 {
        return 0;
    }
    let l = (n as f64).log2();
    (beta * r as f64 * l * l).ceil() as usize
}
