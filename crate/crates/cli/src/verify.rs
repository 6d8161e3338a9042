//! Checks a stored solution against an instance.

use crate::report::Outcome;
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use slocal_core::cf::{verify_cf, MultiColoring};
use slocal_core::decomposition::{floor_log2, verify_decomposition, NetworkDecomposition};
use slocal_core::graph::io::{read_bipartite, read_graph, read_hypergraph};
use slocal_core::ilp::{verify_dominating, verify_independent};
use slocal_core::slocal::algorithms::verify_coloring_outputs;
use slocal_core::splitting::{verify_lambda_split, verify_weak_split, SplitColoring};
use slocal_core::{Error, Result};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Decomposition,
    Independent,
    Dominating,
    Coloring,
    Cf,
    Split,
    WeakSplit,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub problem: Problem,
    pub instance: PathBuf,
    /// Solution JSON, or a report whose `solution` field holds it
    pub solution: PathBuf,
    /// Weak-diameter bound (default 2 floor(log2 n))
    #[arg(long)]
    pub d_bound: Option<usize>,
    /// Color bound (default floor(log2 n) + 1)
    #[arg(long)]
    pub c_bound: Option<usize>,
    /// Split fraction (default 1/2)
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn node_list(v: &Value) -> Result<Vec<usize>> {
    v.get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidArgument("solution has no \"nodes\" list".into()))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| Error::InvalidArgument("bad node id".into())))
        .collect()
}

fn in_range(nodes: &[usize], n: usize) -> Result<()> {
    match nodes.iter().find(|&&v| v >= n) {
        Some(v) => Err(Error::InvalidArgument(format!("node {v} out of range"))),
        None => Ok(()),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.solution)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("solution JSON: {e}")))?;
    let sol = raw.get("solution").cloned().unwrap_or(raw);
    Ok(match a.problem {
        Problem::Decomposition => {
            let g = read_graph(&a.instance)?;
            let dec = NetworkDecomposition::from_json(&g, &sol)?;
            let l = floor_log2(g.n());
            let (d, c) = (a.d_bound.unwrap_or(2 * l), a.c_bound.unwrap_or(l + 1));
            let rep = verify_decomposition(&g, &dec, d, c);
            Outcome::new(json!(null)).valid(rep.valid).verification(rep.to_json()).param("d_bound", d).param("c_bound", c)
        }
        Problem::Independent | Problem::Dominating => {
            let g = read_graph(&a.instance)?;
            let nodes = node_list(&sol)?;
            in_range(&nodes, g.n())?;
            let ok = if a.problem == Problem::Independent {
                verify_independent(&g, &nodes)
            } else {
                verify_dominating(&g, &nodes)
            };
            Outcome::new(json!(null)).valid(ok).metric("size", nodes.len())
        }
        Problem::Coloring => {
            let g = read_graph(&a.instance)?;
            let colors = sol
                .get("colors")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidArgument("solution has no \"colors\" list".into()))?;
            let outputs: Vec<Option<Value>> = colors.iter().map(|c| Some(c.clone())).collect();
            let ok = outputs.len() == g.n() && verify_coloring_outputs(&g, &outputs);
            Outcome::new(json!(null)).valid(ok)
        }
        Problem::Cf => {
            let h = read_hypergraph(&a.instance)?;
            let rep = verify_cf(&h, &MultiColoring::from_json(&sol, h.n())?);
            Outcome::new(json!(null)).valid(rep.valid).verification(rep.to_json())
        }
        Problem::Split | Problem::WeakSplit => {
            let b = read_bipartite(&a.instance)?;
            let coloring = SplitColoring::from_json(&sol, b.right_count())?;
            if a.problem == Problem::WeakSplit {
                let rep = verify_weak_split(&b, &coloring);
                Outcome::new(json!(null)).valid(rep.valid).verification(rep.to_json())
            } else {
                let lambda = a.lambda.unwrap_or(0.5);
                let rep = verify_lambda_split(&b, &coloring, lambda);
                Outcome::new(json!(null)).valid(rep.valid).verification(rep.to_json()).param("lambda", lambda)
            }
        }
    })
}
