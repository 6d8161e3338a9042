//! Reductions wired to a named solver or a replayed oracle.

use crate::catalog::{Knobs, OrderKind};
use crate::report::Outcome;
use serde_json::Value;
use slocal_core::cf::{lowrank_cf, random_cf, slocal_cf, verify_cf, CfParams, MultiColoring};
use slocal_core::decomposition::verify_decomposition;
use slocal_core::reductions::{cf_from_split, decomposition_from_cf};
use slocal_core::slocal::Ordering;
use slocal_core::splitting::{random_split, slocal_lambda_split, SplitColoring, SplitParams, SplitTarget};
use slocal_core::{Error, Graph, Hypergraph, Result};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleSpec {
    Named(String),
    Replay(PathBuf),
}

impl OracleSpec {
    pub fn parse(s: &str) -> OracleSpec {
        match s.strip_prefix("replay:") {
            Some(path) => OracleSpec::Replay(PathBuf::from(path)),
            None => OracleSpec::Named(s.to_string()),
        }
    }

    fn describe(&self) -> String {
        match self {
            OracleSpec::Named(n) => n.clone(),
            OracleSpec::Replay(p) => format!("replay:{}", p.display()),
        }
    }
}

/// Answers read from a file, one per oracle call. The file holds a JSON
/// array, an object with a `calls` array, or a single answer. Answers may be
/// full run reports; their `solution` field is used.
struct Replay {
    answers: Vec<Value>,
    next: usize,
}

impl Replay {
    fn load(path: &Path) -> Result<Replay> {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::OracleFailure(format!("replay file {}: {e}", path.display())))?;
        let answers = match value {
            Value::Array(a) => a,
            Value::Object(ref o) if o.get("calls").is_some_and(Value::is_array) => {
                o["calls"].as_array().cloned().unwrap_or_default()
            }
            other => vec![other],
        };
        Ok(Replay { answers, next: 0 })
    }

    fn take(&mut self) -> Result<Value> {
        let answer = self.answers.get(self.next).cloned().ok_or_else(|| {
            Error::OracleFailure(format!("replay file holds {} answers, call {} has none", self.answers.len(), self.next + 1))
        })?;
        self.next += 1;
        Ok(answer.get("solution").cloned().unwrap_or(answer))
    }
}

fn bad_replay(e: Error) -> Error {
    match e {
        Error::OracleFailure(m) => Error::OracleFailure(m),
        other => Error::OracleFailure(format!("replayed answer rejected: {other}")),
    }
}

/// Returns the outcome and every oracle answer, in call order.
pub fn decomp_from_cf(g: &Graph, oracle: &OracleSpec, k: &Knobs) -> Result<(Outcome, Vec<Value>)> {
    let epsilon = k.epsilon.unwrap_or(0.5);
    let q = k.q.unwrap_or(6);
    let seed = k.seed_or_default();
    let defaults = CfParams::default();
    let params = CfParams { theta: k.theta.unwrap_or(defaults.theta), retries: k.retries.unwrap_or(defaults.retries) };
    let order = k.make_order(g.n())?;
    let mut calls = 0u64;
    let mut tape = Vec::new();
    let run = match oracle {
        OracleSpec::Named(name) => {
            let solve: Box<dyn Fn(&Hypergraph, u64) -> Result<MultiColoring>> = match name.as_str() {
                "slocal-cf" => Box::new(|h: &Hypergraph, s| slocal_cf(h, &order, params, s).map(|r| r.coloring)),
                "lowrank-cf" => Box::new(|h: &Hypergraph, _| lowrank_cf(h).map(|r| r.coloring)),
                "random-cf" => Box::new(|h: &Hypergraph, s| random_cf(h, q, s)),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown CF oracle {other:?}; known: slocal-cf, lowrank-cf, random-cf, replay:FILE"
                    )))
                }
            };
            decomposition_from_cf(g, epsilon, q, |h| {
                calls += 1;
                let c = solve(h, seed.wrapping_add(calls - 1))?;
                tape.push(c.to_json());
                Ok(c)
            })?
        }
        OracleSpec::Replay(path) => {
            let mut replay = Replay::load(path)?;
            decomposition_from_cf(g, epsilon, q, |h| {
                calls += 1;
                let c = MultiColoring::from_json(&replay.take()?, h.n()).map_err(bad_replay)?;
                tape.push(c.to_json());
                Ok(c)
            })?
        }
    };
    let dec = &run.decomposition;
    let rep = verify_decomposition(g, dec, run.d_bound, run.c_bound);
    let mut solution = dec.to_json();
    solution["assignment"] = run.assignment.to_json();
    let max_r = run.assignment.radius_of.iter().copied().max().unwrap_or(0);
    let out = Outcome::new(solution)
        .valid(rep.valid)
        .verification(rep.to_json())
        .param("oracle", oracle.describe())
        .param("epsilon", epsilon)
        .param("q", q)
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("oracle_calls", calls)
        .metric("classes", run.classes.clone())
        .metric("clusters", dec.cluster_count())
        .metric("colors", dec.num_colors)
        .metric("max_weak_diameter", dec.max_weak_diameter())
        .metric("max_radius", max_r)
        .metric("d_bound", run.d_bound)
        .metric("c_bound", run.c_bound);
    Ok((out, tape))
}

pub fn cf_from_split_pipeline(h: &Hypergraph, oracle: &OracleSpec, k: &Knobs) -> Result<(Outcome, Vec<Value>)> {
    let delta = k.delta.unwrap_or(8);
    let seed = k.seed_or_default();
    let params = SplitParams {
        alpha: k.alpha.unwrap_or(SplitParams::default().alpha),
        target: SplitTarget::Lambda(1.0 / delta as f64),
        retries: k.retries.unwrap_or(SplitParams::default().retries),
    };
    let mut calls = 0u64;
    let mut tape = Vec::new();
    let run = match oracle {
        OracleSpec::Named(name) => {
            let randomized = match name.as_str() {
                "slocal-split" => false,
                "random-split" => true,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown split oracle {other:?}; known: slocal-split, random-split, replay:FILE"
                    )))
                }
            };
            cf_from_split(h, delta, |b| {
                calls += 1;
                let s = seed.wrapping_add(calls - 1);
                let split = if randomized {
                    random_split(b, s)
                } else {
                    let order = match k.order {
                        OrderKind::Random => Ordering::random(b.right_count(), s),
                        _ => Ordering::identity(b.right_count()),
                    };
                    slocal_lambda_split(b, &order, params, s)?.coloring
                };
                tape.push(split.to_json());
                Ok(split)
            })?
        }
        OracleSpec::Replay(path) => {
            let mut replay = Replay::load(path)?;
            cf_from_split(h, delta, |b| {
                calls += 1;
                let split = SplitColoring::from_json(&replay.take()?, b.right_count()).map_err(bad_replay)?;
                tape.push(split.to_json());
                Ok(split)
            })?
        }
    };
    let rep = verify_cf(h, &run.coloring);
    let factor = 1.0 - 1.0 / (2.0 * delta as f64);
    let shrinks = run.ranks.windows(2).all(|w| w[1] as f64 <= factor * w[0] as f64);
    let out = Outcome::new(run.coloring.to_json())
        .valid(rep.valid)
        .verification(rep.to_json())
        .param("oracle", oracle.describe())
        .param("delta", delta)
        .param("seed", seed)
        .metric("oracle_calls", calls)
        .metric("colors", run.coloring.q)
        .metric("ranks", run.ranks.clone())
        .metric("palette_sizes", run.palette_sizes.clone())
        .metric("phases", run.ranks.len())
        .metric("phase_bound", run.phase_bound)
        .check("rank-shrink-le-1-1/(2delta)", shrinks)
        .check("phases-le-bound", run.ranks.len() <= run.phase_bound)
        .check("every-edge-resolved", run.resolved_in.iter().all(|&p| p < run.ranks.len()))
        .metric("edges", h.edge_count());
    Ok((out, tape))
}
