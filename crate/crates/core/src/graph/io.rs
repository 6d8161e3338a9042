//! Plain-text instance formats.
//!
//! Graph: `n m` then `m` lines `u v`. Hypergraph: `n m` then `m` lines
//! `k v1 .. vk`. Bipartite: `nu nv m` then `m` lines `u v`. Blank lines and
//! lines starting with `#` are skipped.

use super::{BipartiteGraph, Graph, Hypergraph};
use crate::error::{Error, Result};
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next content line as (1-based line number, parsed integers).
    fn next_numbers(&mut self) -> Result<Option<(usize, Vec<usize>)>> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.trim();
            self.last = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line: i + 1,
                        msg: format!("expected a non-negative integer, found {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Some((i + 1, nums)));
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        self.next_numbers()?.ok_or_else(|| Error::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    fn finish(&mut self) -> Result<()> {
        if let Some((line, _)) = self.next_numbers()? {
            return Err(Error::Parse { line, msg: "more lines than the header announced".into() });
        }
        Ok(())
    }
}

fn arity(line: usize, nums: &[usize], k: usize, what: &str) -> Result<()> {
    if nums.len() != k {
        return Err(Error::Parse {
            line,
            msg: format!("{what} needs {k} fields, found {}", nums.len()),
        });
    }
    Ok(())
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.expect("header \"n m\"")?;
    arity(hl, &header, 2, "header")?;
    let (n, m) = (header[0], header[1]);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, nums) = lines.expect("edge line")?;
        arity(line, &nums, 2, "edge")?;
        let (u, v) = (nums[0], nums[1]);
        if u >= n || v >= n {
            return Err(Error::Parse { line, msg: format!("node id out of range (n = {n})") });
        }
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at {u}") });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::Parse { line, msg: format!("duplicate edge {u} {v}") });
        }
        edges.push((u, v));
    }
    lines.finish()?;
    Graph::from_edges(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.expect("header \"n m\"")?;
    arity(hl, &header, 2, "header")?;
    let (n, m) = (header[0], header[1]);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, nums) = lines.expect("hyperedge line")?;
        if nums.is_empty() || nums[0] == 0 || nums.len() != nums[0] + 1 {
            return Err(Error::Parse { line, msg: "hyperedge line must be \"k v1 .. vk\" with k >= 1".into() });
        }
        let mut e = nums[1..].to_vec();
        if e.iter().any(|&v| v >= n) {
            return Err(Error::Parse { line, msg: format!("node id out of range (n = {n})") });
        }
        e.sort_unstable();
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse { line, msg: "hyperedge repeats a node".into() });
        }
        edges.push(e);
    }
    lines.finish()?;
    Hypergraph::new(n, edges)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("{} {}\n", h.n(), h.edge_count());
    for e in h.edges() {
        let _ = write!(out, "{}", e.len());
        for v in e {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_bipartite(text: &str) -> Result<BipartiteGraph> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.expect("header \"nu nv m\"")?;
    arity(hl, &header, 3, "header")?;
    let (nu, nv, m) = (header[0], header[1], header[2]);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, nums) = lines.expect("edge line")?;
        arity(line, &nums, 2, "edge")?;
        let (u, v) = (nums[0], nums[1]);
        if u >= nu || v >= nv {
            return Err(Error::Parse { line, msg: "node id out of range".into() });
        }
        if !seen.insert((u, v)) {
            return Err(Error::Parse { line, msg: format!("duplicate edge {u} {v}") });
        }
        edges.push((u, v));
    }
    lines.finish()?;
    BipartiteGraph::new(nu, nv, &edges)
}

pub fn write_bipartite(b: &BipartiteGraph) -> String {
    let mut out = format!("{} {} {}\n", b.left_count(), b.right_count(), b.edge_count());
    for (u, v) in b.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// `n` lines `node label`, one per node in any order.
pub fn parse_labels(text: &str, n: usize) -> Result<Vec<u64>> {
    let mut labels = vec![None; n];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            [a, b] => a.parse::<usize>().ok().zip(b.parse::<u64>().ok()),
            _ => None,
        };
        let (v, label) = parsed.ok_or_else(|| Error::Parse { line: i + 1, msg: "expected \"node label\"".into() })?;
        if v >= n {
            return Err(Error::Parse { line: i + 1, msg: format!("node id out of range (n = {n})") });
        }
        if labels[v].replace(label).is_some() {
            return Err(Error::Parse { line: i + 1, msg: format!("node {v} labelled twice") });
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::Parse { line: 0, msg: format!("node {v} has no label") }))
        .collect()
}

pub fn write_labels(labels: &[u64]) -> String {
    let mut out = String::new();
    for (v, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{v} {l}");
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

pub fn read_bipartite(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    parse_bipartite(&std::fs::read_to_string(path)?)
}
