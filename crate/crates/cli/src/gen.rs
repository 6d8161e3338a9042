use clap::{Args, ValueEnum};
use slocal_core::graph::io::{write_bipartite, write_graph, write_hypergraph};
use slocal_core::graph::{generate, random_bipartite, random_uniform_hypergraph, GraphKind};
use slocal_core::{Error, Result};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Path,
    Cycle,
    Grid,
    Gnp,
    Complete,
    Regular,
    Hypergraph,
    Bipartite,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Degree of `regular`
    #[arg(long)]
    pub d: Option<usize>,
    /// Hyperedge count
    #[arg(long)]
    pub m: Option<usize>,
    /// Hyperedge size
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub left: Option<usize>,
    #[arg(long)]
    pub right: Option<usize>,
    #[arg(long)]
    pub min_degree: Option<usize>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Required for the random kinds
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))
}

/// Instance text for the requested kind.
pub fn render(a: &GenArgs) -> Result<String> {
    let seed = || need(a.seed, "seed");
    let graph = |kind: GraphKind, seed: u64| generate(&kind, seed).map(|g| write_graph(&g));
    match a.kind {
        Kind::Path => graph(GraphKind::Path { n: need(a.n, "n")? }, 0),
        Kind::Cycle => graph(GraphKind::Cycle { n: need(a.n, "n")? }, 0),
        Kind::Grid => graph(GraphKind::Grid { rows: need(a.rows, "rows")?, cols: need(a.cols, "cols")? }, 0),
        Kind::Complete => graph(GraphKind::Complete { n: need(a.n, "n")? }, 0),
        Kind::Gnp => {
            let p = need(a.p, "p")?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("--p {p} outside [0, 1]")));
            }
            graph(GraphKind::Gnp { n: need(a.n, "n")?, p }, seed()?)
        }
        Kind::Regular => graph(GraphKind::RandomRegular { n: need(a.n, "n")?, d: need(a.d, "d")? }, seed()?),
        Kind::Hypergraph => {
            let h = random_uniform_hypergraph(need(a.n, "n")?, need(a.m, "m")?, need(a.k, "k")?, seed()?)?;
            Ok(write_hypergraph(&h))
        }
        Kind::Bipartite => {
            let b = random_bipartite(
                need(a.left, "left")?,
                need(a.right, "right")?,
                need(a.min_degree, "min-degree")?,
                need(a.max_degree, "max-degree")?,
                seed()?,
            )?;
            Ok(write_bipartite(&b))
        }
    }
}
