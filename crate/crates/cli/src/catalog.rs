//! Every runnable solver, paired with the verifier for its output.

use crate::report::Outcome;
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use slocal_core::cf::{lowrank_cf, random_cf, slocal_cf, verify_cf, CfParams};
use slocal_core::decomposition::{
    ball_growing_run, decomposition_to_ordering, floor_log2, verify_decomposition,
};
use slocal_core::graph::io::{parse_labels, read_bipartite, read_graph, read_hypergraph};
use slocal_core::graph::regularize;
use slocal_core::ilp::{
    exact_mds_graph, exact_mis, log_radius_bound, slocal_mds_approx, slocal_mis_approx, verify_dominating,
    verify_independent, ApproxParams, ApproxSolution, DEFAULT_CAP, HARD_CAP,
};
use slocal_core::local::{compile_via_decomposition, compile_via_ordering, Compiled, DEFAULT_BETA};
use slocal_core::slocal::algorithms as algs;
use slocal_core::slocal::{eliminate_writes, ordering_diameter, reduce_phases, run_slocal, Ordering, SlocalAlgorithm};
use slocal_core::splitting::{
    combined_bound, ln_n, random_split, reduce_lambda_to_weak, slocal_lambda_split, slocal_weak_split,
    verify_lambda_split, verify_weak_split, SplitColoring, SplitParams, SplitTarget,
};
use slocal_core::{BipartiteGraph, Error, Graph, Hypergraph, Result};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OrderKind {
    #[default]
    Id,
    Random,
    File,
}

/// Parameters shared by the run, compile and pipeline commands. Unset
/// values fall back to per-algorithm defaults, which are echoed in reports.
#[derive(Args, Clone, Debug, Default)]
pub struct Knobs {
    /// Seed for every random choice (required by randomized solvers and random orders)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Processing order
    #[arg(long, value_enum, default_value_t = OrderKind::Id)]
    pub order: OrderKind,
    /// Label file (`node label` per line) for `--order file`
    #[arg(long, value_name = "PATH")]
    pub order_file: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub delta: Option<usize>,
    /// Node cap for exact solves inside balls
    #[arg(long)]
    pub cap: Option<usize>,
    /// Scale of the charged decomposition cost when compiling
    #[arg(long)]
    pub beta: Option<f64>,
    /// Target degree for `regularize`
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub retries: Option<usize>,
}

impl Knobs {
    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| Error::InvalidArgument(format!("{what} needs --seed")))
    }

    pub fn make_order(&self, n: usize) -> Result<Ordering> {
        match self.order {
            OrderKind::Id => Ok(Ordering::identity(n)),
            OrderKind::Random => Ok(Ordering::random(n, self.require_seed("--order random")?)),
            OrderKind::File => {
                let path = self
                    .order_file
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("--order file needs --order-file".into()))?;
                Ordering::from_labels(parse_labels(&std::fs::read_to_string(path)?, n)?)
            }
        }
    }

    pub fn order_name(&self) -> &'static str {
        match self.order {
            OrderKind::Id => "id",
            OrderKind::Random => "random",
            OrderKind::File => "file",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Graph,
    Hypergraph,
    Bipartite,
}

pub enum Instance {
    Graph(Graph),
    Hyper(Hypergraph),
    Bip(BipartiteGraph),
}

impl Instance {
    pub fn load(kind: InputKind, path: &Path) -> Result<Self> {
        Ok(match kind {
            InputKind::Graph => Instance::Graph(read_graph(path)?),
            InputKind::Hypergraph => Instance::Hyper(read_hypergraph(path)?),
            InputKind::Bipartite => Instance::Bip(read_bipartite(path)?),
        })
    }

    pub fn describe(&self, path: &Path) -> Value {
        let path = path.display().to_string();
        match self {
            Instance::Graph(g) => json!({ "path": path, "kind": "graph", "n": g.n(), "edges": g.edge_count() }),
            Instance::Hyper(h) => {
                json!({ "path": path, "kind": "hypergraph", "n": h.n(), "edges": h.edge_count(), "rank": h.rank() })
            }
            Instance::Bip(b) => json!({
                "path": path, "kind": "bipartite", "left": b.left_count(), "right": b.right_count(), "edges": b.edge_count()
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inner {
    GreedyMis,
    GreedyColoring,
    NeighborSum,
    MisPointer,
    MisPointerLoad,
    FlagNeighbors,
}

impl Inner {
    fn parse(name: &str) -> Option<Inner> {
        Some(match name {
            "greedy-mis" => Inner::GreedyMis,
            "greedy-coloring" => Inner::GreedyColoring,
            "neighbor-sum" => Inner::NeighborSum,
            "mis-pointer" => Inner::MisPointer,
            "mis-pointer-load" => Inner::MisPointerLoad,
            "flag-neighbors" => Inner::FlagNeighbors,
            _ => return None,
        })
    }

    fn algorithm(self) -> SlocalAlgorithm {
        match self {
            Inner::GreedyMis => algs::greedy_mis(),
            Inner::GreedyColoring => algs::greedy_coloring(),
            Inner::NeighborSum => algs::neighbor_sum_two_phase(),
            Inner::MisPointer => algs::mis_pointer_two_phase(),
            Inner::MisPointerLoad => algs::mis_pointer_count_three_phase(),
            Inner::FlagNeighbors => algs::flag_neighbors(),
        }
    }

    fn verify(self, g: &Graph, outputs: &[Option<Value>]) -> bool {
        match self {
            Inner::GreedyMis => algs::verify_mis_outputs(g, outputs),
            Inner::GreedyColoring => algs::verify_coloring_outputs(g, outputs),
            Inner::NeighborSum => outputs == algs::neighbor_sum_reference(g).as_slice(),
            Inner::MisPointer => algs::verify_mis_pointer(g, outputs),
            Inner::MisPointerLoad => algs::verify_mis_pointer_count(g, outputs),
            Inner::FlagNeighbors => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Via {
    Ordering,
    Decomposition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Job {
    BallDecomp,
    Greedy(Inner),
    SlocalMis,
    SlocalMds,
    ExactMis,
    ExactMds,
    Regularize,
    OrderingDiameter,
    Compile(Via, Inner),
    ReducePhases(Inner),
    EliminateWrites(Inner),
    SlocalCf,
    LowrankCf,
    RandomCf,
    SlocalSplit,
    SlocalWeakSplit,
    RandomSplit,
    WeakReduction,
}

pub const CATALOG: &str = "ball-decomp, greedy-mis, greedy-coloring, slocal-mis, slocal-mds, exact-mis, exact-mds, \
regularize, ordering-diameter, compile-order <alg>, compile-decomp <alg>, reduce-phases <alg>, \
eliminate-writes <alg>, slocal-cf, lowrank-cf, random-cf, slocal-split, slocal-weak-split, random-split, weak-reduction";

fn inner_for(job: &str, name: Option<&str>, allowed: &[Inner]) -> std::result::Result<Inner, String> {
    let name = name.ok_or_else(|| format!("{job} needs an inner algorithm before the instance"))?;
    match Inner::parse(name) {
        Some(i) if allowed.contains(&i) => Ok(i),
        _ => Err(format!("{job} does not support inner algorithm {name:?}")),
    }
}

impl Job {
    /// `extra` is the inner algorithm for the wrapper jobs.
    pub fn parse(name: &str, extra: Option<&str>) -> std::result::Result<Job, String> {
        let single = [Inner::GreedyMis, Inner::GreedyColoring];
        let multi = [Inner::NeighborSum, Inner::MisPointer, Inner::MisPointerLoad];
        let job = match name {
            "ball-decomp" => Job::BallDecomp,
            "greedy-mis" => Job::Greedy(Inner::GreedyMis),
            "greedy-coloring" => Job::Greedy(Inner::GreedyColoring),
            "slocal-mis" => Job::SlocalMis,
            "slocal-mds" => Job::SlocalMds,
            "exact-mis" => Job::ExactMis,
            "exact-mds" => Job::ExactMds,
            "regularize" => Job::Regularize,
            "ordering-diameter" => Job::OrderingDiameter,
            "compile-order" => Job::Compile(Via::Ordering, inner_for(name, extra, &single)?),
            "compile-decomp" => Job::Compile(Via::Decomposition, inner_for(name, extra, &single)?),
            "reduce-phases" => Job::ReducePhases(inner_for(name, extra, &multi)?),
            "eliminate-writes" => Job::EliminateWrites(inner_for(name, extra, &[Inner::FlagNeighbors])?),
            "slocal-cf" => Job::SlocalCf,
            "lowrank-cf" => Job::LowrankCf,
            "random-cf" => Job::RandomCf,
            "slocal-split" => Job::SlocalSplit,
            "slocal-weak-split" => Job::SlocalWeakSplit,
            "random-split" => Job::RandomSplit,
            "weak-reduction" => Job::WeakReduction,
            _ => return Err(format!("unknown algorithm {name:?}; known: {CATALOG}")),
        };
        let wraps = matches!(job, Job::Compile(..) | Job::ReducePhases(_) | Job::EliminateWrites(_));
        if !wraps && extra.is_some() {
            return Err(format!("{name} takes a single instance file"));
        }
        Ok(job)
    }

    pub fn input(self) -> InputKind {
        match self {
            Job::SlocalCf | Job::LowrankCf | Job::RandomCf => InputKind::Hypergraph,
            Job::SlocalSplit | Job::SlocalWeakSplit | Job::RandomSplit | Job::WeakReduction => InputKind::Bipartite,
            _ => InputKind::Graph,
        }
    }

    pub fn run(self, inst: &Instance, k: &Knobs) -> Result<Outcome> {
        match (self, inst) {
            (Job::BallDecomp, Instance::Graph(g)) => ball_decomp(g),
            (Job::Greedy(inner), Instance::Graph(g)) => greedy(g, inner, k),
            (Job::SlocalMis, Instance::Graph(g)) => approx(g, k, false),
            (Job::SlocalMds, Instance::Graph(g)) => approx(g, k, true),
            (Job::ExactMis, Instance::Graph(g)) => exact(g, k, false),
            (Job::ExactMds, Instance::Graph(g)) => exact(g, k, true),
            (Job::Regularize, Instance::Graph(g)) => regular(g, k),
            (Job::OrderingDiameter, Instance::Graph(g)) => {
                let order = k.make_order(g.n())?;
                let d = ordering_diameter(g, &order);
                Ok(Outcome::new(json!({ "ordering_diameter": d }))
                    .valid(true)
                    .param("order", k.order_name())
                    .metric("ordering_diameter", d))
            }
            (Job::Compile(via, inner), Instance::Graph(g)) => compile(g, via, inner, k),
            (Job::ReducePhases(inner), Instance::Graph(g)) => fold(g, inner, k),
            (Job::EliminateWrites(inner), Instance::Graph(g)) => unwrite(g, inner, k),
            (Job::SlocalCf, Instance::Hyper(h)) => cf_slocal(h, k),
            (Job::LowrankCf, Instance::Hyper(h)) => cf_lowrank(h),
            (Job::RandomCf, Instance::Hyper(h)) => cf_random(h, k),
            (Job::SlocalSplit, Instance::Bip(b)) => split_slocal(b, k),
            (Job::SlocalWeakSplit, Instance::Bip(b)) => split_weak(b, k),
            (Job::RandomSplit, Instance::Bip(b)) => split_random(b, k),
            (Job::WeakReduction, Instance::Bip(b)) => weak_reduction(b, k),
            _ => Err(Error::InvalidArgument("instance kind does not match the algorithm".into())),
        }
    }
}

fn ball_decomp(g: &Graph) -> Result<Outcome> {
    let run = ball_growing_run(g)?;
    let dec = &run.decomposition;
    let l = floor_log2(g.n());
    let rep = verify_decomposition(g, dec, 2 * l, l + 1);
    let order = decomposition_to_ordering(dec)?;
    let od = ordering_diameter(g, &order);
    let od_bound = dec.num_colors * (dec.max_weak_diameter() + 1);
    Ok(Outcome::new(dec.to_json())
        .valid(rep.valid)
        .verification(rep.to_json())
        .metric("clusters", dec.cluster_count())
        .metric("colors", dec.num_colors)
        .metric("max_weak_diameter", dec.max_weak_diameter())
        .metric("d_bound", 2 * l)
        .metric("c_bound", l + 1)
        .metric("remaining_per_block", run.remaining.clone())
        .metric("ordering_diameter", od)
        .metric("ordering_bound", od_bound)
        .check("block-halving", run.remaining.windows(2).all(|w| 2 * w[1] <= w[0]))
        .check("ball-radius-le-log2n", run.balls.iter().all(|b| b.radius <= l))
        .check("ordering-diameter-le-c(d+1)", od <= od_bound))
}

fn outputs_solution(inner: Inner, outputs: &[Option<Value>]) -> Value {
    match inner {
        Inner::GreedyMis => {
            let nodes: Vec<usize> = (0..outputs.len()).filter(|&v| outputs[v] == Some(Value::Bool(true))).collect();
            json!({ "nodes": nodes })
        }
        Inner::GreedyColoring => json!({ "colors": outputs }),
        _ => json!({ "outputs": outputs }),
    }
}

fn greedy(g: &Graph, inner: Inner, k: &Knobs) -> Result<Outcome> {
    let order = k.make_order(g.n())?;
    let seed = k.seed_or_default();
    let trace = run_slocal(g, &inner.algorithm(), &order, seed)?;
    let outputs = trace.outputs();
    let mut out = Outcome::new(outputs_solution(inner, &outputs))
        .valid(inner.verify(g, &outputs))
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("locality", trace.max_locality())
        .check("locality-le-declared", trace.max_locality() <= 1);
    if inner == Inner::GreedyColoring {
        let used = outputs.iter().filter_map(|o| o.as_ref().and_then(Value::as_u64)).max().unwrap_or(0);
        out = out.metric("colors", used).check("colors-le-max-degree-plus-one", used as usize <= g.max_degree() + 1);
    }
    Ok(out)
}

/// Exact optimum for graphs small enough to enumerate quickly.
const EXACT_LIMIT: usize = 24;

fn central_balls_separated(g: &Graph, balls: &[Vec<usize>]) -> bool {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, b) in balls.iter().enumerate() {
        for &x in b {
            owner[x] = i;
        }
    }
    balls.iter().enumerate().all(|(i, b)| {
        b.iter().all(|&x| {
            g.bfs_within(x, 2, |_| true).into_iter().all(|(y, _)| owner[y] == usize::MAX || owner[y] == i)
        })
    })
}

fn approx(g: &Graph, k: &Knobs, dominating: bool) -> Result<Outcome> {
    let epsilon = k.epsilon.unwrap_or(0.5);
    let cap = k.cap.unwrap_or(DEFAULT_CAP);
    let params = ApproxParams::new(epsilon, cap)?;
    let order = k.make_order(g.n())?;
    let mut sol: ApproxSolution =
        if dominating { slocal_mds_approx(g, &order, params)? } else { slocal_mis_approx(g, &order, params)? };
    let valid = if dominating { verify_dominating(g, &sol.nodes) } else { verify_independent(g, &sol.nodes) };
    let size = sol.nodes.len();
    let max_radius = sol.radii.iter().map(|&(_, r)| r).max().unwrap_or(0);
    let bound = log_radius_bound(g.n(), epsilon) * if dominating { 2 } else { 1 };
    let mut exact_size = None;
    if g.n() <= EXACT_LIMIT {
        let opt = if dominating { exact_mds_graph(g, HARD_CAP)?.len() } else { exact_mis(g, HARD_CAP)?.len() };
        sol.ratio_vs_exact = Some(match (dominating, size, opt) {
            (_, 0, 0) => 1.0,
            (true, _, _) => size as f64 / opt as f64,
            (false, _, _) => opt as f64 / size as f64,
        });
        exact_size = Some(opt);
    }
    let mut out = Outcome::new(sol.to_json())
        .valid(valid)
        .param("epsilon", epsilon)
        .param("cap", cap)
        .param("order", k.order_name())
        .metric("size", size)
        .metric("locality", sol.trace.max_locality())
        .metric("max_radius", max_radius)
        .metric("radius_bound", bound)
        .check("radius-le-bound", max_radius <= bound);
    if let Some(opt) = exact_size {
        out = out.metric("exact", opt);
        let within = if dominating {
            size as f64 <= (1.0 + epsilon) * opt as f64
        } else {
            size as f64 * (1.0 + epsilon) >= opt as f64
        };
        out = out.check("ratio-within-1+eps", within);
    }
    if dominating {
        out = out
            .metric("central_balls", sol.central_balls.len())
            .check("central-balls-distance-ge-3", central_balls_separated(g, &sol.central_balls));
    }
    Ok(out)
}

fn exact(g: &Graph, k: &Knobs, dominating: bool) -> Result<Outcome> {
    let cap = k.cap.unwrap_or(HARD_CAP);
    let nodes = if dominating { exact_mds_graph(g, cap)? } else { exact_mis(g, cap)? };
    let valid = if dominating { verify_dominating(g, &nodes) } else { verify_independent(g, &nodes) };
    Ok(Outcome::new(json!({ "nodes": nodes, "size": nodes.len() }))
        .valid(valid)
        .param("cap", cap)
        .metric("size", nodes.len()))
}

fn regular(g: &Graph, k: &Knobs) -> Result<Outcome> {
    let d = k.degree.ok_or_else(|| Error::InvalidArgument("regularize needs --degree".into()))?;
    let (h, map) = regularize(g, d)?;
    let originals: Vec<usize> = (0..g.n()).collect();
    let embedded = h.induced(&originals) == *g;
    let gadgets = (0..h.n()).filter(|&v| map.is_gadget(v)).count();
    Ok(Outcome::new(json!({ "n": h.n(), "edges": h.edge_count(), "gadget_nodes": gadgets }))
        .valid((0..h.n()).all(|v| h.degree(v) == d))
        .param("degree", d)
        .check("original-subgraph-preserved", embedded))
}

fn compile(g: &Graph, via: Via, inner: Inner, k: &Knobs) -> Result<Outcome> {
    let alg = inner.algorithm();
    let seed = k.seed_or_default();
    let beta = k.beta.unwrap_or(DEFAULT_BETA);
    let compiled: Compiled = match via {
        Via::Ordering => compile_via_ordering(g, &alg, &k.make_order(g.n())?, seed)?,
        Via::Decomposition => compile_via_decomposition(g, &alg, seed, beta)?,
    };
    let rep = &compiled.report;
    let outputs = compiled.trace.outputs();
    let mut out = Outcome::new(outputs_solution(inner, &outputs))
        .valid(rep.equality && inner.verify(g, &outputs))
        .verification(rep.to_json())
        .param("via", if via == Via::Ordering { "ordering" } else { "decomposition" })
        .param("seed", seed)
        .metric("rounds", rep.rounds_measured)
        .metric("rounds_charged", rep.rounds_charged)
        .metric("round_bound", rep.round_bound)
        .metric("phases", rep.phases)
        .check("equality", rep.equality)
        .check("rounds-le-bound", rep.rounds_measured <= rep.round_bound);
    match via {
        Via::Ordering => out = out.param("order", k.order_name()),
        Via::Decomposition => out = out.param("beta", beta),
    }
    if let Some(d) = compiled.ordering_diameter {
        out = out.metric("ordering_diameter", d);
    }
    if let Some(dec) = &compiled.decomposition {
        out = out.metric("colors", dec.num_colors).metric("max_weak_diameter", dec.max_weak_diameter());
    }
    Ok(out)
}

fn fold(g: &Graph, inner: Inner, k: &Knobs) -> Result<Outcome> {
    let alg = inner.algorithm();
    let radii: Vec<usize> = alg.phases.iter().map(|p| p.locality).collect();
    let bound = radii[0] + 2 * radii[1..].iter().sum::<usize>();
    let folded = reduce_phases(&alg)?;
    let seed = k.seed_or_default();
    let trace = run_slocal(g, &folded, &k.make_order(g.n())?, seed)?;
    let outputs = trace.outputs();
    Ok(Outcome::new(outputs_solution(inner, &outputs))
        .valid(inner.verify(g, &outputs))
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("phases_before", radii.len())
        .metric("phases_after", folded.phases.len())
        .metric("locality", trace.max_locality())
        .metric("locality_bound", bound)
        .check("single-phase", folded.phases.len() == 1)
        .check("locality-le-bound", trace.max_locality() <= bound))
}

fn unwrite(g: &Graph, inner: Inner, k: &Knobs) -> Result<Outcome> {
    let alg = inner.algorithm();
    let plain = eliminate_writes(&alg)?;
    let order = k.make_order(g.n())?;
    let seed = k.seed_or_default();
    let direct = run_slocal(g, &alg, &order, seed)?;
    let rewritten = run_slocal(g, &plain, &order, seed)?;
    let outputs = rewritten.outputs();
    Ok(Outcome::new(outputs_solution(inner, &outputs))
        .valid(outputs == direct.outputs())
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("locality", rewritten.max_locality())
        .metric("declared_locality", plain.declared_locality())
        .check("no-remote-writes", plain.is_pure())
        .check("locality-le-declared", rewritten.max_locality() <= plain.declared_locality()))
}

fn cf_slocal(h: &Hypergraph, k: &Knobs) -> Result<Outcome> {
    let defaults = CfParams::default();
    let params = CfParams { theta: k.theta.unwrap_or(defaults.theta), retries: k.retries.unwrap_or(defaults.retries) };
    let seed = k.seed_or_default();
    let run = slocal_cf(h, &k.make_order(h.n())?, params, seed)?;
    let rep = verify_cf(h, &run.coloring);
    Ok(Outcome::new(run.coloring.to_json())
        .valid(rep.valid)
        .verification(rep.to_json())
        .param("theta", params.theta)
        .param("retries", params.retries)
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("colors", run.coloring.q)
        .metric("phases", run.phases)
        .metric("unresolved_per_phase", run.unresolved.clone())
        .metric("locality", run.trace.max_locality())
        .metric("max_radius", run.max_radius)
        .metric("radius_bound", run.radius_bound)
        .metric("phase_cap", run.phase_cap)
        .check("radius-le-bound", run.max_radius <= run.radius_bound)
        .check("phases-le-cap", run.phases <= run.phase_cap))
}

fn cf_lowrank(h: &Hypergraph) -> Result<Outcome> {
    let run = lowrank_cf(h)?;
    let rep = verify_cf(h, &run.coloring);
    Ok(Outcome::new(run.coloring.to_json())
        .valid(rep.valid)
        .verification(rep.to_json())
        .metric("colors", run.coloring.q)
        .metric("phases", run.phases)
        .metric("max_degree_per_phase", run.deltas.clone())
        .check("degree-halves-each-phase", run.deltas.windows(2).all(|w| 2 * w[1] <= w[0])))
}

pub fn default_random_q(h: &Hypergraph) -> usize {
    (8.0 * ((h.n() + h.edge_count()) as f64).ln()).ceil().max(2.0) as usize
}

fn cf_random(h: &Hypergraph, k: &Knobs) -> Result<Outcome> {
    let seed = k.require_seed("random-cf")?;
    let q = k.q.unwrap_or_else(|| default_random_q(h));
    let coloring = random_cf(h, q, seed)?;
    let rep = verify_cf(h, &coloring);
    Ok(Outcome::new(coloring.to_json())
        .valid(rep.valid)
        .verification(rep.to_json())
        .param("q", q)
        .param("seed", seed)
        .metric("min_edge_size", h.min_edge_size())
        .metric("violations", rep.violations.len()))
}

fn split_outcome(coloring: &SplitColoring, rep: slocal_core::splitting::SplitReport, lambda: f64) -> Outcome {
    Outcome::new(coloring.to_json())
        .valid(rep.valid)
        .metric("violators", rep.violators.len())
        .verification(rep.to_json())
        .param("lambda", lambda)
}

fn split_slocal(b: &BipartiteGraph, k: &Knobs) -> Result<Outcome> {
    let defaults = SplitParams::default();
    let target = match k.lambda {
        Some(l) => SplitTarget::Lambda(l),
        None => SplitTarget::Discrepancy,
    };
    let params = SplitParams {
        alpha: k.alpha.unwrap_or(defaults.alpha),
        target,
        retries: k.retries.unwrap_or(defaults.retries),
    };
    let seed = k.seed_or_default();
    let run = slocal_lambda_split(b, &k.make_order(b.right_count())?, params, seed)?;
    let lambda = k.lambda.unwrap_or(run.lambda_reported);
    let rep = verify_lambda_split(b, &run.coloring, lambda);
    let ln = ln_n(b);
    let within = (0..b.left_count()).all(|u| {
        run.discrepancy[u].unsigned_abs() as f64 <= combined_bound(params.alpha, run.touched[u], b.left_degree(u), ln) + 1e-9
    });
    let mut out = split_outcome(&run.coloring, rep, lambda)
        .param("alpha", params.alpha)
        .param("target", if k.lambda.is_some() { "lambda" } else { "discrepancy" })
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("lambda_reported", run.lambda_reported)
        .metric("max_discrepancy", run.discrepancy.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0))
        .metric("max_clusters_touched", run.touched.iter().copied().max().unwrap_or(0))
        .metric("clusters", run.decomposition.cluster_count())
        .metric("locality", run.trace.max_locality());
    if k.lambda.is_none() {
        out = out.check("discrepancy-within-bound", within);
    }
    Ok(out)
}

fn split_weak(b: &BipartiteGraph, k: &Knobs) -> Result<Outcome> {
    let seed = k.seed_or_default();
    let run = slocal_weak_split(b, &k.make_order(b.right_count())?, seed)?;
    let rep = verify_weak_split(b, &run.coloring);
    Ok(Outcome::new(run.coloring.to_json())
        .valid(rep.valid)
        .metric("violators", rep.violators.len())
        .verification(rep.to_json())
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("locality", run.trace.max_locality()))
}

/// `1/2 - sqrt(ln n / delta)` with `delta` the minimum left degree, at least 0.
pub fn default_random_lambda(b: &BipartiteGraph) -> f64 {
    let delta = b.min_left_degree().max(1) as f64;
    (0.5 - (ln_n(b) / delta).sqrt()).max(0.0)
}

fn split_random(b: &BipartiteGraph, k: &Knobs) -> Result<Outcome> {
    let seed = k.require_seed("random-split")?;
    let lambda = k.lambda.unwrap_or_else(|| default_random_lambda(b));
    let coloring = random_split(b, seed);
    let rep = verify_lambda_split(b, &coloring, lambda);
    Ok(split_outcome(&coloring, rep, lambda).param("seed", seed))
}

fn weak_reduction(b: &BipartiteGraph, k: &Knobs) -> Result<Outcome> {
    let delta = k.delta.unwrap_or(8);
    let seed = k.seed_or_default();
    let order = k.make_order(b.right_count())?;
    let red = reduce_lambda_to_weak(b, delta, |reduced| slocal_weak_split(reduced, &order, seed).map(|r| r.coloring))?;
    let lambda = 1.0 / delta as f64;
    let rep = verify_lambda_split(b, &red.coloring, lambda);
    Ok(split_outcome(&red.coloring, rep, lambda)
        .param("delta", delta)
        .param("order", k.order_name())
        .param("seed", seed)
        .metric("reduced_left_nodes", red.reduced.left_count()))
}
