mod catalog;
mod gen;
mod pipeline;
mod report;
mod verify;

use catalog::{Instance, InputKind, Job, Knobs};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use pipeline::OracleSpec;
use rayon::prelude::*;
use report::{emit, settle, Status, SCHEMA};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

/// Generate instances, run SLOCAL/LOCAL solvers and reductions, verify
/// their outputs and report metrics as JSON.
///
/// Exit codes: 0 valid, 1 verification or assertion failure, 2 usage or
/// input error, 3 capacity or infeasible bound, 4 oracle failure.
#[derive(Parser)]
#[command(name = "slocal-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph, hypergraph or bipartite graph
    Gen(gen::GenArgs),
    /// Run a solver and its verifier on an instance
    Run(RunArgs),
    /// Check a stored solution
    Verify(verify::VerifyArgs),
    /// Run a reduction end to end with a solver or replayed oracle
    Pipeline(PipelineArgs),
    /// Compile a single-phase SLOCAL algorithm to LOCAL and compare outputs
    Compile(CompileArgs),
}

#[derive(Args, Clone, Debug)]
struct Output {
    /// Also write the report to this file
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Number of seeded runs (seeds seed, seed+1, ...)
    #[arg(long, default_value_t = 1)]
    repeat: u64,
    /// Fan repeated runs out over threads (capped by SLOCAL_LAB_THREADS)
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm name; wrappers (compile-order, compile-decomp, reduce-phases,
    /// eliminate-writes) take the inner algorithm as the next argument
    algorithm: String,
    /// `[INNER] INSTANCE`
    #[arg(num_args = 1..=2, required = true)]
    rest: Vec<String>,
    #[command(flatten)]
    knobs: Knobs,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reduction {
    DecompFromCf,
    CfFromSplit,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(value_enum)]
    reduction: Reduction,
    instance: PathBuf,
    /// Solver name, or `replay:FILE` with recorded answers
    #[arg(long)]
    oracle: String,
    /// Write every oracle answer to this file, in a form `replay:` accepts
    #[arg(long, value_name = "PATH")]
    record: Option<PathBuf>,
    #[command(flatten)]
    knobs: Knobs,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CompileVia {
    Ordering,
    Decomposition,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(value_enum)]
    via: CompileVia,
    /// greedy-mis or greedy-coloring
    algorithm: String,
    instance: PathBuf,
    #[command(flatten)]
    knobs: Knobs,
    #[command(flatten)]
    output: Output,
}

fn usage(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn thread_cap() -> Option<usize> {
    std::env::var("SLOCAL_LAB_THREADS").ok()?.parse().ok().filter(|&t| t > 0)
}

/// Runs `one` for every seed and assembles the report. Results are always
/// listed in seed order, so the report does not depend on scheduling.
fn fan_out<F>(mut head: Value, knobs: &Knobs, out: &Output, one: F) -> (Value, Status)
where
    F: Fn(&Knobs) -> slocal_core::Result<report::Outcome> + Sync,
{
    let with_seed = |i: u64| {
        let mut k = knobs.clone();
        if knobs.seed.is_some() || out.repeat > 1 {
            k.seed = Some(knobs.seed_or_default().wrapping_add(i));
        }
        let (body, status) = settle(one(&k));
        (k.seed, body, status)
    };
    let results: Vec<(Option<u64>, Value, Status)> = if out.parallel && out.repeat > 1 {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = thread_cap() {
            builder = builder.num_threads(t);
        }
        match builder.build() {
            Ok(pool) => pool.install(|| (0..out.repeat).into_par_iter().map(with_seed).collect()),
            Err(e) => usage(format!("thread pool: {e}")),
        }
    } else {
        (0..out.repeat).map(with_seed).collect()
    };
    let status = results.iter().map(|r| r.2).max().unwrap_or(Status::Ok);
    if out.repeat == 1 {
        let (_, body, _) = results.into_iter().next().expect("one run");
        if let (Value::Object(h), Value::Object(b)) = (&mut head, body) {
            h.extend(b);
        }
    } else {
        let runs: Vec<Value> = results
            .into_iter()
            .map(|(seed, mut body, _)| {
                body["seed"] = json!(seed);
                body
            })
            .collect();
        head["repeat"] = json!(out.repeat);
        head["ok"] = json!(status == Status::Ok);
        head["runs"] = json!(runs);
    }
    (head, status)
}

fn finish(report: Value, status: Status, path: Option<&std::path::Path>) -> ExitCode {
    if let Err(e) = emit(&report, path) {
        eprintln!("error: {e:#}");
        return ExitCode::from(Status::Usage.code() as u8);
    }
    if let Some(err) = report.get("error").and_then(|e| e.get("message")) {
        eprintln!("error: {}", err.as_str().unwrap_or_default());
    }
    ExitCode::from(status.code() as u8)
}

fn load(kind: InputKind, path: &std::path::Path, head: &Value, out: &Output) -> Result<Instance, ExitCode> {
    Instance::load(kind, path).map_err(|e| {
        let mut report = head.clone();
        report["valid"] = json!(false);
        report["ok"] = json!(false);
        report["error"] = report::error_json(&e);
        finish(report, Status::of(&e), out.json.as_deref())
    })
}

fn head(command: &str, name: &str) -> Value {
    json!({ "schema": SCHEMA, "command": command, "algorithm": name })
}

fn run_job(command: &str, name: &str, job: Job, instance: &std::path::Path, knobs: &Knobs, out: &Output) -> ExitCode {
    let mut h = head(command, name);
    let inst = match load(job.input(), instance, &h, out) {
        Ok(i) => i,
        Err(code) => return code,
    };
    h["instance"] = inst.describe(instance);
    let (report, status) = fan_out(h, knobs, out, |k| job.run(&inst, k));
    finish(report, status, out.json.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(a) => match gen::render(&a) {
            Ok(text) => match &a.out {
                Some(p) => match std::fs::write(p, text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("error: writing {}: {e}", p.display());
                        ExitCode::from(Status::Usage.code() as u8)
                    }
                },
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            },
            Err(e) => usage(e),
        },
        Command::Run(a) => {
            let (extra, instance) = match a.rest.as_slice() {
                [inst] => (None, inst),
                [inner, inst] => (Some(inner.as_str()), inst),
                _ => usage("expected [INNER] INSTANCE"),
            };
            let job = Job::parse(&a.algorithm, extra).unwrap_or_else(|m| usage(m));
            let name = match extra {
                Some(inner) => format!("{} {inner}", a.algorithm),
                None => a.algorithm.clone(),
            };
            run_job("run", &name, job, std::path::Path::new(instance), &a.knobs, &a.output)
        }
        Command::Compile(a) => {
            let wrapper = match a.via {
                CompileVia::Ordering => "compile-order",
                CompileVia::Decomposition => "compile-decomp",
            };
            let job = Job::parse(wrapper, Some(&a.algorithm)).unwrap_or_else(|m| usage(m));
            run_job("compile", &format!("{wrapper} {}", a.algorithm), job, &a.instance, &a.knobs, &a.output)
        }
        Command::Pipeline(a) => {
            let oracle = OracleSpec::parse(&a.oracle);
            let (name, kind) = match a.reduction {
                Reduction::DecompFromCf => ("decomp-from-cf", InputKind::Graph),
                Reduction::CfFromSplit => ("cf-from-split", InputKind::Hypergraph),
            };
            let mut h = head("pipeline", name);
            let inst = match load(kind, &a.instance, &h, &a.output) {
                Ok(i) => i,
                Err(code) => return code,
            };
            if a.record.is_some() && a.output.repeat > 1 {
                usage("--record takes a single run");
            }
            h["instance"] = inst.describe(&a.instance);
            let tape = Mutex::new(Vec::new());
            let (report, status) = fan_out(h, &a.knobs, &a.output, |k| {
                let (out, answers) = match &inst {
                    Instance::Graph(g) => pipeline::decomp_from_cf(g, &oracle, k)?,
                    Instance::Hyper(hg) => pipeline::cf_from_split_pipeline(hg, &oracle, k)?,
                    Instance::Bip(_) => unreachable!("pipelines take graphs or hypergraphs"),
                };
                *tape.lock().expect("tape lock") = answers;
                Ok(out)
            });
            if let Some(path) = &a.record {
                let calls = json!({ "calls": tape.into_inner().expect("tape lock") });
                let text = serde_json::to_string_pretty(&calls).expect("JSON values serialize") + "\n";
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(Status::Usage.code() as u8);
                }
            }
            finish(report, status, a.output.json.as_deref())
        }
        Command::Verify(a) => {
            let mut report = json!({
                "schema": SCHEMA,
                "command": "verify",
                "problem": format!("{:?}", a.problem).to_lowercase(),
                "instance": a.instance.display().to_string(),
                "solution_file": a.solution.display().to_string(),
            });
            let (body, status) = settle(verify::verify(&a));
            if let (Value::Object(h), Value::Object(b)) = (&mut report, body) {
                h.extend(b);
            }
            finish(report, status, a.json.as_deref())
        }
    }
}
