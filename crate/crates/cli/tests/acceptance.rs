//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p slocal-lab --test acceptance`.

use serde_json::Value;
use slocal_core::cf::{lowrank_cf, random_cf, slocal_cf, verify_cf, CfParams};
use slocal_core::decomposition::{
    ball_growing_decomposition, decomposition_to_ordering, floor_log2, verify_decomposition,
};
use slocal_core::graph::{generate, random_bipartite, random_uniform_hypergraph, GraphKind};
use slocal_core::ilp::{
    exact_mds_graph, exact_mis, slocal_mds_approx, slocal_mis_approx, verify_dominating, verify_independent,
    ApproxParams, DEFAULT_CAP, HARD_CAP,
};
use slocal_core::local::{compile_via_decomposition, compile_via_ordering, DEFAULT_BETA};
use slocal_core::reductions::{cf_from_split, decomposition_from_cf};
use slocal_core::slocal::algorithms::{
    greedy_coloring, greedy_mis, mis_pointer_count_three_phase, mis_pointer_two_phase, neighbor_sum_reference,
    neighbor_sum_two_phase, verify_coloring_outputs, verify_mis_outputs, verify_mis_pointer,
    verify_mis_pointer_count,
};
use slocal_core::slocal::{ordering_diameter, reduce_phases, run_slocal, Ordering, SlocalAlgorithm};
use slocal_core::splitting::{
    random_split, reduce_lambda_to_weak, slocal_lambda_split, slocal_weak_split, verify_lambda_split,
    verify_weak_split, SplitParams, SplitTarget,
};
use slocal_core::{BipartiteGraph, Error, Graph, Hypergraph};
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Verdict = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Cheap deterministic mixing for instance parameters.
fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pick(seed: u64, lo: usize, hi: usize) -> usize {
    lo + (mix(seed) % (hi - lo + 1) as u64) as usize
}

/// 200 graphs from every generator, n between 16 and 5000.
fn generator_family() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for i in 0..200u64 {
        let n = pick(i * 7 + 1, 16, 5000);
        let kind = match i % 6 {
            0 => GraphKind::Path { n },
            1 => GraphKind::Cycle { n },
            2 => {
                let rows = pick(i * 7 + 2, 4, 70);
                GraphKind::Grid { rows, cols: (n / rows).max(1) }
            }
            3 => GraphKind::Gnp { n, p: pick(i * 7 + 3, 15, 80) as f64 / 10.0 / n as f64 },
            4 => GraphKind::RandomRegular { n: n & !1, d: pick(i * 7 + 4, 2, 5) },
            _ => {
                if i % 12 == 5 {
                    GraphKind::Complete { n: n.min(120) }
                } else {
                    GraphKind::Gnp { n: n.min(600), p: 0.05 }
                }
            }
        };
        let g = generate(&kind, i).expect("generator");
        out.push((format!("{kind:?}/{i}"), g));
    }
    out
}

fn criterion_1(family: &[(String, Graph)]) -> Verdict {
    let start = Instant::now();
    let mut largest = 0;
    for (name, g) in family {
        let dec = ball_growing_decomposition(g).map_err(|e| format!("{name}: {e}"))?;
        let l = floor_log2(g.n());
        let rep = verify_decomposition(g, &dec, 2 * l, l + 1);
        check(rep.valid, || format!("{name}: {:?}", rep.violations.first()))?;
        largest = largest.max(g.n());
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} graphs up to n = {largest} valid in {secs:.1}s", family.len()))
}

fn floyd(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in g.neighbors(u) {
            d[u][v] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

/// Enumerates label-increasing paths explicitly.
fn brute_ordering_diameter(g: &Graph, order: &Ordering) -> usize {
    let dist = floyd(g);
    fn walk(g: &Graph, order: &Ordering, dist: &[Vec<usize>], s: usize, at: usize, best: &mut usize) {
        *best = (*best).max(dist[s][at]);
        for &w in g.neighbors(at) {
            if order.label(w) > order.label(at) {
                walk(g, order, dist, s, w, best);
            }
        }
    }
    let mut best = 0;
    for s in 0..g.n() {
        walk(g, order, &dist, s, s, &mut best);
    }
    best
}

fn permutations(n: usize) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, left: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n as u64).collect(), &mut out);
    out
}

fn criterion_2(family: &[(String, Graph)]) -> Verdict {
    for (name, g) in family {
        let dec = ball_growing_decomposition(g).map_err(|e| format!("{name}: {e}"))?;
        let order = decomposition_to_ordering(&dec).map_err(|e| e.to_string())?;
        let od = ordering_diameter(g, &order);
        let bound = dec.num_colors * (dec.max_weak_diameter() + 1);
        check(od <= bound, || format!("{name}: ordering diameter {od} > {bound}"))?;
    }
    // Every labelled graph on up to 5 nodes under every order.
    let mut exhaustive = 0;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let orders = permutations(n);
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            for labels in &orders {
                let order = Ordering::from_labels(labels.clone()).unwrap();
                let (a, b) = (ordering_diameter(&g, &order), brute_ordering_diameter(&g, &order));
                check(a == b, || format!("n={n} edges {edges:?} labels {labels:?}: {a} vs {b}"))?;
                exhaustive += 1;
            }
        }
    }
    // Seeded graphs and orders for 6 <= n <= 12.
    let mut sampled = 0;
    for i in 0..3000u64 {
        let n = pick(i, 6, 12);
        let g = generate(&GraphKind::Gnp { n, p: pick(i + 99, 10, 60) as f64 / 100.0 }, i).unwrap();
        let order = Ordering::random(n, i);
        let (a, b) = (ordering_diameter(&g, &order), brute_ordering_diameter(&g, &order));
        check(a == b, || format!("sample {i}: {a} vs {b}"))?;
        sampled += 1;
    }
    Ok(format!(
        "bound holds on {} graphs; brute force agrees on {exhaustive} exhaustive and {sampled} sampled cases",
        family.len()
    ))
}

type OutputCheck = fn(&Graph, &[Option<Value>]) -> bool;

fn criterion_3() -> Verdict {
    let algs: [(SlocalAlgorithm, OutputCheck); 2] =
        [(greedy_mis(), verify_mis_outputs), (greedy_coloring(), verify_coloring_outputs)];
    let mut runs = 0;
    for (alg, verify) in &algs {
        for t in 0..50u64 {
            let n = pick(t, 20, 120);
            let g = generate(&GraphKind::Gnp { n, p: pick(t + 5, 15, 60) as f64 / 10.0 / n as f64 }, t).unwrap();
            let order = Ordering::random(n, t + 1000);
            let direct = run_slocal(&g, alg, &order, t).map_err(|e| e.to_string())?;

            let c = compile_via_ordering(&g, alg, &order, t).map_err(|e| format!("{}: {e}", alg.name))?;
            check(c.trace.outputs() == direct.outputs(), || format!("{} ordering {t}: outputs differ", alg.name))?;
            let ell = ordering_diameter(&g, &order);
            check(c.report.rounds_measured <= ell + 1, || format!("{} ordering {t}: rounds", alg.name))?;
            check(verify(&g, &c.trace.outputs()), || format!("{} ordering {t}: verifier", alg.name))?;

            let c = compile_via_decomposition(&g, alg, t, DEFAULT_BETA).map_err(|e| format!("{}: {e}", alg.name))?;
            let reference = run_slocal(&g, alg, &c.order, t).map_err(|e| e.to_string())?;
            check(c.trace.outputs() == reference.outputs(), || format!("{} decomposition {t}: outputs differ", alg.name))?;
            let dec = c.decomposition.as_ref().unwrap();
            let bound = dec.num_colors * (dec.max_weak_diameter() * 2 + 1);
            check(c.report.rounds_measured <= bound, || format!("{} decomposition {t}: rounds", alg.name))?;
            check(verify(&g, &c.trace.outputs()), || format!("{} decomposition {t}: verifier", alg.name))?;
            runs += 2;
        }
    }
    Ok(format!("{runs} compilations reproduce the sequential outputs bit for bit"))
}

fn criterion_4() -> Verdict {
    let sum: OutputCheck = |g, out| out == neighbor_sum_reference(g).as_slice();
    let cases: [(SlocalAlgorithm, OutputCheck); 3] = [
        (neighbor_sum_two_phase(), sum),
        (mis_pointer_two_phase(), verify_mis_pointer),
        (mis_pointer_count_three_phase(), verify_mis_pointer_count),
    ];
    let mut worst = String::new();
    for (alg, verify) in &cases {
        let radii: Vec<usize> = alg.phases.iter().map(|p| p.locality).collect();
        let bound = radii[0] + 2 * radii[1..].iter().sum::<usize>();
        let folded = reduce_phases(alg).map_err(|e| e.to_string())?;
        check(folded.phases.len() == 1, || format!("{}: not single-phase", alg.name))?;
        let mut max_loc = 0;
        for t in 0..50u64 {
            let g = generate(&GraphKind::Gnp { n: 80, p: 0.05 }, 7000 + t).unwrap();
            let trace = run_slocal(&g, &folded, &Ordering::random(80, t), t).map_err(|e| e.to_string())?;
            max_loc = max_loc.max(trace.max_locality());
            check(trace.max_locality() <= bound, || format!("{} order {t}: locality", alg.name))?;
            check(verify(&g, &trace.outputs()), || format!("{} order {t}: verifier", alg.name))?;
        }
        worst += &format!(" {}={max_loc}<={bound}", alg.name);
    }
    Ok(format!("50 orders each, locality{worst}"))
}

fn criterion_5() -> Verdict {
    let mut colors_used = 0;
    for i in 0..100u64 {
        let n = pick(i, 20, 200);
        let k = pick(i + 1, 2, (n / 4).clamp(2, 40));
        let m = pick(i + 2, 5, 120);
        let h = random_uniform_hypergraph(n, m, k, i).unwrap();
        let run = slocal_cf(&h, &Ordering::random(n, i), CfParams::default(), i).map_err(|e| format!("{i}: {e}"))?;
        check(verify_cf(&h, &run.coloring).valid, || format!("slocal_cf invalid on {i}"))?;
        colors_used = colors_used.max(run.coloring.q);
        let low = lowrank_cf(&h).map_err(|e| e.to_string())?;
        check(verify_cf(&h, &low.coloring).valid, || format!("lowrank_cf invalid on {i}"))?;
        check(low.deltas.windows(2).all(|w| 2 * w[1] <= w[0]), || format!("lowrank halving on {i}: {:?}", low.deltas))?;
    }
    let mut valid = 0;
    for i in 0..100u64 {
        let (n, m) = (400, 150);
        let k = pick(i, 32, 64);
        let h = random_uniform_hypergraph(n, m, k, 500 + i).unwrap();
        let q = (8.0 * ((n + m) as f64).ln()).ceil() as usize;
        if verify_cf(&h, &random_cf(&h, q, i).unwrap()).valid {
            valid += 1;
        }
    }
    check(valid >= 95, || format!("random_cf valid in only {valid}/100 runs"))?;
    Ok(format!("slocal_cf and lowrank_cf valid on 100 hypergraphs (max {colors_used} colors); random_cf valid {valid}/100"))
}

fn split_family(i: u64) -> BipartiteGraph {
    let left = pick(i, 4, 12);
    let right = 900;
    let n = (left + right) as f64;
    let delta = (16.0 * n.ln().powi(2)).ceil() as usize;
    random_bipartite(left, right, delta, right, 40_000 + i).unwrap()
}

fn criterion_6() -> Verdict {
    let alpha = 4.0;
    let mut worst: f64 = 0.0;
    let mut random_ok = 0;
    for i in 0..100u64 {
        let b = split_family(i);
        let ln = (b.node_count() as f64).ln();
        check(b.min_left_degree() as f64 >= 16.0 * ln * ln, || "family degree".into())?;
        let order = Ordering::random(b.right_count(), i);
        let run = slocal_lambda_split(&b, &order, SplitParams::default(), i).map_err(|e| format!("{i}: {e}"))?;
        let cluster_of: Vec<usize> = run.decomposition.cluster_of.iter().map(|c| c.unwrap()).collect();
        for u in 0..b.left_count() {
            let nbrs = b.left_neighbors(u);
            let red = nbrs.iter().filter(|&&v| run.coloring.red[v]).count() as f64;
            let disc = (2.0 * red - nbrs.len() as f64).abs();
            let k = nbrs.iter().map(|&v| cluster_of[v]).collect::<BTreeSet<_>>().len() as f64;
            let d = nbrs.len() as f64;
            let bound = alpha * ((k * d * ln).sqrt() + k * ln);
            check(disc <= bound, || format!("instance {i} left {u}: {disc} > {bound:.1}"))?;
            worst = worst.max(disc / bound);
        }
        let lambda = 0.5 - (ln / b.min_left_degree() as f64).sqrt();
        if verify_lambda_split(&b, &random_split(&b, i), lambda).valid {
            random_ok += 1;
        }
    }
    check(random_ok >= 95, || format!("random_split valid in only {random_ok}/100"))?;

    // Weak splitters: the sequential one, and random draws kept once verified.
    let mut composed = 0;
    for i in 0..30u64 {
        let delta = [4, 8, 16][i as usize % 3];
        let b = random_bipartite(12, 150, delta, 3 * delta, 60_000 + i).unwrap();
        let seq = reduce_lambda_to_weak(&b, delta, |r| {
            slocal_weak_split(r, &Ordering::random(r.right_count(), i), i).map(|s| s.coloring)
        });
        let retry = reduce_lambda_to_weak(&b, delta, |r| {
            (0..2000u64)
                .map(|s| random_split(r, s))
                .find(|c| verify_weak_split(r, c).valid)
                .ok_or_else(|| Error::InfeasibleBound("no weak split in 2000 draws".into()))
        });
        for res in [seq, retry] {
            match res {
                Ok(red) => {
                    check(verify_lambda_split(&b, &red.coloring, 1.0 / delta as f64).valid, || format!("{i}: 1/delta"))?;
                    composed += 1;
                }
                Err(Error::InfeasibleBound(_)) => {}
                Err(e) => return Err(format!("weak reduction {i}: {e}")),
            }
        }
    }
    check(composed >= 30, || format!("only {composed} weak splits composed"))?;
    Ok(format!(
        "discrepancy <= {:.0}% of the bound on 100 instances; random_split valid {random_ok}/100; {composed} composed 1/delta splits verified",
        worst * 100.0
    ))
}

fn criterion_7() -> Verdict {
    let graphs = [
        ("cycle-100", GraphKind::Cycle { n: 100 }),
        ("cycle-1000", GraphKind::Cycle { n: 1000 }),
        ("grid-10x10", GraphKind::Grid { rows: 10, cols: 10 }),
        ("grid-32x32", GraphKind::Grid { rows: 32, cols: 32 }),
        ("gnp-200", GraphKind::Gnp { n: 200, p: 0.02 }),
        ("gnp-1000", GraphKind::Gnp { n: 1000, p: 0.005 }),
    ];
    let mut summary = Vec::new();
    for (name, kind) in graphs {
        let g = generate(&kind, 1).unwrap();
        let run = decomposition_from_cf(&g, 0.5, 12, |h| {
            slocal_cf(h, &Ordering::identity(h.n()), CfParams::default(), 3).map(|r| r.coloring)
        })
        .map_err(|e| format!("{name}: {e}"))?;
        let rep = verify_decomposition(&g, &run.decomposition, run.d_bound, run.c_bound);
        check(rep.valid, || format!("{name}: {:?}", rep.violations.first()))?;
        summary.push(format!("{name}:{}c", run.decomposition.num_colors));
    }
    let mut phases = 0;
    for i in 0..6u64 {
        let delta = [4, 8][i as usize % 2];
        let h: Hypergraph = random_uniform_hypergraph(400, 80, 60 + 10 * i as usize, 90 + i).unwrap();
        let params = SplitParams { target: SplitTarget::Lambda(1.0 / delta as f64), ..SplitParams::default() };
        let run = cf_from_split(&h, delta, |b| {
            let order = Ordering::random(b.right_count(), i);
            slocal_lambda_split(b, &order, params, i).map(|r| r.coloring)
        })
        .map_err(|e| format!("cf_from_split {i}: {e}"))?;
        check(verify_cf(&h, &run.coloring).valid, || format!("cf_from_split {i}: invalid"))?;
        let factor = 1.0 - 1.0 / (2.0 * delta as f64);
        check(
            run.ranks.windows(2).all(|w| w[1] as f64 <= factor * w[0] as f64),
            || format!("cf_from_split {i}: ranks {:?}", run.ranks),
        )?;
        phases += run.ranks.len();
    }
    Ok(format!("decompositions verified ({}); cf_from_split valid on 6 hypergraphs over {phases} phases", summary.join(" ")))
}

fn central_separated(g: &Graph, balls: &[Vec<usize>]) -> bool {
    let dist: Vec<Vec<usize>> = balls.iter().flatten().map(|&x| g.distances(x)).collect();
    let owner: Vec<usize> = balls.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |_| i)).collect();
    let members: Vec<usize> = balls.iter().flatten().copied().collect();
    (0..members.len()).all(|a| (0..members.len()).all(|b| owner[a] == owner[b] || dist[a][members[b]] >= 3))
}

fn criterion_8() -> Verdict {
    let mut runs = 0;
    for i in 0..200u64 {
        let n = pick(i, 4, 24);
        let g = generate(&GraphKind::Gnp { n, p: pick(i + 3, 10, 45) as f64 / 100.0 }, 9000 + i).unwrap();
        let alpha = exact_mis(&g, HARD_CAP).map_err(|e| e.to_string())?.len();
        let gamma = exact_mds_graph(&g, HARD_CAP).map_err(|e| e.to_string())?.len();
        for (eps_num, eps_den) in [(1u64, 1u64), (1, 2), (1, 4)] {
            let eps = eps_num as f64 / eps_den as f64;
            let params = ApproxParams::new(eps, DEFAULT_CAP).unwrap();
            let order = Ordering::random(n, i * 3 + eps_den);
            let mis = slocal_mis_approx(&g, &order, params).map_err(|e| format!("{i}: {e}"))?;
            check(verify_independent(&g, &mis.nodes), || format!("{i}: not independent"))?;
            // |I| >= alpha / (1 + eps), in integers.
            let size = mis.nodes.len() as u64;
            check(size * (eps_den + eps_num) >= alpha as u64 * eps_den, || format!("{i}: MIS {size} vs {alpha} at {eps}"))?;
            let mds = slocal_mds_approx(&g, &order, params).map_err(|e| format!("{i}: {e}"))?;
            check(verify_dominating(&g, &mds.nodes), || format!("{i}: not dominating"))?;
            let size = mds.nodes.len() as u64;
            check(size * eps_den <= gamma as u64 * (eps_den + eps_num), || format!("{i}: MDS {size} vs {gamma} at {eps}"))?;
            check(central_separated(&g, &mds.central_balls), || format!("{i}: central balls too close"))?;
            runs += 2;
        }
    }
    let mut large = 0;
    let mut capped = 0;
    for i in 0..12u64 {
        let kind = match i % 3 {
            0 => GraphKind::Cycle { n: 600 },
            1 => GraphKind::Path { n: 1000 },
            _ => GraphKind::Gnp { n: 400, p: 1.5 / 400.0 },
        };
        let g = generate(&kind, i).unwrap();
        let params = ApproxParams::new(1.0, DEFAULT_CAP).unwrap();
        let order = Ordering::random(g.n(), i);
        match slocal_mis_approx(&g, &order, params) {
            Ok(s) => {
                check(verify_independent(&g, &s.nodes), || format!("large {i}: not independent"))?;
                large += 1;
            }
            Err(Error::Capacity { .. }) => capped += 1,
            Err(e) => return Err(e.to_string()),
        }
        match slocal_mds_approx(&g, &order, params) {
            Ok(s) => {
                check(verify_dominating(&g, &s.nodes), || format!("large {i}: not dominating"))?;
                check(central_separated(&g, &s.central_balls), || format!("large {i}: central balls"))?;
                large += 1;
            }
            Err(Error::Capacity { .. }) => capped += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!("{runs} small runs within ratio; {large} larger runs feasible ({capped} stopped at the ball cap)"))
}

fn cli(dir: &Path, args: &[&str]) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_slocal-lab")).current_dir(dir).args(args).output().unwrap();
    (out.status.code(), out.stdout, out.stderr)
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let setup: &[&[&str]] = &[
        &["gen", "gnp", "--n", "120", "--p", "0.04", "--seed", "7", "--out", "g.txt"],
        &["gen", "gnp", "--n", "20", "--p", "0.2", "--seed", "8", "--out", "s.txt"],
        &["gen", "grid", "--rows", "8", "--cols", "9", "--out", "grid.txt"],
        &["gen", "hypergraph", "--n", "200", "--m", "40", "--k", "30", "--seed", "2", "--out", "h.txt"],
        &["gen", "hypergraph", "--n", "60", "--m", "30", "--k", "6", "--seed", "3", "--out", "hs.txt"],
        &["gen", "bipartite", "--left", "10", "--right", "300", "--min-degree", "120", "--max-degree", "250", "--seed", "4", "--out", "b.txt"],
        &["gen", "regular", "--n", "50", "--d", "3", "--seed", "5", "--out", "r.txt"],
    ];
    for args in setup {
        let first = cli(d, args);
        let a = std::fs::read(d.join(args.last().unwrap())).map_err(|e| e.to_string())?;
        let second = cli(d, args);
        let b = std::fs::read(d.join(args.last().unwrap())).map_err(|e| e.to_string())?;
        check(first.0 == Some(0) && second.0 == Some(0) && a == b, || format!("gen not reproducible: {args:?}"))?;
    }
    let pipeline_record: &[&str] =
        &["pipeline", "decomp-from-cf", "g.txt", "--oracle", "slocal-cf", "--q", "12", "--record", "tape.json"];
    let _ = cli(d, pipeline_record);
    let commands: &[&[&str]] = &[
        &["run", "ball-decomp", "g.txt"],
        &["run", "greedy-mis", "g.txt", "--order", "random", "--seed", "3"],
        &["run", "greedy-coloring", "grid.txt"],
        &["run", "slocal-mis", "s.txt", "--epsilon", "0.5", "--order", "random", "--seed", "1"],
        &["run", "slocal-mds", "s.txt", "--epsilon", "0.25", "--order", "random", "--seed", "1"],
        &["run", "exact-mds", "s.txt"],
        &["run", "regularize", "s.txt", "--degree", "11"],
        &["run", "ordering-diameter", "g.txt", "--order", "random", "--seed", "9"],
        &["run", "compile-decomp", "greedy-mis", "g.txt", "--seed", "1"],
        &["run", "compile-order", "greedy-coloring", "g.txt", "--order", "random", "--seed", "2"],
        &["compile", "decomposition", "greedy-coloring", "r.txt", "--seed", "4"],
        &["run", "reduce-phases", "mis-pointer-load", "g.txt", "--order", "random", "--seed", "5"],
        &["run", "eliminate-writes", "flag-neighbors", "g.txt", "--order", "random", "--seed", "5"],
        &["run", "slocal-cf", "hs.txt", "--order", "random", "--seed", "6"],
        &["run", "lowrank-cf", "hs.txt"],
        &["run", "random-cf", "h.txt", "--seed", "6", "--repeat", "5", "--parallel"],
        &["run", "slocal-split", "b.txt", "--seed", "2"],
        &["run", "slocal-split", "b.txt", "--lambda", "0.25", "--order", "random", "--seed", "2"],
        &["run", "slocal-weak-split", "b.txt"],
        &["run", "random-split", "b.txt", "--seed", "11", "--repeat", "4"],
        &["run", "weak-reduction", "b.txt", "--delta", "8"],
        &["run", "slocal-mis", "g.txt", "--cap", "8"],
        &["pipeline", "decomp-from-cf", "grid.txt", "--oracle", "slocal-cf", "--epsilon", "0.5", "--q", "12"],
        &["pipeline", "decomp-from-cf", "g.txt", "--oracle", "replay:tape.json", "--q", "12"],
        &["pipeline", "cf-from-split", "h.txt", "--oracle", "slocal-split", "--delta", "8"],
        &["pipeline", "cf-from-split", "h.txt", "--oracle", "random-split", "--delta", "4", "--seed", "3"],
        &["verify", "cf", "hs.txt", "out.json"],
    ];
    // Something for the verify command to read.
    let _ = cli(d, &["run", "slocal-cf", "hs.txt", "--json", "out.json"]);
    for args in commands {
        let mut with_file: Vec<&str> = args.to_vec();
        with_file.extend_from_slice(&["--json", "report.json"]);
        let first = cli(d, &with_file);
        let file_a = std::fs::read(d.join("report.json")).map_err(|e| e.to_string())?;
        let second = cli(d, &with_file);
        let file_b = std::fs::read(d.join("report.json")).map_err(|e| e.to_string())?;
        check(first.1 == second.1 && file_a == file_b && first.0 == second.0, || {
            format!("{args:?} differs between runs")
        })?;
        check(first.1 == file_a, || format!("{args:?}: stdout and --json differ"))?;
        let report: Value = serde_json::from_slice(&first.1).map_err(|e| format!("{args:?}: {e}"))?;
        check(report["schema"] == 1, || format!("{args:?}: no schema field"))?;
    }
    Ok(format!("{} commands repeated with byte-identical reports", commands.len() + setup.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, f: &dyn Fn() -> Verdict| {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("criterion {n}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {msg}");
            }
        }
    };
    let family = generator_family();
    report(1, &|| criterion_1(&family));
    report(2, &|| criterion_2(&family));
    report(3, &criterion_3);
    report(4, &criterion_4);
    report(5, &criterion_5);
    report(6, &criterion_6);
    report(7, &criterion_7);
    report(8, &criterion_8);
    report(9, &criterion_9);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
