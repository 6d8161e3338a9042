use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slocal_core::cf::{
    greedy_defective_coloring, lowrank_cf, measure_defect, slocal_cf, verify_cf, CfParams, MultiColoring, Multigraph,
};
use slocal_core::graph::{random_bipartite, random_uniform_hypergraph};
use slocal_core::reductions::cf_from_split;
use slocal_core::slocal::Ordering;
use slocal_core::splitting::{
    balanced_coloring_search, partition_neighborhood, reduce_lambda_to_weak, slocal_lambda_split, slocal_weak_split,
    split_threshold, verify_lambda_split, BalanceConstraint, SplitColoring, SplitParams, SplitTarget,
};
use slocal_core::{Error, Hypergraph};
use std::collections::{BTreeSet, HashMap};

fn mixed_hypergraph(n: usize, m: usize, seed: u64) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..m)
        .map(|_| {
            let k = rng.gen_range(1..=n.min(8));
            rand::seq::index::sample(&mut rng, n, k).into_vec()
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

/// Independent histogram check of the conflict-free property.
fn cf_by_histogram(h: &Hypergraph, colors: &[BTreeSet<usize>], q: usize) -> bool {
    if colors.iter().any(|s| s.is_empty() || s.iter().any(|&c| c == 0 || c > q)) {
        return false;
    }
    h.edges().iter().all(|e| {
        let mut hist: HashMap<usize, usize> = HashMap::new();
        for &v in e {
            for &c in &colors[v] {
                *hist.entry(c).or_default() += 1;
            }
        }
        hist.values().any(|&k| k == 1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cf_verifier_agrees_with_histogram(n in 1usize..15, m in 0usize..12, q in 1usize..5, seed in any::<u64>()) {
        let h = mixed_hypergraph(n, m, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let colors: Vec<BTreeSet<usize>> =
            (0..n).map(|_| (0..=q).filter(|_| rng.gen_bool(0.35)).collect()).collect();
        let mc = MultiColoring { colors_of: colors.clone(), q };
        prop_assert_eq!(verify_cf(&h, &mc).valid, cf_by_histogram(&h, &colors, q));
    }

    #[test]
    fn split_verifier_agrees_with_recount(left in 1usize..8, right in 1usize..20, lambda in 0.0f64..0.6, seed in any::<u64>()) {
        let b = random_bipartite(left, right, 0, right, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let red: Vec<bool> = (0..right).map(|_| rng.gen_bool(0.5)).collect();
        let rep = verify_lambda_split(&b, &SplitColoring { red: red.clone() }, lambda);
        let mut violators = Vec::new();
        for u in 0..left {
            let nbrs = b.left_neighbors(u);
            let r = nbrs.iter().filter(|&&v| red[v]).count();
            let t = (lambda * nbrs.len() as f64 + 1e-9).floor() as usize;
            if r < t || nbrs.len() - r < t {
                violators.push(u);
            }
            prop_assert_eq!(split_threshold(lambda, nbrs.len()), t);
        }
        prop_assert_eq!(rep.valid, violators.is_empty());
        prop_assert_eq!(rep.violators, violators);
    }

    #[test]
    fn partition_parts_cover_and_fit(d in 2usize..80, delta in 2usize..20) {
        prop_assume!(d >= delta);
        let nbrs: Vec<usize> = (100..100 + d).collect();
        let parts = partition_neighborhood(&nbrs, delta);
        prop_assert_eq!(parts.concat(), nbrs);
        prop_assert!(parts.len() >= d / delta);
        for p in &parts {
            prop_assert!(p.len() >= 2);
            prop_assert!(p.len() >= delta.div_ceil(2));
            prop_assert!(p.len() <= delta || (delta == 2 && p.len() == 3));
        }
    }

    #[test]
    fn balanced_search_is_complete_on_small_inputs(n in 1usize..11, k in 0usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<usize> = (0..n).map(|i| 3 * i + 1).collect();
        let constraints: Vec<BalanceConstraint> = (0..k)
            .map(|_| {
                let members: Vec<usize> = nodes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                let lo = rng.gen_range(-3i64..=1);
                let hi = lo + rng.gen_range(0i64..=3);
                BalanceConstraint { members, lo, hi }
            })
            .collect();
        let ok = |red: &[bool]| {
            constraints.iter().all(|c| {
                let d: i64 = c.members.iter().map(|m| {
                    let i = nodes.iter().position(|x| x == m).unwrap();
                    if red[i] { 1 } else { -1 }
                }).sum();
                c.lo <= d && d <= c.hi
            })
        };
        let feasible = (0u32..1 << n).any(|mask| ok(&(0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>()));
        let mut stream = slocal_core::rng::node_stream(seed, 0);
        match balanced_coloring_search(&nodes, &constraints, 8, &mut stream) {
            Ok(red) => {
                prop_assert_eq!(red.len(), n);
                prop_assert!(ok(&red));
            }
            Err(Error::InfeasibleBound(_)) => prop_assert!(!feasible),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn defect_within_ceiling_on_random_multigraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..500 {
        let n = rng.gen_range(2..25);
        let m = rng.gen_range(0..80);
        let q = rng.gen_range(1..7);
        let mut g = Multigraph::new(n);
        for _ in 0..m {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            g.add_edge(u, v).unwrap();
        }
        let dc = greedy_defective_coloring(&g, q).unwrap();
        assert!(dc.color_of.iter().all(|&c| (1..=q).contains(&c)));
        assert_eq!(dc.defect, measure_defect(&g, &dc.color_of));
        assert!(dc.defect <= g.max_degree().div_ceil(q));
    }
}

#[test]
fn lowrank_halves_degree_every_phase() {
    for seed in 0..100u64 {
        let h = mixed_hypergraph(30, 40, seed);
        let run = lowrank_cf(&h).unwrap();
        assert!(verify_cf(&h, &run.coloring).valid, "seed {seed}");
        for w in run.deltas.windows(2) {
            assert!(2 * w[1] <= w[0], "seed {seed}: {:?}", run.deltas);
        }
    }
}

#[test]
fn slocal_cf_is_valid_on_random_hypergraphs() {
    for seed in 0..20u64 {
        let h = random_uniform_hypergraph(40, 30, 5, seed).unwrap();
        let run = slocal_cf(&h, &Ordering::random(40, seed), CfParams::default(), seed).unwrap();
        assert!(verify_cf(&h, &run.coloring).valid, "seed {seed}");
        assert!(run.max_radius <= run.radius_bound);
    }
}

#[test]
fn weak_reduction_yields_one_over_delta() {
    let mut solved = 0;
    for seed in 0..20u64 {
        let b = random_bipartite(20, 70, 8, 24, seed).unwrap();
        let res = reduce_lambda_to_weak(&b, 8, |reduced| {
            let order = Ordering::random(reduced.right_count(), seed);
            slocal_weak_split(reduced, &order, seed).map(|r| r.coloring)
        });
        match res {
            Ok(red) => {
                assert!(verify_lambda_split(&b, &red.coloring, 1.0 / 8.0).valid);
                solved += 1;
            }
            Err(Error::InfeasibleBound(_)) => {}
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(solved >= 15, "only {solved} of 20 solved");
    let b = random_bipartite(5, 30, 10, 12, 0).unwrap();
    let err = reduce_lambda_to_weak(&b, 4, |r| Ok(SplitColoring::all_red(r.right_count()))).unwrap_err();
    assert!(matches!(err, Error::OracleFailure(_)));
}

#[test]
fn cf_from_split_shrinks_rank_and_resolves_each_edge_once() {
    for seed in 0..6u64 {
        let h = random_uniform_hypergraph(300, 60, 40, seed).unwrap();
        let delta = 8;
        let params = SplitParams { target: SplitTarget::Lambda(1.0 / delta as f64), ..SplitParams::default() };
        let run = cf_from_split(&h, delta, |b| {
            let order = Ordering::random(b.right_count(), seed);
            slocal_lambda_split(b, &order, params, seed).map(|r| r.coloring)
        })
        .unwrap();
        assert!(verify_cf(&h, &run.coloring).valid);
        for w in run.ranks.windows(2) {
            assert!(w[1] as f64 <= (1.0 - 1.0 / (2.0 * delta as f64)) * w[0] as f64, "{:?}", run.ranks);
        }
        assert!(run.ranks.len() <= run.phase_bound);
        assert!(run.resolved_in.iter().all(|&p| p < run.ranks.len()));
    }
}
