//! Temporary timing probe; removed before the suite is final.

use disc_stream::canon::canonicalize;
use disc_stream::disc::RootedDisc;
use disc_stream::estimator::{estimate_single_pass_with, EstimatorScratch, LambdaSource, Variant};
use disc_stream::graph::{generate_graph, GraphModel, Params};
use disc_stream::lambda::{compute_row, LambdaPolicy};
use std::time::Instant;

#[test]
#[ignore]
fn timing_probe() {
    // 9-edge exact row: star-of-three-arms with cross edges.
    let mut levels = vec![0u32];
    let mut edges = Vec::new();
    for arm in 0..3u32 {
        let a = 1 + arm * 2;
        levels.extend([1, 2]);
        edges.extend([(0, a), (a, a + 1)]);
    }
    edges.push((2, 4));
    edges.push((4, 6));
    edges.push((2, 6));
    let dt = canonicalize(&RootedDisc::new(2, levels, edges).unwrap());
    assert_eq!(dt.num_edges(), 9);
    let t0 = Instant::now();
    let row = compute_row(&dt, &LambdaPolicy::default());
    println!("9-edge exact row: {:?} ({} entries)", t0.elapsed(), row.len());

    // Exhaustive unbiasedness sanity: two disjoint triangles, all 720
    // orderings, A = V: mean X must equal f exactly.
    let tt = generate_graph(GraphModel::DisjointTriangles, 6, 2, 0).unwrap();
    let roots: Vec<u32> = (0..6).collect();
    let en = disc_stream::oracle::enumerate_all_streams(&tt, 1, &roots, 8).unwrap();
    let mean = en.mean_x();
    let f = disc_stream::estimator::exact_f_on_catalog(&tt, 1, en.catalog()).unwrap();
    for (i, (m, fv)) in mean.iter().zip(&f).enumerate() {
        println!("type {i}: mean X {m:.15}, f {fv:.15}, diff {:.2e}", (m - fv).abs());
        assert!((m - fv).abs() < 1e-12);
    }

    // Matching estimate at q = 3 on full-density random graphs.
    for graph_seed in [] as [u64; 0] {
        let g = generate_graph(GraphModel::RandomDBounded, 3000, 3, graph_seed).unwrap();
        let (oracle_mean, oracle_se) = disc_stream::oracle::expected_greedy_matching(&g, 300, 7);
        let scratch = EstimatorScratch::default();
        for seed in 0..5u64 {
            let params = Params { d: 3, k: 3, epsilon: 0.5, delta: 0.5, s: 2000, seed };
            let t0 = Instant::now();
            let est = estimate_single_pass_with(
                &g,
                &params,
                LambdaSource::OnTheFly(LambdaPolicy { mc_samples: 600, ..Default::default() }),
                Variant::SinglePassPerRoot,
                &scratch,
            )
            .unwrap();
            let m = disc_stream::apps::matching_estimate(&est, 3000, 3, 2000, 5, true).unwrap();
            let m_raw = disc_stream::apps::matching_estimate(&est, 3000, 3, 2000, 5, false).unwrap();
            println!(
                "graph {graph_seed} seed {seed}: {:?} catalog {} m_hat {:.1} raw {:.1} oracle {oracle_mean:.1}±{oracle_se:.1} diff {:.1}",
                t0.elapsed(),
                est.catalog().len(),
                m.m_hat,
                m_raw.m_hat,
                (m.m_hat - oracle_mean).abs()
            );
        }
    }

    for target_ratio in [0.33f64, 0.30] {
        let n = 3000;
        let target = (n as f64 * 3.0 / 2.0 * target_ratio) as usize;
        let g = random_with_target(n, 3, target, 42);
        let exact = disc_stream::oracle::exact_distribution(&g, 2).unwrap();
        let scratch = EstimatorScratch::default();
        let mut fails_x = 0;
        let mut fails_xc = 0;
        let mut worst: f64 = 0.0;
        let trials = 50;
        for seed in 0..trials as u64 {
            let params = Params { d: 3, k: 2, epsilon: 0.5, delta: 0.5, s: 2000, seed };
            let est = estimate_single_pass_with(
                &g,
                &params,
                LambdaSource::OnTheFly(LambdaPolicy::default()),
                Variant::SinglePassPerRoot,
                &scratch,
            )
            .unwrap();
            let (mut ex, mut exc): (f64, f64) = (0.0, 0.0);
            for (i, t) in est.catalog().types().iter().enumerate() {
                let f = exact.fraction_of(t);
                ex = ex.max((est.x[i] - f).abs());
                exc = exc.max((est.x_clamped[i] - f).abs());
            }
            for (i, t) in exact.catalog.types().iter().enumerate() {
                if est.catalog().position(t).is_none() {
                    ex = ex.max(exact.f[i]);
                    exc = exc.max(exact.f[i]);
                }
            }
            if ex > 0.05 {
                fails_x += 1;
            }
            if exc > 0.05 {
                fails_xc += 1;
            }
            worst = worst.max(ex);
        }
        println!(
            "density {:.2} (m={}): raw-X fails {fails_x}/{trials}, clamped fails {fails_xc}/{trials}, worst {worst:.4}",
            target_ratio,
            g.num_edges()
        );
    }
}

fn random_with_target(n: usize, d: usize, target: usize, seed: u64) -> disc_stream::graph::BoundedGraph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut present = std::collections::HashSet::new();
    let mut pairs = Vec::new();
    let mut attempts = 0;
    while pairs.len() < target && attempts < 100 * n * d {
        attempts += 1;
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.contains(&key) || deg[u as usize] >= d || deg[v as usize] >= d {
            continue;
        }
        present.insert(key);
        deg[u as usize] += 1;
        deg[v as usize] += 1;
        pairs.push(key);
    }
    disc_stream::graph::BoundedGraph::new(n, d, pairs).unwrap()
}
