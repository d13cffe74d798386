use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use septree::search::{
    astar, astar_traced, dijkstra_all, dijkstra_search, multi_source_dijkstra, NoHeuristic,
};
use septree::synth::{generate_synthetic, SyntheticParams};
use septree::{Error, Graph, RoadGraph, VertexId};

fn random_graph(n: usize, m: usize, seed: u64) -> RoadGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)])
        .collect();
    let edges: Vec<_> = (0..m)
        .filter_map(|_| {
            let (u, w) = (rng.gen_range(0..n), rng.gen_range(0..n));
            (u != w).then(|| (u, w, rng.gen_range(0.5..20.0)))
        })
        .collect();
    Graph::from_edges(coords, edges).unwrap()
}

fn bellman_ford(g: &RoadGraph, s: VertexId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    dist[s] = 0.0;
    for _ in 0..g.vertex_count() {
        let mut changed = false;
        for (u, w, c) in g.edges() {
            for (a, b) in [(u, w), (w, u)] {
                if dist[a] + c < dist[b] {
                    dist[b] = dist[a] + c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn close(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn dijkstra_matches_bellman_ford() {
    for seed in 0..10 {
        let g = random_graph(60, 120, seed);
        for s in [0, 17, 59] {
            let got = dijkstra_all(&g, s).unwrap();
            let want = bellman_ford(&g, s);
            assert!(
                got.iter().zip(&want).all(|(&a, &b)| close(a, b)),
                "seed {seed} source {s}"
            );
        }
    }
}

#[test]
fn multi_source_is_min_over_single_sources() {
    let g = random_graph(80, 200, 5);
    let sources = [3, 40, 41, 77];
    let multi = multi_source_dijkstra(&g, &sources).unwrap();
    let singles: Vec<Vec<f64>> = sources
        .iter()
        .map(|&s| dijkstra_all(&g, s).unwrap())
        .collect();
    for v in 0..g.vertex_count() {
        let best = singles.iter().map(|d| d[v]).fold(f64::INFINITY, f64::min);
        assert_eq!(multi[v], best, "vertex {v}");
    }
    assert!(matches!(
        multi_source_dijkstra(&g, &[]),
        Err(Error::Validation(_))
    ));
}

#[test]
fn unit_costs_match_bfs() {
    let base: RoadGraph = generate_synthetic(&SyntheticParams::grid(15, 15, 0.2, 6)).unwrap();
    let g = Graph::from_edges(
        base.coords().to_vec(),
        base.edges().map(|(u, w, _)| (u, w, 1.0)),
    )
    .unwrap();
    let mut hops = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([0]);
    hops[0] = 0;
    while let Some(u) = queue.pop_front() {
        for (w, _) in g.neighbors(u) {
            if hops[w] == usize::MAX {
                hops[w] = hops[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let dist = dijkstra_all(&g, 0).unwrap();
    for v in 0..g.vertex_count() {
        assert_eq!(dist[v], hops[v] as f64);
    }
    let space = dijkstra_search(&g, &[0]).unwrap();
    assert_eq!(space.settled_count, g.vertex_count());
}

#[test]
fn astar_with_inconsistent_admissible_heuristic_is_optimal() {
    let g = random_graph(100, 300, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..40 {
        let (s, t) = (rng.gen_range(0..100), rng.gen_range(0..100));
        let to_t = dijkstra_all(&g, t).unwrap();
        // Random fractions of the exact distance: admissible but not consistent.
        let noise: Vec<f64> = (0..100).map(|_| rng.gen_range(0.0..1.0)).collect();
        let h = |v: VertexId, _: VertexId| {
            if to_t[v].is_finite() {
                to_t[v] * noise[v]
            } else {
                0.0
            }
        };
        let a = astar(&g, s, t, &h).unwrap();
        let d = astar(&g, s, t, &NoHeuristic).unwrap();
        match (a, d) {
            (Some(a), Some(d)) => {
                assert!(close(a.cost, d.cost));
                assert!(close(a.cost, to_t[s]));
                let walked: f64 = a
                    .path
                    .windows(2)
                    .map(|p| g.edge_cost(p[0], p[1]).unwrap())
                    .sum();
                assert!(close(walked, a.cost));
                assert_eq!(a.path.first(), Some(&s));
                assert_eq!(a.path.last(), Some(&t));
            }
            (None, None) => assert!(to_t[s].is_infinite()),
            other => panic!("reachability disagrees: {other:?}"),
        }
    }
}

#[test]
fn traversal_lists_each_settled_vertex_once() {
    let g: RoadGraph = generate_synthetic(&SyntheticParams::grid(20, 20, 0.05, 2)).unwrap();
    let (r, settled) = astar_traced(&g, 0, g.vertex_count() - 1, &NoHeuristic).unwrap();
    let r = r.unwrap();
    assert_eq!(settled.len(), r.stats.settled_count);
    let mut sorted = settled.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), settled.len());
    assert_eq!(r.stats.path_vertex_count, r.path.len());
}
