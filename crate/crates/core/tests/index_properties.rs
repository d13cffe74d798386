use proptest::prelude::*;
use septree::index::{build_lsh_index, lsh_evaluate};
use septree::search::{astar, dijkstra_all, NoHeuristic};
use septree::separator::{line_separator, AxisLine};
use septree::synth::{generate_synthetic, SyntheticParams};
use septree::{Axis, CostScope, GlobalIndex, LocalIndex, RoadGraph, VertexId};

fn small_graph() -> impl Strategy<Value = RoadGraph> {
    (2usize..10, 2usize..10, 0.0f64..0.3, any::<u64>())
        .prop_map(|(r, c, drop, seed)| {
            generate_synthetic(&SyntheticParams::grid(r, c, drop, seed)).unwrap()
        })
        .prop_filter("need two vertices", |g| g.vertex_count() >= 2)
}

/// Line position at `level` (1-based) of the strip holding `v`, found by
/// halving the bounding-box extent along `v`'s own coordinate.
fn line_for(g: &RoadGraph, axis: Axis, v: VertexId, level: usize) -> f64 {
    let (mut lo, mut hi) = g.bounding_box().unwrap().extent(axis);
    let x = g.coordinate(v, axis);
    for _ in 1..level {
        let mid = (lo + hi) / 2.0;
        if x <= mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn admissible_symmetric_and_monotone(g in small_graph(), k in 1usize..8) {
        let lsh = build_lsh_index(&g, k).unwrap();
        let gsh = GlobalIndex::build(&g, k).unwrap();
        let hg = gsh.heuristic(&g).unwrap();
        let n = g.vertex_count();
        for s in 0..n {
            let dist = dijkstra_all(&g, s).unwrap();
            prop_assert_eq!(lsh.evaluate(s, s, k).unwrap(), 0.0);
            prop_assert_eq!(hg.evaluate(s, s), 0.0);
            for (t, &c) in dist.iter().enumerate() {
                let mut prev = 0.0;
                for d in 1..=k {
                    let h = lsh.evaluate(s, t, d).unwrap();
                    prop_assert!(h <= c * (1.0 + 1e-9), "lsh d={} ({},{}) {} > {}", d, s, t, h, c);
                    prop_assert!(h >= prev);
                    prop_assert_eq!(h.to_bits(), lsh.evaluate(t, s, d).unwrap().to_bits());
                    prev = h;
                }
                let h = hg.evaluate(s, t);
                prop_assert!(h <= c * (1.0 + 1e-9));
                prop_assert_eq!(h.to_bits(), hg.evaluate(t, s).to_bits());
            }
        }
    }

    #[test]
    fn codes_follow_geometry(g in small_graph(), k in 1usize..10) {
        let lsh = build_lsh_index(&g, k).unwrap();
        for axis in Axis::BOTH {
            let labels = lsh.labels(axis);
            for v in 0..g.vertex_count() {
                for level in 1..=k {
                    let high = g.coordinate(v, axis) > line_for(&g, axis, v, level);
                    prop_assert_eq!(labels.bit(v, level), high);
                }
            }
        }
    }

    #[test]
    fn separated_pairs_cross_their_separator(g in small_graph(), k in 1usize..7) {
        let lsh = build_lsh_index(&g, k).unwrap();
        let n = g.vertex_count();
        for s in 0..n {
            for t in 0..n {
                let info = lsh.diagnostics(s, t, k).unwrap();
                let Some((axis, level)) = info.first_separation else {
                    prop_assert!(!info.separated);
                    continue;
                };
                prop_assert!(info.separated);
                // Both endpoints share the strip down to `level`, so either
                // one locates the separating line.
                let p = line_for(&g, axis, s, level);
                prop_assert_eq!(p, line_for(&g, axis, t, level));
                let line = AxisLine::new(axis, p);
                prop_assert_ne!(line.vertex_is_high(&g, s), line.vertex_is_high(&g, t));
                let sep = line_separator(&g, &line);
                let path = astar(&g, s, t, &NoHeuristic).unwrap().unwrap().path;
                prop_assert!(path.iter().any(|v| sep.binary_search(v).is_ok()));
            }
        }
    }

    #[test]
    fn level_one_never_exceeds_deeper_levels(g in small_graph(), k in 1usize..8) {
        let lsh = build_lsh_index(&g, k).unwrap();
        let gsh = GlobalIndex::build(&g, 1).unwrap();
        let hg = gsh.heuristic(&g).unwrap();
        for s in 0..g.vertex_count() {
            for t in 0..g.vertex_count() {
                let one = hg.evaluate(s, t);
                prop_assert_eq!(one.to_bits(), lsh.evaluate(s, t, 1).unwrap().to_bits());
                prop_assert!(lsh.evaluate(s, t, k).unwrap() >= one);
            }
        }
    }

    #[test]
    fn file_size_matches_layout(g in small_graph(), k in 1usize..20) {
        let n = g.vertex_count();
        let header = 4 + 2 + 1 + 1 + 8 + 8 + 4 + 2 + 32;
        let mut bytes = Vec::new();
        LocalIndex::build(&g, k).unwrap().save(&mut bytes).unwrap();
        prop_assert_eq!(bytes.len(), header + 2 * (n * k.div_ceil(8) + n + 8 * n * k) + 4);
        bytes.clear();
        GlobalIndex::build(&g, k).unwrap().save(&mut bytes).unwrap();
        prop_assert_eq!(bytes.len(), header + 16 * k + 16 * n * k + 4);
    }
}

#[test]
fn subgraph_costs_admissibility_is_reported() {
    let mut violations = 0usize;
    let mut pairs = 0usize;
    for seed in 0..10 {
        let g: RoadGraph = generate_synthetic(&SyntheticParams::grid(14, 14, 0.15, seed)).unwrap();
        let (lsh, _) = LocalIndex::build_with(&g, 5, CostScope::Subgraph).unwrap();
        for s in 0..g.vertex_count() {
            let dist = dijkstra_all(&g, s).unwrap();
            for (t, &c) in dist.iter().enumerate() {
                pairs += 1;
                if (1..=5).any(|d| lsh.evaluate(s, t, d).unwrap() > c * (1.0 + 1e-9)) {
                    violations += 1;
                }
            }
        }
    }
    println!("subgraph cost scope: {violations} of {pairs} pairs overestimate at some depth");
}

#[test]
fn stale_index_is_rejected() {
    let g: RoadGraph = generate_synthetic(&SyntheticParams::grid(6, 6, 0.0, 1)).unwrap();
    let other: RoadGraph = generate_synthetic(&SyntheticParams::grid(6, 6, 0.0, 2)).unwrap();
    let lsh = build_lsh_index(&g, 3).unwrap();
    assert!(lsh_evaluate(&lsh, &g, 0, 5, 3).is_ok());
    assert!(matches!(
        lsh_evaluate(&lsh, &other, 0, 5, 3),
        Err(septree::Error::StaleIndex(_))
    ));
    assert!(matches!(
        lsh.heuristic(&other, 3),
        Err(septree::Error::StaleIndex(_))
    ));
}

#[test]
fn single_precision_index_is_admissible() {
    let g: septree::RoadGraph32 =
        generate_synthetic(&SyntheticParams::grid(10, 10, 0.1, 4)).unwrap();
    let lsh: septree::LshIndex32 = build_lsh_index(&g, 5).unwrap();
    for s in 0..g.vertex_count() {
        let dist = dijkstra_all(&g, s).unwrap();
        for (t, &c) in dist.iter().enumerate() {
            assert!(lsh.evaluate(s, t, 5).unwrap() <= c * (1.0 + 1e-5));
        }
    }
}
