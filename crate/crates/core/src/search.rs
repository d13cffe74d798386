//! Dijkstra, multi-source Dijkstra and A* over a [`Graph`].
//!
//! All searches use a binary heap with lazy deletion. A* reopens vertices
//! whose distance improves after they were settled, so it stays exact for
//! admissible heuristics that are not consistent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::cmp_scalar;
use crate::{Error, Graph, Result, Scalar, VertexId};

/// Lower bound on the travel time from `v` to `target`.
pub trait Heuristic<T> {
    fn estimate(&self, v: VertexId, target: VertexId) -> T;
}

/// `h ≡ 0`; A* degenerates to Dijkstra.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoHeuristic;

impl<T: Scalar> Heuristic<T> for NoHeuristic {
    fn estimate(&self, _: VertexId, _: VertexId) -> T {
        T::zero()
    }
}

impl<T, F: Fn(VertexId, VertexId) -> T> Heuristic<T> for F {
    fn estimate(&self, v: VertexId, target: VertexId) -> T {
        self(v, target)
    }
}

/// Traversal counters of one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Distinct vertices popped with a current (non-stale) key.
    pub settled_count: usize,
    /// Edges scanned out of settled vertices, re-expansions included.
    pub relaxed_edge_count: usize,
    pub path_vertex_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult<T> {
    pub cost: T,
    pub path: Vec<VertexId>,
    pub stats: QueryStats,
}

/// Distances from a source set plus the number of settled vertices.
#[derive(Clone, Debug)]
pub struct SearchSpace<T> {
    pub distances: Vec<T>,
    pub settled_count: usize,
}

#[derive(Clone, Copy)]
struct Entry<T> {
    key: T,
    dist: T,
    vertex: VertexId,
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Entry<T> {}

impl<T: Scalar> Ord for Entry<T> {
    // BinaryHeap is a max-heap: smallest key first, then larger distance,
    // then smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(other.key, self.key)
            .then_with(|| cmp_scalar(self.dist, other.dist))
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from all `sources` at once, optionally confined to vertices for
/// which `in_scope` is true. Out-of-scope vertices keep `∞`.
pub(crate) fn search_from<T: Scalar>(
    g: &Graph<T>,
    sources: &[VertexId],
    in_scope: Option<&[bool]>,
) -> SearchSpace<T> {
    let allowed = |v: VertexId| in_scope.is_none_or(|m| m[v]);
    let mut dist = vec![T::infinity(); g.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if allowed(s) && dist[s] != T::zero() {
            dist[s] = T::zero();
            heap.push(Entry {
                key: T::zero(),
                dist: T::zero(),
                vertex: s,
            });
        }
    }
    let mut settled_count = 0;
    while let Some(Entry {
        dist: d, vertex: u, ..
    }) = heap.pop()
    {
        if d > dist[u] {
            continue;
        }
        settled_count += 1;
        for (w, c) in g.neighbors(u) {
            let nd = d + c;
            if nd < dist[w] && allowed(w) {
                dist[w] = nd;
                heap.push(Entry {
                    key: nd,
                    dist: nd,
                    vertex: w,
                });
            }
        }
    }
    SearchSpace {
        distances: dist,
        settled_count,
    }
}

/// Multi-source Dijkstra with settle counting.
pub fn dijkstra_search<T: Scalar>(g: &Graph<T>, sources: &[VertexId]) -> Result<SearchSpace<T>> {
    if sources.is_empty() {
        return Err(Error::validation("source set is empty"));
    }
    for &s in sources {
        g.check_vertex(s)?;
    }
    Ok(search_from(g, sources, None))
}

/// Distances from `s` to every vertex, `∞` where unreachable.
pub fn dijkstra_all<T: Scalar>(g: &Graph<T>, s: VertexId) -> Result<Vec<T>> {
    Ok(dijkstra_search(g, &[s])?.distances)
}

/// `dist[v] = min over u in sources of c(v, u)`.
pub fn multi_source_dijkstra<T: Scalar>(g: &Graph<T>, sources: &[VertexId]) -> Result<Vec<T>> {
    Ok(dijkstra_search(g, sources)?.distances)
}

/// A* from `s` to `t`. `Ok(None)` means `t` is unreachable.
pub fn astar<T, H>(g: &Graph<T>, s: VertexId, t: VertexId, h: &H) -> Result<Option<PathResult<T>>>
where
    T: Scalar,
    H: Heuristic<T> + ?Sized,
{
    run_astar(g, s, t, h, None)
}

/// Like [`astar`], also returning the settled vertices in first-settle order.
pub fn astar_traced<T, H>(
    g: &Graph<T>,
    s: VertexId,
    t: VertexId,
    h: &H,
) -> Result<(Option<PathResult<T>>, Vec<VertexId>)>
where
    T: Scalar,
    H: Heuristic<T> + ?Sized,
{
    let mut trace = Vec::new();
    let result = run_astar(g, s, t, h, Some(&mut trace))?;
    Ok((result, trace))
}

fn run_astar<T, H>(
    g: &Graph<T>,
    s: VertexId,
    t: VertexId,
    h: &H,
    mut trace: Option<&mut Vec<VertexId>>,
) -> Result<Option<PathResult<T>>>
where
    T: Scalar,
    H: Heuristic<T> + ?Sized,
{
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let n = g.vertex_count();
    let mut dist = vec![T::infinity(); n];
    let mut parent = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut stats = QueryStats::default();
    let mut heap = BinaryHeap::new();

    dist[s] = T::zero();
    heap.push(Entry {
        key: h.estimate(s, t),
        dist: T::zero(),
        vertex: s,
    });

    while let Some(Entry {
        dist: d, vertex: u, ..
    }) = heap.pop()
    {
        if d > dist[u] {
            continue;
        }
        if !settled[u] {
            settled[u] = true;
            stats.settled_count += 1;
            if let Some(trace) = trace.as_deref_mut() {
                trace.push(u);
            }
        }
        if u == t {
            let mut path = vec![t];
            let mut v = t;
            while v != s {
                v = parent[v];
                path.push(v);
            }
            path.reverse();
            stats.path_vertex_count = path.len();
            return Ok(Some(PathResult {
                cost: d,
                path,
                stats,
            }));
        }
        for (w, c) in g.neighbors(u) {
            stats.relaxed_edge_count += 1;
            let nd = d + c;
            if nd < dist[w] {
                dist[w] = nd;
                parent[w] = u;
                heap.push(Entry {
                    key: nd + h.estimate(w, t),
                    dist: nd,
                    vertex: w,
                });
            }
        }
    }
    Ok(None)
}

/// Exact point-to-point distance, `None` if unreachable.
pub fn shortest_distance<T: Scalar>(g: &Graph<T>, s: VertexId, t: VertexId) -> Result<Option<T>> {
    Ok(astar(g, s, t, &NoHeuristic)?.map(|r| r.cost))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(costs: &[f64]) -> Graph<f64> {
        let coords = (0..=costs.len()).map(|i| [i as f64, 0.0]).collect();
        Graph::from_edges(
            coords,
            costs.iter().enumerate().map(|(i, &c)| (i, i + 1, c)),
        )
        .unwrap()
    }

    #[test]
    fn single_vertex() {
        let g = Graph::<f64>::from_edges(vec![[0.0, 0.0]], []).unwrap();
        assert_eq!(dijkstra_all(&g, 0).unwrap(), vec![0.0]);
    }

    #[test]
    fn path_distances() {
        let g = path_graph(&[2.0, 3.0]);
        assert_eq!(dijkstra_all(&g, 0).unwrap(), vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn path_graph_settles_every_vertex() {
        let g = path_graph(&[1.0; 9]);
        assert_eq!(dijkstra_search(&g, &[4]).unwrap().settled_count, 10);
    }

    #[test]
    fn invalid_source() {
        let g = path_graph(&[1.0]);
        assert!(matches!(dijkstra_all(&g, 2), Err(Error::Validation(_))));
        assert!(matches!(
            multi_source_dijkstra(&g, &[]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            astar(&g, 0, 5, &NoHeuristic),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn all_sources_give_zeros() {
        let g = path_graph(&[1.0, 2.0, 3.0]);
        assert_eq!(
            multi_source_dijkstra(&g, &[0, 1, 2, 3]).unwrap(),
            vec![0.0; 4]
        );
    }

    #[test]
    fn astar_same_vertex() {
        let g = path_graph(&[1.0, 2.0]);
        let r = astar(&g, 1, 1, &NoHeuristic).unwrap().unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.path, vec![1]);
        assert!(r.stats.settled_count >= 1);
    }

    #[test]
    fn astar_unreachable_is_none() {
        let g = Graph::<f64>::from_edges(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [(0, 1, 1.0)])
            .unwrap();
        assert!(astar(&g, 0, 2, &NoHeuristic).unwrap().is_none());
    }

    #[test]
    fn inconsistent_heuristic_still_optimal() {
        // 0 -1- 1 -1- 3, 0 -1.5- 2 -0.4- 3.  Optimal 0-2-3 costs 1.9.
        // h(2) is admissible (1.9 - 1.5 = 0.4 >= 0.39) but h(0)=1.9 vs
        // h(1)=0 violates consistency elsewhere, forcing a reopen.
        let coords = vec![[0.0, 0.0]; 4];
        let g = Graph::from_edges(
            coords,
            [
                (0, 1, 1.0),
                (1, 3, 1.0),
                (0, 2, 1.5),
                (2, 3, 0.4),
                (1, 2, 0.2),
            ],
        )
        .unwrap();
        let exact = dijkstra_all(&g, 3).unwrap();
        let h = |v: VertexId, _t: VertexId| match v {
            1 => 0.0,
            2 => exact[2],
            _ => exact[v],
        };
        let r = astar(&g, 0, 3, &h).unwrap().unwrap();
        assert_eq!(r.cost, dijkstra_all(&g, 0).unwrap()[3]);
    }

    #[test]
    fn traced_settles_match_count() {
        let g = path_graph(&[1.0, 1.0, 1.0, 1.0]);
        let (r, trace) = astar_traced(&g, 0, 4, &NoHeuristic).unwrap();
        let r = r.unwrap();
        assert_eq!(trace.len(), r.stats.settled_count);
        assert_eq!(r.stats.path_vertex_count, 5);
        assert_eq!(r.path, vec![0, 1, 2, 3, 4]);
    }
}
