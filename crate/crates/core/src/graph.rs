//! Undirected plane-embedded road graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

pub type VertexId = usize;

/// Coordinate axis of the plane embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Scalar> BoundingBox<T> {
    /// Extent `(min, max)` along `axis`.
    pub fn extent(&self, axis: Axis) -> (T, T) {
        match axis {
            Axis::X => (self.x_min, self.x_max),
            Axis::Y => (self.y_min, self.y_max),
        }
    }

    pub fn diagonal(&self) -> T {
        (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }
}

/// Identifies the graph an index was built for.
///
/// `checksum` is a CRC32 over the edge list (endpoints and costs) and the
/// vertex coordinates, all widened to `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GraphFingerprint {
    pub vertex_count: u64,
    pub edge_count: u64,
    pub checksum: u32,
}

/// Undirected graph with strictly positive edge costs and planar coordinates.
///
/// Adjacency is stored in compressed form, each neighbor list sorted by id.
/// Every undirected edge appears in both endpoint lists with the same cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<T> {
    coords: Vec<[T; 2]>,
    first_out: Vec<usize>,
    head: Vec<VertexId>,
    cost: Vec<T>,
}

impl<T: Scalar> Graph<T> {
    /// Builds a graph from vertex coordinates and an undirected edge list.
    ///
    /// Parallel edges (in either orientation) collapse to one edge carrying the
    /// minimum cost. Self-loops, non-finite coordinates and non-positive or
    /// non-finite costs are rejected.
    pub fn from_edges<I>(coords: Vec<[T; 2]>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, T)>,
    {
        let n = coords.len();
        if let Some(v) = coords
            .iter()
            .position(|c| !c[0].is_finite() || !c[1].is_finite())
        {
            return Err(Error::validation(format!(
                "vertex {v} has a non-finite coordinate"
            )));
        }

        let mut list = Vec::new();
        for (u, w, c) in edges {
            if u >= n || w >= n {
                return Err(Error::Structural(format!(
                    "edge ({u}, {w}) references a vertex outside 0..{n}"
                )));
            }
            if u == w {
                return Err(Error::validation(format!("self-loop at vertex {u}")));
            }
            if !(c.is_finite() && c > T::zero()) {
                return Err(Error::validation(format!(
                    "edge ({u}, {w}) has cost {c}; costs must be finite and positive"
                )));
            }
            list.push((u.min(w), u.max(w), c));
        }
        list.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(crate::scalar::cmp_scalar(a.2, b.2))
        });
        list.dedup_by(|later, kept| later.0 == kept.0 && later.1 == kept.1);

        let mut degree = vec![0usize; n];
        for &(u, w, _) in &list {
            degree[u] += 1;
            degree[w] += 1;
        }
        let mut first_out = Vec::with_capacity(n + 1);
        first_out.push(0);
        for d in &degree {
            first_out.push(first_out.last().unwrap() + d);
        }
        let m2 = *first_out.last().unwrap();
        let mut head = vec![0; m2];
        let mut cost = vec![T::zero(); m2];
        let mut fill = first_out[..n].to_vec();
        // Sorted (u, w) order keeps each neighbor list sorted: lower
        // neighbors arrive before higher ones.
        for &(u, w, c) in &list {
            head[fill[u]] = w;
            cost[fill[u]] = c;
            fill[u] += 1;
            head[fill[w]] = u;
            cost[fill[w]] = c;
            fill[w] += 1;
        }

        Ok(Self {
            coords,
            first_out,
            head,
            cost,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.head.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.first_out[v + 1] - self.first_out[v]
    }

    /// Neighbors of `v` with edge costs, ascending by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, T)> + '_ {
        let range = self.first_out[v]..self.first_out[v + 1];
        self.head[range.clone()]
            .iter()
            .copied()
            .zip(self.cost[range].iter().copied())
    }

    /// Each undirected edge once as `(u, w, cost)` with `u < w`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, T)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(w, _)| u < w)
                .map(move |(w, c)| (u, w, c))
        })
    }

    pub fn coords(&self) -> &[[T; 2]] {
        &self.coords
    }

    pub fn coord(&self, v: VertexId) -> [T; 2] {
        self.coords[v]
    }

    pub fn coordinate(&self, v: VertexId, axis: Axis) -> T {
        self.coords[v][axis.index()]
    }

    /// Cost of edge `(u, w)`, if present.
    pub fn edge_cost(&self, u: VertexId, w: VertexId) -> Option<T> {
        let range = self.first_out[u]..self.first_out[u + 1];
        let pos = self.head[range.clone()].binary_search(&w).ok()?;
        Some(self.cost[range.start + pos])
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "vertex {v} out of range (graph has {} vertices)",
                self.vertex_count()
            )))
        }
    }

    pub fn bounding_box(&self) -> Result<BoundingBox<T>> {
        let first = self
            .coords
            .first()
            .ok_or_else(|| Error::validation("bounding box of an empty graph"))?;
        let init = BoundingBox {
            x_min: first[0],
            x_max: first[0],
            y_min: first[1],
            y_max: first[1],
        };
        Ok(self.coords.iter().fold(init, |b, c| BoundingBox {
            x_min: b.x_min.min(c[0]),
            x_max: b.x_max.max(c[0]),
            y_min: b.y_min.min(c[1]),
            y_max: b.y_max.max(c[1]),
        }))
    }

    /// Planar distance between the embedded positions of `u` and `v`.
    pub fn euclidean_distance(&self, u: VertexId, v: VertexId) -> Result<T> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let (a, b) = (self.coords[u], self.coords[v]);
        Ok((a[0] - b[0]).hypot(a[1] - b[1]))
    }

    /// Connected component label per vertex, labels numbered in order of
    /// their smallest vertex. Returns the labels and the component count.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = count;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for (w, _) in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().1 <= 1
    }

    /// Restricts the graph to its largest connected component.
    ///
    /// Ties go to the component containing the smallest vertex id. The
    /// returned map sends each old id to its new id, `None` for dropped
    /// vertices; kept vertices retain their relative order.
    pub fn largest_connected_component(&self) -> (Graph<T>, Vec<Option<VertexId>>) {
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // max_by_key returns the last maximum; iterate in reverse to prefer the first.
        let keep = (0..count).rev().max_by_key(|&l| sizes[l]);

        let mut map = vec![None; self.vertex_count()];
        let mut coords = Vec::new();
        for v in 0..self.vertex_count() {
            if Some(label[v]) == keep {
                map[v] = Some(coords.len());
                coords.push(self.coords[v]);
            }
        }
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(u, w, c)| Some((map[u]?, map[w]?, c)))
            .collect();
        let g = Graph::from_edges(coords, edges).expect("subgraph of a valid graph is valid");
        (g, map)
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        let mut hasher = crc32fast::Hasher::new();
        for (u, w, c) in self.edges() {
            hasher.update(&(u as u64).to_le_bytes());
            hasher.update(&(w as u64).to_le_bytes());
            hasher.update(&c.as_f64().to_le_bytes());
        }
        for c in &self.coords {
            hasher.update(&c[0].as_f64().to_le_bytes());
            hasher.update(&c[1].as_f64().to_le_bytes());
        }
        GraphFingerprint {
            vertex_count: self.vertex_count() as u64,
            edge_count: self.edge_count() as u64,
            checksum: hasher.finalize(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph<f64> {
        Graph::from_edges(
            vec![[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            [(0, 1, 2.0), (1, 2, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn parallel_edges_keep_minimum_cost() {
        let g = Graph::from_edges(
            vec![[0.0, 0.0], [1.0, 0.0]],
            [(0, 1, 5.0), (1, 0, 7.0), (0, 1, 6.0)],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_cost(0, 1), Some(5.0));
        assert_eq!(g.edge_cost(1, 0), Some(5.0));
    }

    #[test]
    fn rejects_bad_edges() {
        let c = vec![[0.0, 0.0], [1.0, 0.0]];
        assert!(matches!(
            Graph::from_edges(c.clone(), [(0, 1, 0.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_edges(c.clone(), [(0, 1, -1.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_edges(c.clone(), [(0, 1, f64::INFINITY)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_edges(c.clone(), [(1, 1, 1.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_edges(c, [(0, 2, 1.0)]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            Graph::<f64>::from_edges(vec![[f64::NAN, 0.0]], []),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = Graph::from_edges(
            vec![[0.0, 0.0]; 5],
            [
                (3, 1, 1.0),
                (0, 4, 2.0),
                (1, 0, 3.0),
                (4, 3, 4.0),
                (2, 1, 5.0),
            ],
        )
        .unwrap();
        for u in 0..5 {
            let ids: Vec<_> = g.neighbors(u).map(|(w, _)| w).collect();
            assert!(ids.windows(2).all(|p| p[0] < p[1]));
            for (w, c) in g.neighbors(u) {
                assert_eq!(g.edge_cost(w, u), Some(c));
            }
        }
    }

    #[test]
    fn bounding_box_cases() {
        let g = Graph::<f64>::from_edges(vec![[3.0, 4.0]], []).unwrap();
        assert_eq!(
            g.bounding_box().unwrap(),
            BoundingBox {
                x_min: 3.0,
                x_max: 3.0,
                y_min: 4.0,
                y_max: 4.0
            }
        );
        let g = Graph::<f64>::from_edges(vec![[0.0, 0.0], [10.0, 5.0]], []).unwrap();
        assert_eq!(
            g.bounding_box().unwrap(),
            BoundingBox {
                x_min: 0.0,
                x_max: 10.0,
                y_min: 0.0,
                y_max: 5.0
            }
        );
        let g = Graph::<f64>::from_edges(vec![], []).unwrap();
        assert!(matches!(g.bounding_box(), Err(Error::Validation(_))));
    }

    #[test]
    fn euclidean_distance_cases() {
        let g = Graph::<f64>::from_edges(vec![[0.0, 0.0], [3.0, 4.0]], []).unwrap();
        assert_eq!(g.euclidean_distance(0, 0).unwrap(), 0.0);
        assert_eq!(g.euclidean_distance(0, 1).unwrap(), 5.0);
        assert!(matches!(
            g.euclidean_distance(0, 2),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let g = path3();
        let (h, map) = g.largest_connected_component();
        assert_eq!(h, g);
        assert_eq!(map, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn largest_component_picks_bigger_side() {
        // Triangle {0,1,2} and triangle {3,4,5} with pendant 6.
        let g = Graph::from_edges(
            vec![[0.0, 0.0]; 7],
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 0, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 3, 1.0),
                (5, 6, 1.0),
            ],
        )
        .unwrap();
        let (h, map) = g.largest_connected_component();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
        assert!(h.is_connected());
        assert_eq!(&map[..3], &[None, None, None]);
        assert_eq!(&map[3..], &[Some(0), Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn fingerprint_tracks_costs() {
        let a = path3();
        let b = Graph::from_edges(
            vec![[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            [(0, 1, 2.0), (1, 2, 3.5)],
        )
        .unwrap();
        assert_eq!(a.fingerprint(), path3().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().edge_count, 2);
    }
}
