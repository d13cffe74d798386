//! Hierarchical separator trees.
//!
//! For each axis the bounding-box extent is halved recursively `k` times.
//! Every tree node owns a strip of the plane and the vertices inside it;
//! its separator comes from the line through the strip's middle. A vertex
//! records, per level, which half it falls in (one code bit) and its travel
//! time to that level's separator (one cost).
//!
//! Two vertices share their code prefix up to the level whose line first
//! splits them. Shared levels give triangle-inequality bounds; the splitting
//! level gives the separator sum bound. Deeper levels are not comparable.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{check_fingerprint, finite_pair, CostScope, SeparationInfo};
use crate::search::{search_from, Heuristic};
use crate::separator::{build_cut, line_separator, AxisLine};
use crate::{Axis, BoundingBox, Error, Graph, GraphFingerprint, Result, Scalar, VertexId};

/// Codes are stored in a `u32`.
pub const MAX_DEPTH: usize = 24;

/// Codes and separator costs of every vertex for one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisLabels<T> {
    pub(crate) axis: Axis,
    pub(crate) depth: usize,
    /// Bit `i` is the side of the level-`i + 1` line, 1 for the high side.
    pub(crate) codes: Vec<u32>,
    pub(crate) valid_depth: Vec<u8>,
    /// Row-major `vertex_count x depth`.
    pub(crate) costs: Vec<T>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    /// Tree nodes with at least one vertex.
    pub nodes: usize,
    pub nonempty_separators: usize,
    pub separator_vertices: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxisBuildStats {
    pub levels: Vec<LevelStats>,
    /// Multi-source searches actually executed.
    pub dijkstra_runs: usize,
}

impl AxisBuildStats {
    pub fn tree_nodes(&self) -> usize {
        self.levels.iter().map(|l| l.nodes).sum()
    }

    pub fn nonempty_separators(&self) -> usize {
        self.levels.iter().map(|l| l.nonempty_separators).sum()
    }
}

struct TreeNode<T> {
    lo: T,
    hi: T,
    members: Vec<VertexId>,
}

fn check_build_input<T: Scalar>(g: &Graph<T>, k: usize) -> Result<()> {
    if !(1..=MAX_DEPTH).contains(&k) {
        return Err(Error::validation(format!(
            "tree depth must lie in 1..={MAX_DEPTH}, got {k}"
        )));
    }
    if g.is_empty() {
        return Err(Error::validation("graph has no vertices"));
    }
    if !g.is_connected() {
        return Err(Error::validation(
            "graph is not connected; extract its largest component first",
        ));
    }
    Ok(())
}

impl<T: Scalar> AxisLabels<T> {
    /// Builds one separator tree of depth `k` with full-graph costs.
    pub fn build(g: &Graph<T>, axis: Axis, k: usize) -> Result<Self> {
        Ok(Self::build_with(g, axis, k, CostScope::FullGraph)?.0)
    }

    pub fn build_with(
        g: &Graph<T>,
        axis: Axis,
        k: usize,
        scope: CostScope,
    ) -> Result<(Self, AxisBuildStats)> {
        check_build_input(g, k)?;
        let bbox = g.bounding_box()?;
        Ok(Self::build_unchecked(g, axis, k, scope, &bbox))
    }

    fn build_unchecked(
        g: &Graph<T>,
        axis: Axis,
        k: usize,
        scope: CostScope,
        bbox: &BoundingBox<T>,
    ) -> (Self, AxisBuildStats) {
        let n = g.vertex_count();
        let two = T::one() + T::one();
        let mut labels = AxisLabels {
            axis,
            depth: k,
            codes: vec![0; n],
            valid_depth: vec![0; n],
            costs: vec![T::infinity(); n * k],
        };
        let mut stats = AxisBuildStats::default();
        let runs = AtomicUsize::new(0);

        let (lo, hi) = bbox.extent(axis);
        let mut nodes = vec![TreeNode {
            lo,
            hi,
            members: (0..n).collect(),
        }];

        for level in 0..k {
            let outcomes: Vec<(Vec<T>, usize)> = nodes
                .par_iter()
                .map(|node| {
                    let line = AxisLine::new(axis, (node.lo + node.hi) / two);
                    let (separator, mask) = match scope {
                        CostScope::FullGraph => (line_separator(g, &line), None),
                        CostScope::Subgraph => {
                            let mut mask = vec![false; n];
                            for &v in &node.members {
                                mask[v] = true;
                            }
                            (build_cut(g, &node.members, &line).separator, Some(mask))
                        }
                    };
                    if separator.is_empty() {
                        return (vec![T::infinity(); node.members.len()], 0);
                    }
                    runs.fetch_add(1, Ordering::Relaxed);
                    let dist = search_from(g, &separator, mask.as_deref()).distances;
                    (
                        node.members.iter().map(|&v| dist[v]).collect(),
                        separator.len(),
                    )
                })
                .collect();

            let mut level_stats = LevelStats {
                nodes: nodes.len(),
                ..LevelStats::default()
            };
            let mut children = Vec::with_capacity(2 * nodes.len());
            for (node, (member_costs, sep_len)) in nodes.into_iter().zip(outcomes) {
                if sep_len > 0 {
                    level_stats.nonempty_separators += 1;
                    level_stats.separator_vertices += sep_len;
                }
                let mid = (node.lo + node.hi) / two;
                let (mut low, mut high) = (Vec::new(), Vec::new());
                for (&v, c) in node.members.iter().zip(member_costs) {
                    labels.costs[v * k + level] = c;
                    labels.valid_depth[v] = (level + 1) as u8;
                    if g.coordinate(v, axis) > mid {
                        labels.codes[v] |= 1 << level;
                        high.push(v);
                    } else {
                        low.push(v);
                    }
                }
                if !low.is_empty() {
                    children.push(TreeNode {
                        lo: node.lo,
                        hi: mid,
                        members: low,
                    });
                }
                if !high.is_empty() {
                    children.push(TreeNode {
                        lo: mid,
                        hi: node.hi,
                        members: high,
                    });
                }
            }
            stats.levels.push(level_stats);
            nodes = children;
        }
        stats.dijkstra_runs = runs.into_inner();
        (labels, stats)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.codes.len()
    }

    pub fn code(&self, v: VertexId) -> u32 {
        self.codes[v]
    }

    /// Side bit of `v` at 1-based `level`.
    pub fn bit(&self, v: VertexId, level: usize) -> bool {
        self.codes[v] >> (level - 1) & 1 == 1
    }

    pub fn costs(&self, v: VertexId) -> &[T] {
        &self.costs[v * self.depth..(v + 1) * self.depth]
    }

    pub fn valid_depth(&self, v: VertexId) -> usize {
        self.valid_depth[v] as usize
    }

    /// Scans the shared levels of `s` and `t`, folding contributions into `acc`.
    fn scan(&self, s: VertexId, t: VertexId, d: usize, acc: &mut Accumulator<T>) {
        let levels = d.min(self.valid_depth(s)).min(self.valid_depth(t));
        let (cs, ct) = (self.costs(s), self.costs(t));
        let differ = self.codes[s] ^ self.codes[t];
        for i in 0..levels {
            let (a, b) = (cs[i], ct[i]);
            if differ >> i & 1 == 0 {
                if finite_pair(a, b) {
                    acc.value = acc.value.max((a - b).abs());
                }
            } else {
                if finite_pair(a, b) {
                    let sum = a + b;
                    acc.value = acc.value.max(sum);
                    acc.best_sum = Some(acc.best_sum.map_or(sum, |m| m.max(sum)));
                    if acc.first.is_none_or(|(_, l)| i + 1 < l) {
                        acc.first = Some((self.axis, i + 1));
                    }
                }
                break;
            }
        }
    }
}

pub(crate) struct Accumulator<T> {
    pub value: T,
    pub best_sum: Option<T>,
    pub first: Option<(Axis, usize)>,
}

impl<T: Scalar> Accumulator<T> {
    pub fn new() -> Self {
        Self {
            value: T::zero(),
            best_sum: None,
            first: None,
        }
    }

    pub fn info(&self) -> SeparationInfo {
        SeparationInfo {
            separated: self.best_sum.is_some(),
            first_separation: self.first,
            separator_determined: self.best_sum.is_some_and(|m| m >= self.value),
        }
    }
}

/// Builds a single axis tree with full-graph costs.
pub fn build_axis_labels<T: Scalar>(g: &Graph<T>, axis: Axis, k: usize) -> Result<AxisLabels<T>> {
    AxisLabels::build(g, axis, k)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalBuildStats {
    pub x: AxisBuildStats,
    pub y: AxisBuildStats,
}

/// The pair of separator trees (one per axis) with graph metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalIndex<T> {
    pub(crate) x: AxisLabels<T>,
    pub(crate) y: AxisLabels<T>,
    pub(crate) bbox: BoundingBox<T>,
    pub(crate) fingerprint: GraphFingerprint,
    pub(crate) cost_scope: CostScope,
}

/// Builds the index of depth `k` with full-graph costs.
pub fn build_lsh_index<T: Scalar>(g: &Graph<T>, k: usize) -> Result<LocalIndex<T>> {
    LocalIndex::build(g, k)
}

/// One-off evaluation that checks `index` against `g` first.
///
/// The check hashes the whole graph; for repeated queries bind a
/// [`LshHeuristic`] once with [`LocalIndex::heuristic`].
pub fn lsh_evaluate<T: Scalar>(
    index: &LocalIndex<T>,
    g: &Graph<T>,
    s: VertexId,
    t: VertexId,
    d: usize,
) -> Result<T> {
    index.check_graph(g)?;
    index.evaluate(s, t, d)
}

impl<T: Scalar> LocalIndex<T> {
    pub fn build(g: &Graph<T>, k: usize) -> Result<Self> {
        Ok(Self::build_with(g, k, CostScope::FullGraph)?.0)
    }

    pub fn build_with(g: &Graph<T>, k: usize, scope: CostScope) -> Result<(Self, LocalBuildStats)> {
        check_build_input(g, k)?;
        let bbox = g.bounding_box()?;
        let (x, xs) = AxisLabels::build_unchecked(g, Axis::X, k, scope, &bbox);
        let (y, ys) = AxisLabels::build_unchecked(g, Axis::Y, k, scope, &bbox);
        let index = Self {
            x,
            y,
            bbox,
            fingerprint: g.fingerprint(),
            cost_scope: scope,
        };
        Ok((index, LocalBuildStats { x: xs, y: ys }))
    }

    pub fn depth(&self) -> usize {
        self.x.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.x.vertex_count()
    }

    pub fn labels(&self, axis: Axis) -> &AxisLabels<T> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    pub fn bounding_box(&self) -> BoundingBox<T> {
        self.bbox
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        self.fingerprint
    }

    pub fn cost_scope(&self) -> CostScope {
        self.cost_scope
    }

    /// Fails with [`Error::StaleIndex`] unless the index was built for `g`.
    pub fn check_graph(&self, g: &Graph<T>) -> Result<()> {
        check_fingerprint(&self.fingerprint, g)
    }

    fn check_query(&self, s: VertexId, t: VertexId, d: usize) -> Result<()> {
        let n = self.vertex_count();
        if s >= n || t >= n {
            return Err(Error::validation(format!(
                "vertex pair ({s}, {t}) out of range 0..{n}"
            )));
        }
        if !(1..=self.depth()).contains(&d) {
            return Err(Error::validation(format!(
                "depth {d} outside 1..={}",
                self.depth()
            )));
        }
        Ok(())
    }

    fn accumulate(&self, s: VertexId, t: VertexId, d: usize) -> Accumulator<T> {
        let mut acc = Accumulator::new();
        self.x.scan(s, t, d, &mut acc);
        self.y.scan(s, t, d, &mut acc);
        acc
    }

    /// Lower bound on `c(s, t)` from the top `d` levels of both trees.
    pub fn evaluate(&self, s: VertexId, t: VertexId, d: usize) -> Result<T> {
        self.check_query(s, t, d)?;
        Ok(self.accumulate(s, t, d).value)
    }

    pub(crate) fn evaluate_unchecked(&self, s: VertexId, t: VertexId, d: usize) -> T {
        self.accumulate(s, t, d).value
    }

    /// Whether some level separates `s` and `t`, and whether that separation
    /// decides the bound.
    pub fn diagnostics(&self, s: VertexId, t: VertexId, d: usize) -> Result<SeparationInfo> {
        self.check_query(s, t, d)?;
        Ok(self.accumulate(s, t, d).info())
    }

    /// Binds the index to `g` (checked once) for use inside A*.
    pub fn heuristic(&self, g: &Graph<T>, d: usize) -> Result<LshHeuristic<'_, T>> {
        self.check_graph(g)?;
        self.check_query(0, 0, d)?;
        Ok(LshHeuristic {
            index: self,
            depth: d,
        })
    }
}

/// A [`LocalIndex`] validated against a graph, evaluated at a fixed depth.
#[derive(Clone, Copy, Debug)]
pub struct LshHeuristic<'a, T> {
    index: &'a LocalIndex<T>,
    depth: usize,
}

impl<T: Scalar> LshHeuristic<'_, T> {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn index(&self) -> &LocalIndex<T> {
        self.index
    }
}

impl<T: Scalar> Heuristic<T> for LshHeuristic<'_, T> {
    fn estimate(&self, v: VertexId, target: VertexId) -> T {
        self.index.evaluate_unchecked(v, target, self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{dijkstra_all, multi_source_dijkstra};

    fn unit_path() -> Graph<f64> {
        Graph::from_edges(
            vec![[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            [(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn three_vertex_path_depth_one() {
        let g = unit_path();
        let labels = build_axis_labels(&g, Axis::X, 1).unwrap();
        // Midline x = 10: vertex 1 sits on it (low side); only edge (1,2) is cut.
        assert_eq!(
            (0..3).map(|v| labels.code(v)).collect::<Vec<_>>(),
            vec![0, 0, 1]
        );
        let to_sep = dijkstra_all(&g, 2).unwrap();
        for (v, &c) in to_sep.iter().enumerate() {
            assert_eq!(labels.costs(v), &[c]);
            assert_eq!(labels.valid_depth(v), 1);
        }
    }

    #[test]
    fn collinear_vertices_have_empty_separator() {
        // All x equal: every vertex is on the low side of the midline.
        let g = Graph::from_edges(
            vec![[5.0, 0.0], [5.0, 1.0], [5.0, 2.0]],
            [(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        let (labels, stats) = AxisLabels::build_with(&g, Axis::X, 1, CostScope::FullGraph).unwrap();
        for v in 0..3 {
            assert_eq!(labels.code(v), 0);
            assert_eq!(labels.costs(v)[0], f64::INFINITY);
        }
        assert_eq!(stats.dijkstra_runs, 0);
    }

    #[test]
    fn depth_and_connectivity_checks() {
        let g = unit_path();
        assert!(matches!(
            build_axis_labels(&g, Axis::X, 0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            build_axis_labels(&g, Axis::X, 25),
            Err(Error::Validation(_))
        ));
        let split =
            Graph::from_edges(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            build_lsh_index(&split, 2),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn two_vertex_index() {
        let g = Graph::from_edges(vec![[0.0, 0.0], [4.0, 2.0]], [(0, 1, 3.0)]).unwrap();
        let idx = build_lsh_index(&g, 1).unwrap();
        assert_eq!(idx.depth(), 1);
        assert_eq!(idx.labels(Axis::X).code(1), 1);
        assert_eq!(idx.labels(Axis::Y).code(1), 1);
        // Vertex 1 is the separator on both axes: bound = c(0, {1}) = 3.
        assert_eq!(idx.evaluate(0, 1, 1).unwrap(), 3.0);
        assert_eq!(idx.evaluate(1, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn stale_graph_rejected() {
        let g = unit_path();
        let idx = build_lsh_index(&g, 2).unwrap();
        let other = Graph::from_edges(
            vec![[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            [(0, 1, 1.0), (1, 2, 2.0)],
        )
        .unwrap();
        assert!(matches!(idx.check_graph(&other), Err(Error::StaleIndex(_))));
        assert!(matches!(
            lsh_evaluate(&idx, &other, 0, 1, 1),
            Err(Error::StaleIndex(_))
        ));
        assert!(idx.heuristic(&other, 1).is_err());
        assert!(lsh_evaluate(&idx, &g, 0, 2, 2).is_ok());
    }

    #[test]
    fn query_validation() {
        let g = unit_path();
        let idx = build_lsh_index(&g, 2).unwrap();
        assert!(matches!(idx.evaluate(0, 1, 0), Err(Error::Validation(_))));
        assert!(matches!(idx.evaluate(0, 1, 3), Err(Error::Validation(_))));
        assert!(matches!(idx.evaluate(0, 7, 1), Err(Error::Validation(_))));
    }

    /// Six vertices in two columns; s and t on opposite sides of x = 5.
    fn two_columns() -> Graph<f64> {
        Graph::from_edges(
            vec![
                [0.0, 0.0],
                [0.0, 4.0],
                [0.0, 8.0],
                [10.0, 0.0],
                [10.0, 4.0],
                [10.0, 8.0],
            ],
            [
                (0, 1, 2.0),
                (1, 2, 2.0),
                (3, 4, 2.0),
                (4, 5, 2.0),
                (0, 3, 7.0),
                (2, 5, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn level_one_separation_uses_sum_bound() {
        let g = two_columns();
        let idx = build_lsh_index(&g, 1).unwrap();
        // Vertical midline x = 5 cuts (0,3) and (2,5): S = {3, 5}.
        let to_s = multi_source_dijkstra(&g, &[3, 5]).unwrap();
        let expected_x = to_s[0] + to_s[3];
        // Horizontal midline y = 4: vertices at y = 4 are low, S = {2, 5}.
        let to_h = multi_source_dijkstra(&g, &[2, 5]).unwrap();
        let expected_y = (to_h[0] - to_h[3]).abs();
        let v = idx.evaluate(0, 3, 1).unwrap();
        assert_eq!(v, expected_x.max(expected_y));
        assert_eq!(expected_x, 5.0);
        let info = idx.diagnostics(0, 3, 1).unwrap();
        assert_eq!(
            info,
            SeparationInfo {
                separated: true,
                first_separation: Some((Axis::X, 1)),
                separator_determined: true
            }
        );
        assert_eq!(idx.diagnostics(4, 4, 1).unwrap(), SeparationInfo::default());
    }
}
