//! Axis-aligned line-cut separators.
//!
//! A line `coord = p` splits vertices into a low side (`coord <= p`) and a
//! high side (`coord > p`). An edge is cut when its endpoints fall on
//! different sides; the separator is the set of high-side endpoints of cut
//! edges. Removing it leaves no edge between the two sides.

use crate::{Axis, Graph, Scalar, VertexId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisLine<T> {
    pub axis: Axis,
    pub position: T,
}

impl<T: Scalar> AxisLine<T> {
    pub fn new(axis: Axis, position: T) -> Self {
        debug_assert!(position.is_finite());
        Self { axis, position }
    }

    /// `true` when `point` lies strictly on the high side.
    pub fn is_high(&self, point: [T; 2]) -> bool {
        point[self.axis.index()] > self.position
    }

    pub fn vertex_is_high(&self, g: &Graph<T>, v: VertexId) -> bool {
        g.coordinate(v, self.axis) > self.position
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorCut {
    /// Cut edges as `(low endpoint, high endpoint)`, sorted.
    pub cut_edges: Vec<(VertexId, VertexId)>,
    /// High endpoints of the cut edges, sorted and deduplicated.
    pub separator: Vec<VertexId>,
    /// Scope vertices on the low side.
    pub left: Vec<VertexId>,
    /// Scope vertices on the high side, separator excluded.
    pub right: Vec<VertexId>,
}

fn cut_edges_where<T: Scalar>(
    g: &Graph<T>,
    candidates: impl Iterator<Item = VertexId>,
    in_scope: impl Fn(VertexId) -> bool,
    line: &AxisLine<T>,
) -> Vec<(VertexId, VertexId)> {
    let mut cut = Vec::new();
    for u in candidates {
        if line.vertex_is_high(g, u) {
            continue;
        }
        for (w, _) in g.neighbors(u) {
            if line.vertex_is_high(g, w) && in_scope(w) {
                cut.push((u, w));
            }
        }
    }
    cut.sort_unstable();
    cut
}

fn scope_mask(n: usize, scope: &[VertexId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in scope {
        mask[v] = true;
    }
    mask
}

/// Edges with both endpoints in `scope` that `line` cuts.
pub fn cut_edges<T: Scalar>(
    g: &Graph<T>,
    scope: &[VertexId],
    line: &AxisLine<T>,
) -> Vec<(VertexId, VertexId)> {
    let mask = scope_mask(g.vertex_count(), scope);
    let mut seen = vec![false; g.vertex_count()];
    let unique = scope
        .iter()
        .copied()
        .filter(|&v| !std::mem::replace(&mut seen[v], true));
    cut_edges_where(g, unique, |w| mask[w], line)
}

/// Splits `scope` into low side, separator and high side.
pub fn build_cut<T: Scalar>(g: &Graph<T>, scope: &[VertexId], line: &AxisLine<T>) -> SeparatorCut {
    let cut = cut_edges(g, scope, line);
    let separator = high_endpoints(&cut);
    let mut scope: Vec<VertexId> = scope.to_vec();
    scope.sort_unstable();
    scope.dedup();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for v in scope {
        if !line.vertex_is_high(g, v) {
            left.push(v);
        } else if separator.binary_search(&v).is_err() {
            right.push(v);
        }
    }
    SeparatorCut {
        cut_edges: cut,
        separator,
        left,
        right,
    }
}

/// Separator of the full graph for `line`, without materializing the sides.
pub fn line_separator<T: Scalar>(g: &Graph<T>, line: &AxisLine<T>) -> Vec<VertexId> {
    high_endpoints(&cut_edges_where(g, 0..g.vertex_count(), |_| true, line))
}

fn high_endpoints(cut: &[(VertexId, VertexId)]) -> Vec<VertexId> {
    let mut s: Vec<_> = cut.iter().map(|&(_, w)| w).collect();
    s.sort_unstable();
    s.dedup();
    s
}
