//! Flat grid of equally spaced separator lines.

use rayon::prelude::*;

use super::local::Accumulator;
use super::{check_fingerprint, finite_pair, SeparationInfo};
use crate::search::{search_from, Heuristic};
use crate::separator::{line_separator, AxisLine};
use crate::{Axis, BoundingBox, Error, Graph, GraphFingerprint, Result, Scalar, VertexId};

/// `k` vertical and `k` horizontal lines splitting the bounding box into
/// `k + 1` equal strips per axis, with every vertex's distance to each
/// line's separator.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalIndex<T> {
    pub(crate) depth: usize,
    pub(crate) lines_x: Vec<T>,
    pub(crate) lines_y: Vec<T>,
    /// Row-major `vertex_count x 2k`; x lines first.
    pub(crate) costs: Vec<T>,
    pub(crate) bbox: BoundingBox<T>,
    pub(crate) fingerprint: GraphFingerprint,
}

pub fn build_gsh_index<T: Scalar>(g: &Graph<T>, k: usize) -> Result<GlobalIndex<T>> {
    GlobalIndex::build(g, k)
}

/// `j`-th of `k` interior positions equally spaced on `[lo, hi]`.
/// For `k = 1` this is exactly `(lo + hi) / 2`.
fn spaced<T: Scalar>(lo: T, hi: T, j: usize, k: usize) -> T {
    let parts = T::from_usize(k + 1).unwrap();
    let jt = T::from_usize(j).unwrap();
    (lo * (parts - jt) + hi * jt) / parts
}

impl<T: Scalar> GlobalIndex<T> {
    pub fn build(g: &Graph<T>, k: usize) -> Result<Self> {
        Ok(Self::build_with_stats(g, k)?.0)
    }

    /// Also returns the separator size of every line, x lines first.
    pub fn build_with_stats(g: &Graph<T>, k: usize) -> Result<(Self, Vec<usize>)> {
        if !(1..=u16::MAX as usize).contains(&k) {
            return Err(Error::validation(format!(
                "separator count per axis must lie in 1..=65535, got {k}"
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
        let bbox = g.bounding_box()?;
        let positions = |axis| {
            let (lo, hi) = bbox.extent(axis);
            (1..=k).map(|j| spaced(lo, hi, j, k)).collect::<Vec<T>>()
        };
        let (lines_x, lines_y) = (positions(Axis::X), positions(Axis::Y));

        let lines: Vec<AxisLine<T>> = lines_x
            .iter()
            .map(|&p| AxisLine::new(Axis::X, p))
            .chain(lines_y.iter().map(|&p| AxisLine::new(Axis::Y, p)))
            .collect();
        let columns: Vec<(Vec<T>, usize)> = lines
            .par_iter()
            .map(|line| {
                let separator = line_separator(g, line);
                if separator.is_empty() {
                    (vec![T::infinity(); g.vertex_count()], 0)
                } else {
                    (search_from(g, &separator, None).distances, separator.len())
                }
            })
            .collect();

        let n = g.vertex_count();
        let width = 2 * k;
        let mut costs = vec![T::infinity(); n * width];
        for (j, (column, _)) in columns.iter().enumerate() {
            for v in 0..n {
                costs[v * width + j] = column[v];
            }
        }
        let sizes = columns.into_iter().map(|(_, s)| s).collect();
        Ok((
            Self {
                depth: k,
                lines_x,
                lines_y,
                costs,
                bbox,
                fingerprint: g.fingerprint(),
            },
            sizes,
        ))
    }

    /// Lines per axis.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.costs.len() / (2 * self.depth)
    }

    pub fn lines(&self) -> Vec<AxisLine<T>> {
        self.lines_x
            .iter()
            .map(|&p| AxisLine::new(Axis::X, p))
            .chain(self.lines_y.iter().map(|&p| AxisLine::new(Axis::Y, p)))
            .collect()
    }

    pub fn costs(&self, v: VertexId) -> &[T] {
        let w = 2 * self.depth;
        &self.costs[v * w..(v + 1) * w]
    }

    pub fn bounding_box(&self) -> BoundingBox<T> {
        self.bbox
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        self.fingerprint
    }

    pub fn check_graph(&self, g: &Graph<T>) -> Result<()> {
        check_fingerprint(&self.fingerprint, g)
    }

    fn check_pair(&self, s: VertexId, t: VertexId) -> Result<()> {
        let n = self.vertex_count();
        if s >= n || t >= n {
            return Err(Error::validation(format!(
                "vertex pair ({s}, {t}) out of range 0..{n}"
            )));
        }
        Ok(())
    }

    /// The side of a line is decided from coordinates, so evaluation needs
    /// the graph's embedding.
    fn accumulate(&self, g: &Graph<T>, s: VertexId, t: VertexId) -> Accumulator<T> {
        let (cs, ct) = (self.costs(s), self.costs(t));
        let (ps, pt) = (g.coord(s), g.coord(t));
        let mut acc = Accumulator::<T>::new();
        let k = self.depth;
        for (axis, positions, offset) in [(Axis::X, &self.lines_x, 0), (Axis::Y, &self.lines_y, k)]
        {
            let i = axis.index();
            for (j, &p) in positions.iter().enumerate() {
                let (a, b) = (cs[offset + j], ct[offset + j]);
                if !finite_pair(a, b) {
                    continue;
                }
                if (ps[i] > p) != (pt[i] > p) {
                    let sum = a + b;
                    acc.value = acc.value.max(sum);
                    acc.best_sum = Some(acc.best_sum.map_or(sum, |m| m.max(sum)));
                    if acc.first.is_none() {
                        acc.first = Some((axis, j + 1));
                    }
                } else {
                    acc.value = acc.value.max((a - b).abs());
                }
            }
        }
        acc
    }

    /// Lower bound on `c(s, t)`; `g` must be the graph the index was built for.
    pub fn evaluate(&self, g: &Graph<T>, s: VertexId, t: VertexId) -> Result<T> {
        self.check_graph(g)?;
        self.check_pair(s, t)?;
        Ok(self.accumulate(g, s, t).value)
    }

    pub fn diagnostics(&self, g: &Graph<T>, s: VertexId, t: VertexId) -> Result<SeparationInfo> {
        self.check_graph(g)?;
        self.check_pair(s, t)?;
        Ok(self.accumulate(g, s, t).info())
    }

    pub fn heuristic<'a>(&'a self, g: &'a Graph<T>) -> Result<GshHeuristic<'a, T>> {
        self.check_graph(g)?;
        Ok(GshHeuristic {
            index: self,
            graph: g,
        })
    }
}

/// A [`GlobalIndex`] bound to the graph it was built for.
#[derive(Clone, Copy, Debug)]
pub struct GshHeuristic<'a, T> {
    index: &'a GlobalIndex<T>,
    graph: &'a Graph<T>,
}

impl<T: Scalar> GshHeuristic<'_, T> {
    pub fn evaluate(&self, s: VertexId, t: VertexId) -> T {
        self.index.accumulate(self.graph, s, t).value
    }

    pub fn diagnostics(&self, s: VertexId, t: VertexId) -> SeparationInfo {
        self.index.accumulate(self.graph, s, t).info()
    }
}

impl<T: Scalar> Heuristic<T> for GshHeuristic<'_, T> {
    fn estimate(&self, v: VertexId, target: VertexId) -> T {
        self.evaluate(v, target)
    }
}
