//! Separator heuristics: the hierarchical local index and the flat global
//! baseline, plus their on-disk format.
//!
//! Both evaluate the separator bound per separator `S`:
//!
//! * `c(s,S) + c(t,S)` when `S` separates `s` and `t`,
//! * `|c(s,S) - c(t,S)|` otherwise,
//!
//! and return the maximum over all separators considered. Separators with no
//! vertices store `∞` for every vertex and never contribute.

mod format;
mod global;
mod local;

pub use format::{load_index, FORMAT_VERSION, MAGIC};
pub use global::{build_gsh_index, GlobalIndex, GshHeuristic};
pub use local::{
    build_axis_labels, build_lsh_index, lsh_evaluate, AxisBuildStats, AxisLabels, LevelStats,
    LocalBuildStats, LocalIndex, LshHeuristic, MAX_DEPTH,
};

use crate::{Error, Graph, GraphFingerprint, Result, Scalar};

/// Graph on which separator distances are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CostScope {
    /// Distances in the whole graph; every bound is admissible.
    #[default]
    FullGraph,
    /// Distances and cuts confined to each tree node's strip. Kept for
    /// comparison; admissibility is not guaranteed.
    Subgraph,
}

/// Outcome of the separation analysis for one query pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SeparationInfo {
    /// Some separator with finite costs lies between `s` and `t`.
    pub separated: bool,
    /// Axis and 1-based level (tree depth, or line number for the global
    /// index) of the first separating separator.
    pub first_separation: Option<(crate::Axis, usize)>,
    /// The overall bound is attained by a separating term (ties count).
    pub separator_determined: bool,
}

/// Either kind of index, as stored in a `SEPH` file.
#[derive(Clone, Debug, PartialEq)]
pub enum SeparatorIndex<T> {
    Local(LocalIndex<T>),
    Global(GlobalIndex<T>),
}

impl<T: Scalar> SeparatorIndex<T> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SeparatorIndex::Local(_) => "lsh",
            SeparatorIndex::Global(_) => "gsh",
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SeparatorIndex::Local(i) => i.depth(),
            SeparatorIndex::Global(i) => i.depth(),
        }
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        match self {
            SeparatorIndex::Local(i) => i.fingerprint(),
            SeparatorIndex::Global(i) => i.fingerprint(),
        }
    }

    pub fn save<W: std::io::Write>(&self, sink: W) -> Result<()> {
        match self {
            SeparatorIndex::Local(i) => i.save(sink),
            SeparatorIndex::Global(i) => i.save(sink),
        }
    }

    pub fn to_debug_json(&self) -> serde_json::Value {
        match self {
            SeparatorIndex::Local(i) => i.to_debug_json(),
            SeparatorIndex::Global(i) => i.to_debug_json(),
        }
    }
}

pub(crate) fn check_fingerprint<T: Scalar>(
    expected: &GraphFingerprint,
    g: &Graph<T>,
) -> Result<()> {
    let actual = g.fingerprint();
    if actual == *expected {
        Ok(())
    } else {
        Err(Error::StaleIndex(format!(
            "index built for {} vertices / {} edges (checksum {:#010x}), graph has {} / {} ({:#010x})",
            expected.vertex_count,
            expected.edge_count,
            expected.checksum,
            actual.vertex_count,
            actual.edge_count,
            actual.checksum
        )))
    }
}

/// Both endpoints finite; the bound of one separator.
#[inline]
pub(crate) fn finite_pair<T: Scalar>(a: T, b: T) -> bool {
    a.is_finite() && b.is_finite()
}
