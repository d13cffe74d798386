//! Fastest-path search on road networks with separator-tree heuristics.
//!
//! The crate builds two families of admissible A* lower bounds from geometric
//! line-cut separators of a plane-embedded road graph:
//!
//! * the local separator heuristic (LSH): one binary tree of vertical lines
//!   and one of horizontal lines, each vertex storing a `k`-bit code and `k`
//!   separator distances per tree;
//! * the global separator heuristic (GSH): `k` equally spaced vertical and
//!   `k` horizontal lines over the whole map.
//!
//! Both plug into [`search::astar`]. The [`bench`] module measures heuristic
//! quality and A* efficiency on distance-binned query pairs.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64` for everyday use.

pub mod bench;
pub mod dimacs;
mod error;
pub mod graph;
pub mod index;
mod scalar;
pub mod search;
pub mod separator;
pub mod synth;

pub use error::{Error, FormatError, Result};
pub use graph::{Axis, BoundingBox, Graph, GraphFingerprint, VertexId};
pub use index::{CostScope, GlobalIndex, LocalIndex, SeparatorIndex};
pub use scalar::Scalar;

pub type RoadGraph = Graph<f64>;
pub type RoadGraph32 = Graph<f32>;
pub type LshIndex = LocalIndex<f64>;
pub type LshIndex32 = LocalIndex<f32>;
pub type GshIndex = GlobalIndex<f64>;
pub type GshIndex32 = GlobalIndex<f32>;
pub type AxisLabels = index::AxisLabels<f64>;
pub type PathResult = search::PathResult<f64>;
