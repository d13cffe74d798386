//! Distance-binned query pair sampling.
//!
//! `s` is drawn uniformly in the bounding box and `t` uniformly by area in
//! the annulus `[lo, hi]` around `s`; both are snapped to the nearest vertex
//! within the snap radius, and the bin is re-checked after snapping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Graph, Result, Scalar, VertexId};

/// Euclidean distance range in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceBin {
    pub lo: f64,
    pub hi: f64,
}

impl DistanceBin {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::validation(format!(
                "invalid distance bin [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, d: f64) -> bool {
        self.lo <= d && d <= self.hi
    }

    /// Maximum snapping displacement: `min(500 m, lo / 2)`, or `hi / 2` for
    /// bins starting at zero.
    pub fn snap_radius(&self) -> f64 {
        let base = if self.lo > 0.0 { self.lo } else { self.hi };
        (base / 2.0).min(500.0)
    }

    /// Mean distance of a point drawn uniformly by area in the annulus.
    pub fn annulus_mean(&self) -> f64 {
        let (a, b) = (self.lo, self.hi);
        2.0 / 3.0 * (b.powi(3) - a.powi(3)) / (b.powi(2) - a.powi(2))
    }
}

/// The standard bins 1-5, 5-10, 10-20, 20-50 and 50-100 km, dropping bins
/// that start beyond `diagonal` and clipping the last one to it.
pub fn default_bins(diagonal: f64) -> Vec<DistanceBin> {
    [
        (1e3f64, 5e3f64),
        (5e3, 10e3),
        (10e3, 20e3),
        (20e3, 50e3),
        (50e3, 100e3),
    ]
    .into_iter()
    .filter(|&(lo, _)| lo < diagonal)
    .map(|(lo, hi)| DistanceBin {
        lo,
        hi: hi.min(diagonal),
    })
    .collect()
}

/// Uniform bucket grid for nearest-vertex lookups.
pub struct SnapGrid {
    origin: [f64; 2],
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<VertexId>>,
    points: Vec<[f64; 2]>,
}

impl SnapGrid {
    pub fn new<T: Scalar>(g: &Graph<T>) -> Result<Self> {
        let b = g.bounding_box()?;
        let (x0, y0) = (b.x_min.as_f64(), b.y_min.as_f64());
        let (w, h) = ((b.x_max - b.x_min).as_f64(), (b.y_max - b.y_min).as_f64());
        let n = g.vertex_count() as f64;
        let area = (w.max(1.0)) * (h.max(1.0));
        let cell = (area / n).sqrt().max(1e-9) * 2.0;
        let cols = (w / cell) as usize + 1;
        let rows = (h / cell) as usize + 1;
        let points: Vec<[f64; 2]> = g
            .coords()
            .iter()
            .map(|c| [c[0].as_f64(), c[1].as_f64()])
            .collect();
        let mut buckets = vec![Vec::new(); cols * rows];
        for (v, p) in points.iter().enumerate() {
            let (cx, cy) = (((p[0] - x0) / cell) as usize, ((p[1] - y0) / cell) as usize);
            buckets[cy.min(rows - 1) * cols + cx.min(cols - 1)].push(v);
        }
        Ok(Self {
            origin: [x0, y0],
            cell,
            cols,
            rows,
            buckets,
            points,
        })
    }

    /// Closest vertex to `p` within `radius`, smallest id on ties.
    pub fn nearest_within(&self, p: [f64; 2], radius: f64) -> Option<VertexId> {
        let cell_range = |coord: f64, origin: f64, len: usize| {
            let lo = ((coord - radius - origin) / self.cell).floor().max(0.0) as usize;
            let hi = ((coord + radius - origin) / self.cell).floor();
            if hi < 0.0 {
                return None;
            }
            let hi = (hi as usize).min(len - 1);
            (lo <= hi).then_some(lo..=hi)
        };
        let xs = cell_range(p[0], self.origin[0], self.cols)?;
        let ys = cell_range(p[1], self.origin[1], self.rows)?;
        let mut best: Option<(f64, VertexId)> = None;
        for cy in ys {
            for cx in xs.clone() {
                for &v in &self.buckets[cy * self.cols + cx] {
                    let q = self.points[v];
                    let d = (q[0] - p[0]).hypot(q[1] - p[1]);
                    if d <= radius && best.is_none_or(|(bd, bv)| d < bd || (d == bd && v < bv)) {
                        best = Some((d, v));
                    }
                }
            }
        }
        best.map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSample {
    pub pairs: Vec<(VertexId, VertexId)>,
    /// Source draws consumed.
    pub draws: usize,
    /// Candidate pairs rejected because `t` is unreachable from `s`.
    pub dropped_unreachable: usize,
    /// The draw budget ran out before `count` pairs were found.
    pub exhausted: bool,
}

/// Draws up to `count` pairs whose snapped distance lies in `bin`.
///
/// Deterministic in `seed`. After `1000 * count` source draws it gives up
/// and returns what it has with `exhausted` set.
pub fn sample_pairs<T: Scalar>(
    g: &Graph<T>,
    bin: DistanceBin,
    count: usize,
    seed: u64,
) -> Result<PairSample> {
    if count == 0 {
        return Err(Error::validation("pair count must be at least 1"));
    }
    let bin = DistanceBin::new(bin.lo, bin.hi)?;
    let bbox = g.bounding_box()?;
    let diagonal = bbox.diagonal().as_f64();
    if bin.lo >= diagonal {
        return Err(Error::validation(format!(
            "bin [{}, {}] m starts beyond the map diagonal {diagonal:.1} m",
            bin.lo, bin.hi
        )));
    }

    let grid = SnapGrid::new(g)?;
    let (labels, _) = g.component_labels();
    let radius = bin.snap_radius();
    let (x0, y0) = (bbox.x_min.as_f64(), bbox.y_min.as_f64());
    let (x1, y1) = (bbox.x_max.as_f64(), bbox.y_max.as_f64());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = PairSample {
        pairs: Vec::with_capacity(count),
        draws: 0,
        dropped_unreachable: 0,
        exhausted: false,
    };
    let budget = count.saturating_mul(1000);

    while sample.pairs.len() < count {
        if sample.draws >= budget {
            sample.exhausted = true;
            break;
        }
        sample.draws += 1;
        let p = [
            x0 + rng.gen::<f64>() * (x1 - x0),
            y0 + rng.gen::<f64>() * (y1 - y0),
        ];
        // Consume the target draws up front so retries stay aligned.
        let u: f64 = rng.gen();
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        let Some(s) = grid.nearest_within(p, radius) else {
            continue;
        };
        let r = (bin.lo * bin.lo + u * (bin.hi * bin.hi - bin.lo * bin.lo)).sqrt();
        let c = grid.points[s];
        let q = [c[0] + r * angle.cos(), c[1] + r * angle.sin()];
        let Some(t) = grid.nearest_within(q, radius) else {
            continue;
        };
        if s == t || !bin.contains(g.euclidean_distance(s, t)?.as_f64()) {
            continue;
        }
        if labels[s] != labels[t] {
            sample.dropped_unreachable += 1;
            continue;
        }
        sample.pairs.push((s, t));
    }
    Ok(sample)
}
