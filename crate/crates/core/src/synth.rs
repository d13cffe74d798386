//! Deterministic synthetic road grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Graph, Result, Scalar};

/// Parameters of a jittered grid road network.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParams {
    pub rows: usize,
    pub cols: usize,
    /// Grid spacing in meters.
    pub cell_size: f64,
    /// Speeds in m/s; each edge draws one uniformly.
    pub speed_classes: Vec<f64>,
    /// Probability that an edge is removed.
    pub drop_prob: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            rows: 100,
            cols: 100,
            cell_size: 100.0,
            // 30, 50, 80 and 110 km/h.
            speed_classes: vec![30.0 / 3.6, 50.0 / 3.6, 80.0 / 3.6, 110.0 / 3.6],
            drop_prob: 0.05,
            seed: 0,
        }
    }
}

impl SyntheticParams {
    pub fn grid(rows: usize, cols: usize, drop_prob: f64, seed: u64) -> Self {
        Self {
            rows,
            cols,
            drop_prob,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::validation(format!(
                "grid must be at least 2x2, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !(self.drop_prob >= 0.0 && self.drop_prob < 0.3) {
            return Err(Error::validation(format!(
                "drop_prob must lie in [0, 0.3), got {}",
                self.drop_prob
            )));
        }
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(Error::validation(format!(
                "cell_size must be positive, got {}",
                self.cell_size
            )));
        }
        if self.speed_classes.is_empty() {
            return Err(Error::validation("speed_classes is empty"));
        }
        if let Some(s) = self
            .speed_classes
            .iter()
            .find(|s| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::validation(format!(
                "speed class {s} is not positive"
            )));
        }
        Ok(())
    }
}

/// Generates a jittered grid road graph restricted to its largest component.
///
/// Vertex `(r, c)` sits at `(c, r) * cell_size` displaced by up to
/// `0.3 * cell_size` per coordinate. Edges join horizontal and vertical grid
/// neighbors; each survives with probability `1 - drop_prob` and costs its
/// Euclidean length divided by a random speed class.
pub fn generate_synthetic<T: Scalar>(params: &SyntheticParams) -> Result<Graph<T>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (rows, cols, cell) = (params.rows, params.cols, params.cell_size);
    let jitter = 0.3 * cell;

    let coords: Vec<[f64; 2]> = (0..rows * cols)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            [
                c as f64 * cell + rng.gen_range(-jitter..=jitter),
                r as f64 * cell + rng.gen_range(-jitter..=jitter),
            ]
        })
        .collect();

    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            let right = (c + 1 < cols).then(|| u + 1);
            let up = (r + 1 < rows).then(|| u + cols);
            for w in [right, up].into_iter().flatten() {
                // Draw both numbers for every candidate so the stream does not
                // depend on which edges get dropped.
                let dropped = rng.gen::<f64>() < params.drop_prob;
                let speed = params.speed_classes[rng.gen_range(0..params.speed_classes.len())];
                if dropped {
                    continue;
                }
                let (a, b) = (coords[u], coords[w]);
                let length = (a[0] - b[0]).hypot(a[1] - b[1]);
                edges.push((u, w, T::from_f64_lossy(length / speed)));
            }
        }
    }

    let coords = coords
        .into_iter()
        .map(|p| [T::from_f64_lossy(p[0]), T::from_f64_lossy(p[1])])
        .collect();
    let g = Graph::from_edges(coords, edges)?;
    Ok(g.largest_connected_component().0)
}
