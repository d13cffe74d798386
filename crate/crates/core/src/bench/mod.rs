//! Benchmark harness: distance-binned pair sampling, heuristic quality and
//! search efficiency, separation statistics and report output.

mod report;
mod sampling;

pub use report::{BenchReport, BenchRow, BinSummary, PairRecord, CSV_HEADER};
pub use sampling::{default_bins, sample_pairs, DistanceBin, PairSample, SnapGrid};

use rayon::prelude::*;
use serde::Serialize;

use crate::index::SeparationInfo;
use crate::search::{astar, shortest_distance, Heuristic, NoHeuristic};
use crate::{CostScope, Error, GlobalIndex, Graph, LocalIndex, Result, Scalar, VertexId};

/// Mean of a per-pair metric. Pairs with no path are excluded and counted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    /// `0` when no pair contributes.
    pub mean: f64,
    pub per_pair: Vec<f64>,
    pub excluded: usize,
}

impl MetricSummary {
    fn from_values(values: Vec<Option<f64>>) -> Self {
        let excluded = values.iter().filter(|v| v.is_none()).count();
        let per_pair: Vec<f64> = values.into_iter().flatten().collect();
        Self {
            mean: mean(&per_pair),
            per_pair,
            excluded,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn check_pairs<T: Scalar>(g: &Graph<T>, pairs: &[(VertexId, VertexId)]) -> Result<()> {
    for &(s, t) in pairs {
        g.check_vertex(s)?;
        g.check_vertex(t)?;
    }
    Ok(())
}

/// `h(s, t) / c(s, t)` per pair. Pairs with `s == t` or no path are excluded.
pub fn quality<T, H>(g: &Graph<T>, h: &H, pairs: &[(VertexId, VertexId)]) -> Result<MetricSummary>
where
    T: Scalar,
    H: Heuristic<T> + Sync + ?Sized,
{
    check_pairs(g, pairs)?;
    let values = pairs
        .par_iter()
        .map(|&(s, t)| {
            let c = shortest_distance(g, s, t)?;
            Ok(match c {
                Some(c) if c > T::zero() => Some((h.estimate(s, t) / c).as_f64()),
                _ => None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricSummary::from_values(values))
}

/// Path vertices over settled vertices of A* guided by `h`, per pair.
pub fn efficiency<T, H>(
    g: &Graph<T>,
    h: &H,
    pairs: &[(VertexId, VertexId)],
) -> Result<MetricSummary>
where
    T: Scalar,
    H: Heuristic<T> + Sync + ?Sized,
{
    check_pairs(g, pairs)?;
    let values = pairs
        .par_iter()
        .map(|&(s, t)| {
            Ok(astar(g, s, t, h)?
                .map(|r| r.stats.path_vertex_count as f64 / r.stats.settled_count as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricSummary::from_values(values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationPoint {
    pub depth: usize,
    /// Fraction of pairs separated by some level up to `depth`.
    pub p_separated: f64,
    /// Fraction of pairs whose bound comes from a separating term.
    pub p_determined: f64,
}

/// Separation probabilities of the local index at each requested depth.
pub fn separation_report<T: Scalar>(
    index: &LocalIndex<T>,
    pairs: &[(VertexId, VertexId)],
    depths: &[usize],
) -> Result<Vec<SeparationPoint>> {
    depths
        .iter()
        .map(|&d| {
            let infos = pairs
                .iter()
                .map(|&(s, t)| index.diagnostics(s, t, d))
                .collect::<Result<Vec<_>>>()?;
            let (sep, det) = fractions(&infos);
            Ok(SeparationPoint {
                depth: d,
                p_separated: sep,
                p_determined: det,
            })
        })
        .collect()
}

fn fractions(infos: &[SeparationInfo]) -> (f64, f64) {
    if infos.is_empty() {
        return (0.0, 0.0);
    }
    let n = infos.len() as f64;
    let sep = infos.iter().filter(|i| i.separated).count() as f64;
    let det = infos.iter().filter(|i| i.separator_determined).count() as f64;
    (sep / n, det / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicKind {
    Dijkstra,
    Gsh,
    Lsh,
}

impl HeuristicKind {
    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::Dijkstra => "dijkstra",
            HeuristicKind::Gsh => "gsh",
            HeuristicKind::Lsh => "lsh",
        }
    }
}

impl std::str::FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dijkstra" => Ok(HeuristicKind::Dijkstra),
            "gsh" => Ok(HeuristicKind::Gsh),
            "lsh" => Ok(HeuristicKind::Lsh),
            other => Err(Error::validation(format!("unknown heuristic `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub bins: Vec<DistanceBin>,
    pub heuristics: Vec<HeuristicKind>,
    /// Local index depths; the global index at depth `d` uses `d` lines per
    /// axis, so both see `2d` separators.
    pub depths: Vec<usize>,
    pub pairs_per_bin: usize,
    pub seed: u64,
    /// Keep per-pair records in the report.
    pub keep_raw: bool,
    pub cost_scope: CostScope,
}

impl BenchConfig {
    /// Standard bins for `g`, all three heuristics, depths 1 to 9.
    pub fn standard<T: Scalar>(g: &Graph<T>) -> Result<Self> {
        Ok(Self {
            bins: default_bins(g.bounding_box()?.diagonal().as_f64()),
            heuristics: vec![
                HeuristicKind::Dijkstra,
                HeuristicKind::Gsh,
                HeuristicKind::Lsh,
            ],
            depths: (1..=9).collect(),
            pairs_per_bin: 3000,
            seed: 0,
            keep_raw: false,
            cost_scope: CostScope::FullGraph,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.bins.is_empty() {
            return Err(Error::validation("no distance bins"));
        }
        if self.heuristics.is_empty() {
            return Err(Error::validation("no heuristics selected"));
        }
        if self.pairs_per_bin == 0 {
            return Err(Error::validation("pairs per bin must be at least 1"));
        }
        let indexed = self
            .heuristics
            .iter()
            .any(|&h| h != HeuristicKind::Dijkstra);
        if indexed && self.depths.is_empty() {
            return Err(Error::validation("no depths selected"));
        }
        if let Some(&d) = self
            .depths
            .iter()
            .find(|&&d| !(1..=crate::index::MAX_DEPTH).contains(&d))
        {
            return Err(Error::validation(format!(
                "depth {d} outside 1..={}",
                crate::index::MAX_DEPTH
            )));
        }
        Ok(())
    }
}

fn seed_for_bin(seed: u64, bin: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(bin as u64)
}

/// Per-pair A* run under one heuristic.
fn measure<T, H>(
    g: &Graph<T>,
    h: &H,
    pairs: &[(VertexId, VertexId)],
    costs: &[T],
) -> Result<Vec<(f64, f64)>>
where
    T: Scalar,
    H: Heuristic<T> + Sync,
{
    pairs
        .par_iter()
        .zip(costs)
        .map(|(&(s, t), &c)| {
            let r = astar(g, s, t, h)?.ok_or_else(|| {
                Error::Structural(format!("no path between sampled pair ({s}, {t})"))
            })?;
            let qual = (h.estimate(s, t) / c).as_f64();
            let eff = r.stats.path_vertex_count as f64 / r.stats.settled_count as f64;
            Ok((qual, eff))
        })
        .collect()
}

/// Samples pairs for every bin and measures every heuristic and depth on them.
/// The graph must be connected.
pub fn run_benchmark<T: Scalar>(g: &Graph<T>, config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    if !g.is_connected() {
        return Err(Error::validation(
            "graph is not connected; extract its largest component first",
        ));
    }
    let max_depth = config.depths.iter().copied().max().unwrap_or(0);
    let lsh = if config.heuristics.contains(&HeuristicKind::Lsh) {
        Some(LocalIndex::build_with(g, max_depth, config.cost_scope)?.0)
    } else {
        None
    };
    let gsh: Vec<GlobalIndex<T>> = if config.heuristics.contains(&HeuristicKind::Gsh) {
        config
            .depths
            .iter()
            .map(|&d| GlobalIndex::build(g, d))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut report = BenchReport::default();
    for (b, &bin) in config.bins.iter().enumerate() {
        let sample = sample_pairs(g, bin, config.pairs_per_bin, seed_for_bin(config.seed, b))?;
        let pairs = sample.pairs;
        let costs: Vec<T> = pairs
            .par_iter()
            .map(|&(s, t)| {
                shortest_distance(g, s, t)?.ok_or_else(|| {
                    Error::Structural(format!("no path between sampled pair ({s}, {t})"))
                })
            })
            .collect::<Result<_>>()?;
        report.bins.push(BinSummary {
            bin,
            requested: config.pairs_per_bin,
            sampled: pairs.len(),
            draws: sample.draws,
            dropped_pairs: sample.dropped_unreachable,
            exhausted: sample.exhausted,
        });

        for &kind in &config.heuristics {
            match kind {
                HeuristicKind::Dijkstra => {
                    let m = measure(g, &NoHeuristic, &pairs, &costs)?;
                    let infos = vec![SeparationInfo::default(); pairs.len()];
                    report.push_row(
                        bin,
                        kind,
                        0,
                        &pairs,
                        &costs,
                        &m,
                        &infos,
                        sample.dropped_unreachable,
                        config.keep_raw,
                    );
                }
                HeuristicKind::Lsh => {
                    let index = lsh.as_ref().expect("built above");
                    for &d in &config.depths {
                        let h = index.heuristic(g, d)?;
                        let m = measure(g, &h, &pairs, &costs)?;
                        let infos = pairs
                            .iter()
                            .map(|&(s, t)| index.diagnostics(s, t, d))
                            .collect::<Result<Vec<_>>>()?;
                        report.push_row(
                            bin,
                            kind,
                            d,
                            &pairs,
                            &costs,
                            &m,
                            &infos,
                            sample.dropped_unreachable,
                            config.keep_raw,
                        );
                    }
                }
                HeuristicKind::Gsh => {
                    for (index, &d) in gsh.iter().zip(&config.depths) {
                        let h = index.heuristic(g)?;
                        let m = measure(g, &h, &pairs, &costs)?;
                        let infos: Vec<_> =
                            pairs.iter().map(|&(s, t)| h.diagnostics(s, t)).collect();
                        report.push_row(
                            bin,
                            kind,
                            d,
                            &pairs,
                            &costs,
                            &m,
                            &infos,
                            sample.dropped_unreachable,
                            config.keep_raw,
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic, SyntheticParams};

    #[test]
    fn zero_heuristic_has_zero_quality() {
        let g: Graph<f64> = generate_synthetic(&SyntheticParams::grid(10, 10, 0.0, 2)).unwrap();
        let pairs = vec![(0, 50), (3, 97), (12, 13)];
        let q = quality(&g, &|_: VertexId, _: VertexId| 0.0, &pairs).unwrap();
        assert_eq!(q.mean, 0.0);
        assert_eq!(q.per_pair.len(), 3);
        let e = efficiency(&g, &NoHeuristic, &pairs).unwrap();
        assert!(e.per_pair.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn unreachable_pairs_are_excluded() {
        let g = Graph::from_edges(vec![[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]], [(0, 1, 1.0)]).unwrap();
        let q = quality(&g, &NoHeuristic, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(q.excluded, 1);
        assert_eq!(q.per_pair.len(), 1);
    }

    #[test]
    fn benchmark_rows_cover_config() {
        let g: Graph<f64> = generate_synthetic(&SyntheticParams::grid(20, 20, 0.05, 9)).unwrap();
        let config = BenchConfig {
            bins: vec![
                DistanceBin::new(200.0, 500.0).unwrap(),
                DistanceBin::new(500.0, 1000.0).unwrap(),
            ],
            heuristics: vec![
                HeuristicKind::Dijkstra,
                HeuristicKind::Gsh,
                HeuristicKind::Lsh,
            ],
            depths: vec![1, 3],
            pairs_per_bin: 20,
            seed: 5,
            keep_raw: true,
            cost_scope: CostScope::FullGraph,
        };
        let report = run_benchmark(&g, &config).unwrap();
        assert_eq!(report.rows.len(), 2 * 5);
        for row in &report.rows {
            assert!(row.mean_qual <= 1.0 + 1e-12);
            assert!(row.mean_eff > 0.0 && row.mean_eff <= 1.0);
            if row.heuristic == HeuristicKind::Dijkstra {
                assert_eq!(row.depth, 0);
                assert_eq!(row.mean_qual, 0.0);
            }
            assert_eq!(row.raw.as_ref().unwrap().len(), row.pairs);
        }
        let again = run_benchmark(&g, &config).unwrap();
        assert_eq!(report, again);
    }
}
