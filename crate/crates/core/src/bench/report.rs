use std::io::Write;

use serde::Serialize;

use super::{mean, DistanceBin, HeuristicKind};
use crate::index::SeparationInfo;
use crate::{Error, Result, Scalar, VertexId};

pub const CSV_HEADER: &str =
    "bin_lo_m,bin_hi_m,heuristic,depth,pairs,mean_qual,mean_eff,p_separated,p_determined,dropped_pairs";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub s: VertexId,
    pub t: VertexId,
    pub cost: f64,
    pub quality: f64,
    pub efficiency: f64,
    pub separated: bool,
    pub separator_determined: bool,
}

/// One (bin, heuristic, depth) aggregate. Dijkstra rows use depth 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub bin: DistanceBin,
    pub heuristic: HeuristicKind,
    pub depth: usize,
    pub pairs: usize,
    pub mean_qual: f64,
    pub mean_eff: f64,
    pub p_separated: f64,
    pub p_determined: f64,
    pub dropped_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<Vec<PairRecord>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinSummary {
    pub bin: DistanceBin,
    pub requested: usize,
    pub sampled: usize,
    pub draws: usize,
    pub dropped_pairs: usize,
    /// Fewer than `requested` pairs were found within the draw budget.
    pub exhausted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub bins: Vec<BinSummary>,
    pub rows: Vec<BenchRow>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    bin_lo_m: f64,
    bin_hi_m: f64,
    heuristic: &'a str,
    depth: usize,
    pairs: usize,
    mean_qual: f64,
    mean_eff: f64,
    p_separated: f64,
    p_determined: f64,
    dropped_pairs: usize,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::validation(format!("csv output: {other:?}")),
    }
}

impl BenchReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push_row<T: Scalar>(
        &mut self,
        bin: DistanceBin,
        heuristic: HeuristicKind,
        depth: usize,
        pairs: &[(VertexId, VertexId)],
        costs: &[T],
        measured: &[(f64, f64)],
        infos: &[SeparationInfo],
        dropped_pairs: usize,
        keep_raw: bool,
    ) {
        let quals: Vec<f64> = measured.iter().map(|m| m.0).collect();
        let effs: Vec<f64> = measured.iter().map(|m| m.1).collect();
        let (p_separated, p_determined) = super::fractions(infos);
        let raw = keep_raw.then(|| {
            pairs
                .iter()
                .zip(costs)
                .zip(measured.iter().zip(infos))
                .map(
                    |((&(s, t), c), (&(quality, efficiency), info))| PairRecord {
                        s,
                        t,
                        cost: c.as_f64(),
                        quality,
                        efficiency,
                        separated: info.separated,
                        separator_determined: info.separator_determined,
                    },
                )
                .collect()
        });
        self.rows.push(BenchRow {
            bin,
            heuristic,
            depth,
            pairs: pairs.len(),
            mean_qual: mean(&quals),
            mean_eff: mean(&effs),
            p_separated,
            p_determined,
            dropped_pairs,
            raw,
        });
    }

    pub fn row(&self, bin: usize, heuristic: HeuristicKind, depth: usize) -> Option<&BenchRow> {
        let bin = self.bins.get(bin)?.bin;
        self.rows
            .iter()
            .find(|r| r.bin == bin && r.heuristic == heuristic && r.depth == depth)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for r in &self.rows {
            w.serialize(CsvRow {
                bin_lo_m: r.bin.lo,
                bin_hi_m: r.bin.hi,
                heuristic: r.heuristic.name(),
                depth: r.depth,
                pairs: r.pairs,
                mean_qual: r.mean_qual,
                mean_eff: r.mean_eff,
                p_separated: r.p_separated,
                p_determined: r.p_determined,
                dropped_pairs: r.dropped_pairs,
            })
            .map_err(csv_error)?;
        }
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, sink: W) -> Result<()> {
        serde_json::to_writer_pretty(sink, self).map_err(|e| Error::Io(e.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let mut report = BenchReport::default();
        let bin = DistanceBin {
            lo: 1000.0,
            hi: 5000.0,
        };
        report.push_row(
            bin,
            HeuristicKind::Lsh,
            3,
            &[(0, 1), (2, 3)],
            &[2.0f64, 4.0],
            &[(0.5, 1.0), (1.0, 0.5)],
            &[
                SeparationInfo {
                    separated: true,
                    first_separation: None,
                    separator_determined: false,
                },
                SeparationInfo::default(),
            ],
            7,
            false,
        );
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "1000.0,5000.0,lsh,3,2,0.75,0.75,0.5,0.0,7"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn empty_report_still_has_header() {
        let mut out = Vec::new();
        BenchReport::default().write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn json_omits_raw_unless_kept() {
        let mut report = BenchReport::default();
        let bin = DistanceBin { lo: 1.0, hi: 2.0 };
        report.push_row(
            bin,
            HeuristicKind::Dijkstra,
            0,
            &[(0, 1)],
            &[1.0f64],
            &[(0.0, 0.5)],
            &[SeparationInfo::default()],
            0,
            false,
        );
        let mut out = Vec::new();
        report.write_json(&mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert!(v["rows"][0].get("raw").is_none());
        assert_eq!(v["rows"][0]["heuristic"], "dijkstra");
    }
}
