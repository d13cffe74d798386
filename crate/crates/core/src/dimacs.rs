//! DIMACS shortest-path challenge text formats.
//!
//! `.gr` files carry arcs (`a u v w`), `.co` files carry vertex coordinates
//! (`v id x y`); both use 1-based ids and `c` comment lines. Directed arcs
//! are folded into undirected edges weighted by the cheaper direction.
//!
//! Numbers may be integers or decimals. The writer emits costs with full
//! `f64` precision so written graphs reload unchanged.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Graph, Result, Scalar};

const EARTH_RADIUS_M: f64 = 6_371_008.8;
const COORD_HINT: &str = "c coordinates";

/// How `.co` file units map to planar meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordinateSystem {
    /// Planar coordinates; `units_per_meter` file units make one meter.
    Planar { units_per_meter: f64 },
    /// Longitude/latitude in units of `1 / units_per_degree` degrees,
    /// projected equirectangularly with the mean latitude as reference.
    Geographic { units_per_degree: f64 },
}

impl Default for CoordinateSystem {
    /// The challenge files store microdegrees.
    fn default() -> Self {
        CoordinateSystem::Geographic {
            units_per_degree: 1e6,
        }
    }
}

impl CoordinateSystem {
    fn validate(self) -> Result<Self> {
        let scale = match self {
            CoordinateSystem::Planar { units_per_meter } => units_per_meter,
            CoordinateSystem::Geographic { units_per_degree } => units_per_degree,
        };
        if scale.is_finite() && scale > 0.0 {
            Ok(self)
        } else {
            Err(Error::validation(format!(
                "coordinate scale must be positive, got {scale}"
            )))
        }
    }

    fn project(self, raw: &[[f64; 2]]) -> Vec<[f64; 2]> {
        match self {
            CoordinateSystem::Planar { units_per_meter } => raw
                .iter()
                .map(|p| [p[0] / units_per_meter, p[1] / units_per_meter])
                .collect(),
            CoordinateSystem::Geographic { units_per_degree } => {
                let to_rad = std::f64::consts::PI / 180.0 / units_per_degree;
                let mean_lat = if raw.is_empty() {
                    0.0
                } else {
                    raw.iter().map(|p| p[1]).sum::<f64>() / raw.len() as f64 * to_rad
                };
                let kx = EARTH_RADIUS_M * mean_lat.cos() * to_rad;
                let ky = EARTH_RADIUS_M * to_rad;
                raw.iter().map(|p| [p[0] * kx, p[1] * ky]).collect()
            }
        }
    }
}

/// Loader settings. With `coordinates: None` the loader honours a
/// `c coordinates ...` hint in the `.co` header (as written by
/// [`write_dimacs`]) and otherwise assumes [`CoordinateSystem::default`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub coordinates: Option<CoordinateSystem>,
}

fn fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn parse_num<N: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<N> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {tok:?}")))
}

fn parse_hint(line: &str) -> Option<CoordinateSystem> {
    let rest = line.strip_prefix(COORD_HINT)?;
    let f = fields(rest);
    let scale: f64 = f.get(1)?.parse().ok()?;
    match *f.first()? {
        "planar" => Some(CoordinateSystem::Planar {
            units_per_meter: scale,
        }),
        "geographic" => Some(CoordinateSystem::Geographic {
            units_per_degree: scale,
        }),
        _ => None,
    }
}

struct Arcs {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
}

fn read_gr<R: BufRead>(source: R) -> Result<Arcs> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let f = fields(&line);
        match f.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem line"));
                }
                if f.len() != 4 || f[1] != "sp" {
                    return Err(Error::parse(lineno, "expected `p sp <n> <m>`"));
                }
                header = Some((
                    parse_num(f[2], lineno, "vertex count")?,
                    parse_num(f[3], lineno, "arc count")?,
                ));
            }
            Some("a") => {
                let (n, _) =
                    header.ok_or_else(|| Error::parse(lineno, "arc before problem line"))?;
                if f.len() != 4 {
                    return Err(Error::parse(lineno, "expected `a <u> <v> <w>`"));
                }
                let u: usize = parse_num(f[1], lineno, "vertex id")?;
                let v: usize = parse_num(f[2], lineno, "vertex id")?;
                let w: f64 = parse_num(f[3], lineno, "arc weight")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::Structural(format!(
                        "line {lineno}: arc ({u}, {v}) references a vertex outside 1..={n}"
                    )));
                }
                if u == v {
                    return Err(Error::validation(format!(
                        "line {lineno}: self-loop at vertex {u}"
                    )));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::validation(format!(
                        "line {lineno}: arc weight {w} is not strictly positive"
                    )));
                }
                arcs.push((u - 1, v - 1, w));
            }
            Some(tag) => return Err(Error::parse(lineno, format!("unknown line type {tag:?}"))),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    if arcs.len() != m {
        return Err(Error::Structural(format!(
            "problem line declares {m} arcs, found {}",
            arcs.len()
        )));
    }
    Ok(Arcs { n, arcs })
}

fn read_co<R: BufRead>(source: R) -> Result<(Vec<[f64; 2]>, Option<CoordinateSystem>)> {
    let mut hint = None;
    let mut coords: Option<Vec<Option<[f64; 2]>>> = None;
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let f = fields(&line);
        match f.first().copied() {
            None => {}
            Some("c") => {
                if let Some(h) = parse_hint(line.trim_start()) {
                    hint = Some(h);
                }
            }
            Some("p") => {
                if coords.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem line"));
                }
                if f.len() != 5 || f[1..4] != ["aux", "sp", "co"] {
                    return Err(Error::parse(lineno, "expected `p aux sp co <n>`"));
                }
                let n: usize = parse_num(f[4], lineno, "vertex count")?;
                coords = Some(vec![None; n]);
            }
            Some("v") => {
                let table = coords
                    .as_mut()
                    .ok_or_else(|| Error::parse(lineno, "vertex before problem line"))?;
                if f.len() != 4 {
                    return Err(Error::parse(lineno, "expected `v <id> <x> <y>`"));
                }
                let id: usize = parse_num(f[1], lineno, "vertex id")?;
                let x: f64 = parse_num(f[2], lineno, "coordinate")?;
                let y: f64 = parse_num(f[3], lineno, "coordinate")?;
                if !(x.is_finite() && y.is_finite()) {
                    return Err(Error::validation(format!(
                        "line {lineno}: non-finite coordinate"
                    )));
                }
                let n = table.len();
                let slot = id
                    .checked_sub(1)
                    .and_then(|i| table.get_mut(i))
                    .ok_or_else(|| {
                        Error::Structural(format!("line {lineno}: vertex {id} outside 1..={n}"))
                    })?;
                if slot.replace([x, y]).is_some() {
                    return Err(Error::Structural(format!(
                        "line {lineno}: vertex {id} listed twice"
                    )));
                }
            }
            Some(tag) => return Err(Error::parse(lineno, format!("unknown line type {tag:?}"))),
        }
    }
    let table = coords.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    let coords = table
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| Error::Structural(format!("vertex {} has no coordinates", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((coords, hint))
}

/// Reads a graph from a `.gr` arc stream and a `.co` coordinate stream.
pub fn load_dimacs<T: Scalar, G: BufRead, C: BufRead>(
    gr: G,
    co: C,
    options: &LoadOptions,
) -> Result<Graph<T>> {
    let arcs = read_gr(gr)?;
    let (raw, hint) = read_co(co)?;
    if raw.len() != arcs.n {
        return Err(Error::Structural(format!(
            "coordinate file has {} vertices, arc file has {}",
            raw.len(),
            arcs.n
        )));
    }
    let system = options
        .coordinates
        .or(hint)
        .unwrap_or_default()
        .validate()?;
    let coords = system
        .project(&raw)
        .into_iter()
        .map(|p| [T::from_f64_lossy(p[0]), T::from_f64_lossy(p[1])])
        .collect();
    Graph::from_edges(
        coords,
        arcs.arcs
            .into_iter()
            .map(|(u, v, w)| (u, v, T::from_f64_lossy(w))),
    )
}

/// Reads `<prefix>.gr` and `<prefix>.co`.
pub fn load_dimacs_files<T: Scalar>(
    gr: &Path,
    co: &Path,
    options: &LoadOptions,
) -> Result<Graph<T>> {
    let open = |p: &Path| {
        File::open(p).map(BufReader::new).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", p.display()),
            ))
        })
    };
    load_dimacs(open(gr)?, open(co)?, options)
}

/// Writes `g` as a `.gr`/`.co` pair, each undirected edge as two arcs.
///
/// Coordinates are written in planar units (`units_per_meter` per meter) and
/// the `.co` header records that choice so [`load_dimacs`] picks it up.
pub fn write_dimacs<T: Scalar, G: Write, C: Write>(
    g: &Graph<T>,
    mut gr: G,
    mut co: C,
    units_per_meter: f64,
) -> Result<()> {
    CoordinateSystem::Planar { units_per_meter }.validate()?;
    writeln!(
        gr,
        "c undirected road graph, each edge written in both directions"
    )?;
    writeln!(gr, "p sp {} {}", g.vertex_count(), 2 * g.edge_count())?;
    for (u, w, c) in g.edges() {
        let c = c.as_f64();
        writeln!(gr, "a {} {} {}", u + 1, w + 1, c)?;
        writeln!(gr, "a {} {} {}", w + 1, u + 1, c)?;
    }
    writeln!(co, "{COORD_HINT} planar {units_per_meter}")?;
    writeln!(co, "p aux sp co {}", g.vertex_count())?;
    for (v, p) in g.coords().iter().enumerate() {
        writeln!(
            co,
            "v {} {} {}",
            v + 1,
            p[0].as_f64() * units_per_meter,
            p[1].as_f64() * units_per_meter
        )?;
    }
    gr.flush()?;
    co.flush()?;
    Ok(())
}

pub fn write_dimacs_files<T: Scalar>(
    g: &Graph<T>,
    gr: &Path,
    co: &Path,
    units_per_meter: f64,
) -> Result<()> {
    let create = |p: &Path| {
        File::create(p).map(BufWriter::new).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", p.display()),
            ))
        })
    };
    write_dimacs(g, create(gr)?, create(co)?, units_per_meter)
}
