//! `SEPH` index files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      4  b"SEPH"
//! version    u16
//! kind       u8   1 = local (tree), 2 = global (flat)
//! flags      u8   bit 0: subgraph cost scope
//! vertices   u64
//! edges      u64
//! checksum   u32  graph checksum, see GraphFingerprint
//! k          u16
//! bbox       4 x f64  x_min x_max y_min y_max
//! -- local: for the x axis, then the y axis --
//! codes      n x ceil(k/8) bytes, level 1 in the lowest bit of the first byte
//! depth      n x u8   populated levels per vertex
//! costs      n x k f64, +inf for an empty separator
//! -- global --
//! lines      k f64 vertical positions, then k f64 horizontal positions
//! costs      n x 2k f64, x lines first
//! --
//! crc32      u32 over every preceding byte
//! ```
//!
//! Costs are written as `f64` whatever the in-memory scalar.

use std::io::{Read, Write};

use serde_json::{json, Value};

use super::local::MAX_DEPTH;
use super::{AxisLabels, CostScope, GlobalIndex, LocalIndex, SeparatorIndex};
use crate::{Axis, BoundingBox, FormatError, GraphFingerprint, Result, Scalar};

pub const MAGIC: [u8; 4] = *b"SEPH";
pub const FORMAT_VERSION: u16 = 1;

const KIND_LOCAL: u8 = 1;
const KIND_GLOBAL: u8 = 2;
const FLAG_SUBGRAPH: u8 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 8 + 8 + 4 + 2 + 4 * 8;

struct Header<T> {
    kind: u8,
    flags: u8,
    fingerprint: GraphFingerprint,
    k: usize,
    bbox: BoundingBox<T>,
}

fn write_header<T: Scalar>(buf: &mut Vec<u8>, h: &Header<T>) {
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.push(h.kind);
    buf.push(h.flags);
    buf.extend_from_slice(&h.fingerprint.vertex_count.to_le_bytes());
    buf.extend_from_slice(&h.fingerprint.edge_count.to_le_bytes());
    buf.extend_from_slice(&h.fingerprint.checksum.to_le_bytes());
    buf.extend_from_slice(&(h.k as u16).to_le_bytes());
    for v in [h.bbox.x_min, h.bbox.x_max, h.bbox.y_min, h.bbox.y_max] {
        put_f64(buf, v);
    }
}

fn put_f64<T: Scalar>(buf: &mut Vec<u8>, v: T) {
    buf.extend_from_slice(&v.as_f64().to_le_bytes());
}

fn finish<W: Write>(mut buf: Vec<u8>, mut sink: W) -> Result<()> {
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.pos;
        if len > available {
            return Err(FormatError::Truncated {
                needed: len,
                available,
            });
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn costs<T: Scalar>(&mut self, count: usize) -> Result<Vec<T>, FormatError> {
        let raw = self.take(count.checked_mul(8).ok_or_else(|| overflow("cost table"))?)?;
        raw.chunks_exact(8)
            .map(|c| {
                let v = f64::from_le_bytes(c.try_into().unwrap());
                if v >= 0.0 {
                    Ok(T::from_f64_lossy(v))
                } else {
                    Err(FormatError::Malformed(format!(
                        "cost {v} is negative or NaN"
                    )))
                }
            })
            .collect()
    }
}

fn overflow(what: &str) -> FormatError {
    FormatError::Malformed(format!("{what} size overflows"))
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

/// Checks magic, version, kind and CRC, and decodes the common header.
fn open(bytes: &[u8]) -> Result<(Header<f64>, Reader<'_>), FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.array()?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let kind = r.u8()?;
    if kind != KIND_LOCAL && kind != KIND_GLOBAL {
        return Err(FormatError::UnknownKind(kind));
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(FormatError::Truncated {
            needed: HEADER_LEN + 4,
            available: bytes.len(),
        });
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }
    let mut r = Reader {
        bytes: &bytes[..body_end],
        pos: r.pos,
    };

    let flags = r.u8()?;
    if flags & !FLAG_SUBGRAPH != 0 {
        return Err(malformed(format!("unknown flags {flags:#04x}")));
    }
    let fingerprint = GraphFingerprint {
        vertex_count: r.u64()?,
        edge_count: r.u64()?,
        checksum: r.u32()?,
    };
    let k = r.u16()? as usize;
    let bbox = BoundingBox {
        x_min: r.f64()?,
        x_max: r.f64()?,
        y_min: r.f64()?,
        y_max: r.f64()?,
    };
    if k == 0 {
        return Err(malformed("depth is zero"));
    }
    Ok((
        Header {
            kind,
            flags,
            fingerprint,
            k,
            bbox,
        },
        r,
    ))
}

fn convert_bbox<T: Scalar>(b: BoundingBox<f64>) -> BoundingBox<T> {
    BoundingBox {
        x_min: T::from_f64_lossy(b.x_min),
        x_max: T::from_f64_lossy(b.x_max),
        y_min: T::from_f64_lossy(b.y_min),
        y_max: T::from_f64_lossy(b.y_max),
    }
}

fn vertex_count(h: &Header<f64>) -> Result<usize, FormatError> {
    usize::try_from(h.fingerprint.vertex_count).map_err(|_| overflow("vertex count"))
}

fn code_bytes(k: usize) -> usize {
    k.div_ceil(8)
}

fn write_labels<T: Scalar>(buf: &mut Vec<u8>, labels: &AxisLabels<T>) {
    let width = code_bytes(labels.depth);
    for &code in &labels.codes {
        buf.extend_from_slice(&code.to_le_bytes()[..width]);
    }
    buf.extend_from_slice(&labels.valid_depth);
    for &c in &labels.costs {
        put_f64(buf, c);
    }
}

fn read_labels<T: Scalar>(
    r: &mut Reader<'_>,
    axis: Axis,
    n: usize,
    k: usize,
) -> Result<AxisLabels<T>, FormatError> {
    let width = code_bytes(k);
    let raw = r.take(n.checked_mul(width).ok_or_else(|| overflow("code table"))?)?;
    let codes: Vec<u32> = raw
        .chunks_exact(width)
        .map(|c| {
            let mut b = [0u8; 4];
            b[..width].copy_from_slice(c);
            u32::from_le_bytes(b)
        })
        .collect();
    if codes.iter().any(|&c| k < 32 && c >> k != 0) {
        return Err(malformed("code has bits beyond the tree depth"));
    }
    let valid_depth = r.take(n)?.to_vec();
    if valid_depth.iter().any(|&d| d as usize > k) {
        return Err(malformed("populated depth exceeds tree depth"));
    }
    let costs = r.costs(n.checked_mul(k).ok_or_else(|| overflow("cost table"))?)?;
    Ok(AxisLabels {
        axis,
        depth: k,
        codes,
        valid_depth,
        costs,
    })
}

impl<T: Scalar> LocalIndex<T> {
    pub fn save<W: Write>(&self, sink: W) -> Result<()> {
        let mut buf = Vec::new();
        let flags = if self.cost_scope == CostScope::Subgraph {
            FLAG_SUBGRAPH
        } else {
            0
        };
        write_header(
            &mut buf,
            &Header {
                kind: KIND_LOCAL,
                flags,
                fingerprint: self.fingerprint,
                k: self.depth(),
                bbox: self.bbox,
            },
        );
        write_labels(&mut buf, &self.x);
        write_labels(&mut buf, &self.y);
        finish(buf, sink)
    }

    pub fn load<R: Read>(source: R) -> Result<Self> {
        match load_index(source)? {
            SeparatorIndex::Local(i) => Ok(i),
            SeparatorIndex::Global(_) => Err(FormatError::WrongKind {
                expected: "local",
                found: "global",
            }
            .into()),
        }
    }

    pub fn to_debug_json(&self) -> Value {
        let axis = |l: &AxisLabels<T>| {
            let codes: Vec<String> = l
                .codes
                .iter()
                .map(|&c| {
                    (0..l.depth)
                        .map(|i| if c >> i & 1 == 1 { '1' } else { '0' })
                        .collect()
                })
                .collect();
            let costs: Vec<Value> = (0..l.vertex_count())
                .map(|v| cost_row(l.costs(v)))
                .collect();
            json!({ "codes": codes, "valid_depth": l.valid_depth, "costs": costs })
        };
        json!({
            "kind": "lsh",
            "depth": self.depth(),
            "cost_scope": match self.cost_scope { CostScope::FullGraph => "full", CostScope::Subgraph => "subgraph" },
            "fingerprint": fingerprint_json(&self.fingerprint),
            "x": axis(&self.x),
            "y": axis(&self.y),
        })
    }
}

impl<T: Scalar> GlobalIndex<T> {
    pub fn save<W: Write>(&self, sink: W) -> Result<()> {
        let mut buf = Vec::new();
        write_header(
            &mut buf,
            &Header {
                kind: KIND_GLOBAL,
                flags: 0,
                fingerprint: self.fingerprint,
                k: self.depth,
                bbox: self.bbox,
            },
        );
        for &p in self.lines_x.iter().chain(&self.lines_y) {
            put_f64(&mut buf, p);
        }
        for &c in &self.costs {
            put_f64(&mut buf, c);
        }
        finish(buf, sink)
    }

    pub fn load<R: Read>(source: R) -> Result<Self> {
        match load_index(source)? {
            SeparatorIndex::Global(i) => Ok(i),
            SeparatorIndex::Local(_) => Err(FormatError::WrongKind {
                expected: "global",
                found: "local",
            }
            .into()),
        }
    }

    pub fn to_debug_json(&self) -> Value {
        let costs: Vec<Value> = (0..self.vertex_count())
            .map(|v| cost_row(self.costs(v)))
            .collect();
        json!({
            "kind": "gsh",
            "depth": self.depth,
            "fingerprint": fingerprint_json(&self.fingerprint),
            "lines": {
                "x": self.lines_x.iter().map(|p| p.as_f64()).collect::<Vec<_>>(),
                "y": self.lines_y.iter().map(|p| p.as_f64()).collect::<Vec<_>>(),
            },
            "costs": costs,
        })
    }
}

fn cost_row<T: Scalar>(costs: &[T]) -> Value {
    Value::Array(
        costs
            .iter()
            .map(|c| {
                if c.is_infinite() {
                    json!("inf")
                } else {
                    json!(c.as_f64())
                }
            })
            .collect(),
    )
}

fn fingerprint_json(f: &GraphFingerprint) -> Value {
    json!({ "vertices": f.vertex_count, "edges": f.edge_count, "checksum": f.checksum })
}

/// Reads an index of either kind. Never returns a partially decoded index.
pub fn load_index<T: Scalar, R: Read>(mut source: R) -> Result<SeparatorIndex<T>> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    Ok(decode(&bytes)?)
}

fn decode<T: Scalar>(bytes: &[u8]) -> Result<SeparatorIndex<T>, FormatError> {
    let (header, mut r) = open(bytes)?;
    let n = vertex_count(&header)?;
    let k = header.k;
    let bbox = convert_bbox(header.bbox);
    let index = match header.kind {
        KIND_LOCAL => {
            if k > MAX_DEPTH {
                return Err(malformed(format!("tree depth {k} exceeds {MAX_DEPTH}")));
            }
            let x = read_labels(&mut r, Axis::X, n, k)?;
            let y = read_labels(&mut r, Axis::Y, n, k)?;
            let cost_scope = if header.flags & FLAG_SUBGRAPH != 0 {
                CostScope::Subgraph
            } else {
                CostScope::FullGraph
            };
            SeparatorIndex::Local(LocalIndex {
                x,
                y,
                bbox,
                fingerprint: header.fingerprint,
                cost_scope,
            })
        }
        _ => {
            if header.flags != 0 {
                return Err(malformed("flags set on a global index"));
            }
            let mut positions = || -> Result<Vec<T>, FormatError> {
                (0..k).map(|_| Ok(T::from_f64_lossy(r.f64()?))).collect()
            };
            let lines_x = positions()?;
            let lines_y = positions()?;
            if lines_x.iter().chain(&lines_y).any(|p| !p.is_finite()) {
                return Err(malformed("non-finite line position"));
            }
            let width = 2 * k;
            let costs = r.costs(n.checked_mul(width).ok_or_else(|| overflow("cost table"))?)?;
            SeparatorIndex::Global(GlobalIndex {
                depth: k,
                lines_x,
                lines_y,
                costs,
                bbox,
                fingerprint: header.fingerprint,
            })
        }
    };
    let rest = r.bytes.len() - r.pos;
    if rest != 0 {
        return Err(FormatError::TrailingBytes(rest));
    }
    Ok(index)
}
