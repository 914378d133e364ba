//! Binary little-endian PLY.
//!
//! Meshes are written as `float x y z`, optional `uchar red green blue` and a
//! `vertex_indices` face list. Point clouds add an optional `ushort layer`
//! tag. The reader accepts any scalar property types and skips unknown
//! elements and properties.

use std::fmt::Write as _;

use crate::codec::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, Scalar::F32 | Scalar::F64)
    }
}

#[derive(Debug)]
enum PropKind {
    Scalar(Scalar),
    List { count: Scalar, item: Scalar },
}

#[derive(Debug)]
struct Property {
    name: String,
    kind: PropKind,
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn read(&mut self, ty: Scalar) -> Result<f64> {
        let n = ty.size();
        let b = self
            .data
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::format("ply", "unexpected end of data"))?;
        self.pos += n;
        Ok(match ty {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b.try_into().unwrap()),
        })
    }
}

fn parse_header(bytes: &[u8]) -> Result<(Vec<Element>, usize)> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| Error::format("ply", "missing end_header"))?;
    let body_start = bytes[end..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| end + p + 1)
        .ok_or_else(|| Error::format("ply", "truncated header"))?;
    let header = std::str::from_utf8(&bytes[..end])
        .map_err(|_| Error::format("ply", "header is not UTF-8"))?;
    let mut lines = header.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(Error::format("ply", "missing 'ply' magic"));
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut format_ok = false;
    for line in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["format", "binary_little_endian", _] => format_ok = true,
            ["format", other, _] => {
                return Err(Error::format(
                    "ply",
                    format!("unsupported format '{other}'"),
                ))
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| Error::format("ply", format!("bad element count '{count}'")))?,
                props: Vec::new(),
            }),
            ["property", "list", count, item, name] => {
                let (Some(count), Some(item)) = (Scalar::parse(count), Scalar::parse(item)) else {
                    return Err(Error::format("ply", format!("bad list property '{line}'")));
                };
                if !count.is_integer() {
                    return Err(Error::format("ply", "list count must be an integer type"));
                }
                elements
                    .last_mut()
                    .ok_or_else(|| Error::format("ply", "property before element"))?
                    .props
                    .push(Property {
                        name: name.to_string(),
                        kind: PropKind::List { count, item },
                    });
            }
            ["property", ty, name] => {
                let ty = Scalar::parse(ty)
                    .ok_or_else(|| Error::format("ply", format!("unknown type '{ty}'")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| Error::format("ply", "property before element"))?
                    .props
                    .push(Property {
                        name: name.to_string(),
                        kind: PropKind::Scalar(ty),
                    });
            }
            _ => {}
        }
    }
    if !format_ok {
        return Err(Error::format("ply", "missing format line"));
    }
    Ok((elements, body_start))
}

struct Parsed {
    points: Vec<Vec3>,
    colors: Option<Vec<[f32; 3]>>,
    layers: Option<Vec<u16>>,
    faces: Vec<[usize; 3]>,
}

fn parse(bytes: &[u8]) -> Result<Parsed> {
    let (elements, start) = parse_header(bytes)?;
    let mut r = Reader {
        data: bytes,
        pos: start,
    };
    let mut out = Parsed {
        points: Vec::new(),
        colors: None,
        layers: None,
        faces: Vec::new(),
    };
    for el in &elements {
        let slot = |n: &str| el.props.iter().position(|p| p.name == n);
        match el.name.as_str() {
            "vertex" => {
                let (Some(x), Some(y), Some(z)) = (slot("x"), slot("y"), slot("z")) else {
                    return Err(Error::format("ply", "vertex element lacks x/y/z"));
                };
                let rgb = match (slot("red"), slot("green"), slot("blue")) {
                    (Some(r), Some(g), Some(b)) => Some([r, g, b]),
                    _ => None,
                };
                let layer = slot("layer");
                let mut colors = rgb.map(|_| Vec::with_capacity(el.count));
                let mut layers = layer.map(|_| Vec::with_capacity(el.count));
                let mut row = vec![0f64; el.props.len()];
                for _ in 0..el.count {
                    for (k, p) in el.props.iter().enumerate() {
                        row[k] = match p.kind {
                            PropKind::Scalar(ty) => r.read(ty)?,
                            PropKind::List { count, item } => {
                                let n = r.read(count)? as usize;
                                for _ in 0..n {
                                    r.read(item)?;
                                }
                                0.0
                            }
                        };
                    }
                    out.points.push(Vec3::new(row[x], row[y], row[z]));
                    if let (Some(c), Some(idx)) = (colors.as_mut(), rgb) {
                        c.push(idx.map(|k| match el.props[k].kind {
                            PropKind::Scalar(ty) if ty.is_integer() => (row[k] / 255.0) as f32,
                            _ => row[k] as f32,
                        }));
                    }
                    if let (Some(l), Some(k)) = (layers.as_mut(), layer) {
                        l.push(row[k] as u16);
                    }
                }
                out.colors = colors;
                out.layers = layers;
            }
            "face" => {
                let list = slot("vertex_indices")
                    .or_else(|| slot("vertex_index"))
                    .ok_or_else(|| Error::format("ply", "face element lacks vertex_indices"))?;
                for _ in 0..el.count {
                    for (k, p) in el.props.iter().enumerate() {
                        match p.kind {
                            PropKind::Scalar(ty) => {
                                r.read(ty)?;
                            }
                            PropKind::List { count, item } => {
                                let n = r.read(count)? as usize;
                                let mut idx = Vec::with_capacity(n);
                                for _ in 0..n {
                                    let i = r.read(item)?;
                                    if i < 0.0 {
                                        return Err(Error::format("ply", "negative vertex index"));
                                    }
                                    idx.push(i as usize);
                                }
                                if k == list {
                                    if n < 3 {
                                        return Err(Error::format(
                                            "ply",
                                            "face with fewer than 3 vertices",
                                        ));
                                    }
                                    for j in 1..n - 1 {
                                        out.faces.push([idx[0], idx[j], idx[j + 1]]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            _ => {
                for _ in 0..el.count {
                    for p in &el.props {
                        match p.kind {
                            PropKind::Scalar(ty) => {
                                r.read(ty)?;
                            }
                            PropKind::List { count, item } => {
                                let n = r.read(count)? as usize;
                                for _ in 0..n {
                                    r.read(item)?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn parse_ply_mesh(bytes: &[u8]) -> Result<TriangleMesh> {
    let p = parse(bytes)?;
    TriangleMesh::new(p.points, p.faces, p.colors).map_err(|e| Error::format("ply", e.to_string()))
}

pub fn parse_ply_cloud(bytes: &[u8]) -> Result<ColoredPointCloud> {
    let p = parse(bytes)?;
    if p.points.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(Error::format("ply", "non-finite point"));
    }
    Ok(ColoredPointCloud {
        points: p.points,
        colors: p.colors,
        layer_ids: p.layers,
    })
}

fn quantise(c: f32) -> u8 {
    (c.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn header(vertices: usize, colors: bool, layer: bool, faces: Option<usize>) -> String {
    let mut h = String::from("ply\nformat binary_little_endian 1.0\n");
    writeln!(h, "element vertex {vertices}").unwrap();
    h.push_str("property float x\nproperty float y\nproperty float z\n");
    if colors {
        h.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    if layer {
        h.push_str("property ushort layer\n");
    }
    if let Some(f) = faces {
        writeln!(h, "element face {f}").unwrap();
        h.push_str("property list uchar int vertex_indices\n");
    }
    h.push_str("end_header\n");
    h
}

fn push_vertex(out: &mut Vec<u8>, p: &Vec3, color: Option<[f32; 3]>) {
    for c in [p.x, p.y, p.z] {
        out.extend_from_slice(&(c as f32).to_le_bytes());
    }
    if let Some(c) = color {
        out.extend(c.map(quantise));
    }
}

/// Writes the mesh's vertices and valid faces.
pub fn write_ply_mesh(mesh: &TriangleMesh) -> Vec<u8> {
    let colors = mesh.colors();
    let faces: Vec<_> = mesh
        .faces()
        .iter()
        .zip(mesh.face_valid())
        .filter(|(_, &ok)| ok)
        .map(|(f, _)| f)
        .collect();
    let mut out = header(
        mesh.vertices().len(),
        colors.is_some(),
        false,
        Some(faces.len()),
    )
    .into_bytes();
    for (i, p) in mesh.vertices().iter().enumerate() {
        push_vertex(&mut out, p, colors.map(|c| c[i]));
    }
    for f in faces {
        out.push(3);
        for &i in f {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

pub fn write_ply_cloud(cloud: &ColoredPointCloud) -> Vec<u8> {
    let colors = cloud.colors.as_deref();
    let layers = cloud.layer_ids.as_deref();
    let mut out = header(cloud.len(), colors.is_some(), layers.is_some(), None).into_bytes();
    for (i, p) in cloud.points.iter().enumerate() {
        push_vertex(&mut out, p, colors.map(|c| c[i]));
        if let Some(l) = layers {
            out.extend_from_slice(&l[i].to_le_bytes());
        }
    }
    out
}
