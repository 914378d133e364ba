use super::Vec3;
use crate::error::{Error, Result};

/// Faces with an area below this (m²) are flagged invalid and never traced.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Indexed triangle surface with optional per-vertex RGB colour in `[0, 1]`.
///
/// Every face carries a validity flag. Degenerate faces are invalid from
/// construction; other faces can be invalidated later (body subtraction
/// does this before compacting).
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    colors: Option<Vec<[f32; 3]>>,
    face_valid: Vec<bool>,
}

impl TriangleMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        faces: Vec<[usize; 3]>,
        colors: Option<Vec<[f32; 3]>>,
    ) -> Result<Self> {
        if let Some(i) = vertices
            .iter()
            .position(|v| !v.iter().all(|c| c.is_finite()))
        {
            return Err(Error::invalid("mesh", format!("vertex {i} is not finite")));
        }
        if let Some((fi, _)) = faces
            .iter()
            .enumerate()
            .find(|(_, f)| f.iter().any(|&i| i >= vertices.len()))
        {
            return Err(Error::invalid(
                "mesh",
                format!("face {fi} indexes past {} vertices", vertices.len()),
            ));
        }
        if let Some(colors) = &colors {
            if colors.len() != vertices.len() {
                return Err(Error::invalid(
                    "mesh",
                    format!("{} colours for {} vertices", colors.len(), vertices.len()),
                ));
            }
            if colors.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::invalid("mesh", "colour channel outside [0, 1]"));
            }
        }
        let face_valid = faces
            .iter()
            .map(|f| {
                triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]) >= DEGENERATE_AREA
            })
            .collect();
        Ok(TriangleMesh {
            vertices,
            faces,
            colors,
            face_valid,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn colors(&self) -> Option<&[[f32; 3]]> {
        self.colors.as_deref()
    }

    pub fn face_valid(&self) -> &[bool] {
        &self.face_valid
    }

    pub fn is_face_valid(&self, face: usize) -> bool {
        self.face_valid[face]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn valid_face_count(&self) -> usize {
        self.face_valid.iter().filter(|&&v| v).count()
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalised face normal following the winding order.
    pub fn face_normal(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        triangle_area(&a, &b, &c)
    }

    pub fn face_centroid(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        (a + b + c) / 3.0
    }

    /// Mean of the vertex positions.
    pub fn centroid(&self) -> Vec3 {
        if self.vertices.is_empty() {
            return Vec3::zeros();
        }
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    /// Interpolated vertex colour at barycentric `(u, v)` of `face`, where
    /// `u` weights the second vertex and `v` the third.
    pub fn color_at(&self, face: usize, u: f64, v: f64) -> Option<[f32; 3]> {
        let colors = self.colors.as_ref()?;
        let [a, b, c] = self.faces[face];
        let w = 1.0 - u - v;
        let mut out = [0f32; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let x = w * colors[a][k] as f64 + u * colors[b][k] as f64 + v * colors[c][k] as f64;
            *o = x.clamp(0.0, 1.0) as f32;
        }
        Some(out)
    }

    pub fn mark_invalid(&mut self, face: usize) {
        self.face_valid[face] = false;
    }

    /// Applies `f` to every vertex, keeping topology and colours. Validity
    /// flags are recomputed for degeneracy but faces already marked invalid
    /// stay invalid.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> TriangleMesh {
        let vertices: Vec<Vec3> = self.vertices.iter().map(f).collect();
        let face_valid = self
            .faces
            .iter()
            .zip(&self.face_valid)
            .map(|(fc, &was)| {
                was && triangle_area(&vertices[fc[0]], &vertices[fc[1]], &vertices[fc[2]])
                    >= DEGENERATE_AREA
            })
            .collect();
        TriangleMesh {
            vertices,
            faces: self.faces.clone(),
            colors: self.colors.clone(),
            face_valid,
        }
    }

    pub fn translated(&self, offset: Vec3) -> TriangleMesh {
        self.map_vertices(|v| v + offset)
    }

    /// Drops invalid faces and the vertices no surviving face references.
    pub fn compact(&self) -> TriangleMesh {
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut colors = self.colors.as_ref().map(|_| Vec::new());
        let mut faces = Vec::new();
        for (face, _) in self
            .faces
            .iter()
            .zip(&self.face_valid)
            .filter(|(_, &ok)| ok)
        {
            let mut out = [0usize; 3];
            for (slot, &vi) in out.iter_mut().zip(face) {
                if remap[vi] == usize::MAX {
                    remap[vi] = vertices.len();
                    vertices.push(self.vertices[vi]);
                    if let (Some(dst), Some(src)) = (colors.as_mut(), self.colors.as_ref()) {
                        dst.push(src[vi]);
                    }
                }
                *slot = remap[vi];
            }
            faces.push(out);
        }
        let face_valid = vec![true; faces.len()];
        TriangleMesh {
            vertices,
            faces,
            colors,
            face_valid,
        }
    }

    /// Concatenates two meshes. If only one side carries colours the other
    /// side's vertices are filled with mid grey.
    pub fn merge(&self, other: &TriangleMesh) -> TriangleMesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| f.map(|i| i + offset)));
        let colors = match (&self.colors, &other.colors) {
            (None, None) => None,
            (a, b) => {
                let grey = [0.5f32; 3];
                let mut out = a.clone().unwrap_or_else(|| vec![grey; self.vertices.len()]);
                out.extend(
                    b.clone()
                        .unwrap_or_else(|| vec![grey; other.vertices.len()]),
                );
                Some(out)
            }
        };
        let mut face_valid = self.face_valid.clone();
        face_valid.extend_from_slice(&other.face_valid);
        TriangleMesh {
            vertices,
            faces,
            colors,
            face_valid,
        }
    }
}

fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
