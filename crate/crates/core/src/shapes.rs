//! Procedural fixture meshes: spheres, boxes, planes and a torus.
//!
//! All closed shapes are watertight with outward winding.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::{TriangleMesh, Vec3};

pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) / 2.0).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let verts = verts.into_iter().map(|v| v * radius).collect();
    build(verts, faces, |_| Vec3::zeros())
}

/// Latitude/longitude sphere about the origin with poles on ±y. `stacks`
/// latitude bands (an even count puts an edge loop on the equator).
pub fn uv_sphere(radius: f64, stacks: usize, slices: usize) -> TriangleMesh {
    let (verts, faces) = lat_long(radius, stacks, slices, stacks);
    build(verts, faces, |_| Vec3::zeros())
}

/// Open upper half (`y >= 0`) of a uv sphere: `stacks` bands from the pole to
/// the equator rim.
pub fn hemisphere(radius: f64, stacks: usize, slices: usize) -> TriangleMesh {
    let (verts, faces) = lat_long(radius, 2 * stacks, slices, stacks);
    build(verts, faces, |_| Vec3::zeros())
}

fn lat_long(
    radius: f64,
    stacks: usize,
    slices: usize,
    keep_stacks: usize,
) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    assert!(stacks >= 2 && slices >= 3);
    let mut verts = vec![Vec3::new(0.0, radius, 0.0)];
    let rings = keep_stacks.min(stacks - 1);
    for i in 1..=rings {
        let theta = PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let phi = 2.0 * PI * j as f64 / slices as f64;
            verts.push(
                radius
                    * Vec3::new(
                        theta.sin() * phi.cos(),
                        theta.cos(),
                        theta.sin() * phi.sin(),
                    ),
            );
        }
    }
    let ring = |i: usize, j: usize| 1 + (i - 1) * slices + j % slices;
    let mut faces = Vec::new();
    for j in 0..slices {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..rings {
        for j in 0..slices {
            faces.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            faces.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    if keep_stacks >= stacks {
        verts.push(Vec3::new(0.0, -radius, 0.0));
        let s = verts.len() - 1;
        for j in 0..slices {
            faces.push([s, ring(rings, j + 1), ring(rings, j)]);
        }
    }
    (verts, faces)
}

/// Axis-aligned cube of edge `size` centred on the origin, two triangles per
/// side split along a diagonal.
pub fn cube(size: f64) -> TriangleMesh {
    cuboid(Vec3::repeat(size))
}

pub fn cuboid(extent: Vec3) -> TriangleMesh {
    let h = extent / 2.0;
    let verts: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -h.x } else { h.x },
                if i & 2 == 0 { -h.y } else { h.y },
                if i & 4 == 0 { -h.z } else { h.z },
            )
        })
        .collect();
    let quads = [
        [0, 1, 3, 2],
        [4, 6, 7, 5],
        [0, 4, 5, 1],
        [2, 3, 7, 6],
        [0, 2, 6, 4],
        [1, 5, 7, 3],
    ];
    let faces = quads
        .iter()
        .flat_map(|&[a, b, c, d]| [[a, b, c], [a, c, d]])
        .collect();
    build(verts, faces, |_| Vec3::zeros())
}

/// Square in the plane `z = depth`, `2 * half` wide, facing `-z`.
pub fn quad(depth: f64, half: f64) -> TriangleMesh {
    let verts = vec![
        Vec3::new(-half, -half, depth),
        Vec3::new(half, -half, depth),
        Vec3::new(half, half, depth),
        Vec3::new(-half, half, depth),
    ];
    TriangleMesh::new(verts, vec![[0, 2, 1], [0, 3, 2]], None).expect("valid quad")
}

/// Torus about the y axis.
pub fn torus(major: f64, minor: f64, rings: usize, sides: usize) -> TriangleMesh {
    let mut verts = Vec::with_capacity(rings * sides);
    for i in 0..rings {
        let phi = 2.0 * PI * i as f64 / rings as f64;
        for j in 0..sides {
            let psi = 2.0 * PI * j as f64 / sides as f64;
            let r = major + minor * psi.cos();
            verts.push(Vec3::new(r * phi.cos(), minor * psi.sin(), r * phi.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % rings) * sides + j % sides;
    let mut faces = Vec::new();
    for i in 0..rings {
        for j in 0..sides {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    build(verts, faces, move |c| {
        let radial = Vec3::new(c.x, 0.0, c.z);
        radial.normalize() * major
    })
}

/// Assigns each vertex a colour from its position inside the mesh's bounds.
pub fn paint_by_position(mesh: &TriangleMesh) -> TriangleMesh {
    let v = mesh.vertices();
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in v {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let span = (hi - lo).map(|x| if x > 0.0 { x } else { 1.0 });
    let colors = v
        .iter()
        .map(|p| {
            let n = (p - lo).component_div(&span);
            [n.x as f32, n.y as f32, n.z as f32].map(|c| c.clamp(0.0, 1.0))
        })
        .collect();
    TriangleMesh::new(v.to_vec(), mesh.faces().to_vec(), Some(colors)).expect("same topology")
}

// Orients each face so its normal points away from `inner(centroid)`.
fn build(
    verts: Vec<Vec3>,
    mut faces: Vec<[usize; 3]>,
    inner: impl Fn(&Vec3) -> Vec3,
) -> TriangleMesh {
    for f in &mut faces {
        let [a, b, c] = [verts[f[0]], verts[f[1]], verts[f[2]]];
        let centroid = (a + b + c) / 3.0;
        let n = (b - a).cross(&(c - a));
        if n.dot(&(centroid - inner(&centroid))) < 0.0 {
            f.swap(1, 2);
        }
    }
    TriangleMesh::new(verts, faces, None).expect("procedural mesh is valid")
}
