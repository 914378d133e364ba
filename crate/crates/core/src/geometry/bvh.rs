//! Binary bounding volume hierarchy over the valid faces of a mesh.
//!
//! Nodes split at the median face centroid along the longest axis of the
//! centroid bounds, which keeps builds deterministic and the tree depth
//! logarithmic. Leaves hold at most [`LEAF_SIZE`] faces.

use super::distance::point_triangle_distance_sq;
use super::ray::{ray_triangle, Hit, HitList, Ray};
use super::{TriangleMesh, Vec3};
use crate::error::{Error, Result};

pub const LEAF_SIZE: usize = 4;

const STACK_DEPTH: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.grow_point(p);
        }
        b
    }

    pub fn grow_point(&mut self, p: &Vec3) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn grow(&mut self, other: &Aabb) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(other.min[k]);
            self.max[k] = self.max[k].max(other.max[k]);
        }
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.min[k] && self.max[k] >= other.max[k])
    }

    fn longest_axis(&self) -> usize {
        let ext = [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ];
        let mut axis = 0;
        for k in 1..3 {
            if ext[k] > ext[axis] {
                axis = k;
            }
        }
        axis
    }

    /// Conservative slab test against `[0, t_max]`. Boxes are inflated by a
    /// relative epsilon so hits the triangle test accepts on a box face are
    /// never culled.
    #[inline]
    fn hit_by(&self, origin: &Vec3, inv_dir: &[f64; 3], t_max: f64) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for k in 0..3 {
            let pad = 1e-9 * (1.0 + self.min[k].abs().max(self.max[k].abs()));
            let lo = self.min[k] - pad;
            let hi = self.max[k] + pad;
            if inv_dir[k].is_infinite() {
                if origin[k] < lo || origin[k] > hi {
                    return false;
                }
                continue;
            }
            let a = (lo - origin[k]) * inv_dir[k];
            let b = (hi - origin[k]) * inv_dir[k];
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return false;
            }
        }
        true
    }

    /// Squared distance from `p` to the box (zero inside).
    #[inline]
    fn distance_sq(&self, p: &Vec3) -> f64 {
        let mut d = 0.0;
        for k in 0..3 {
            let g = (self.min[k] - p[k]).max(p[k] - self.max[k]).max(0.0);
            d += g * g;
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BvhNode {
    Leaf {
        bounds: Aabb,
        start: u32,
        count: u32,
    },
    Interior {
        bounds: Aabb,
        left: u32,
        right: u32,
    },
}

impl BvhNode {
    pub fn bounds(&self) -> &Aabb {
        match self {
            BvhNode::Leaf { bounds, .. } | BvhNode::Interior { bounds, .. } => bounds,
        }
    }
}

/// Flat BVH; node 0 is the root. Leaves reference runs of `face_order`.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    face_order: Vec<u32>,
    face_count: usize,
}

impl Bvh {
    /// Builds a hierarchy over the mesh's valid faces.
    pub fn build(mesh: &TriangleMesh) -> Result<Self> {
        let mut faces: Vec<u32> = (0..mesh.face_count())
            .filter(|&f| mesh.is_face_valid(f))
            .map(|f| f as u32)
            .collect();
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let boxes: Vec<Aabb> = (0..mesh.face_count())
            .map(|f| Aabb::from_points(&mesh.triangle(f)))
            .collect();
        let centroids: Vec<Vec3> = (0..mesh.face_count())
            .map(|f| mesh.face_centroid(f))
            .collect();

        let mut nodes = Vec::with_capacity(2 * faces.len() / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut faces, 0, &boxes, &centroids);
        Ok(Bvh {
            nodes,
            face_order: faces,
            face_count: mesh.face_count(),
        })
    }

    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    pub fn root_bounds(&self) -> &Aabb {
        self.nodes[0].bounds()
    }

    /// Faces held by a leaf node.
    pub fn leaf_faces(&self, node: &BvhNode) -> &[u32] {
        match *node {
            BvhNode::Leaf { start, count, .. } => {
                &self.face_order[start as usize..(start + count) as usize]
            }
            BvhNode::Interior { .. } => &[],
        }
    }

    /// Nearest `max_hits` crossings of `ray` with the mesh.
    pub fn intersect_all(&self, mesh: &TriangleMesh, ray: &Ray, max_hits: usize) -> HitList {
        self.intersect_all_within(mesh, ray, max_hits, f64::INFINITY)
    }

    /// As [`Bvh::intersect_all`], restricted to `t <= t_max`.
    pub fn intersect_all_within(
        &self,
        mesh: &TriangleMesh,
        ray: &Ray,
        max_hits: usize,
        t_max: f64,
    ) -> HitList {
        let mut raw = Vec::new();
        self.collect_hits(mesh, ray, t_max, &mut raw);
        HitList::from_candidates(raw, max_hits)
    }

    /// Appends every crossing with `t <= t_max` to `out`, unsorted.
    pub fn collect_hits(&self, mesh: &TriangleMesh, ray: &Ray, t_max: f64, out: &mut Vec<Hit>) {
        debug_assert_eq!(
            mesh.face_count(),
            self.face_count,
            "BVH built for another mesh"
        );
        let d = ray.direction();
        let o = ray.origin();
        let inv = [1.0 / d.x, 1.0 / d.y, 1.0 / d.z];
        let mut stack = [0u32; STACK_DEPTH];
        let mut top = 1usize;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !node.bounds().hit_by(o, &inv, t_max) {
                continue;
            }
            match *node {
                BvhNode::Leaf { start, count, .. } => {
                    for &f in &self.face_order[start as usize..(start + count) as usize] {
                        let [a, b, c] = mesh.triangle(f as usize);
                        if let Some((t, u, v)) = ray_triangle(ray, &a, &b, &c) {
                            if t <= t_max {
                                out.push(Hit {
                                    t,
                                    face: f as usize,
                                    u,
                                    v,
                                    z_depth: o.z + t * d.z,
                                });
                            }
                        }
                    }
                }
                BvhNode::Interior { left, right, .. } => {
                    stack[top] = right;
                    stack[top + 1] = left;
                    top += 2;
                }
            }
        }
    }

    /// Closest valid face to `p` and its squared distance.
    pub fn closest_face(&self, mesh: &TriangleMesh, p: &Vec3) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = [0u32; STACK_DEPTH];
        let mut top = 1usize;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            // shrink the bound slightly so rounding never prunes the minimiser
            if node.bounds().distance_sq(p) * (1.0 - 1e-9) > best.1 {
                continue;
            }
            match *node {
                BvhNode::Leaf { start, count, .. } => {
                    for &f in &self.face_order[start as usize..(start + count) as usize] {
                        let [a, b, c] = mesh.triangle(f as usize);
                        let d = point_triangle_distance_sq(p, &a, &b, &c);
                        if d < best.1 || (d == best.1 && (f as usize) < best.0) {
                            best = (f as usize, d);
                        }
                    }
                }
                BvhNode::Interior { left, right, .. } => {
                    let dl = self.nodes[left as usize].bounds().distance_sq(p);
                    let dr = self.nodes[right as usize].bounds().distance_sq(p);
                    // visit the nearer child first
                    let (first, second) = if dl <= dr {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    stack[top] = second;
                    stack[top + 1] = first;
                    top += 2;
                }
            }
        }
        best
    }
}

fn build_node(
    nodes: &mut Vec<BvhNode>,
    faces: &mut [u32],
    offset: usize,
    boxes: &[Aabb],
    centroids: &[Vec3],
) -> u32 {
    let mut bounds = Aabb::empty();
    let mut centre_bounds = Aabb::empty();
    for &f in faces.iter() {
        bounds.grow(&boxes[f as usize]);
        centre_bounds.grow_point(&centroids[f as usize]);
    }
    let index = nodes.len() as u32;
    if faces.len() <= LEAF_SIZE {
        nodes.push(BvhNode::Leaf {
            bounds,
            start: offset as u32,
            count: faces.len() as u32,
        });
        return index;
    }
    let axis = centre_bounds.longest_axis();
    let mid = faces.len() / 2;
    faces.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    // placeholder, patched once both children exist
    nodes.push(BvhNode::Interior {
        bounds,
        left: 0,
        right: 0,
    });
    let (lo, hi) = faces.split_at_mut(mid);
    let left = build_node(nodes, lo, offset, boxes, centroids);
    let right = build_node(nodes, hi, offset + mid, boxes, centroids);
    nodes[index as usize] = BvhNode::Interior {
        bounds,
        left,
        right,
    };
    index
}
