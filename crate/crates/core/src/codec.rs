//! Peeled map stacks: multi-hit ray-traced encoding of meshes and
//! back-projection of stacks into coloured point clouds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Bvh, Hit, HitList, PinholeCamera, Ray, TriangleMesh, Vec3};

/// Depth value marking "no surface" at a pixel.
pub const BACKGROUND: f32 = 0.0;

/// Crossings closer than this camera-space depth (m) are not recorded.
pub const NEAR_PLANE: f64 = 1e-4;

pub const DEFAULT_LAYERS: usize = 4;
pub const DEFAULT_RESOLUTION: u32 = 512;

/// `layers × height × width` depth grid (camera-space z in metres) with an
/// optional RGB grid of the same shape, stored layer by layer in row-major
/// order. RGB is interleaved per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct PeeledMapStack {
    camera: PinholeCamera,
    layers: usize,
    depth: Vec<f32>,
    rgb: Option<Vec<f32>>,
}

impl PeeledMapStack {
    /// Wraps raw grids. Depths must be finite and non-negative; layer
    /// ordering is not enforced here (network predictions need not be
    /// ordered), see [`PeeledMapStack::check_layering`].
    pub fn new(
        camera: PinholeCamera,
        layers: usize,
        depth: Vec<f32>,
        rgb: Option<Vec<f32>>,
    ) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("layers", "must be at least 1"));
        }
        let n = layers * camera.width() as usize * camera.height() as usize;
        if depth.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "depth grid has {} values, expected {n}",
                depth.len()
            )));
        }
        if let Some(i) = depth.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid(
                "depth",
                format!("value {} at index {i} is negative or not finite", depth[i]),
            ));
        }
        if let Some(rgb) = &rgb {
            if rgb.len() != 3 * n {
                return Err(Error::DimensionMismatch(format!(
                    "rgb grid has {} values, expected {}",
                    rgb.len(),
                    3 * n
                )));
            }
            if rgb.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("rgb", "non-finite value"));
            }
        }
        Ok(PeeledMapStack {
            camera,
            layers,
            depth,
            rgb,
        })
    }

    /// All-background stack.
    pub fn background(camera: PinholeCamera, layers: usize, with_rgb: bool) -> Result<Self> {
        let n = layers * camera.width() as usize * camera.height() as usize;
        Self::new(
            camera,
            layers,
            vec![BACKGROUND; n],
            with_rgb.then(|| vec![0.0; 3 * n]),
        )
    }

    pub fn camera(&self) -> &PinholeCamera {
        &self.camera
    }
    pub fn layers(&self) -> usize {
        self.layers
    }
    pub fn width(&self) -> usize {
        self.camera.width() as usize
    }
    pub fn height(&self) -> usize {
        self.camera.height() as usize
    }
    pub fn pixels_per_layer(&self) -> usize {
        self.width() * self.height()
    }

    /// Flat index of `(layer, u, v)` in the depth grid.
    #[inline]
    pub fn index(&self, layer: usize, u: usize, v: usize) -> usize {
        (layer * self.height() + v) * self.width() + u
    }

    pub fn depth(&self) -> &[f32] {
        &self.depth
    }

    pub fn depth_at(&self, layer: usize, u: usize, v: usize) -> f32 {
        self.depth[self.index(layer, u, v)]
    }

    pub fn depth_layer(&self, layer: usize) -> &[f32] {
        let n = self.pixels_per_layer();
        &self.depth[layer * n..(layer + 1) * n]
    }

    pub fn rgb(&self) -> Option<&[f32]> {
        self.rgb.as_deref()
    }

    pub fn rgb_at(&self, layer: usize, u: usize, v: usize) -> Option<[f32; 3]> {
        let i = 3 * self.index(layer, u, v);
        self.rgb.as_ref().map(|c| [c[i], c[i + 1], c[i + 2]])
    }

    pub fn without_rgb(mut self) -> Self {
        self.rgb = None;
        self
    }

    /// Number of non-background depth samples across all layers.
    pub fn nonzero_count(&self) -> usize {
        self.depth.iter().filter(|&&d| d != BACKGROUND).count()
    }

    /// Same grid dimensions and layer count.
    pub fn same_shape(&self, other: &PeeledMapStack) -> bool {
        self.layers == other.layers
            && self.width() == other.width()
            && self.height() == other.height()
    }

    /// Checks the peeling order at every pixel: non-background depths are
    /// non-decreasing with layer index and background only occurs as a
    /// suffix.
    pub fn check_layering(&self) -> Result<()> {
        let n = self.pixels_per_layer();
        for p in 0..n {
            let mut prev = 0.0f32;
            let mut ended = false;
            for l in 0..self.layers {
                let d = self.depth[l * n + p];
                if d == BACKGROUND {
                    ended = true;
                } else if ended {
                    return Err(Error::invalid(
                        "stack",
                        format!("pixel {p} has depth in layer {l} after background"),
                    ));
                } else if d < prev {
                    return Err(Error::invalid(
                        "stack",
                        format!("pixel {p} depth decreases at layer {l}"),
                    ));
                } else {
                    prev = d;
                }
            }
        }
        Ok(())
    }
}

/// Points in world space with optional colour and source-layer tags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ColoredPointCloud {
    pub points: Vec<Vec3>,
    pub colors: Option<Vec<[f32; 3]>>,
    pub layer_ids: Option<Vec<u16>>,
}

impl ColoredPointCloud {
    pub fn from_points(points: Vec<Vec3>) -> Self {
        ColoredPointCloud {
            points,
            colors: None,
            layer_ids: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps the points at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> ColoredPointCloud {
        ColoredPointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            colors: self
                .colors
                .as_ref()
                .map(|c| indices.iter().map(|&i| c[i]).collect()),
            layer_ids: self
                .layer_ids
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }
}

/// Ray-traces `mesh` through every pixel centre of `camera`, recording the
/// camera-space depth (and interpolated vertex colour, when the mesh has
/// colours) of the first `layers` crossings.
///
/// Rows are traced in parallel on the current rayon pool; the result does
/// not depend on the number of workers.
pub fn encode_peeled(
    mesh: &TriangleMesh,
    camera: &PinholeCamera,
    layers: usize,
) -> Result<PeeledMapStack> {
    if layers == 0 {
        return Err(Error::invalid("layers", "must be at least 1"));
    }
    let pose = *camera.pose();
    let local = mesh.map_vertices(|p| pose.apply(p));
    let bvh = Bvh::build(&local)?;
    let (w, h) = (camera.width() as usize, camera.height() as usize);
    let with_rgb = local.colors().is_some();

    // one (depth, rgb) buffer per image row, pixel-major: [u][layer]
    let rows: Vec<(Vec<f32>, Vec<f32>)> = (0..h)
        .into_par_iter()
        .map_init(Vec::<Hit>::new, |buf, v| {
            let mut drow = vec![BACKGROUND; w * layers];
            let mut crow = vec![0f32; if with_rgb { 3 * w * layers } else { 0 }];
            for u in 0..w {
                let dir = camera.pixel_direction(u as u32, v as u32);
                let ray = Ray::new(Vec3::zeros(), dir).expect("pixel direction is unit");
                buf.clear();
                bvh.collect_hits(&local, &ray, f64::INFINITY, buf);
                buf.retain(|hit| hit.z_depth > NEAR_PLANE);
                let hits = HitList::from_candidates(std::mem::take(buf), layers);
                for (l, hit) in hits.iter().enumerate() {
                    let k = u * layers + l;
                    drow[k] = hit.z_depth as f32;
                    if with_rgb {
                        let c = local
                            .color_at(hit.face, hit.u, hit.v)
                            .expect("mesh has colours");
                        crow[3 * k..3 * k + 3].copy_from_slice(&c);
                    }
                }
                *buf = hits.into_vec();
            }
            (drow, crow)
        })
        .collect();

    let n = w * h;
    let mut depth = vec![BACKGROUND; n * layers];
    let mut rgb = with_rgb.then(|| vec![0f32; 3 * n * layers]);
    for (v, (drow, crow)) in rows.iter().enumerate() {
        for u in 0..w {
            let p = v * w + u;
            for l in 0..layers {
                depth[l * n + p] = drow[u * layers + l];
                if let Some(rgb) = rgb.as_mut() {
                    let src = 3 * (u * layers + l);
                    rgb[3 * (l * n + p)..3 * (l * n + p) + 3].copy_from_slice(&crow[src..src + 3]);
                }
            }
        }
    }
    PeeledMapStack::new(*camera, layers, depth, rgb)
}

/// Back-projects every non-background pixel to world space, layer by layer
/// in row-major order.
pub fn decode_pointcloud(stack: &PeeledMapStack) -> ColoredPointCloud {
    let cam = stack.camera();
    let (w, h) = (stack.width(), stack.height());
    let mut points = Vec::new();
    let mut colors = stack.rgb().map(|_| Vec::new());
    let mut layer_ids = Vec::new();
    for l in 0..stack.layers() {
        for v in 0..h {
            for u in 0..w {
                let d = stack.depth_at(l, u, v);
                if d == BACKGROUND {
                    continue;
                }
                points.push(cam.back_project(u as u32, v as u32, d as f64));
                layer_ids.push(l as u16);
                if let Some(colors) = colors.as_mut() {
                    colors.push(stack.rgb_at(l, u, v).expect("stack has rgb"));
                }
            }
        }
    }
    ColoredPointCloud {
        points,
        colors,
        layer_ids: Some(layer_ids),
    }
}

/// Draws `target` points without replacement using a seeded ChaCha8
/// generator; clouds with at most `target` points come back unchanged.
/// Selected points keep their original relative order.
pub fn subsample_uniform(
    cloud: &ColoredPointCloud,
    target: usize,
    seed: u64,
) -> Result<ColoredPointCloud> {
    if target == 0 {
        return Err(Error::invalid("target", "must be at least 1"));
    }
    if cloud.len() <= target {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, cloud.len(), target).into_vec();
    picked.sort_unstable();
    Ok(cloud.select(&picked))
}
