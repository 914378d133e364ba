use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{Error, Result};

const ORTHONORMAL_TOLERANCE: f64 = 1e-6;

/// Rigid world→camera transform `p_cam = R · p_world + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        if !rotation
            .iter()
            .chain(translation.iter())
            .all(|x| x.is_finite())
        {
            return Err(Error::invalid("pose", "non-finite entry"));
        }
        let err = (rotation.transpose() * rotation - Matrix3::identity())
            .abs()
            .max();
        if err > ORTHONORMAL_TOLERANCE {
            return Err(Error::invalid(
                "pose",
                format!("rotation is not orthonormal (deviation {err:e})"),
            ));
        }
        if rotation.determinant() < 0.0 {
            return Err(Error::invalid("pose", "rotation is a reflection"));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    /// Builds a transform from a row-major homogeneous 4×4 matrix.
    pub fn from_rows(m: &[[f64; 4]; 4]) -> Result<Self> {
        if m[3] != [0.0, 0.0, 0.0, 1.0] {
            return Err(Error::invalid("pose", "bottom row must be [0, 0, 0, 1]"));
        }
        let rotation = Matrix3::from_fn(|r, c| m[r][c]);
        let translation = Vec3::new(m[0][3], m[1][3], m[2][3]);
        Self::new(rotation, translation)
    }

    pub fn to_rows(&self) -> [[f64; 4]; 4] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            [r[(0, 0)], r[(0, 1)], r[(0, 2)], t.x],
            [r[(1, 0)], r[(1, 1)], r[(1, 2)], t.y],
            [r[(2, 0)], r[(2, 1)], r[(2, 2)], t.z],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn apply_inverse(&self, p: &Vec3) -> Vec3 {
        self.rotation.transpose() * (p - self.translation)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// Pinhole intrinsics plus a world→camera pose.
///
/// Camera space is +z forward, +x right, +y down (image rows grow with y).
/// Pixel `(u, v)` is sampled at its centre `(u + 0.5, v + 0.5)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CameraJson", into = "CameraJson")]
pub struct PinholeCamera {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
    pose: RigidTransform,
}

impl PinholeCamera {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        pose: RigidTransform,
    ) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite()) {
            return Err(Error::invalid(
                "camera",
                format!("focal lengths must be positive, got {fx}, {fy}"),
            ));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("camera", "image size must be non-zero"));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(Error::invalid(
                "camera",
                format!("principal point ({cx}, {cy}) outside {width}x{height}"),
            ));
        }
        Ok(PinholeCamera {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            pose,
        })
    }

    /// Square-pixel camera looking down +z from the world origin with the
    /// principal point at the image centre.
    pub fn centered(focal: f64, width: u32, height: u32) -> Result<Self> {
        Self::new(
            focal,
            focal,
            width as f64 / 2.0,
            height as f64 / 2.0,
            width,
            height,
            RigidTransform::identity(),
        )
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }
    pub fn fy(&self) -> f64 {
        self.fy
    }
    pub fn cx(&self) -> f64 {
        self.cx
    }
    pub fn cy(&self) -> f64 {
        self.cy
    }
    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn pose(&self) -> &RigidTransform {
        &self.pose
    }

    pub fn with_pose(&self, pose: RigidTransform) -> Self {
        PinholeCamera { pose, ..*self }
    }

    /// Same field of view at a different resolution; intrinsics scale with
    /// the image axes.
    pub fn with_resolution(&self, width: u32, height: u32) -> Result<Self> {
        let sx = width as f64 / self.width as f64;
        let sy = height as f64 / self.height as f64;
        Self::new(
            self.fx * sx,
            self.fy * sy,
            self.cx * sx,
            self.cy * sy,
            width,
            height,
            self.pose,
        )
    }

    /// Unit camera-space direction of the ray through the centre of pixel
    /// `(u, v)`.
    pub fn pixel_direction(&self, u: u32, v: u32) -> Vec3 {
        Vec3::new(
            (u as f64 + 0.5 - self.cx) / self.fx,
            (v as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        )
        .normalize()
    }

    /// Lifts pixel `(u, v)` at camera-space depth `z` to a camera-space point.
    pub fn back_project_camera(&self, u: u32, v: u32, z: f64) -> Vec3 {
        Vec3::new(
            (u as f64 + 0.5 - self.cx) * z / self.fx,
            (v as f64 + 0.5 - self.cy) * z / self.fy,
            z,
        )
    }

    /// Lifts pixel `(u, v)` at camera-space depth `z` to world space.
    pub fn back_project(&self, u: u32, v: u32, z: f64) -> Vec3 {
        self.pose.apply_inverse(&self.back_project_camera(u, v, z))
    }
}

/// On-disk camera description (`<name>.camera.json`).
#[derive(Serialize, Deserialize)]
struct CameraJson {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
    /// Row-major world→camera matrix.
    world_to_camera: [[f64; 4]; 4],
}

impl TryFrom<CameraJson> for PinholeCamera {
    type Error = Error;

    fn try_from(j: CameraJson) -> Result<Self> {
        let pose = RigidTransform::from_rows(&j.world_to_camera)?;
        PinholeCamera::new(j.fx, j.fy, j.cx, j.cy, j.width, j.height, pose)
    }
}

impl From<PinholeCamera> for CameraJson {
    fn from(c: PinholeCamera) -> Self {
        CameraJson {
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
            width: c.width,
            height: c.height,
            world_to_camera: c.pose.to_rows(),
        }
    }
}
