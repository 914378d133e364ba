//! Meshes, cameras, rays and the bounding volume hierarchy used for exact
//! multi-hit ray casting.

mod bvh;
mod camera;
mod distance;
mod mesh;
mod ray;
mod transform;

pub use bvh::{Aabb, Bvh, BvhNode, LEAF_SIZE};
pub use camera::{PinholeCamera, RigidTransform};
pub use distance::{closest_point_on_triangle, point_triangle_distance_sq};
pub use mesh::{TriangleMesh, DEGENERATE_AREA};
pub use ray::{ray_triangle, Hit, HitList, Ray, HIT_TIE_TOLERANCE, T_MIN};
pub use transform::{rotate_yaw, rotate_yaw_about, yaw_rotation};

/// Double-precision 3-vector used for all positions and directions.
pub type Vec3 = nalgebra::Vector3<f64>;
