use nalgebra::Matrix3;

use super::{TriangleMesh, Vec3};

/// Right-handed rotation about +y: `(1, 0, 0)` turns to `(0, 0, -1)` at 90°.
pub fn yaw_rotation(degrees: f64) -> Matrix3<f64> {
    let (s, c) = degrees.to_radians().sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Rotates the mesh about the vertical axis through its vertex centroid.
pub fn rotate_yaw(mesh: &TriangleMesh, degrees: f64) -> TriangleMesh {
    rotate_yaw_about(mesh, degrees, mesh.centroid())
}

/// Rotates the mesh about the vertical axis through `pivot`. Used to turn a
/// body and its garment together.
pub fn rotate_yaw_about(mesh: &TriangleMesh, degrees: f64, pivot: Vec3) -> TriangleMesh {
    if degrees == 0.0 {
        return mesh.clone();
    }
    let r = yaw_rotation(degrees);
    mesh.map_vertices(|v| r * (v - pivot) + pivot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn zero_is_identity() {
        let m = shapes::icosphere(1.0, 1).translated(Vec3::new(0.3, 0.1, 2.0));
        assert_eq!(rotate_yaw(&m, 0.0), m);
    }

    #[test]
    fn quarter_turn_of_x_axis() {
        let m = TriangleMesh::new(
            vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()],
            vec![[0, 2, 1], [0, 1, 3]],
            None,
        )
        .unwrap();
        assert_eq!(m.centroid(), Vec3::zeros());
        let r = rotate_yaw(&m, 90.0);
        assert!((r.vertices()[0] - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-9);
    }

    #[test]
    fn inverse_and_rigidity() {
        let m = shapes::uv_sphere(0.8, 12, 16).translated(Vec3::new(1.0, -0.5, 3.0));
        let back = rotate_yaw(&rotate_yaw(&m, 45.0), -45.0);
        for (a, b) in m.vertices().iter().zip(back.vertices()) {
            assert!((a - b).norm() < 1e-7);
        }
        let r = rotate_yaw(&m, 37.0);
        let v = m.vertices();
        let w = r.vertices();
        for i in (0..v.len()).step_by(7) {
            for j in (0..v.len()).step_by(11) {
                assert!(((v[i] - v[j]).norm() - (w[i] - w[j]).norm()).abs() < 1e-7);
            }
        }
        assert_eq!(r.faces(), m.faces());
    }
}
