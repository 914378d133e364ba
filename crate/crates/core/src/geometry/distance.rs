use super::Vec3;

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance_sq(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c)).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent route: plane projection when it lands inside, otherwise the
    // nearest of the three edge segments.
    fn oracle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
        let n = (b - a).cross(&(c - a));
        let n2 = n.norm_squared();
        let proj = p - n * ((p - a).dot(&n) / n2);
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(s, e)| (*e - *s).cross(&(proj - *s)).dot(&n) >= 0.0);
        if inside {
            return (p - proj).norm();
        }
        let seg = |s: &Vec3, e: &Vec3| {
            let d = e - s;
            let t = ((p - s).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (p - (s + d * t)).norm()
        };
        seg(a, b).min(seg(b, c)).min(seg(c, a))
    }

    fn v3() -> impl Strategy<Value = Vec3> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    #[test]
    fn regions() {
        let a = Vec3::zeros();
        let b = Vec3::x();
        let c = Vec3::y();
        assert_eq!(
            closest_point_on_triangle(&Vec3::new(-1.0, -1.0, 0.0), &a, &b, &c),
            a
        );
        let q = closest_point_on_triangle(&Vec3::new(0.2, 0.2, 0.7), &a, &b, &c);
        assert!((q - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-15);
        let d = point_triangle_distance_sq(&Vec3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((d - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn matches_projection_oracle(p in v3(), a in v3(), b in v3(), c in v3()) {
            let area = (b - a).cross(&(c - a)).norm();
            prop_assume!(area > 1e-3);
            let got = point_triangle_distance_sq(&p, &a, &b, &c).sqrt();
            let want = oracle_distance(&p, &a, &b, &c);
            prop_assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
        }
    }
}
