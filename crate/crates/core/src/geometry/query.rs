//! Point and ray queries against triangles.

use nalgebra::{Point3, Vector3};

use super::mesh::Mesh3;

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision
/// Detection, 5.1.5).
pub fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Point3<f64> {
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

/// Nearest triangle of `mesh` to `p`; ties within `1e-12` cm go to the lowest
/// triangle index. Returns `(triangle, closest point, distance)`.
pub fn nearest_triangle(mesh: &Mesh3, p: &Point3<f64>) -> Option<(usize, Point3<f64>, f64)> {
    let mut best: Option<(usize, Point3<f64>, f64)> = None;
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_points(t);
        let q = closest_point_on_triangle(p, &a, &b, &c);
        let d = (p - q).norm();
        match best {
            Some((_, _, bd)) if d >= bd - 1e-12 => {}
            _ => best = Some((t, q, d)),
        }
    }
    best
}

/// Signed distance to `mesh`, signed by the nearest triangle's normal.
/// Returns `(signed distance, nearest triangle, outward unit normal)`.
pub fn signed_distance(mesh: &Mesh3, p: &Point3<f64>) -> Option<(f64, usize, Vector3<f64>)> {
    let (t, q, d) = nearest_triangle(mesh, p)?;
    let n = mesh.normal(t);
    let side = (p - q).dot(&n);
    let signed = if side < 0.0 { -d } else { d };
    Some((signed, t, n))
}

/// Ray/triangle intersection (Möller–Trumbore); returns the ray parameter.
pub fn ray_triangle(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    tri: &[Point3<f64>; 3],
) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = inv * s.dot(&h);
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = inv * dir.dot(&q);
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = inv * e2.dot(&q);
    (t > 0.0).then_some(t)
}
