//! Rigid-motion invariant 2×2 representation of a triangle.
//!
//! The designated edge `k` starts at vertex `k`; `u` is that edge and `v` the
//! next edge leaving the same vertex. In frame coordinates `u` lies on the
//! positive x-axis and `v` in the upper half plane, so the matrix columns are
//! `(|u|, 0)` and `(|v| cos θ, |v| sin θ)`.

use nalgebra::{Matrix2, Point, Vector2};

use super::error::GeometryError;
use super::mesh::DEGENERATE_AREA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub matrix: Matrix2<f64>,
    pub designated_edge: usize,
}

impl LocalFrame {
    pub fn u(&self) -> Vector2<f64> {
        self.matrix.column(0).into()
    }

    pub fn v(&self) -> Vector2<f64> {
        self.matrix.column(1).into()
    }

    /// Frame-coordinate positions of the triangle's vertices, in triangle
    /// order (the designated vertex sits at the origin).
    pub fn vertex_positions(&self) -> [Vector2<f64>; 3] {
        frame_vertex_positions(&self.matrix, self.designated_edge)
    }
}

/// Vertex positions (triangle order) of a triangle whose frame is `m`.
pub fn frame_vertex_positions(m: &Matrix2<f64>, designated_edge: usize) -> [Vector2<f64>; 3] {
    let k = designated_edge % 3;
    let mut out = [Vector2::zeros(); 3];
    out[(k + 1) % 3] = m.column(0).into();
    out[(k + 2) % 3] = m.column(1).into();
    out
}

/// Local frame of a triangle given in any dimension.
pub fn local_frame<const D: usize>(
    tri: &[Point<f64, D>; 3],
    designated_edge: usize,
) -> Result<LocalFrame, GeometryError> {
    let k = designated_edge % 3;
    let origin = tri[k];
    let u = tri[(k + 1) % 3] - origin;
    let v = tri[(k + 2) % 3] - origin;
    let uu = u.norm_squared();
    let vv = v.norm_squared();
    let uv = u.dot(&v);
    // |u × v|² via the Gram determinant works in 2D and 3D alike.
    let gram = (uu * vv - uv * uv).max(0.0);
    let area = 0.5 * gram.sqrt();
    if !(area > DEGENERATE_AREA) {
        return Err(GeometryError::DegenerateTriangle { area });
    }
    let len_u = uu.sqrt();
    let matrix = Matrix2::new(len_u, uv / len_u, 0.0, gram.sqrt() / len_u);
    Ok(LocalFrame {
        matrix,
        designated_edge: k,
    })
}

/// Rotation by `angle` radians.
pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Rotation closest to `m` in the Frobenius sense (the rotation factor of
/// its polar decomposition), with reflections excluded.
pub fn closest_rotation(m: &Matrix2<f64>) -> Matrix2<f64> {
    let angle = (m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)]);
    rotation(angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Point2, Point3, Rotation3, Vector3};
    use proptest::prelude::*;

    #[test]
    fn right_triangle_frame() {
        let tri = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let f = local_frame(&tri, 0).unwrap();
        assert_eq!(f.matrix, Matrix2::new(2.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn equilateral_frame() {
        let h = 3f64.sqrt() / 2.0;
        let tri = [
            Point2::new(0.3, -1.0),
            Point2::new(1.3, -1.0),
            Point2::new(0.8, -1.0 + h),
        ];
        let f = local_frame(&tri, 0).unwrap();
        let expected = Matrix2::new(1.0, 0.5, 0.0, 0.8660254);
        assert!((f.matrix - expected).abs().max() < 1e-7);
    }

    #[test]
    fn collinear_is_degenerate() {
        let tri = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        assert!(matches!(
            local_frame(&tri, 0),
            Err(GeometryError::DegenerateTriangle { .. })
        ));
    }

    #[test]
    fn designated_edge_rotates_vertex_roles() {
        let tri = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let f = local_frame(&tri, 1).unwrap();
        let pos = f.vertex_positions();
        assert_eq!(pos[1], Vector2::zeros());
        // |v1 - v2| and |v1 - v0| are preserved
        assert!(((pos[2] - pos[1]).norm() - 5f64.sqrt()).abs() < 1e-12);
        assert!(((pos[0] - pos[1]).norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closest_rotation_recovers_scaled_rotation() {
        let r = rotation(0.7) * 3.0;
        assert!((closest_rotation(&r) - rotation(0.7)).abs().max() < 1e-12);
    }

    fn arb_point() -> impl Strategy<Value = Point3<f64>> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn frame_is_rigid_motion_invariant(
            a in arb_point(), b in arb_point(), c in arb_point(),
            axis in (-1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64),
            angle in -3.0..3.0f64,
            offset in arb_point(),
        ) {
            let tri = [a, b, c];
            let Ok(f) = local_frame(&tri, 0) else { return Ok(()) };
            prop_assume!(f.matrix.determinant() > 1e-3);
            let rot = Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(Vector3::new(axis.0, axis.1, axis.2)),
                angle,
            );
            let moved = tri.map(|p| rot * p + offset.coords);
            let g = local_frame(&moved, 0).unwrap();
            prop_assert!((f.matrix - g.matrix).abs().max() < 1e-9);
        }

        #[test]
        fn determinant_is_twice_area(a in arb_point(), b in arb_point(), c in arb_point()) {
            let tri = [a, b, c];
            let Ok(f) = local_frame(&tri, 0) else { return Ok(()) };
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            prop_assert!((f.matrix.determinant() - 2.0 * area).abs() < 1e-9);
            prop_assert_eq!(f.matrix[(1, 0)], 0.0);
        }
    }
}
