use nalgebra::Point;

use super::error::GeometryError;
use super::mesh::DEGENERATE_AREA;

/// Barycentric coordinates `(a, b, c)` of `p` with respect to `tri`.
///
/// 3D points are implicitly projected into the triangle's plane (the normal
/// equations of the Gram system). `c` is computed as `1 - a - b` so the
/// coordinates always sum to one.
pub fn barycentric<const D: usize>(
    p: &Point<f64, D>,
    tri: &[Point<f64, D>; 3],
) -> Result<[f64; 3], GeometryError> {
    let e0 = tri[0] - tri[2];
    let e1 = tri[1] - tri[2];
    let w = p - tri[2];
    let d00 = e0.dot(&e0);
    let d01 = e0.dot(&e1);
    let d11 = e1.dot(&e1);
    let gram = d00 * d11 - d01 * d01;
    let area = 0.5 * gram.max(0.0).sqrt();
    if !(area > DEGENERATE_AREA) {
        return Err(GeometryError::DegenerateTriangle { area });
    }
    let w0 = w.dot(&e0);
    let w1 = w.dot(&e1);
    let a = (d11 * w0 - d01 * w1) / gram;
    let b = (d00 * w1 - d01 * w0) / gram;
    Ok([a, b, 1.0 - a - b])
}

/// `a·p0 + b·p1 + c·p2`.
pub fn interpolate<const D: usize>(bary: &[f64; 3], tri: &[Point<f64, D>; 3]) -> Point<f64, D> {
    Point::from(tri[0].coords * bary[0] + tri[1].coords * bary[1] + tri[2].coords * bary[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Point2, Point3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centroid_is_uniform() {
        let tri = [
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(3.0, 0.5, 0.0),
            Point3::new(-1.0, 2.0, 0.5),
        ];
        let centroid = Point3::from((tri[0].coords + tri[1].coords + tri[2].coords) / 3.0);
        let bary = barycentric(&centroid, &tri).unwrap();
        for x in bary {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_case() {
        let tri = [
            Point2::new(0.5, 0.5),
            Point2::new(3.0, 0.5),
            Point2::new(-1.0, 2.0),
        ];
        assert_eq!(barycentric(&tri[0], &tri).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn outside_point() {
        let tri = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let bary = barycentric(&Point2::new(2.0, 0.0), &tri).unwrap();
        assert_eq!(bary, [-1.0, 2.0, 0.0]);
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let tri = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(barycentric(&Point2::new(0.5, 0.5), &tri).is_err());
    }

    #[test]
    fn reconstruction_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let tri: [Point3<f64>; 3] = std::array::from_fn(|_| {
                Point3::new(
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                )
            });
            let n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
            if n.norm() < 0.1 {
                continue;
            }
            let n = n.normalize();
            for _ in 0..1000 {
                let p = Point3::new(
                    rng.random_range(-8.0..8.0),
                    rng.random_range(-8.0..8.0),
                    rng.random_range(-8.0..8.0),
                );
                let bary = barycentric(&p, &tri).unwrap();
                assert!((bary[0] + bary[1] + bary[2] - 1.0).abs() < 1e-12);
                let projected = p - n * (p - tri[0]).dot(&n);
                let back = interpolate(&bary, &tri);
                assert!((back - projected).norm() < 1e-9);
            }
        }
    }
}
