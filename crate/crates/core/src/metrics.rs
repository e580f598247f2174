//! Shape comparison measures for patterns.

use nalgebra::{Matrix2, Point2, Vector2};

use crate::flatten::tangent::{build_tangent_constraints, max_residual};
use crate::flatten::FlattenError;
use crate::geometry::frame::rotation;
use crate::geometry::Panel;

fn segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + d * t)).norm()
}

fn loop_distance(p: &Point2<f64>, poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(p, &poly[i], &poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two closed polylines, measured from
/// the vertices of each to the edges of the other.
pub fn hausdorff_loops(a: &[Point2<f64>], b: &[Point2<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
    }
    let ab = a.iter().map(|p| loop_distance(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|p| loop_distance(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Boundary polygon of a panel.
pub fn boundary_points(panel: &Panel) -> Vec<Point2<f64>> {
    panel.boundary.iter().map(|&v| panel.vertices[v]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub rotation: Matrix2<f64>,
    pub scale: f64,
    pub translation: Vector2<f64>,
}

impl Similarity {
    pub fn apply(&self, p: &Point2<f64>) -> Point2<f64> {
        Point2::from(self.rotation * p.coords * self.scale + self.translation)
    }
}

fn fit(src: &[Point2<f64>], dst: &[Point2<f64>], with_scale: bool) -> Similarity {
    assert_eq!(src.len(), dst.len(), "corresponding point sets");
    let n = src.len().max(1) as f64;
    let cs = src.iter().map(|p| p.coords).sum::<Vector2<f64>>() / n;
    let cd = dst.iter().map(|p| p.coords).sum::<Vector2<f64>>() / n;
    let (mut a, mut b, mut ss) = (0.0, 0.0, 0.0);
    for (p, q) in src.iter().zip(dst) {
        let (u, v) = (p.coords - cs, q.coords - cd);
        a += u.dot(&v);
        b += u.perp(&v);
        ss += u.norm_squared();
    }
    let r = rotation(b.atan2(a));
    let scale = if with_scale && ss > 0.0 { a.hypot(b) / ss } else { 1.0 };
    Similarity {
        rotation: r,
        scale,
        translation: cd - r * cs * scale,
    }
}

/// Least-squares rotation and translation taking `src` onto `dst`.
pub fn fit_rigid(src: &[Point2<f64>], dst: &[Point2<f64>]) -> Similarity {
    fit(src, dst, false)
}

/// Least-squares similarity taking `src` onto `dst`.
pub fn fit_similarity(src: &[Point2<f64>], dst: &[Point2<f64>]) -> Similarity {
    fit(src, dst, true)
}

/// Largest boundary tangent residual of `coords` against the boundary
/// chords of `reference`.
pub fn max_tangent_residual(reference: &Panel, coords: &[Point2<f64>]) -> Result<f64, FlattenError> {
    let set = build_tangent_constraints(reference)?;
    Ok(max_residual(&set, coords))
}

/// Ratio of pattern areas, `current / reference`.
pub fn area_ratio(current: &Panel, reference: &Panel) -> f64 {
    current.area() / reference.area()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2<f64>> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn hausdorff_of_shifted_square() {
        let a = square();
        let b: Vec<_> = a.iter().map(|p| p + Vector2::new(0.25, 0.0)).collect();
        assert!((hausdorff_loops(&a, &b) - 0.25).abs() < 1e-15);
        assert_eq!(hausdorff_loops(&a, &a), 0.0);
    }

    #[test]
    fn similarity_recovers_transform() {
        let t = Similarity {
            rotation: rotation(0.7),
            scale: 1.5,
            translation: Vector2::new(3.0, -2.0),
        };
        let src = square();
        let dst: Vec<_> = src.iter().map(|p| t.apply(p)).collect();
        let fitted = fit_similarity(&src, &dst);
        assert!((fitted.scale - 1.5).abs() < 1e-12);
        for (p, q) in src.iter().zip(&dst) {
            assert!((fitted.apply(p) - q).norm() < 1e-12);
        }
        assert_eq!(fit_rigid(&src, &dst).scale, 1.0);
    }
}
