//! Choice and placement of the pinned edge that fixes a panel's rigid motion.

use nalgebra::{Point, Point2, Vector2};

use crate::geometry::topology::edge_triangles;

/// Undirected edge whose midpoint is nearest to the area-weighted centroid;
/// ties go to the lowest edge in `(min, max)` order.
pub fn center_edge<const D: usize>(vertices: &[Point<f64, D>], triangles: &[[usize; 3]]) -> Option<(usize, usize)> {
    let mut acc = nalgebra::SVector::<f64, D>::zeros();
    let mut total = 0.0;
    for tri in triangles {
        let [a, b, c] = tri.map(|v| vertices[v]);
        let (u, v) = (b - a, c - a);
        let (uu, vv, uv) = (u.norm_squared(), v.norm_squared(), u.dot(&v));
        let w = 0.5 * (uu * vv - uv * uv).max(0.0).sqrt();
        acc += w * (a.coords + b.coords + c.coords) / 3.0;
        total += w;
    }
    let centroid = if total > 0.0 { acc / total } else { acc };
    let mut best: Option<((usize, usize), f64)> = None;
    for &(a, b) in edge_triangles(triangles).keys() {
        let mid = (vertices[a].coords + vertices[b].coords) * 0.5;
        let d = (mid - centroid).norm_squared();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some(((a, b), d));
        }
    }
    best.map(|(e, _)| e)
}

/// Pins for edge `(a, b)`: the midpoint and direction of the edge in
/// `coords` are kept while the endpoints sit `length` apart.
pub fn pin_edge(coords: &[Point2<f64>], a: usize, b: usize, length: f64) -> [(usize, Point2<f64>); 2] {
    let mid = Point2::from((coords[a].coords + coords[b].coords) * 0.5);
    let d = coords[b] - coords[a];
    let dir = d.try_normalize(0.0).unwrap_or(Vector2::x());
    let half = dir * (0.5 * length);
    [(a, mid - half), (b, mid + half)]
}
