//! Pushing garment vertices out of the body.

use nalgebra::Point3;

use crate::geometry::query::signed_distance;
use crate::geometry::{BodyModel, Mesh3};

/// Clearance (cm) a pushed vertex keeps from the body surface.
pub const CLEARANCE: f64 = 0.2;

const MAX_PASSES: usize = 8;

/// Moves every candidate with negative signed distance to the body along the
/// nearest body triangle's outward normal, to `CLEARANCE` from that
/// triangle's plane. Vertices outside the body are not touched. Returns the
/// adjusted mesh and the vertices that moved.
pub fn resolve_body_collisions(garment: &Mesh3, body: &BodyModel, candidates: &[usize]) -> (Mesh3, Vec<usize>) {
    let mut out = garment.clone();
    let mut moved = Vec::new();
    if body.mesh.triangles.is_empty() {
        return (out, moved);
    }
    for &v in candidates {
        if v >= out.vertices.len() {
            continue;
        }
        let mut touched = false;
        for _ in 0..MAX_PASSES {
            let p = out.vertices[v];
            let Some((sd, t, n)) = signed_distance(&body.mesh, &p) else {
                break;
            };
            if sd >= 0.0 {
                break;
            }
            // distance below the nearest triangle's plane
            let anchor: Point3<f64> = body.mesh.vertices[body.mesh.triangles[t][0]];
            let depth = (p - anchor).dot(&n);
            out.vertices[v] = p + n * (CLEARANCE - depth);
            touched = true;
        }
        if touched {
            moved.push(v);
        }
    }
    (out, moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::wall_body;
    use nalgebra::Vector3;

    #[test]
    fn outside_vertices_untouched() {
        let body = wall_body(0.0, 10.0);
        let garment = Mesh3::new(vec![Point3::new(0.0, 3.0, 0.0)], vec![]);
        let (out, moved) = resolve_body_collisions(&garment, &body, &[0]);
        assert_eq!(out, garment);
        assert!(moved.is_empty());
    }

    #[test]
    fn vertex_below_wall_is_pushed_to_clearance() {
        let body = wall_body(0.0, 10.0);
        let garment = Mesh3::new(vec![Point3::new(1.0, -0.5, 2.0)], vec![]);
        let (out, moved) = resolve_body_collisions(&garment, &body, &[0]);
        assert_eq!(moved, vec![0]);
        let d = out.vertices[0] - garment.vertices[0];
        assert!((d - Vector3::new(0.0, 0.7, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn equidistant_wedge_uses_lowest_triangle() {
        // two body triangles meeting along the z-axis, normals +x and +y
        let body = BodyModel {
            mesh: Mesh3 {
                vertices: vec![
                    Point3::new(0.0, 0.0, -5.0),
                    Point3::new(0.0, 0.0, 5.0),
                    Point3::new(0.0, -10.0, 0.0),
                    Point3::new(-10.0, 0.0, 0.0),
                ],
                triangles: vec![[0, 1, 2], [1, 0, 3]],
                panel_ids: vec![],
            },
            ..Default::default()
        };
        let n0 = body.mesh.normal(0);
        let n1 = body.mesh.normal(1);
        assert!((n0 - Vector3::x()).norm() < 1e-12 && (n1 - Vector3::y()).norm() < 1e-12);
        let p = Point3::new(-0.5, -0.5, 0.0);
        let garment = Mesh3::new(vec![p], vec![]);
        let (out, _) = resolve_body_collisions(&garment, &body, &[0]);
        // tie between both faces; the lower index wins and its +x normal is used
        assert!((out.vertices[0] - Point3::new(0.2, -0.5, 0.0)).norm() < 1e-12);
    }
}
