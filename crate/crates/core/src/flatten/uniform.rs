//! Baseline flattening that ignores the pattern's embedded scale: every
//! triangle targets its own 3D shape.

use nalgebra::{Point2, Vector2};

use super::error::FlattenError;
use super::pins::{center_edge, pin_edge};
use super::stitch::{stitch, SolverConfig, StitchProblem, StitchResult};
use crate::geometry::frame::{frame_vertex_positions, local_frame};
use crate::geometry::topology::{boundary_loops, edge_triangles};
use crate::geometry::Mesh3;
use crate::linalg::SymmetricBuilder;

/// Tutte embedding: the boundary loop on a circle of matching perimeter,
/// interior vertices at the average of their neighbours.
pub fn tutte_embedding(mesh: &Mesh3) -> Result<Vec<Point2<f64>>, FlattenError> {
    let n = mesh.vertices.len();
    let loops = boundary_loops(&mesh.triangles);
    let boundary = loops
        .into_iter()
        .max_by_key(|l| l.len())
        .ok_or_else(|| FlattenError::InvalidProblem("mesh has no boundary".into()))?;
    if boundary.len() < 3 {
        return Err(FlattenError::TooShortBoundary { len: boundary.len() });
    }
    let lengths: Vec<f64> = (0..boundary.len())
        .map(|i| (mesh.vertices[boundary[(i + 1) % boundary.len()]] - mesh.vertices[boundary[i]]).norm())
        .collect();
    let perimeter: f64 = lengths.iter().sum();
    let radius = perimeter / std::f64::consts::TAU;

    let mut coords = vec![Point2::origin(); n];
    let mut on_boundary = vec![false; n];
    let mut arc = 0.0;
    for (i, &v) in boundary.iter().enumerate() {
        let angle = std::f64::consts::TAU * arc / perimeter;
        coords[v] = Point2::new(radius * angle.cos(), radius * angle.sin());
        on_boundary[v] = true;
        arc += lengths[i];
    }

    let interior: Vec<usize> = (0..n).filter(|&v| !on_boundary[v]).collect();
    if interior.is_empty() {
        return Ok(coords);
    }
    let mut index = vec![usize::MAX; n];
    for (k, &v) in interior.iter().enumerate() {
        index[v] = k;
    }
    let mut neighbours = vec![Vec::new(); n];
    for &(a, b) in edge_triangles(&mesh.triangles).keys() {
        neighbours[a].push(b);
        neighbours[b].push(a);
    }
    let m = interior.len();
    let mut lap = SymmetricBuilder::new(m);
    let mut rhs = vec![Vector2::zeros(); m];
    for (k, &v) in interior.iter().enumerate() {
        lap.add(k, k, neighbours[v].len() as f64);
        for &w in &neighbours[v] {
            if on_boundary[w] {
                rhs[k] += coords[w].coords;
            } else if index[w] < k {
                lap.add(k, index[w], -1.0);
            }
        }
    }
    let factor = lap.factor()?;
    let xs = factor.solve(&rhs.iter().map(|r| r.x).collect::<Vec<_>>());
    let ys = factor.solve(&rhs.iter().map(|r| r.y).collect::<Vec<_>>());
    for (k, &v) in interior.iter().enumerate() {
        coords[v] = Point2::new(xs[k], ys[k]);
    }
    Ok(coords)
}

/// Flattens `mesh` so each 2D triangle is as congruent as possible to its
/// 3D triangle.
pub fn flatten_uniform(
    mesh: &Mesh3,
    initial: Option<&[Point2<f64>]>,
    config: &SolverConfig,
) -> Result<StitchResult, FlattenError> {
    let mut frames = Vec::with_capacity(mesh.triangles.len());
    for t in 0..mesh.triangles.len() {
        let f = local_frame(&mesh.triangle_points(t), 0).map_err(|_| FlattenError::DegenerateTriangle {
            side: super::error::Side::Garment,
            triangle: t,
        })?;
        frames.push(f.matrix);
    }
    let start = match initial {
        Some(c) => c.to_vec(),
        None => tutte_embedding(mesh)?,
    };
    let mut problem = StitchProblem::from_frames(
        mesh.vertices.len(),
        mesh.triangles.clone(),
        &frames,
        &vec![0; frames.len()],
        1.0,
    );
    let (a, b) = center_edge(&mesh.vertices, &mesh.triangles)
        .ok_or_else(|| FlattenError::InvalidProblem("mesh has no edges".into()))?;
    let length = (mesh.vertices[b] - mesh.vertices[a]).norm();
    problem.fixed = pin_edge(&start, a, b, length).to_vec();
    if mesh.triangles.len() == 1 {
        // a lone triangle is its own flattening
        let pos = frame_vertex_positions(&frames[0], 0);
        let tri = mesh.triangles[0];
        let mut coords = start.clone();
        let [(_, pa), (_, pb)] = pin_edge(&start, a, b, length);
        let (ia, ib) = (tri.iter().position(|&v| v == a), tri.iter().position(|&v| v == b));
        if let (Some(ia), Some(ib)) = (ia, ib) {
            // similarity mapping frame positions onto the pins
            let (fa, fb) = (pos[ia], pos[ib]);
            let (src, dst) = (fb - fa, pb - pa);
            let scale_rot = nalgebra::Matrix2::new(src.x, -src.y, src.y, src.x)
                .try_inverse()
                .map(|inv| inv * dst)
                .unwrap_or(Vector2::new(1.0, 0.0));
            let r = nalgebra::Matrix2::new(scale_rot.x, -scale_rot.y, scale_rot.y, scale_rot.x);
            for k in 0..3 {
                coords[tri[k]] = pa + r * (pos[k] - fa);
            }
        }
        let rotations = problem.fit_rotations(&coords);
        let energy = problem.energy(&coords, &rotations, config);
        return Ok(StitchResult {
            coords,
            energy_trace: vec![energy],
            rotations,
            iterations: 0,
        });
    }
    stitch(&problem, &start, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::grid_mesh;
    use nalgebra::Point3;

    #[test]
    fn single_triangle_is_its_own_shape() {
        let mesh = Mesh3::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 1.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let r = flatten_uniform(&mesh, None, &SolverConfig::default()).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let d2 = (r.coords[i] - r.coords[j]).norm();
            let d3 = (mesh.vertices[i] - mesh.vertices[j]).norm();
            assert!((d2 - d3).abs() < 1e-12);
        }
    }

    #[test]
    fn tutte_interior_is_average() {
        let mesh = grid_mesh(3, 3, 1.0);
        let c = tutte_embedding(&mesh).unwrap();
        // centre vertex of a symmetric 3x3 grid sits at the circle centre
        assert!(c[4].coords.norm() < 1e-9);
    }

    #[test]
    fn planar_mesh_is_recovered() {
        let mut mesh = grid_mesh(4, 3, 1.5);
        for p in &mut mesh.vertices {
            *p = Point3::new(p.x * 0.8, 0.3 * p.x + p.y, 0.6 * p.x);
        }
        let config = SolverConfig {
            max_iterations: 2000,
            rel_tolerance: 1e-15,
            ..SolverConfig::default()
        };
        let r = flatten_uniform(&mesh, None, &config).unwrap();
        for &(a, b) in edge_triangles(&mesh.triangles).keys() {
            let d2 = (r.coords[a] - r.coords[b]).norm();
            let d3 = (mesh.vertices[a] - mesh.vertices[b]).norm();
            assert!((d2 - d3).abs() < 1e-6, "{d2} vs {d3}");
        }
    }
}
