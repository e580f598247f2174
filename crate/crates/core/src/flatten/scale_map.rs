//! Intrinsic scale matrices and per-triangle pattern targets.
//!
//! `M = F(t) F(T)⁻¹` maps the pattern triangle's frame to the drape
//! triangle's frame. After a 3D edit, the pattern triangle that keeps `M`
//! is `F(T') = M⁻¹ F(t')`.

use nalgebra::{Matrix2, Point, Point2, Point3, Vector2};

use super::error::{FlattenError, Side};
use crate::geometry::frame::{closest_rotation, local_frame};
use crate::geometry::{Mesh3, Panel};

/// Below this determinant a frame or scale matrix counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntrinsicScaleMap {
    pub matrices: Vec<Matrix2<f64>>,
    pub designated_edges: Vec<usize>,
}

impl IntrinsicScaleMap {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrices: vec![Matrix2::identity(); n],
            designated_edges: vec![0; n],
        }
    }
}

fn frame3(tri: &[Point3<f64>; 3], edge: usize, triangle: usize) -> Result<Matrix2<f64>, FlattenError> {
    local_frame(tri, edge)
        .map(|f| f.matrix)
        .map_err(|_| FlattenError::DegenerateTriangle {
            side: Side::Garment,
            triangle,
        })
}

fn frame2(tri: &[Point2<f64>; 3], edge: usize, triangle: usize) -> Result<Matrix2<f64>, FlattenError> {
    local_frame(tri, edge)
        .map(|f| f.matrix)
        .map_err(|_| FlattenError::DegenerateTriangle {
            side: Side::Pattern,
            triangle,
        })
}

/// `F(t) F(T)⁻¹` for one triangle pair.
pub fn scale_matrix(
    drape: &[Point3<f64>; 3],
    pattern: &[Point2<f64>; 3],
    edge: usize,
    triangle: usize,
) -> Result<Matrix2<f64>, FlattenError> {
    let ft = frame3(drape, edge, triangle)?;
    let fp = frame2(pattern, edge, triangle)?;
    let inv = fp
        .try_inverse()
        .filter(|_| fp.determinant().abs() > SINGULAR_DET)
        .ok_or(FlattenError::SingularFrame { triangle })?;
    Ok(ft * inv)
}

pub fn compute_intrinsic_scale_map(panel: &Panel, garment: &Mesh3) -> Result<IntrinsicScaleMap, FlattenError> {
    let mut map = IntrinsicScaleMap::default();
    for t in 0..panel.triangles.len() {
        let m = scale_matrix(&panel.garment_points(garment, t), &panel.triangle_points(t), 0, t)?;
        map.matrices.push(m);
        map.designated_edges.push(0);
    }
    Ok(map)
}

/// Target pattern frames `M⁻¹ F(t')` for every triangle of `panel`.
pub fn per_triangle_targets(
    map: &IntrinsicScaleMap,
    panel: &Panel,
    edited: &Mesh3,
) -> Result<Vec<Matrix2<f64>>, FlattenError> {
    if map.len() != panel.triangles.len() {
        return Err(FlattenError::MismatchedTopology {
            expected: panel.triangles.len(),
            found: map.len(),
        });
    }
    if let Some(&bad) = panel.corr.iter().find(|&&g| g >= edited.vertices.len()) {
        return Err(FlattenError::MismatchedTopology {
            expected: bad + 1,
            found: edited.vertices.len(),
        });
    }
    let mut out = Vec::with_capacity(map.len());
    for t in 0..map.len() {
        let edge = map.designated_edges[t];
        let ft = frame3(&panel.garment_points(edited, t), edge, t)?;
        out.push(target_frame(&map.matrices[t], &ft, t)?);
    }
    Ok(out)
}

pub fn target_frame(m: &Matrix2<f64>, edited_frame: &Matrix2<f64>, triangle: usize) -> Result<Matrix2<f64>, FlattenError> {
    if m.determinant().abs() <= SINGULAR_DET {
        return Err(FlattenError::SingularFrame { triangle });
    }
    let inv = m.try_inverse().ok_or(FlattenError::SingularFrame { triangle })?;
    Ok(inv * edited_frame)
}

/// Orthonormal basis of a triangle's frame: `e1` along the designated edge,
/// `e2` completing it towards the third vertex.
fn frame_basis<const D: usize>(tri: &[Point<f64, D>; 3], edge: usize) -> Option<[nalgebra::SVector<f64, D>; 2]> {
    let k = edge % 3;
    let u = tri[(k + 1) % 3] - tri[k];
    let v = tri[(k + 2) % 3] - tri[k];
    let e1 = u.try_normalize(0.0)?;
    let e2 = (v - e1 * v.dot(&e1)).try_normalize(0.0)?;
    Some([e1, e2])
}

/// Edge vectors of `sub` (designated edge `edge`) written in `basis`.
fn edges_in_basis<const D: usize>(
    sub: &[Point<f64, D>; 3],
    edge: usize,
    basis: &[nalgebra::SVector<f64, D>; 2],
) -> Matrix2<f64> {
    let k = edge % 3;
    let u = sub[(k + 1) % 3] - sub[k];
    let v = sub[(k + 2) % 3] - sub[k];
    Matrix2::from_columns(&[
        Vector2::new(u.dot(&basis[0]), u.dot(&basis[1])),
        Vector2::new(v.dot(&basis[0]), v.dot(&basis[1])),
    ])
}

/// Scale matrix for a triangle carved out of (or attached to) a host
/// triangle: the host's matrix re-expressed in the new triangle's frames.
pub fn transfer_scale_matrix(
    host_drape: &[Point3<f64>; 3],
    host_pattern: &[Point2<f64>; 3],
    host_edge: usize,
    host_m: &Matrix2<f64>,
    sub_drape: &[Point3<f64>; 3],
    sub_pattern: &[Point2<f64>; 3],
    triangle: usize,
) -> Result<Matrix2<f64>, FlattenError> {
    let degenerate = |side| FlattenError::DegenerateTriangle { side, triangle };
    let b3 = frame_basis(host_drape, host_edge).ok_or(degenerate(Side::Garment))?;
    let b2 = frame_basis(host_pattern, host_edge).ok_or(degenerate(Side::Pattern))?;
    let f3 = frame3(sub_drape, 0, triangle)?;
    let f2 = frame2(sub_pattern, 0, triangle)?;
    let e3 = edges_in_basis(sub_drape, 0, &b3);
    let e2 = edges_in_basis(sub_pattern, 0, &b2);
    let r3 = closest_rotation(&(f3 * e3.try_inverse().ok_or(degenerate(Side::Garment))?));
    let r2 = closest_rotation(&(f2 * e2.try_inverse().ok_or(degenerate(Side::Pattern))?));
    Ok(r3 * host_m * r2.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frame::rotation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_mat_close(a: &Matrix2<f64>, b: &Matrix2<f64>, tol: f64) {
        assert!((a - b).abs().max() < tol, "{a} vs {b}");
    }

    #[test]
    fn congruent_triangles_give_identity() {
        let drape = [
            Point3::new(1.0, 2.0, 3.0),
            Point3::new(1.0, 5.0, 3.0),
            Point3::new(1.0, 2.5, 7.0),
        ];
        let pattern = [Point2::new(0.0, 0.0), Point2::new(3.0, 0.0), Point2::new(0.5, 4.0)];
        let m = scale_matrix(&drape, &pattern, 0, 0).unwrap();
        assert_mat_close(&m, &Matrix2::identity(), 1e-12);
    }

    #[test]
    fn uniform_drape_scale() {
        let pattern = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.3, 0.8)];
        let drape = pattern.map(|p| Point3::new(2.0 * p.x, 0.0, 2.0 * p.y));
        let m = scale_matrix(&drape, &pattern, 0, 0).unwrap();
        assert_mat_close(&m, &(2.0 * Matrix2::identity()), 1e-12);
    }

    #[test]
    fn anisotropic_frames_multiply() {
        let drape = [Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let pattern = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let m = scale_matrix(&drape, &pattern, 0, 0).unwrap();
        assert_mat_close(&m, &Matrix2::new(2.0, 0.0, 0.0, 1.0), 1e-15);
    }

    #[test]
    fn elastic_design_scales_pattern_by_edit_factor() {
        // pattern frame I, drape frame 2I, drape grown to 3I
        let m = 2.0 * Matrix2::identity();
        let target = target_frame(&m, &(3.0 * Matrix2::identity()), 0).unwrap();
        assert_mat_close(&target, &(1.5 * Matrix2::identity()), 1e-15);
    }

    #[test]
    fn target_recovers_edited_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = Matrix2::from_fn(|_, _| rng.random_range(-2.0..2.0)) + 3.0 * Matrix2::identity();
            let te = Matrix2::new(rng.random_range(0.5..3.0), rng.random_range(-1.0..1.0), 0.0, rng.random_range(0.5..3.0));
            let target = target_frame(&m, &te, 0).unwrap();
            assert_mat_close(&(m * target), &te, 1e-9);
        }
    }

    #[test]
    fn transfer_matches_direct_computation_for_subtriangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let pattern = [
                Point2::new(0.0, 0.0),
                Point2::new(rng.random_range(1.0..3.0), rng.random_range(-0.5..0.5)),
                Point2::new(rng.random_range(-0.5..1.0), rng.random_range(1.0..3.0)),
            ];
            // random affine image in 3D
            let a = nalgebra::Matrix3x2::from_fn(|_, _| rng.random_range(-2.0..2.0));
            let o = nalgebra::Vector3::new(1.0, -2.0, 0.5);
            let lift = |p: &Point2<f64>| Point3::from(a * p.coords + o);
            let drape = pattern.map(|p| lift(&p));
            let Ok(m) = scale_matrix(&drape, &pattern, 0, 0) else { continue };
            let bary = |w: [f64; 3]| {
                Point2::from(pattern[0].coords * w[0] + pattern[1].coords * w[1] + pattern[2].coords * w[2])
            };
            let sub2 = [bary([0.2, 0.5, 0.3]), bary([0.0, 0.5, 0.5]), bary([1.0, 0.0, 0.0])];
            let sub3 = sub2.map(|p| lift(&p));
            let transferred = transfer_scale_matrix(&drape, &pattern, 0, &m, &sub3, &sub2, 0).unwrap();
            let direct = scale_matrix(&sub3, &sub2, 0, 0).unwrap();
            assert_mat_close(&transferred, &direct, 1e-9 * (1.0 + direct.abs().max()));
        }
    }

    #[test]
    fn transfer_survives_rotation_of_pattern() {
        let pattern = [Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.0, 2.0)];
        let drape = [Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 0.0, 1.0)];
        let m = scale_matrix(&drape, &pattern, 0, 0).unwrap();
        let r = rotation(0.7);
        let rot = pattern.map(|p| Point2::from(r * p.coords));
        let again = scale_matrix(&drape, &rot, 0, 0).unwrap();
        assert_mat_close(&m, &again, 1e-12);
    }
}
