//! Mirror counterparts of edits across the document's symmetry plane.

use nalgebra::{Point3, Vector3};

use super::error::EditError;
use super::op::{BoundaryRef, Camera, EditOp, Region};
use crate::document::GarmentDocument;
use crate::geometry::{GeometryError, Symmetry};

fn tolerance(doc: &GarmentDocument) -> f64 {
    let v = &doc.garment.vertices;
    let (lo, hi) = v.iter().fold(
        (Point3::from([f64::INFINITY; 3]), Point3::from([f64::NEG_INFINITY; 3])),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let diag = if v.is_empty() { 0.0 } else { (hi - lo).norm() };
    1e-6 * (1.0 + diag)
}

fn no_counterpart(what: String) -> EditError {
    EditError::Geometry(GeometryError::NoMirrorCounterpart { what })
}

fn triangle_centroid(doc: &GarmentDocument, t: usize) -> Point3<f64> {
    let [a, b, c] = doc.garment.triangle_points(t);
    Point3::from((a.coords + b.coords + c.coords) / 3.0)
}

fn counterpart_panel(sym: &Symmetry, panel: usize) -> Result<usize, EditError> {
    sym.counterpart(panel)
        .ok_or(EditError::Geometry(GeometryError::UnpairedPanel { panel }))
}

fn mirror_region(doc: &GarmentDocument, sym: &Symmetry, region: &Region, tol: f64) -> Result<Region, EditError> {
    let g = &doc.garment;
    let lists = doc.panel_triangle_lists();
    let owner = doc.vertex_owner();
    let mut triangles = Vec::with_capacity(region.triangles.len());
    for &t in &region.triangles {
        if t >= g.triangles.len() {
            return Err(EditError::InvalidRegion(format!("triangle {t} out of range")));
        }
        let q = counterpart_panel(sym, g.panel_ids[t])?;
        let target = sym.reflect_point(&triangle_centroid(doc, t));
        let best = lists[q]
            .iter()
            .map(|&u| (u, (triangle_centroid(doc, u) - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .filter(|&(_, d)| d <= tol)
            .ok_or_else(|| no_counterpart(format!("triangle {t}")))?;
        triangles.push(best.0);
    }
    let mut anchors = Vec::with_capacity(region.anchors.len());
    for &v in &region.anchors {
        let Some((p, _)) = owner.get(v).copied().flatten() else {
            return Err(EditError::InvalidRegion(format!("anchor {v} out of range")));
        };
        let q = counterpart_panel(sym, p)?;
        let target = sym.reflect_point(&g.vertices[v]);
        let best = doc.panels[q]
            .corr
            .iter()
            .map(|&u| (u, (g.vertices[u] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .filter(|&(_, d)| d <= tol)
            .ok_or_else(|| no_counterpart(format!("vertex {v}")))?;
        anchors.push(best.0);
    }
    Ok(Region { triangles, anchors })
}

fn mirror_seam(doc: &GarmentDocument, sym: &Symmetry, seam: usize, tol: f64) -> Result<usize, EditError> {
    let Some(s) = doc.seams.get(seam) else {
        return Err(EditError::SeamNotFound { seam });
    };
    let v = &doc.garment.vertices;
    let reflected: Vec<Point3<f64>> = s.side_a.iter().map(|&i| sym.reflect_point(&v[i])).collect();
    let matches = |chain: &[usize]| {
        chain.len() == reflected.len()
            && (chain.iter().zip(&reflected).all(|(&i, r)| (v[i] - r).norm() <= tol)
                || chain.iter().rev().zip(&reflected).all(|(&i, r)| (v[i] - r).norm() <= tol))
    };
    doc.seams
        .iter()
        .position(|other| matches(&other.side_a))
        .ok_or_else(|| no_counterpart(format!("seam {seam}")))
}

fn mirror_pick(sym: &Symmetry, b: &BoundaryRef) -> BoundaryRef {
    BoundaryRef {
        pick: sym.reflect_point(&Point3::from(b.pick)).into(),
    }
}

fn mirror_camera(sym: &Symmetry, c: &Camera) -> Camera {
    Camera {
        eye: sym.reflect_point(&Point3::from(c.eye)).into(),
        target: sym.reflect_point(&Point3::from(c.target)).into(),
        up: sym.reflect_vector(&Vector3::from(c.up)).into(),
        ..*c
    }
}

fn normalized(op: &EditOp) -> EditOp {
    let mut op = op.clone();
    if let EditOp::ScaleRegion { region, .. } = &mut op {
        region.triangles.sort_unstable();
        region.triangles.dedup();
        region.anchors.sort_unstable();
        region.anchors.dedup();
    }
    op
}

/// The reflection of `op`, or `None` when the op is its own mirror image.
pub fn mirror_edit(doc: &GarmentDocument, op: &EditOp) -> Result<Option<EditOp>, EditError> {
    let sym = doc
        .symmetry
        .as_ref()
        .ok_or(EditError::Geometry(GeometryError::NoSymmetryDeclared))?;
    let tol = tolerance(doc);
    let mirrored = match op {
        EditOp::ScaleRegion { region, mode, factor } => EditOp::ScaleRegion {
            region: mirror_region(doc, sym, region, tol)?,
            mode: *mode,
            factor: *factor,
        },
        EditOp::MoveSeam {
            seam,
            mode,
            offset,
            fix_far_boundary,
        } => EditOp::MoveSeam {
            seam: mirror_seam(doc, sym, *seam, tol)?,
            mode: *mode,
            offset: *offset,
            fix_far_boundary: *fix_far_boundary,
        },
        EditOp::Cut {
            sketch,
            camera,
            both_sides,
            discard,
        } => EditOp::Cut {
            sketch: sketch.iter().map(|&[x, y]| [-x, y]).collect(),
            camera: mirror_camera(sym, camera),
            both_sides: *both_sides,
            discard: discard.map(|d| d.opposite()),
        },
        EditOp::Shorten { boundary, distance } => EditOp::Shorten {
            boundary: mirror_pick(sym, boundary),
            distance: *distance,
        },
        EditOp::Extend { boundary, distance } => EditOp::Extend {
            boundary: mirror_pick(sym, boundary),
            distance: *distance,
        },
    };
    if normalized(&mirrored) == normalized(op) {
        Ok(None)
    } else {
        Ok(Some(mirrored))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::op::{AxisMode, Projection, StrokeSide};
    use crate::fixtures;

    #[test]
    fn region_maps_to_the_other_sleeve() {
        let doc = fixtures::mirrored_sleeves();
        let lists = doc.panel_triangle_lists();
        let op = EditOp::ScaleRegion {
            region: Region {
                triangles: lists[0][..6].to_vec(),
                anchors: vec![doc.panels[0].corr[0]],
            },
            mode: AxisMode::Perpendicular,
            factor: 1.2,
        };
        let Some(EditOp::ScaleRegion { region, .. }) = mirror_edit(&doc, &op).unwrap() else {
            panic!("expected a mirrored region");
        };
        assert_eq!(region.triangles, lists[1][..6].to_vec());
        assert_eq!(region.anchors, vec![doc.panels[1].corr[0]]);
    }

    #[test]
    fn cut_swaps_sides() {
        let doc = fixtures::mirrored_sleeves();
        let op = EditOp::Cut {
            sketch: vec![[1.0, 2.0], [3.0, 4.0]],
            camera: Camera {
                eye: [5.0, -20.0, 0.0],
                target: [5.0, 0.0, 0.0],
                up: [0.0, 0.0, 1.0],
                projection: Projection::Perspective { fov_y: 40.0 },
                viewport: [800.0, 600.0],
            },
            both_sides: false,
            discard: Some(StrokeSide::Left),
        };
        let Some(EditOp::Cut {
            sketch, camera, discard, ..
        }) = mirror_edit(&doc, &op).unwrap()
        else {
            panic!("expected a mirrored cut");
        };
        assert_eq!(sketch, vec![[-1.0, 2.0], [-3.0, 4.0]]);
        assert_eq!(camera.eye, [-5.0, -20.0, 0.0]);
        assert_eq!(discard, Some(StrokeSide::Right));
    }

    #[test]
    fn seams_and_missing_symmetry() {
        let doc = fixtures::mirrored_sleeves();
        let op = EditOp::MoveSeam {
            seam: 0,
            mode: AxisMode::Along,
            offset: 0.5,
            fix_far_boundary: false,
        };
        let mirrored = mirror_edit(&doc, &op).unwrap().unwrap();
        assert!(matches!(mirrored, EditOp::MoveSeam { seam: 1, .. }));
        let plain = fixtures::flat_square(1.0, 2);
        assert_eq!(mirror_edit(&plain, &op).unwrap_err().name(), "NoSymmetryDeclared");
    }
}
