//! Moving a seam line and re-stretching the parts on either side.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Point3, Vector3};

use super::error::EditError;
use super::op::AxisMode;
use super::scale::{axial, foot, nearest_bone};
use crate::document::GarmentDocument;
use crate::geometry::{Bone, Mesh3};

struct Part {
    vertices: Vec<usize>,
    /// Axial coordinate of the end away from the seam.
    far: f64,
}

fn part(doc: &GarmentDocument, panel: usize, bone: &Bone, seam_s: f64) -> Part {
    let vertices = doc.panels[panel].corr.clone();
    let s: Vec<f64> = vertices.iter().map(|&v| axial(bone, &doc.garment.vertices[v])).collect();
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let far = if hi - seam_s > seam_s - lo { hi } else { lo };
    Part { vertices, far }
}

/// Fraction of the way from the far end to the seam, clamped to `[0, 1]`.
fn ramp(s: f64, far: f64, seam_s: f64) -> f64 {
    ((s - far) / (seam_s - far)).clamp(0.0, 1.0)
}

/// Moves seam `seam` by `offset` cm. Side A is rescaled between its far end
/// and the seam; side B is rescaled the same way when `fix_far_boundary`,
/// otherwise it travels with the seam.
pub fn move_seam(
    doc: &GarmentDocument,
    seam: usize,
    mode: AxisMode,
    offset: f64,
    fix_far_boundary: bool,
) -> Result<(Mesh3, BTreeSet<usize>), EditError> {
    let line = doc.seams.get(seam).ok_or(EditError::SeamNotFound { seam })?;
    if !offset.is_finite() {
        return Err(EditError::OffsetOutOfRange {
            offset,
            limit: f64::INFINITY,
        });
    }
    let owner = doc.vertex_owner();
    let panel_of = |v: usize| owner[v].map(|(p, _)| p).ok_or(EditError::SeamNotFound { seam });
    let (pa, pb) = (panel_of(line.side_a[0])?, panel_of(line.side_b[0])?);
    if pa == pb {
        return Err(EditError::SelfSeam { seam });
    }
    let g = &doc.garment;
    let seam_vertices: Vec<usize> = line.side_a.iter().chain(&line.side_b).copied().collect();
    let points: Vec<Point3<f64>> = seam_vertices.iter().map(|&v| g.vertices[v]).collect();
    let bone = &doc.body.skeleton[nearest_bone(&doc.body, &points)?];
    let seam_s = line.side_a.iter().map(|&v| axial(bone, &g.vertices[v])).sum::<f64>() / line.side_a.len() as f64;
    let a = part(doc, pa, bone, seam_s);
    let b = part(doc, pb, bone, seam_s);

    let limit = match mode {
        AxisMode::Along => {
            let ext_a = (a.far - seam_s).abs();
            let ext_b = (b.far - seam_s).abs();
            if fix_far_boundary {
                ext_a.min(ext_b)
            } else {
                ext_a
            }
        }
        AxisMode::Perpendicular => points
            .iter()
            .map(|p| (p - foot(bone, p)).norm())
            .fold(f64::INFINITY, f64::min),
    };
    let out_of_range = match mode {
        AxisMode::Along => offset.abs() >= limit,
        AxisMode::Perpendicular => -offset >= limit,
    };
    if out_of_range {
        return Err(EditError::OffsetOutOfRange { offset, limit });
    }

    let mut edited = g.clone();
    let mut affected: BTreeSet<usize> = (0..g.triangles.len())
        .filter(|&t| g.panel_ids[t] == pa || g.panel_ids[t] == pb)
        .collect();
    if offset == 0.0 {
        return Ok((edited, affected));
    }

    let on_seam: BTreeSet<usize> = seam_vertices.iter().copied().collect();
    let displacement = |v: usize, weight: f64| -> Vector3<f64> {
        let p = g.vertices[v];
        let w = if on_seam.contains(&v) { 1.0 } else { weight };
        match mode {
            AxisMode::Along => bone.axis() * (offset * w),
            AxisMode::Perpendicular => {
                let r = p - foot(bone, &p);
                r.try_normalize(0.0).unwrap_or_else(Vector3::zeros) * (offset * w)
            }
        }
    };
    let mut moved: BTreeMap<usize, Vector3<f64>> = BTreeMap::new();
    for &v in &a.vertices {
        let s = axial(bone, &g.vertices[v]);
        moved.insert(v, displacement(v, ramp(s, a.far, seam_s)));
    }
    for &v in &b.vertices {
        let w = if fix_far_boundary {
            ramp(axial(bone, &g.vertices[v]), b.far, seam_s)
        } else {
            1.0
        };
        moved.insert(v, displacement(v, w));
    }
    // copies glued to moved vertices in other panels travel along
    let glue = doc.glue();
    let mut extra = BTreeMap::new();
    for members in glue.classes().into_values() {
        if let Some(d) = members.iter().find_map(|m| moved.get(m)) {
            for &m in &members {
                if !moved.contains_key(&m) {
                    extra.insert(m, *d);
                }
            }
        }
    }
    if !extra.is_empty() {
        for (t, tri) in g.triangles.iter().enumerate() {
            if tri.iter().any(|v| extra.contains_key(v)) {
                affected.insert(t);
            }
        }
    }
    moved.extend(extra);
    for (v, d) in moved {
        edited.vertices[v] = g.vertices[v] + d;
    }
    Ok((edited, affected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{two_part_cylinder, CylinderSpec};

    fn spec() -> CylinderSpec {
        CylinderSpec {
            height: 10.0,
            rows: 10,
            ..Default::default()
        }
    }

    #[test]
    fn affine_rescale_of_both_parts() {
        let doc = two_part_cylinder(spec(), 5);
        let (m, affected) = move_seam(&doc, 2, AxisMode::Along, -1.0, true).unwrap();
        assert_eq!(affected.len(), doc.garment.triangles.len());
        for (v, p) in doc.garment.vertices.iter().enumerate() {
            let z = m.vertices[v].z;
            let lower = doc.panels[0].corr.contains(&v);
            let expected = if lower {
                p.z * 4.0 / 5.0
            } else {
                10.0 - (10.0 - p.z) * 6.0 / 5.0
            };
            assert!((z - expected).abs() < 1e-12, "vertex {v}: {z} vs {expected}");
        }
    }

    #[test]
    fn free_far_boundary_translates() {
        let doc = two_part_cylinder(spec(), 5);
        let (m, _) = move_seam(&doc, 2, AxisMode::Along, 1.0, false).unwrap();
        for &v in &doc.panels[1].corr {
            assert!((m.vertices[v].z - doc.garment.vertices[v].z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_offset_is_identity() {
        let doc = two_part_cylinder(spec(), 5);
        let (m, _) = move_seam(&doc, 2, AxisMode::Along, 0.0, true).unwrap();
        assert_eq!(m, doc.garment);
    }

    #[test]
    fn out_of_range_and_missing() {
        let doc = two_part_cylinder(spec(), 5);
        assert!(matches!(
            move_seam(&doc, 2, AxisMode::Along, -5.5, true),
            Err(EditError::OffsetOutOfRange { .. })
        ));
        assert_eq!(
            move_seam(&doc, 7, AxisMode::Along, 1.0, true),
            Err(EditError::SeamNotFound { seam: 7 })
        );
        assert_eq!(
            move_seam(&doc, 0, AxisMode::Along, 1.0, true),
            Err(EditError::SelfSeam { seam: 0 })
        );
    }
}
