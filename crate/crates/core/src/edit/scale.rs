//! Regional scaling relative to the skeleton.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Point3, Vector3};

use super::error::EditError;
use super::op::{AxisMode, Region};
use crate::document::GarmentDocument;
use crate::geometry::topology::triangle_components;
use crate::geometry::{BodyModel, Bone, Mesh3};

/// Bones farther than this (mean distance, cm) are not associated.
pub const BONE_REACH: f64 = 100.0;

pub const MIN_FACTOR: f64 = 0.1;
pub const MAX_FACTOR: f64 = 10.0;

/// Bone with the smallest mean distance to `points`.
pub fn nearest_bone(body: &BodyModel, points: &[Point3<f64>]) -> Result<usize, EditError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, bone) in body.skeleton.iter().enumerate() {
        let mean = points.iter().map(|p| bone.distance(p)).sum::<f64>() / points.len().max(1) as f64;
        if best.is_none_or(|(_, d)| mean < d) {
            best = Some((i, mean));
        }
    }
    match best {
        Some((i, d)) if d <= BONE_REACH => Ok(i),
        Some((_, d)) => Err(EditError::NoNearbyBone { distance: d }),
        None => Err(EditError::NoNearbyBone { distance: f64::INFINITY }),
    }
}

/// Axial coordinate of `p` along `bone`, measured from its start.
pub fn axial(bone: &Bone, p: &Point3<f64>) -> f64 {
    (p - bone.start).dot(&bone.axis())
}

/// Foot of `p` on the infinite bone line.
pub fn foot(bone: &Bone, p: &Point3<f64>) -> Point3<f64> {
    bone.start + bone.axis() * axial(bone, p)
}

pub fn validate_factor(factor: f64) -> Result<(), EditError> {
    if factor > MIN_FACTOR && factor < MAX_FACTOR {
        Ok(())
    } else {
        Err(EditError::InvalidFactor(factor))
    }
}

/// Checks the region and returns its vertices.
pub fn validate_region(doc: &GarmentDocument, region: &Region) -> Result<BTreeSet<usize>, EditError> {
    if region.triangles.is_empty() {
        return Err(EditError::EmptyRegion);
    }
    let g = &doc.garment;
    if let Some(&t) = region.triangles.iter().find(|&&t| t >= g.triangles.len()) {
        return Err(EditError::InvalidRegion(format!("triangle {t} out of range")));
    }
    if let Some(&v) = region.anchors.iter().find(|&&v| v >= g.vertices.len()) {
        return Err(EditError::InvalidRegion(format!("anchor {v} out of range")));
    }
    let mut per_panel: BTreeMap<usize, Vec<[usize; 3]>> = BTreeMap::new();
    let set: BTreeSet<usize> = region.triangles.iter().copied().collect();
    for &t in &set {
        per_panel.entry(g.panel_ids[t]).or_default().push(g.triangles[t]);
    }
    for (&panel, tris) in &per_panel {
        if triangle_components(tris).len() != 1 {
            return Err(EditError::DisconnectedRegion { panel });
        }
    }
    Ok(set.iter().flat_map(|&t| g.triangles[t]).collect())
}

/// Per-vertex blend weight: 0 on the region rim (vertices also touching
/// triangles outside the region, across seams too) and on anchors, 1 inside.
fn blend_weights(doc: &GarmentDocument, region: &BTreeSet<usize>, vertices: &BTreeSet<usize>, anchors: &[usize]) -> BTreeMap<usize, f64> {
    let glue = doc.glue();
    let mut outside_reps = BTreeSet::new();
    for (t, tri) in doc.garment.triangles.iter().enumerate() {
        if !region.contains(&t) {
            for &v in tri {
                outside_reps.insert(glue.rep(v));
            }
        }
    }
    let anchor_reps: BTreeSet<usize> = anchors.iter().map(|&v| glue.rep(v)).collect();
    vertices
        .iter()
        .map(|&v| {
            let r = glue.rep(v);
            let w = if outside_reps.contains(&r) || anchor_reps.contains(&r) {
                0.0
            } else {
                1.0
            };
            (v, w)
        })
        .collect()
}

/// Scales the region along or across its bone. Returns the edited garment
/// and the affected triangles.
pub fn scale_region(
    doc: &GarmentDocument,
    region: &Region,
    mode: AxisMode,
    factor: f64,
) -> Result<(Mesh3, BTreeSet<usize>), EditError> {
    validate_factor(factor)?;
    let vertices = validate_region(doc, region)?;
    let g = &doc.garment;
    let points: Vec<Point3<f64>> = vertices.iter().map(|&v| g.vertices[v]).collect();
    let bone = &doc.body.skeleton[nearest_bone(&doc.body, &points)?];
    let affected: BTreeSet<usize> = region.triangles.iter().copied().collect();
    let mut edited = g.clone();
    if factor == 1.0 {
        return Ok((edited, affected));
    }
    let weights = blend_weights(doc, &affected, &vertices, &region.anchors);
    let axis: Vector3<f64> = bone.axis();
    match mode {
        AxisMode::Along => {
            let mean = |vs: &mut dyn Iterator<Item = usize>| {
                let s: Vec<f64> = vs.map(|v| axial(bone, &g.vertices[v])).collect();
                (!s.is_empty()).then(|| s.iter().sum::<f64>() / s.len() as f64)
            };
            let s0 = mean(&mut region.anchors.iter().copied())
                .or_else(|| mean(&mut weights.iter().filter(|(_, &w)| w == 0.0).map(|(&v, _)| v)))
                .unwrap_or_else(|| {
                    vertices
                        .iter()
                        .map(|&v| axial(bone, &g.vertices[v]))
                        .fold(f64::INFINITY, f64::min)
                });
            for (&v, &w) in &weights {
                let f = 1.0 + (factor - 1.0) * w;
                let p = g.vertices[v];
                edited.vertices[v] = p + axis * ((f - 1.0) * (axial(bone, &p) - s0));
            }
        }
        AxisMode::Perpendicular => {
            for (&v, &w) in &weights {
                let f = 1.0 + (factor - 1.0) * w;
                let p = g.vertices[v];
                let q = foot(bone, &p);
                edited.vertices[v] = q + (p - q) * f;
            }
        }
    }
    Ok((edited, affected))
}
