//! Shortening: trimming a strip of constant geodesic width off a boundary.

use std::collections::BTreeSet;

use super::boundary::pick_chain;
use super::error::EditError;
use super::levelset::{level_set_cut, CutResult, Keep, ScalarField};
use super::op::BoundaryRef;
use crate::document::GarmentDocument;
use crate::geometry::{extract_isoline, geodesic_with_glue};

/// Edge-path distance from the picked boundary chain, crossing seams.
pub fn boundary_distance(doc: &GarmentDocument, boundary: &BoundaryRef) -> Result<Vec<f64>, EditError> {
    let chain = pick_chain(doc, &boundary.pick)?;
    let glue = doc.glue();
    let sources: BTreeSet<usize> = chain.all_vertices().iter().flat_map(|&v| glue.members(v)).collect();
    let sources: Vec<usize> = sources.into_iter().collect();
    Ok(geodesic_with_glue(&doc.garment, &sources, &doc.glue_pairs())?)
}

/// Removes everything closer than `distance` (cm) to the picked boundary.
pub fn shorten(doc: &GarmentDocument, boundary: &BoundaryRef, distance: f64) -> Result<CutResult, EditError> {
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(EditError::InvalidDistance(distance));
    }
    let dist = boundary_distance(doc, boundary)?;
    if distance == 0.0 {
        return Ok(CutResult {
            doc: doc.clone(),
            affected: BTreeSet::new(),
            vertex_map: (0..dist.len()).map(Some).collect(),
            cut_vertices: Vec::new(),
            warnings: Vec::new(),
        });
    }
    extract_isoline(&doc.garment, &dist, distance)?;
    let lists = doc.panel_triangle_lists();
    let panels: BTreeSet<usize> = (0..doc.panels.len())
        .filter(|&p| lists[p].iter().any(|&t| doc.garment.triangles[t].iter().any(|&v| dist[v] < distance)))
        .collect();
    level_set_cut(
        doc,
        &panels,
        &ScalarField {
            values: dist,
            level: distance,
        },
        Keep::Above,
    )
}
