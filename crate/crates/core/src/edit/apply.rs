//! Applying an edit to a document: the 3D change, the pattern update and
//! the history entry.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::error::EditError;
use super::extend::extend;
use super::mirror::mirror_edit;
use super::op::EditOp;
use super::scale::scale_region;
use super::seam::move_seam;
use super::shorten::shorten;
use super::sketch::cut_by_sketch;
use crate::document::{GarmentDocument, HistoryEntry};
use crate::flatten::{evaluate_pattern, update_pattern, AsapMode, PanelSolve, SolverConfig};
use crate::geometry::Mesh3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ApplyOptions {
    pub asap: AsapMode,
    #[serde(skip)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplyOutcome {
    pub doc: GarmentDocument,
    /// Garment triangles touched by the op (by the mirrored op when one was
    /// applied, in the final numbering).
    pub affected: BTreeSet<usize>,
    pub solves: Vec<PanelSolve>,
    pub warnings: Vec<String>,
    /// The mirror image that was applied after `op`.
    pub mirrored: Option<EditOp>,
}

struct Step {
    doc: GarmentDocument,
    affected: BTreeSet<usize>,
    solves: Vec<PanelSolve>,
    warnings: Vec<String>,
}

fn reflatten(
    doc: &GarmentDocument,
    edited: Mesh3,
    affected: BTreeSet<usize>,
    neutral: bool,
    options: &ApplyOptions,
) -> Result<Step, EditError> {
    if neutral {
        let solves = evaluate_pattern(doc, &affected, options.asap, &options.solver)?;
        return Ok(Step {
            doc: doc.clone(),
            affected,
            solves,
            warnings: Vec::new(),
        });
    }
    let update = update_pattern(doc, &edited, &affected, options.asap, &options.solver)?;
    let mut out = doc.clone();
    out.garment = edited;
    out.panels = update.panels;
    Ok(Step {
        doc: out,
        affected,
        solves: update.solves,
        warnings: Vec::new(),
    })
}

fn apply_single(doc: &GarmentDocument, op: &EditOp, options: &ApplyOptions) -> Result<Step, EditError> {
    options.solver.validate()?;
    let neutral = op.is_neutral();
    match op {
        EditOp::ScaleRegion { region, mode, factor } => {
            let (edited, affected) = scale_region(doc, region, *mode, *factor)?;
            reflatten(doc, edited, affected, neutral, options)
        }
        EditOp::MoveSeam {
            seam,
            mode,
            offset,
            fix_far_boundary,
        } => {
            let (edited, affected) = move_seam(doc, *seam, *mode, *offset, *fix_far_boundary)?;
            reflatten(doc, edited, affected, neutral, options)
        }
        EditOp::Cut {
            sketch,
            camera,
            both_sides,
            discard,
        } => {
            let cut = cut_by_sketch(doc, sketch, camera, *both_sides, *discard)?;
            Ok(Step {
                doc: cut.doc,
                affected: cut.affected,
                solves: Vec::new(),
                warnings: cut.warnings,
            })
        }
        EditOp::Shorten { boundary, distance } => {
            let cut = shorten(doc, boundary, *distance)?;
            Ok(Step {
                doc: cut.doc,
                affected: cut.affected,
                solves: Vec::new(),
                warnings: cut.warnings,
            })
        }
        EditOp::Extend { boundary, distance } => {
            let strip = extend(doc, boundary, *distance)?;
            Ok(Step {
                doc: strip.doc,
                affected: strip.affected,
                solves: Vec::new(),
                warnings: strip.warnings,
            })
        }
    }
}

/// Applies `op`, and its mirror image when `mirror` is set, and records the
/// op in the history.
pub fn apply_op(doc: &GarmentDocument, op: &EditOp, mirror: bool, options: &ApplyOptions) -> Result<ApplyOutcome, EditError> {
    let twin = if mirror { mirror_edit(doc, op)? } else { None };
    let first = apply_single(doc, op, options)?;
    let (mut out, mut affected, mut solves, mut warnings) = (first.doc, first.affected, first.solves, first.warnings);
    if let Some(twin) = &twin {
        let second = apply_single(&out, twin, options)?;
        out = second.doc;
        affected = second.affected;
        solves.extend(second.solves);
        warnings.extend(second.warnings);
    }
    let hash = out.hash();
    out.history.push(HistoryEntry {
        op: op.clone(),
        mirror,
        hash,
    });
    Ok(ApplyOutcome {
        doc: out,
        affected,
        solves,
        warnings,
        mirrored: twin,
    })
}

/// Replays `ops` from `doc`, stopping at the first failure, which is
/// reported with its index.
pub fn replay(
    doc: &GarmentDocument,
    ops: &[(EditOp, bool)],
    options: &ApplyOptions,
) -> Result<GarmentDocument, (usize, EditError)> {
    let mut cur = doc.clone();
    for (i, (op, mirror)) in ops.iter().enumerate() {
        cur = apply_op(&cur, op, *mirror, options).map_err(|e| (i, e))?.doc;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::op::{AxisMode, BoundaryRef, Region};
    use crate::fixtures::{self, CylinderSpec};

    #[test]
    fn neutral_ops_keep_the_hash() {
        let doc = fixtures::two_part_cylinder(CylinderSpec::default(), 2);
        let hash = doc.hash();
        let ops = [
            EditOp::ScaleRegion {
                region: Region {
                    triangles: vec![0, 1, 2, 3],
                    anchors: vec![],
                },
                mode: AxisMode::Along,
                factor: 1.0,
            },
            EditOp::MoveSeam {
                seam: 2,
                mode: AxisMode::Along,
                offset: 0.0,
                fix_far_boundary: false,
            },
            EditOp::Shorten {
                boundary: BoundaryRef { pick: [0.0, 0.0, -1.0] },
                distance: 0.0,
            },
            EditOp::Extend {
                boundary: BoundaryRef { pick: [0.0, 0.0, -1.0] },
                distance: 0.0,
            },
        ];
        for op in ops {
            let out = apply_op(&doc, &op, false, &ApplyOptions::default()).unwrap();
            assert_eq!(out.doc.hash(), hash, "{}", op.kind());
            assert_eq!(out.doc.history.len(), 1);
            assert!(out.solves.iter().all(|s| s.iterations == 0 && s.energy_trace.len() == 1));
        }
    }

    #[test]
    fn scale_updates_the_pattern() {
        let doc = fixtures::cylinder(CylinderSpec::default());
        let op = EditOp::ScaleRegion {
            region: Region {
                triangles: (0..doc.garment.triangles.len()).collect(),
                anchors: vec![],
            },
            mode: AxisMode::Perpendicular,
            factor: 1.5,
        };
        let options = ApplyOptions {
            asap: AsapMode::Off,
            ..Default::default()
        };
        let out = apply_op(&doc, &op, false, &options).unwrap();
        out.doc.validate().unwrap();
        assert_eq!(out.solves.len(), 1);
        assert!(!out.solves[0].asap);
        // the fabric widens with the drape
        let w0 = doc.panels[0].bounding_box();
        let w1 = out.doc.panels[0].bounding_box();
        let width = |b: (nalgebra::Point2<f64>, nalgebra::Point2<f64>)| b.1.x - b.0.x;
        assert!((width(w1) / width(w0) - 1.5).abs() < 1e-2, "{}", width(w1) / width(w0));
    }

    #[test]
    fn mirrored_shorten_hits_both_sleeves() {
        let doc = fixtures::mirrored_sleeves();
        let op = EditOp::Shorten {
            boundary: BoundaryRef { pick: [16.5, 0.0, 0.0] },
            distance: 1.0,
        };
        let out = apply_op(&doc, &op, true, &ApplyOptions::default()).unwrap();
        out.doc.validate().unwrap();
        assert!(out.mirrored.is_some());
        let xs: Vec<f64> = out.doc.garment.vertices.iter().map(|p| p.x.abs()).collect();
        let xmax = xs.iter().copied().fold(0.0, f64::max);
        assert!((xmax - 15.0).abs() < 1e-9, "{xmax}");
        assert_eq!(out.doc.symmetry.as_ref().unwrap().pairs, vec![[0, 1]]);
    }
}
