//! Pattern update after a 3D edit: targets from the memorized scale
//! matrices, stitched per affected panel.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::error::FlattenError;
use super::pins::{center_edge, pin_edge};
use super::scale_map::per_triangle_targets;
use super::stitch::{stitch, SolverConfig, StitchProblem};
use super::tangent::build_tangent_constraints;
use crate::document::GarmentDocument;
use crate::geometry::{Mesh3, Panel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsapMode {
    /// On exactly when every triangle of the panel is affected.
    #[default]
    Auto,
    On,
    Off,
}

impl std::str::FromStr for AsapMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            other => Err(format!("expected auto, on or off, got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSolve {
    pub panel: usize,
    pub asap: bool,
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    /// Boundary vertices left without a tangent constraint.
    pub skipped_chords: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternUpdate {
    pub panels: Vec<Panel>,
    pub solves: Vec<PanelSolve>,
}

/// Re-solves every panel touched by `affected` (garment triangle ids)
/// against `edited`. Untouched panels are returned as they are.
pub fn update_pattern(
    doc: &GarmentDocument,
    edited: &Mesh3,
    affected: &BTreeSet<usize>,
    asap: AsapMode,
    config: &SolverConfig,
) -> Result<PatternUpdate, FlattenError> {
    if edited.triangles.len() != doc.garment.triangles.len() || edited.vertices.len() != doc.garment.vertices.len() {
        return Err(FlattenError::MismatchedTopology {
            expected: doc.garment.triangles.len(),
            found: edited.triangles.len(),
        });
    }
    let lists = doc.panel_triangle_lists();
    let mut panels = doc.panels.clone();
    let mut solves = Vec::new();
    for (p, panel) in doc.panels.iter().enumerate() {
        let hit = lists[p].iter().filter(|t| affected.contains(t)).count();
        if hit == 0 {
            continue;
        }
        let whole = hit == lists[p].len();
        let use_asap = match asap {
            AsapMode::Auto => whole,
            AsapMode::On => true,
            AsapMode::Off => false,
        };
        let (coords, solve) = solve_panel(p, panel, &doc.scale_maps[p], edited, use_asap, config)?;
        panels[p].vertices = coords;
        solves.push(solve);
    }
    Ok(PatternUpdate { panels, solves })
}

fn panel_problem(
    panel: &Panel,
    map: &super::scale_map::IntrinsicScaleMap,
    edited: &Mesh3,
    use_asap: bool,
) -> Result<(StitchProblem, Vec<usize>), FlattenError> {
    let targets = per_triangle_targets(map, panel, edited)?;
    let mut problem = StitchProblem::from_frames(
        panel.vertices.len(),
        panel.triangles.clone(),
        &targets,
        &map.designated_edges,
        panel.orientation(),
    );
    let (a, b) = center_edge(&panel.vertices, &panel.triangles)
        .ok_or_else(|| FlattenError::InvalidProblem("panel has no edges".into()))?;
    problem.fixed = pin_edge(&panel.vertices, a, b, target_edge_length(&problem, a, b)).to_vec();
    let mut skipped = Vec::new();
    if use_asap {
        let set = build_tangent_constraints(panel)?;
        problem.tangents = set.constraints;
        skipped = set.skipped;
    }
    Ok((problem, skipped))
}

fn solve_panel(
    index: usize,
    panel: &Panel,
    map: &super::scale_map::IntrinsicScaleMap,
    edited: &Mesh3,
    use_asap: bool,
    config: &SolverConfig,
) -> Result<(Vec<nalgebra::Point2<f64>>, PanelSolve), FlattenError> {
    let (problem, skipped) = panel_problem(panel, map, edited, use_asap)?;
    let result = stitch(&problem, &panel.vertices, config)?;
    let solve = PanelSolve {
        panel: index,
        asap: use_asap,
        iterations: result.iterations,
        energy_trace: result.energy_trace,
        skipped_chords: skipped,
    };
    Ok((result.coords, solve))
}

/// The stitching energy of the current pattern of every panel touched by
/// `affected`, without solving: one trace entry, zero iterations.
pub fn evaluate_pattern(
    doc: &GarmentDocument,
    affected: &BTreeSet<usize>,
    asap: AsapMode,
    config: &SolverConfig,
) -> Result<Vec<PanelSolve>, FlattenError> {
    let lists = doc.panel_triangle_lists();
    let mut solves = Vec::new();
    for (p, panel) in doc.panels.iter().enumerate() {
        let hit = lists[p].iter().filter(|t| affected.contains(t)).count();
        if hit == 0 {
            continue;
        }
        let use_asap = match asap {
            AsapMode::Auto => hit == lists[p].len(),
            AsapMode::On => true,
            AsapMode::Off => false,
        };
        let (problem, skipped) = panel_problem(panel, &doc.scale_maps[p], &doc.garment, use_asap)?;
        let rotations = problem.fit_rotations(&panel.vertices);
        solves.push(PanelSolve {
            panel: p,
            asap: use_asap,
            iterations: 0,
            energy_trace: vec![problem.energy(&panel.vertices, &rotations, config)],
            skipped_chords: skipped,
        });
    }
    Ok(solves)
}

/// Mean target length of edge `(a, b)` over the triangles containing it.
fn target_edge_length(problem: &StitchProblem, a: usize, b: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0.0;
    for (tri, rest) in problem.triangles.iter().zip(&problem.rest) {
        let ia = tri.iter().position(|&v| v == a);
        let ib = tri.iter().position(|&v| v == b);
        if let (Some(ia), Some(ib)) = (ia, ib) {
            sum += (rest[ib] - rest[ia]).norm();
            count += 1.0;
        }
    }
    if count > 0.0 {
        sum / count
    } else {
        0.0
    }
}

