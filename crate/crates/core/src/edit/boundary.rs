//! Free garment boundaries as chains of half-edges.
//!
//! A chain follows boundary half-edges that are not stitched by a seam,
//! crossing seam-glued vertex copies, and ends at sharp corners.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Point3;

use super::error::EditError;
use crate::document::GarmentDocument;
use crate::geometry::topology::{boundary_half_edges, edge_key};

/// Turning angles above this (radians) split a boundary into chains.
pub const CORNER_ANGLE: f64 = std::f64::consts::FRAC_PI_3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryChain {
    /// Garment half-edges in boundary order; consecutive edges share a
    /// vertex or a pair of glued vertices.
    pub edges: Vec<(usize, usize)>,
    pub closed: bool,
}

impl BoundaryChain {
    /// Start vertex of every edge, plus the final end vertex when open.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges.iter().map(|&(a, _)| a).collect();
        if !self.closed {
            if let Some(&(_, b)) = self.edges.last() {
                out.push(b);
            }
        }
        out
    }

    /// All vertices touched by the chain, including glued copies at
    /// junctions.
    pub fn all_vertices(&self) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&(a, b)| [a, b]).collect()
    }
}

/// Boundary half-edges of the garment that no seam stitches.
pub fn free_boundary_edges(doc: &GarmentDocument) -> Vec<(usize, usize)> {
    let mut seam_edges = BTreeSet::new();
    for seam in &doc.seams {
        for side in [&seam.side_a, &seam.side_b] {
            for w in side.windows(2) {
                seam_edges.insert(edge_key(w[0], w[1]));
            }
        }
    }
    boundary_half_edges(&doc.garment.triangles)
        .into_iter()
        .filter(|&(a, b)| !seam_edges.contains(&edge_key(a, b)))
        .collect()
}

fn turning_is_corner(doc: &GarmentDocument, e: (usize, usize), f: (usize, usize)) -> bool {
    let v = &doc.garment.vertices;
    let d1 = (v[e.1] - v[e.0]).normalize();
    let d2 = (v[f.1] - v[f.0]).normalize();
    d1.dot(&d2) < CORNER_ANGLE.cos()
}

pub fn boundary_chains(doc: &GarmentDocument) -> Vec<BoundaryChain> {
    let edges = free_boundary_edges(doc);
    let glue = doc.glue();
    let mut by_start: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(a, _)) in edges.iter().enumerate() {
        by_start.entry(glue.rep(a)).or_default().push(i);
    }
    let succ: Vec<Option<usize>> = edges
        .iter()
        .enumerate()
        .map(|(i, &(_, b))| {
            by_start
                .get(&glue.rep(b))
                .and_then(|c| c.iter().copied().find(|&j| j != i))
        })
        .collect();
    let mut has_pred = vec![false; edges.len()];
    for s in succ.iter().flatten() {
        has_pred[*s] = true;
    }

    let mut used = vec![false; edges.len()];
    let mut runs: Vec<(Vec<usize>, bool)> = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut run = vec![start];
        used[start] = true;
        let mut cur = start;
        while let Some(n) = succ[cur] {
            if n == start {
                return (run, true);
            }
            if used[n] {
                break;
            }
            used[n] = true;
            run.push(n);
            cur = n;
        }
        (run, false)
    };
    for i in 0..edges.len() {
        if !has_pred[i] && !used[i] {
            runs.push(walk(i, &mut used));
        }
    }
    for i in 0..edges.len() {
        if !used[i] {
            runs.push(walk(i, &mut used));
        }
    }

    let mut chains = Vec::new();
    for (run, closed) in runs {
        let m = run.len();
        let corner_after = |k: usize| -> bool {
            let next = if k + 1 < m { run[k + 1] } else { run[0] };
            turning_is_corner(doc, edges[run[k]], edges[next])
        };
        if closed {
            let corners: Vec<usize> = (0..m).filter(|&k| corner_after(k)).collect();
            if corners.is_empty() {
                chains.push(BoundaryChain {
                    edges: run.iter().map(|&i| edges[i]).collect(),
                    closed: true,
                });
                continue;
            }
            let start = (corners[0] + 1) % m;
            let mut piece = Vec::new();
            for s in 0..m {
                let k = (start + s) % m;
                piece.push(edges[run[k]]);
                if corner_after(k) {
                    chains.push(BoundaryChain {
                        edges: std::mem::take(&mut piece),
                        closed: false,
                    });
                }
            }
        } else {
            let mut piece = Vec::new();
            for k in 0..m {
                piece.push(edges[run[k]]);
                if k + 1 == m || corner_after(k) {
                    chains.push(BoundaryChain {
                        edges: std::mem::take(&mut piece),
                        closed: false,
                    });
                }
            }
        }
    }
    chains
}

fn segment_distance(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + d * t)).norm()
}

/// The chain containing the free boundary edge nearest to `pick`.
pub fn pick_chain(doc: &GarmentDocument, pick: &[f64; 3]) -> Result<BoundaryChain, EditError> {
    let p = Point3::from(*pick);
    let chains = boundary_chains(doc);
    let v = &doc.garment.vertices;
    let mut best: Option<(usize, f64)> = None;
    for (c, chain) in chains.iter().enumerate() {
        for &(a, b) in &chain.edges {
            let d = segment_distance(&p, &v[a], &v[b]);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
    }
    best.map(|(c, _)| chains[c].clone()).ok_or(EditError::NoBoundary)
}
