//! The editing state: body, garment, pattern, seams, symmetry, the memorized
//! scale matrices and the op history.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::edit::EditOp;
use crate::flatten::scale_map::{compute_intrinsic_scale_map, IntrinsicScaleMap, SINGULAR_DET};
use crate::flatten::FlattenError;
use crate::geometry::topology::{boundary_loops, edge_key, edge_triangles, triangle_components};
use crate::geometry::{BodyModel, GlueMap, Mesh3, Panel, SeamLine, Symmetry, DEGENERATE_AREA};

pub const DOCUMENT_VERSION: &str = "pt-1";

/// Feature points must lie this close (cm) to the body surface.
pub const FEATURE_POINT_TOLERANCE: f64 = 1.0;

/// Allowed deviation of the symmetry normal from unit length.
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub op: EditOp,
    pub mirror: bool,
    /// State hash after the op was applied.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{invariant} violated by {entity}")]
pub struct ValidationError {
    pub invariant: &'static str,
    pub entity: String,
}

fn invalid(invariant: &'static str, entity: impl Into<String>) -> ValidationError {
    ValidationError {
        invariant,
        entity: entity.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarmentDocument {
    pub version: String,
    pub body: BodyModel,
    pub garment: Mesh3,
    pub panels: Vec<Panel>,
    pub seams: Vec<SeamLine>,
    pub symmetry: Option<Symmetry>,
    /// One map per panel, indexed like the panel's triangles.
    pub scale_maps: Vec<IntrinsicScaleMap>,
    pub history: Vec<HistoryEntry>,
}

impl GarmentDocument {
    /// Assembles a document and memorizes its scale matrices.
    pub fn new(
        body: BodyModel,
        garment: Mesh3,
        panels: Vec<Panel>,
        seams: Vec<SeamLine>,
        symmetry: Option<Symmetry>,
    ) -> Result<Self, FlattenError> {
        let scale_maps = panels
            .iter()
            .map(|p| compute_intrinsic_scale_map(p, &garment))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            version: DOCUMENT_VERSION.to_string(),
            body,
            garment,
            panels,
            seams,
            symmetry,
            scale_maps,
            history: Vec::new(),
        })
    }

    /// Garment triangle ids of panel `p`, in panel triangle order.
    pub fn panel_triangles(&self, p: usize) -> Vec<usize> {
        (0..self.garment.triangles.len())
            .filter(|&t| self.garment.panel_ids[t] == p)
            .collect()
    }

    pub fn panel_triangle_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.panels.len()];
        for (t, &p) in self.garment.panel_ids.iter().enumerate() {
            if p < out.len() {
                out[p].push(t);
            }
        }
        out
    }

    /// Garment vertex -> (panel, panel-local vertex).
    pub fn vertex_owner(&self) -> Vec<Option<(usize, usize)>> {
        let mut out = vec![None; self.garment.vertices.len()];
        for (p, panel) in self.panels.iter().enumerate() {
            for (local, &g) in panel.corr.iter().enumerate() {
                if g < out.len() {
                    out[g] = Some((p, local));
                }
            }
        }
        out
    }

    pub fn glue(&self) -> GlueMap {
        GlueMap::new(self.garment.vertices.len(), &self.seams)
    }

    /// Glue pairs for distance computations across seams.
    pub fn glue_pairs(&self) -> Vec<(usize, usize)> {
        self.seams.iter().flat_map(|s| s.pairs()).collect()
    }

    pub fn hash(&self) -> String {
        crate::io::document::state_hash(self)
    }

    /// Checks every document invariant; the first violation is reported.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.version != DOCUMENT_VERSION {
            return Err(invalid("version", self.version.clone()));
        }
        validate_mesh(&self.body.mesh, "body")?;
        for (i, bone) in self.body.skeleton.iter().enumerate() {
            if !(bone.length() > 0.0) {
                return Err(invalid("bone_length", format!("bone {i} ({})", bone.name)));
            }
        }
        if !self.body.mesh.triangles.is_empty() {
            for fp in &self.body.feature_points {
                let near = crate::geometry::query::nearest_triangle(&self.body.mesh, &fp.position)
                    .map(|(_, _, d)| d)
                    .unwrap_or(f64::INFINITY);
                if near > FEATURE_POINT_TOLERANCE {
                    return Err(invalid("feature_point_on_body", format!("feature point {}", fp.name)));
                }
            }
        }

        let g = &self.garment;
        validate_mesh(g, "garment")?;
        if g.panel_ids.len() != g.triangles.len() {
            return Err(invalid("panel_ids_length", "garment"));
        }
        for (t, &p) in g.panel_ids.iter().enumerate() {
            if p >= self.panels.len() {
                return Err(invalid("panel_id_in_range", format!("garment triangle {t}")));
            }
        }

        let lists = self.panel_triangle_lists();
        let mut owner = vec![None; g.vertices.len()];
        for (p, panel) in self.panels.iter().enumerate() {
            let entity = || format!("panel {p} ({})", panel.name);
            if panel.triangles.len() != lists[p].len() {
                return Err(invalid("panel_triangle_count", entity()));
            }
            if panel.triangles.is_empty() {
                return Err(invalid("panel_nonempty", entity()));
            }
            if panel.corr.len() != panel.vertices.len() {
                return Err(invalid("corr_bijection", entity()));
            }
            if panel.vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
                return Err(invalid("finite_coordinates", entity()));
            }
            for &gv in &panel.corr {
                if gv >= g.vertices.len() || owner[gv].is_some() {
                    return Err(invalid("corr_bijection", entity()));
                }
                owner[gv] = Some(p);
            }
            let n = panel.vertices.len();
            let mut sign = 0.0;
            for (k, tri) in panel.triangles.iter().enumerate() {
                if tri.iter().any(|&v| v >= n) {
                    return Err(invalid("index_in_range", format!("{} triangle {k}", entity())));
                }
                let mapped = tri.map(|v| panel.corr[v]);
                if mapped != g.triangles[lists[p][k]] {
                    return Err(invalid("triangle_correspondence", format!("{} triangle {k}", entity())));
                }
                let a = panel.signed_area(k);
                if a.abs() <= DEGENERATE_AREA {
                    return Err(invalid("nondegenerate_triangle", format!("{} triangle {k}", entity())));
                }
                if sign == 0.0 {
                    sign = a.signum();
                } else if a.signum() != sign {
                    return Err(invalid("uniform_orientation", format!("{} triangle {k}", entity())));
                }
            }
            if triangle_components(&panel.triangles).len() != 1 {
                return Err(invalid("panel_connected", entity()));
            }
            let loops = boundary_loops(&panel.triangles);
            if loops.len() != 1 {
                return Err(invalid("disk_topology", entity()));
            }
            if !is_rotation_of(&panel.boundary, &loops[0]) {
                return Err(invalid("panel_boundary", entity()));
            }
            let used: BTreeSet<usize> = panel.triangles.iter().flatten().copied().collect();
            if used.len() != n {
                return Err(invalid("unused_vertex", entity()));
            }
        }
        if let Some(v) = owner.iter().position(Option::is_none) {
            return Err(invalid("corr_bijection", format!("garment vertex {v}")));
        }

        for (i, seam) in self.seams.iter().enumerate() {
            validate_seam(i, seam, g, &owner)?;
        }

        if let Some(sym) = &self.symmetry {
            if !((sym.normal.norm() - 1.0).abs() <= UNIT_TOLERANCE) || sym.normal.iter().any(|x| !x.is_finite()) {
                return Err(invalid("symmetry_normal", "symmetry"));
            }
            let mut seen = BTreeSet::new();
            for (i, pair) in sym.pairs.iter().enumerate() {
                if pair.iter().any(|&p| p >= self.panels.len()) {
                    return Err(invalid("symmetry_pair", format!("symmetry pair {i}")));
                }
                for &p in pair {
                    if !seen.insert(p) && pair[0] != pair[1] {
                        return Err(invalid("symmetry_pair", format!("symmetry pair {i}")));
                    }
                }
            }
        }

        if self.scale_maps.len() != self.panels.len() {
            return Err(invalid("scale_map", "document"));
        }
        for (p, map) in self.scale_maps.iter().enumerate() {
            if map.matrices.len() != self.panels[p].triangles.len() || map.designated_edges.len() != map.matrices.len() {
                return Err(invalid("scale_map", format!("panel {p}")));
            }
            for (t, m) in map.matrices.iter().enumerate() {
                if !(m.determinant().abs() > SINGULAR_DET) || m.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("scale_map", format!("panel {p} triangle {t}")));
                }
            }
        }
        Ok(())
    }
}

fn is_rotation_of(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return false;
    }
    let Some(start) = a.iter().position(|&v| v == b[0]) else {
        return false;
    };
    (0..a.len()).all(|k| a[(start + k) % a.len()] == b[k])
}

fn validate_mesh(mesh: &Mesh3, name: &str) -> Result<(), ValidationError> {
    let n = mesh.vertices.len();
    if mesh.vertices.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
        return Err(invalid("finite_coordinates", name));
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= n) {
            return Err(invalid("index_in_range", format!("{name} triangle {t}")));
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(invalid("distinct_triangle_vertices", format!("{name} triangle {t}")));
        }
        if mesh.triangle_area(t) <= DEGENERATE_AREA {
            return Err(invalid("nondegenerate_triangle", format!("{name} triangle {t}")));
        }
    }
    Ok(())
}

fn validate_seam(i: usize, seam: &SeamLine, g: &Mesh3, owner: &[Option<usize>]) -> Result<(), ValidationError> {
    let entity = || format!("seam {i}");
    if seam.side_a.len() != seam.side_b.len() || seam.side_a.len() < 2 {
        return Err(invalid("seam_lengths", entity()));
    }
    let edges: BTreeMap<(usize, usize), Vec<usize>> = edge_triangles(&g.triangles);
    for side in [&seam.side_a, &seam.side_b] {
        if side.iter().any(|&v| v >= g.vertices.len()) {
            return Err(invalid("index_in_range", entity()));
        }
        let panel = owner[side[0]];
        if side.iter().any(|&v| owner[v] != panel) {
            return Err(invalid("seam_single_panel", entity()));
        }
        for w in side.windows(2) {
            match edges.get(&edge_key(w[0], w[1])) {
                Some(ts) if ts.len() == 1 => {}
                _ => return Err(invalid("seam_boundary_chain", entity())),
            }
        }
    }
    Ok(())
}
