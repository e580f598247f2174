//! One editing session: a base document, the op log replayed on it, and a
//! revision counter.

use nalgebra::Vector2;
use serde::Serialize;
use serde_json::{json, Value};

use tailor_core::edit::{apply_op, boundary_chains, replay, ApplyOptions, EditError, EditOp, ScriptRecord};
use tailor_core::io::document::{to_file, PanelFile};
use tailor_core::io::{pattern_layout, DocumentError};
use tailor_core::GarmentDocument;

/// Vertex moves at or below this (cm) are not reported as changes.
pub const DELTA_EPSILON: f64 = 1e-9;

/// An error payload: `{code, entity, message}` plus the HTTP status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub entity: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: u16, code: &str, entity: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            entity: entity.into(),
            message: message.into(),
        }
    }

    pub fn from_document(e: &DocumentError) -> Self {
        Self::new(400, e.name(), e.entity(), e.to_string())
    }

    pub fn stale(current: u64, given: u64) -> Self {
        Self::new(
            409,
            "StaleRevision",
            format!("revision {given}"),
            format!("session is at revision {current}; refresh"),
        )
    }
}

/// The entity an edit error refers to.
pub fn error_entity(e: &EditError, op: &EditOp) -> String {
    use tailor_core::geometry::GeometryError;
    match e {
        EditError::SeamNotFound { seam } | EditError::SelfSeam { seam } => format!("seam {seam}"),
        EditError::DisconnectedRegion { panel } | EditError::NonDiskPanel { panel } => format!("panel {panel}"),
        EditError::Geometry(GeometryError::UnpairedPanel { panel }) => format!("panel {panel}"),
        EditError::Geometry(GeometryError::NoMirrorCounterpart { what }) => what.clone(),
        EditError::Geometry(GeometryError::NoSymmetryDeclared) => "symmetry".into(),
        EditError::Flatten(f) => format!("{} ({})", op.kind(), f.name()),
        _ => op.kind().to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub base: GarmentDocument,
    pub doc: GarmentDocument,
    pub log: Vec<ScriptRecord>,
    pub revision: u64,
    /// Per-panel 2D offsets for display; view state, not geometry.
    pub layout: Vec<Vector2<f64>>,
    pub options: ApplyOptions,
}

/// What an op or undo changed, relative to the previous state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Changes {
    /// Vertex count or triangles differ; full geometry is included.
    pub topology_changed: bool,
    /// Runs of moved garment vertices: start index and flat coordinates.
    pub vertex_ranges: Vec<(usize, Vec<f64>)>,
    pub panels: Vec<(usize, PanelFile)>,
    pub affected: Vec<usize>,
}

impl Session {
    pub fn new(doc: GarmentDocument) -> Self {
        let layout = pattern_layout(&doc.panels, None);
        Self {
            base: doc.clone(),
            doc,
            log: Vec::new(),
            revision: 0,
            layout,
            options: ApplyOptions::default(),
        }
    }

    pub fn check_revision(&self, given: Option<u64>) -> Result<(), ApiError> {
        match given {
            Some(r) if r != self.revision => Err(ApiError::stale(self.revision, r)),
            _ => Ok(()),
        }
    }

    pub fn summary(&self) -> Value {
        let doc = &self.doc;
        let panels: Vec<Value> = doc
            .panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({"index": i, "name": p.name, "vertices": p.vertices.len(), "triangles": p.triangles.len()})
            })
            .collect();
        let seams: Vec<Value> = doc
            .seams
            .iter()
            .enumerate()
            .map(|(i, s)| json!({"index": i, "side_a": s.side_a, "side_b": s.side_b}))
            .collect();
        let boundaries: Vec<Value> = boundary_chains(doc)
            .iter()
            .map(|c| json!({"closed": c.closed, "vertices": c.vertices()}))
            .collect();
        let file = to_file(doc);
        json!({
            "revision": self.revision,
            "hash": doc.hash(),
            "panels": panels,
            "seams": seams,
            "boundaries": boundaries,
            "symmetry": file.symmetry,
        })
    }

    /// Geometry payload; `what` is `garment`, `pattern` or `all`.
    pub fn state(&self, what: &str) -> Result<Value, ApiError> {
        let file = to_file(&self.doc);
        let mut out = json!({"revision": self.revision, "hash": self.doc.hash(), "layout": self.layout_json()});
        let (garment, pattern) = match what {
            "garment" => (true, false),
            "pattern" => (false, true),
            "all" => (true, true),
            other => {
                return Err(ApiError::new(
                    400,
                    "InvalidQuery",
                    format!("what={other}"),
                    "what must be garment, pattern or all",
                ))
            }
        };
        if garment {
            out["garment"] = serde_json::to_value(&file.garment).expect("garment serializes");
            out["body"] = serde_json::to_value(&file.body).expect("body serializes");
            out["seams"] = serde_json::to_value(&file.seams).expect("seams serialize");
        }
        if pattern {
            out["panels"] = serde_json::to_value(&file.panels).expect("panels serialize");
        }
        Ok(out)
    }

    pub fn layout_json(&self) -> Vec<[f64; 2]> {
        self.layout.iter().map(|v| [v.x, v.y]).collect()
    }

    pub fn set_layout(&mut self, offsets: &[[f64; 2]]) -> Result<(), ApiError> {
        if offsets.len() != self.doc.panels.len() || offsets.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ApiError::new(
                422,
                "InvalidLayout",
                "layout",
                format!("expected {} finite offsets", self.doc.panels.len()),
            ));
        }
        self.layout = offsets.iter().map(|&[x, y]| Vector2::new(x, y)).collect();
        Ok(())
    }

    fn sync_layout(&mut self) {
        if self.layout.len() != self.doc.panels.len() {
            self.layout = pattern_layout(&self.doc.panels, None);
        }
    }

    /// Applies one op. On failure nothing changes.
    pub fn apply(&mut self, op: EditOp, mirror: bool) -> Result<Value, ApiError> {
        let outcome = apply_op(&self.doc, &op, mirror, &self.options)
            .map_err(|e| ApiError::new(422, e.name(), error_entity(&e, &op), e.to_string()))?;
        let changes = diff(&self.doc, &outcome.doc, outcome.affected.iter().copied().collect());
        self.doc = outcome.doc;
        self.log.push(ScriptRecord { op, mirror });
        self.revision += 1;
        self.sync_layout();
        let solves: Vec<Value> = outcome
            .solves
            .iter()
            .map(|s| {
                json!({"panel": s.panel, "asap": s.asap, "iterations": s.iterations, "energy_trace": s.energy_trace})
            })
            .collect();
        Ok(json!({
            "revision": self.revision,
            "hash": self.doc.hash(),
            "changes": self.changes_json(&changes),
            "solves": solves,
            "warnings": outcome.warnings,
            "mirrored": outcome.mirrored,
        }))
    }

    /// Drops the last op and replays the rest from the base document.
    pub fn undo(&mut self) -> Result<Value, ApiError> {
        if self.log.is_empty() {
            return Err(ApiError::new(409, "EmptyHistory", "history", "nothing to undo"));
        }
        let mut log = self.log.clone();
        log.pop();
        let ops: Vec<(EditOp, bool)> = log.iter().map(|r| (r.op.clone(), r.mirror)).collect();
        let doc = replay(&self.base, &ops, &self.options).map_err(|(i, e)| {
            ApiError::new(
                500,
                e.name(),
                format!("op {}", i + 1),
                format!("replay failed: {e}"),
            )
        })?;
        let changes = diff(&self.doc, &doc, Vec::new());
        self.doc = doc;
        self.log = log;
        self.revision += 1;
        self.sync_layout();
        Ok(json!({
            "revision": self.revision,
            "hash": self.doc.hash(),
            "changes": self.changes_json(&changes),
        }))
    }

    fn changes_json(&self, c: &Changes) -> Value {
        let mut out = json!({
            "topology_changed": c.topology_changed,
            "vertex_ranges": c.vertex_ranges.iter().map(|(s, v)| json!({"start": s, "vertices": v})).collect::<Vec<_>>(),
            "panels": c.panels.iter().map(|(i, p)| json!({"index": i, "panel": p})).collect::<Vec<_>>(),
            "affected": c.affected,
        });
        if c.topology_changed {
            let file = to_file(&self.doc);
            out["garment"] = serde_json::to_value(&file.garment).expect("garment serializes");
            out["seams"] = serde_json::to_value(&file.seams).expect("seams serialize");
            out["layout"] = serde_json::to_value(self.layout_json()).expect("layout serializes");
        }
        out
    }
}

/// Changes between two states, eliding moves of at most `DELTA_EPSILON`.
pub fn diff(before: &GarmentDocument, after: &GarmentDocument, affected: Vec<usize>) -> Changes {
    let topology_changed = before.garment.vertices.len() != after.garment.vertices.len()
        || before.garment.triangles != after.garment.triangles
        || before.panels.len() != after.panels.len()
        || before
            .panels
            .iter()
            .zip(&after.panels)
            .any(|(a, b)| a.triangles != b.triangles || a.corr != b.corr);
    let file = to_file(after);
    if topology_changed {
        return Changes {
            topology_changed,
            vertex_ranges: Vec::new(),
            panels: file.panels.into_iter().enumerate().collect(),
            affected,
        };
    }
    let mut vertex_ranges: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut last: Option<usize> = None;
    for (i, (p, q)) in before.garment.vertices.iter().zip(&after.garment.vertices).enumerate() {
        if (p - q).norm() <= DELTA_EPSILON {
            continue;
        }
        let coords = [q.x, q.y, q.z];
        match (last, vertex_ranges.last_mut()) {
            (Some(l), Some(run)) if l + 1 == i => run.1.extend(coords),
            _ => vertex_ranges.push((i, coords.to_vec())),
        }
        last = Some(i);
    }
    let panels = before
        .panels
        .iter()
        .zip(file.panels)
        .enumerate()
        .filter(|(i, (old, _))| {
            old.vertices
                .iter()
                .zip(&after.panels[*i].vertices)
                .any(|(a, b)| (a - b).norm() > DELTA_EPSILON)
        })
        .map(|(i, (_, new))| (i, new))
        .collect();
    Changes {
        topology_changed,
        vertex_ranges,
        panels,
        affected,
    }
}
