//! The "pt-1" document file: JSON with flat coordinate and index arrays.

use nalgebra::{Matrix2, Point2, Point3, Vector3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::format::{parse_error_position, CompactArrays};
use crate::document::{GarmentDocument, HistoryEntry, ValidationError, DOCUMENT_VERSION};
use crate::edit::EditOp;
use crate::flatten::scale_map::{compute_intrinsic_scale_map, IntrinsicScaleMap};
use crate::flatten::FlattenError;
use crate::geometry::{BodyModel, Bone, FeaturePoint, Mesh3, Panel, SeamLine, Symmetry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("parse error at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0:?}")]
    UnsupportedVersion(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    ScaleMap(#[from] FlattenError),
}

impl DocumentError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "ParseError",
            Self::UnsupportedVersion(_) => "UnsupportedVersion",
            Self::Validation(_) => "ValidationError",
            Self::ScaleMap(e) => e.name(),
        }
    }

    /// The offending entity, for error payloads.
    pub fn entity(&self) -> String {
        match self {
            Self::Parse { offset, .. } => format!("byte {offset}"),
            Self::UnsupportedVersion(v) => format!("version {v}"),
            Self::Validation(e) => e.entity.clone(),
            Self::ScaleMap(_) => "scale_map".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoneFile {
    pub name: String,
    pub start: [f64; 3],
    pub end: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturePointFile {
    pub name: String,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub vertices: Vec<f64>,
    pub triangles: Vec<usize>,
    #[serde(default)]
    pub skeleton: Vec<BoneFile>,
    #[serde(default)]
    pub feature_points: Vec<FeaturePointFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GarmentFile {
    pub vertices: Vec<f64>,
    pub triangles: Vec<usize>,
    pub panel_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelFile {
    pub name: String,
    pub vertices: Vec<f64>,
    pub triangles: Vec<usize>,
    pub boundary: Vec<usize>,
    pub corr: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeamFile {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryFile {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub pairs: Vec<[usize; 2]>,
}

/// Row-major 2×2 matrices, four numbers per triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleMapFile {
    pub matrices: Vec<f64>,
    pub designated_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryFile {
    pub op: EditOp,
    #[serde(default)]
    pub mirror: bool,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentFile {
    pub version: String,
    pub body: BodyFile,
    pub garment: GarmentFile,
    pub panels: Vec<PanelFile>,
    pub seams: Vec<SeamFile>,
    #[serde(default)]
    pub symmetry: Option<SymmetryFile>,
    /// Memorized scale matrices, one entry per panel. Computed from the
    /// geometry when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_map: Option<Vec<ScaleMapFile>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<HistoryFile>,
}

/// `x` rounded to 9 significant digits, with `-0` written as `0`.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn flat3(points: &[Point3<f64>]) -> Vec<f64> {
    points.iter().flat_map(|p| [round9(p.x), round9(p.y), round9(p.z)]).collect()
}

fn flat2(points: &[Point2<f64>]) -> Vec<f64> {
    points.iter().flat_map(|p| [round9(p.x), round9(p.y)]).collect()
}

fn arr3(v: [f64; 3]) -> [f64; 3] {
    v.map(round9)
}

fn flat_tris(tris: &[[usize; 3]]) -> Vec<usize> {
    tris.iter().flatten().copied().collect()
}

/// The file form of `doc`, coordinates rounded to 9 significant digits.
pub fn to_file(doc: &GarmentDocument) -> DocumentFile {
    DocumentFile {
        version: doc.version.clone(),
        body: BodyFile {
            vertices: flat3(&doc.body.mesh.vertices),
            triangles: flat_tris(&doc.body.mesh.triangles),
            skeleton: doc
                .body
                .skeleton
                .iter()
                .map(|b| BoneFile {
                    name: b.name.clone(),
                    start: arr3(b.start.into()),
                    end: arr3(b.end.into()),
                })
                .collect(),
            feature_points: doc
                .body
                .feature_points
                .iter()
                .map(|f| FeaturePointFile {
                    name: f.name.clone(),
                    position: arr3(f.position.into()),
                })
                .collect(),
        },
        garment: GarmentFile {
            vertices: flat3(&doc.garment.vertices),
            triangles: flat_tris(&doc.garment.triangles),
            panel_ids: doc.garment.panel_ids.clone(),
        },
        panels: doc
            .panels
            .iter()
            .map(|p| PanelFile {
                name: p.name.clone(),
                vertices: flat2(&p.vertices),
                triangles: flat_tris(&p.triangles),
                boundary: p.boundary.clone(),
                corr: p.corr.clone(),
            })
            .collect(),
        seams: doc
            .seams
            .iter()
            .map(|s| SeamFile {
                side_a: s.side_a.clone(),
                side_b: s.side_b.clone(),
            })
            .collect(),
        symmetry: doc.symmetry.as_ref().map(|s| SymmetryFile {
            point: arr3(s.point.into()),
            normal: arr3(s.normal.into()),
            pairs: s.pairs.clone(),
        }),
        scale_map: Some(
            doc.scale_maps
                .iter()
                .map(|m| ScaleMapFile {
                    matrices: m
                        .matrices
                        .iter()
                        .flat_map(|a| [a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]].map(round9))
                        .collect(),
                    designated_edges: m.designated_edges.clone(),
                })
                .collect(),
        ),
        history: doc
            .history
            .iter()
            .map(|h| HistoryFile {
                op: h.op.clone(),
                mirror: h.mirror,
                hash: h.hash.clone(),
            })
            .collect(),
    }
}

fn chunks<const N: usize, T: Copy>(flat: &[T], entity: &str) -> Result<Vec<[T; N]>, ValidationError> {
    if flat.len() % N != 0 {
        return Err(ValidationError {
            invariant: "flat_array_length",
            entity: entity.to_string(),
        });
    }
    Ok(flat
        .chunks_exact(N)
        .map(|c| std::array::from_fn(|i| c[i]))
        .collect())
}

fn points3(flat: &[f64], entity: &str) -> Result<Vec<Point3<f64>>, ValidationError> {
    Ok(chunks::<3, f64>(flat, entity)?.into_iter().map(Point3::from).collect())
}

/// Builds and validates a document from its file form.
pub fn from_file(file: DocumentFile) -> Result<GarmentDocument, DocumentError> {
    if file.version != DOCUMENT_VERSION {
        return Err(DocumentError::UnsupportedVersion(file.version));
    }
    let body = BodyModel {
        mesh: Mesh3 {
            vertices: points3(&file.body.vertices, "body vertices")?,
            triangles: chunks::<3, usize>(&file.body.triangles, "body triangles")?,
            panel_ids: Vec::new(),
        },
        skeleton: file
            .body
            .skeleton
            .into_iter()
            .map(|b| Bone {
                name: b.name,
                start: b.start.into(),
                end: b.end.into(),
            })
            .collect(),
        feature_points: file
            .body
            .feature_points
            .into_iter()
            .map(|f| FeaturePoint {
                name: f.name,
                position: f.position.into(),
            })
            .collect(),
    };
    let garment = Mesh3 {
        vertices: points3(&file.garment.vertices, "garment vertices")?,
        triangles: chunks::<3, usize>(&file.garment.triangles, "garment triangles")?,
        panel_ids: file.garment.panel_ids,
    };
    let mut panels = Vec::with_capacity(file.panels.len());
    for (i, p) in file.panels.into_iter().enumerate() {
        let entity = format!("panel {i} ({})", p.name);
        panels.push(Panel {
            vertices: chunks::<2, f64>(&p.vertices, &entity)?
                .into_iter()
                .map(Point2::from)
                .collect(),
            triangles: chunks::<3, usize>(&p.triangles, &entity)?,
            boundary: p.boundary,
            corr: p.corr,
            name: p.name,
        });
    }
    let seams = file
        .seams
        .into_iter()
        .map(|s| SeamLine {
            side_a: s.side_a,
            side_b: s.side_b,
        })
        .collect();
    let symmetry = file.symmetry.map(|s| Symmetry {
        point: s.point.into(),
        normal: Vector3::from(s.normal),
        pairs: s.pairs,
    });
    let history = file
        .history
        .into_iter()
        .map(|h| HistoryEntry {
            op: h.op,
            mirror: h.mirror,
            hash: h.hash,
        })
        .collect();
    let mut doc = GarmentDocument {
        version: file.version,
        body,
        garment,
        panels,
        seams,
        symmetry,
        scale_maps: Vec::new(),
        history,
    };
    match file.scale_map {
        Some(maps) => {
            for (i, m) in maps.into_iter().enumerate() {
                let matrices = chunks::<4, f64>(&m.matrices, &format!("panel {i}"))
                    .map_err(|e| ValidationError {
                        invariant: "scale_map",
                        entity: e.entity,
                    })?
                    .into_iter()
                    .map(|a| Matrix2::new(a[0], a[1], a[2], a[3]))
                    .collect();
                doc.scale_maps.push(IntrinsicScaleMap {
                    matrices,
                    designated_edges: m.designated_edges,
                });
            }
            doc.validate()?;
        }
        None => {
            // the geometry must be sound before frames are taken
            doc.scale_maps = doc.panels.iter().map(|p| IntrinsicScaleMap::identity(p.triangles.len())).collect();
            doc.validate()?;
            doc.scale_maps = doc
                .panels
                .iter()
                .map(|p| compute_intrinsic_scale_map(p, &doc.garment))
                .collect::<Result<_, _>>()?;
            doc.validate()?;
        }
    }
    Ok(doc)
}

pub fn load_document(text: &str) -> Result<GarmentDocument, DocumentError> {
    let parse = |e: serde_json::Error| {
        let (offset, line, column) = parse_error_position(text, &e);
        DocumentError::Parse {
            offset,
            line,
            column,
            message: e.to_string(),
        }
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse)?;
    match value.get("version").and_then(|v| v.as_str()) {
        Some(DOCUMENT_VERSION) => {}
        Some(other) => return Err(DocumentError::UnsupportedVersion(other.to_string())),
        None => {}
    }
    let file: DocumentFile = serde_json::from_str(text).map_err(parse)?;
    from_file(file)
}

/// Pretty JSON with one-line number arrays, newline terminated.
pub fn save_document(doc: &GarmentDocument) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactArrays::default());
    to_file(doc).serialize(&mut ser).expect("document serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// SHA-256 over the compact canonical JSON of everything but the history.
pub fn state_hash(doc: &GarmentDocument) -> String {
    let mut file = to_file(doc);
    file.history.clear();
    let bytes = serde_json::to_vec(&file).expect("document serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const MINIMAL: &str = r#"{
  "version": "pt-1",
  "body": {"vertices": [], "triangles": []},
  "garment": {"vertices": [0,0,0, 1,0,0, 1,1,0, 0,1,0], "triangles": [0,1,2, 0,2,3], "panel_ids": [0,0]},
  "panels": [{"name": "square", "vertices": [0,0, 1,0, 1,1, 0,1], "triangles": [0,1,2, 0,2,3], "boundary": [0,1,2,3], "corr": [0,1,2,3]}],
  "seams": [],
  "symmetry": null
}"#;

    #[test]
    fn minimal_document_has_identity_map() {
        let doc = load_document(MINIMAL).unwrap();
        for m in &doc.scale_maps[0].matrices {
            assert!((m - Matrix2::identity()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn triangle_count_mismatch_names_the_panel() {
        let text = MINIMAL.replace(r#""panel_ids": [0,0]"#, r#""panel_ids": [0,0,0]"#).replace(
            r#""triangles": [0,1,2, 0,2,3], "panel_ids""#,
            r#""triangles": [0,1,2, 0,2,3, 1,2,3], "panel_ids""#,
        );
        let err = load_document(&text).unwrap_err();
        let DocumentError::Validation(v) = err else {
            panic!("expected a validation error, got {err:?}");
        };
        assert_eq!(v.invariant, "panel_triangle_count");
        assert_eq!(v.entity, "panel 0 (square)");
    }

    #[test]
    fn truncated_file_reports_offset() {
        let text = &MINIMAL[..120];
        let err = load_document(text).unwrap_err();
        let DocumentError::Parse { offset, .. } = err else {
            panic!("expected a parse error, got {err:?}");
        };
        assert_eq!(offset, 120);
    }

    #[test]
    fn version_is_checked() {
        let text = MINIMAL.replace("pt-1", "pt-9");
        assert_eq!(load_document(&text).unwrap_err(), DocumentError::UnsupportedVersion("pt-9".into()));
    }

    #[test]
    fn round_trip_preserves_hash_and_bytes() {
        for doc in [fixtures::elastic_cuff(), fixtures::mirrored_sleeves(), fixtures::random_patch(3, 4)] {
            let first = save_document(&doc);
            let loaded = load_document(&first).unwrap();
            assert_eq!(loaded.hash(), doc.hash());
            let second = save_document(&loaded);
            assert_eq!(first, second);
            assert_eq!(save_document(&load_document(&second).unwrap()), second);
        }
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 3.0, -2.5e-7, 123456.789012345, -0.0] {
            let r = round9(x);
            assert_eq!(round9(r).to_bits(), r.to_bits());
        }
        assert_eq!(round9(-0.0).to_bits(), 0.0f64.to_bits());
    }
}
