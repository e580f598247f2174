//! Wavefront OBJ import: positions, triangular faces and group names.

use std::collections::BTreeMap;

use nalgebra::Point3;
use thiserror::Error;

use crate::geometry::Mesh3;

/// Group name used for faces that precede any `g` or `usemtl` line.
pub const DEFAULT_GROUP: &str = "default";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjError {
    #[error("line {line}: face has {count} vertices, expected 3")]
    NonTriangleFace { line: usize, count: usize },
    #[error("group {0:?} has no panel assignment")]
    MissingGroup(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl ObjError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NonTriangleFace { .. } => "NonTriangleFace",
            Self::MissingGroup(_) => "MissingGroup",
            Self::Malformed { .. } => "ParseError",
        }
    }
}

fn face_index(token: &str, count: usize, line: usize) -> Result<usize, ObjError> {
    let bad = |message: String| ObjError::Malformed { line, message };
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| bad(format!("bad vertex index {token:?}")))?;
    let index = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        -1
    };
    if index < 0 || index as usize >= count {
        return Err(bad(format!("vertex index {raw} out of range")));
    }
    Ok(index as usize)
}

/// Parses `text`, assigning each face the panel mapped to its current group
/// (the latest `g` or `usemtl` name).
pub fn import_obj(text: &str, assignment: &BTreeMap<String, usize>) -> Result<Mesh3, ObjError> {
    let mut mesh = Mesh3::default();
    let mut group = DEFAULT_GROUP.to_string();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(tag) = tokens.next() else {
            continue;
        };
        match tag {
            "v" => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| ObjError::Malformed {
                        line,
                        message: e.to_string(),
                    })?;
                if coords.len() != 3 || coords.iter().any(|x| !x.is_finite()) {
                    return Err(ObjError::Malformed {
                        line,
                        message: "vertex needs three finite coordinates".into(),
                    });
                }
                mesh.vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            "f" => {
                let corners: Vec<&str> = tokens.collect();
                if corners.len() != 3 {
                    return Err(ObjError::NonTriangleFace {
                        line,
                        count: corners.len(),
                    });
                }
                let n = mesh.vertices.len();
                let tri = [
                    face_index(corners[0], n, line)?,
                    face_index(corners[1], n, line)?,
                    face_index(corners[2], n, line)?,
                ];
                let panel = *assignment.get(&group).ok_or_else(|| ObjError::MissingGroup(group.clone()))?;
                mesh.triangles.push(tri);
                mesh.panel_ids.push(panel);
            }
            "g" | "usemtl" => {
                let name: Vec<&str> = tokens.collect();
                group = if name.is_empty() {
                    DEFAULT_GROUP.to_string()
                } else {
                    name.join(" ")
                };
            }
            _ => {}
        }
    }
    Ok(mesh)
}
