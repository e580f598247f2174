use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate triangle (area {area:e} cm²)")]
    DegenerateTriangle { area: f64 },
    #[error("distance source set is empty")]
    EmptySource,
    #[error("vertex index {index} out of range for {len} vertices")]
    InvalidIndex { index: usize, len: usize },
    #[error("iso-level must be positive, got {0}")]
    InvalidLevel(f64),
    #[error("no mesh edge brackets distance {level}")]
    EmptyIsoline { level: f64 },
    #[error("document declares no left-right symmetry")]
    NoSymmetryDeclared,
    #[error("panel {panel} has no mirror counterpart")]
    UnpairedPanel { panel: usize },
    #[error("no mirror counterpart for {what}")]
    NoMirrorCounterpart { what: String },
}

impl GeometryError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::DegenerateTriangle { .. } => "DegenerateTriangle",
            Self::EmptySource => "EmptySource",
            Self::InvalidIndex { .. } => "InvalidIndex",
            Self::InvalidLevel(_) => "InvalidLevel",
            Self::EmptyIsoline { .. } => "EmptyIsoline",
            Self::NoSymmetryDeclared => "NoSymmetryDeclared",
            Self::UnpairedPanel { .. } => "UnpairedPanel",
            Self::NoMirrorCounterpart { .. } => "NoMirrorCounterpart",
        }
    }
}
