use thiserror::Error;

use crate::flatten::FlattenError;
use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("scale factor {0} outside (0.1, 10)")]
    InvalidFactor(f64),
    #[error("region is empty")]
    EmptyRegion,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("region is not edge-connected within panel {panel}")]
    DisconnectedRegion { panel: usize },
    #[error("no skeleton bone within reach (nearest at {distance} cm)")]
    NoNearbyBone { distance: f64 },
    #[error("offset {offset} cm exceeds the adjacent part extent {limit} cm")]
    OffsetOutOfRange { offset: f64, limit: f64 },
    #[error("seam {seam} not found")]
    SeamNotFound { seam: usize },
    #[error("seam {seam} joins a panel to itself and cannot be moved")]
    SelfSeam { seam: usize },
    #[error("sketch does not hit the garment")]
    NoIntersection,
    #[error("cutting loop cannot be closed")]
    OpenLoop,
    #[error("garment has no free boundary")]
    NoBoundary,
    #[error("invalid distance {0} cm")]
    InvalidDistance(f64),
    #[error("invalid sketch: {0}")]
    InvalidSketch(String),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("panel {panel} would lose disk topology")]
    NonDiskPanel { panel: usize },
    #[error("edit would remove the whole garment")]
    EmptyResult,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flatten(#[from] FlattenError),
}

impl EditError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvalidFactor(_) => "InvalidFactor",
            Self::EmptyRegion => "EmptyRegion",
            Self::InvalidRegion(_) => "InvalidRegion",
            Self::DisconnectedRegion { .. } => "DisconnectedRegion",
            Self::NoNearbyBone { .. } => "NoNearbyBone",
            Self::OffsetOutOfRange { .. } => "OffsetOutOfRange",
            Self::SeamNotFound { .. } => "SeamNotFound",
            Self::SelfSeam { .. } => "SelfSeam",
            Self::NoIntersection => "NoIntersection",
            Self::OpenLoop => "OpenLoop",
            Self::NoBoundary => "NoBoundary",
            Self::InvalidDistance(_) => "InvalidDistance",
            Self::InvalidSketch(_) => "InvalidSketch",
            Self::InvalidCamera(_) => "InvalidCamera",
            Self::NonDiskPanel { .. } => "NonDiskPanel",
            Self::EmptyResult => "EmptyResult",
            Self::Geometry(e) => e.name(),
            Self::Flatten(e) => e.name(),
        }
    }
}
