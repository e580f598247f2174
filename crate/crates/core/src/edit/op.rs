//! Serializable descriptions of user edits.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisMode {
    /// Along the associated bone axis.
    Along,
    /// Radially away from the bone axis.
    Perpendicular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    /// Garment triangle ids.
    pub triangles: Vec<usize>,
    /// Garment vertices that must not move.
    #[serde(default)]
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryRef {
    /// A 3D point near the boundary; the nearest free boundary chain is used.
    pub pick: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeSide {
    Left,
    Right,
}

impl StrokeSide {
    pub fn opposite(self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Projection {
    /// Vertical field of view in degrees.
    Perspective { fov_y: f64 },
    /// Visible height in centimeters.
    Orthographic { height: f64 },
}

/// View used to interpret a screen-space sketch. Screen coordinates are
/// pixels from the viewport centre, x to the right and y up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Camera {
    pub eye: [f64; 3],
    pub target: [f64; 3],
    pub up: [f64; 3],
    pub projection: Projection,
    /// Viewport width and height in pixels.
    pub viewport: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EditOp {
    ScaleRegion {
        region: Region,
        mode: AxisMode,
        factor: f64,
    },
    MoveSeam {
        seam: usize,
        mode: AxisMode,
        offset: f64,
        /// Keep the far boundary of side B in place, stretching it, instead
        /// of translating it with the seam.
        #[serde(default)]
        fix_far_boundary: bool,
    },
    Cut {
        sketch: Vec<[f64; 2]>,
        camera: Camera,
        #[serde(default)]
        both_sides: bool,
        /// Side of the stroke to remove; both sides are kept as separate
        /// panels when absent.
        #[serde(default)]
        discard: Option<StrokeSide>,
    },
    Shorten {
        boundary: BoundaryRef,
        distance: f64,
    },
    Extend {
        boundary: BoundaryRef,
        distance: f64,
    },
}

impl EditOp {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::ScaleRegion { .. } => "scale_region",
            Self::MoveSeam { .. } => "move_seam",
            Self::Cut { .. } => "cut",
            Self::Shorten { .. } => "shorten",
            Self::Extend { .. } => "extend",
        }
    }

    /// Whether the parameters make the op an exact identity.
    pub fn is_neutral(&self) -> bool {
        match self {
            Self::ScaleRegion { factor, .. } => *factor == 1.0,
            Self::MoveSeam { offset, .. } => *offset == 0.0,
            Self::Cut { .. } => false,
            Self::Shorten { distance, .. } | Self::Extend { distance, .. } => *distance == 0.0,
        }
    }
}

/// One line of an edit script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptRecord {
    pub op: EditOp,
    #[serde(default)]
    pub mirror: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_round_trip() {
        let op = EditOp::MoveSeam {
            seam: 2,
            mode: AxisMode::Along,
            offset: -1.0,
            fix_far_boundary: true,
        };
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"move_seam","seam":2,"mode":"along","offset":-1.0,"fix_far_boundary":true}"#
        );
        assert_eq!(serde_json::from_str::<EditOp>(&text).unwrap(), op);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"kind":"shorten","boundary":{"pick":[0,0,0]},"distance":1,"extra":3}"#;
        assert!(serde_json::from_str::<EditOp>(text).is_err());
    }

    #[test]
    fn neutral_parameters() {
        let pick = BoundaryRef { pick: [0.0; 3] };
        assert!(EditOp::Extend { boundary: pick, distance: 0.0 }.is_neutral());
        assert!(!EditOp::Shorten { boundary: pick, distance: 0.5 }.is_neutral());
    }
}
