//! Scale-preserving pattern flattening.

pub mod error;
pub mod pins;
pub mod scale_map;
pub mod stitch;
pub mod tangent;
pub mod uniform;
pub mod update;

pub use error::{FlattenError, Side};
pub use scale_map::{compute_intrinsic_scale_map, per_triangle_targets, IntrinsicScaleMap};
pub use stitch::{stitch, GlobalStep, SolverConfig, StitchProblem, StitchResult};
pub use tangent::{build_tangent_constraints, TangentConstraint, TangentSet};
pub use uniform::flatten_uniform;
pub use update::{evaluate_pattern, update_pattern, AsapMode, PanelSolve, PatternUpdate};
