//! 3D garment edits and their effect on the pattern.

pub mod apply;
pub mod boundary;
pub mod collision;
pub mod error;
pub mod extend;
pub mod levelset;
pub mod mirror;
pub mod op;
pub mod scale;
pub mod seam;
pub mod shorten;
pub mod sketch;

pub use apply::{apply_op, replay, ApplyOptions, ApplyOutcome};
pub use boundary::{boundary_chains, pick_chain, BoundaryChain};
pub use collision::resolve_body_collisions;
pub use error::EditError;
pub use extend::{extend, extend_strip, ExtendResult};
pub use levelset::{level_set_cut, CutResult, Keep, ScalarField};
pub use mirror::mirror_edit;
pub use op::{AxisMode, BoundaryRef, Camera, EditOp, Projection, Region, ScriptRecord, StrokeSide};
pub use scale::scale_region;
pub use seam::move_seam;
pub use shorten::shorten;
pub use sketch::{cut_by_sketch, CameraBasis};
