//! Scale-preserving sewing pattern adjustment: edits made on a 3D garment
//! are carried to its 2D pattern so every fabric triangle keeps its
//! memorized stretch.

pub mod document;
pub mod edit;
pub mod fixtures;
pub mod flatten;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod metrics;

pub use document::{GarmentDocument, HistoryEntry, ValidationError};
pub use edit::{apply_op, ApplyOptions, ApplyOutcome, EditError, EditOp};
