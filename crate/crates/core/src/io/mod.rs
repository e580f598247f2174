//! File formats: documents, OBJ meshes, SVG patterns and edit scripts.

pub mod document;
pub mod format;
pub mod obj;
pub mod script;
pub mod svg;

pub use document::{load_document, save_document, state_hash, DocumentError};
pub use obj::{import_obj, ObjError};
pub use script::{parse_script, save_script, ScriptError};
pub use svg::{export_pattern_svg, pattern_layout};
