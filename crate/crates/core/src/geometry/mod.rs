//! Mesh types and the geometric primitives everything else is built on.

pub mod barycentric;
pub mod error;
pub mod frame;
pub mod geodesic;
pub mod isoline;
pub mod mesh;
pub mod query;
pub mod symmetry;
pub mod topology;

pub use barycentric::{barycentric, interpolate};
pub use error::GeometryError;
pub use frame::{closest_rotation, local_frame, rotation, LocalFrame};
pub use geodesic::{geodesic_from_boundary, geodesic_with_glue};
pub use isoline::{extract_isoline, IsoPoint, Polyline};
pub use mesh::{BodyModel, Bone, FeaturePoint, Mesh3, Panel, SeamLine, DEGENERATE_AREA};
pub use symmetry::Symmetry;
pub use topology::GlueMap;
