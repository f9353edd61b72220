//! Solid-geometry analysis kernel: booleans, buffers, overlay, convex hulls,
//! convex decomposition, boundary-representation topology, Minkowski sums and
//! intersection detection over closed triangle meshes.
//!
//! Coordinates are `f64`; every decision (orientation, containment, contact)
//! is made with exact or adaptively exact predicates, and constructed points
//! are kept as exact rationals until output.

pub mod buffer;
pub mod convex;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod geom;
pub mod intersect;
pub mod io;
pub mod mesh;
pub mod overlay;
pub mod predicates;
pub mod setops;
pub mod shapes;
pub mod topology;

pub use buffer::{buffer_body, buffer_face, buffer_point, buffer_polyline, BufferParams};
pub use convex::{convex_hull, is_convex, minkowski_sum_convex, minkowski_sum_general, ConvexPolytope, Facet};
pub use decompose::{convex_decompose, tetrahedralize, Decomposition, PieceSource};
pub use error::{Error, Result};
pub use geom::{Aabb, Point3, Segment3, Tolerance, Triangle3};
pub use intersect::{AabbTree, IntersectionKind, IntersectionOutcome, Location, Polyline};
pub use mesh::{mesh_area, mesh_volume, validate_mesh, AreaReport, Mesh, ValidationReport};
pub use overlay::{
    overlay, reclassify, region_stats, AttrValue, AttributeRecord, Cell, ClassRule, Layer, OverlayResult, Polygon,
    Region, Stats,
};
pub use predicates::{orient3d, Sign};
pub use setops::{boolean, difference, meet, symmetric_difference, union, BooleanKind};
pub use topology::{build_topology, BodyInput, Census, EulerReport, PolyFace, RelationGroup, TopologyModel};
