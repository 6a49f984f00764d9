//! Workbench for TEP subshifts of finite type on `Z^d`, free groups and the
//! Heisenberg group: convex geometries, legality, counting, perfect sampling,
//! contours and the independence solitaire.

pub mod contour;
pub mod error;
pub mod geometry;
pub mod group;
pub mod rng;
pub mod solitaire;
pub mod tep;

pub use error::{Error, Result};
pub use geometry::{AntiShelling, ConvexGeometry, GeometryKind, OmegaOrder, Policy};
pub use group::{Element, GroupSpec, Shape};
