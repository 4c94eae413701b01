//! Intrinsic geometry of closed convex polyhedral surfaces.
//!
//! Geodesics are traced by unfolding face chains into the plane, intrinsic
//! distances come from a best-first search over edge sequences, and the
//! curvature measure is the vertex angle defect. On top of that sit the
//! comparison checks (hinge angles, areas, first variation), cutting along
//! closed geodesics, and the exact closed-geodesic spectrum of isosceles
//! tetrahedra.

pub mod development;
pub mod error;
pub mod geom;
pub mod harness;
pub mod isosceles;
pub mod mesh;
pub mod regions;
pub mod shapes;
pub mod shortest_path;
pub mod split;
pub mod surface;

pub use development::{GeodesicPath, Location, PathSegment, SurfacePoint, TangentDirection};
pub use error::{GeoError, Result};
pub use geom::{PlanarIsometry, Vec2, Vec3};
pub use isosceles::{IsoscelesSpec, LatticeGeodesicIndex};
pub use mesh::TriMesh;
pub use regions::{DiscSurface, GeodesicTriangle, ModelTriangle};
pub use surface::{load_off, CurvatureReport, PolyhedralSurface, Violation};
