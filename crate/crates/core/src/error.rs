use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("convexity error: {0}")]
    Convexity(String),
    #[error("invalid index {index} (limit {limit})")]
    InvalidIndex { index: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("geodesic passes within tolerance of vertex {vertex}")]
    VertexHit { vertex: usize },
    #[error("geodesic reached the surface boundary on face {face}")]
    BoundaryHit { face: usize },
    #[error("shortest-path search exceeded depth limit {limit}")]
    DepthExceeded { limit: usize },
    #[error("triangle inequality violated: ({0}, {1}, {2})")]
    TriangleInequality(f64, f64, f64),
    #[error("path is not closed")]
    NotClosed,
    #[error("path self-intersects")]
    SelfIntersecting,
    #[error("triangle sides cross")]
    SidesCross,
    #[error("non-acute face triangle ({0}, {1}, {2})")]
    NotAcute(f64, f64, f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("development does not close into a triangle (residual {0:e})")]
    DevelopmentFailed(f64),
    #[error("cut failed: {0}")]
    Cut(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
