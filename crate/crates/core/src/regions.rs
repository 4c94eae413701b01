//! Model triangles, discs cut out by closed curves, and their curvature.

use crate::development::{GeodesicPath, Location, PathSegment, SurfacePoint};
use crate::error::{GeoError, Result};
use crate::mesh::TriMesh;
use crate::shortest_path::{intrinsic_distance, DEFAULT_DEPTH};
use crate::split::{split_along, Piece};
use crate::surface::{mesh_to_off, PolyhedralSurface};
use serde::Serialize;
use std::f64::consts::PI;

const TRIANGLE_SLACK: f64 = 1e-12;
const SIMPLE_TOLERANCE: f64 = 1e-9;

fn check_sides(a: f64, b: f64, c: f64) -> Result<()> {
    let ok = [a, b, c].iter().all(|x| x.is_finite() && *x >= 0.0)
        && a + b >= c - TRIANGLE_SLACK
        && a + c >= b - TRIANGLE_SLACK
        && b + c >= a - TRIANGLE_SLACK;
    if ok {
        Ok(())
    } else {
        Err(GeoError::TriangleInequality(a, b, c))
    }
}

/// Angle between sides `a` and `b` of a planar triangle whose third side
/// is `c`.
pub fn model_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    check_sides(a, b, c)?;
    if a <= 0.0 || b <= 0.0 {
        return Err(GeoError::TriangleInequality(a, b, c));
    }
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Heron's formula in the stable ordering.
pub fn model_area(a: f64, b: f64, c: f64) -> Result<f64> {
    check_sides(a, b, c)?;
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    Ok(0.25 * p.max(0.0).sqrt())
}

/// Planar triangle with prescribed side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelTriangle {
    pub sides: [f64; 3],
    /// `angles[i]` is opposite `sides[i]`.
    pub angles: [f64; 3],
}

impl ModelTriangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Ok(Self {
            sides: [a, b, c],
            angles: [
                model_angle(b, c, a)?,
                model_angle(c, a, b)?,
                model_angle(a, b, c)?,
            ],
        })
    }

    pub fn area(&self) -> f64 {
        model_area(self.sides[0], self.sides[1], self.sides[2]).unwrap_or(0.0)
    }
}

/// A disc cut out of a surface, with its provenance.
#[derive(Debug, Clone)]
pub struct DiscSurface {
    pub mesh: TriMesh,
    /// Boundary vertex cycle, following the faces' orientation.
    pub boundary: Vec<usize>,
    pub parent_faces: Vec<usize>,
    pub origins: Vec<Location>,
    /// Curvature carried by each vertex, inherited from the parent for
    /// interior original vertices and zero for points created by the cut.
    pub defects: Vec<f64>,
}

impl DiscSurface {
    fn from_piece(parent: &TriMesh, piece: Piece) -> Result<Self> {
        if piece.boundary.len() != 1 {
            return Err(GeoError::Cut(format!(
                "region has {} boundary loops, expected 1",
                piece.boundary.len()
            )));
        }
        let m = &piece.mesh;
        let chi = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_faces() as i64;
        if chi != 1 {
            return Err(GeoError::Cut(format!(
                "region has Euler characteristic {chi}"
            )));
        }
        let defects = (0..m.num_vertices())
            .map(|v| match piece.origins[v] {
                Location::Vertex(p) if !m.is_boundary_vertex(v) => parent.vertex_defect(p),
                _ => 0.0,
            })
            .collect();
        Ok(Self {
            boundary: piece.boundary.into_iter().next().unwrap(),
            mesh: piece.mesh,
            parent_faces: piece.parent_faces,
            origins: piece.origins,
            defects,
        })
    }

    pub fn area(&self) -> f64 {
        self.mesh.total_area()
    }

    pub fn curvature(&self) -> f64 {
        disc_curvature(self)
    }

    /// Interior vertices with non-zero curvature, as parent vertex ids.
    pub fn singular_parent_vertices(&self) -> Vec<usize> {
        (0..self.mesh.num_vertices())
            .filter(|&v| self.defects[v].abs() > crate::surface::SINGULAR_THRESHOLD)
            .filter_map(|v| match self.origins[v] {
                Location::Vertex(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    /// Interior angle of the disc at a boundary vertex.
    pub fn boundary_angle(&self, v: usize) -> f64 {
        self.mesh.angle_sum(v)
    }

    /// Sum of `π − angle` over the boundary: the total turning of the
    /// boundary curve seen from inside.
    pub fn boundary_turning(&self) -> f64 {
        self.boundary
            .iter()
            .map(|&v| PI - self.boundary_angle(v))
            .sum()
    }

    /// Local index of the disc vertex sitting at `p` on the parent.
    pub fn find_vertex(&self, parent: &TriMesh, p: &SurfacePoint) -> Option<usize> {
        let tol = 1e-9 * parent.extent().max(1.0);
        (0..self.mesh.num_vertices()).find(|&v| {
            let q = SurfacePoint::from_location(parent, self.origins[v]);
            q.same_point(parent, p, tol)
        })
    }

    pub fn to_off(&self) -> String {
        mesh_to_off(&self.mesh)
    }

    /// Sidecar for [`Self::to_off`]: boundary cycle, parent faces and the
    /// parent location of every vertex.
    pub fn sidecar_json(&self) -> serde_json::Value {
        let origins: Vec<serde_json::Value> = self
            .origins
            .iter()
            .map(|o| match *o {
                Location::Vertex(v) => serde_json::json!({"kind": "vertex", "vertex": v}),
                Location::Edge { edge, t } => {
                    serde_json::json!({"kind": "edge", "edge": edge, "t": t})
                }
                Location::Face { face, bary } => {
                    serde_json::json!({"kind": "face", "face": face, "bary": bary})
                }
            })
            .collect();
        serde_json::json!({
            "boundary": self.boundary,
            "parent_faces": self.parent_faces,
            "origins": origins,
            "curvature": self.curvature(),
            "area": self.area(),
        })
    }
}

/// Sum of interior vertex defects.
pub fn disc_curvature(disc: &DiscSurface) -> f64 {
    (0..disc.mesh.num_vertices())
        .filter(|&v| !disc.mesh.is_boundary_vertex(v))
        .map(|v| disc.defects[v])
        .sum()
}

/// Cuts the surface along a closed simple geodesic into two discs.
pub fn cut_along_closed_geodesic(
    surface: &PolyhedralSurface,
    path: &GeodesicPath,
) -> Result<(DiscSurface, DiscSurface)> {
    let mesh = surface.mesh();
    if !path.closed || path.is_empty() {
        return Err(GeoError::NotClosed);
    }
    let first = path.start_point().unwrap();
    let last = path.end_point().unwrap();
    if !first.same_point(mesh, &last, 1e-9 * mesh.extent().max(1.0)) {
        return Err(GeoError::NotClosed);
    }
    if !path.is_simple(mesh, SIMPLE_TOLERANCE) {
        return Err(GeoError::SelfIntersecting);
    }
    let pieces = split_along(mesh, &path.segments)?;
    if pieces.len() != 2 {
        return Err(GeoError::Cut(format!(
            "cut produced {} pieces",
            pieces.len()
        )));
    }
    let mut it = pieces.into_iter();
    let a = DiscSurface::from_piece(mesh, it.next().unwrap())?;
    let b = DiscSurface::from_piece(mesh, it.next().unwrap())?;
    Ok((a, b))
}

/// Chains paths end to end into one closed loop, dropping empty segments.
fn join_loop(mesh: &TriMesh, sides: &[GeodesicPath]) -> Result<GeodesicPath> {
    let tol = 1e-9 * mesh.extent().max(1.0);
    let mut segments: Vec<PathSegment> = Vec::new();
    let mut total = 0.0;
    for (i, s) in sides.iter().enumerate() {
        let next = &sides[(i + 1) % sides.len()];
        match (s.end_point(), next.start_point()) {
            (Some(p), Some(q)) if p.same_point(mesh, &q, tol) => {}
            _ => return Err(GeoError::NotClosed),
        }
        segments.extend(s.segments.iter().filter(|g| g.length(mesh) > 0.0).cloned());
        total += s.total_length;
    }
    Ok(GeodesicPath {
        segments,
        total_length: total,
        closed: true,
    })
}

/// Region bounded by a closed chain of paths. `seed` picks the side that
/// contains it; without a seed the smaller-area side is returned.
pub fn enclosed_region(
    surface: &PolyhedralSurface,
    sides: &[GeodesicPath],
    seed: Option<&SurfacePoint>,
) -> Result<DiscSurface> {
    let mesh = surface.mesh();
    if sides.is_empty() {
        return Err(GeoError::NotClosed);
    }
    let boundary = join_loop(mesh, sides)?;
    if !boundary.is_simple(mesh, SIMPLE_TOLERANCE) {
        return Err(GeoError::SelfIntersecting);
    }
    let pieces = split_along(mesh, &boundary.segments)?;
    if pieces.len() != 2 {
        return Err(GeoError::SidesCross);
    }
    let idx = match seed {
        Some(p) => pieces
            .iter()
            .position(|piece| piece_contains(mesh, piece, p))
            .ok_or_else(|| GeoError::Precondition("seed lies on the boundary".into()))?,
        None => {
            if pieces[0].mesh.total_area() <= pieces[1].mesh.total_area() {
                0
            } else {
                1
            }
        }
    };
    let piece = pieces.into_iter().nth(idx).unwrap();
    DiscSurface::from_piece(mesh, piece)
}

fn piece_contains(parent: &TriMesh, piece: &Piece, p: &SurfacePoint) -> bool {
    let charts = p.charts(parent);
    for (f, &pf) in piece.parent_faces.iter().enumerate() {
        let Some(&(_, q)) = charts.iter().find(|(g, _)| *g == pf) else {
            continue;
        };
        let fv = piece.mesh.face(f);
        let corners: Vec<_> = fv
            .iter()
            .map(|&v| {
                let sp = SurfacePoint::from_location(parent, piece.origins[v]);
                sp.in_face(parent, pf)
                    .expect("piece vertex lies on its parent face")
            })
            .collect();
        let inside = (0..3).all(|k| {
            let a = corners[k];
            let b = corners[(k + 1) % 3];
            (b - a).cross(q - a) > 1e-12 * parent.extent().max(1.0).powi(2)
        });
        if inside {
            return true;
        }
    }
    false
}

/// Three points joined by minimizing geodesics, with the disc they bound.
#[derive(Debug, Clone)]
pub struct GeodesicTriangle {
    pub vertices: [SurfacePoint; 3],
    /// Sides `xy`, `yz`, `zx`.
    pub sides: [GeodesicPath; 3],
    pub region: DiscSurface,
    /// Interior angles of the region at x, y, z.
    pub angles: [f64; 3],
}

impl GeodesicTriangle {
    pub fn side_lengths(&self) -> [f64; 3] {
        [
            self.sides[0].total_length,
            self.sides[1].total_length,
            self.sides[2].total_length,
        ]
    }

    pub fn excess(&self) -> f64 {
        self.angles.iter().sum::<f64>() - PI
    }

    pub fn curvature(&self) -> f64 {
        disc_curvature(&self.region)
    }

    pub fn model(&self) -> Result<ModelTriangle> {
        let [xy, yz, zx] = self.side_lengths();
        ModelTriangle::new(yz, zx, xy)
    }
}

/// Builds the triangle on three points, enclosing the smaller-area side
/// unless `seed` is given.
pub fn geodesic_triangle(
    surface: &PolyhedralSurface,
    x: &SurfacePoint,
    y: &SurfacePoint,
    z: &SurfacePoint,
    seed: Option<&SurfacePoint>,
) -> Result<GeodesicTriangle> {
    let mesh = surface.mesh();
    let tol = 1e-12 * mesh.extent().max(1.0);
    if x.same_point(mesh, y, tol) || y.same_point(mesh, z, tol) || z.same_point(mesh, x, tol) {
        return Err(GeoError::Precondition(
            "triangle corners must be distinct".into(),
        ));
    }
    let (_, xy) = intrinsic_distance(mesh, x, y, DEFAULT_DEPTH)?;
    let (_, yz) = intrinsic_distance(mesh, y, z, DEFAULT_DEPTH)?;
    let (_, zx) = intrinsic_distance(mesh, z, x, DEFAULT_DEPTH)?;
    let sides = [xy, yz, zx];
    let region = match enclosed_region(surface, &sides, seed) {
        Err(GeoError::SelfIntersecting) | Err(GeoError::Cut(_)) => {
            return Err(GeoError::SidesCross)
        }
        r => r?,
    };
    let mut angles = [0.0; 3];
    for (i, p) in [x, y, z].into_iter().enumerate() {
        let v = region
            .find_vertex(mesh, p)
            .ok_or_else(|| GeoError::Cut("triangle corner missing from region".into()))?;
        angles[i] = region.boundary_angle(v);
    }
    Ok(GeodesicTriangle {
        vertices: [*x, *y, *z],
        sides,
        region,
        angles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::development::{trace_geodesic, TangentDirection};
    use crate::geom::Vec2;
    use crate::shapes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn model_angles_and_areas() {
        assert_abs_diff_eq!(
            model_angle(3.0, 4.0, 5.0).unwrap(),
            PI / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            model_angle(1.0, 1.0, 1.0).unwrap(),
            PI / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(model_angle(1.0, 1.0, 2.0).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(model_area(3.0, 4.0, 5.0).unwrap(), 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            model_area(1.0, 1.0, 1.0).unwrap(),
            3f64.sqrt() / 4.0,
            epsilon = 1e-15
        );
        assert_eq!(model_area(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert!(model_angle(1.0, 1.0, 3.0).is_err());
        let t = ModelTriangle::new(3.0, 4.0, 5.0).unwrap();
        assert_abs_diff_eq!(t.angles.iter().sum::<f64>(), PI, epsilon = 1e-14);
    }

    fn doubled_square_band() -> (PolyhedralSurface, GeodesicPath) {
        let s = shapes::doubled_rectangle(1.0, 1.0);
        let m = s.mesh();
        // Face 0 is the top copy [0,1,2] whose frame matches the plane.
        let start = SurfacePoint::from_frame(m, 0, Vec2::new(0.75, 0.5)).unwrap();
        let dir = TangentDirection::new(0, Vec2::new(1.0, 0.0)).unwrap();
        let path = trace_geodesic(m, start, dir, 3.0).unwrap();
        (s, path)
    }

    #[test]
    fn doubled_square_period_two() {
        let (s, path) = doubled_square_band();
        assert!(path.closed);
        assert_abs_diff_eq!(path.total_length, 2.0, epsilon = 1e-12);
        let (a, b) = cut_along_closed_geodesic(&s, &path).unwrap();
        for d in [&a, &b] {
            assert_abs_diff_eq!(d.curvature(), 2.0 * PI, epsilon = 1e-9);
            assert_eq!(d.singular_parent_vertices().len(), 2);
        }
        assert_abs_diff_eq!(a.area() + b.area(), s.area(), epsilon = 1e-12);
    }

    #[test]
    fn tetrahedron_mid_edge_band() {
        let s = shapes::regular_tetrahedron();
        let m = s.mesh();
        let fr = m.frame(0);
        let mab = (fr[0] + fr[1]) * 0.5;
        let mac = (fr[0] + fr[2]) * 0.5;
        let start = SurfacePoint::from_frame(m, 0, (mab + mac) * 0.5).unwrap();
        let dir = TangentDirection::new(0, fr[2] - fr[1]).unwrap();
        let path = trace_geodesic(m, start, dir, 3.0).unwrap();
        assert!(path.closed);
        assert_abs_diff_eq!(path.total_length, 2.0, epsilon = 1e-12);
        let (a, b) = cut_along_closed_geodesic(&s, &path).unwrap();
        for d in [&a, &b] {
            assert_abs_diff_eq!(d.curvature(), 2.0 * PI, epsilon = 1e-9);
            assert_eq!(d.singular_parent_vertices().len(), 2);
        }
    }

    #[test]
    fn open_path_is_rejected() {
        let s = shapes::regular_tetrahedron();
        let m = s.mesh();
        let start = SurfacePoint::new(m, 0, [0.4, 0.3, 0.3]).unwrap();
        let dir = TangentDirection::new(0, Vec2::new(1.0, 0.2)).unwrap();
        let path = trace_geodesic(m, start, dir, 0.3).unwrap();
        assert_eq!(
            cut_along_closed_geodesic(&s, &path).unwrap_err(),
            GeoError::NotClosed
        );
    }

    #[test]
    fn small_triangle_and_its_complement() {
        let s = shapes::unit_cube();
        let m = s.mesh();
        let x = SurfacePoint::new(m, 0, [0.6, 0.2, 0.2]).unwrap();
        let y = SurfacePoint::new(m, 0, [0.2, 0.6, 0.2]).unwrap();
        let z = SurfacePoint::new(m, 0, [0.2, 0.2, 0.6]).unwrap();
        let t = geodesic_triangle(&s, &x, &y, &z, None).unwrap();
        let area = crate::geom::triangle_area_2d(x.position(m), y.position(m), z.position(m)).abs();
        assert_abs_diff_eq!(t.region.area(), area, epsilon = 1e-14);
        assert_abs_diff_eq!(t.excess(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.curvature(), 0.0, epsilon = 1e-12);
        // The other side.
        let far = SurfacePoint::new(m, 5, [0.3, 0.3, 0.4]).unwrap();
        let c = enclosed_region(&s, &t.sides, Some(&far)).unwrap();
        assert_abs_diff_eq!(c.area(), 6.0 - area, epsilon = 1e-12);
        assert_abs_diff_eq!(c.curvature(), 4.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn triangle_around_a_cube_corner() {
        let s = shapes::unit_cube();
        let m = s.mesh();
        let near = |p: crate::Vec3| {
            (0..m.num_faces())
                .find_map(|f| {
                    let fv = m.face(f);
                    let w = |i: usize| m.vertex(fv[i]);
                    // solve for barycentrics by least squares on the face plane
                    let e1 = w(1) - w(0);
                    let e2 = w(2) - w(0);
                    let d = p - w(0);
                    let (a, b, c) = (e1.dot(e1), e1.dot(e2), e2.dot(e2));
                    let (r1, r2) = (d.dot(e1), d.dot(e2));
                    let det = a * c - b * b;
                    let u = (r1 * c - r2 * b) / det;
                    let v = (a * r2 - b * r1) / det;
                    let back = w(0) + e1 * u + e2 * v;
                    let ok = u >= -1e-12
                        && v >= -1e-12
                        && u + v <= 1.0 + 1e-12
                        && (back - p).norm() < 1e-12;
                    ok.then(|| SurfacePoint::new(m, f, [1.0 - u - v, u, v]).unwrap())
                })
                .unwrap()
        };
        use crate::Vec3;
        let x = near(Vec3::new(0.3, 0.2, 0.0));
        let y = near(Vec3::new(0.0, 0.3, 0.2));
        let z = near(Vec3::new(0.2, 0.0, 0.3));
        let t = geodesic_triangle(&s, &x, &y, &z, None).unwrap();
        assert_eq!(t.region.singular_parent_vertices(), vec![0]);
        assert_abs_diff_eq!(t.curvature(), PI / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.excess(), t.curvature(), epsilon = 1e-6);
    }

    #[test]
    fn coincident_corners_are_rejected() {
        let s = shapes::regular_tetrahedron();
        let m = s.mesh();
        let x = SurfacePoint::new(m, 0, [0.4, 0.3, 0.3]).unwrap();
        let z = SurfacePoint::new(m, 1, [0.4, 0.3, 0.3]).unwrap();
        assert!(geodesic_triangle(&s, &x, &x, &z, None).is_err());
    }
}
