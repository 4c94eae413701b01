//! Closed convex polyhedral surfaces: OFF ingestion, validation and the
//! angle-defect curvature measure.

use crate::error::{GeoError, Result};
use crate::geom::{Vec2, Vec3};
use crate::mesh::TriMesh;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

/// Signed bend allowed across an edge before it counts as a reflex fold.
pub const DIHEDRAL_TOLERANCE: f64 = 1e-9;
/// Defects above this value mark a vertex as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;
pub const MIN_FACE_AREA: f64 = 1e-12;

/// A closed, oriented, triangulated surface. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PolyhedralSurface {
    mesh: TriMesh,
    degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub defects: Vec<f64>,
    pub total: f64,
    pub singular_vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Violation {
    NotClosed(String),
    NotConnected(usize),
    EulerCharacteristic(i64),
    SmallFace(usize),
    Reflex { edge: [usize; 2] },
}

impl PolyhedralSurface {
    /// Builds and validates; any violation is returned as an error.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = TriMesh::new(vertices, faces)?;
        let surface = Self {
            mesh,
            degenerate: false,
        };
        surface.ensure_valid()?;
        Ok(surface)
    }

    /// Builds without rejecting validation failures; used to report on
    /// broken inputs. Only structural errors (bad indices, non-manifold
    /// edges) fail.
    pub fn new_unchecked(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        Ok(Self {
            mesh: TriMesh::new(vertices, faces)?,
            degenerate: false,
        })
    }

    fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        match violations.first() {
            None => Ok(()),
            Some(Violation::Reflex { edge }) => Err(GeoError::Convexity(format!(
                "reflex dihedral angle at edge {}-{}",
                edge[0], edge[1]
            ))),
            Some(v) => Err(GeoError::Topology(format!("{v:?}"))),
        }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// True for the doubling of a flat convex polygon.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn num_vertices(&self) -> usize {
        self.mesh.num_vertices()
    }

    pub fn num_faces(&self) -> usize {
        self.mesh.num_faces()
    }

    pub fn num_edges(&self) -> usize {
        self.mesh.num_edges()
    }

    pub fn area(&self) -> f64 {
        self.mesh.total_area()
    }

    /// Lists every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let m = &self.mesh;
        let mut out = Vec::new();
        if !m.is_closed() {
            let open = (0..m.num_faces())
                .flat_map(|f| (0..3).map(move |k| (f, k)))
                .filter(|&(f, k)| m.is_boundary_edge(f, k))
                .count();
            out.push(Violation::NotClosed(format!("{open} boundary edges")));
        }
        let components = face_components(m);
        if components > 1 {
            out.push(Violation::NotConnected(components));
        }
        let used = {
            let mut u = vec![false; m.num_vertices()];
            for f in m.faces() {
                for &v in f {
                    u[v] = true;
                }
            }
            u.iter().filter(|&&b| b).count()
        };
        let chi = used as i64 - m.num_edges() as i64 + m.num_faces() as i64;
        if components == 1 && m.is_closed() && chi != 2 {
            out.push(Violation::EulerCharacteristic(chi));
        }
        for f in 0..m.num_faces() {
            if m.face_area(f) <= MIN_FACE_AREA {
                out.push(Violation::SmallFace(f));
            }
        }
        if !self.degenerate {
            for f in 0..m.num_faces() {
                for k in 0..3 {
                    let Some(across) = m.across(f, k) else {
                        continue;
                    };
                    if across.face < f {
                        continue;
                    }
                    if signed_bend(m, f, k) < -DIHEDRAL_TOLERANCE {
                        let fv = m.face(f);
                        out.push(Violation::Reflex {
                            edge: [fv[k], fv[(k + 1) % 3]],
                        });
                    }
                }
            }
        }
        out
    }

    pub fn vertex_defect(&self, v: usize) -> Result<f64> {
        if v >= self.num_vertices() {
            return Err(GeoError::InvalidIndex {
                index: v,
                limit: self.num_vertices(),
            });
        }
        Ok(TAU - self.mesh.angle_sum(v))
    }

    pub fn curvature_report(&self) -> CurvatureReport {
        let defects: Vec<f64> = (0..self.num_vertices())
            .map(|v| {
                if self.mesh.vertex_faces(v).is_empty() {
                    0.0
                } else {
                    TAU - self.mesh.angle_sum(v)
                }
            })
            .collect();
        let total = defects.iter().sum();
        let singular_vertices = defects
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > SINGULAR_THRESHOLD)
            .map(|(i, _)| i)
            .collect();
        CurvatureReport {
            defects,
            total,
            singular_vertices,
        }
    }

    pub fn singular_vertices(&self) -> Vec<usize> {
        self.curvature_report().singular_vertices
    }

    /// Doubles a convex counterclockwise polygon into a two-sided surface.
    ///
    /// The top copy is fanned from corner 0 and the bottom copy from corner 1,
    /// so no diagonal is shared between the two sides and every edge has
    /// exactly two incident faces.
    pub fn double_polygon(points: &[Vec2]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(GeoError::InvalidInput(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        for i in 0..n {
            let a = points[i];
            let b = points[(i + 1) % n];
            let c = points[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(GeoError::InvalidInput(format!(
                    "polygon is not strictly convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        // Convex turns everywhere with total turning 2π rules out self-intersection.
        let turning: f64 = (0..n)
            .map(|i| {
                let a = points[i];
                let b = points[(i + 1) % n];
                let c = points[(i + 2) % n];
                crate::geom::angle_between(b - a, c - b)
            })
            .sum();
        if (turning - TAU).abs() > 1e-9 {
            return Err(GeoError::InvalidInput(
                "polygon winds more than once".into(),
            ));
        }
        let vertices: Vec<Vec3> = points.iter().map(|p| Vec3::new(p.x, p.y, 0.0)).collect();
        let mut faces = Vec::with_capacity(2 * (n - 2));
        for k in 1..n - 1 {
            faces.push([0, k, k + 1]);
        }
        for k in 2..n {
            let a = k % n;
            let b = (k + 1) % n;
            faces.push([1, b, a]);
        }
        let surface = Self {
            mesh: TriMesh::new(vertices, faces)?,
            degenerate: true,
        };
        surface.ensure_valid()?;
        Ok(surface)
    }

    /// Serializes as OFF with full round-trip precision.
    pub fn to_off(&self) -> String {
        mesh_to_off(&self.mesh)
    }
}

pub fn mesh_to_off(m: &TriMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(
        s,
        "{} {} {}",
        m.num_vertices(),
        m.num_faces(),
        m.num_edges()
    );
    for v in m.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for f in m.faces() {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

/// Positive when the surface folds away from the outward normal of `f`
/// across its local edge `k` (convex), negative for a reflex fold.
fn signed_bend(m: &TriMesh, f: usize, k: usize) -> f64 {
    let Some(across) = m.across(f, k) else {
        return 0.0;
    };
    let fv = m.face(f);
    let gv = m.face(across.face);
    let p = |i: usize| m.vertex(i);
    let n1 = (p(fv[1]) - p(fv[0]))
        .cross(p(fv[2]) - p(fv[0]))
        .normalized();
    let n2 = (p(gv[1]) - p(gv[0]))
        .cross(p(gv[2]) - p(gv[0]))
        .normalized();
    let e = (p(fv[(k + 1) % 3]) - p(fv[k])).normalized();
    n1.cross(n2).dot(e).atan2(n1.dot(n2))
}

fn face_components(m: &TriMesh) -> usize {
    let nf = m.num_faces();
    let mut seen = vec![false; nf];
    let mut count = 0;
    for s in 0..nf {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(f) = stack.pop() {
            for k in 0..3 {
                if let Some(a) = m.across(f, k) {
                    if !seen[a.face] {
                        seen[a.face] = true;
                        stack.push(a.face);
                    }
                }
            }
        }
    }
    count
}

/// Parses OFF text without validating geometry. Polygons are fan
/// triangulated from their first vertex.
pub fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut tokens = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for tok in content.split_whitespace() {
            tokens.push((ln + 1, tok));
        }
    }
    let mut it = tokens.into_iter();
    let perr = |line: usize, msg: &str| GeoError::Parse {
        line,
        msg: msg.to_string(),
    };
    match it.next() {
        Some((_, "OFF")) => {}
        Some((l, t)) => return Err(perr(l, &format!("expected OFF header, found {t:?}"))),
        None => return Err(perr(0, "empty input")),
    }
    let mut next_usize = |what: &str| -> Result<(usize, usize)> {
        let (l, t) = it
            .next()
            .ok_or_else(|| perr(0, &format!("unexpected end of input reading {what}")))?;
        t.parse::<usize>()
            .map(|v| (l, v))
            .map_err(|_| perr(l, &format!("expected integer {what}, found {t:?}")))
    };
    let (_, nv) = next_usize("vertex count")?;
    let (_, nf) = next_usize("face count")?;
    let _ = next_usize("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut c = [0.0; 3];
        for slot in &mut c {
            let (l, t) = it
                .next()
                .ok_or_else(|| perr(0, "unexpected end of input in vertex list"))?;
            *slot = t
                .parse::<f64>()
                .map_err(|_| perr(l, &format!("bad coordinate {t:?}")))?;
        }
        vertices.push(Vec3::new(c[0], c[1], c[2]));
    }
    let mut faces = Vec::new();
    for _ in 0..nf {
        let (l, t) = it
            .next()
            .ok_or_else(|| perr(0, "unexpected end of input in face list"))?;
        let k: usize = t
            .parse()
            .map_err(|_| perr(l, &format!("bad face size {t:?}")))?;
        if k < 3 {
            return Err(perr(l, "face with fewer than 3 vertices"));
        }
        let mut idx = Vec::with_capacity(k);
        for _ in 0..k {
            let (l, t) = it
                .next()
                .ok_or_else(|| perr(0, "unexpected end of input in face list"))?;
            let i: usize = t
                .parse()
                .map_err(|_| perr(l, &format!("bad vertex index {t:?}")))?;
            if i >= nv {
                return Err(GeoError::Topology(format!(
                    "face on line {l} references vertex {i} of {nv}"
                )));
            }
            idx.push(i);
        }
        for j in 1..k - 1 {
            faces.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    Ok((vertices, faces))
}

/// Parses and validates OFF text into a closed convex surface.
pub fn load_off(text: &str) -> Result<PolyhedralSurface> {
    let (vertices, faces) = parse_off(text)?;
    PolyhedralSurface::new(vertices, faces)
}

/// Model angle sum check helper used by doubled polygons: the defect of a
/// doubled corner with interior angle `a` is `2π − 2a`.
pub fn doubled_corner_defect(interior_angle: f64) -> f64 {
    TAU - 2.0 * interior_angle
}

/// π, the curvature carried by each vertex of an isosceles tetrahedron.
pub const HALF_TURN: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn tetrahedron_counts_and_defects() {
        let s = load_off(&shapes::regular_tetrahedron().to_off()).unwrap();
        assert_eq!(s.num_faces(), 4);
        assert_eq!(s.num_edges(), 6);
        for v in 0..4 {
            assert!((s.vertex_defect(v).unwrap() - PI).abs() < 1e-12);
        }
        let r = s.curvature_report();
        assert!((r.total - 4.0 * PI).abs() < 1e-12);
        assert_eq!(r.singular_vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cube_quads_are_fan_triangulated() {
        let text = "OFF\n8 6 12\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n\
                    4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n";
        let s = load_off(text).unwrap();
        assert_eq!(s.num_faces(), 12);
        for v in 0..8 {
            assert!((s.vertex_defect(v).unwrap() - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedron_vertex_defect() {
        let s = shapes::regular_icosahedron();
        for v in 0..12 {
            assert!((s.vertex_defect(v).unwrap() - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_face_is_topology_error() {
        let text = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n";
        assert!(matches!(load_off(text), Err(GeoError::Topology(_))));
    }

    #[test]
    fn malformed_header_is_parse_error() {
        assert!(matches!(load_off("OFX\n"), Err(GeoError::Parse { .. })));
        assert!(matches!(
            load_off("OFF\n3 x 0\n"),
            Err(GeoError::Parse { .. })
        ));
    }

    #[test]
    fn comments_are_ignored() {
        let s = shapes::regular_tetrahedron();
        let mut text = String::from("# a comment\n");
        text.push_str(&s.to_off().replacen("OFF\n", "OFF # trailing\n", 1));
        assert!(load_off(&text).is_ok());
    }

    #[test]
    fn disjoint_tetrahedra_not_connected() {
        let t = shapes::regular_tetrahedron();
        let mut v = t.mesh().vertices().to_vec();
        let mut f = t.mesh().faces().to_vec();
        let off = Vec3::new(5.0, 0.0, 0.0);
        v.extend(t.mesh().vertices().iter().map(|p| *p + off));
        f.extend(
            t.mesh()
                .faces()
                .iter()
                .map(|x| [x[0] + 4, x[1] + 4, x[2] + 4]),
        );
        let s = PolyhedralSurface::new_unchecked(v, f).unwrap();
        assert!(s
            .validate()
            .iter()
            .any(|x| matches!(x, Violation::NotConnected(2))));
    }

    #[test]
    fn dented_octahedron_is_reflex() {
        let s = shapes::dented_octahedron();
        let violations = s.validate();
        assert!(violations
            .iter()
            .any(|x| matches!(x, Violation::Reflex { .. })));
        assert!(matches!(
            PolyhedralSurface::new(s.mesh().vertices().to_vec(), s.mesh().faces().to_vec()),
            Err(GeoError::Convexity(_))
        ));
    }

    #[test]
    fn doubled_polygons() {
        let sq = shapes::doubled_rectangle(1.0, 1.0);
        assert!(sq.is_degenerate());
        let r = sq.curvature_report();
        assert_eq!(r.singular_vertices.len(), 4);
        for &d in &r.defects {
            assert!((d - PI).abs() < 1e-12);
        }
        let rect = shapes::doubled_rectangle(1.0, 2.0);
        for &d in &rect.curvature_report().defects {
            assert!((d - PI).abs() < 1e-12);
        }
        let hex = shapes::doubled_regular_polygon(6, 1.0);
        let r = hex.curvature_report();
        assert_eq!(r.singular_vertices.len(), 6);
        for &d in &r.defects {
            assert!((d - doubled_corner_defect(2.0 * PI / 3.0)).abs() < 1e-12);
            assert!((d - 2.0 * PI / 3.0).abs() < 1e-12);
        }
        assert!((r.total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn double_polygon_rejects_nonconvex() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.2),
            Vec2::new(1.0, 2.0),
        ];
        assert!(PolyhedralSurface::double_polygon(&pts).is_err());
        let cw = [
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
        ];
        assert!(PolyhedralSurface::double_polygon(&cw).is_err());
    }

    #[test]
    fn off_round_trip_is_bit_exact() {
        let s = shapes::random_hull(50, 11);
        let back = load_off(&s.to_off()).unwrap();
        assert_eq!(s.mesh().vertices(), back.mesh().vertices());
        assert_eq!(s.mesh().faces(), back.mesh().faces());
    }
}
