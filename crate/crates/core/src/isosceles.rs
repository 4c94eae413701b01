//! Tetrahedra with equal opposite edges: construction, recognition, the
//! closed-geodesic spectrum read off the plane tiling, and recovery of the
//! face triangle from an abstract flat surface with four cone points.
//!
//! Unfolding such a tetrahedron tiles the plane by copies of one face. With
//! `u`, `v` the edge vectors of face 0 at its first corner, the tiling's
//! vertices form the lattice `Λ = Zu + Zv`; the surface is the plane modulo
//! the group generated by half-turns about lattice points, whose
//! translations are `2Λ`. A line avoiding `Λ` closes up after the shortest
//! translation along it, so primitive `(m, n)` give closed geodesics of
//! length `|2(mu + nv)|`.

use crate::development::{trace, GeodesicPath, SurfacePoint, TangentDirection};
use crate::error::{GeoError, Result};
use crate::geom::{Vec2, Vec3};
use crate::shapes::orient_outward;
use crate::shortest_path::{intrinsic_distance, DEFAULT_DEPTH};
use crate::surface::PolyhedralSurface;
use serde::Serialize;
use std::f64::consts::PI;

/// Face triangle and the box it is inscribed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoscelesSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// Right-angled face triangle: the tetrahedron flattens to a doubled
    /// rectangle.
    pub degenerate: bool,
}

impl IsoscelesSpec {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let (p2, q2, r2) = box_squares(a, b, c);
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(p2 > 0.0 && q2 > 0.0 && r2 > 0.0) {
            return Err(GeoError::NotAcute(a, b, c));
        }
        Ok(Self {
            a,
            b,
            c,
            p: p2.sqrt(),
            q: q2.sqrt(),
            r: r2.sqrt(),
            degenerate: false,
        })
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn vertices(&self) -> [Vec3; 4] {
        let (p, q, r) = (self.p, self.q, self.r);
        [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(p, q, 0.0),
            Vec3::new(p, 0.0, r),
            Vec3::new(0.0, q, r),
        ]
    }

    pub fn surface(&self) -> Result<PolyhedralSurface> {
        if self.degenerate {
            return Err(GeoError::Precondition(
                "degenerate spec has no tetrahedron".into(),
            ));
        }
        let v = self.vertices().to_vec();
        let mut f = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        orient_outward(&v, &mut f);
        PolyhedralSurface::new(v, f)
    }
}

fn box_squares(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    (
        (b2 + c2 - a2) / 2.0,
        (a2 + c2 - b2) / 2.0,
        (a2 + b2 - c2) / 2.0,
    )
}

/// Tetrahedron whose faces are all congruent to the acute triangle `(a,b,c)`.
pub fn build_isosceles(a: f64, b: f64, c: f64) -> Result<(IsoscelesSpec, PolyhedralSurface)> {
    let spec = IsoscelesSpec::new(a, b, c)?;
    let s = spec.surface()?;
    Ok((spec, s))
}

/// Whether the three pairs of opposite edges have equal lengths, with the
/// largest relative mismatch.
pub fn is_isosceles(pts: [Vec3; 4]) -> Result<(bool, f64)> {
    let vol = (pts[1] - pts[0])
        .cross(pts[2] - pts[0])
        .dot(pts[3] - pts[0]);
    let scale = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (*a - *b).norm()))
        .fold(0.0, f64::max);
    if vol.abs() <= 1e-12 * scale.powi(3) {
        return Err(GeoError::InvalidInput("tetrahedron is degenerate".into()));
    }
    let d = |i: usize, j: usize| (pts[i] - pts[j]).norm();
    let mismatch = [(d(0, 1), d(2, 3)), (d(0, 2), d(1, 3)), (d(0, 3), d(1, 2))]
        .iter()
        .map(|&(x, y)| (x - y).abs() / x.max(y))
        .fold(0.0, f64::max);
    Ok((mismatch <= 1e-9, mismatch))
}

/// Whether `s` is a tetrahedron with equal opposite edges.
pub fn is_isosceles_surface(s: &PolyhedralSurface) -> bool {
    let m = s.mesh();
    if m.num_vertices() != 4 {
        return false;
    }
    let pts = [0, 1, 2, 3].map(|v| m.vertex(v));
    matches!(is_isosceles(pts), Ok((true, _)))
}

/// Primitive direction `(m, n)` of the translation lattice plus the strip
/// fraction choosing one parallel line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeGeodesicIndex {
    pub m: i64,
    pub n: i64,
    pub offset: f64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl LatticeGeodesicIndex {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        Self::with_offset(m, n, 0.5)
    }

    pub fn with_offset(m: i64, n: i64, offset: f64) -> Result<Self> {
        if (m, n) == (0, 0) || gcd(m, n) != 1 {
            return Err(GeoError::Precondition(format!(
                "({m}, {n}) is not a primitive lattice vector"
            )));
        }
        if !(0.0..1.0).contains(&offset) || offset == 0.0 {
            return Err(GeoError::Precondition(format!(
                "offset {offset} must lie in (0, 1)"
            )));
        }
        Ok(Self { m, n, offset })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub m: i64,
    pub n: i64,
    pub length: f64,
}

fn face_basis(s: &PolyhedralSurface) -> (Vec2, Vec2) {
    let fr = s.mesh().frame(0);
    (fr[1] - fr[0], fr[2] - fr[0])
}

fn lattice_length(u: Vec2, v: Vec2, m: i64, n: i64) -> f64 {
    ((u * m as f64 + v * n as f64) * 2.0).norm()
}

fn spectrum_up_to(s: &PolyhedralSurface, bound: f64) -> Vec<SpectrumEntry> {
    let (u, v) = face_basis(s);
    // Smallest singular value of [u v] bounds |mu + nv| from below.
    let (g11, g12, g22) = (u.dot(u), u.dot(v), v.dot(v));
    let tr = g11 + g22;
    let det = g11 * g22 - g12 * g12;
    let smin = ((tr - (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0)
        .max(0.0)
        .sqrt();
    let k = (bound / (2.0 * smin)).ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in 0..=k {
        for n in -k..=k {
            if m == 0 && n <= 0 {
                continue;
            }
            if gcd(m, n) != 1 {
                continue;
            }
            let length = lattice_length(u, v, m, n);
            if length <= bound {
                out.push(SpectrumEntry { m, n, length });
            }
        }
    }
    out.sort_by(|x, y| {
        x.length
            .total_cmp(&y.length)
            .then(x.m.cmp(&y.m))
            .then(x.n.cmp(&y.n))
    });
    out
}

/// Every primitive class whose closed geodesics have length at most
/// `max_length`, sorted by (length, m, n).
pub fn enumerate_closed_geodesics(
    spec: &IsoscelesSpec,
    max_length: f64,
) -> Result<Vec<SpectrumEntry>> {
    if !(max_length > 0.0) {
        return Err(GeoError::InvalidInput("max_length must be positive".into()));
    }
    Ok(spectrum_up_to(&spec.surface()?, max_length))
}

/// The spectrum up to and including the first class of length at least
/// `target`, so the last entry always reaches the target.
pub fn enumerate_reaching(spec: &IsoscelesSpec, target: f64) -> Result<Vec<SpectrumEntry>> {
    if !(target > 0.0) {
        return Err(GeoError::InvalidInput(
            "target length must be positive".into(),
        ));
    }
    Ok(enumerate_reaching_on(&spec.surface()?, target))
}

/// [`enumerate_reaching`] on an already built isosceles surface, with the
/// lattice taken from its own face 0.
pub fn enumerate_reaching_on(s: &PolyhedralSurface, target: f64) -> Vec<SpectrumEntry> {
    let mut bound = target;
    loop {
        let all = spectrum_up_to(s, bound);
        if let Some(i) = all.iter().position(|e| e.length >= target) {
            return all[..=i].to_vec();
        }
        bound *= 1.5;
    }
}

/// Retry sequence for the strip fraction: 1/2, 1/4, 3/4, 1/8, 3/8, ...
fn offsets(first: f64) -> impl Iterator<Item = f64> {
    let mut seq = vec![first];
    let mut den = 4.0;
    while seq.len() < 9 {
        let mut k = 1.0;
        while k < den && seq.len() < 9 {
            let x = k / den;
            if !seq.iter().any(|&s| (s - x).abs() < 1e-15) {
                seq.push(x);
            }
            k += 2.0;
        }
        den *= 2.0;
    }
    seq.into_iter()
}

/// Traces the closed geodesic of class `index` on the tetrahedron of `spec`.
pub fn realize_lattice_geodesic(
    spec: &IsoscelesSpec,
    index: &LatticeGeodesicIndex,
) -> Result<GeodesicPath> {
    let s = spec.surface()?;
    realize_on(&s, index)
}

/// Like [`realize_lattice_geodesic`] on an already built isosceles
/// tetrahedron; the lattice is taken from its face 0.
pub fn realize_on(s: &PolyhedralSurface, index: &LatticeGeodesicIndex) -> Result<GeodesicPath> {
    let check = LatticeGeodesicIndex::with_offset(index.m, index.n, index.offset)?;
    let mesh = s.mesh();
    let (u, v) = face_basis(s);
    let (m, n) = (check.m, check.n);
    let lambda = u * m as f64 + v * n as f64;
    let expected = 2.0 * lambda.norm();
    let det = u.cross(v);
    // Level function of the line family; lattice points sit on integer levels.
    let level = |x: Vec2| lambda.cross(x) / det;
    let corners = [Vec2::new(0.0, 0.0), u, v];
    let lo = [0, -n, m].into_iter().min().unwrap() as f64;
    let mut last_err = GeoError::VertexHit { vertex: 0 };
    for off in offsets(check.offset) {
        let c = lo + off;
        // Chord of face 0 on the line `level = c`.
        let mut hits = Vec::new();
        for k in 0..3 {
            let (a, b) = (corners[k], corners[(k + 1) % 3]);
            let (la, lb) = (level(a), level(b));
            if (la - c) * (lb - c) < 0.0 {
                let t = (c - la) / (lb - la);
                hits.push(a.lerp(b, t));
            }
        }
        if hits.len() != 2 {
            continue;
        }
        let start_local = (hits[0] + hits[1]) * 0.5;
        let fr = mesh.frame(0);
        let start = SurfacePoint::from_frame(mesh, 0, fr[0] + start_local)?;
        let dir = TangentDirection::new(0, lambda)?;
        match trace(mesh, start, dir, expected * (1.0 + 1e-6) + 1e-9, true) {
            Ok(t) if t.path.closed => {
                let mut path = t.path;
                path.merge_closing_segments();
                if (path.total_length - expected).abs() > 1e-9 * expected {
                    last_err = GeoError::Precondition(format!(
                        "closed after {} instead of {expected}",
                        path.total_length
                    ));
                    continue;
                }
                if !path.is_simple(mesh, 1e-9) {
                    last_err = GeoError::SelfIntersecting;
                    continue;
                }
                return Ok(path);
            }
            Ok(_) => last_err = GeoError::NotClosed,
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// What the development of a flat four-cone-point surface looks like.
#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub spec: IsoscelesSpec,
    /// Angles of the developed triangle at the copies of the base point.
    pub wedges: [f64; 3],
    pub closure_error: f64,
    pub base_vertex: usize,
}

/// Recovers the face triangle of a surface with exactly four cone points of
/// angle π: cut along the shortest geodesics from the first cone point to
/// the other three and develop the resulting disc into the plane.
pub fn reconstruct_from_flat_surface(s: &PolyhedralSurface) -> Result<Reconstruction> {
    let mesh = s.mesh();
    let mut singular = Vec::new();
    for v in 0..mesh.num_vertices() {
        let d = mesh.vertex_defect(v);
        if d.abs() > 1e-6 {
            if (d - PI).abs() > 1e-6 {
                return Err(GeoError::Precondition(format!(
                    "vertex {v} has defect {d}, expected π"
                )));
            }
            singular.push(v);
        }
    }
    if singular.len() != 4 {
        return Err(GeoError::Precondition(format!(
            "expected 4 singular vertices, found {}",
            singular.len()
        )));
    }
    let p = singular[0];
    let sp = SurfacePoint::vertex(mesh, p)?;
    let mut arms = Vec::new();
    for &x in &singular[1..] {
        let sx = SurfacePoint::vertex(mesh, x)?;
        let (len, path) = intrinsic_distance(mesh, &sp, &sx, DEFAULT_DEPTH)?;
        let dir = path
            .start_direction(mesh)
            .ok_or(GeoError::DevelopmentFailed(f64::NAN))?;
        let (coord, _, _) = crate::development::cone_coordinate(mesh, &sp, &dir)?;
        arms.push((coord, len));
    }
    arms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = mesh.angle_sum(p);
    let wedges = [
        arms[1].0 - arms[0].0,
        arms[2].0 - arms[1].0,
        total - (arms[2].0 - arms[0].0),
    ];
    // Walk the boundary of the developed disc: each arm is traversed out and
    // back, straight through its far end because the cone angle there is π.
    let mut pos = Vec2::new(0.0, 0.0);
    let mut heading: f64 = 0.0;
    for i in 0..3 {
        pos = pos + Vec2::new(heading.cos(), heading.sin()) * (2.0 * arms[i].1);
        heading += PI - wedges[i];
    }
    let perimeter: f64 = arms.iter().map(|a| 2.0 * a.1).sum();
    let closure_error = pos.norm() / perimeter;
    if closure_error > 1e-6 || wedges.iter().any(|&w| w <= 1e-9 || w >= PI - 1e-9) {
        return Err(GeoError::DevelopmentFailed(closure_error));
    }
    let (a, b, c) = (arms[0].1, arms[1].1, arms[2].1);
    let widest = wedges.iter().copied().fold(0.0, f64::max);
    let spec = if (widest - PI / 2.0).abs() <= 1e-6 {
        let (p2, q2, r2) = box_squares(a, b, c);
        IsoscelesSpec {
            a,
            b,
            c,
            p: p2.max(0.0).sqrt(),
            q: q2.max(0.0).sqrt(),
            r: r2.max(0.0).sqrt(),
            degenerate: true,
        }
    } else {
        IsoscelesSpec::new(a, b, c)?
    };
    Ok(Reconstruction {
        spec,
        wedges,
        closure_error,
        base_vertex: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn regular_box() {
        let (spec, s) = build_isosceles(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(spec.p, 0.5f64.sqrt(), epsilon = 1e-15);
        for v in 0..4 {
            assert_abs_diff_eq!(s.mesh().vertex_defect(v), PI, epsilon = 1e-9);
        }
        assert!(matches!(
            build_isosceles(1.0, 1.0, 2.0),
            Err(GeoError::NotAcute(..))
        ));
    }

    #[test]
    fn opposite_edges_match() {
        let (spec, _) = build_isosceles(0.9, 1.0, 1.1).unwrap();
        let (ok, mis) = is_isosceles(spec.vertices()).unwrap();
        assert!(ok && mis < 1e-12);
        let v = spec.vertices();
        let mut lens = [
            (v[0] - v[1]).norm(),
            (v[0] - v[2]).norm(),
            (v[0] - v[3]).norm(),
        ];
        lens.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(lens[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(lens[2], 1.1, epsilon = 1e-12);
        let corner = shapes::corner_tetrahedron();
        let pts: Vec<Vec3> = corner.mesh().vertices().to_vec();
        let (ok, _) = is_isosceles([pts[0], pts[1], pts[2], pts[3]]).unwrap();
        assert!(!ok);
    }

    #[test]
    fn regular_spectrum() {
        let spec = IsoscelesSpec::new(1.0, 1.0, 1.0).unwrap();
        let sp = enumerate_closed_geodesics(&spec, 3.5).unwrap();
        assert_abs_diff_eq!(sp[0].length, 2.0, epsilon = 1e-12);
        assert!(sp
            .iter()
            .any(|e| (e.length - 2.0 * 3f64.sqrt()).abs() < 1e-12));
        assert!(enumerate_closed_geodesics(&spec, 1.9).unwrap().is_empty());
        let reach = enumerate_reaching(&spec, 10.0).unwrap();
        assert!(reach.last().unwrap().length >= 10.0);
    }

    #[test]
    fn realize_short_classes() {
        let spec = IsoscelesSpec::new(1.0, 1.0, 1.0).unwrap();
        let path =
            realize_lattice_geodesic(&spec, &LatticeGeodesicIndex::new(1, 0).unwrap()).unwrap();
        assert!(path.closed);
        assert_eq!(path.segments.len(), 4);
        assert_abs_diff_eq!(path.total_length, 2.0, epsilon = 1e-12);
        let path =
            realize_lattice_geodesic(&spec, &LatticeGeodesicIndex::new(1, 1).unwrap()).unwrap();
        assert_abs_diff_eq!(path.total_length, 2.0 * 3f64.sqrt(), epsilon = 1e-9);
        assert!(LatticeGeodesicIndex::new(2, 2).is_err());
    }

    #[test]
    fn round_trip_and_degenerate() {
        let (_, s) = build_isosceles(0.9, 1.0, 1.1).unwrap();
        let r = reconstruct_from_flat_surface(&s).unwrap();
        let mut got = r.spec.sides();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip([0.9, 1.0, 1.1]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-8);
        }
        let r = reconstruct_from_flat_surface(&shapes::doubled_rectangle(1.0, 1.0)).unwrap();
        assert!(r.spec.degenerate);
        assert!(reconstruct_from_flat_surface(&shapes::unit_cube()).is_err());
    }
}
