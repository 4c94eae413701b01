//! Surface points, tangent directions, planar unfolding and geodesic tracing.
//!
//! A geodesic on a polyhedral surface is a polyline that becomes a straight
//! segment once the faces it crosses are unfolded into one plane. Tracing
//! keeps one face frame at a time: positions on shared edges are carried
//! over as exact edge parameters and the direction is rotated by the frame
//! change, so nothing drifts along long paths.

use crate::error::{GeoError, Result};
use crate::geom::{
    ccw_angle, point_segment_distance, segment_segment_distance, PlanarIsometry, Vec2,
};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

/// A path may not come closer than this to a vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-9;
/// Barycentric coordinates below this are treated as zero.
pub const BARY_EPS: f64 = 1e-12;
/// Closure: direction mismatch allowed, in radians.
pub const CLOSURE_ANGLE_TOLERANCE: f64 = 1e-9;
/// Closure: position mismatch allowed, relative to the surface extent.
pub const CLOSURE_POSITION_TOLERANCE: f64 = 1e-9;

/// A point of the surface given by a face and barycentric coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub face: usize,
    pub bary: [f64; 3],
}

/// Where a point sits combinatorially.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Vertex(usize),
    /// Global edge id and parameter from `edges()[id][0]` to `edges()[id][1]`.
    Edge {
        edge: usize,
        t: f64,
    },
    Face {
        face: usize,
        bary: [f64; 3],
    },
}

impl SurfacePoint {
    /// Validates and canonicalizes: points on edges or vertices move to the
    /// lowest-index incident face.
    pub fn new(mesh: &TriMesh, face: usize, bary: [f64; 3]) -> Result<Self> {
        if face >= mesh.num_faces() {
            return Err(GeoError::InvalidIndex {
                index: face,
                limit: mesh.num_faces(),
            });
        }
        if bary.iter().any(|&b| !(b >= -BARY_EPS))
            || ((bary[0] + bary[1] + bary[2]) - 1.0).abs() > BARY_EPS
        {
            return Err(GeoError::InvalidInput(format!(
                "barycentric coordinates {bary:?} are not a convex combination"
            )));
        }
        let p = Self::raw(face, bary);
        Ok(Self::from_location(mesh, p.location(mesh)))
    }

    /// No validation or canonicalization.
    pub fn raw(face: usize, bary: [f64; 3]) -> Self {
        let mut b = bary.map(|x| if x.abs() < BARY_EPS { 0.0 } else { x });
        let s = b[0] + b[1] + b[2];
        for x in &mut b {
            *x /= s;
        }
        Self { face, bary: b }
    }

    pub fn vertex(mesh: &TriMesh, v: usize) -> Result<Self> {
        if v >= mesh.num_vertices() || mesh.vertex_faces(v).is_empty() {
            return Err(GeoError::InvalidIndex {
                index: v,
                limit: mesh.num_vertices(),
            });
        }
        Ok(Self::from_location(mesh, Location::Vertex(v)))
    }

    pub fn from_frame(mesh: &TriMesh, face: usize, p: Vec2) -> Result<Self> {
        Self::new(mesh, face, mesh.to_bary(face, p))
    }

    pub fn from_location(mesh: &TriMesh, loc: Location) -> Self {
        match loc {
            Location::Face { face, bary } => Self { face, bary },
            Location::Vertex(v) => {
                let &(f, k) = mesh
                    .vertex_faces(v)
                    .iter()
                    .min_by_key(|(f, _)| *f)
                    .expect("vertex has incident faces");
                let mut bary = [0.0; 3];
                bary[k] = 1.0;
                Self { face: f, bary }
            }
            Location::Edge { edge, t } => {
                let [a, b] = mesh.edges()[edge];
                let mut best: Option<Self> = None;
                for &(f, k) in mesh.vertex_faces(a) {
                    let fv = mesh.face(f);
                    let mut bary = [0.0; 3];
                    if fv[(k + 1) % 3] == b {
                        bary[k] = 1.0 - t;
                        bary[(k + 1) % 3] = t;
                    } else if fv[(k + 2) % 3] == b {
                        bary[k] = 1.0 - t;
                        bary[(k + 2) % 3] = t;
                    } else {
                        continue;
                    }
                    if best.is_none_or(|p| f < p.face) {
                        best = Some(Self { face: f, bary });
                    }
                }
                best.expect("edge has an incident face")
            }
        }
    }

    pub fn location(&self, mesh: &TriMesh) -> Location {
        let zero: Vec<usize> = (0..3).filter(|&i| self.bary[i].abs() < BARY_EPS).collect();
        let fv = mesh.face(self.face);
        match zero.len() {
            0 => Location::Face {
                face: self.face,
                bary: self.bary,
            },
            1 => {
                // Edge opposite corner `zero[0]`: local edge k = zero + 1.
                let k = (zero[0] + 1) % 3;
                let id = mesh.edge_id(self.face, k);
                let [a, _] = mesh.edges()[id];
                // weight of the far endpoint along a -> b
                let t = if fv[k] == a {
                    self.bary[(k + 1) % 3]
                } else {
                    self.bary[k]
                };
                Location::Edge { edge: id, t }
            }
            _ => {
                let i = (0..3)
                    .max_by(|&i, &j| self.bary[i].total_cmp(&self.bary[j]))
                    .unwrap();
                Location::Vertex(fv[i])
            }
        }
    }

    pub fn position(&self, mesh: &TriMesh) -> Vec2 {
        mesh.to_frame(self.face, self.bary)
    }

    pub fn world(&self, mesh: &TriMesh) -> crate::geom::Vec3 {
        mesh.to_world(self.face, self.bary)
    }

    /// Every face containing the point, with the point's coordinates in that
    /// face's frame.
    pub fn charts(&self, mesh: &TriMesh) -> Vec<(usize, Vec2)> {
        match self.location(mesh) {
            Location::Face { face, bary } => vec![(face, mesh.to_frame(face, bary))],
            Location::Vertex(v) => mesh
                .vertex_faces(v)
                .iter()
                .map(|&(f, k)| (f, mesh.frame(f)[k]))
                .collect(),
            Location::Edge { edge, t } => {
                let [a, b] = mesh.edges()[edge];
                let mut out = Vec::new();
                for &(f, k) in mesh.vertex_faces(a) {
                    let fv = mesh.face(f);
                    let fr = mesh.frame(f);
                    if fv[(k + 1) % 3] == b {
                        out.push((f, fr[k].lerp(fr[(k + 1) % 3], t)));
                    } else if fv[(k + 2) % 3] == b {
                        out.push((f, fr[k].lerp(fr[(k + 2) % 3], t)));
                    }
                }
                out.sort_by_key(|c| c.0);
                out
            }
        }
    }

    /// Coordinates of the point in the frame of `face`, if it lies there.
    pub fn in_face(&self, mesh: &TriMesh, face: usize) -> Option<Vec2> {
        if face == self.face {
            return Some(self.position(mesh));
        }
        self.charts(mesh)
            .into_iter()
            .find(|(f, _)| *f == face)
            .map(|(_, p)| p)
    }

    /// Intrinsic identity test. Doubled figures have coincident world
    /// positions on both sides, so this never compares 3D coordinates.
    pub fn same_point(&self, mesh: &TriMesh, other: &SurfacePoint, tol: f64) -> bool {
        other
            .charts(mesh)
            .into_iter()
            .any(|(f, q)| self.in_face(mesh, f).is_some_and(|p| (p - q).norm() <= tol))
    }
}

/// A unit direction expressed in a face frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentDirection {
    pub face: usize,
    pub dir: Vec2,
}

impl TangentDirection {
    pub fn new(face: usize, v: Vec2) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeoError::InvalidInput(
                "zero or non-finite direction".into(),
            ));
        }
        Ok(Self { face, dir: v / n })
    }

    pub fn from_angle(face: usize, angle: f64) -> Self {
        Self {
            face,
            dir: Vec2::new(angle.cos(), angle.sin()),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            face: self.face,
            dir: -self.dir,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub face: usize,
    pub entry: [f64; 3],
    pub exit: [f64; 3],
}

impl PathSegment {
    pub fn entry_point(&self) -> SurfacePoint {
        SurfacePoint {
            face: self.face,
            bary: self.entry,
        }
    }

    pub fn exit_point(&self) -> SurfacePoint {
        SurfacePoint {
            face: self.face,
            bary: self.exit,
        }
    }

    pub fn planar(&self, mesh: &TriMesh) -> (Vec2, Vec2) {
        (
            mesh.to_frame(self.face, self.entry),
            mesh.to_frame(self.face, self.exit),
        )
    }

    pub fn length(&self, mesh: &TriMesh) -> f64 {
        let (a, b) = self.planar(mesh);
        (b - a).norm()
    }
}

/// A polyline across faces that is straight in the unfolding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub segments: Vec<PathSegment>,
    pub total_length: f64,
    pub closed: bool,
}

impl GeodesicPath {
    pub fn empty() -> Self {
        Self {
            segments: Vec::new(),
            total_length: 0.0,
            closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start_point(&self) -> Option<SurfacePoint> {
        self.segments.first().map(PathSegment::entry_point)
    }

    pub fn end_point(&self) -> Option<SurfacePoint> {
        self.segments.last().map(PathSegment::exit_point)
    }

    pub fn start_direction(&self, mesh: &TriMesh) -> Option<TangentDirection> {
        let s = self.segments.iter().find(|s| s.length(mesh) > 0.0)?;
        let (a, b) = s.planar(mesh);
        TangentDirection::new(s.face, b - a).ok()
    }

    /// Forward direction at the end point.
    pub fn end_direction(&self, mesh: &TriMesh) -> Option<TangentDirection> {
        let s = self.segments.iter().rev().find(|s| s.length(mesh) > 0.0)?;
        let (a, b) = s.planar(mesh);
        TangentDirection::new(s.face, b - a).ok()
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| PathSegment {
                    face: s.face,
                    entry: s.exit,
                    exit: s.entry,
                })
                .collect(),
            total_length: self.total_length,
            closed: self.closed,
        }
    }

    /// For a closed path that starts inside a face, joins the last and the
    /// first segment so every segment spans its face from edge to edge.
    pub fn merge_closing_segments(&mut self) {
        let n = self.segments.len();
        if self.closed && n > 1 && self.segments[0].face == self.segments[n - 1].face {
            let last = self.segments.pop().unwrap();
            self.segments[0].entry = last.entry;
        }
    }

    /// Traces again from the start point and direction for the stored
    /// length, without closure detection, and returns how far the end lands
    /// from the start (infinite when they share no face).
    pub fn retrace_gap(&self, mesh: &TriMesh) -> Result<f64> {
        let (Some(start), Some(dir)) = (self.start_point(), self.start_direction(mesh)) else {
            return Err(GeoError::InvalidInput("empty path".into()));
        };
        let t = trace(mesh, start, dir, self.total_length, false)?;
        let end = t
            .path
            .end_point()
            .ok_or_else(|| GeoError::InvalidInput("empty retrace".into()))?;
        Ok(end
            .charts(mesh)
            .into_iter()
            .filter_map(|(f, q)| start.in_face(mesh, f).map(|p| (p - q).norm()))
            .fold(f64::INFINITY, f64::min))
    }

    /// Sum of the planar segment lengths.
    pub fn planar_length(&self, mesh: &TriMesh) -> f64 {
        self.segments.iter().map(|s| s.length(mesh)).sum()
    }

    /// Point and forward direction at arclength `s` from the start.
    pub fn point_at(&self, mesh: &TriMesh, s: f64) -> Option<(SurfacePoint, TangentDirection)> {
        let mut acc = 0.0;
        let mut last = None;
        for seg in &self.segments {
            let (a, b) = seg.planar(mesh);
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let dir = TangentDirection::new(seg.face, b - a).ok()?;
            if acc + len >= s {
                let t = ((s - acc) / len).clamp(0.0, 1.0);
                let p = SurfacePoint::raw(seg.face, mesh.to_bary(seg.face, a.lerp(b, t)));
                return Some((p, dir));
            }
            acc += len;
            last = Some((seg.exit_point(), dir));
        }
        last
    }

    /// Checks the structural invariants: shared joints, straightness after
    /// unfolding, and clearance from vertices away from the endpoints.
    pub fn check(&self, mesh: &TriMesh, tol: f64) -> std::result::Result<(), String> {
        let n = self.segments.len();
        for (i, seg) in self.segments.iter().enumerate() {
            let fr = mesh.frame(seg.face);
            let (a, b) = seg.planar(mesh);
            for (k, &corner) in fr.iter().enumerate() {
                let d = point_segment_distance(corner, a, b);
                let at_start = i == 0 && (a - corner).norm() <= tol;
                let at_end = i + 1 == n && (b - corner).norm() <= tol;
                if d <= tol && !at_start && !at_end {
                    return Err(format!(
                        "segment {i} passes within {d:e} of vertex {}",
                        mesh.face(seg.face)[k]
                    ));
                }
            }
            if i + 1 < n || self.closed {
                let next = &self.segments[(i + 1) % n];
                let p = seg.exit_point().world(mesh);
                let q = next.entry_point().world(mesh);
                if (p - q).norm() > tol {
                    return Err(format!(
                        "segments {i} and {} do not share a joint",
                        (i + 1) % n
                    ));
                }
                if let Some(res) = joint_residual(mesh, seg, next) {
                    if res > tol {
                        return Err(format!("joint {i} bends by {res:e}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when no two non-adjacent segments come within `tol` of each
    /// other inside a common face.
    pub fn is_simple(&self, mesh: &TriMesh, tol: f64) -> bool {
        let n = self.segments.len();
        let mut by_face: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, s) in self.segments.iter().enumerate() {
            by_face.entry(s.face).or_default().push(i);
        }
        let adjacent = |i: usize, j: usize| {
            let (i, j) = (i.min(j), i.max(j));
            j == i + 1 || (self.closed && i == 0 && j == n - 1)
        };
        for idx in by_face.values() {
            let planar: Vec<(Vec2, Vec2)> =
                idx.iter().map(|&i| self.segments[i].planar(mesh)).collect();
            for x in 0..idx.len() {
                for y in x + 1..idx.len() {
                    if adjacent(idx[x], idx[y]) {
                        continue;
                    }
                    let (a0, a1) = planar[x];
                    let (b0, b1) = planar[y];
                    if segment_segment_distance(a0, a1, b0, b1) <= tol {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Angle between the direction of `seg` carried into `next`'s frame and
/// the direction of `next`; `None` when the faces are not adjacent.
fn joint_residual(mesh: &TriMesh, seg: &PathSegment, next: &PathSegment) -> Option<f64> {
    let (a, b) = seg.planar(mesh);
    let (c, d) = next.planar(mesh);
    if (b - a).norm() == 0.0 || (d - c).norm() == 0.0 {
        return Some(0.0);
    }
    let rot = if seg.face == next.face {
        PlanarIsometry::IDENTITY
    } else {
        let k = (0..3).find(|&k| mesh.across(seg.face, k).map(|x| x.face) == Some(next.face))?;
        mesh.transfer(seg.face, k)?.1
    };
    let u = rot.rotate(b - a);
    Some(crate::geom::angle_between(u, d - c))
}

/// Planar embedding of one face.
pub fn face_frame(mesh: &TriMesh, face: usize) -> Result<[Vec2; 3]> {
    if face >= mesh.num_faces() {
        return Err(GeoError::InvalidIndex {
            index: face,
            limit: mesh.num_faces(),
        });
    }
    Ok(*mesh.frame(face))
}

/// Isometry placing `to` in the plane of `from`'s frame, glued along their
/// shared edge.
pub fn unfold_across_edge(mesh: &TriMesh, from: usize, to: usize) -> Result<PlanarIsometry> {
    for k in 0..3 {
        if let Some((across, iso)) = mesh.transfer(from, k) {
            if across.face == to {
                return Ok(iso.inverse());
            }
        }
    }
    Err(GeoError::Precondition(format!(
        "faces {from} and {to} are not adjacent"
    )))
}

/// Result of a trace, including the forward direction at the end.
#[derive(Debug, Clone)]
pub struct Trace {
    pub path: GeodesicPath,
    pub end_direction: TangentDirection,
}

/// Follows the geodesic from `start` in direction `dir` for `budget` length,
/// stopping early if it returns to `start` with the starting direction.
pub fn trace_geodesic(
    mesh: &TriMesh,
    start: SurfacePoint,
    dir: TangentDirection,
    budget: f64,
) -> Result<GeodesicPath> {
    trace(mesh, start, dir, budget, true).map(|t| t.path)
}

/// [`trace_geodesic`] with control over closure detection.
pub fn trace(
    mesh: &TriMesh,
    start: SurfacePoint,
    dir: TangentDirection,
    budget: f64,
    detect_closure: bool,
) -> Result<Trace> {
    if !(budget > 0.0) {
        return Err(GeoError::InvalidInput("budget must be positive".into()));
    }
    if dir.face >= mesh.num_faces() {
        return Err(GeoError::InvalidIndex {
            index: dir.face,
            limit: mesh.num_faces(),
        });
    }
    if let Location::Vertex(v) = start.location(mesh) {
        return Err(GeoError::VertexHit { vertex: v });
    }
    let start_pos = start.in_face(mesh, dir.face).ok_or_else(|| {
        GeoError::Precondition(format!("start point does not lie on face {}", dir.face))
    })?;
    let pos_tol = CLOSURE_POSITION_TOLERANCE * mesh.extent().max(1.0);

    let mut face = dir.face;
    let mut p = start_pos;
    let mut d = dir.dir.normalized();
    let mut entry: Option<usize> = None;
    let mut travelled = 0.0;
    let mut segments = Vec::new();
    let mut entry_bary = mesh.to_bary(face, p);
    let max_steps = 50_000_000usize;

    for _ in 0..max_steps {
        let fr = *mesh.frame(face);
        let fv = mesh.face(face);
        // Exit edge: first edge line the ray reaches.
        let mut best: Option<(usize, f64)> = None;
        for k in 0..3 {
            if Some(k) == entry {
                continue;
            }
            let e = fr[(k + 1) % 3] - fr[k];
            let inward = e.perp() / e.norm();
            let rate = d.dot(inward);
            if rate >= 0.0 {
                continue;
            }
            let h = (p - fr[k]).dot(inward).max(0.0);
            let s = h / -rate;
            if best.is_none_or(|(_, bs)| s < bs) {
                best = Some((k, s));
            }
        }
        let (k, s) = best.ok_or(GeoError::BoundaryHit { face })?;
        let remaining = budget - travelled;

        if detect_closure && face == dir.face && travelled > 0.0 {
            let w = start_pos - p;
            let along = w.dot(d);
            let off = w.cross(d).abs();
            let turn = crate::geom::angle_between(d, dir.dir);
            if turn <= CLOSURE_ANGLE_TOLERANCE
                && off <= pos_tol
                && along > -pos_tol
                && along <= s.min(remaining) + pos_tol
            {
                segments.push(PathSegment {
                    face,
                    entry: entry_bary,
                    exit: mesh.to_bary(face, start_pos),
                });
                let path = GeodesicPath {
                    segments,
                    total_length: travelled + along.max(0.0),
                    closed: true,
                };
                return Ok(Trace {
                    path,
                    end_direction: TangentDirection { face, dir: d },
                });
            }
        }

        if remaining <= s {
            let q = p + d * remaining;
            check_corner_clearance(mesh, face, p, q)?;
            segments.push(PathSegment {
                face,
                entry: entry_bary,
                exit: mesh.to_bary(face, q),
            });
            return Ok(Trace {
                path: GeodesicPath {
                    segments,
                    total_length: budget,
                    closed: false,
                },
                end_direction: TangentDirection { face, dir: d },
            });
        }

        let e0 = fr[k];
        let e1 = fr[(k + 1) % 3];
        let len = (e1 - e0).norm();
        let exit = p + d * s;
        let t = ((exit - e0).dot(e1 - e0) / (len * len)).clamp(0.0, 1.0);
        if t * len < VERTEX_TOLERANCE {
            return Err(GeoError::VertexHit { vertex: fv[k] });
        }
        if (1.0 - t) * len < VERTEX_TOLERANCE {
            return Err(GeoError::VertexHit {
                vertex: fv[(k + 1) % 3],
            });
        }
        check_corner_clearance(mesh, face, p, e0.lerp(e1, t))?;
        let mut exit_bary = [0.0; 3];
        exit_bary[k] = 1.0 - t;
        exit_bary[(k + 1) % 3] = t;
        if s > 0.0 || !segments.is_empty() {
            segments.push(PathSegment {
                face,
                entry: entry_bary,
                exit: exit_bary,
            });
        }
        travelled += s;

        let (across, iso) = mesh
            .transfer(face, k)
            .ok_or(GeoError::BoundaryHit { face })?;
        let g = across.face;
        let j = across.edge;
        let gr = mesh.frame(g);
        p = gr[j].lerp(gr[(j + 1) % 3], 1.0 - t);
        d = iso.rotate(d).normalized();
        let mut b = [0.0; 3];
        b[j] = t;
        b[(j + 1) % 3] = 1.0 - t;
        entry_bary = b;
        face = g;
        entry = Some(j);
    }
    Err(GeoError::InvalidInput("trace exceeded step limit".into()))
}

fn check_corner_clearance(mesh: &TriMesh, face: usize, a: Vec2, b: Vec2) -> Result<()> {
    let fr = mesh.frame(face);
    for k in 0..3 {
        if point_segment_distance(fr[k], a, b) < VERTEX_TOLERANCE {
            return Err(GeoError::VertexHit {
                vertex: mesh.face(face)[k],
            });
        }
    }
    Ok(())
}

/// Position of a direction in the tangent cone at `at`, as an angle
/// measured counterclockwise from a fixed reference, together with the
/// total cone angle and whether the cone is closed (interior point).
pub fn cone_coordinate(
    mesh: &TriMesh,
    at: &SurfacePoint,
    dir: &TangentDirection,
) -> Result<(f64, f64, bool)> {
    let not_here = || {
        GeoError::Precondition(format!(
            "direction on face {} is not based at the point",
            dir.face
        ))
    };
    match at.location(mesh) {
        Location::Face { face, .. } => {
            if face != dir.face {
                return Err(not_here());
            }
            Ok((dir.dir.angle().rem_euclid(TAU), TAU, true))
        }
        Location::Edge { edge, .. } => {
            let [a, b] = mesh.edges()[edge];
            // Measured from a -> b in the direction's own frame; the two
            // incident faces then cover [0, π] and [π, 2π].
            let fv = mesh.face(dir.face);
            let ia = fv.iter().position(|&v| v == a).ok_or_else(not_here)?;
            let ib = fv.iter().position(|&v| v == b).ok_or_else(not_here)?;
            let fr = mesh.frame(dir.face);
            let local = if (ia + 1) % 3 == ib { ia } else { ib };
            let boundary = mesh.is_boundary_edge(dir.face, local);
            let c = ccw_angle(fr[ib] - fr[ia], dir.dir);
            Ok((c, if boundary { PI } else { TAU }, !boundary))
        }
        Location::Vertex(v) => {
            let fan = mesh.vertex_fan(v);
            let mut acc = 0.0;
            let mut coord = None;
            for &(f, k) in &fan {
                if f == dir.face {
                    let fr = mesh.frame(f);
                    let mut a = ccw_angle(fr[(k + 1) % 3] - fr[k], dir.dir);
                    if a > 1.5 * PI {
                        a -= TAU;
                    }
                    coord = Some(acc + a);
                }
                acc += mesh.corner_angle(f, k);
            }
            let closed = !mesh.is_boundary_vertex(v);
            let c = coord.ok_or_else(not_here)?;
            Ok((if closed { c.rem_euclid(acc) } else { c }, acc, closed))
        }
    }
}

/// Angle of the hinge formed by two directions at one point: the smaller
/// sector of the tangent cone between them, capped at π.
pub fn hinge_angle(
    mesh: &TriMesh,
    at: &SurfacePoint,
    d1: &TangentDirection,
    d2: &TangentDirection,
) -> Result<f64> {
    let (c1, total, closed) = cone_coordinate(mesh, at, d1)?;
    let (c2, _, _) = cone_coordinate(mesh, at, d2)?;
    let diff = (c1 - c2).abs();
    let sector = if closed { diff.min(total - diff) } else { diff };
    Ok(sector.clamp(0.0, PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn face_frame_normalization() {
        let s = shapes::regular_tetrahedron();
        let fr = face_frame(s.mesh(), 0).unwrap();
        assert!((fr[0] - Vec2::new(0.0, 0.0)).norm() < 1e-15);
        assert!((fr[1] - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        assert!((fr[2] - Vec2::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);

        let m = crate::mesh::TriMesh::new(
            vec![
                crate::Vec3::new(0.0, 0.0, 0.0),
                crate::Vec3::new(1.0, 0.0, 0.0),
                crate::Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let fr = face_frame(&m, 0).unwrap();
        assert!((fr[2] - Vec2::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn canonicalizes_edge_points_to_lowest_face() {
        let s = shapes::unit_cube();
        let m = s.mesh();
        for f in 0..m.num_faces() {
            let p = SurfacePoint::new(m, f, [0.5, 0.5, 0.0]).unwrap();
            let charts = p.charts(m);
            assert_eq!(charts.len(), 2);
            assert_eq!(p.face, charts[0].0);
        }
        assert!(SurfacePoint::new(m, 0, [0.5, 0.6, 0.0]).is_err());
    }

    #[test]
    fn single_face_trace() {
        let s = shapes::regular_tetrahedron();
        let m = s.mesh();
        let p = SurfacePoint::new(m, 0, [0.4, 0.3, 0.3]).unwrap();
        let path = trace_geodesic(m, p, TangentDirection::from_angle(p.face, 0.3), 0.05).unwrap();
        assert_eq!(path.segments.len(), 1);
        assert!((path.total_length - 0.05).abs() < 1e-15);
        assert!((path.planar_length(m) - 0.05).abs() < 1e-14);
    }

    #[test]
    fn aiming_at_vertex_is_rejected() {
        let s = shapes::regular_tetrahedron();
        let m = s.mesh();
        let p = SurfacePoint::new(m, 0, [1.0 / 3.0; 3]).unwrap();
        let target = m.frame(p.face)[2];
        let d = TangentDirection::new(p.face, target - p.position(m)).unwrap();
        assert!(matches!(
            trace_geodesic(m, p, d, 3.0),
            Err(GeoError::VertexHit { .. })
        ));
    }

    #[test]
    fn hinge_angles() {
        let s = shapes::unit_cube();
        let m = s.mesh();
        let p = SurfacePoint::new(m, 0, [0.2, 0.3, 0.5]).unwrap();
        let a = TangentDirection::from_angle(p.face, 0.1);
        let b = TangentDirection::from_angle(p.face, 0.1 + PI / 2.0);
        assert!((hinge_angle(m, &p, &a, &b).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((hinge_angle(m, &p, &a, &a.reversed()).unwrap() - PI).abs() < 1e-12);

        // Cube corner: cone angle 3π/2; directions half the cone apart.
        let v = SurfacePoint::vertex(m, 0).unwrap();
        let fan = m.vertex_fan(0);
        assert_eq!(fan.len(), 3.max(fan.len()));
        let total: f64 = fan.iter().map(|&(f, k)| m.corner_angle(f, k)).sum();
        assert!((total - 1.5 * PI).abs() < 1e-12);
        // Start of the fan, and the direction at cone coordinate 3π/4.
        let (f0, k0) = fan[0];
        let fr0 = m.frame(f0);
        let d0 = TangentDirection::new(f0, fr0[(k0 + 1) % 3] - fr0[k0]).unwrap();
        let mut acc = 0.0;
        let mut d1 = None;
        for &(f, k) in &fan {
            let ang = m.corner_angle(f, k);
            if acc + ang >= 0.75 * PI - 1e-12 {
                let fr = m.frame(f);
                let base = fr[(k + 1) % 3] - fr[k];
                d1 = Some(TangentDirection::new(f, base.rotated(0.75 * PI - acc)).unwrap());
                break;
            }
            acc += ang;
        }
        let h = hinge_angle(m, &v, &d0, &d1.unwrap()).unwrap();
        assert!((h - 0.75 * PI).abs() < 1e-12, "{h}");
    }

    #[test]
    fn unfold_adjacent_cube_faces() {
        let s = shapes::unit_cube();
        let m = s.mesh();
        // Find two faces meeting at a right dihedral angle.
        for f in 0..m.num_faces() {
            for k in 0..3 {
                let g = m.across(f, k).unwrap().face;
                let iso = unfold_across_edge(m, f, g).unwrap();
                assert!((iso.determinant() - 1.0).abs() < 1e-12);
                // Shared edge stays fixed pointwise.
                let fv = m.face(f);
                let gv = m.face(g);
                for (i, &v) in gv.iter().enumerate() {
                    if let Some(j) = fv.iter().position(|&w| w == v) {
                        let p = iso.apply(m.frame(g)[i]);
                        assert!((p - m.frame(f)[j]).norm() < 1e-12);
                    }
                }
            }
        }
        assert!(unfold_across_edge(m, 0, 0).is_err());
    }
}
