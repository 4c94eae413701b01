//! Oriented triangle mesh with edge adjacency and per-face planar frames.
//!
//! The same structure backs closed surfaces and the discs obtained by
//! cutting them, so boundary edges (one incident face) are allowed here;
//! closedness is enforced one level up in [`crate::surface`].

use crate::error::{GeoError, Result};
use crate::geom::{PlanarIsometry, Vec2, Vec3};
use std::collections::HashMap;
use std::f64::consts::TAU;

/// Face and local edge index on the far side of a local edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Across {
    pub face: usize,
    pub edge: usize,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    neighbors: Vec<[Option<Across>; 3]>,
    face_edges: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    frames: Vec<[Vec2; 3]>,
    vertex_faces: Vec<Vec<(usize, usize)>>,
}

impl TriMesh {
    /// Builds adjacency. Fails on out-of-range indices, repeated vertices in a
    /// face, edges shared by more than two faces, or inconsistent winding.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeoError::InvalidInput(format!("vertex {i} is not finite")));
            }
        }
        let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= nv {
                    return Err(GeoError::Topology(format!(
                        "face {fi} references vertex {v} but only {nv} vertices exist"
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeoError::Topology(format!("face {fi} repeats a vertex")));
            }
            for k in 0..3 {
                let key = (f[k], f[(k + 1) % 3]);
                if directed.insert(key, (fi, k)).is_some() {
                    return Err(GeoError::Topology(format!(
                        "directed edge {}->{} used twice (non-manifold or inconsistent orientation)",
                        key.0, key.1
                    )));
                }
            }
        }

        let mut neighbors = vec![[None; 3]; faces.len()];
        let mut face_edges = vec![[usize::MAX; 3]; faces.len()];
        let mut edges = Vec::new();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if let Some(&(g, j)) = directed.get(&(b, a)) {
                    neighbors[fi][k] = Some(Across { face: g, edge: j });
                }
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
                face_edges[fi][k] = id;
            }
        }

        let mut vertex_faces = vec![Vec::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            for (k, &v) in f.iter().enumerate() {
                vertex_faces[v].push((fi, k));
            }
        }

        let frames = faces
            .iter()
            .map(|f| planar_frame(vertices[f[0]], vertices[f[1]], vertices[f[2]]))
            .collect();

        Ok(Self {
            vertices,
            faces,
            neighbors,
            face_edges,
            edges,
            frames,
            vertex_faces,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn across(&self, f: usize, local_edge: usize) -> Option<Across> {
        self.neighbors[f][local_edge]
    }

    /// Global edge id of a face's local edge `k` (from corner `k` to `k+1`).
    pub fn edge_id(&self, f: usize, local_edge: usize) -> usize {
        self.face_edges[f][local_edge]
    }

    /// Faces incident to `v` with the corner index of `v` in each.
    pub fn vertex_faces(&self, v: usize) -> &[(usize, usize)] {
        &self.vertex_faces[v]
    }

    pub fn is_closed(&self) -> bool {
        self.neighbors.iter().all(|n| n.iter().all(Option::is_some))
    }

    pub fn is_boundary_edge(&self, f: usize, local_edge: usize) -> bool {
        self.neighbors[f][local_edge].is_none()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_faces[v].iter().any(|&(f, k)| {
            self.neighbors[f][k].is_none() || self.neighbors[f][(k + 2) % 3].is_none()
        })
    }

    /// Planar image of the face: corner 0 at the origin, corner 1 on the
    /// positive x axis, corner 2 in the upper half plane.
    pub fn frame(&self, f: usize) -> &[Vec2; 3] {
        &self.frames[f]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.frames[f];
        0.5 * (b - a).cross(c - a)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn edge_length(&self, f: usize, local_edge: usize) -> f64 {
        let fr = &self.frames[f];
        (fr[(local_edge + 1) % 3] - fr[local_edge]).norm()
    }

    /// Interior angle of face `f` at corner `k`.
    pub fn corner_angle(&self, f: usize, k: usize) -> f64 {
        let fr = &self.frames[f];
        let p = fr[k];
        let u = fr[(k + 1) % 3] - p;
        let w = fr[(k + 2) % 3] - p;
        u.cross(w).atan2(u.dot(w))
    }

    pub fn angle_sum(&self, v: usize) -> f64 {
        self.vertex_faces[v]
            .iter()
            .map(|&(f, k)| self.corner_angle(f, k))
            .sum()
    }

    /// 2π minus the total angle for interior vertices; π minus the total
    /// angle (geodesic turning) for boundary vertices.
    pub fn vertex_defect(&self, v: usize) -> f64 {
        if self.is_boundary_vertex(v) {
            std::f64::consts::PI - self.angle_sum(v)
        } else {
            TAU - self.angle_sum(v)
        }
    }

    pub fn to_frame(&self, f: usize, bary: [f64; 3]) -> Vec2 {
        let fr = &self.frames[f];
        fr[0] * bary[0] + fr[1] * bary[1] + fr[2] * bary[2]
    }

    pub fn to_bary(&self, f: usize, p: Vec2) -> [f64; 3] {
        let [a, b, c] = self.frames[f];
        let area = (b - a).cross(c - a);
        let b0 = (b - p).cross(c - p) / area;
        let b1 = (c - p).cross(a - p) / area;
        [b0, b1, 1.0 - b0 - b1]
    }

    pub fn to_world(&self, f: usize, bary: [f64; 3]) -> Vec3 {
        let [i, j, k] = self.faces[f];
        self.vertices[i] * bary[0] + self.vertices[j] * bary[1] + self.vertices[k] * bary[2]
    }

    /// Isometry carrying coordinates in the frame of `f` to the frame of the
    /// face across local edge `k`, with that face laid flat on the far side.
    pub fn transfer(&self, f: usize, k: usize) -> Option<(Across, PlanarIsometry)> {
        let across = self.neighbors[f][k]?;
        let fr = &self.frames[f];
        let gr = &self.frames[across.face];
        let j = across.edge;
        let iso = PlanarIsometry::matching(fr[k], fr[(k + 1) % 3], gr[(j + 1) % 3], gr[j]);
        Some((across, iso))
    }

    /// Faces around `v` in counterclockwise order (seen from outside), each
    /// with the corner index of `v`. For boundary vertices the fan starts at
    /// the boundary.
    pub fn vertex_fan(&self, v: usize) -> Vec<(usize, usize)> {
        let incident = &self.vertex_faces[v];
        if incident.is_empty() {
            return Vec::new();
        }
        // A boundary fan starts at the face whose clockwise neighbor is missing.
        let start = incident
            .iter()
            .copied()
            .find(|&(f, k)| self.neighbors[f][k].is_none())
            .unwrap_or(incident[0]);
        let mut fan = vec![start];
        let (mut f, mut k) = start;
        loop {
            let Some(next) = self.neighbors[f][(k + 2) % 3] else {
                break;
            };
            if next.face == start.0 {
                break;
            }
            f = next.face;
            k = next.edge;
            fan.push((f, k));
            if fan.len() > incident.len() {
                break;
            }
        }
        fan
    }

    /// Distance-independent scale: the largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        (0..self.faces.len())
            .flat_map(|f| (0..3).map(move |k| (f, k)))
            .map(|(f, k)| self.edge_length(f, k))
            .fold(0.0, f64::max)
    }

    /// Diameter of the vertex set in the ambient space; a cheap upper scale
    /// for tolerances.
    pub fn extent(&self) -> f64 {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for v in &self.vertices {
            lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (hi - lo).norm()
    }
}

fn planar_frame(p0: Vec3, p1: Vec3, p2: Vec3) -> [Vec2; 3] {
    let e = p1 - p0;
    let len = e.norm();
    let ex = e / len;
    let w = p2 - p0;
    let x = w.dot(ex);
    let y = (w - ex * x).norm();
    [Vec2::new(0.0, 0.0), Vec2::new(len, 0.0), Vec2::new(x, y)]
}
