//! Cutting a triangulated surface along polylines drawn on it.
//!
//! Every face crossed by the cut is split into planar pieces, the pieces are
//! re-triangulated by ear clipping, and the result is flood-filled across
//! edges that are not on the cut. Each connected component becomes its own
//! mesh with a record of where its faces and vertices came from.

use crate::development::{Location, PathSegment};
use crate::error::{GeoError, Result};
use crate::geom::{Vec2, Vec3};
use crate::mesh::TriMesh;
use std::collections::{HashMap, HashSet};

/// One component of a cut surface.
#[derive(Debug, Clone)]
pub struct Piece {
    pub mesh: TriMesh,
    /// Parent face of each face.
    pub parent_faces: Vec<usize>,
    /// Position of each vertex on the parent.
    pub origins: Vec<Location>,
    /// Closed boundary loops as vertex index cycles.
    pub boundary: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    world: Vec3,
    origin: Location,
}

/// Global registry of cut points, deduplicated by position.
struct Registry<'a> {
    mesh: &'a TriMesh,
    tol: f64,
    nodes: Vec<Node>,
    on_edge: HashMap<usize, Vec<(f64, usize)>>,
    in_face: HashMap<usize, Vec<(Vec2, usize)>>,
}

impl<'a> Registry<'a> {
    fn new(mesh: &'a TriMesh) -> Self {
        let nodes = (0..mesh.num_vertices())
            .map(|v| Node {
                world: mesh.vertex(v),
                origin: Location::Vertex(v),
            })
            .collect();
        Self {
            mesh,
            tol: 1e-9 * mesh.extent().max(1.0),
            nodes,
            on_edge: HashMap::new(),
            in_face: HashMap::new(),
        }
    }

    /// Snaps a point of `face` to a vertex, an edge, or the face interior
    /// and returns its node id.
    fn register(&mut self, face: usize, bary: [f64; 3]) -> usize {
        let m = self.mesh;
        let fr = m.frame(face);
        let fv = m.face(face);
        let area2 = 2.0 * m.face_area(face);
        // Distance to the side opposite each corner.
        let mut near = [false; 3];
        for i in 0..3 {
            let side = (fr[(i + 2) % 3] - fr[(i + 1) % 3]).norm();
            near[i] = bary[i] * area2 / side < self.tol;
        }
        let count = near.iter().filter(|&&n| n).count();
        if count >= 2 {
            let i = (0..3).find(|&i| !near[i]).unwrap_or(0);
            let i = if count == 3 {
                (0..3).max_by(|&a, &b| bary[a].total_cmp(&bary[b])).unwrap()
            } else {
                i
            };
            return fv[i];
        }
        if count == 1 {
            let i = (0..3).find(|&i| near[i]).unwrap();
            let k = (i + 1) % 3;
            let s = bary[k] + bary[(k + 1) % 3];
            let u = bary[(k + 1) % 3] / s;
            let len = m.edge_length(face, k);
            if u * len < self.tol {
                return fv[k];
            }
            if (1.0 - u) * len < self.tol {
                return fv[(k + 1) % 3];
            }
            let e = m.edge_id(face, k);
            let [a, _] = m.edges()[e];
            let t = if fv[k] == a { u } else { 1.0 - u };
            let list = self.on_edge.entry(e).or_default();
            if let Some(&(_, id)) = list.iter().find(|(t0, _)| (t0 - t).abs() * len < self.tol) {
                return id;
            }
            let id = self.nodes.len();
            list.push((t, id));
            let mut b = [0.0; 3];
            b[k] = 1.0 - u;
            b[(k + 1) % 3] = u;
            self.nodes.push(Node {
                world: m.to_world(face, b),
                origin: Location::Edge { edge: e, t },
            });
            return id;
        }
        let p = m.to_frame(face, bary);
        let list = self.in_face.entry(face).or_default();
        if let Some(&(_, id)) = list.iter().find(|(q, _)| (*q - p).norm() < self.tol) {
            return id;
        }
        let id = self.nodes.len();
        list.push((p, id));
        self.nodes.push(Node {
            world: m.to_world(face, bary),
            origin: Location::Face { face, bary },
        });
        id
    }
}

/// Local planar picture of one face with its cut chords.
struct FacePlan {
    ids: Vec<usize>,
    pos: Vec<Vec2>,
    /// Boundary cycle of the triangle, counterclockwise, as local indices.
    ring: Vec<usize>,
    /// Ring position where each side starts (corner k at `side_start[k]`).
    side_start: [usize; 3],
    edges: HashSet<(usize, usize)>,
}

impl FacePlan {
    fn local(&mut self, id: usize, p: Vec2) -> usize {
        if let Some(i) = self.ids.iter().position(|&x| x == id) {
            return i;
        }
        self.ids.push(id);
        self.pos.push(p);
        self.ids.len() - 1
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.edges.insert((a.min(b), a.max(b)));
        }
    }

    /// Sides of the triangle a ring node lies on.
    fn sides_of(&self, ring_pos: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 0..3 {
            let s = self.side_start[k];
            let e = if k == 2 {
                self.ring.len()
            } else {
                self.side_start[k + 1]
            };
            if ring_pos >= s && ring_pos <= e {
                out.push(k);
            }
        }
        if ring_pos == 0 {
            out.push(2);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn segments_cross(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2, eps: f64) -> bool {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    let s = |x: f64| {
        if x > eps {
            1
        } else if x < -eps {
            -1
        } else {
            0
        }
    };
    let (s1, s2, s3, s4) = (s(d1), s(d2), s(d3), s(d4));
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    // Touching or collinear overlap also blocks a bridge.
    let on = |p: Vec2, q0: Vec2, q1: Vec2| {
        crate::geom::point_segment_distance(p, q0, q1) <= eps.sqrt() * 1e-3
    };
    (s1 == 0 && on(b0, a0, a1))
        || (s2 == 0 && on(b1, a0, a1))
        || (s3 == 0 && on(a0, b0, b1))
        || (s4 == 0 && on(a1, b0, b1))
}

fn signed_area(pos: &[Vec2], cyc: &[usize]) -> f64 {
    let mut s = 0.0;
    for i in 0..cyc.len() {
        s += pos[cyc[i]].cross(pos[cyc[(i + 1) % cyc.len()]]);
    }
    s / 2.0
}

/// Ear clipping of a simple counterclockwise polygon. Collinear vertices
/// are allowed; they are never used as ear tips.
pub fn ear_clip(pos: &[Vec2], poly: &[usize]) -> Result<Vec<[usize; 3]>> {
    let mut v: Vec<usize> = poly.to_vec();
    let mut out = Vec::new();
    let scale = poly.iter().map(|&i| pos[i].norm()).fold(1.0f64, f64::max);
    let eps = 1e-14 * scale * scale;
    while v.len() > 3 {
        let n = v.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let (pa, pb, pc) = (pos[a], pos[b], pos[c]);
            if (pb - pa).cross(pc - pb) <= eps {
                continue;
            }
            let blocked = v.iter().any(|&w| {
                if w == a || w == b || w == c {
                    return false;
                }
                let p = pos[w];
                (pb - pa).cross(p - pa) >= -eps
                    && (pc - pb).cross(p - pb) >= -eps
                    && (pa - pc).cross(p - pc) >= -eps
            });
            if blocked {
                continue;
            }
            out.push([a, b, c]);
            v.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // Only collinear remainder left.
            if signed_area(pos, &v).abs() <= eps * v.len() as f64 {
                return Ok(out);
            }
            return Err(GeoError::Cut("ear clipping found no ear".into()));
        }
    }
    if v.len() == 3 && signed_area(pos, &v) > eps {
        out.push([v[0], v[1], v[2]]);
    }
    Ok(out)
}

/// Cuts `mesh` along the given segments and returns the connected
/// components. Segments must not cross each other except at endpoints.
pub fn split_along(mesh: &TriMesh, segments: &[PathSegment]) -> Result<Vec<Piece>> {
    let mut reg = Registry::new(mesh);
    // chords per face as node id pairs
    let mut chords: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for s in segments {
        if s.face >= mesh.num_faces() {
            return Err(GeoError::InvalidIndex {
                index: s.face,
                limit: mesh.num_faces(),
            });
        }
        let a = reg.register(s.face, s.entry);
        let b = reg.register(s.face, s.exit);
        if a != b {
            chords.entry(s.face).or_default().push((a, b));
        }
    }
    let mut cut: HashSet<(usize, usize)> = HashSet::new();
    let mut triangles: Vec<([usize; 3], usize)> = Vec::new();
    let tol = reg.tol;

    for f in 0..mesh.num_faces() {
        let fv = mesh.face(f);
        let fr = *mesh.frame(f);
        let Some(list) = chords.get(&f) else {
            triangles.push((fv, f));
            continue;
        };
        let mut plan = FacePlan {
            ids: Vec::new(),
            pos: Vec::new(),
            ring: Vec::new(),
            side_start: [0; 3],
            edges: HashSet::new(),
        };
        for k in 0..3 {
            plan.side_start[k] = plan.ring.len();
            let c = plan.local(fv[k], fr[k]);
            plan.ring.push(c);
            let e = mesh.edge_id(f, k);
            let [ea, _] = mesh.edges()[e];
            let mut pts: Vec<(f64, usize)> = reg
                .on_edge
                .get(&e)
                .map(|l| {
                    l.iter()
                        .map(|&(t, id)| (if fv[k] == ea { t } else { 1.0 - t }, id))
                        .collect()
                })
                .unwrap_or_default();
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            for (u, id) in pts {
                let p = fr[k].lerp(fr[(k + 1) % 3], u);
                let l = plan.local(id, p);
                plan.ring.push(l);
            }
        }
        let ring = plan.ring.clone();
        for i in 0..ring.len() {
            plan.add_edge(ring[i], ring[(i + 1) % ring.len()]);
        }
        for &(a, b) in list {
            let pa = position_in(&reg, mesh, f, a);
            let pb = position_in(&reg, mesh, f, b);
            let la = plan.local(a, pa);
            let lb = plan.local(b, pb);
            let ra = ring.iter().position(|&x| x == la);
            let rb = ring.iter().position(|&x| x == lb);
            if let (Some(ra), Some(rb)) = (ra, rb) {
                let sa = plan.sides_of(ra);
                let sb = plan.sides_of(rb);
                if let Some(&side) = sa.iter().find(|s| sb.contains(s)) {
                    // Chord along a side of the triangle: cut the sub-edges.
                    let n = ring.len();
                    let start = plan.side_start[side];
                    let end = if side == 2 {
                        n
                    } else {
                        plan.side_start[side + 1]
                    };
                    let (lo, hi) = {
                        let pa = if ra == 0 && side == 2 { n } else { ra };
                        let pb = if rb == 0 && side == 2 { n } else { rb };
                        (pa.min(pb), pa.max(pb))
                    };
                    debug_assert!(lo >= start && hi <= end);
                    for i in lo..hi {
                        let x = plan.ids[ring[i % n]];
                        let y = plan.ids[ring[(i + 1) % n]];
                        cut.insert((x.min(y), x.max(y)));
                    }
                    continue;
                }
            }
            plan.add_edge(la, lb);
            cut.insert((a.min(b), a.max(b)));
        }
        bridge_holes(&mut plan, tol)?;
        for cyc in face_cycles(&plan) {
            if signed_area(&plan.pos, &cyc) <= 0.0 {
                continue;
            }
            for t in ear_clip(&plan.pos, &cyc)? {
                triangles.push(([plan.ids[t[0]], plan.ids[t[1]], plan.ids[t[2]]], f));
            }
        }
    }
    components(mesh, &reg, &triangles, &cut)
}

fn position_in(reg: &Registry, mesh: &TriMesh, face: usize, id: usize) -> Vec2 {
    let fv = mesh.face(face);
    let fr = mesh.frame(face);
    match reg.nodes[id].origin {
        Location::Vertex(v) => fr[fv.iter().position(|&x| x == v).expect("vertex of face")],
        Location::Face { bary, .. } => mesh.to_frame(face, bary),
        Location::Edge { edge, t } => {
            let k = (0..3)
                .find(|&k| mesh.edge_id(face, k) == edge)
                .expect("edge of face");
            let [a, _] = mesh.edges()[edge];
            let u = if fv[k] == a { t } else { 1.0 - t };
            fr[k].lerp(fr[(k + 1) % 3], u)
        }
    }
}

/// Connects chord components that float inside the face to the triangle
/// boundary with two non-crossing bridges, so every face of the planar
/// graph is a simple polygon.
fn bridge_holes(plan: &mut FacePlan, tol: f64) -> Result<()> {
    let n = plan.ids.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for &(a, b) in &plan.edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    let outer = find(&mut comp, plan.ring[0]);
    let mut floating: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut comp, i);
        if r != outer {
            floating.entry(r).or_default().push(i);
        }
    }
    let eps = tol * tol;
    for (_, nodes) in floating {
        let mut used_h = Vec::new();
        let mut used_t = Vec::new();
        for _ in 0..2 {
            let mut options: Vec<(f64, usize, usize)> = Vec::new();
            for &h in &nodes {
                if used_h.contains(&h) {
                    continue;
                }
                for &t in &plan.ring {
                    if used_t.contains(&t) {
                        continue;
                    }
                    options.push(((plan.pos[h] - plan.pos[t]).norm(), h, t));
                }
            }
            options.sort_by(|a, b| a.0.total_cmp(&b.0));
            let found = options.into_iter().find(|&(_, h, t)| {
                let (ph, pt) = (plan.pos[h], plan.pos[t]);
                plan.edges.iter().all(|&(a, b)| {
                    if a == h || b == h || a == t || b == t {
                        // sharing an endpoint: reject only collinear overlap
                        let (o0, o1) = if a == h || a == t {
                            (plan.pos[a], plan.pos[b])
                        } else {
                            (plan.pos[b], plan.pos[a])
                        };
                        let d = (o1 - o0).normalized();
                        let e = if o0 == ph {
                            (pt - ph).normalized()
                        } else {
                            (ph - pt).normalized()
                        };
                        return d.dot(e) < 1.0 - 1e-12;
                    }
                    !segments_cross(ph, pt, plan.pos[a], plan.pos[b], eps)
                }) && (0..plan.ids.len()).all(|w| {
                    w == h
                        || w == t
                        || crate::geom::point_segment_distance(plan.pos[w], ph, pt) > tol
                })
            });
            let Some((_, h, t)) = found else {
                return Err(GeoError::Cut("cannot connect a loop inside a face".into()));
            };
            plan.add_edge(h, t);
            used_h.push(h);
            used_t.push(t);
        }
    }
    Ok(())
}

/// Faces of the planar graph, each traced with the face on its left.
fn face_cycles(plan: &FacePlan) -> Vec<Vec<usize>> {
    let n = plan.ids.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &plan.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for (v, list) in adj.iter_mut().enumerate() {
        let p = plan.pos[v];
        list.sort_by(|&x, &y| {
            (plan.pos[x] - p)
                .angle()
                .total_cmp(&(plan.pos[y] - p).angle())
        });
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for u in 0..n {
        for &v in &adj[u] {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                cyc.push(a);
                let list = &adj[b];
                let i = list.iter().position(|&x| x == a).unwrap();
                let w = list[(i + list.len() - 1) % list.len()];
                a = b;
                b = w;
            }
            out.push(cyc);
        }
    }
    out
}

fn components(
    mesh: &TriMesh,
    reg: &Registry,
    triangles: &[([usize; 3], usize)],
    cut: &HashSet<(usize, usize)>,
) -> Result<Vec<Piece>> {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, (t, _)) in triangles.iter().enumerate() {
        for k in 0..3 {
            by_edge
                .entry(key(t[k], t[(k + 1) % 3]))
                .or_default()
                .push(i);
        }
    }
    let mut label = vec![usize::MAX; triangles.len()];
    let mut count = 0;
    for s in 0..triangles.len() {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = count;
        while let Some(i) = stack.pop() {
            let t = triangles[i].0;
            for k in 0..3 {
                let e = key(t[k], t[(k + 1) % 3]);
                if cut.contains(&e) {
                    continue;
                }
                for &j in &by_edge[&e] {
                    if label[j] == usize::MAX {
                        label[j] = count;
                        stack.push(j);
                    }
                }
            }
        }
        count += 1;
    }
    let _ = mesh;
    let mut pieces = Vec::with_capacity(count);
    for c in 0..count {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut verts = Vec::new();
        let mut origins = Vec::new();
        let mut faces = Vec::new();
        let mut parents = Vec::new();
        for (i, (t, f)) in triangles.iter().enumerate() {
            if label[i] != c {
                continue;
            }
            let mut nt = [0; 3];
            for k in 0..3 {
                nt[k] = *remap.entry(t[k]).or_insert_with(|| {
                    verts.push(reg.nodes[t[k]].world);
                    origins.push(reg.nodes[t[k]].origin);
                    verts.len() - 1
                });
            }
            faces.push(nt);
            parents.push(*f);
        }
        let m = TriMesh::new(verts, faces).map_err(|e| GeoError::Cut(format!("piece {c}: {e}")))?;
        let boundary = boundary_loops(&m)?;
        pieces.push(Piece {
            mesh: m,
            parent_faces: parents,
            origins,
            boundary,
        });
    }
    Ok(pieces)
}

/// Boundary edges chained into loops, following the faces' orientation.
pub fn boundary_loops(m: &TriMesh) -> Result<Vec<Vec<usize>>> {
    let mut next: HashMap<usize, usize> = HashMap::new();
    for f in 0..m.num_faces() {
        let fv = m.face(f);
        for k in 0..3 {
            if m.is_boundary_edge(f, k) && next.insert(fv[k], fv[(k + 1) % 3]).is_some() {
                return Err(GeoError::Cut("boundary pinches at a vertex".into()));
            }
        }
    }
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut done: HashSet<usize> = HashSet::new();
    let mut loops = Vec::new();
    for s in starts {
        if done.contains(&s) {
            continue;
        }
        let mut cyc = vec![s];
        done.insert(s);
        let mut v = next[&s];
        while v != s {
            if !done.insert(v) {
                return Err(GeoError::Cut("boundary is not a union of loops".into()));
            }
            cyc.push(v);
            v = *next
                .get(&v)
                .ok_or_else(|| GeoError::Cut("open boundary chain".into()))?;
        }
        loops.push(cyc);
    }
    Ok(loops)
}
