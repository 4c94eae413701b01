//! Intrinsic distances by best-first search over unfolded edge sequences.
//!
//! Every search state is a face reached through a chain of edges together
//! with the source's image in that face's frame and a window: the part of
//! the entry edge still visible from the source through all previous edges.
//! The planar distance from the source image to the window is a lower bound
//! on any path continuing through it, so the first target settled with a
//! length below every queued bound is optimal.
//!
//! Windows are closed intervals. A window may shrink to a single vertex;
//! such states describe genuine curves through that vertex and are kept,
//! which lets paths run along a straight boundary of a cut disc.

use crate::development::{GeodesicPath, PathSegment, SurfacePoint, TangentDirection};
use crate::error::{GeoError, Result};
use crate::geom::{PlanarIsometry, Vec2, Vec3};
use crate::mesh::TriMesh;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

pub const DEFAULT_DEPTH: usize = 32;
const WINDOW_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Candidate {
    face: usize,
    /// Local edge of `face` we entered through.
    entry: Option<usize>,
    /// Local edge of the parent's face we left through.
    exit_from_parent: usize,
    edge_id: usize,
    src: Vec2,
    wa: Vec2,
    wb: Vec2,
    depth: usize,
    parent: Option<usize>,
    /// Maps this face's frame to the root chart's frame.
    to_root: PlanarIsometry,
    root_face: usize,
}

#[derive(Clone, Copy)]
struct Queued(f64, usize);

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 && self.1 == o.1
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        // Min-heap on the bound; ties broken by insertion order.
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// One realized candidate path to a target.
#[derive(Debug, Clone, Copy)]
struct Hit {
    length: f64,
    cand: Option<usize>,
    root_face: usize,
    src: Vec2,
    target_face: usize,
    target: Vec2,
    /// Initial direction in the root face frame.
    initial: Vec2,
}

/// Outcome of a single-pair query.
#[derive(Debug, Clone)]
pub struct Distance {
    pub length: f64,
    pub path: GeodesicPath,
    /// Length of the best path leaving the source in a visibly different
    /// direction, if one was found within the tie window.
    pub runner_up: Option<f64>,
}

struct Search<'a> {
    mesh: &'a TriMesh,
    arena: Vec<Candidate>,
    heap: BinaryHeap<Queued>,
    depth_limit: usize,
    truncated_lb: f64,
    tiny: f64,
    flat: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(mesh: &'a TriMesh, source: SurfacePoint, depth_limit: usize) -> Self {
        let mut s = Self {
            mesh,
            arena: Vec::new(),
            heap: BinaryHeap::new(),
            depth_limit,
            truncated_lb: f64::INFINITY,
            tiny: 1e-12 * mesh.extent().max(1.0),
            flat: (0..mesh.num_vertices())
                .map(|v| mesh.vertex_defect(v).abs() < 1e-9)
                .collect(),
        };
        for (f, p) in source.charts(mesh) {
            s.arena.push(Candidate {
                face: f,
                entry: None,
                exit_from_parent: usize::MAX,
                edge_id: usize::MAX,
                src: p,
                wa: p,
                wb: p,
                depth: 0,
                parent: None,
                to_root: PlanarIsometry::IDENTITY,
                root_face: f,
            });
            s.heap.push(Queued(0.0, s.arena.len() - 1));
        }
        s
    }

    fn uses_edge(&self, mut idx: usize, edge_id: usize) -> bool {
        loop {
            let c = &self.arena[idx];
            if c.edge_id == edge_id {
                return true;
            }
            match c.parent {
                Some(p) => idx = p,
                None => return false,
            }
        }
    }

    /// Straight path from the candidate's source image to `t`, if visible.
    fn reach(&self, idx: usize, t: Vec2) -> Option<f64> {
        let c = &self.arena[idx];
        if c.entry.is_none() {
            return Some((t - c.src).norm());
        }
        let v = t - c.src;
        let a = c.wa - c.src;
        let b = c.wb - c.src;
        let scale = v.norm() * a.norm().max(b.norm());
        if a.cross(v) >= -WINDOW_SLACK * scale && v.cross(b) >= -WINDOW_SLACK * scale {
            Some(v.norm())
        } else {
            None
        }
    }

    fn expand(&mut self, idx: usize, cutoff: f64) {
        let c = self.arena[idx].clone();
        let fr = *self.mesh.frame(c.face);
        for k in 0..3 {
            if Some(k) == c.entry {
                continue;
            }
            let Some((across, iso)) = self.mesh.transfer(c.face, k) else {
                continue;
            };
            let edge_id = self.mesh.edge_id(c.face, k);
            if self.uses_edge(idx, edge_id) {
                continue;
            }
            let e0 = fr[k];
            let e1 = fr[(k + 1) % 3];
            let (lo, hi) = if c.entry.is_none() {
                // Source on this edge's line: no ray crosses it transversally.
                let d = (e1 - e0).cross(c.src - e0).abs() / (e1 - e0).norm();
                if d <= 1e-14 * (e1 - e0).norm().max(1.0) {
                    continue;
                }
                (0.0, 1.0)
            } else {
                match clip_to_wedge(c.src, c.wa, c.wb, e0, e1) {
                    Some(r) => r,
                    None => continue,
                }
            };
            // A window pinched to a vertex continues only through flat
            // vertices; anywhere else a straight continuation is meaningless.
            if (hi - lo) * (e1 - e0).norm() <= 1e3 * self.tiny {
                let fv = self.mesh.face(c.face);
                let v = if lo <= 0.5 { fv[k] } else { fv[(k + 1) % 3] };
                if !self.flat[v] {
                    continue;
                }
            }
            let pa = e0.lerp(e1, lo);
            let pb = e0.lerp(e1, hi);
            let src = iso.apply(c.src);
            let mut wa = iso.apply(pa);
            let mut wb = iso.apply(pb);
            if (wa - src).cross(wb - src) < 0.0 {
                std::mem::swap(&mut wa, &mut wb);
            }
            let lb = crate::geom::point_segment_distance(src, wa, wb);
            // A window touching the source image only revisits the source.
            if (wa - src).norm().min((wb - src).norm()) <= self.tiny {
                continue;
            }
            if lb >= cutoff {
                continue;
            }
            if c.depth + 1 > self.depth_limit {
                self.truncated_lb = self.truncated_lb.min(lb);
                continue;
            }
            let to_root = c.to_root.compose(&iso.inverse());
            self.arena.push(Candidate {
                face: across.face,
                entry: Some(across.edge),
                exit_from_parent: k,
                edge_id,
                src,
                wa,
                wb,
                depth: c.depth + 1,
                parent: Some(idx),
                to_root,
                root_face: c.root_face,
            });
            self.heap.push(Queued(lb, self.arena.len() - 1));
        }
    }

    /// Runs until every target's best length is below all queued bounds
    /// (plus `tie_window`). Returns, per target, hits sorted by length.
    fn run(
        &mut self,
        targets: &[SurfacePoint],
        tie_window: f64,
        keep_alternatives: bool,
    ) -> Vec<Vec<Hit>> {
        let mut by_face: HashMap<usize, Vec<(usize, Vec2)>> = HashMap::new();
        for (i, t) in targets.iter().enumerate() {
            for (f, p) in t.charts(self.mesh) {
                by_face.entry(f).or_default().push((i, p));
            }
        }
        let mut hits: Vec<Vec<Hit>> = vec![Vec::new(); targets.len()];
        let mut best = vec![f64::INFINITY; targets.len()];
        let mut worst_best = f64::INFINITY;
        while let Some(Queued(lb, idx)) = self.heap.pop() {
            if lb > worst_best + tie_window {
                break;
            }
            let face = self.arena[idx].face;
            if let Some(list) = by_face.get(&face) {
                for &(ti, tp) in list {
                    if let Some(len) = self.reach(idx, tp) {
                        let c = &self.arena[idx];
                        let initial = c.to_root.rotate(tp - c.src);
                        let hit = Hit {
                            length: len,
                            cand: Some(idx),
                            root_face: c.root_face,
                            src: c.src,
                            target_face: face,
                            target: tp,
                            initial,
                        };
                        if len < best[ti] {
                            best[ti] = len;
                        }
                        if keep_alternatives {
                            hits[ti].push(hit);
                        } else if hits[ti].first().is_none_or(|h| len < h.length) {
                            hits[ti] = vec![hit];
                        }
                    }
                }
                worst_best = best.iter().copied().fold(0.0, f64::max);
            } else if worst_best.is_infinite() && best.iter().all(|b| b.is_finite()) {
                worst_best = best.iter().copied().fold(0.0, f64::max);
            }
            self.expand(idx, worst_best + tie_window);
        }
        for h in &mut hits {
            h.sort_by(|a, b| a.length.total_cmp(&b.length));
        }
        hits
    }

    fn path(&self, hit: &Hit) -> GeodesicPath {
        let mesh = self.mesh;
        let Some(last) = hit.cand else {
            return GeodesicPath::empty();
        };
        let mut chain = vec![last];
        while let Some(p) = self.arena[*chain.last().unwrap()].parent {
            chain.push(p);
        }
        chain.reverse();
        let t_root = self.arena[last].to_root.apply(hit.target);
        // Crossing parameter on each non-root candidate's entry edge.
        let mut cross_u = vec![0.0; chain.len()];
        for (i, &ci) in chain.iter().enumerate().skip(1) {
            let c = &self.arena[ci];
            let fr = mesh.frame(c.face);
            let j = c.entry.unwrap();
            let e0 = fr[j];
            let e1 = fr[(j + 1) % 3];
            let t = c.to_root.inverse().apply(t_root);
            let d = t - c.src;
            let denom = d.cross(e1 - e0);
            let u = if denom.abs() < 1e-300 {
                0.5
            } else {
                d.cross(c.src - e0) / denom
            };
            cross_u[i] = u.clamp(0.0, 1.0);
        }
        let mut segments = Vec::with_capacity(chain.len());
        for (i, &ci) in chain.iter().enumerate() {
            let c = &self.arena[ci];
            let entry = if i == 0 {
                mesh.to_bary(c.face, c.src)
            } else {
                let j = c.entry.unwrap();
                edge_bary(j, cross_u[i])
            };
            let exit = if i + 1 == chain.len() {
                mesh.to_bary(c.face, hit.target)
            } else {
                let next = &self.arena[chain[i + 1]];
                edge_bary(next.exit_from_parent, 1.0 - cross_u[i + 1])
            };
            segments.push(PathSegment {
                face: c.face,
                entry: clean_bary(entry),
                exit: clean_bary(exit),
            });
        }
        let _ = hit.root_face;
        let _ = hit.src;
        let _ = hit.target_face;
        GeodesicPath {
            segments,
            total_length: hit.length,
            closed: false,
        }
    }
}

fn edge_bary(k: usize, u: f64) -> [f64; 3] {
    let mut b = [0.0; 3];
    b[k] = 1.0 - u;
    b[(k + 1) % 3] = u;
    b
}

fn clean_bary(b: [f64; 3]) -> [f64; 3] {
    SurfacePoint::raw(0, b).bary
}

/// Parameter interval of segment `e0 → e1` seen from `s` between the rays
/// through `wa` and `wb` (with `wa → wb` counterclockwise about `s`).
fn clip_to_wedge(s: Vec2, wa: Vec2, wb: Vec2, e0: Vec2, e1: Vec2) -> Option<(f64, f64)> {
    let a = wa - s;
    let b = wb - s;
    let d = e1 - e0;
    let q = e0 - s;
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    let scale = a.norm().max(b.norm()) * (q.norm() + d.norm());
    // a × (q + u d) ≥ 0  and  (q + u d) × b ≥ 0
    for (c0, c1) in [(a.cross(q), a.cross(d)), (q.cross(b), d.cross(b))] {
        let c0 = c0 + WINDOW_SLACK * scale;
        if c1.abs() <= f64::EPSILON * scale {
            if c0 < 0.0 {
                return None;
            }
        } else if c1 > 0.0 {
            lo = lo.max(-c0 / c1);
        } else {
            hi = hi.min(-c0 / c1);
        }
    }
    if lo > hi {
        return None;
    }
    Some((lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0)))
}

/// Shortest path between two points among edge sequences of at most
/// `depth_limit` edges.
pub fn intrinsic_distance(
    mesh: &TriMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    depth_limit: usize,
) -> Result<(f64, GeodesicPath)> {
    let d = distance_query(mesh, a, b, depth_limit, 0.0)?;
    Ok((d.length, d.path))
}

/// Like [`intrinsic_distance`], but also looks for a competing minimizer
/// leaving `a` in a different direction within `tie_window` of the best.
pub fn distance_query(
    mesh: &TriMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    depth_limit: usize,
    tie_window: f64,
) -> Result<Distance> {
    if depth_limit == 0 {
        return Err(GeoError::InvalidInput(
            "depth limit must be at least 1".into(),
        ));
    }
    let tol = 1e-14 * mesh.extent().max(1.0);
    if a.same_point(mesh, b, tol) {
        return Ok(Distance {
            length: 0.0,
            path: GeodesicPath::empty(),
            runner_up: None,
        });
    }
    let mut search = Search::new(mesh, *a, depth_limit);
    let hits = search.run(std::slice::from_ref(b), tie_window, tie_window > 0.0);
    let list = &hits[0];
    let best = *list
        .first()
        .ok_or(GeoError::DepthExceeded { limit: depth_limit })?;
    if search.truncated_lb < best.length - 1e-12 {
        return Err(GeoError::DepthExceeded { limit: depth_limit });
    }
    let runner_up = list
        .iter()
        .skip(1)
        .find(|h| distinct_start(mesh, a, &best, h))
        .map(|h| h.length);
    Ok(Distance {
        length: best.length,
        path: search.path(&best),
        runner_up,
    })
}

fn distinct_start(mesh: &TriMesh, a: &SurfacePoint, x: &Hit, y: &Hit) -> bool {
    let (Ok(dx), Ok(dy)) = (
        TangentDirection::new(x.root_face, x.initial),
        TangentDirection::new(y.root_face, y.initial),
    ) else {
        return false;
    };
    match crate::development::hinge_angle(mesh, a, &dx, &dy) {
        Ok(angle) => angle > 1e-6,
        Err(_) => true,
    }
}

/// Distances from one source to many targets in a single search.
pub fn distances_from(
    mesh: &TriMesh,
    source: &SurfacePoint,
    targets: &[SurfacePoint],
    depth_limit: usize,
) -> Result<Vec<f64>> {
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let tol = 1e-14 * mesh.extent().max(1.0);
    let mut search = Search::new(mesh, *source, depth_limit);
    let hits = search.run(targets, 0.0, false);
    let mut out = Vec::with_capacity(targets.len());
    for (t, h) in targets.iter().zip(&hits) {
        if source.same_point(mesh, t, tol) {
            out.push(0.0);
            continue;
        }
        let len = h.first().map_or(f64::INFINITY, |h| h.length);
        if search.truncated_lb < len - 1e-12 {
            return Err(GeoError::DepthExceeded { limit: depth_limit });
        }
        out.push(len);
    }
    Ok(out)
}

/// Exhaustive reference: every simple edge sequence of at most `depth`
/// edges is unfolded by circle intersection from the 3D edge lengths and
/// tested for a straight feasible segment.
pub fn brute_force_distance_oracle(
    mesh: &TriMesh,
    a: &SurfacePoint,
    b: &SurfacePoint,
    depth: usize,
) -> f64 {
    if a.same_point(mesh, b, 1e-14 * mesh.extent().max(1.0)) {
        return 0.0;
    }
    let target_faces: Vec<(usize, [f64; 3])> = b
        .charts(mesh)
        .into_iter()
        .map(|(f, p)| (f, mesh.to_bary(f, p)))
        .collect();
    let mut best = f64::INFINITY;
    for (f0, p0) in a.charts(mesh) {
        let bary = mesh.to_bary(f0, p0);
        let fv = mesh.face(f0);
        let placed = place_root(mesh.vertices(), fv);
        let s = placed[0] * bary[0] + placed[1] * bary[1] + placed[2] * bary[2];
        let mut edges: Vec<(Vec2, Vec2)> = Vec::new();
        let mut used: Vec<[usize; 2]> = Vec::new();
        dfs(
            mesh,
            f0,
            fv,
            placed,
            s,
            &target_faces,
            depth,
            &mut edges,
            &mut used,
            &mut best,
        );
    }
    best
}

fn place_root(verts: &[Vec3], fv: [usize; 3]) -> [Vec2; 3] {
    let l01 = (verts[fv[1]] - verts[fv[0]]).norm();
    let l02 = (verts[fv[2]] - verts[fv[0]]).norm();
    let l12 = (verts[fv[2]] - verts[fv[1]]).norm();
    let x = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    let y = (l02 * l02 - x * x).max(0.0).sqrt();
    [Vec2::new(0.0, 0.0), Vec2::new(l01, 0.0), Vec2::new(x, y)]
}

/// Third corner of a triangle on the far side of `p → q` from `away`.
fn circle_intersection(p: Vec2, q: Vec2, rp: f64, rq: f64, away: Vec2) -> Vec2 {
    let d = (q - p).norm();
    let x = (rp * rp - rq * rq + d * d) / (2.0 * d);
    let h = (rp * rp - x * x).max(0.0).sqrt();
    let ex = (q - p) / d;
    let ey = ex.perp();
    let c1 = p + ex * x + ey * h;
    let c2 = p + ex * x - ey * h;
    let side = (q - p).cross(away - p);
    if (q - p).cross(c1 - p) * side <= 0.0 {
        c1
    } else {
        c2
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    mesh: &TriMesh,
    face: usize,
    fv: [usize; 3],
    placed: [Vec2; 3],
    s: Vec2,
    targets: &[(usize, [f64; 3])],
    depth: usize,
    edges: &mut Vec<(Vec2, Vec2)>,
    used: &mut Vec<[usize; 2]>,
    best: &mut f64,
) {
    for &(tf, tb) in targets {
        if tf != face {
            continue;
        }
        let t = placed[0] * tb[0] + placed[1] * tb[1] + placed[2] * tb[2];
        let len = (t - s).norm();
        if len < *best && edges.iter().all(|&(e0, e1)| segment_crosses(s, t, e0, e1)) {
            *best = len;
        }
    }
    if edges.len() >= depth {
        return;
    }
    let verts = mesh.vertices();
    for k in 0..3 {
        let (a, b) = (fv[k], fv[(k + 1) % 3]);
        let key = [a.min(b), a.max(b)];
        if used.contains(&key) {
            continue;
        }
        let Some(across) = mesh.across(face, k) else {
            continue;
        };
        let g = across.face;
        let gv = mesh.face(g);
        let j = across.edge;
        let c = gv[(j + 2) % 3];
        let pa = placed[k];
        let pb = placed[(k + 1) % 3];
        let away = placed[(k + 2) % 3];
        let pc = circle_intersection(
            pa,
            pb,
            (verts[c] - verts[a]).norm(),
            (verts[c] - verts[b]).norm(),
            away,
        );
        // g's corners: gv[j] = b, gv[j+1] = a, gv[j+2] = c.
        let mut gp = [Vec2::default(); 3];
        gp[j] = pb;
        gp[(j + 1) % 3] = pa;
        gp[(j + 2) % 3] = pc;
        edges.push((pa, pb));
        used.push(key);
        dfs(mesh, g, gv, gp, s, targets, depth, edges, used, best);
        edges.pop();
        used.pop();
    }
}

fn segment_crosses(s: Vec2, t: Vec2, e0: Vec2, e1: Vec2) -> bool {
    let d = t - s;
    let scale = d.norm() * (e1 - e0).norm().max(1e-300);
    let c0 = d.cross(e0 - s);
    let c1 = d.cross(e1 - s);
    // Edge endpoints on opposite sides (or on) the line s-t ...
    if c0 * c1 > 1e-10 * scale * scale {
        return false;
    }
    // ... and s, t on opposite sides (or on) the edge line.
    let e = e1 - e0;
    let a0 = e.cross(s - e0);
    let a1 = e.cross(t - e0);
    a0 * a1 <= 1e-10 * scale * scale
}
