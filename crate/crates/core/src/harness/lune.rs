use crate::development::{Location, SurfacePoint};
use crate::error::{GeoError, Result};
use crate::mesh::TriMesh;
use crate::regions::{model_angle, model_area, DiscSurface};
use crate::shortest_path::{distances_from, intrinsic_distance};
use crate::split::{split_along, Piece};
use crate::surface::SINGULAR_THRESHOLD;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

const BOUNDARY_SAMPLES: usize = 1000;
const REFINE_RELATIVE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct LuneFlags {
    /// `|p−q|_D ≥ length(∂D)/8`.
    pub asterism: bool,
    /// `|x−y|_D ≤ 100·area(Σ)/length(∂D)`.
    pub xy_bound: bool,
    /// `κ(L_p) ≥ π − model angle at p` (up to 1e-6).
    pub lune_bound: bool,
    /// `|x−y|_D < δ`.
    pub below_delta: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LuneReport {
    pub disc_id: String,
    pub epsilon: f64,
    pub delta: f64,
    pub boundary_length: f64,
    pub p: SurfacePoint,
    pub q: SurfacePoint,
    pub x: SurfacePoint,
    pub y: SurfacePoint,
    pub pq: f64,
    pub px: f64,
    pub py: f64,
    pub qx: f64,
    pub qy: f64,
    pub xy: f64,
    pub lune_curvature: f64,
    pub lune_singular_vertices: usize,
    pub model_angle_p: f64,
    /// Area of the model triangle `qxy` over `|x−y|·|x−q|`.
    pub area_ratio: f64,
    pub refinement_tolerance: f64,
    pub flags: LuneFlags,
}

/// Arclength parametrization of the disc boundary.
struct Boundary<'a> {
    mesh: &'a TriMesh,
    edges: Vec<(usize, usize)>,
    start: Vec<f64>,
    total: f64,
}

impl<'a> Boundary<'a> {
    fn new(disc: &'a DiscSurface) -> Result<Self> {
        let m = &disc.mesh;
        let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for f in 0..m.num_faces() {
            let fv = m.face(f);
            for k in 0..3 {
                directed.insert((fv[k], fv[(k + 1) % 3]), (f, k));
            }
        }
        let b = &disc.boundary;
        let mut edges = Vec::with_capacity(b.len());
        let mut start = Vec::with_capacity(b.len());
        let mut total = 0.0;
        for i in 0..b.len() {
            let key = (b[i], b[(i + 1) % b.len()]);
            let &(f, k) = directed.get(&key).ok_or_else(|| {
                GeoError::Precondition("boundary loop does not follow the faces".into())
            })?;
            edges.push((f, k));
            start.push(total);
            total += m.edge_length(f, k);
        }
        Ok(Self {
            mesh: m,
            edges,
            start,
            total,
        })
    }

    fn point(&self, s: f64) -> SurfacePoint {
        let s = s.rem_euclid(self.total);
        let i = match self.start.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (f, k) = self.edges[i];
        let len = self.mesh.edge_length(f, k);
        let u = ((s - self.start[i]) / len).clamp(0.0, 1.0);
        let mut bary = [0.0; 3];
        bary[k] = 1.0 - u;
        bary[(k + 1) % 3] = u;
        SurfacePoint::raw(f, bary)
    }
}

struct Ctx<'a> {
    mesh: &'a TriMesh,
    depth: usize,
}

impl Ctx<'_> {
    fn dist(&self, a: &SurfacePoint, b: &SurfacePoint) -> Result<f64> {
        Ok(intrinsic_distance(self.mesh, a, b, self.depth)?.0)
    }

    fn many(&self, a: &SurfacePoint, bs: &[SurfacePoint]) -> Result<Vec<f64>> {
        distances_from(self.mesh, a, bs, self.depth)
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a)?;
        }
    }
    Ok((lo + hi) / 2.0)
}

/// Runs the lune construction on a disc cut from a surface of area
/// `surface_area`.
pub fn lune_experiment(disc: &DiscSurface, surface_area: f64, epsilon: f64) -> Result<LuneReport> {
    let bd = Boundary::new(disc)?;
    let len = bd.total;
    if !(epsilon > 0.0) || epsilon >= len / 4.0 {
        return Err(GeoError::Precondition(format!(
            "epsilon {epsilon} must lie in (0, {})",
            len / 4.0
        )));
    }
    let ctx = Ctx {
        mesh: &disc.mesh,
        depth: disc.mesh.num_edges().max(8),
    };
    let spacing = len / BOUNDARY_SAMPLES as f64;
    let samples: Vec<SurfacePoint> = (0..BOUNDARY_SAMPLES)
        .map(|i| bd.point(i as f64 * spacing))
        .collect();

    // Farthest pair by repeated sweeps.
    let mut a = 0usize;
    let mut best = (0usize, 0usize, -1.0f64);
    for _ in 0..8 {
        let d = ctx.many(&samples[a], &samples)?;
        let b = argmax(&d);
        if d[b] <= best.2 * (1.0 + 1e-12) {
            break;
        }
        best = (a, b, d[b]);
        a = b;
    }
    if best.2 <= 0.0 {
        return Err(GeoError::Precondition(
            "boundary samples are all at distance zero".into(),
        ));
    }
    let mut sp = best.0 as f64 * spacing;
    let mut sq = best.1 as f64 * spacing;
    let tol = REFINE_RELATIVE * best.2;
    for _ in 0..3 {
        let q = bd.point(sq);
        sp = golden_max(sp - spacing, sp + spacing, tol, &mut |s| {
            ctx.dist(&bd.point(s), &q)
        })?;
        let p = bd.point(sp);
        sq = golden_max(sq - spacing, sq + spacing, tol, &mut |s| {
            ctx.dist(&p, &bd.point(s))
        })?;
    }
    sp = sp.rem_euclid(len);
    sq = sq.rem_euclid(len);
    let p = bd.point(sp);
    let q = bd.point(sq);
    let pq = ctx.dist(&p, &q)?;

    // γ1 runs forward from p to q, γ2 backward.
    let arc1 = (sq - sp).rem_euclid(len);
    let arc2 = len - arc1;
    let along = |dir: f64, s: f64| bd.point(sp + dir * s);
    let first_at = |dir: f64, arc: f64| -> Result<f64> {
        let n = ((arc / spacing).ceil() as usize).max(2);
        let grid: Vec<f64> = (1..=n).map(|i| arc * i as f64 / n as f64).collect();
        let pts: Vec<SurfacePoint> = grid.iter().map(|&s| along(dir, s)).collect();
        let d = ctx.many(&p, &pts)?;
        let i = d.iter().position(|&x| x >= epsilon).ok_or_else(|| {
            GeoError::Precondition("no boundary point at distance epsilon".into())
        })?;
        let (mut lo, mut hi) = (if i == 0 { 0.0 } else { grid[i - 1] }, grid[i]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ctx.dist(&p, &along(dir, mid))? >= epsilon {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    };
    let mut sx = first_at(1.0, arc1)?;
    let mut sy = first_at(-1.0, arc2)?;
    let qx0 = ctx.dist(&q, &along(1.0, sx))?;
    let qy0 = ctx.dist(&q, &along(-1.0, sy))?;
    // Move the point farther from q toward p until both are equally far.
    let equalize = |dir: f64, s_far: f64, target: f64| -> Result<f64> {
        let (mut lo, mut hi) = (0.0, s_far);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ctx.dist(&q, &along(dir, mid))? >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    if qx0 > qy0 {
        sy = equalize(-1.0, sy, qx0)?;
    } else if qy0 > qx0 {
        sx = equalize(1.0, sx, qy0)?;
    }
    let x = along(1.0, sx);
    let y = along(-1.0, sy);
    let px = ctx.dist(&p, &x)?;
    let py = ctx.dist(&p, &y)?;
    let qx = ctx.dist(&q, &x)?;
    let qy = ctx.dist(&q, &y)?;
    let (xy, xy_path) = intrinsic_distance(&disc.mesh, &x, &y, ctx.depth)?;

    let (lune_curvature, lune_singular_vertices) = if xy_path.is_empty() {
        (0.0, 0)
    } else {
        let pieces = split_along(&disc.mesh, &xy_path.segments)?;
        if pieces.len() < 2 {
            // [xy] runs along the boundary: the lune is empty.
            (0.0, 0)
        } else {
            let lune = pieces
                .iter()
                .find(|piece| touches(&disc.mesh, piece, &p))
                .ok_or_else(|| GeoError::Cut("no piece contains p".into()))?;
            lune_curvature_of(disc, lune)
        }
    };
    let model_p = model_angle(px, py, xy)?;
    let delta = epsilon * epsilon.sin();
    let area_ratio = if xy > 0.0 && qx > 0.0 {
        model_area(qx, qy, xy).unwrap_or(0.0) / (xy * qx)
    } else {
        0.0
    };
    let flags = LuneFlags {
        asterism: pq >= len / 8.0,
        xy_bound: xy <= 100.0 * surface_area / len,
        lune_bound: lune_curvature >= PI - model_p - 1e-6,
        below_delta: xy < delta,
    };
    Ok(LuneReport {
        disc_id: String::new(),
        epsilon,
        delta,
        boundary_length: len,
        p,
        q,
        x,
        y,
        pq,
        px,
        py,
        qx,
        qy,
        xy,
        lune_curvature,
        lune_singular_vertices,
        model_angle_p: model_p,
        area_ratio,
        refinement_tolerance: tol,
        flags,
    })
}

fn touches(mesh: &TriMesh, piece: &Piece, p: &SurfacePoint) -> bool {
    let charts = p.charts(mesh);
    let scale = mesh.extent().max(1.0);
    piece.parent_faces.iter().enumerate().any(|(f, &pf)| {
        let Some(&(_, q)) = charts.iter().find(|(g, _)| *g == pf) else {
            return false;
        };
        let c: Vec<_> = piece
            .mesh
            .face(f)
            .iter()
            .map(|&v| {
                SurfacePoint::from_location(mesh, piece.origins[v])
                    .in_face(mesh, pf)
                    .expect("piece vertex on its parent face")
            })
            .collect();
        (0..3).all(|k| {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            (b - a).cross(q - a) >= -1e-12 * scale * (b - a).norm()
        })
    })
}

fn lune_curvature_of(disc: &DiscSurface, lune: &Piece) -> (f64, usize) {
    let mut total = 0.0;
    let mut count = 0;
    for v in 0..lune.mesh.num_vertices() {
        if lune.mesh.is_boundary_vertex(v) {
            continue;
        }
        if let Location::Vertex(dv) = lune.origins[v] {
            let d = disc.defects[dv];
            total += d;
            if d.abs() > SINGULAR_THRESHOLD {
                count += 1;
            }
        }
    }
    (total, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isosceles::{enumerate_reaching, realize_on, IsoscelesSpec, LatticeGeodesicIndex};
    use crate::regions::cut_along_closed_geodesic;

    fn discs(sides: (f64, f64, f64), target: f64) -> (f64, DiscSurface, DiscSurface) {
        let spec = IsoscelesSpec::new(sides.0, sides.1, sides.2).unwrap();
        let s = spec.surface().unwrap();
        let e = *enumerate_reaching(&spec, target).unwrap().last().unwrap();
        let path = realize_on(&s, &LatticeGeodesicIndex::new(e.m, e.n).unwrap()).unwrap();
        let (a, b) = cut_along_closed_geodesic(&s, &path).unwrap();
        (s.area(), a, b)
    }

    #[test]
    fn straight_boundary_gives_empty_lune() {
        let (area, a, _) = discs((1.0, 1.0, 1.0), 2.0);
        let r = lune_experiment(&a, area, 0.1).unwrap();
        assert!((r.boundary_length - 2.0).abs() < 1e-9);
        assert!((r.xy - 0.2).abs() < 1e-6);
        assert_eq!(r.lune_singular_vertices, 0);
        assert!(r.flags.asterism && r.flags.xy_bound && r.flags.lune_bound);
    }

    #[test]
    fn long_cut_lune_holds_a_cone_point() {
        let (area, a, b) = discs((0.9, 1.0, 1.1), 50.0);
        for d in [a, b] {
            let r = lune_experiment(&d, area, 0.1).unwrap();
            assert!(r.lune_curvature >= PI - 0.2, "{r:?}");
            assert!(
                r.flags.asterism && r.flags.xy_bound && r.flags.lune_bound,
                "{r:?}"
            );
        }
    }

    #[test]
    fn epsilon_too_large() {
        let (area, a, _) = discs((1.0, 1.0, 1.0), 2.0);
        assert!(matches!(
            lune_experiment(&a, area, 0.5),
            Err(GeoError::Precondition(_))
        ));
    }
}
