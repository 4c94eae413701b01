//! Reference surfaces: platonic solids, doubled polygons and random convex
//! hulls used by tests, the harness corpus and the CLI.

use crate::geom::{Vec2, Vec3};
use crate::surface::PolyhedralSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Orients every face so its normal points away from the centroid.
pub(crate) fn orient_outward(vertices: &[Vec3], faces: &mut [[usize; 3]]) {
    let c = vertices.iter().fold(Vec3::default(), |a, &b| a + b) / vertices.len() as f64;
    for f in faces.iter_mut() {
        let [a, b, d] = *f;
        let n = (vertices[b] - vertices[a]).cross(vertices[d] - vertices[a]);
        if n.dot(vertices[a] - c) < 0.0 {
            f.swap(1, 2);
        }
    }
}

fn build(vertices: Vec<Vec3>, mut faces: Vec<[usize; 3]>) -> PolyhedralSurface {
    orient_outward(&vertices, &mut faces);
    PolyhedralSurface::new(vertices, faces).expect("reference solid is valid")
}

/// Regular tetrahedron with unit edges.
pub fn regular_tetrahedron() -> PolyhedralSurface {
    let s = 1.0 / 8f64.sqrt();
    let v = vec![
        Vec3::new(s, s, s),
        Vec3::new(s, -s, -s),
        Vec3::new(-s, s, -s),
        Vec3::new(-s, -s, s),
    ];
    build(v, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
}

/// Unit cube `[0,1]³` with each square split along a diagonal.
pub fn unit_cube() -> PolyhedralSurface {
    let mut v = Vec::new();
    for i in 0..8 {
        v.push(Vec3::new(
            (i & 1) as f64,
            ((i >> 1) & 1) as f64,
            ((i >> 2) & 1) as f64,
        ));
    }
    let quads = [
        [0, 1, 3, 2],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 3, 7, 6],
        [0, 2, 6, 4],
        [1, 3, 7, 5],
    ];
    let mut f = Vec::new();
    for q in quads {
        f.push([q[0], q[1], q[2]]);
        f.push([q[0], q[2], q[3]]);
    }
    build(v, f)
}

/// Regular icosahedron with unit edges.
pub fn regular_icosahedron() -> PolyhedralSurface {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let h = 0.5;
    let g = phi / 2.0;
    let v = vec![
        Vec3::new(-h, g, 0.0),
        Vec3::new(h, g, 0.0),
        Vec3::new(-h, -g, 0.0),
        Vec3::new(h, -g, 0.0),
        Vec3::new(0.0, -h, g),
        Vec3::new(0.0, h, g),
        Vec3::new(0.0, -h, -g),
        Vec3::new(0.0, h, -g),
        Vec3::new(g, 0.0, -h),
        Vec3::new(g, 0.0, h),
        Vec3::new(-g, 0.0, -h),
        Vec3::new(-g, 0.0, h),
    ];
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    build(v, f)
}

/// Octahedron with one apex pushed inside the hull. Not convex; returned
/// without validation.
pub fn dented_octahedron() -> PolyhedralSurface {
    let mut v = vec![
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(-1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, -1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(0.0, 0.0, -1.0),
    ];
    let mut f = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    orient_outward(&v, &mut f);
    v[4] = Vec3::new(0.0, 0.0, -0.5);
    PolyhedralSurface::new_unchecked(v, f).expect("structurally valid")
}

/// Tetrahedron on the coordinate corner `(0,0,0),(1,0,0),(0,1,0),(0,0,1)`.
pub fn corner_tetrahedron() -> PolyhedralSurface {
    let v = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    ];
    build(v, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
}

pub fn doubled_rectangle(w: f64, h: f64) -> PolyhedralSurface {
    PolyhedralSurface::double_polygon(&[
        Vec2::new(0.0, 0.0),
        Vec2::new(w, 0.0),
        Vec2::new(w, h),
        Vec2::new(0.0, h),
    ])
    .expect("rectangle is convex")
}

pub fn doubled_regular_polygon(n: usize, radius: f64) -> PolyhedralSurface {
    let pts: Vec<Vec2> = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            Vec2::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    PolyhedralSurface::double_polygon(&pts).expect("regular polygon is convex")
}

/// Convex hull of `n` points drawn uniformly from the cube `[-1,1]³`.
pub fn random_hull(n: usize, seed: u64) -> PolyhedralSurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec3> = (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    convex_hull(&pts).expect("random points are in general position")
}

/// Incremental 3D convex hull. Returns `None` for degenerate (coplanar)
/// input. Unused input points are dropped and the rest re-indexed.
pub fn convex_hull(points: &[Vec3]) -> Option<PolyhedralSurface> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    let eps = 1e-12 * scale * scale * scale;
    let vol = |a: usize, b: usize, c: usize, p: Vec3| {
        (points[b] - points[a])
            .cross(points[c] - points[a])
            .dot(p - points[a])
    };
    // Initial simplex.
    let i0 = 0;
    let i1 = (1..n).find(|&i| (points[i] - points[i0]).norm() > 1e-9 * scale)?;
    let i2 = (1..n).find(|&i| {
        (points[i1] - points[i0])
            .cross(points[i] - points[i0])
            .norm()
            > 1e-9 * scale * scale
    })?;
    let i3 = (1..n).find(|&i| vol(i0, i1, i2, points[i]).abs() > eps * 1e3)?;
    let mut faces: Vec<[usize; 3]> = vec![[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]];
    let inner = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    for f in faces.iter_mut() {
        if vol(f[0], f[1], f[2], inner) > 0.0 {
            f.swap(1, 2);
        }
    }
    let seed: HashSet<usize> = [i0, i1, i2, i3].into_iter().collect();
    for (p, &pt) in points.iter().enumerate() {
        if seed.contains(&p) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| vol(f[0], f[1], f[2], pt) > eps)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut directed: HashSet<(usize, usize)> = HashSet::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            if vis {
                for k in 0..3 {
                    directed.insert((f[k], f[(k + 1) % 3]));
                }
            }
        }
        let mut next = Vec::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            if vis {
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    if !directed.contains(&(b, a)) {
                        next.push([a, b, p]);
                    }
                }
            } else {
                next.push(*f);
            }
        }
        faces = next;
    }
    let mut map = vec![usize::MAX; n];
    let mut verts = Vec::new();
    for f in &faces {
        for &v in f {
            if map[v] == usize::MAX {
                map[v] = verts.len();
                verts.push(points[v]);
            }
        }
    }
    let faces = faces
        .iter()
        .map(|f| [map[f[0]], map[f[1]], map[f[2]]])
        .collect();
    PolyhedralSurface::new(verts, faces).ok()
}
