use super::{random_point, rng_for, run_samples, CheckReport};
use crate::development::{hinge_angle, trace, GeodesicPath, SurfacePoint, TangentDirection};
use crate::regions::{geodesic_triangle, model_angle, model_area};
use crate::shortest_path::{distance_query, intrinsic_distance, DEFAULT_DEPTH};
use crate::surface::PolyhedralSurface;
use rand::Rng;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{PI, TAU};

pub const COMPARISON_TOLERANCE: f64 = 1e-7;
pub const SUPPLEMENTARY_TOLERANCE: f64 = 1e-6;
pub const FIRST_VARIATION_TOLERANCE: f64 = 1e-3;
pub const FIRST_VARIATION_STEP: f64 = 1e-5;
pub const TIE_WINDOW: f64 = 1e-6;
pub const AREA_TOLERANCE: f64 = 1e-7;

/// One evaluated sample: its worst margin and how many comparisons it made.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub margin: f64,
    pub measurements: usize,
}

fn start_dir(p: &GeodesicPath, mesh: &crate::TriMesh) -> Option<TangentDirection> {
    p.start_direction(mesh)
}

fn corner(
    s: &PolyhedralSurface,
    rng: &mut impl Rng,
    singular: &[usize],
    vertex_rate: f64,
) -> SurfacePoint {
    if !singular.is_empty() && rng.gen::<f64>() < vertex_rate {
        let v = singular[rng.gen_range(0..singular.len())];
        SurfacePoint::vertex(s.mesh(), v).expect("vertex index in range")
    } else {
        random_point(s, rng)
    }
}

/// Hinge angles at the three corners against the model angles.
pub fn comparison_sample(s: &PolyhedralSurface, seed: u64) -> Option<Sample> {
    let m = s.mesh();
    let mut rng = rng_for(seed);
    let singular = s.singular_vertices();
    let x = corner(s, &mut rng, &singular, 0.2);
    let y = corner(s, &mut rng, &singular, 0.1);
    let z = corner(s, &mut rng, &singular, 0.1);
    let (dxy, xy) = intrinsic_distance(m, &x, &y, DEFAULT_DEPTH).ok()?;
    let (dyz, yz) = intrinsic_distance(m, &y, &z, DEFAULT_DEPTH).ok()?;
    let (dzx, zx) = intrinsic_distance(m, &z, &x, DEFAULT_DEPTH).ok()?;
    if dxy.min(dyz).min(dzx) < 1e-6 {
        return None;
    }
    let corners = [
        (
            x,
            start_dir(&xy, m)?,
            start_dir(&zx.reversed(), m)?,
            dxy,
            dzx,
            dyz,
        ),
        (
            y,
            start_dir(&yz, m)?,
            start_dir(&xy.reversed(), m)?,
            dyz,
            dxy,
            dzx,
        ),
        (
            z,
            start_dir(&zx, m)?,
            start_dir(&yz.reversed(), m)?,
            dzx,
            dyz,
            dxy,
        ),
    ];
    let mut margin = f64::INFINITY;
    for (p, d1, d2, a, b, c) in corners {
        let hinge = hinge_angle(m, &p, &d1, &d2).ok()?;
        let model = model_angle(a, b, c).ok()?;
        margin = margin.min(hinge - model);
    }
    Some(Sample {
        margin,
        measurements: 3,
    })
}

fn random_geodesic(s: &PolyhedralSurface, rng: &mut impl Rng) -> Option<GeodesicPath> {
    let m = s.mesh();
    let q = random_point(s, rng);
    let dir = TangentDirection::from_angle(q.face, rng.gen::<f64>() * TAU);
    let len = m.max_edge_length() * rng.gen_range(0.5..2.0);
    trace(m, q, dir, len, false).ok().map(|t| t.path)
}

/// Two supplementary hinges at an interior point of a geodesic sum to π.
pub fn supplementary_sample(s: &PolyhedralSurface, seed: u64) -> Option<Sample> {
    let m = s.mesh();
    let mut rng = rng_for(seed);
    let g = random_geodesic(s, &mut rng)?;
    let segs: Vec<_> = g.segments.iter().filter(|x| x.length(m) > 1e-9).collect();
    if segs.is_empty() {
        return None;
    }
    let (p, fwd, back) = if segs.len() >= 2 && rng.gen::<bool>() {
        // at the crossing between two consecutive segments
        let i = rng.gen_range(0..segs.len() - 1);
        let (a0, a1) = segs[i].planar(m);
        let (b0, b1) = segs[i + 1].planar(m);
        let p = segs[i + 1].entry_point();
        (
            p,
            TangentDirection::new(segs[i + 1].face, b1 - b0).ok()?,
            TangentDirection::new(segs[i].face, a0 - a1).ok()?,
        )
    } else {
        let seg = segs[rng.gen_range(0..segs.len())];
        let (a, b) = seg.planar(m);
        let t = rng.gen_range(0.1..0.9);
        let p = SurfacePoint::raw(seg.face, m.to_bary(seg.face, a.lerp(b, t)));
        let d = TangentDirection::new(seg.face, b - a).ok()?;
        (p, d, d.reversed())
    };
    let z = random_point(s, &mut rng);
    let (dz, pz) = intrinsic_distance(m, &p, &z, DEFAULT_DEPTH).ok()?;
    if dz < 1e-6 {
        return None;
    }
    let to_z = start_dir(&pz, m)?;
    let a1 = hinge_angle(m, &p, &back, &to_z).ok()?;
    let a2 = hinge_angle(m, &p, &fwd, &to_z).ok()?;
    Some(Sample {
        margin: -(a1 + a2 - PI).abs(),
        measurements: 1,
    })
}

/// Central difference of `t ↦ |p γ(t)|` against `−cos φ₊`. Points where
/// two distinct minimizers tie are skipped.
pub fn first_variation_sample(s: &PolyhedralSurface, seed: u64) -> Option<Sample> {
    let m = s.mesh();
    let mut rng = rng_for(seed);
    let p = random_point(s, &mut rng);
    let g = random_geodesic(s, &mut rng)?;
    let len = g.planar_length(m);
    let t = len * rng.gen_range(0.2..0.8);
    let h = FIRST_VARIATION_STEP;
    let (at, fwd) = g.point_at(m, t)?;
    let (before, _) = g.point_at(m, t - h)?;
    let (after, _) = g.point_at(m, t + h)?;
    let d = distance_query(m, &at, &p, DEFAULT_DEPTH, TIE_WINDOW).ok()?;
    if d.length < 1e-3 {
        return None;
    }
    if d.runner_up.is_some_and(|r| r - d.length <= TIE_WINDOW) {
        return None;
    }
    let to_p = start_dir(&d.path, m)?;
    let phi = hinge_angle(m, &at, &fwd, &to_p).ok()?;
    let (fa, _) = intrinsic_distance(m, &after, &p, DEFAULT_DEPTH).ok()?;
    let (fb, _) = intrinsic_distance(m, &before, &p, DEFAULT_DEPTH).ok()?;
    let derivative = (fa - fb) / (2.0 * h);
    Some(Sample {
        margin: -(derivative + phi.cos()).abs(),
        measurements: 1,
    })
}

/// Area of the smaller disc bounded by a random geodesic triangle against
/// the model triangle's area.
pub fn area_sample(s: &PolyhedralSurface, seed: u64) -> Option<Sample> {
    let m = s.mesh();
    let mut rng = rng_for(seed);
    let x = random_point(s, &mut rng);
    let mut reach = || {
        let dir = TangentDirection::from_angle(x.face, rng.gen::<f64>() * TAU);
        let len = m.max_edge_length() * rng.gen_range(0.1..1.0);
        trace(m, x, dir, len, false).ok()?.path.end_point()
    };
    let y = reach()?;
    let z = reach()?;
    let t = geodesic_triangle(s, &x, &y, &z, None).ok()?;
    let [a, b, c] = t.side_lengths();
    let model = model_area(a, b, c).ok()?;
    Some(Sample {
        margin: (t.region.area() - model) / model.max(1.0),
        measurements: 1,
    })
}

/// Which property a check run samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Comparison,
    Supplementary,
    FirstVariation,
    AreaComparison,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        CheckKind::Comparison,
        CheckKind::Supplementary,
        CheckKind::FirstVariation,
        CheckKind::AreaComparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Comparison => "comparison",
            CheckKind::Supplementary => "supplementary",
            CheckKind::FirstVariation => "first_variation",
            CheckKind::AreaComparison => "area_comparison",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::Comparison => COMPARISON_TOLERANCE,
            CheckKind::Supplementary => SUPPLEMENTARY_TOLERANCE,
            CheckKind::FirstVariation => FIRST_VARIATION_TOLERANCE,
            CheckKind::AreaComparison => AREA_TOLERANCE,
        }
    }
}

/// Runs `n` samples of `kind`, failing those whose margin is below
/// `-tolerance`.
pub fn run_check(
    kind: CheckKind,
    s: &PolyhedralSurface,
    n: usize,
    seed: u64,
    tolerance: f64,
) -> CheckReport {
    let (params, tolerances) = match kind {
        CheckKind::Comparison => (
            json!({ "samples": n, "depth": DEFAULT_DEPTH }),
            json!({ "angle": tolerance }),
        ),
        CheckKind::Supplementary => (
            json!({ "samples": n, "depth": DEFAULT_DEPTH }),
            json!({ "angle": tolerance }),
        ),
        CheckKind::FirstVariation => (
            json!({ "samples": n, "depth": DEFAULT_DEPTH, "step": FIRST_VARIATION_STEP }),
            json!({ "derivative": tolerance, "tie": TIE_WINDOW }),
        ),
        CheckKind::AreaComparison => (
            json!({ "samples": n, "depth": DEFAULT_DEPTH, "side": "smaller_area" }),
            json!({ "area_relative": tolerance }),
        ),
    };
    let sample = |k: u64| match kind {
        CheckKind::Comparison => comparison_sample(s, k),
        CheckKind::Supplementary => supplementary_sample(s, k),
        CheckKind::FirstVariation => first_variation_sample(s, k),
        CheckKind::AreaComparison => area_sample(s, k),
    };
    run_samples(kind.name(), params, tolerances, tolerance, n, seed, sample)
}

/// Hinge angle at every corner of random triangles is at least the model
/// angle.
pub fn check_comparison(s: &PolyhedralSurface, n: usize, seed: u64) -> CheckReport {
    run_check(CheckKind::Comparison, s, n, seed, COMPARISON_TOLERANCE)
}

/// Two supplementary hinges at an interior point of a geodesic sum to π.
pub fn check_supplementary(s: &PolyhedralSurface, n: usize, seed: u64) -> CheckReport {
    run_check(
        CheckKind::Supplementary,
        s,
        n,
        seed,
        SUPPLEMENTARY_TOLERANCE,
    )
}

/// Distance derivative along a geodesic matches `−cos φ₊` at smooth points.
pub fn check_first_variation(s: &PolyhedralSurface, n: usize, seed: u64) -> CheckReport {
    run_check(
        CheckKind::FirstVariation,
        s,
        n,
        seed,
        FIRST_VARIATION_TOLERANCE,
    )
}

/// Enclosed area of geodesic triangles is at least the model area.
pub fn check_area_comparison(s: &PolyhedralSurface, n: usize, seed: u64) -> CheckReport {
    run_check(CheckKind::AreaComparison, s, n, seed, AREA_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn checks_pass_on_tetrahedron() {
        let s = shapes::regular_tetrahedron();
        for r in [
            check_comparison(&s, 60, 1),
            check_supplementary(&s, 60, 2),
            check_first_variation(&s, 60, 3),
            check_area_comparison(&s, 40, 4),
        ] {
            assert!(r.passed(), "{r:?}");
            assert!(r.samples.valid > r.samples.attempted / 2, "{r:?}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let s = shapes::unit_cube();
        let a = serde_json::to_string(&check_comparison(&s, 30, 9)).unwrap();
        let b = serde_json::to_string(&check_comparison(&s, 30, 9)).unwrap();
        assert_eq!(a, b);
    }
}
