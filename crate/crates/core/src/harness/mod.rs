//! Property checks and experiment drivers over sampled configurations.
//!
//! Every sample draws from its own generator seeded from `(seed, index)`,
//! and results are merged by index, so reports do not depend on how rayon
//! schedules the work.

mod checks;
mod lune;
mod search;

pub use checks::{
    area_sample, check_area_comparison, check_comparison, check_first_variation,
    check_supplementary, comparison_sample, first_variation_sample, run_check,
    supplementary_sample, CheckKind, Sample,
};
pub use lune::{lune_experiment, LuneReport};
pub use search::{long_geodesic_search, FoundGeodesic, SearchReport};

use crate::development::SurfacePoint;
use crate::shapes;
use crate::surface::PolyhedralSurface;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Per-sample seed derived from the run seed.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(sample_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed)
}

/// Point uniformly distributed by area.
pub fn random_point(s: &PolyhedralSurface, rng: &mut impl Rng) -> SurfacePoint {
    let m = s.mesh();
    let total = m.total_area();
    let mut pick = rng.gen::<f64>() * total;
    let mut face = m.num_faces() - 1;
    for f in 0..m.num_faces() {
        pick -= m.face_area(f);
        if pick <= 0.0 {
            face = f;
            break;
        }
    }
    let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
    let s1 = r1.sqrt();
    let bary = [1.0 - s1, s1 * (1.0 - r2), s1 * r2];
    SurfacePoint::raw(face, bary)
}

/// Outcome counts and margins of one check run.
#[derive(Debug, Clone, Serialize)]
pub struct SampleCounts {
    pub attempted: usize,
    pub valid: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub samples: SampleCounts,
    /// Smallest signed margin over valid samples; positive means slack.
    pub worst_margin: Option<f64>,
    /// Sample seeds reproducing each failure.
    pub failures: Vec<u64>,
    pub tolerances: serde_json::Value,
    /// Number of individual comparisons evaluated (hinges, angles, ...).
    pub measurements: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `n` samples in parallel and folds them into a report. A sample
/// returns `None` when its configuration is unusable (skipped).
pub(crate) fn run_samples<F>(
    check: &str,
    params: serde_json::Value,
    tolerances: serde_json::Value,
    tolerance: f64,
    n: usize,
    seed: u64,
    f: F,
) -> CheckReport
where
    F: Fn(u64) -> Option<Sample> + Sync,
{
    let results: Vec<(u64, Option<Sample>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_seed(seed, i);
            (s, f(s))
        })
        .collect();
    let mut worst: Option<f64> = None;
    let mut failures = Vec::new();
    let mut valid = 0;
    let mut measurements = 0;
    for (s, r) in &results {
        if let Some(sample) = r {
            valid += 1;
            measurements += sample.measurements;
            worst = Some(worst.map_or(sample.margin, |w: f64| w.min(sample.margin)));
            if sample.margin < -tolerance || !sample.margin.is_finite() {
                failures.push(*s);
            }
        }
    }
    CheckReport {
        check: check.to_string(),
        params,
        seed,
        samples: SampleCounts {
            attempted: n,
            valid,
            skipped: n - valid,
        },
        worst_margin: worst,
        failures,
        tolerances,
        measurements,
    }
}

/// Reference surfaces used by the acceptance runs.
pub fn corpus() -> Vec<(String, PolyhedralSurface)> {
    let mut out = vec![
        (
            "regular_tetrahedron".to_string(),
            shapes::regular_tetrahedron(),
        ),
        ("cube".to_string(), shapes::unit_cube()),
        (
            "regular_icosahedron".to_string(),
            shapes::regular_icosahedron(),
        ),
        (
            "doubled_square".to_string(),
            shapes::doubled_rectangle(1.0, 1.0),
        ),
        (
            "doubled_hexagon".to_string(),
            shapes::doubled_regular_polygon(6, 1.0),
        ),
    ];
    for seed in 0..10 {
        out.push((format!("random_hull_{seed}"), shapes::random_hull(50, seed)));
    }
    out
}
