//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.

use geodeck_core::harness::{
    self, check_area_comparison, check_comparison, check_first_variation, check_supplementary,
    corpus, random_point, rng_for,
};
use geodeck_core::isosceles::{
    build_isosceles, enumerate_closed_geodesics, enumerate_reaching, is_isosceles, realize_on,
    reconstruct_from_flat_surface, IsoscelesSpec,
};
use geodeck_core::regions::cut_along_closed_geodesic;
use geodeck_core::shortest_path::{brute_force_distance_oracle, intrinsic_distance, DEFAULT_DEPTH};
use geodeck_core::{shapes, LatticeGeodesicIndex, SurfacePoint};
use rand::Rng;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_acute(rng: &mut impl Rng) -> (f64, f64, f64) {
    loop {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.5..1.5),
        );
        if a * a + b * b > c * c * 1.01
            && b * b + c * c > a * a * 1.01
            && c * c + a * a > b * b * 1.01
        {
            return (a, b, c);
        }
    }
}

fn gauss_bonnet() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, s) in corpus() {
        let total = s.curvature_report().total;
        worst = worst.max((total - 4.0 * PI).abs() / (4.0 * PI));
    }
    outcome(
        worst <= 1e-9,
        format!("15 surfaces, max relative error {worst:.2e}"),
    )
}

fn isosceles_construction() -> Outcome {
    let mut rng = rng_for(2);
    let (mut mismatch, mut defect): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let (a, b, c) = random_acute(&mut rng);
        let (spec, s) = build_isosceles(a, b, c).expect("acute triple");
        mismatch = mismatch.max(is_isosceles(spec.vertices()).unwrap().1);
        for v in 0..4 {
            defect = defect.max((s.vertex_defect(v).unwrap() - PI).abs());
        }
    }
    outcome(
        mismatch < 1e-12 && defect <= 1e-9,
        format!("20 triples, opposite-edge mismatch {mismatch:.2e}, defect error {defect:.2e}"),
    )
}

fn long_geodesic() -> Outcome {
    let t0 = Instant::now();
    let spec = IsoscelesSpec::new(0.9, 1.0, 1.1).unwrap();
    let s = spec.surface().unwrap();
    let e = *enumerate_reaching(&spec, 100.0).unwrap().last().unwrap();
    let path = match realize_on(&s, &LatticeGeodesicIndex::new(e.m, e.n).unwrap()) {
        Ok(p) => p,
        Err(err) => {
            return outcome(
                false,
                format!("realization of ({}, {}) failed: {err}", e.m, e.n),
            )
        }
    };
    let gap = path.retrace_gap(s.mesh()).unwrap_or(f64::INFINITY);
    let simple = path.is_simple(s.mesh(), 1e-9);
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        path.total_length >= 100.0 && gap <= 1e-8 && simple && path.closed && secs < 30.0,
        format!(
            "class ({}, {}) length {:.6}, retrace gap {gap:.2e}, simple {simple}, {secs:.2}s",
            e.m, e.n, path.total_length
        ),
    )
}

fn closed_cuts() -> Outcome {
    let mut worst_curv: f64 = 0.0;
    let mut worst_area: f64 = 0.0;
    let mut done = 0;
    let mut errors = Vec::new();
    for (sides, picks) in [
        ((1.0, 1.0, 1.0), 2),
        ((0.9, 1.0, 1.1), 2),
        ((0.8, 1.0, 1.2), 1),
    ] {
        let spec = IsoscelesSpec::new(sides.0, sides.1, sides.2).unwrap();
        let s = spec.surface().unwrap();
        let spectrum = enumerate_closed_geodesics(&spec, 12.0).unwrap();
        let chosen = [0, spectrum.len() - 1];
        for &i in chosen.iter().take(picks) {
            let e = spectrum[i];
            let res = realize_on(&s, &LatticeGeodesicIndex::new(e.m, e.n).unwrap())
                .and_then(|p| cut_along_closed_geodesic(&s, &p));
            match res {
                Ok((a, b)) => {
                    done += 1;
                    for d in [&a, &b] {
                        worst_curv = worst_curv.max((d.curvature() - 2.0 * PI).abs());
                    }
                    worst_area =
                        worst_area.max(((a.area() + b.area()) - s.area()).abs() / s.area());
                }
                Err(err) => errors.push(format!("{sides:?} ({}, {}): {err}", e.m, e.n)),
            }
        }
    }
    outcome(
        done == 5 && worst_curv <= 1e-6 && worst_area <= 1e-9,
        format!("{done} cuts, disc curvature error {worst_curv:.2e}, area error {worst_area:.2e} {errors:?}"),
    )
}

fn comparison() -> Outcome {
    let (mut hinges, mut worst, mut failures) = (0, f64::INFINITY, 0);
    for (i, (_, s)) in corpus().iter().enumerate() {
        let r = check_comparison(s, 100, i as u64);
        hinges += r.measurements;
        worst = worst.min(r.worst_margin.unwrap_or(f64::INFINITY));
        failures += r.failures.len();
    }
    outcome(
        hinges >= 1000 && worst >= -1e-7 && failures == 0,
        format!("{hinges} hinges, worst margin {worst:.2e}, {failures} failures"),
    )
}

fn supplementary_and_first_variation() -> Outcome {
    let (mut sup_n, mut sup_worst, mut sup_fail) = (0, f64::INFINITY, 0);
    let (mut fv_attempted, mut fv_valid, mut fv_worst, mut fv_fail) = (0, 0, f64::INFINITY, 0);
    for (i, (_, s)) in corpus().iter().enumerate() {
        let r = check_supplementary(s, 40, 100 + i as u64);
        sup_n += r.samples.valid;
        sup_worst = sup_worst.min(r.worst_margin.unwrap_or(f64::INFINITY));
        sup_fail += r.failures.len();
        let r = check_first_variation(s, 40, 200 + i as u64);
        fv_attempted += r.samples.attempted;
        fv_valid += r.samples.valid;
        fv_worst = fv_worst.min(r.worst_margin.unwrap_or(f64::INFINITY));
        fv_fail += r.failures.len();
    }
    let smooth = fv_valid as f64 / fv_attempted as f64;
    outcome(
        sup_n >= 500
            && sup_worst >= -1e-6
            && sup_fail == 0
            && fv_attempted >= 500
            && fv_worst >= -1e-3
            && fv_fail == 0
            && smooth >= 0.8,
        format!(
            "supplementary {sup_n} samples, max deviation {:.2e}; first variation {fv_attempted} samples, {:.1}% smooth, max deviation {:.2e}",
            -sup_worst,
            100.0 * smooth,
            -fv_worst
        ),
    )
}

fn area_comparison() -> Outcome {
    let (mut n, mut worst, mut failures) = (0, f64::INFINITY, 0);
    for (i, (_, s)) in corpus().iter().enumerate() {
        let r = check_area_comparison(s, 20, 300 + i as u64);
        n += r.samples.valid;
        worst = worst.min(r.worst_margin.unwrap_or(f64::INFINITY));
        failures += r.failures.len();
    }
    outcome(
        n >= 200 && worst >= -1e-7 && failures == 0,
        format!("{n} triangles, worst relative margin {worst:.2e}, {failures} failures"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut meshes = 0;
    let mut errors = 0;
    for (i, (_, s)) in corpus().iter().enumerate() {
        if s.num_faces() > 20 {
            continue;
        }
        meshes += 1;
        let m = s.mesh();
        let mut rng = rng_for(400 + i as u64);
        for _ in 0..100 {
            let a = random_point(s, &mut rng);
            let b = random_point(s, &mut rng);
            match intrinsic_distance(m, &a, &b, DEFAULT_DEPTH) {
                Ok((d, _)) => {
                    worst = worst.max((d - brute_force_distance_oracle(m, &a, &b, 8)).abs())
                }
                Err(_) => errors += 1,
            }
        }
    }
    let cube = shapes::unit_cube();
    let m = cube.mesh();
    let far = (1..8)
        .max_by(|&a, &b| {
            let d = |v: usize| (m.vertex(v) - m.vertex(0)).norm();
            d(a).total_cmp(&d(b))
        })
        .unwrap();
    let d = intrinsic_distance(
        m,
        &SurfacePoint::vertex(m, 0).unwrap(),
        &SurfacePoint::vertex(m, far).unwrap(),
        DEFAULT_DEPTH,
    )
    .map(|x| x.0)
    .unwrap_or(f64::NAN);
    let cube_err = (d - 5f64.sqrt()).abs();
    outcome(
        worst <= 1e-9 && errors == 0 && cube_err <= 1e-9,
        format!("{meshes} meshes x 100 pairs, max difference {worst:.2e}, cube corners error {cube_err:.2e}"),
    )
}

fn lune_pipeline() -> Outcome {
    let spec = IsoscelesSpec::new(0.9, 1.0, 1.1).unwrap();
    let s = spec.surface().unwrap();
    let classes: Vec<_> = enumerate_closed_geodesics(&spec, 60.0)
        .unwrap()
        .into_iter()
        .filter(|e| e.length >= 50.0)
        .take(2)
        .collect();
    let mut discs = 0;
    let mut ok = !classes.is_empty();
    let mut worst_slack = f64::INFINITY;
    let mut notes = Vec::new();
    for e in classes {
        let res = realize_on(&s, &LatticeGeodesicIndex::new(e.m, e.n).unwrap())
            .and_then(|p| cut_along_closed_geodesic(&s, &p));
        let (a, b) = match res {
            Ok(x) => x,
            Err(err) => {
                ok = false;
                notes.push(format!("({}, {}): {err}", e.m, e.n));
                continue;
            }
        };
        for d in [&a, &b] {
            match harness::lune_experiment(d, s.area(), 0.1) {
                Ok(r) => {
                    discs += 1;
                    worst_slack = worst_slack.min(r.lune_curvature - (PI - r.model_angle_p));
                    ok &= r.lune_curvature >= PI - r.model_angle_p - 1e-6
                        && r.flags.asterism
                        && r.flags.xy_bound;
                }
                Err(err) => {
                    ok = false;
                    notes.push(format!("({}, {}): {err}", e.m, e.n));
                }
            }
        }
    }
    outcome(
        ok,
        format!("{discs} discs, worst lune slack {worst_slack:.3}, asterism and x-y bound checked {notes:?}"),
    )
}

fn reconstruction() -> Outcome {
    let mut rng = rng_for(10);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for _ in 0..10 {
        let (a, b, c) = random_acute(&mut rng);
        let (_, s) = build_isosceles(a, b, c).unwrap();
        match reconstruct_from_flat_surface(&s) {
            Ok(r) => {
                let mut got = r.spec.sides();
                let mut want = [a, b, c];
                got.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                for k in 0..3 {
                    worst = worst.max((got[k] - want[k]).abs());
                }
            }
            Err(err) => errors.push(format!("({a}, {b}, {c}): {err}")),
        }
    }
    outcome(
        worst <= 1e-8 && errors.is_empty(),
        format!("10 triples, max side error {worst:.2e} {errors:?}"),
    )
}

fn negative_control() -> Outcome {
    let s = shapes::corner_tetrahedron();
    let r = harness::long_geodesic_search(&s, 20.0, 64, 0);
    let longest = r.longest();
    outcome(
        longest <= 20.0,
        format!(
            "{} traces, {} closed simple found, longest {longest:.3}",
            r.traces, r.closed_simple
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("gauss_bonnet", gauss_bonnet),
        ("isosceles_construction", isosceles_construction),
        ("long_simple_closed_geodesic", long_geodesic),
        ("closed_geodesic_cuts", closed_cuts),
        ("comparison_property", comparison),
        (
            "supplementary_and_first_variation",
            supplementary_and_first_variation,
        ),
        ("area_comparison", area_comparison),
        ("shortest_path_oracle", oracle_equivalence),
        ("lune_pipeline", lune_pipeline),
        ("reconstruction_round_trip", reconstruction),
        ("negative_control", negative_control),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        // Written to the raw handle so the line shows without --nocapture.
        writeln!(
            std::io::stderr(),
            "{tag} {:>2} {name}: {} ({:.2}s)",
            i + 1,
            o.detail,
            t0.elapsed().as_secs_f64()
        )
        .unwrap();
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
