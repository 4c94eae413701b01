use crate::input::{self, lattice_index, Loaded};
use crate::output::{format_f64, to_json, write_text};
use crate::{Cli, Command, Format, GeodesicArgs, Options, SurfaceArgs};
use anyhow::{anyhow, bail, Result};
use geodeck_core::development::trace;
use geodeck_core::harness::{self, CheckKind};
use geodeck_core::isosceles::{enumerate_reaching_on, realize_on, reconstruct_from_flat_surface};
use geodeck_core::regions::cut_along_closed_geodesic;
use geodeck_core::shortest_path::{distance_query, DEFAULT_DEPTH};
use geodeck_core::{DiscSurface, GeodesicPath, LatticeGeodesicIndex, PolyhedralSurface};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::PathBuf;

pub enum Outcome {
    Success,
    Failures,
}

const DEFAULT_SAMPLES: usize = 200;
const DEFAULT_GRID: usize = 16;
const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_RETRACE_TOLERANCE: f64 = 1e-8;
const TIE_WINDOW: f64 = 1e-6;

pub fn run(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    match &cli.command {
        Command::Curvature(s) => curvature(&input::load(s)?, o),
        Command::Trace {
            surface,
            geodesic,
            closure,
        } => trace_cmd(&input::load(surface)?, geodesic, *closure, o),
        Command::Distance { surface, from, to } => distance(&input::load(surface)?, from, to, o),
        Command::Cut { surface, geodesic } => cut(&input::load(surface)?, geodesic, o),
        Command::Enumerate(s) => enumerate(&input::load(s)?, o),
        Command::Realize { surface, geodesic } => realize(&input::load(surface)?, geodesic, o),
        Command::Reconstruct(s) => reconstruct(&input::load(s)?, o),
        Command::Verify {
            surface,
            comparison,
            supplementary,
            first_variation,
            area,
            all,
        } => {
            let mut kinds = Vec::new();
            for (on, k) in [
                (*comparison, CheckKind::Comparison),
                (*supplementary, CheckKind::Supplementary),
                (*first_variation, CheckKind::FirstVariation),
                (*area, CheckKind::AreaComparison),
            ] {
                if on || *all {
                    kinds.push(k);
                }
            }
            if kinds.is_empty() {
                kinds = CheckKind::ALL.to_vec();
            }
            verify(surface, &kinds, o)
        }
        Command::Lune { surface, geodesic } => lune(&input::load(surface)?, geodesic, o),
        Command::Search(s) => search(&input::load(s)?, o),
        Command::Double { points } => double(points, o),
    }
}

fn format(o: &Options, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = o.format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("format {f:?} is not available for this command");
    }
    Ok(f)
}

fn emit(value: &Value, o: &Options) -> Result<()> {
    write_text(&to_json(value)?, o.out.as_deref())
}

fn curvature(l: &Loaded, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let r = l.surface.curvature_report();
    emit(
        &json!({
            "mesh": l.name,
            "vertices": l.surface.num_vertices(),
            "faces": l.surface.num_faces(),
            "defects": r.defects,
            "total": r.total,
            "gauss_bonnet_error": r.total - 4.0 * PI,
            "singular_vertices": r.singular_vertices,
        }),
        o,
    )?;
    Ok(Outcome::Success)
}

fn path_json(s: &PolyhedralSurface, p: &GeodesicPath) -> Value {
    let m = s.mesh();
    json!({
        "length": p.total_length,
        "closed": p.closed,
        "segment_count": p.segments.len(),
        "simple": p.is_simple(m, 1e-9),
        "start": p.start_point(),
        "start_direction": p.start_direction(m),
        "end": p.end_point(),
        "segments": p.segments,
    })
}

fn trace_cmd(l: &Loaded, g: &GeodesicArgs, closure: bool, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let from = g
        .from
        .as_deref()
        .ok_or_else(|| anyhow!("--from is required"))?;
    let start = input::point(&l.surface, from)?;
    let dir = input::direction(g, start.face)?;
    let budget = o
        .max_length
        .ok_or_else(|| anyhow!("--max-length is required"))?;
    let t = trace(l.surface.mesh(), start, dir, budget, closure)?;
    emit(
        &json!({
            "mesh": l.name,
            "budget": budget,
            "end_direction": t.end_direction,
            "path": path_json(&l.surface, &t.path),
        }),
        o,
    )?;
    Ok(Outcome::Success)
}

fn distance(l: &Loaded, from: &str, to: &str, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let a = input::point(&l.surface, from)?;
    let b = input::point(&l.surface, to)?;
    let depth = o.depth.unwrap_or(DEFAULT_DEPTH);
    let d = distance_query(l.surface.mesh(), &a, &b, depth, TIE_WINDOW)?;
    emit(
        &json!({
            "mesh": l.name,
            "from": a,
            "to": b,
            "depth": depth,
            "length": d.length,
            "runner_up": d.runner_up,
            "path": path_json(&l.surface, &d.path),
        }),
        o,
    )?;
    Ok(Outcome::Success)
}

struct Closed {
    path: GeodesicPath,
    lattice: Option<(i64, i64)>,
}

/// Picks a closed geodesic from a lattice class, a traced start, or the
/// first class of an isosceles spectrum reaching `--max-length`.
fn closed_geodesic(l: &Loaded, g: &GeodesicArgs, o: &Options) -> Result<Closed> {
    let lattice = |m: i64, n: i64| -> Result<Closed> {
        if !l.is_isosceles() {
            bail!("lattice classes need an isosceles tetrahedron");
        }
        let idx = match g.offset {
            Some(off) => LatticeGeodesicIndex::with_offset(m, n, off)?,
            None => LatticeGeodesicIndex::new(m, n)?,
        };
        Ok(Closed {
            path: realize_on(&l.surface, &idx)?,
            lattice: Some((m, n)),
        })
    };
    if let Some(idx) = &g.index {
        let (m, n) = lattice_index(idx)?;
        return lattice(m, n);
    }
    if let Some(from) = &g.from {
        let start = input::point(&l.surface, from)?;
        let dir = input::direction(g, start.face)?;
        let budget = o
            .max_length
            .ok_or_else(|| anyhow!("--max-length is required with --from"))?;
        let t = trace(l.surface.mesh(), start, dir, budget, true)?;
        if !t.path.closed {
            bail!("geodesic did not close within length {budget}");
        }
        let mut path = t.path;
        path.merge_closing_segments();
        return Ok(Closed {
            path,
            lattice: None,
        });
    }
    if let Some(target) = o.max_length {
        if l.is_isosceles() {
            let e = *enumerate_reaching_on(&l.surface, target)
                .last()
                .ok_or_else(|| anyhow!("empty spectrum"))?;
            return lattice(e.m, e.n);
        }
    }
    bail!("choose a closed geodesic with --index m,n, with --from and --dir, or with --max-length on an isosceles tetrahedron")
}

fn disc_json(id: &str, d: &DiscSurface) -> Value {
    json!({
        "id": id,
        "area": d.area(),
        "curvature": d.curvature(),
        "singular_parent_vertices": d.singular_parent_vertices(),
        "vertices": d.mesh.num_vertices(),
        "faces": d.mesh.num_faces(),
        "boundary_vertices": d.boundary.len(),
    })
}

fn off_path(prefix: &Option<PathBuf>, suffix: &str) -> Result<PathBuf> {
    let p = prefix
        .as_ref()
        .ok_or_else(|| anyhow!("--out is required for OFF output"))?;
    let mut s = p.clone().into_os_string();
    s.push(suffix);
    Ok(PathBuf::from(s))
}

fn cut(l: &Loaded, g: &GeodesicArgs, o: &Options) -> Result<Outcome> {
    let f = format(o, Format::Json, &[Format::Json, Format::Off])?;
    let c = closed_geodesic(l, g, o)?;
    let (a, b) = cut_along_closed_geodesic(&l.surface, &c.path)?;
    let summary = json!({
        "mesh": l.name,
        "lattice": c.lattice,
        "geodesic_length": c.path.total_length,
        "parent_area": l.surface.area(),
        "discs": [disc_json("a", &a), disc_json("b", &b)],
    });
    if f == Format::Off {
        for (id, d) in [("a", &a), ("b", &b)] {
            write_text(&d.to_off(), Some(&off_path(&o.out, &format!(".{id}.off"))?))?;
            write_text(
                &to_json(&d.sidecar_json())?,
                Some(&off_path(&o.out, &format!(".{id}.json"))?),
            )?;
        }
        write_text(&to_json(&summary)?, None)?;
    } else {
        emit(&summary, o)?;
    }
    Ok(Outcome::Success)
}

fn enumerate(l: &Loaded, o: &Options) -> Result<Outcome> {
    let f = format(o, Format::Json, &[Format::Json, Format::Tsv])?;
    if !l.is_isosceles() {
        bail!("enumerate needs an isosceles tetrahedron");
    }
    let target = o
        .max_length
        .ok_or_else(|| anyhow!("--max-length is required"))?;
    let spectrum = enumerate_reaching_on(&l.surface, target);
    if f == Format::Tsv {
        let mut text = String::from("m\tn\tlength\n");
        for e in &spectrum {
            text += &format!("{}\t{}\t{}\n", e.m, e.n, format_f64(e.length));
        }
        write_text(&text, o.out.as_deref())?;
    } else {
        emit(
            &json!({
                "mesh": l.name,
                "sides": l.spec.map(|s| s.sides()),
                "max_length": target,
                "count": spectrum.len(),
                "spectrum": spectrum,
            }),
            o,
        )?;
    }
    Ok(Outcome::Success)
}

fn realize(l: &Loaded, g: &GeodesicArgs, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let c = closed_geodesic(l, g, o)?;
    let m = l.surface.mesh();
    let gap = c.path.retrace_gap(m)?;
    let tol = o.tol_length.unwrap_or(DEFAULT_RETRACE_TOLERANCE);
    let simple = c.path.is_simple(m, 1e-9);
    emit(
        &json!({
            "mesh": l.name,
            "lattice": c.lattice,
            "retrace_gap": gap,
            "retrace_tolerance": tol,
            "path": path_json(&l.surface, &c.path),
        }),
        o,
    )?;
    Ok(if gap <= tol && simple && c.path.closed {
        Outcome::Success
    } else {
        Outcome::Failures
    })
}

fn reconstruct(l: &Loaded, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let r = reconstruct_from_flat_surface(&l.surface)?;
    emit(&json!({ "mesh": l.name, "reconstruction": r }), o)?;
    Ok(Outcome::Success)
}

fn verify(s: &SurfaceArgs, kinds: &[CheckKind], o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let l = input::load(s)?;
    let n = o.samples.unwrap_or(DEFAULT_SAMPLES);
    let reports: Vec<_> = kinds
        .iter()
        .map(|&k| {
            let tol = match k {
                CheckKind::AreaComparison => o.tol_length,
                _ => o.tol_angle,
            }
            .unwrap_or(k.default_tolerance());
            harness::run_check(k, &l.surface, n, o.seed, tol)
        })
        .collect();
    let passed = reports.iter().all(|r| r.passed());
    emit(
        &json!({ "mesh": l.name, "seed": o.seed, "passed": passed, "checks": reports }),
        o,
    )?;
    Ok(if passed {
        Outcome::Success
    } else {
        Outcome::Failures
    })
}

fn lune(l: &Loaded, g: &GeodesicArgs, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let c = closed_geodesic(l, g, o)?;
    let (a, b) = cut_along_closed_geodesic(&l.surface, &c.path)?;
    let eps = o.epsilon.unwrap_or(DEFAULT_EPSILON);
    let area = l.surface.area();
    let mut reports = Vec::new();
    for (id, d) in [("a", &a), ("b", &b)] {
        let mut r = harness::lune_experiment(d, area, eps)?;
        r.disc_id = id.to_string();
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.flags.lune_bound);
    emit(
        &json!({
            "mesh": l.name,
            "lattice": c.lattice,
            "geodesic_length": c.path.total_length,
            "surface_area": area,
            "reports": reports,
        }),
        o,
    )?;
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::Failures
    })
}

fn search(l: &Loaded, o: &Options) -> Result<Outcome> {
    format(o, Format::Json, &[Format::Json])?;
    let target = o
        .max_length
        .ok_or_else(|| anyhow!("--max-length is required"))?;
    let grid = o.grid.unwrap_or(DEFAULT_GRID);
    if grid == 0 {
        bail!("--grid must be positive");
    }
    let r = harness::long_geodesic_search(&l.surface, target, grid, o.seed);
    emit(
        &json!({
            "mesh": l.name,
            "longest": r.longest(),
            "reached_target": r.reached_target(),
            "report": r,
        }),
        o,
    )?;
    Ok(Outcome::Success)
}

fn double(points: &str, o: &Options) -> Result<Outcome> {
    let f = format(o, Format::Off, &[Format::Off, Format::Json])?;
    let poly = input::polygon(points)?;
    let s = PolyhedralSurface::double_polygon(&poly)?;
    if f == Format::Off {
        write_text(&s.to_off(), o.out.as_deref())?;
    } else {
        let r = s.curvature_report();
        emit(
            &json!({
                "corners": poly.len(),
                "vertices": s.num_vertices(),
                "faces": s.num_faces(),
                "area": s.area(),
                "defects": r.defects,
                "total": r.total,
            }),
            o,
        )?;
    }
    Ok(Outcome::Success)
}
