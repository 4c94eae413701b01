use geodeck_core::shapes;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn geodeck(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_geodeck"));
    c.args(args);
    if let Some(t) = threads {
        c.env("GEODECK_THREADS", t);
    }
    c.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_mesh(dir: &Path, name: &str, off: String) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, off).unwrap();
    p
}

#[test]
fn curvature_of_tetrahedron() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_mesh(
        dir.path(),
        "tet.off",
        shapes::regular_tetrahedron().to_off(),
    );
    let out = geodeck(&["curvature", p.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for d in v["defects"].as_array().unwrap() {
        assert!((d.as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-9);
    }
    assert!((v["total"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn enumerate_reaches_max_length() {
    let out = geodeck(
        &["enumerate", "--sides", "0.9,1.0,1.1", "--max-length", "100"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let spectrum = v["spectrum"].as_array().unwrap();
    assert!(spectrum.last().unwrap()["length"].as_f64().unwrap() >= 100.0);

    let tsv = geodeck(
        &[
            "enumerate",
            "--sides",
            "0.9,1.0,1.1",
            "--max-length",
            "10",
            "--format",
            "tsv",
        ],
        None,
    );
    let text = String::from_utf8(tsv.stdout).unwrap();
    assert!(text.starts_with("m\tn\tlength\n"));
}

#[test]
fn verify_rejects_dented_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_mesh(
        dir.path(),
        "dented.off",
        shapes::dented_octahedron().to_off(),
    );
    let out = geodeck(
        &[
            "verify",
            "--all",
            p.to_str().unwrap(),
            "--samples",
            "1000",
            "--seed",
            "7",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_mesh(dir.path(), "cube.off", shapes::unit_cube().to_off());
    let args = [
        "verify",
        "--all",
        p.to_str().unwrap(),
        "--samples",
        "40",
        "--seed",
        "3",
    ];
    let a = geodeck(&args, Some("1"));
    let b = geodeck(&args, Some("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn impossible_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_mesh(
        dir.path(),
        "tet.off",
        shapes::regular_tetrahedron().to_off(),
    );
    // Supplementary angles deviate from π by rounding; a tolerance far
    // below rounding level must report failures.
    let out = geodeck(
        &[
            "verify",
            "--supplementary",
            p.to_str().unwrap(),
            "--samples",
            "50",
            "--tol-angle",
            "1e-300",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn cut_writes_off_discs() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("discs");
    let out = geodeck(
        &[
            "cut",
            "--sides",
            "1,1,1",
            "--index",
            "1,0",
            "--format",
            "off",
            "--out",
            prefix.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    for d in v["discs"].as_array().unwrap() {
        assert!((d["curvature"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }
    for id in ["a", "b"] {
        let text = std::fs::read_to_string(dir.path().join(format!("discs.{id}.off"))).unwrap();
        assert!(text.starts_with("OFF"));
        assert!(dir.path().join(format!("discs.{id}.json")).exists());
    }
}

#[test]
fn realize_distance_and_trace() {
    let r = geodeck(
        &["realize", "--sides", "0.9,1.0,1.1", "--index", "2,-1"],
        None,
    );
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    let v = json(&r);
    assert!(v["path"]["closed"].as_bool().unwrap());
    assert!(v["retrace_gap"].as_f64().unwrap() < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let p = write_mesh(dir.path(), "cube.off", shapes::unit_cube().to_off());
    let cube = shapes::unit_cube();
    let far = (0..8)
        .max_by(|&a, &b| {
            let d = |v: usize| (cube.mesh().vertex(v) - cube.mesh().vertex(0)).norm();
            d(a).total_cmp(&d(b))
        })
        .unwrap();
    let d = geodeck(
        &[
            "distance",
            p.to_str().unwrap(),
            "--from",
            "v:0",
            "--to",
            &format!("v:{far}"),
        ],
        None,
    );
    let v = json(&d);
    assert!((v["length"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);

    let t = geodeck(
        &[
            "trace",
            p.to_str().unwrap(),
            "--from",
            "f:0:0.2,0.3,0.5",
            "--angle",
            "0.3",
            "--max-length",
            "3",
        ],
        None,
    );
    let v = json(&t);
    assert!((v["path"]["length"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn lune_search_double_reconstruct() {
    let l = geodeck(
        &[
            "lune",
            "--sides",
            "0.9,1.0,1.1",
            "--max-length",
            "50",
            "--epsilon",
            "0.1",
        ],
        None,
    );
    assert_eq!(
        l.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&l.stderr)
    );
    let v = json(&l);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["flags"]["asterism"], Value::Bool(true));
        assert_eq!(r["flags"]["lune_bound"], Value::Bool(true));
    }

    let s = geodeck(
        &["search", "--sides", "0.9,1.0,1.1", "--max-length", "100"],
        None,
    );
    assert!(json(&s)["longest"].as_f64().unwrap() >= 100.0);

    let d = geodeck(&["double", "--points", "0,0;1,0;1,1;0,1"], None);
    assert_eq!(d.status.code(), Some(0));
    assert!(String::from_utf8(d.stdout).unwrap().starts_with("OFF"));

    let r = geodeck(&["reconstruct", "--sides", "0.9,1.0,1.1"], None);
    let v = json(&r);
    let mut sides: Vec<f64> = ["a", "b", "c"]
        .iter()
        .map(|k| v["reconstruction"]["spec"][k].as_f64().unwrap())
        .collect();
    sides.sort_by(f64::total_cmp);
    for (x, y) in sides.iter().zip([0.9, 1.0, 1.1]) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn bad_inputs_exit_two() {
    assert_eq!(
        geodeck(&["curvature", "/nonexistent.off"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        geodeck(
            &["enumerate", "--sides", "1,1,3", "--max-length", "5"],
            None
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        geodeck(&["curvature", "--tol-angle", "-1", "x.off"], None)
            .status
            .code(),
        Some(2)
    );
}
