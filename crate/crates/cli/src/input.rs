use crate::{GeodesicArgs, SurfaceArgs};
use anyhow::{anyhow, bail, Context, Result};
use geodeck_core::isosceles::{is_isosceles_surface, IsoscelesSpec};
use geodeck_core::{load_off, PolyhedralSurface, SurfacePoint, TangentDirection, Vec2};

pub fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

pub fn triple(s: &str) -> Result<[f64; 3]> {
    let v = floats(s)?;
    <[f64; 3]>::try_from(v)
        .map_err(|_| anyhow!("expected three comma-separated numbers, got {s:?}"))
}

pub fn pair(s: &str) -> Result<(f64, f64)> {
    match floats(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => bail!("expected two comma-separated numbers, got {s:?}"),
    }
}

pub fn lattice_index(s: &str) -> Result<(i64, i64)> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [m, n] => Ok((m.trim().parse()?, n.trim().parse()?)),
        _ => bail!("expected m,n, got {s:?}"),
    }
}

/// A loaded surface, with its isosceles description when built from sides.
pub struct Loaded {
    pub surface: PolyhedralSurface,
    pub spec: Option<IsoscelesSpec>,
    pub name: String,
}

impl Loaded {
    pub fn is_isosceles(&self) -> bool {
        self.spec.is_some() || is_isosceles_surface(&self.surface)
    }
}

pub fn load(args: &SurfaceArgs) -> Result<Loaded> {
    match (&args.mesh, &args.sides) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let surface = load_off(&text).with_context(|| format!("loading {}", path.display()))?;
            Ok(Loaded {
                surface,
                spec: None,
                name: path.display().to_string(),
            })
        }
        (None, Some(sides)) => {
            let [a, b, c] = triple(sides)?;
            let spec = IsoscelesSpec::new(a, b, c)?;
            Ok(Loaded {
                surface: spec.surface()?,
                spec: Some(spec),
                name: format!("isosceles({a},{b},{c})"),
            })
        }
        _ => bail!("give either a mesh file or --sides a,b,c"),
    }
}

/// `v:I` for a vertex or `f:F:b0,b1,b2` for barycentric coordinates.
pub fn point(s: &PolyhedralSurface, text: &str) -> Result<SurfacePoint> {
    let mesh = s.mesh();
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    match parts.as_slice() {
        ["v", i] => Ok(SurfacePoint::vertex(mesh, i.trim().parse()?)?),
        ["f", f, bary] => Ok(SurfacePoint::new(mesh, f.trim().parse()?, triple(bary)?)?),
        _ => bail!("point must be v:I or f:F:b0,b1,b2, got {text:?}"),
    }
}

pub fn direction(g: &GeodesicArgs, face: usize) -> Result<TangentDirection> {
    match (&g.dir, g.angle) {
        (Some(d), None) => {
            let (x, y) = pair(d)?;
            Ok(TangentDirection::new(face, Vec2::new(x, y))?)
        }
        (None, Some(a)) => Ok(TangentDirection::from_angle(face, a)),
        _ => bail!("give either --dir x,y or --angle"),
    }
}

/// Polygon corners `x,y;x,y;...`.
pub fn polygon(text: &str) -> Result<Vec<Vec2>> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| pair(t).map(|(x, y)| Vec2::new(x, y)))
        .collect()
}
