mod commands;
mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "geodeck",
    version,
    about = "Geodesics and curvature on convex polyhedral surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Override angle tolerances (comparison, supplementary, first variation).
    #[arg(long, global = true, value_parser = positive)]
    pub tol_angle: Option<f64>,
    /// Override length tolerances (area comparison, retrace closure).
    #[arg(long, global = true, value_parser = positive)]
    pub tol_length: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per check.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Shortest-path search depth limit.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Length budget or target length.
    #[arg(long, global = true, value_parser = positive)]
    pub max_length: Option<f64>,
    /// Start points and directions per sweep in `search`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_parser = positive)]
    pub epsilon: Option<f64>,
    /// Output file (OFF outputs use it as a prefix).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Off,
    Tsv,
}

/// Where a surface comes from: an OFF file or isosceles side lengths.
#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    /// OFF mesh file.
    pub mesh: Option<PathBuf>,
    /// Isosceles tetrahedron face sides `a,b,c`.
    #[arg(long, conflicts_with = "mesh")]
    pub sides: Option<String>,
}

/// How a closed geodesic is chosen.
#[derive(Args, Debug, Clone)]
pub struct GeodesicArgs {
    /// Lattice class `m,n` on an isosceles tetrahedron.
    #[arg(long, allow_hyphen_values = true)]
    pub index: Option<String>,
    /// Strip fraction of the lattice line, in (0, 1).
    #[arg(long)]
    pub offset: Option<f64>,
    /// Start point `v:I` or `f:F:b0,b1,b2` for a traced geodesic.
    #[arg(long)]
    pub from: Option<String>,
    /// Direction `x,y` in the start face frame.
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    /// Direction angle in radians in the start face frame.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Vertex angle defects and their total.
    Curvature(SurfaceArgs),
    /// Traces a geodesic from a point in a direction.
    Trace {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        geodesic: GeodesicArgs,
        /// Stop when the geodesic closes up.
        #[arg(long)]
        closure: bool,
    },
    /// Intrinsic distance and a shortest path between two points.
    Distance {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Cuts a surface along a closed geodesic into two discs.
    Cut {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        geodesic: GeodesicArgs,
    },
    /// Closed-geodesic spectrum of an isosceles tetrahedron.
    Enumerate(SurfaceArgs),
    /// Traces the closed geodesic of a lattice class.
    Realize {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        geodesic: GeodesicArgs,
    },
    /// Recovers the face triangle of a surface with four cone points of angle π.
    Reconstruct(SurfaceArgs),
    /// Samples the comparison properties.
    Verify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        comparison: bool,
        #[arg(long)]
        supplementary: bool,
        #[arg(long)]
        first_variation: bool,
        #[arg(long)]
        area: bool,
        #[arg(long)]
        all: bool,
    },
    /// Lune construction on both discs cut by a closed geodesic.
    Lune {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        geodesic: GeodesicArgs,
    },
    /// Looks for a long simple closed geodesic.
    Search(SurfaceArgs),
    /// Doubles a convex polygon into a closed surface.
    Double {
        /// Counterclockwise corners `x,y;x,y;...`.
        #[arg(long, allow_hyphen_values = true)]
        points: String,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("GEODECK_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("GEODECK_THREADS must be a non-negative integer"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failures) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
