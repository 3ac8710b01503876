//! `analyze` and `verify`: sample a surface on a disc grid and report or check
//! curvature quantities point by point.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use immersion::estimates::{estimate_report, Connectivity, EstimateOptions, GridNode, SampleOptions};
use immersion::frames::{FrameDerivatives, FrameSource, DEFAULT_ANGLE_THRESHOLD, DEFAULT_NORM_THRESHOLD};
use immersion::geometry::{mean_curvature_from_laplacian, EPS_CONFORMAL};
use immersion::{builtin_surface, AnalyticSurface, EstimateReport, FrameKind, FrameRecipe, GridSample};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{csv_row, emit, to_json, Format};
use crate::Tool;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameChoice {
    /// Closed-form frame of a built-in surface.
    Canonical,
    /// Graph normals, Gram–Schmidt orthonormalized.
    Graph,
    /// Anchor vectors projected to the normal plane, orthonormalized.
    Projection,
    /// Projection followed by the thresholded orthonormalization.
    ProjectionOrthonormalized,
}

#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    /// Built-in surface name (see `catalogue`).
    #[arg(long)]
    pub surface: Option<String>,
    /// Sphere radius for `stereographic_sphere`.
    #[arg(long = "R")]
    pub sphere_radius: Option<f64>,
    /// Graph component, `phi=<expr>` or `psi=<expr>`; both are required.
    #[arg(long = "graph", value_name = "KEY=EXPR")]
    pub graph: Vec<String>,
    /// Odd number of lattice points per axis (at least 9).
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    /// Radius of the sampled parameter disc.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Normal frame; defaults to `canonical` for built-ins and `projection` for graphs.
    #[arg(long, value_enum)]
    pub frame: Option<FrameChoice>,
    /// Anchor axes for projection frames, 1-based (default 3,4).
    #[arg(long, value_delimiter = ',')]
    pub anchors: Option<Vec<usize>>,
    #[arg(long, default_value_t = DEFAULT_NORM_THRESHOLD)]
    pub tnorm: f64,
    #[arg(long, default_value_t = DEFAULT_ANGLE_THRESHOLD)]
    pub tangle: f64,
    /// Differentiate frames by central differences with this step instead of exactly.
    #[arg(long)]
    pub frame_derivative_step: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Unit axis for the Osserman angle, comma separated (default e1).
    #[arg(long, value_delimiter = ',')]
    pub axis: Option<Vec<f64>>,
    /// Harnack probe radius factor in (0, 1/4].
    #[arg(long, default_value_t = 0.25)]
    pub nu: f64,
    /// Dijkstra neighborhood for the geodesic radius.
    #[arg(long, default_value = "16", value_parser = ["8", "16"])]
    pub connectivity: String,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Largest residual accepted by every check.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Serialize)]
pub struct FrameEcho {
    kind: FrameChoice,
    anchors: Option<Vec<usize>>,
    tnorm: f64,
    tangle: f64,
    derivative_step: Option<f64>,
}

#[derive(Serialize)]
pub struct RequestEcho {
    surface: String,
    parameters: BTreeMap<String, String>,
    grid: usize,
    radius: f64,
    frame: FrameEcho,
}

#[derive(Serialize)]
pub struct NormalRecord {
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "K")]
    k: f64,
    kappa1: f64,
    kappa2: f64,
}

#[derive(Serialize)]
pub struct Residuals {
    gauss: f64,
    weingarten: Option<f64>,
    mcs: Option<f64>,
}

#[derive(Serialize)]
pub struct PointRecord {
    u: f64,
    v: f64,
    position: Vec<f64>,
    #[serde(rename = "W")]
    w: f64,
    conformality_defect: f64,
    normals: Vec<NormalRecord>,
    residuals: Residuals,
}

#[derive(Serialize)]
struct AnalyzeDocument<'a> {
    tool: Tool,
    command: &'static str,
    request: &'a RequestEcho,
    center: PointRecord,
    points: Vec<PointRecord>,
    estimates: EstimateReport<f64>,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    worst: f64,
    at: Option<[f64; 2]>,
    points: usize,
    tol: f64,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    tool: Tool,
    command: &'static str,
    request: &'a RequestEcho,
    tol: f64,
    passed: bool,
    checks: Vec<Check>,
}

pub struct Sampled {
    pub echo: RequestEcho,
    pub grid: GridSample<f64>,
}

fn resolve_surface(args: &SurfaceArgs) -> Result<(AnalyticSurface, BTreeMap<String, String>), CliError> {
    let mut params = BTreeMap::new();
    if let Some(r) = args.sphere_radius {
        params.insert("R".to_string(), r.to_string());
    }
    for g in &args.graph {
        let (key, expr) = g
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--graph expects phi=<expr> or psi=<expr>, got '{g}'")))?;
        let key = key.trim();
        if key != "phi" && key != "psi" {
            return Err(CliError::Usage(format!("--graph key must be phi or psi, got '{key}'")));
        }
        if params.insert(key.to_string(), expr.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("--graph {key} given twice")));
        }
    }
    let name = match (&args.surface, args.graph.is_empty()) {
        (Some(s), true) => s.clone(),
        (Some(s), false) if s == "custom_graph" => s.clone(),
        (None, false) => "custom_graph".to_string(),
        (Some(_), false) => return Err(CliError::Usage("--graph and --surface are mutually exclusive".into())),
        (None, true) => return Err(CliError::Usage("one of --surface or --graph is required".into())),
    };
    Ok((builtin_surface(&name, &params)?, params))
}

fn frame_source(args: &SurfaceArgs, surface: &AnalyticSurface) -> Result<(FrameSource, FrameChoice), CliError> {
    let choice = args.frame.unwrap_or(if surface.has_oracle() { FrameChoice::Canonical } else { FrameChoice::Projection });
    let recipe = |kind| -> Result<FrameRecipe, CliError> {
        let mut r = FrameRecipe::new(kind).with_thresholds(args.tnorm, args.tangle)?;
        if let Some(a) = &args.anchors {
            r = r.with_axis_anchors(surface.dim(), a)?;
        }
        Ok(r)
    };
    let source = match choice {
        FrameChoice::Canonical => FrameSource::Canonical,
        FrameChoice::Graph => FrameSource::Recipe(recipe(FrameKind::GraphNormals)?),
        FrameChoice::Projection => FrameSource::Recipe(recipe(FrameKind::Projection)?),
        FrameChoice::ProjectionOrthonormalized => FrameSource::Recipe(recipe(FrameKind::ProjectionOrthonormalized)?),
    };
    Ok((source, choice))
}

pub fn sample(args: &SurfaceArgs) -> Result<Sampled, CliError> {
    if args.grid < 9 || args.grid % 2 == 0 {
        return Err(CliError::Usage(format!("--grid must be odd and at least 9, got {}", args.grid)));
    }
    if !(args.radius > 0.0 && args.radius.is_finite()) {
        return Err(CliError::Usage(format!("--radius must be positive, got {}", args.radius)));
    }
    let (surface, parameters) = resolve_surface(args)?;
    let (frame, kind) = frame_source(args, &surface)?;
    let derivatives = match args.frame_derivative_step {
        Some(h) if h > 0.0 && h.is_finite() => FrameDerivatives::FiniteDifference(h),
        Some(h) => return Err(CliError::Usage(format!("--frame-derivative-step must be positive, got {h}"))),
        None => FrameDerivatives::Exact,
    };
    let opts = SampleOptions { resolution: args.grid, radius: args.radius, frame, derivatives };
    let grid = GridSample::from_surface(&surface, &opts)?;
    let echo = RequestEcho {
        surface: surface.name().to_string(),
        parameters,
        grid: args.grid,
        radius: args.radius,
        frame: FrameEcho {
            kind,
            anchors: args.anchors.clone(),
            tnorm: args.tnorm,
            tangle: args.tangle,
            derivative_step: args.frame_derivative_step,
        },
    };
    Ok(Sampled { echo, grid })
}

fn defect(p: &GridNode<f64>) -> f64 {
    let (a, b) = p.report.conformality;
    a.max(b)
}

pub fn record(p: &GridNode<f64>) -> PointRecord {
    let r = &p.report;
    PointRecord {
        u: p.u,
        v: p.v,
        position: p.jet.x.clone(),
        w: r.first.w,
        conformality_defect: defect(p),
        normals: r.curvature.iter().map(|c| NormalRecord { h: c.h, k: c.k, kappa1: c.kappa1, kappa2: c.kappa2 }).collect(),
        residuals: Residuals { gauss: r.gauss_residual, weingarten: r.weingarten_residual, mcs: r.mcs_residual },
    }
}

pub const CSV_HEADER: &str =
    "u,v,x1,x2,x3,x4,W,conf_defect,H1,K1,kap11,kap12,H2,K2,kap21,kap22,res_gauss,res_weingarten,res_mcs\n";

fn points_csv(grid: &GridSample<f64>) -> String {
    let mut out = String::from(CSV_HEADER);
    for p in &grid.nodes {
        let r = &p.report;
        let mut cells: Vec<Option<f64>> = vec![Some(p.u), Some(p.v)];
        cells.extend(p.jet.x.iter().map(|&x| Some(x)));
        cells.push(Some(r.first.w));
        cells.push(Some(defect(p)));
        for c in &r.curvature {
            cells.extend([Some(c.h), Some(c.k), Some(c.kappa1), Some(c.kappa2)]);
        }
        cells.extend([Some(r.gauss_residual), r.weingarten_residual, r.mcs_residual]);
        out.push_str(&csv_row(&cells));
    }
    out
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let Sampled { echo, grid } = sample(&args.surface)?;
    let opts = EstimateOptions {
        axis: args.axis.clone(),
        nu: args.nu,
        connectivity: if args.connectivity == "8" { Connectivity::Eight } else { Connectivity::Sixteen },
    };
    let estimates = estimate_report(&grid, &opts)?;
    let center = grid.center().map(record).ok_or_else(|| CliError::Usage("the center is not a grid point".into()))?;
    let doc = AnalyzeDocument {
        tool: Tool::current(),
        command: "analyze",
        request: &echo,
        center,
        points: grid.nodes.iter().map(record).collect(),
        estimates,
    };
    emit(args.surface.format, args.surface.output.as_deref(), &to_json(&doc)?, &points_csv(&grid))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

struct Worst {
    value: f64,
    at: Option<[f64; 2]>,
    points: usize,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, at: None, points: 0 }
    }

    fn see(&mut self, value: f64, p: &GridNode<f64>) {
        self.points += 1;
        if value > self.value || value.is_nan() || self.at.is_none() {
            self.value = if value.is_nan() { f64::INFINITY } else { value.max(self.value) };
            self.at = Some([p.u, p.v]);
        }
    }
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if !(args.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be non-negative, got {}", args.tol)));
    }
    let Sampled { echo, grid } = sample(&args.surface)?;
    let mut gauss = Worst::new();
    let mut weingarten = Worst::new();
    let mut mcs = Worst::new();
    let mut identities = Worst::new();
    let mut laplacian = Worst::new();
    for p in &grid.nodes {
        let r = &p.report;
        gauss.see(r.gauss_residual, p);
        if let Some(w) = r.weingarten_residual {
            weingarten.see(w, p);
        }
        if let Some(m) = r.mcs_residual {
            mcs.see(m, p);
        }
        let id = r.curvature.iter().fold(0.0f64, |acc, c| {
            acc.max(rel(c.kappa1 * c.kappa1 + c.kappa2 * c.kappa2, 4.0 * c.h * c.h - 2.0 * c.k))
                .max(rel(0.5 * (c.kappa1 + c.kappa2), c.h))
                .max(rel(c.kappa1 * c.kappa2, c.k))
        });
        identities.see(id, p);
        if let Ok(h) = mean_curvature_from_laplacian(&p.jet, &p.frame, EPS_CONFORMAL) {
            let gap = r.curvature.iter().zip(&h).fold(0.0f64, |acc, (c, l)| acc.max(rel(c.h, *l)));
            laplacian.see(gap, p);
        }
    }
    let checks: Vec<Check> = [
        ("gauss_equation", gauss),
        ("weingarten_equation", weingarten),
        ("mean_curvature_system", mcs),
        ("curvature_identities", identities),
        ("laplacian_mean_curvature", laplacian),
    ]
    .into_iter()
    .map(|(name, w)| Check { name, worst: w.value, at: w.at, points: w.points, tol: args.tol, passed: w.value <= args.tol })
    .collect();
    for c in &checks {
        let at = c.at.map_or("no points".to_string(), |[u, v]| format!("worst at (u, v) = ({u}, {v})"));
        eprintln!("{:<26} {} {:.3e} over {} points, {at}", c.name, if c.passed { "pass" } else { "FAIL" }, c.worst, c.points);
    }
    let passed = checks.iter().all(|c| c.passed);
    let doc = VerifyDocument { tool: Tool::current(), command: "verify", request: &echo, tol: args.tol, passed, checks };
    emit(args.surface.format, args.surface.output.as_deref(), &to_json(&doc)?, &points_csv(&grid))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("verification failed at tolerance {:e}", args.tol)))
    }
}
