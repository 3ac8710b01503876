//! `solve`: the prescribed mean curvature system on the unit disc.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use immersion::frames::DEFAULT_ANGLE_THRESHOLD;
use immersion::solver::{mean_curvature_iterate, BoundaryData, PeriodicSpline, SOLVER_NORM_THRESHOLD};
use immersion::{DiscGrid, FrameKind, FrameRecipe, Prescription, SolveReport, SolverConfig};
use serde::Serialize;

use crate::analysis::FrameChoice;
use crate::error::CliError;
use crate::output::{csv_row, emit, to_json, Format};
use crate::Tool;

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// `zero` or `const:a,b,c,d` for a constant vector H̄.
    #[arg(long, default_value = "zero")]
    pub hbar: String,
    /// Bound h0 to compare with 2 sup |H̄| on the solution.
    #[arg(long)]
    pub h0: Option<f64>,
    /// `holomorphic_graph` or `affine:a,b,c,d,e,f` (x3 = a u + b v + c, x4 = d u + e v + f).
    #[arg(long, default_value = "holomorphic_graph", conflicts_with = "boundary_file")]
    pub boundary: String,
    /// Knot file with lines `theta x1 x2 x3 x4`, interpolated by a periodic cubic spline.
    #[arg(long)]
    pub boundary_file: Option<PathBuf>,
    /// Lattice spacing, a decimal or a fraction such as 1/64.
    #[arg(long, default_value = "1/32")]
    pub grid_h: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 0.8)]
    pub damping: f64,
    /// Relative stopping tolerance of each linear solve.
    #[arg(long, default_value_t = 1e-14)]
    pub linear_tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_sweeps: usize,
    /// Frame used to assemble the right-hand side.
    #[arg(long, value_enum, default_value_t = FrameChoice::ProjectionOrthonormalized)]
    pub frame: FrameChoice,
    /// Anchor axes, 1-based (default 3,4).
    #[arg(long, value_delimiter = ',')]
    pub anchors: Option<Vec<usize>>,
    #[arg(long, default_value_t = SOLVER_NORM_THRESHOLD)]
    pub tnorm: f64,
    #[arg(long, default_value_t = DEFAULT_ANGLE_THRESHOLD)]
    pub tangle: f64,
    /// Report path (JSON) or field dump path (CSV: u,v,x1..x4).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Serialize)]
struct SolveEcho {
    hbar: String,
    h0: Option<f64>,
    boundary: String,
    grid_h: f64,
    tol: f64,
    max_outer: usize,
    damping: f64,
    linear_tol: f64,
    max_sweeps: usize,
    frame: FrameChoice,
    anchors: Option<Vec<usize>>,
    tnorm: f64,
    tangle: f64,
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    tool: Tool,
    command: &'static str,
    request: &'a SolveEcho,
    solve: SolveReport,
}

pub fn parse_spacing(text: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("--grid-h expects a number or a fraction like 1/64, got '{text}'"));
    let h = match text.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?);
            a / b
        }
        None => text.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if h.is_finite() {
        Ok(h)
    } else {
        Err(bad())
    }
}

fn boundary(args: &SolveArgs) -> Result<(BoundaryData, String), CliError> {
    if let Some(path) = &args.boundary_file {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok((BoundaryData::Spline(PeriodicSpline::parse(&text)?), format!("file:{}", path.display())));
    }
    let (name, params) = match args.boundary.split_once(':') {
        Some((n, p)) => {
            let nums = p
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("bad boundary parameters in '{}'", args.boundary)))?;
            (n, nums)
        }
        None => (args.boundary.as_str(), Vec::new()),
    };
    Ok((BoundaryData::named(name, &params)?, args.boundary.clone()))
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let h = parse_spacing(&args.grid_h)?;
    let grid = DiscGrid::new(h)?;
    let mut prescription = Prescription::parse(&args.hbar)?;
    prescription.h0 = args.h0;
    let (data, boundary_name) = boundary(args)?;
    let kind = match args.frame {
        FrameChoice::Projection => FrameKind::Projection,
        FrameChoice::ProjectionOrthonormalized => FrameKind::ProjectionOrthonormalized,
        FrameChoice::Graph => FrameKind::GraphNormals,
        FrameChoice::Canonical => return Err(CliError::Usage("solve has no canonical frame; use a projection frame".into())),
    };
    let mut frame = FrameRecipe::new(kind).with_thresholds(args.tnorm, args.tangle)?;
    if let Some(a) = &args.anchors {
        frame = frame.with_axis_anchors(4, a)?;
    }
    let mut config = SolverConfig { tol: args.tol, max_outer: args.max_outer, damping: args.damping, frame, ..Default::default() };
    config.linear.tol = args.linear_tol;
    config.linear.max_sweeps = args.max_sweeps;

    let out = mean_curvature_iterate::<f64>(&grid, &prescription, &|t| data.eval(t), &config)?;
    let echo = SolveEcho {
        hbar: args.hbar.clone(),
        h0: args.h0,
        boundary: boundary_name,
        grid_h: h,
        tol: args.tol,
        max_outer: args.max_outer,
        damping: args.damping,
        linear_tol: args.linear_tol,
        max_sweeps: args.max_sweeps,
        frame: args.frame,
        anchors: args.anchors.clone(),
        tnorm: args.tnorm,
        tangle: args.tangle,
    };
    let converged = out.report.converged;
    let summary = format!(
        "{:?} after {} outer iterations, update {:.3e}, residual {:.3e}",
        out.report.status, out.report.outer_iterations, out.report.final_update, out.report.residual
    );
    let mut csv = String::from("u,v,x1,x2,x3,x4\n");
    for (p, x) in grid.nodes.iter().zip(&out.field) {
        csv.push_str(&csv_row(&[Some(p.u), Some(p.v), Some(x[0]), Some(x[1]), Some(x[2]), Some(x[3])]));
    }
    let doc = SolveDocument { tool: Tool::current(), command: "solve", request: &echo, solve: out.report };
    emit(args.format, args.output.as_deref(), &to_json(&doc)?, &csv)?;
    eprintln!("{summary}");
    if converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!("not converged: {summary}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_accepts_fractions_and_decimals() {
        assert_eq!(parse_spacing("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_spacing(" 0.125 ").unwrap(), 0.125);
        assert!(parse_spacing("1/0").is_err());
        assert!(parse_spacing("h").is_err());
    }
}
