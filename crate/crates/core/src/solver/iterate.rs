//! Damped Picard iteration for the prescribed mean curvature system and the
//! from-scratch residual report of a computed field.

use serde::Serialize;

use crate::frames::FrameRecipe;
use crate::geometry::{conformality_defect, curvature_data, first_fundamental_form, second_fundamental_form, SurfaceJet};
use crate::linalg::{axpy, dot, norm};
use crate::scalar::Real;

use super::grid::{Arm, DiscGrid, EAST, NORTH, SOUTH, WEST};
use super::poisson::{apply_laplacian, poisson_solve};
use super::{Prescription, SolverConfig, SolverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// `max_outer` reached without meeting the tolerance.
    MaxIterations,
    /// The update grew in five consecutive outer iterations.
    Diverging,
    /// Residual evaluation of a given field; no iteration was run.
    Evaluated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalitySummary {
    /// Largest `max(|h11 - h22|, |h12|) / W` over interior nodes.
    pub max: f64,
    pub mean: f64,
    pub argmax: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterCurvature {
    pub position: [f64; 4],
    #[serde(rename = "W")]
    pub w: f64,
    pub conformality: [f64; 2],
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    /// `H̄(X(0))·N_Σ`.
    pub prescribed_h: Vec<f64>,
    /// `ΔX·N_Σ / (2W)`; agrees with `H` only in conformal parameters.
    pub laplacian_h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub status: SolveStatus,
    pub outer_iterations: usize,
    pub linear_sweeps: usize,
    pub final_update: f64,
    /// `max |Δ_h X - RHS(X)|` over interior nodes, recomputed on the returned field.
    pub residual: f64,
    pub residual_argmax: [f64; 2],
    pub tol: f64,
    pub spacing: f64,
    pub interior_nodes: usize,
    pub conformality: ConformalitySummary,
    pub center: CenterCurvature,
    /// `2 sup |H̄(X)|` over the field's range.
    pub hbar_bound: f64,
    /// Whether `hbar_bound <= h0` when `h0` was prescribed.
    pub h0_respected: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome<T> {
    pub report: SolveReport,
    /// Values at the interior nodes of the grid, in grid order.
    pub field: Vec<[T; 4]>,
}

fn arm_value<T: Real>(arm: &Arm, field: &[[T; 4]], boundary: &impl Fn(f64) -> [T; 4]) -> [T; 4] {
    match *arm {
        Arm::Node(q) => field[q],
        Arm::Boundary { theta, .. } => boundary(theta),
    }
}

/// First and second differences on three points `-b h, 0, a h`.
fn nonuniform<T: Real>(fm: T, f0: T, fp: T, a: f64, b: f64, h: f64) -> (T, T) {
    let (a_, b_, h_) = (T::lit(a), T::lit(b), T::lit(h));
    let d1 = (b_ * b_ * (fp - f0) + a_ * a_ * (f0 - fm)) / (a_ * b_ * (a_ + b_) * h_);
    let d2 = T::lit(2.0) * ((fp - f0) / a_ - (f0 - fm) / b_) / ((a_ + b_) * h_ * h_);
    (d1, d2)
}

fn first_u<T: Real>(grid: &DiscGrid, field: &[[T; 4]], boundary: &impl Fn(f64) -> [T; 4], k: usize) -> [T; 4] {
    let node = &grid.nodes[k];
    let (e, w) = (arm_value(&node.arms[EAST], field, boundary), arm_value(&node.arms[WEST], field, boundary));
    let (a, b) = (node.arms[EAST].fraction(), node.arms[WEST].fraction());
    std::array::from_fn(|c| nonuniform(w[c], field[k][c], e[c], a, b, grid.h).0)
}

/// Jet of the discrete field at interior node `k`: three-point differences
/// along each axis using boundary values where an arm ends on the circle;
/// the mixed derivative uses the four diagonal nodes when they are interior
/// and otherwise differences `X_u` in the `v` direction.
pub fn field_jet<T: Real>(
    grid: &DiscGrid,
    field: &[[T; 4]],
    boundary: &impl Fn(f64) -> [T; 4],
    k: usize,
) -> SurfaceJet<T> {
    let node = &grid.nodes[k];
    let x = field[k];
    let vals = node.arms.map(|arm| arm_value(&arm, field, boundary));
    let fr = node.arms.map(|arm| arm.fraction());
    let mut xu = vec![T::zero(); 4];
    let mut xv = vec![T::zero(); 4];
    let mut xuu = vec![T::zero(); 4];
    let mut xvv = vec![T::zero(); 4];
    for c in 0..4 {
        (xu[c], xuu[c]) = nonuniform(vals[WEST][c], x[c], vals[EAST][c], fr[EAST], fr[WEST], grid.h);
        (xv[c], xvv[c]) = nonuniform(vals[SOUTH][c], x[c], vals[NORTH][c], fr[NORTH], fr[SOUTH], grid.h);
    }
    let diag = [(1, 1), (-1, 1), (1, -1), (-1, -1)].map(|(di, dj)| grid.index(node.i + di, node.j + dj));
    let xuv: Vec<T> = if let [Some(ne), Some(nw), Some(se), Some(sw)] = diag {
        let q = T::lit(4.0 * grid.h * grid.h);
        (0..4).map(|c| (field[ne][c] - field[nw][c] - field[se][c] + field[sw][c]) / q).collect()
    } else {
        let here: [T; 4] = std::array::from_fn(|c| xu[c]);
        let along = |arm: &Arm| match *arm {
            Arm::Node(q) => first_u(grid, field, boundary, q),
            Arm::Boundary { .. } => here,
        };
        let (n, s) = (along(&node.arms[NORTH]), along(&node.arms[SOUTH]));
        (0..4).map(|c| nonuniform(s[c], here[c], n[c], fr[NORTH], fr[SOUTH], grid.h).0).collect()
    };
    SurfaceJet { x: x.to_vec(), xu, xv, xuu, xuv, xvv }
}

fn frame_failure(iteration: usize, grid: &DiscGrid, k: usize) -> impl Fn(crate::frames::FrameError) -> SolverError + '_ {
    move |source| SolverError::FrameFailure { iteration, u: grid.nodes[k].u, v: grid.nodes[k].v, source }
}

/// `2 Σ_Σ H(X, N_Σ) W N_Σ` at every interior node.
fn assemble_rhs<T: Real>(
    grid: &DiscGrid,
    field: &[[T; 4]],
    boundary: &impl Fn(f64) -> [T; 4],
    prescription: &Prescription,
    recipe: &FrameRecipe,
    iteration: usize,
) -> Result<Vec<[T; 4]>, SolverError> {
    if prescription.is_zero() {
        return Ok(vec![[T::zero(); 4]; grid.len()]);
    }
    (0..grid.len())
        .map(|k| {
            let jet = field_jet(grid, field, boundary, k);
            let fail = frame_failure(iteration, grid, k);
            let w = first_fundamental_form(&jet).map_err(|e| fail(e.into()))?.w;
            let frame = recipe.build(&jet).map_err(&fail)?;
            let mut out = vec![T::zero(); 4];
            for n in frame.vectors() {
                let hs = prescription.scalar(&field[k], n);
                axpy(T::lit(2.0) * hs * w, n, &mut out);
            }
            Ok([out[0], out[1], out[2], out[3]])
        })
        .collect()
}

fn residual<T: Real>(
    grid: &DiscGrid,
    field: &[[T; 4]],
    boundary: &impl Fn(f64) -> [T; 4],
    rhs: &[[T; 4]],
) -> (f64, [f64; 2]) {
    let lap = apply_laplacian(grid, field, boundary);
    let mut worst = (0.0, [0.0, 0.0]);
    for (k, (l, r)) in lap.iter().zip(rhs).enumerate() {
        let d: Vec<T> = (0..4).map(|c| l[c] - r[c]).collect();
        let v = norm(&d).to_f64_lossy();
        if v > worst.0 || v.is_nan() {
            worst = (v, [grid.nodes[k].u, grid.nodes[k].v]);
        }
    }
    worst
}

fn lift<T: Real>(boundary: &impl Fn(f64) -> [f64; 4]) -> impl Fn(f64) -> [T; 4] + '_ {
    move |theta| boundary(theta).map(T::lit)
}

fn sup_update<T: Real>(a: &[[T; 4]], b: &[[T; 4]]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (*x - *y).abs().to_f64_lossy())
        .fold(0.0, f64::max)
}

/// Recomputes jets, frames, `W`, `H` and the residual on `field` from scratch.
pub fn residual_report<T: Real>(
    grid: &DiscGrid,
    field: &[[T; 4]],
    prescription: &Prescription,
    boundary: &impl Fn(f64) -> [f64; 4],
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if field.len() != grid.len() {
        return Err(SolverError::FieldSize { expected: grid.len(), found: field.len() });
    }
    let bnd = lift::<T>(boundary);
    let rhs = assemble_rhs(grid, field, &bnd, prescription, &config.frame, 0)?;
    summarize(grid, field, &bnd, &rhs, prescription, config, SolveStatus::Evaluated, 0, 0, 0.0, 0)
}

#[allow(clippy::too_many_arguments)]
fn summarize<T: Real>(
    grid: &DiscGrid,
    field: &[[T; 4]],
    bnd: &impl Fn(f64) -> [T; 4],
    rhs: &[[T; 4]],
    prescription: &Prescription,
    config: &SolverConfig,
    status: SolveStatus,
    outer_iterations: usize,
    linear_sweeps: usize,
    final_update: f64,
    iteration: usize,
) -> Result<SolveReport, SolverError> {
    let (res, residual_argmax) = residual(grid, field, bnd, rhs);
    let mut conf = ConformalitySummary { max: 0.0, mean: 0.0, argmax: [0.0, 0.0] };
    let mut hbar_sup = 0.0f64;
    for k in 0..grid.len() {
        let jet = field_jet(grid, field, bnd, k);
        let form = first_fundamental_form(&jet).map_err(|e| frame_failure(iteration, grid, k)(e.into()))?;
        let (a, b) = conformality_defect(&form);
        let d = a.max(b).to_f64_lossy();
        conf.mean += d;
        if d > conf.max {
            conf.max = d;
            conf.argmax = [grid.nodes[k].u, grid.nodes[k].v];
        }
        let hb = prescription.hbar(&field[k]);
        hbar_sup = hbar_sup.max(norm(&hb).to_f64_lossy());
    }
    conf.mean /= grid.len() as f64;

    let c = grid.center();
    let jet = field_jet(grid, field, bnd, c);
    let fail = frame_failure(iteration, grid, c);
    let form = first_fundamental_form(&jet).map_err(|e| fail(e.into()))?;
    let frame = config.frame.build(&jet).map_err(&fail)?;
    let second = second_fundamental_form(&jet, &frame).map_err(|e| fail(e.into()))?;
    let curv = curvature_data(&second, &form);
    let lap = jet.laplacian();
    let f = |x: T| x.to_f64_lossy();
    let (ca, cb) = conformality_defect(&form);
    let center = CenterCurvature {
        position: field[c].map(f),
        w: f(form.w),
        conformality: [f(ca), f(cb)],
        h: curv.iter().map(|x| f(x.h)).collect(),
        k: curv.iter().map(|x| f(x.k)).collect(),
        kappa1: curv.iter().map(|x| f(x.kappa1)).collect(),
        kappa2: curv.iter().map(|x| f(x.kappa2)).collect(),
        prescribed_h: frame.vectors().iter().map(|n| f(prescription.scalar(&field[c], n))).collect(),
        laplacian_h: frame.vectors().iter().map(|n| f(dot(&lap, n) / (T::lit(2.0) * form.w))).collect(),
    };
    let hbar_bound = 2.0 * hbar_sup;
    Ok(SolveReport {
        converged: status == SolveStatus::Converged,
        status,
        outer_iterations,
        linear_sweeps,
        final_update,
        residual: res,
        residual_argmax,
        tol: config.tol,
        spacing: grid.h,
        interior_nodes: grid.len(),
        conformality: conf,
        center,
        hbar_bound,
        h0_respected: prescription.h0.map(|h0| hbar_bound <= h0),
    })
}

/// Damped fixed-point iteration `X ← (1 - θ) X + θ S(X)`, where `S(X)` solves
/// `Δ_h S = RHS(X)` with the given boundary curve. Starts from the harmonic
/// extension of the boundary data; for `H̄ ≡ 0` that extension is the answer
/// and exactly one linear solve is performed.
///
/// Convergence needs both `|X^{k+1} - X^k|_∞ <= tol` and a recomputed residual
/// `<= 5 tol`. Without convergence the iterate with the smallest residual is
/// returned with `converged = false`.
pub fn mean_curvature_iterate<T: Real>(
    grid: &DiscGrid,
    prescription: &Prescription,
    boundary: &impl Fn(f64) -> [f64; 4],
    config: &SolverConfig,
) -> Result<SolveOutcome<T>, SolverError> {
    config.validate()?;
    let bnd = lift::<T>(boundary);
    let zeros = vec![[T::zero(); 4]; grid.len()];
    let start = poisson_solve(grid, &zeros, &bnd, &config.linear, None)?;
    let mut sweeps = start.sweeps;
    let mut x = start.field;
    if prescription.is_zero() {
        let report = summarize(grid, &x, &bnd, &zeros, prescription, config, SolveStatus::Converged, 1, sweeps, 0.0, 1)?;
        return Ok(SolveOutcome { report, field: x });
    }
    let theta = T::lit(config.damping);
    let mut best: Option<(f64, Vec<[T; 4]>, f64, usize)> = None;
    let mut previous_update = f64::INFINITY;
    let mut growth = 0;
    let mut rhs = assemble_rhs(grid, &x, &bnd, prescription, &config.frame, 1)?;
    for iteration in 1..=config.max_outer {
        let solve = poisson_solve(grid, &rhs, &bnd, &config.linear, Some(&x))?;
        sweeps += solve.sweeps;
        let next: Vec<[T; 4]> = x
            .iter()
            .zip(&solve.field)
            .map(|(a, s)| std::array::from_fn(|c| (T::one() - theta) * a[c] + theta * s[c]))
            .collect();
        let update = sup_update(&x, &next);
        x = next;
        rhs = assemble_rhs(grid, &x, &bnd, prescription, &config.frame, iteration + 1)?;
        let (res, _) = residual(grid, &x, &bnd, &rhs);
        if update <= config.tol && res <= 5.0 * config.tol {
            let report =
                summarize(grid, &x, &bnd, &rhs, prescription, config, SolveStatus::Converged, iteration, sweeps, update, iteration)?;
            return Ok(SolveOutcome { report, field: x });
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, x.clone(), update, iteration));
        }
        growth = if update > previous_update { growth + 1 } else { 0 };
        previous_update = update;
        if growth >= 5 || !update.is_finite() {
            return finish_unconverged(grid, &bnd, prescription, config, best, SolveStatus::Diverging, iteration, sweeps);
        }
    }
    finish_unconverged(grid, &bnd, prescription, config, best, SolveStatus::MaxIterations, config.max_outer, sweeps)
}

#[allow(clippy::too_many_arguments)]
fn finish_unconverged<T: Real>(
    grid: &DiscGrid,
    bnd: &impl Fn(f64) -> [T; 4],
    prescription: &Prescription,
    config: &SolverConfig,
    best: Option<(f64, Vec<[T; 4]>, f64, usize)>,
    status: SolveStatus,
    iterations: usize,
    sweeps: usize,
) -> Result<SolveOutcome<T>, SolverError> {
    let (_, field, update, _) = best.expect("at least one outer iteration ran");
    let rhs = assemble_rhs(grid, &field, bnd, prescription, &config.frame, iterations)?;
    let report = summarize(grid, &field, bnd, &rhs, prescription, config, status, iterations, sweeps, update, iterations)?;
    Ok(SolveOutcome { report, field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{BoundaryData, MeanCurvatureVector};

    fn holomorphic(theta: f64) -> [f64; 4] {
        BoundaryData::HolomorphicGraph.eval(theta)
    }

    #[test]
    fn minimal_graph_is_one_linear_solve() {
        let g = DiscGrid::new(1.0 / 64.0).unwrap();
        let out = mean_curvature_iterate::<f64>(&g, &Prescription::zero(), &holomorphic, &SolverConfig::default()).unwrap();
        let r = &out.report;
        assert!(r.converged);
        assert_eq!(r.outer_iterations, 1);
        assert!(r.residual <= 1e-8, "{}", r.residual);
        for s in 0..2 {
            assert!(r.center.h[s].abs() <= 2e-2);
            assert!((r.center.k[s] + 1.0).abs() <= 2e-2, "{:?}", r.center.k);
        }
    }

    #[test]
    fn affine_boundary_gives_a_flat_solution() {
        let g = DiscGrid::new(1.0 / 32.0).unwrap();
        let b = BoundaryData::Affine([0.3, -0.4, 0.5, 0.2, 0.5, -0.1]);
        let out = mean_curvature_iterate::<f64>(&g, &Prescription::zero(), &|t| b.eval(t), &SolverConfig::default()).unwrap();
        let c = &out.report.center;
        assert!(c.h.iter().chain(&c.k).chain(&c.kappa1).chain(&c.kappa2).all(|x| x.abs() <= 1e-8), "{c:?}");
        for (p, x) in g.nodes.iter().zip(&out.field) {
            assert!((x[2] - (0.3 * p.u - 0.4 * p.v + 0.5)).abs() <= 1e-10);
        }
    }

    #[test]
    fn small_constant_prescription_converges() {
        let eps = 0.05;
        let p = Prescription::new(MeanCurvatureVector::Constant([0.0, 0.0, eps, 0.0]));
        let cfg = SolverConfig::default();
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let g = DiscGrid::new(h).unwrap();
            let out = mean_curvature_iterate::<f64>(&g, &p, &holomorphic, &cfg).unwrap();
            let r = &out.report;
            assert!(r.converged, "{r:?}");
            assert!(r.residual <= 5.0 * cfg.tol);
            // The iteration does not enforce conformality, so the prescribed value is
            // met by ΔX·N/(2W); the intrinsic H only agrees up to the defect.
            let c = &r.center;
            assert!((c.laplacian_h[0] - c.prescribed_h[0]).abs() <= 0.1 * c.prescribed_h[0].abs(), "{c:?}");
            let again = residual_report(&g, &out.field, &p, &holomorphic, &cfg).unwrap();
            assert_eq!(again.residual, r.residual);
        }
    }

    #[test]
    fn strict_thresholds_report_the_failing_iteration() {
        let g = DiscGrid::new(1.0 / 32.0).unwrap();
        let p = Prescription::new(MeanCurvatureVector::Constant([0.0, 0.0, 0.05, 0.0]));
        let mut cfg = SolverConfig::default();
        cfg.frame = FrameRecipe::new(crate::frames::FrameKind::ProjectionOrthonormalized);
        match mean_curvature_iterate::<f64>(&g, &p, &holomorphic, &cfg) {
            Err(SolverError::FrameFailure { iteration, u, v, source: crate::frames::FrameError::NormBelowThreshold { .. } }) => {
                assert!(iteration >= 1);
                assert!(u * u + v * v > 0.9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn corrupted_field_is_detected() {
        let g = DiscGrid::new(1.0 / 16.0).unwrap();
        let cfg = SolverConfig::default();
        let mut out = mean_curvature_iterate::<f64>(&g, &Prescription::zero(), &holomorphic, &cfg).unwrap();
        let clean = residual_report(&g, &out.field, &Prescription::zero(), &holomorphic, &cfg).unwrap();
        assert!(clean.residual <= 1e-9);
        let k = g.index(3, -2).unwrap();
        out.field[k][2] += 0.1;
        let dirty = residual_report(&g, &out.field, &Prescription::zero(), &holomorphic, &cfg).unwrap();
        assert!(dirty.residual >= 0.1 / (g.h * g.h));
    }

    #[test]
    fn field_jet_is_exact_for_quadratics() {
        let g = DiscGrid::new(0.125).unwrap();
        let f = |u: f64, v: f64| [u, v, 0.5 * (u * u - v * v), u * v + v * v];
        let field: Vec<[f64; 4]> = g.nodes.iter().map(|p| f(p.u, p.v)).collect();
        let bnd = |t: f64| f(t.cos(), t.sin());
        for k in 0..g.len() {
            let p = &g.nodes[k];
            let j = field_jet(&g, &field, &bnd, k);
            let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-11);
            assert!(close(&j.xu, &[1.0, 0.0, p.u, p.v]));
            assert!(close(&j.xv, &[0.0, 1.0, -p.v, p.u + 2.0 * p.v]));
            assert!(close(&j.xuu, &[0.0, 0.0, 1.0, 0.0]));
            assert!(close(&j.xvv, &[0.0, 0.0, -1.0, 2.0]));
        }
    }

    #[test]
    fn mismatched_field_is_rejected() {
        let g = DiscGrid::new(0.125).unwrap();
        assert!(matches!(
            residual_report(&g, &[[0.0f64; 4]; 3], &Prescription::zero(), &holomorphic, &SolverConfig::default()),
            Err(SolverError::FieldSize { .. })
        ));
    }
}
