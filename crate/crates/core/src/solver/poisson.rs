//! Shortley–Weller five-point Laplacian on the disc and its SOR solve.

use crate::scalar::Real;

use super::grid::{Arm, DiscGrid};
use super::SolverError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearConfig {
    /// Stop when the largest SOR correction falls below `tol · max(1, |U|_∞)`.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Relaxation factor; `None` picks the asymptotically optimal value for the disc.
    pub omega: Option<f64>,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { tol: 1e-14, max_sweeps: 200_000, omega: None }
    }
}

/// First Dirichlet eigenvalue of the unit disc, `j_{0,1}^2`.
const DISC_EIGENVALUE: f64 = 5.783_185_962_946_784;

pub fn optimal_omega(h: f64) -> f64 {
    2.0 / (1.0 + h * (DISC_EIGENVALUE / 2.0).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<T, const C: usize> {
    pub field: Vec<[T; C]>,
    pub sweeps: usize,
    pub last_correction: T,
}

/// `Σ c_k g(θ_k)` over the arms of node `k` that end on the circle.
fn boundary_part<T: Real, const C: usize>(grid: &DiscGrid, k: usize, boundary: &impl Fn(f64) -> [T; C]) -> [T; C] {
    let (c, _) = grid.weights(k);
    let mut out = [T::zero(); C];
    for (arm, &ck) in grid.nodes[k].arms.iter().zip(&c) {
        if let Arm::Boundary { theta, .. } = *arm {
            let g = boundary(theta);
            for (o, gi) in out.iter_mut().zip(g) {
                *o = *o + T::lit(ck) * gi;
            }
        }
    }
    out
}

/// Discrete Laplacian `Δ_h U` at every interior node.
pub fn apply_laplacian<T: Real, const C: usize>(
    grid: &DiscGrid,
    field: &[[T; C]],
    boundary: &impl Fn(f64) -> [T; C],
) -> Vec<[T; C]> {
    (0..grid.len())
        .map(|k| {
            let (c, diag) = grid.weights(k);
            let mut out = boundary_part(grid, k, boundary);
            for (arm, &ck) in grid.nodes[k].arms.iter().zip(&c) {
                if let Arm::Node(q) = *arm {
                    for (o, x) in out.iter_mut().zip(field[q]) {
                        *o = *o + T::lit(ck) * x;
                    }
                }
            }
            for (o, x) in out.iter_mut().zip(field[k]) {
                *o = *o - T::lit(diag) * x;
            }
            out
        })
        .collect()
}

/// Solves `Δ_h U = rhs` componentwise with `U = boundary(θ)` on the circle,
/// by successive over-relaxation in lexicographic order.
pub fn poisson_solve<T: Real, const C: usize>(
    grid: &DiscGrid,
    rhs: &[[T; C]],
    boundary: impl Fn(f64) -> [T; C],
    config: &LinearConfig,
    initial: Option<&[[T; C]]>,
) -> Result<LinearSolution<T, C>, SolverError> {
    let n = grid.len();
    if rhs.len() != n || initial.is_some_and(|x| x.len() != n) {
        return Err(SolverError::FieldSize { expected: n, found: rhs.len() });
    }
    if rhs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(SolverError::NonFiniteData);
    }
    let omega = T::lit(config.omega.unwrap_or_else(|| optimal_omega(grid.h)));
    struct Row<T, const C: usize> {
        nbr: [usize; 4],
        coef: [T; 4],
        inv_diag: T,
        fixed: [T; C],
    }
    let rows: Vec<Row<T, C>> = (0..n)
        .map(|k| {
            let (c, diag) = grid.weights(k);
            let b = boundary_part(grid, k, &boundary);
            let mut nbr = [usize::MAX; 4];
            let mut coef = [T::zero(); 4];
            for (s, arm) in grid.nodes[k].arms.iter().enumerate() {
                if let Arm::Node(q) = *arm {
                    nbr[s] = q;
                    coef[s] = T::lit(c[s]);
                }
            }
            let mut fixed = [T::zero(); C];
            for ((f, bi), ri) in fixed.iter_mut().zip(b).zip(rhs[k]) {
                *f = bi - ri;
            }
            Row { nbr, coef, inv_diag: T::one() / T::lit(diag), fixed }
        })
        .collect();
    let mut u: Vec<[T; C]> = match initial {
        Some(x) => x.to_vec(),
        None => vec![[T::zero(); C]; n],
    };
    let tol = T::lit(config.tol);
    for sweep in 1..=config.max_sweeps {
        let mut worst = T::zero();
        let mut scale = T::one();
        for (k, row) in rows.iter().enumerate() {
            let mut acc = row.fixed;
            for s in 0..4 {
                if row.nbr[s] != usize::MAX {
                    let q = u[row.nbr[s]];
                    for (a, x) in acc.iter_mut().zip(q) {
                        *a = *a + row.coef[s] * x;
                    }
                }
            }
            for (x, a) in u[k].iter_mut().zip(acc) {
                let delta = omega * (a * row.inv_diag - *x);
                *x = *x + delta;
                worst = worst.max(delta.abs());
                scale = scale.max(x.abs());
            }
        }
        if !worst.is_finite() {
            return Err(SolverError::LinearSolveDiverged { sweeps: sweep });
        }
        if worst <= tol * scale {
            return Ok(LinearSolution { field: u, sweeps: sweep, last_correction: worst });
        }
    }
    Err(SolverError::LinearSolveDiverged { sweeps: config.max_sweeps })
}
