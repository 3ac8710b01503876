//! Dirichlet data on the unit circle: named analytic curves or a closed
//! cubic spline through `(θ, X(θ))` knots.

use std::f64::consts::TAU;

use super::SolverError;

/// Periodic cubic spline in the angle, one per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSpline {
    theta: Vec<f64>,
    values: Vec<[f64; 4]>,
    /// Second derivatives at the knots.
    moments: Vec<[f64; 4]>,
}

/// Solves the cyclic tridiagonal system `sub_i x_{i-1} + diag_i x_i + sup_i x_{i+1} = rhs_i`
/// (indices mod n) by Sherman–Morrison on top of the Thomas algorithm.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let thomas = |d: &[f64], r: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        c[0] = sup[0] / d[0];
        y[0] = r[0] / d[0];
        for i in 1..n {
            let m = d[i] - sub[i] * c[i - 1];
            c[i] = sup[i] / m;
            y[i] = (r[i] - sub[i] * y[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    };
    // A = B + w z^T with corner terms moved into the rank-one update.
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= sub[0] * sup[n - 1] / gamma;
    let x = thomas(&d, rhs);
    let mut w = vec![0.0; n];
    w[0] = gamma;
    w[n - 1] = sup[n - 1];
    let q = thomas(&d, &w);
    let factor = sub[0] / gamma;
    let num = x[0] + factor * x[n - 1];
    let den = 1.0 + q[0] + factor * q[n - 1];
    x.iter().zip(&q).map(|(xi, qi)| xi - qi * num / den).collect()
}

impl PeriodicSpline {
    /// Knots must have strictly increasing angles spanning less than one turn;
    /// they are shifted into `[0, 2π)`.
    pub fn new(mut knots: Vec<(f64, [f64; 4])>) -> Result<Self, SolverError> {
        if knots.len() < 3 {
            return Err(SolverError::BoundaryFormat { line: 0, reason: "at least 3 knots are needed".into() });
        }
        for k in &mut knots {
            k.0 = k.0.rem_euclid(TAU);
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[1].0 - w[0].0 <= 1e-12) {
            return Err(SolverError::BoundaryFormat { line: 0, reason: "knot angles must be distinct modulo 2π".into() });
        }
        let n = knots.len();
        let theta: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let values: Vec<[f64; 4]> = knots.iter().map(|k| k.1).collect();
        let gap = |i: usize| if i + 1 < n { theta[i + 1] - theta[i] } else { theta[0] + TAU - theta[n - 1] };
        let sub: Vec<f64> = (0..n).map(|i| gap((i + n - 1) % n)).collect();
        let sup: Vec<f64> = (0..n).map(gap).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.0 * (sub[i] + sup[i])).collect();
        let mut moments = vec![[0.0; 4]; n];
        for c in 0..4 {
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
                    6.0 * ((values[next][c] - values[i][c]) / sup[i] - (values[i][c] - values[prev][c]) / sub[i])
                })
                .collect();
            for (m, x) in moments.iter_mut().zip(solve_cyclic(&sub, &diag, &sup, &rhs)) {
                m[c] = x;
            }
        }
        Ok(Self { theta, values, moments })
    }

    pub fn eval(&self, theta: f64) -> [f64; 4] {
        let n = self.theta.len();
        let t = theta.rem_euclid(TAU);
        // Interval [theta_i, theta_{i+1}) containing t, wrapping past the last knot.
        let i = match self.theta.partition_point(|&x| x <= t) {
            0 => n - 1,
            p => p - 1,
        };
        let next = (i + 1) % n;
        let start = self.theta[i];
        let end = if next == 0 { self.theta[0] + TAU } else { self.theta[next] };
        let t = if t < start { t + TAU } else { t };
        let h = end - start;
        let (a, b) = ((end - t) / h, (t - start) / h);
        let mut out = [0.0; 4];
        for (c, o) in out.iter_mut().enumerate() {
            let (y0, y1) = (self.values[i][c], self.values[next][c]);
            let (m0, m1) = (self.moments[i][c], self.moments[next][c]);
            *o = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        }
        out
    }

    /// Reads whitespace- or comma-separated lines `θ x1 x2 x3 x4`; blank
    /// lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, SolverError> {
        let mut knots = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 5 {
                return Err(SolverError::BoundaryFormat {
                    line: k + 1,
                    reason: format!("expected 5 numbers, found {}", fields.len()),
                });
            }
            let mut nums = [0.0; 5];
            for (slot, f) in nums.iter_mut().zip(&fields) {
                *slot = f.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| SolverError::BoundaryFormat {
                    line: k + 1,
                    reason: format!("'{f}' is not a finite number"),
                })?;
            }
            knots.push((nums[0], [nums[1], nums[2], nums[3], nums[4]]));
        }
        Self::new(knots)
    }
}

/// Boundary curve `θ -> X(cos θ, sin θ)` in R^4.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryData {
    /// `(u, v, (u^2 - v^2)/2, uv)`, the trace of the graph of `w^2/2`.
    HolomorphicGraph,
    /// `(u, v, a u + b v + c, d u + e v + f)`.
    Affine([f64; 6]),
    Spline(PeriodicSpline),
}

impl BoundaryData {
    pub fn eval(&self, theta: f64) -> [f64; 4] {
        let (u, v) = (theta.cos(), theta.sin());
        match self {
            BoundaryData::HolomorphicGraph => [u, v, 0.5 * (u * u - v * v), u * v],
            BoundaryData::Affine([a, b, c, d, e, f]) => [u, v, a * u + b * v + c, d * u + e * v + f],
            BoundaryData::Spline(s) => s.eval(theta),
        }
    }

    /// `holomorphic_graph`, or `affine` with up to six coefficients `a..f`
    /// (missing ones are zero).
    pub fn named(name: &str, params: &[f64]) -> Result<Self, SolverError> {
        match name {
            "holomorphic_graph" if params.is_empty() => Ok(BoundaryData::HolomorphicGraph),
            "affine" if params.len() <= 6 => {
                let mut c = [0.0; 6];
                c[..params.len()].copy_from_slice(params);
                Ok(BoundaryData::Affine(c))
            }
            _ => Err(SolverError::UnknownBoundary(name.to_string())),
        }
    }
}
