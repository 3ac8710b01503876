//! Finite-difference solver for the prescribed mean curvature system
//! `ΔX = 2 Σ H(X, N_Σ) W N_Σ` on the unit disc with Dirichlet data, where
//! `H(X, Z) = H̄(X)·Z`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frames::{FrameError, FrameKind, FrameRecipe};
use crate::scalar::Real;

pub mod boundary;
pub mod grid;
pub mod iterate;
pub mod poisson;

pub use boundary::{BoundaryData, PeriodicSpline};
pub use grid::{Arm, DiscGrid, DiscNode};
pub use iterate::{field_jet, mean_curvature_iterate, residual_report, SolveOutcome, SolveReport, SolveStatus};
pub use poisson::{apply_laplacian, poisson_solve, LinearConfig, LinearSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("grid spacing must lie in (0, 1/8], got {0}")]
    BadSpacing(f64),
    #[error("field has {found} nodes, the grid has {expected}")]
    FieldSize { expected: usize, found: usize },
    #[error("right-hand side contains non-finite values")]
    NonFiniteData,
    #[error("linear solve did not converge after {sweeps} sweeps")]
    LinearSolveDiverged { sweeps: usize },
    #[error("boundary data, line {line}: {reason}")]
    BoundaryFormat { line: usize, reason: String },
    #[error("unknown boundary '{0}'")]
    UnknownBoundary(String),
    #[error("bad mean curvature prescription '{0}': expected 'zero' or 'const:a,b,c,d'")]
    BadPrescription(String),
    #[error("bad solver configuration: {0}")]
    BadConfig(String),
    #[error("frame construction failed in outer iteration {iteration} at (u, v) = ({u}, {v}): {source}")]
    FrameFailure {
        iteration: usize,
        u: f64,
        v: f64,
        #[source]
        source: FrameError,
    },
}

/// The vector field `H̄: R^4 -> R^4`.
#[derive(Clone)]
pub enum MeanCurvatureVector {
    Zero,
    Constant([f64; 4]),
    Field(Arc<dyn Fn([f64; 4]) -> [f64; 4] + Send + Sync>),
}

impl fmt::Debug for MeanCurvatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanCurvatureVector::Zero => write!(f, "Zero"),
            MeanCurvatureVector::Constant(c) => write!(f, "Constant({c:?})"),
            MeanCurvatureVector::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Prescribed mean curvature `H(X, Z) = H̄(X)·Z` with optional bounds that
/// are reported but never estimated.
#[derive(Clone, Debug)]
pub struct Prescription {
    pub hbar: MeanCurvatureVector,
    pub h0: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub alpha: Option<f64>,
}

impl Prescription {
    pub fn new(hbar: MeanCurvatureVector) -> Self {
        Self { hbar, h0: None, h1: None, h2: None, alpha: None }
    }

    pub fn zero() -> Self {
        Self::new(MeanCurvatureVector::Zero)
    }

    /// `zero` or `const:a,b,c,d`.
    pub fn parse(text: &str) -> Result<Self, SolverError> {
        let t = text.trim();
        if t == "zero" {
            return Ok(Self::zero());
        }
        let bad = || SolverError::BadPrescription(text.to_string());
        let body = t.strip_prefix("const:").ok_or_else(bad)?;
        let nums = body.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
        let c: [f64; 4] = nums.try_into().map_err(|_| bad())?;
        if c.iter().any(|x| !x.is_finite()) {
            return Err(bad());
        }
        Ok(Self::new(if c == [0.0; 4] { MeanCurvatureVector::Zero } else { MeanCurvatureVector::Constant(c) }))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.hbar, MeanCurvatureVector::Zero)
    }

    pub fn hbar<T: Real>(&self, x: &[T; 4]) -> [T; 4] {
        match &self.hbar {
            MeanCurvatureVector::Zero => [T::zero(); 4],
            MeanCurvatureVector::Constant(c) => c.map(T::lit),
            MeanCurvatureVector::Field(f) => f(x.map(T::to_f64_lossy)).map(T::lit),
        }
    }

    /// `H(X, Z) = H̄(X)·Z`.
    pub fn scalar<T: Real>(&self, x: &[T; 4], z: &[T]) -> T {
        self.hbar(x).iter().zip(z).fold(T::zero(), |acc, (a, b)| acc + *a * *b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Sup-norm threshold on the outer update; the recomputed residual must
    /// also fall below `5 tol`.
    pub tol: f64,
    pub max_outer: usize,
    /// Damping `θ` in `X ← (1 - θ) X + θ S(X)`.
    pub damping: f64,
    pub linear: LinearConfig,
    /// Frames used to assemble the right-hand side.
    pub frame: FrameRecipe,
}

/// Norm threshold of the solver's default frame recipe. Boundary curves of
/// graphs with `|∇φ| = 1` on the rim, such as `(w, w²/2)`, sit exactly at
/// `|N*|² = 1/2` there, so the pointwise default would reject any iterate that
/// bends the surface near the boundary.
pub const SOLVER_NORM_THRESHOLD: f64 = 0.25;

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_outer: 500,
            damping: 0.8,
            linear: LinearConfig::default(),
            frame: FrameRecipe::new(FrameKind::ProjectionOrthonormalized)
                .with_thresholds(SOLVER_NORM_THRESHOLD, crate::frames::DEFAULT_ANGLE_THRESHOLD)
                .expect("thresholds lie in (0, 1)"),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) {
            return Err(SolverError::BadConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolverError::BadConfig(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.max_outer == 0 {
            return Err(SolverError::BadConfig("max_outer must be at least 1".into()));
        }
        if !(self.linear.tol > 0.0) || self.linear.max_sweeps == 0 {
            return Err(SolverError::BadConfig("linear solver tolerance and sweep limit must be positive".into()));
        }
        Ok(())
    }
}
