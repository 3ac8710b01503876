//! Curvature of two-dimensional immersions `X: B -> R^n`, normal frames,
//! a-priori estimate monitors and a finite-difference solver for the
//! prescribed mean curvature system on the unit disc.
//!
//! Every numerical routine is generic over [`Real`] (`f32`, `f64`, or the
//! crate's dual numbers); the aliases at the bottom fix the scalar to `f64`.

// Negated comparisons reject NaN together with out-of-range values, and the
// index loops follow the tensor notation of the formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dual;
pub mod estimates;
pub mod expr;
pub mod frames;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod scalar;
pub mod solver;
pub mod surface;

pub use dual::Dual;
pub use estimates::{EstimateError, EstimateReport, GridSample};
pub use expr::{parse_expression, Expr, ExprError};
pub use frames::{FrameError, FrameKind, FrameRecipe};
pub use geometry::{
    analyze_point, christoffel, conformality_defect, curvature_data, first_fundamental_form, gauss_curvature,
    gauss_equation_residual, mean_curvature, mean_curvature_system_residual, principal_curvatures,
    second_fundamental_form, structure_condition_ratio, torsion_coefficients, weingarten_residual, GeometryError,
    NormalFrame, SurfaceJet,
};
pub use jet::{eval_jet, eval_value, ScalarJet2};
pub use scalar::Real;
pub use solver::{DiscGrid, Prescription, SolveReport, SolverConfig, SolverError};
pub use surface::{builtin_surface, finite_difference_jet, graph_jet, AnalyticSurface, SurfaceError};

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub type Jet = SurfaceJet<f64>;
pub type Frame = NormalFrame<f64>;
pub type FirstForm = geometry::FirstForm<f64>;
pub type SecondForm = geometry::SecondForm<f64>;
pub type Curvature = geometry::Curvature<f64>;
pub type CurvatureReport = geometry::CurvatureReport<f64>;
pub type Christoffel = geometry::Christoffel<f64>;
pub type Torsion = geometry::Torsion<f64>;
pub type Jet2 = ScalarJet2<f64>;
