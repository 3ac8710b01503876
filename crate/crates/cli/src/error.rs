use immersion::estimates::EstimateError;
use immersion::{FrameError, GeometryError, SolverError, SurfaceError};

/// Process exit codes.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FRAME: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;
pub const EXIT_NOT_CONVERGED: i32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("frame construction failed: {0}")]
    Frame(String),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Frame(_) => EXIT_FRAME,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}

fn geometry(e: &GeometryError, msg: String) -> CliError {
    match e {
        GeometryError::DegenerateMetric { .. } => CliError::Degenerate(msg),
        _ => CliError::Frame(msg),
    }
}

/// `msg` is the full message to show; `e` decides the category.
fn frame(e: &FrameError, msg: String) -> CliError {
    match e {
        FrameError::Geometry(g) => geometry(g, msg),
        FrameError::Surface(s) => surface(s, msg),
        FrameError::AnchorCount { .. } | FrameError::DependentAnchors | FrameError::BadThreshold(_) => CliError::Usage(msg),
        FrameError::NoCanonicalFrame(_) | FrameError::NotAGraph => CliError::Usage(msg),
        _ => CliError::Frame(msg),
    }
}

fn surface(e: &SurfaceError, msg: String) -> CliError {
    match e {
        SurfaceError::Geometry(g) => geometry(g, msg),
        _ => CliError::Usage(msg),
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        let msg = e.to_string();
        frame(&e, msg)
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        let msg = e.to_string();
        surface(&e, msg)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let msg = e.to_string();
        geometry(&e, msg)
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        let msg = e.to_string();
        match &e {
            EstimateError::Point { source, .. } => frame(source, msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let msg = e.to_string();
        match &e {
            SolverError::FrameFailure { source, .. } => frame(source, msg),
            SolverError::LinearSolveDiverged { .. } | SolverError::NonFiniteData => CliError::NotConverged(msg),
            SolverError::FieldSize { .. } => CliError::Internal(msg),
            _ => CliError::Usage(msg),
        }
    }
}
