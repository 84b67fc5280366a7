use thiserror::Error;

/// Errors produced by the planning toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("at least 3 stations are required, got {0}")]
    InsufficientStations(usize),
    #[error("degenerate topology: {0}")]
    DegenerateTopology(String),
    #[error("degenerate triangle: vertices are collinear")]
    DegenerateTriangle,
    #[error("voxel grid is empty")]
    EmptyGrid,
    #[error("empty input")]
    EmptyInput,
    #[error("singular geometry: {0}")]
    SingularGeometry(String),
    #[error("invalid beam parameter {field}: {value}")]
    InvalidBeam { field: &'static str, value: f64 },
    #[error("invalid parameter {field}: {message}")]
    InvalidParameter { field: String, message: String },
    #[error("premise violated: height {height} must satisfy 0 < H <= r = {radius}")]
    PremiseViolated { radius: f64, height: f64 },
    #[error("no feasible configuration found (best overlap ratio seen: {best_cor:?})")]
    InfeasibleRun { best_cor: Option<f64> },
    #[error("search space of {combinations} combinations exceeds budget {budget}")]
    BudgetExceeded { combinations: u128, budget: u128 },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
