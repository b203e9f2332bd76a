use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("EmptyInput: no points were given")]
    EmptyInput,
    #[error("NonFinitePoint: point {index} has a non-finite coordinate")]
    NonFinitePoint { index: usize },
    #[error("DuplicatePoints: points {first} and {second} are closer than 1e-12")]
    DuplicatePoints { first: usize, second: usize },
    #[error("RankOutOfRange: rank {rank} requested from a set with {available} other points")]
    RankOutOfRange { rank: usize, available: usize },
    #[error("IndexOutOfRange: index {index} into a set of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("TooFewPoints: need at least {required}, got {got}")]
    TooFewPoints { required: usize, got: usize },
    #[error("OrderingStalled: no unplaced neighbor found after placing {placed} of {total} points")]
    OrderingStalled { placed: usize, total: usize },
    #[error("SingularSystem: {0}")]
    SingularSystem(String),
    #[error("AmbiguousOrientation: orientation scalar product {value:e} is below 1e-12")]
    AmbiguousOrientation { value: f64 },
    #[error("CurveTooShort: curve length {length} is not above 3*h_min = {limit}")]
    CurveTooShort { length: f64, limit: f64 },
    #[error("RegionEmpty: no interior candidate survived")]
    RegionEmpty,
    #[error("NotEnoughNodes: stencil of {requested} requested from {available} nodes")]
    NotEnoughNodes { requested: usize, available: usize },
    #[error("SingularStencil: local system condition estimate {condition:e} exceeds 1e12")]
    SingularStencil { condition: f64 },
    #[error("SolverDiverged: relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { iterations: usize, residual: f64 },
    #[error("BoundaryCollision: dendrite reached within {gap} of the outer boundary at step {step}")]
    BoundaryCollision { step: usize, gap: f64 },
    #[error("SelfIntersection: dendrite boundary self-intersects at step {step}")]
    SelfIntersection { step: usize },
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("IoFailure: {path}: {message}")]
    IoFailure { path: PathBuf, message: String },
}

impl Error {
    /// Variant name, used as the CLI's machine-readable failure tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::NonFinitePoint { .. } => "NonFinitePoint",
            Error::DuplicatePoints { .. } => "DuplicatePoints",
            Error::RankOutOfRange { .. } => "RankOutOfRange",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::OrderingStalled { .. } => "OrderingStalled",
            Error::SingularSystem(_) => "SingularSystem",
            Error::AmbiguousOrientation { .. } => "AmbiguousOrientation",
            Error::CurveTooShort { .. } => "CurveTooShort",
            Error::RegionEmpty => "RegionEmpty",
            Error::NotEnoughNodes { .. } => "NotEnoughNodes",
            Error::SingularStencil { .. } => "SingularStencil",
            Error::SolverDiverged { .. } => "SolverDiverged",
            Error::BoundaryCollision { .. } => "BoundaryCollision",
            Error::SelfIntersection { .. } => "SelfIntersection",
            Error::InvalidInput(_) => "InvalidInput",
            Error::IoFailure { .. } => "IoFailure",
        }
    }

    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::IoFailure { path: path.into(), message: err.to_string() }
    }
}
