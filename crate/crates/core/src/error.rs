use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("chart has no coordinates")]
    EmptyChart,
    #[error("coordinate `{0}` declared twice")]
    DuplicateCoordinate(String),
    #[error("{what} must be {expected}x{expected}")]
    Shape { what: &'static str, expected: usize },
    #[error("metric entries g[{row}][{col}] = `{upper}` and g[{col}][{row}] = `{lower}` differ")]
    AsymmetricMetric {
        row: String,
        col: String,
        upper: String,
        lower: String,
    },
    #[error("point has {got} coordinates, chart has {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("point has a non-finite coordinate")]
    NonFinitePoint,
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, point: Vec<f64> },
    #[error("metric is singular")]
    Singular,
    #[error("field has {got} components, chart has {expected}")]
    ChartMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmersionError {
    #[error("differential has rank {rank} < {expected} at {point:?}")]
    RankDeficient {
        rank: usize,
        expected: usize,
        point: Vec<f64>,
    },
    #[error("point {point:?} violates a domain guard")]
    GuardViolation { point: Vec<f64> },
    #[error("target dimension {target} exceeds source dimension {source_dim}")]
    Dimensions { source_dim: usize, target: usize },
    #[error("vector is not horizontal (vertical part {residual:e})")]
    NotHorizontal { residual: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<EvalError> for SubmersionError {
    fn from(e: EvalError) -> Self {
        SubmersionError::Geometry(GeometryError::Eval(e))
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("model syntax: {0}")]
    Syntax(String),
    #[error("{location}: {source}")]
    Expression {
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("missing `{0}`")]
    Missing(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("no admissible sample point after {rejections} rejections")]
    NoAdmissiblePoints { rejections: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
