//! Numerical verification of identities for Riemannian submersions from
//! almost contact metric manifolds.
//!
//! Everything is evaluated pointwise in a single global chart. Expressions
//! are parsed from text ([`expr`]), differentiated exactly with jets
//! ([`jet`], [`taylor`]) and fed to the geometry layers.

pub mod contact;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod harmonic;
pub mod germ;
pub mod jet;
pub mod linalg;
pub mod model;
pub mod oneill;
pub mod report;
pub mod runner;
pub mod scalar;
pub mod submersion;
pub mod taylor;

pub use error::{GeometryError, ModelError, RunError, SubmersionError};
pub use expr::{parse_expression, EvalError, Expression, ParseError};
pub use geometry::{Chart, LocalGeometry, MetricField, VectorField};
pub use jet::Jet2;
pub use scalar::{Coefficient, Real};
pub use taylor::{Layout, Taylor};

pub type Jet2f64 = Jet2<f64>;
pub type Jet2f32 = Jet2<f32>;
pub type Point<T> = Vec<T>;
pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;

pub use fixtures::{fixture, fixture_names, resolve};
pub use model::{load_model, parse_model, Model, SampleSpec};
pub use report::{Tolerances, Verdict};
pub use runner::{run, RunOptions, RunReport, Suite};
