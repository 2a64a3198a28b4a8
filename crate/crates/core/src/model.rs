//! Model files: a TOML document describing a source manifold, an optional
//! almost contact structure, and an optional map onto a target.
//!
//! ```toml
//! [model]
//! name = "flat-r2-r1"
//!
//! [source]
//! coordinates = ["x", "y"]
//! [source.metric]          # row.col = expression; omitted entries are 0
//! x.x = "1"
//! y.y = "1"
//!
//! [target]
//! coordinates = ["u"]
//! metric.u.u = "1"
//!
//! [map]
//! u = "x"
//! ```
//!
//! Optional sections: `[structure]` (`phi` as `row.col`, `xi`, `eta`, and an
//! ordered `basis` table of named vectors), `[guard]` (`source` and `target`
//! lists; a point is admissible iff every guard is > 0), `[sample]` and
//! `[tolerance]`. Expressions may be strings or numbers.

use std::path::Path;

use serde::Deserialize;
use toml::{Table, Value};

use crate::contact::{AlmostContactStructure, StructuredManifold};
use crate::error::ModelError;
use crate::expr::{parse_expression, Expression};
use crate::geometry::{Chart, MetricField, VectorField};
use crate::report::Tolerances;
use crate::submersion::SubmersionSpec;

/// Sampling box `[low, high]^dim`, point count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSpec {
    pub low: f64,
    pub high: f64,
    pub points: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            low: -0.9,
            high: 0.9,
            points: 50,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub description: String,
    pub manifold: StructuredManifold,
    pub submersion: Option<SubmersionSpec>,
    /// Guards in source coordinates (also present in `submersion`).
    pub source_guards: Vec<Expression>,
    pub sample: SampleSpec,
    pub tolerances: Tolerances,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// Whether a candidate sample point lies in the model's domain.
    pub fn admits(&self, p: &[f64]) -> bool {
        let ok = match &self.submersion {
            Some(spec) => spec.admits(p),
            None => self
                .source_guards
                .iter()
                .try_fold(true, |acc, g| g.value_at(p).map(|v| acc && v > 0.0)),
        };
        ok.unwrap_or(false)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    model: RawHeader,
    source: RawChart,
    structure: Option<RawStructure>,
    target: Option<RawChart>,
    map: Option<Table>,
    guard: Option<RawGuard>,
    #[serde(default)]
    sample: SampleSpec,
    #[serde(default)]
    tolerance: RawTolerance,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeader {
    name: String,
    #[serde(default)]
    description: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    coordinates: Vec<String>,
    metric: Table,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    phi: Table,
    xi: Vec<Value>,
    eta: Vec<Value>,
    #[serde(default)]
    basis: Table,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGuard {
    #[serde(default)]
    source: Vec<Value>,
    #[serde(default)]
    target: Vec<Value>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerance {
    first_derivative: Option<f64>,
    tensor_derivative: Option<f64>,
    curvature: Option<f64>,
    frame: Option<f64>,
    exact: Option<f64>,
    witness: Option<f64>,
}

impl RawTolerance {
    fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            first_derivative: self.first_derivative.unwrap_or(d.first_derivative),
            tensor_derivative: self.tensor_derivative.unwrap_or(d.tensor_derivative),
            curvature: self.curvature.unwrap_or(d.curvature),
            frame: self.frame.unwrap_or(d.frame),
            exact: self.exact.unwrap_or(d.exact),
            witness: self.witness.unwrap_or(d.witness),
        }
    }
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        location: location.into(),
        message: message.into(),
    }
}

fn expression(value: &Value, chart: &Chart, location: &str) -> Result<Expression, ModelError> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        other => return Err(invalid(location, format!("expected an expression, found {}", other.type_str()))),
    };
    parse_expression(&text, chart.names()).map_err(|source| ModelError::Expression {
        location: location.to_string(),
        source,
    })
}

fn index(chart: &Chart, name: &str, location: &str) -> Result<usize, ModelError> {
    chart
        .index_of(name)
        .ok_or_else(|| invalid(location, format!("unknown coordinate `{name}`")))
}

/// `row.col = expr` entries into a dense matrix; omitted entries are zero.
/// With `mirror`, an entry given on one side only is copied to the other.
fn matrix(table: &Table, chart: &Chart, section: &str, mirror: bool) -> Result<Vec<Vec<Expression>>, ModelError> {
    let n = chart.dim();
    let mut out: Vec<Vec<Option<Expression>>> = vec![vec![None; n]; n];
    for (row, cols) in table {
        let i = index(chart, row, &format!("{section}.{row}"))?;
        let Value::Table(cols) = cols else {
            return Err(invalid(format!("{section}.{row}"), "expected `row.col = expression` entries"));
        };
        for (col, v) in cols {
            let loc = format!("{section}.{row}.{col}");
            let j = index(chart, col, &loc)?;
            out[i][j] = Some(expression(v, chart, &loc)?);
        }
    }
    if mirror {
        for i in 0..n {
            for j in 0..n {
                if out[i][j].is_none() {
                    out[i][j] = out[j][i].clone();
                }
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|r| r.into_iter().map(|e| e.unwrap_or_else(|| Expression::constant(0.0))).collect())
        .collect())
}

fn vector(values: &[Value], chart: &Chart, location: &str) -> Result<Vec<Expression>, ModelError> {
    if values.len() != chart.dim() {
        return Err(invalid(location, format!("expected {} components, found {}", chart.dim(), values.len())));
    }
    values
        .iter()
        .enumerate()
        .map(|(k, v)| expression(v, chart, &format!("{location}[{k}]")))
        .collect()
}

fn metric(raw: &RawChart, section: &str) -> Result<MetricField, ModelError> {
    let chart = Chart::new(raw.coordinates.iter().cloned())?;
    let g = matrix(&raw.metric, &chart, &format!("{section}.metric"), true)?;
    Ok(MetricField::new(chart, g)?)
}

/// Parse a model from TOML text.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let raw: RawModel = toml::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let source_metric = metric(&raw.source, "source")?;
    let chart = source_metric.chart().clone();

    let (structure, phi_basis) = match &raw.structure {
        Some(s) => {
            let phi = matrix(&s.phi, &chart, "structure.phi", false)?;
            let xi = VectorField::new(vector(&s.xi, &chart, "structure.xi")?);
            let eta = vector(&s.eta, &chart, "structure.eta")?;
            let mut basis = Vec::new();
            for (name, v) in &s.basis {
                let loc = format!("structure.basis.{name}");
                let Value::Array(items) = v else {
                    return Err(invalid(loc, "expected an array of components"));
                };
                basis.push((name.clone(), VectorField::new(vector(items, &chart, &loc)?)));
            }
            (Some(AlmostContactStructure::new(phi, xi, eta)?), basis)
        }
        None => (None, Vec::new()),
    };
    let manifold = StructuredManifold {
        metric: source_metric,
        structure,
        phi_basis,
    };

    let guard = raw.guard.unwrap_or_default();
    let source_guards = guard
        .source
        .iter()
        .enumerate()
        .map(|(k, v)| expression(v, &chart, &format!("guard.source[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;

    let submersion = match (&raw.target, &raw.map) {
        (Some(t), Some(map)) => {
            let target = metric(t, "target")?;
            let tchart = target.chart().clone();
            let mut components = vec![None; tchart.dim()];
            for (name, v) in map {
                let loc = format!("map.{name}");
                let a = index(&tchart, name, &loc)?;
                components[a] = Some(expression(v, &chart, &loc)?);
            }
            let components = components
                .into_iter()
                .zip(tchart.names())
                .map(|(c, name)| c.ok_or_else(|| ModelError::Missing(format!("map.{name}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let target_guards = guard
                .target
                .iter()
                .enumerate()
                .map(|(k, v)| expression(v, &tchart, &format!("guard.target[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SubmersionSpec::new(manifold.clone(), target, components)
                .map_err(|e| invalid("map", e.to_string()))?;
            Some(spec.with_guards(source_guards.clone(), target_guards))
        }
        (None, None) => {
            if !guard.target.is_empty() {
                return Err(invalid("guard.target", "target guards need a [target] section"));
            }
            None
        }
        (Some(_), None) => return Err(ModelError::Missing("map".into())),
        (None, Some(_)) => return Err(ModelError::Missing("target".into())),
    };

    let sample = raw.sample;
    if !(sample.low < sample.high) || sample.points == 0 {
        return Err(invalid("sample", "need low < high and at least one point"));
    }
    Ok(Model {
        name: raw.model.name,
        description: raw.model.description,
        manifold,
        submersion,
        source_guards,
        sample,
        tolerances: raw.tolerance.resolve(),
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}
