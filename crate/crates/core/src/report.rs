//! Check results, their aggregation over sample points, and tolerances.

use serde::{Deserialize, Serialize};

/// What a check asserts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Residual must not exceed the tolerance.
    Bound(f64),
    /// Some searched quantity must exceed the threshold; otherwise inconclusive.
    Witness(f64),
    /// A boolean agreement between independent computations.
    Consistency,
    /// Recorded value, no verdict.
    Info,
}

impl Kind {
    fn label(&self) -> &'static str {
        match self {
            Kind::Bound(_) => "bound",
            Kind::Witness(_) => "witness",
            Kind::Consistency => "consistency",
            Kind::Info => "info",
        }
    }

    fn tolerance(&self) -> Option<f64> {
        match *self {
            Kind::Bound(t) | Kind::Witness(t) => Some(t),
            _ => None,
        }
    }
}

/// One check's outcome at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Residual(f64),
    /// Largest magnitude found by a witness search.
    Witness(f64),
    Agreement { agree: bool, detail: String },
    Value(f64),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct PointCheck {
    pub name: String,
    pub kind: Kind,
    pub observation: Observation,
}

impl PointCheck {
    pub fn bound(name: &str, tol: f64, residual: f64) -> Self {
        Self::new(name, Kind::Bound(tol), Observation::Residual(residual))
    }

    pub fn witness(name: &str, threshold: f64, magnitude: f64) -> Self {
        Self::new(name, Kind::Witness(threshold), Observation::Witness(magnitude))
    }

    pub fn agreement(name: &str, agree: bool, detail: impl Into<String>) -> Self {
        Self::new(
            name,
            Kind::Consistency,
            Observation::Agreement {
                agree,
                detail: detail.into(),
            },
        )
    }

    pub fn info(name: &str, value: f64) -> Self {
        Self::new(name, Kind::Info, Observation::Value(value))
    }

    pub fn skipped(name: &str, kind: Kind, reason: impl Into<String>) -> Self {
        Self::new(name, kind, Observation::Skipped(reason.into()))
    }

    fn new(name: &str, kind: Kind, observation: Observation) -> Self {
        Self {
            name: name.to_string(),
            kind,
            observation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Info,
    Skipped,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Info => "info",
            Verdict::Skipped => "skipped",
        }
    }

    /// Combine verdicts: any fail fails, then any inconclusive.
    pub fn combine<I: IntoIterator<Item = Verdict>>(items: I) -> Verdict {
        let mut out = Verdict::Pass;
        for v in items {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                _ => {}
            }
        }
        out
    }
}

/// A check aggregated over all sample points.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: &'static str,
    pub tolerance: Option<f64>,
    /// Max residual (bound), smallest per-point best magnitude (witness),
    /// largest-magnitude value (info), or number of disagreeing points.
    pub value: f64,
    /// Sample index where `value` was attained.
    pub point: Option<usize>,
    pub evaluated: usize,
    pub failing: usize,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub verdict: Verdict,
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Aggregate per-point check lists into one result per check name.
///
/// Check order follows first appearance; reduction is sequential in point
/// order so the result does not depend on how points were scheduled.
pub fn aggregate(suite: &str, per_point: &[Vec<PointCheck>]) -> SuiteResult {
    let mut names: Vec<(String, Kind)> = Vec::new();
    for checks in per_point {
        for c in checks {
            if !names.iter().any(|(n, _)| *n == c.name) {
                names.push((c.name.clone(), c.kind));
            }
        }
    }
    let checks: Vec<CheckResult> = names
        .into_iter()
        .map(|(name, kind)| {
            let obs: Vec<(usize, &PointCheck)> = per_point
                .iter()
                .enumerate()
                .flat_map(|(i, cs)| cs.iter().filter(|c| c.name == name).map(move |c| (i, c)))
                .collect();
            fold_check(name, kind, &obs)
        })
        .collect();
    let verdict = Verdict::combine(checks.iter().map(|c| c.verdict));
    SuiteResult {
        suite: suite.to_string(),
        verdict,
        checks,
    }
}

fn fold_check(name: String, kind: Kind, obs: &[(usize, &PointCheck)]) -> CheckResult {
    let mut value: Option<(f64, usize)> = None;
    let mut evaluated = 0;
    let mut failing = 0;
    let mut note: Option<String> = None;
    let mut skip_reason: Option<String> = None;
    for &(i, c) in obs {
        match &c.observation {
            Observation::Skipped(reason) => {
                skip_reason.get_or_insert_with(|| reason.clone());
                continue;
            }
            Observation::Residual(r) => {
                let tol = kind.tolerance().unwrap_or(0.0);
                evaluated += 1;
                // NaN never passes
                if !(*r <= tol) {
                    failing += 1;
                }
                let r = if r.is_nan() { f64::INFINITY } else { *r };
                if value.map_or(true, |(v, _)| r > v) {
                    value = Some((r, i));
                }
            }
            Observation::Witness(m) => {
                let thr = kind.tolerance().unwrap_or(0.0);
                evaluated += 1;
                if !(*m > thr) {
                    failing += 1;
                }
                let m = if m.is_nan() { f64::NEG_INFINITY } else { *m };
                if value.map_or(true, |(v, _)| m < v) {
                    value = Some((m, i));
                }
            }
            Observation::Agreement { agree, detail } => {
                evaluated += 1;
                if !agree {
                    failing += 1;
                    if note.is_none() {
                        note = Some(format!("point {i}: {detail}"));
                        value = Some((0.0, i));
                    }
                }
            }
            Observation::Value(v) => {
                evaluated += 1;
                if value.map_or(true, |(best, _)| v.abs() > best.abs() || best.is_nan()) {
                    value = Some((*v, i));
                }
            }
        }
    }
    let verdict = if evaluated == 0 {
        Verdict::Skipped
    } else {
        match kind {
            Kind::Info => Verdict::Info,
            Kind::Witness(_) if failing > 0 => Verdict::Inconclusive,
            _ if failing > 0 => Verdict::Fail,
            _ => Verdict::Pass,
        }
    };
    if verdict == Verdict::Skipped {
        note = skip_reason;
    } else if evaluated < obs.len() && note.is_none() {
        note = Some(format!("skipped at {} of {} points", obs.len() - evaluated, obs.len()));
    }
    let value = match kind {
        Kind::Consistency => failing as f64,
        _ => value.map_or(0.0, |(v, _)| v),
    };
    let point = match kind {
        Kind::Consistency => obs
            .iter()
            .find(|(_, c)| matches!(c.observation, Observation::Agreement { agree: false, .. }))
            .map(|(i, _)| *i),
        _ => obs
            .iter()
            .find(|(_, c)| observed(&c.observation) == Some(value))
            .map(|(i, _)| *i),
    };
    CheckResult {
        name,
        kind: kind.label(),
        tolerance: kind.tolerance(),
        value,
        point,
        evaluated,
        failing,
        verdict,
        note,
    }
}

fn observed(o: &Observation) -> Option<f64> {
    match o {
        Observation::Residual(r) => Some(if r.is_nan() { f64::INFINITY } else { *r }),
        Observation::Witness(m) => Some(if m.is_nan() { f64::NEG_INFINITY } else { *m }),
        Observation::Value(v) => Some(*v),
        _ => None,
    }
}

/// Tolerances by derivative depth of the identity being checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identities involving at most first derivatives of the metric.
    pub first_derivative: f64,
    /// Identities involving a covariant derivative of a tensor.
    pub tensor_derivative: f64,
    /// Curvature identities.
    pub curvature: f64,
    /// Orthonormality of computed frames.
    pub frame: f64,
    /// Quantities that are equal by construction.
    pub exact: f64,
    /// Magnitude a witness must exceed.
    pub witness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            first_derivative: 1e-9,
            tensor_derivative: 1e-8,
            curvature: 1e-7,
            frame: 1e-10,
            exact: 1e-12,
            witness: 0.1,
        }
    }
}

impl Tolerances {
    /// Scale every residual tolerance; the witness threshold is a property
    /// of the claim, not of round-off, and stays fixed.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            first_derivative: self.first_derivative * factor,
            tensor_derivative: self.tensor_derivative * factor,
            curvature: self.curvature * factor,
            frame: self.frame * factor,
            exact: self.exact * factor,
            witness: self.witness,
        }
    }
}
