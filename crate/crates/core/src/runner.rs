//! Sampling, suite orchestration and report output.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contact::{check_almost_contact, check_contact_form, check_sasakian};
use crate::error::RunError;
use crate::harmonic::harmonic_checks;
use crate::model::Model;
use crate::oneill::{criteria_checks, fundamental_checks, lemma_checks, PointContext};
use crate::report::{aggregate, CheckResult, PointCheck, SuiteResult, Tolerances, Verdict};
use crate::submersion::{check_classification, check_submersion_axioms, AntiInvarianceReport, XiPosition};

pub const SCHEMA_VERSION: &str = "1.0";
pub const MAX_REJECTIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    AlmostContact,
    ContactForm,
    SasakianStructure,
    Axioms,
    Fundamental,
    Lemmas,
    Criteria,
    Harmonic,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::AlmostContact,
        Suite::ContactForm,
        Suite::SasakianStructure,
        Suite::Axioms,
        Suite::Fundamental,
        Suite::Lemmas,
        Suite::Criteria,
        Suite::Harmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AlmostContact => "almost_contact",
            Suite::ContactForm => "contact_form",
            Suite::SasakianStructure => "sasakian_structure",
            Suite::Axioms => "axioms",
            Suite::Fundamental => "fundamental",
            Suite::Lemmas => "lemmas",
            Suite::Criteria => "criteria",
            Suite::Harmonic => "harmonic",
        }
    }

    fn needs_map(self) -> bool {
        !matches!(self, Suite::AlmostContact | Suite::ContactForm | Suite::SasakianStructure)
    }

    fn needs_context(self) -> bool {
        matches!(self, Suite::Fundamental | Suite::Lemmas | Suite::Criteria | Suite::Harmonic)
    }

    /// Expand a selector: `all`, `sasakian`, `lemmas` (fundamental and
    /// lemma suites) or a single suite name.
    pub fn select(selector: &str) -> Result<Vec<Suite>, RunError> {
        Ok(match selector {
            "all" => Self::ALL.to_vec(),
            "sasakian" => vec![Suite::AlmostContact, Suite::ContactForm, Suite::SasakianStructure],
            "lemmas" => vec![Suite::Fundamental, Suite::Lemmas],
            other => vec![*Self::ALL
                .iter()
                .find(|s| s.name() == other)
                .ok_or_else(|| RunError::UnknownSuite(other.to_string()))?],
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub suite: String,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            points: None,
            seed: None,
            tol_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub name: String,
    pub description: String,
    pub source_dim: usize,
    pub target_dim: Option<usize>,
    pub has_structure: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub tool_version: &'static str,
    pub seed: u64,
    pub requested_points: usize,
    pub points: usize,
    pub rejections: usize,
    pub sample_box: [f64; 2],
    pub tol_scale: f64,
    pub tolerances: Tolerances,
}

/// The classification at the first sample point, and whether every other
/// point agrees with it.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub anti_invariant: bool,
    pub xi_position: XiPosition,
    pub phi_ker_equals_complement: bool,
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    pub mu_dim: usize,
    pub m: Option<usize>,
    pub n: usize,
    pub dimension_relation: Option<bool>,
    pub consistent_across_points: bool,
}

impl Classification {
    fn from_reports(reports: &[Option<AntiInvarianceReport>]) -> Option<Self> {
        let first = reports.iter().flatten().next()?;
        let consistent = reports.iter().all(|r| r.as_ref().is_some_and(|r| r.same_outcome(first)));
        Some(Self {
            anti_invariant: first.anti_invariant,
            xi_position: first.xi_position,
            phi_ker_equals_complement: first.phi_ker_equals_complement,
            vertical_dim: first.vertical_dim,
            horizontal_dim: first.horizontal_dim,
            mu_dim: first.mu_dim,
            m: first.m,
            n: first.n,
            dimension_relation: first.dimension_relation,
            consistent_across_points: consistent,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub model: ModelInfo,
    pub environment: Environment,
    pub verdict: Verdict,
    pub classification: Option<Classification>,
    pub suites: Vec<SuiteResult>,
    /// Selected suites that do not apply to this model (e.g. no map).
    pub skipped_suites: Vec<String>,
}

impl RunReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == name)
    }

    pub fn check(&self, suite: &str, name: &str) -> Option<&CheckResult> {
        self.suite(suite)?.check(name)
    }

    /// 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let e = &self.environment;
        let _ = writeln!(s, "model   {} ({})", self.model.name, self.model.description);
        let _ = writeln!(
            s,
            "sample  {} points in [{}, {}]^{}, seed {}, {} rejected, tolerance scale {}",
            e.points, e.sample_box[0], e.sample_box[1], self.model.source_dim, e.seed, e.rejections, e.tol_scale
        );
        if let Some(c) = &self.classification {
            let _ = writeln!(
                s,
                "class   anti-invariant {}, xi {:?}, dim V {}, dim H {}, dim mu {}{}",
                c.anti_invariant,
                c.xi_position,
                c.vertical_dim,
                c.horizontal_dim,
                c.mu_dim,
                if c.consistent_across_points { "" } else { " (varies across points)" }
            );
        }
        for suite in &self.suites {
            let _ = writeln!(s, "\n[{}] {}", suite.suite, suite.verdict.as_str().to_uppercase());
            for c in &suite.checks {
                let tol = c.tolerance.map_or(String::from("-"), |t| format!("{t:.1e}"));
                let at = c.point.map_or(String::new(), |p| format!(" @{p}"));
                let _ = write!(
                    s,
                    "  {:<13} {:<44} {:>12.4e} tol {:>8}{}",
                    c.verdict.as_str(),
                    c.name,
                    c.value,
                    tol,
                    at
                );
                if let Some(n) = &c.note {
                    let _ = write!(s, "  ({n})");
                }
                s.push('\n');
            }
        }
        if !self.skipped_suites.is_empty() {
            let _ = writeln!(s, "\nnot applicable: {}", self.skipped_suites.join(", "));
        }
        let _ = writeln!(s, "\nverdict {}", self.verdict.as_str().to_uppercase());
        s
    }
}

/// Uniform points in the model's box, rejecting those outside its guards.
pub fn sample_points(model: &Model, count: usize, seed: u64) -> Result<(Vec<Vec<f64>>, usize), RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (model.sample.low, model.sample.high);
    let mut points = Vec::with_capacity(count);
    let mut rejections = 0;
    while points.len() < count && rejections < MAX_REJECTIONS {
        let p: Vec<f64> = (0..model.dim()).map(|_| rng.gen_range(lo..hi)).collect();
        if model.admits(&p) {
            points.push(p);
        } else {
            rejections += 1;
        }
    }
    if points.is_empty() {
        return Err(RunError::NoAdmissiblePoints { rejections });
    }
    Ok((points, rejections))
}

fn failed(name: &str, err: impl std::fmt::Display) -> Vec<PointCheck> {
    vec![PointCheck::agreement(name, false, err.to_string())]
}

fn unwrap_checks<E: std::fmt::Display>(r: Result<Vec<PointCheck>, E>) -> Vec<PointCheck> {
    r.unwrap_or_else(|e| failed("evaluation", e))
}

fn random_vector(dim: usize, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_a11);
    rng.set_stream(index as u64);
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn run(model: &Model, opts: &RunOptions) -> Result<RunReport, RunError> {
    let suites = Suite::select(&opts.suite)?;
    let seed = opts.seed.unwrap_or(model.sample.seed);
    let requested = opts.points.unwrap_or(model.sample.points);
    let tol = model.tolerances.scaled(opts.tol_scale);
    let (points, rejections) = sample_points(model, requested, seed)?;

    let (active, skipped): (Vec<Suite>, Vec<Suite>) =
        suites.into_iter().partition(|s| !s.needs_map() || model.submersion.is_some());
    let sm = &model.manifold;

    let mut classification = None;
    let contexts: Vec<Result<PointContext, String>> = match &model.submersion {
        Some(spec) if active.iter().any(|s| s.needs_context()) => points
            .par_iter()
            .enumerate()
            .map(|(i, p)| PointContext::new(spec, p, seed, i, &tol).map_err(|e| e.to_string()))
            .collect(),
        _ => Vec::new(),
    };
    let with_context = |f: fn(&PointContext) -> Vec<PointCheck>| -> Vec<Vec<PointCheck>> {
        contexts
            .par_iter()
            .map(|c| match c {
                Ok(ctx) => f(ctx),
                Err(e) => failed("point_context", e),
            })
            .collect()
    };

    let mut results = Vec::new();
    for suite in &active {
        let per_point: Vec<Vec<PointCheck>> = match suite {
            Suite::AlmostContact => points
                .par_iter()
                .map(|p| unwrap_checks(check_almost_contact(sm, p, &tol)))
                .collect(),
            Suite::ContactForm => points
                .par_iter()
                .map(|p| unwrap_checks(check_contact_form(sm, p, &tol)))
                .collect(),
            Suite::SasakianStructure => points
                .par_iter()
                .map(|p| unwrap_checks(check_sasakian(sm, p, &tol)))
                .collect(),
            Suite::Axioms => {
                let spec = model.submersion.as_ref().expect("active suites have a map");
                let rows: Vec<(Vec<PointCheck>, Option<AntiInvarianceReport>)> = points
                    .par_iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut checks =
                            unwrap_checks(check_submersion_axioms(spec, p, &tol, &random_vector(p.len(), seed, i)));
                        match check_classification(spec, p, &tol) {
                            Ok((c, report)) => {
                                checks.extend(c);
                                (checks, report)
                            }
                            Err(e) => {
                                checks.extend(failed("classification", e));
                                (checks, None)
                            }
                        }
                    })
                    .collect();
                let (checks, reports): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
                classification = Classification::from_reports(&reports);
                checks
            }
            Suite::Fundamental => with_context(fundamental_checks),
            Suite::Lemmas => with_context(lemma_checks),
            Suite::Criteria => with_context(criteria_checks),
            Suite::Harmonic => with_context(harmonic_checks),
        };
        results.push(aggregate(suite.name(), &per_point));
    }
    if classification.is_none() && !contexts.is_empty() {
        let reports: Vec<_> = contexts.iter().map(|c| c.as_ref().ok().and_then(|c| c.class.clone())).collect();
        classification = Classification::from_reports(&reports);
    }

    let verdict = if results.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::combine(results.iter().map(|r| r.verdict))
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        model: ModelInfo {
            name: model.name.clone(),
            description: model.description.clone(),
            source_dim: model.dim(),
            target_dim: model.submersion.as_ref().map(|s| s.target_dim()),
            has_structure: sm.structure.is_some(),
        },
        environment: Environment {
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            requested_points: requested,
            points: points.len(),
            rejections,
            sample_box: [model.sample.low, model.sample.high],
            tol_scale: opts.tol_scale,
            tolerances: tol,
        },
        verdict,
        classification,
        suites: results,
        skipped_suites: skipped.iter().map(|s| s.name().to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn selectors_expand() {
        assert_eq!(Suite::select("all").unwrap().len(), 8);
        assert_eq!(Suite::select("sasakian").unwrap().len(), 3);
        assert_eq!(Suite::select("harmonic").unwrap(), vec![Suite::Harmonic]);
        assert!(matches!(Suite::select("bogus"), Err(RunError::UnknownSuite(_))));
    }

    #[test]
    fn sampling_is_seeded_and_respects_guards() {
        let m = fixture("example3").unwrap();
        let (a, _) = sample_points(&m, 10, 3).unwrap();
        let (b, _) = sample_points(&m, 10, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| m.admits(p)));
        let (c, _) = sample_points(&m, 10, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn impossible_guard_errors() {
        let text = crate::fixtures::fixture_source("flat-r2-r1").unwrap().to_string() + "\n[guard]\nsource = [\"-1\"]\n";
        let m = crate::model::parse_model(&text).unwrap();
        assert!(matches!(
            sample_points(&m, 1, 0),
            Err(RunError::NoAdmissiblePoints { rejections: MAX_REJECTIONS })
        ));
    }

    #[test]
    fn map_suites_skipped_without_map() {
        let m = fixture("example1").unwrap();
        let opts = RunOptions {
            suite: "axioms".into(),
            points: Some(2),
            ..Default::default()
        };
        let r = run(&m, &opts).unwrap();
        assert!(r.suites.is_empty());
        assert_eq!(r.skipped_suites, vec!["axioms"]);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}
