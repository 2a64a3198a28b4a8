//! End-to-end acceptance run over the bundled fixtures.
//!
//! Prints one PASS/FAIL line per criterion, then fails if any criterion did.

mod common;

use subverify::runner::run;
use subverify::submersion::{differential_at, XiPosition};
use subverify::{fixture, linalg, RunOptions, RunReport, Verdict};

const MAP_FIXTURES: [&str; 5] = common::MAP_FIXTURES;

struct Outcome {
    ok: bool,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn line(&self, n: usize) -> String {
        let status = if self.ok { "PASS" } else { "FAIL" };
        let detail = if self.ok { self.notes.join("; ") } else { self.failures.join("; ") };
        format!("criterion {n}: {status} {detail}")
    }
}

fn report(name: &str, suite: &str, points: usize, seed: u64) -> RunReport {
    let model = fixture(name).unwrap();
    let opts = RunOptions {
        suite: suite.to_string(),
        points: Some(points),
        seed: Some(seed),
        ..RunOptions::default()
    };
    run(&model, &opts).unwrap()
}

/// Require a check to pass and stay within `limit`.
fn bounded(out: &mut Outcome, r: &RunReport, fixture: &str, suite: &str, check: &str, limit: f64) {
    match r.check(suite, check) {
        Some(c) => out.require(
            c.verdict == Verdict::Pass && c.value <= limit,
            format!("{fixture} {check} = {:e} ({})", c.value, c.verdict.as_str()),
        ),
        None => out.require(false, format!("{fixture} {check} missing")),
    }
}

/// Every non-info check in the suite must pass.
fn suite_passes(out: &mut Outcome, r: &RunReport, fixture: &str, suite: &str) {
    let Some(s) = r.suite(suite) else {
        return out.require(false, format!("{fixture} suite {suite} missing"));
    };
    for c in &s.checks {
        if matches!(c.verdict, Verdict::Fail | Verdict::Inconclusive) {
            out.require(false, format!("{fixture} {suite}/{} = {:e} ({})", c.name, c.value, c.verdict.as_str()));
        }
    }
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    for name in ["example1", "example1-r7"] {
        let r = report(name, "sasakian", 100, 7);
        for (suite, check) in [
            ("almost_contact", "phi_squared"),
            ("almost_contact", "phi_xi"),
            ("almost_contact", "eta_xi"),
            ("almost_contact", "metric_compatible"),
            ("almost_contact", "eta_equals_g_xi"),
            ("contact_form", "d_eta_equals_Phi"),
            ("sasakian_structure", "nabla_phi"),
            ("sasakian_structure", "nabla_xi"),
        ] {
            bounded(&mut out, &r, name, suite, check, 1e-8);
        }
        let r20 = report(name, "sasakian", 20, 7);
        for check in ["curvature_R_xi", "ricci_xi"] {
            bounded(&mut out, &r20, name, "sasakian_structure", check, 1e-7);
        }
        out.require(r.verdict == Verdict::Pass, format!("{name} verdict {}", r.verdict.as_str()));
        out.note(format!("{name} {} points", r.environment.points));
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let r = report("example1-printed-metric", "sasakian", 20, 7);
    match r.check("almost_contact", "eta_equals_g_xi_at_xi") {
        Some(c) => {
            out.require((c.value - 0.75).abs() <= 1e-9, format!("residual at xi {}", c.value));
            out.require(c.verdict == Verdict::Fail, "eta(xi) = g(xi, xi) did not fail");
            out.note(format!("residual at xi {}", c.value));
        }
        None => out.require(false, "check missing"),
    }
    out.require(r.exit_code() == 1, "run did not fail");
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let r = report("example2", "axioms", 50, 7);
    for check in ["full_rank", "horizontal_isometry", "target_metric_positive_definite"] {
        bounded(&mut out, &r, "example2", "axioms", check, 1e-9);
    }
    match &r.classification {
        Some(c) => {
            out.require(c.anti_invariant, "not anti-invariant");
            out.require(c.xi_position == XiPosition::Vertical, format!("xi {:?}", c.xi_position));
            out.require(c.phi_ker_equals_complement, "phi(ker) differs from the complement");
            out.require(c.m == Some(2) && c.n == 2, format!("m {:?}, n {}", c.m, c.n));
            out.require(c.consistent_across_points, "classification varies");
        }
        None => out.require(false, "no classification"),
    }
    let model = fixture("example2").unwrap();
    let spec = model.submersion.as_ref().unwrap();
    let mut worst: f64 = 0.0;
    for p in common::points(&model, 50, 7) {
        // H_1 = 2∂_{y1} + 2(∂_{x1} + y1 ∂_z)
        let h1 = [2.0, 0.0, 2.0, 0.0, 2.0 * p[2]];
        let push = linalg::mat_vec(&differential_at(spec, &p).unwrap(), &h1);
        let gn = spec.target.matrix_at(&spec.image(&p).unwrap()).unwrap();
        worst = worst.max((linalg::bilinear(&gn, &push, &push) - 2.0).abs());
    }
    out.require(worst <= 1e-12, format!("g_N(F_*H1, F_*H1) off by {worst:e}"));
    out.note(format!("g_N(F_*H1, F_*H1) = 2 within {worst:e}"));
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    // m + 1 = n presumes the complement is φ(ker) ⊕ span ξ, which needs dim μ = 1
    for (name, mu, relation) in [("example3", 1, Some(true)), ("example4", 3, None)] {
        let r = report(name, "axioms", 50, 7);
        suite_passes(&mut out, &r, name, "axioms");
        match &r.classification {
            Some(c) => {
                out.require(c.anti_invariant, format!("{name} not anti-invariant"));
                out.require(c.xi_position == XiPosition::Horizontal, format!("{name} xi {:?}", c.xi_position));
                out.require(
                    c.dimension_relation == relation,
                    format!("{name} dimension relation {:?}, m {:?}, n {}", c.dimension_relation, c.m, c.n),
                );
                out.require(c.mu_dim == mu, format!("{name} mu dim {}", c.mu_dim));
                out.note(format!("{name} m {:?} n {} mu {}", c.m, c.n, c.mu_dim));
            }
            None => out.require(false, format!("{name} no classification")),
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    for name in MAP_FIXTURES {
        let r = report(name, "fundamental", 30, 7);
        for check in [
            "decomposition_vv",
            "decomposition_vh",
            "decomposition_hv",
            "decomposition_hh",
            "A_half_bracket",
            "T_first_slot_projection",
        ] {
            bounded(&mut out, &r, name, "fundamental", check, 1e-8);
        }
        for check in ["T_symmetric", "A_antisymmetric", "T_skew", "A_skew"] {
            bounded(&mut out, &r, name, "fundamental", check, 1e-9);
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    for (name, prefix) in [("example2", "vxi_"), ("example3", "hxi_"), ("example4", "hxi_")] {
        let r = report(name, "lemmas", 50, 7);
        let Some(s) = r.suite("lemmas") else {
            out.require(false, format!("{name} lemmas missing"));
            continue;
        };
        let mut count = 0;
        for c in s.checks.iter().filter(|c| c.name.starts_with(prefix)) {
            count += 1;
            out.require(
                c.verdict == Verdict::Pass && c.value <= 1e-8,
                format!("{name} {} = {:e} ({})", c.name, c.value, c.verdict.as_str()),
            );
        }
        out.require(count > 0, format!("{name} has no {prefix} checks"));
        suite_passes(&mut out, &r, name, "lemmas");
        out.note(format!("{name} {count} identities"));
    }
    out
}

fn witness(out: &mut Outcome, r: &RunReport, name: &str, suite: &str, check: &str) {
    match r.check(suite, check) {
        Some(c) => {
            out.require(c.verdict == Verdict::Pass, format!("{name} {check} {} ({:e})", c.verdict.as_str(), c.value));
            out.note(format!("{name} {check} {:.3}", c.value));
        }
        None => out.require(false, format!("{name} {check} missing")),
    }
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let r2 = report("example2", "all", 20, 7);
    witness(&mut out, &r2, "example2", "lemmas", "T_U_xi_witness");
    witness(&mut out, &r2, "example2", "lemmas", "not_umbilical_witness");
    witness(&mut out, &r2, "example2", "harmonic", "not_totally_geodesic_witness");
    let r3 = report("example3", "criteria", 20, 7);
    witness(&mut out, &r3, "example3", "criteria", "horizontal_not_integrable_witness");
    witness(&mut out, &r3, "example3", "criteria", "no_totally_geodesic_horizontal_witness");
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for name in MAP_FIXTURES {
        let r = report(name, "harmonic", 50, 7);
        match r.check("harmonic", "harmonic_coherence") {
            Some(c) => out.require(c.verdict == Verdict::Pass, format!("{name} coherence: {}", c.note.clone().unwrap_or_default())),
            None => out.require(false, format!("{name} coherence missing")),
        }
        bounded(&mut out, &r, name, "harmonic", "sff_horizontal", 1e-8);
        bounded(&mut out, &r, name, "harmonic", "sff_symmetry", 1e-8);
    }
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    for name in subverify::fixture_names() {
        let d = common::compare_with_oracle(&fixture(name).unwrap(), 10, 9);
        out.require(d.max() <= 1e-5, format!("{name} {d:?}"));
        out.note(format!("{name} {:.1e}", d.max()));
    }
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    for name in subverify::fixture_names() {
        let a = report(name, "all", 15, 11).to_json();
        let b = report(name, "all", 15, 11).to_json();
        out.require(a == b, format!("{name} reports differ"));
    }
    out.note("all fixtures byte-identical");
    out
}

#[test]
fn acceptance_criteria() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let outcome = c();
        println!("{}", outcome.line(i + 1));
        if !outcome.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
