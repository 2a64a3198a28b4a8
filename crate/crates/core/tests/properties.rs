mod common;

use proptest::prelude::*;
use subverify::oneill::PointContext;
use subverify::runner::{run, sample_points};
use subverify::submersion::{differential_at, split_frame_at};
use subverify::{fixture, linalg, parse_expression, RunOptions, Tolerances, Verdict};

fn coord() -> impl Strategy<Value = f64> {
    -0.9..0.9f64
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

fn admissible(name: &str, p: &[f64]) -> bool {
    let model = fixture(name).unwrap();
    model.admits(p) && model.submersion.as_ref().map_or(true, |s| s.admits(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_derivatives_match_finite_differences(
        a in -3.0..3.0f64, b in -3.0..3.0f64, c in 0.1..2.0f64,
        x in coord(), y in coord(), z in coord(),
    ) {
        let text = format!("{a}*x^3*y - {b}*y*z^2 + x*z/({c} + y^2) + (x - z)^4");
        let e = parse_expression(&text, &["x", "y", "z"]).unwrap();
        let p = [x, y, z];
        let jet = e.evaluate_jet(&p).unwrap();
        prop_assert!((jet.value() - e.value_at(&p).unwrap()).abs() < 1e-12);
        let h = common::STEP;
        for i in 0..3 {
            let fd = (e.value_at(&common::shifted(&p, i, h)).unwrap()
                - e.value_at(&common::shifted(&p, i, -h)).unwrap()) / (2.0 * h);
            prop_assert!((jet.gradient(i) - fd).abs() < 1e-7, "d/dx{i}: {} vs {fd}", jet.gradient(i));
            for j in 0..3 {
                let d = |q: &[f64]| {
                    (e.value_at(&common::shifted(q, j, h)).unwrap()
                        - e.value_at(&common::shifted(q, j, -h)).unwrap()) / (2.0 * h)
                };
                let fd2 = (d(&common::shifted(&p, i, h)) - d(&common::shifted(&p, i, -h))) / (2.0 * h);
                prop_assert!((jet.hessian(i, j) - fd2).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn split_frame_is_orthonormal_and_vertical_is_kernel(
        which in 0usize..3, p in prop::collection::vec(coord(), 5),
    ) {
        let name = ["example2", "example3", "example4"][which];
        let model = fixture(name).unwrap();
        let p = p.into_iter().chain([0.2, -0.3]).take(model.dim()).collect::<Vec<_>>();
        prop_assume!(admissible(name, &p));
        let spec = model.submersion.as_ref().unwrap();
        let frame = split_frame_at(spec, &p).unwrap();
        let all: Vec<_> = frame.all().collect();
        prop_assert_eq!(all.len(), model.dim());
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((frame.inner(u, v) - expected).abs() < 1e-10);
            }
        }
        let df = differential_at(spec, &p).unwrap();
        for v in &frame.vertical {
            prop_assert!(linalg::max_abs(&linalg::mat_vec(&df, v)) < 1e-10);
        }
    }

    #[test]
    fn vertical_projection_is_idempotent(p in prop::collection::vec(coord(), 5), v in vector(5)) {
        let spec = fixture("example2").unwrap().submersion.unwrap();
        let ctx = PointContext::new(&spec, &p, 3, 0, &Tolerances::default()).unwrap();
        let once = ctx.vpart(&v);
        prop_assert!(linalg::max_abs(&linalg::sub(&ctx.vpart(&once), &once)) < 1e-12);
        let sum = linalg::add(&once, &ctx.hpart(&v));
        prop_assert!(linalg::max_abs(&linalg::sub(&sum, &v)) < 1e-12);
        prop_assert!(ctx.inner(&once, &ctx.hpart(&v)).abs() < 1e-12);
    }

    #[test]
    fn t_symmetric_and_a_antisymmetric_on_example2(
        p in prop::collection::vec(coord(), 5), u in vector(5), w in vector(5),
    ) {
        let spec = fixture("example2").unwrap().submersion.unwrap();
        let ctx = PointContext::new(&spec, &p, 5, 0, &Tolerances::default()).unwrap();
        let (uv, wv) = (ctx.vpart(&u), ctx.vpart(&w));
        let (uh, wh) = (ctx.hpart(&u), ctx.hpart(&w));
        let t = linalg::sub(&ctx.t(&uv, &wv), &ctx.t(&wv, &uv));
        let a = linalg::add(&ctx.a(&uh, &wh), &ctx.a(&wh, &uh));
        prop_assert!(linalg::max_abs(&t) < 1e-10);
        prop_assert!(linalg::max_abs(&a) < 1e-10);
    }

    #[test]
    fn second_fundamental_form_is_symmetric(
        which in 0usize..5, p in prop::collection::vec(coord(), 7), u in vector(7), w in vector(7),
    ) {
        let name = common::MAP_FIXTURES[which];
        let model = fixture(name).unwrap();
        let n = model.dim();
        let (p, u, w) = (&p[..n], &u[..n], &w[..n]);
        prop_assume!(admissible(name, p));
        let spec = model.submersion.as_ref().unwrap();
        let ctx = PointContext::new(spec, p, 5, 0, &Tolerances::default()).unwrap();
        let d = linalg::sub(&ctx.map.sff(u, w), &ctx.map.sff(w, u));
        prop_assert!(linalg::max_abs(&d) < 1e-9);
    }

    #[test]
    fn samples_stay_in_the_box_and_respect_guards(seed in any::<u64>(), which in 0usize..3) {
        let name = ["example1", "example3", "example4"][which];
        let model = fixture(name).unwrap();
        let (pts, _) = sample_points(&model, 20, seed).unwrap();
        prop_assert_eq!(pts.len(), 20);
        for p in &pts {
            prop_assert!(p.iter().all(|&x| x >= model.sample.low && x < model.sample.high));
            prop_assert!(model.admits(p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Loosening tolerances never turns a passing bound check into a failing one.
    #[test]
    fn larger_tolerance_scale_never_fails_more(seed in 0u64..1000, small in 0.01..1.0f64, factor in 1.0..1e9f64) {
        let model = fixture("example3").unwrap();
        let opts = |scale: f64| RunOptions {
            suite: "fundamental".into(),
            points: Some(4),
            seed: Some(seed),
            tol_scale: scale,
        };
        let tight = run(&model, &opts(small)).unwrap();
        let loose = run(&model, &opts(small * factor)).unwrap();
        for (a, b) in tight.suites[0].checks.iter().zip(&loose.suites[0].checks) {
            prop_assert_eq!(&a.name, &b.name);
            prop_assert!(b.failing <= a.failing, "{}: {} -> {}", a.name, a.failing, b.failing);
            if a.verdict == Verdict::Pass {
                prop_assert!(b.verdict == Verdict::Pass);
            }
        }
    }
}
