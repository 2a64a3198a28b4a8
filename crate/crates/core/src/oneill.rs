//! O'Neill tensors T and A and the identity suites built on them.
//!
//! Every suite works on a [`PointContext`]. Tensor arguments are point
//! vectors extended with constant components; checks that are not tensorial
//! in an argument build a genuine vertical or horizontal field from it by
//! applying the projector field.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SubmersionError;
use crate::germ;
use crate::harmonic::MapHessian;
use crate::linalg::{self, Matrix};
use crate::report::{Kind, PointCheck, Tolerances};
use crate::submersion::{
    classify_anti_invariance, mu_basis, split_frame_at, AntiInvarianceReport, SplitFrame, SubmersionGerm,
    SubmersionSpec, XiPosition,
};

/// Random directions drawn per point for witness searches.
pub const WITNESS_SAMPLES: usize = 20;
/// Random argument combinations per point for identity and equivalence checks.
pub const RANDOM_COMBINATIONS: usize = 10;

/// Everything the suites need at one sample point.
pub struct PointContext<'a> {
    pub spec: &'a SubmersionSpec,
    pub point: Vec<f64>,
    pub frame: SplitFrame<f64>,
    pub class: Option<AntiInvarianceReport>,
    pub lean: SubmersionGerm<f64>,
    full: OnceLock<SubmersionGerm<f64>>,
    pub map: MapHessian,
    pub tol: Tolerances,
    pv: Matrix<f64>,
    /// `dpv[k]` = ∂_k P_V at the point.
    dpv: Vec<Matrix<f64>>,
    phi: Option<Matrix<f64>>,
    xi: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    /// Random g-unit vectors in the horizontal space, the vertical space and
    /// the whole tangent space (`2 * WITNESS_SAMPLES` each).
    pub random_h: Vec<Vec<f64>>,
    pub random_v: Vec<Vec<f64>>,
    pub random_all: Vec<Vec<f64>>,
}

fn random_unit(rng: &mut ChaCha8Rng, frame: &SplitFrame<f64>, basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    if basis.is_empty() {
        return vec![0.0; dim];
    }
    loop {
        let mut v = vec![0.0; dim];
        for b in basis {
            let c: f64 = rng.gen_range(-1.0..1.0);
            v = linalg::add(&v, &linalg::scale(b, c));
        }
        let n = frame.norm(&v);
        if n > 1e-3 {
            return linalg::scale(&v, 1.0 / n);
        }
    }
}

impl<'a> PointContext<'a> {
    pub fn new(
        spec: &'a SubmersionSpec,
        p: &[f64],
        seed: u64,
        index: usize,
        tol: &Tolerances,
    ) -> Result<Self, SubmersionError> {
        let frame = split_frame_at(spec, p)?;
        let class = classify_anti_invariance(spec, &frame, tol.first_derivative)?;
        let lean = SubmersionGerm::new(spec, p, 2)?;
        let map = MapHessian::new(spec, p)?;
        let (phi, xi, eta) = match &spec.source.structure {
            Some(st) => (Some(st.phi_at(p)?), Some(st.xi_at(p)?), Some(st.eta_at(p)?)),
            None => (None, None, None),
        };
        let pv: Matrix<f64> = lean.pv.iter().map(|r| r.iter().map(|t| t.value()).collect()).collect();
        let dpv = (0..p.len())
            .map(|k| lean.pv.iter().map(|r| r.iter().map(|t| t.partial(k)).collect()).collect())
            .collect();
        let mu = phi.as_ref().map_or(Vec::new(), |f| mu_basis(&frame, f).1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let m = p.len();
        let all: Vec<Vec<f64>> = frame.all().cloned().collect();
        let count = 2 * WITNESS_SAMPLES;
        let random_h = (0..count).map(|_| random_unit(&mut rng, &frame, &frame.horizontal, m)).collect();
        let random_v = (0..count).map(|_| random_unit(&mut rng, &frame, &frame.vertical, m)).collect();
        let random_all = (0..count).map(|_| random_unit(&mut rng, &frame, &all, m)).collect();
        Ok(Self {
            spec,
            point: p.to_vec(),
            frame,
            class,
            lean,
            full: OnceLock::new(),
            map,
            tol: *tol,
            pv,
            dpv,
            phi,
            xi,
            eta,
            mu,
            random_h,
            random_v,
            random_all,
        })
    }

    /// Germ exact to third order in the metric, for checks that differentiate
    /// a tensor built from projections.
    pub fn full(&self) -> &SubmersionGerm<f64> {
        self.full.get_or_init(|| {
            SubmersionGerm::new(self.spec, &self.point, 3).expect("order-2 expansion succeeded at this point")
        })
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.frame.inner(u, v)
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.frame.norm(v)
    }

    /// ∇_X(P Y) at the point for constant X, Y, with P = P_V or P_H.
    fn nabla_projected(&self, x: &[f64], y: &[f64], vertical: bool) -> Vec<f64> {
        let py = if vertical { self.vpart(y) } else { self.hpart(y) };
        let sign = if vertical { 1.0 } else { -1.0 };
        let mut out = self.map.source.gamma_contract(x, &py);
        for (k, xk) in x.iter().enumerate() {
            if *xk != 0.0 {
                let d = linalg::mat_vec(&self.dpv[k], y);
                out = linalg::add(&out, &linalg::scale(&d, sign * xk));
            }
        }
        out
    }

    /// T_E F = H∇_{VE} VF + V∇_{VE} HF.
    pub fn t(&self, e: &[f64], f: &[f64]) -> Vec<f64> {
        let ve = self.vpart(e);
        let a = self.hpart(&self.nabla_projected(&ve, f, true));
        let b = self.vpart(&self.nabla_projected(&ve, f, false));
        linalg::add(&a, &b)
    }

    /// A_E F = V∇_{HE} HF + H∇_{HE} VF.
    pub fn a(&self, e: &[f64], f: &[f64]) -> Vec<f64> {
        let he = self.hpart(e);
        let a = self.vpart(&self.nabla_projected(&he, f, false));
        let b = self.hpart(&self.nabla_projected(&he, f, true));
        linalg::add(&a, &b)
    }

    pub fn phi(&self, v: &[f64]) -> Vec<f64> {
        linalg::mat_vec(self.phi.as_ref().expect("almost contact structure"), v)
    }

    pub fn xi(&self) -> Vec<f64> {
        self.xi.clone().expect("almost contact structure")
    }

    pub fn eta(&self, v: &[f64]) -> f64 {
        let eta = self.eta.as_ref().expect("almost contact structure");
        eta.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn vpart(&self, v: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.pv, v)
    }

    pub fn hpart(&self, v: &[f64]) -> Vec<f64> {
        linalg::sub(v, &self.vpart(v))
    }

    pub fn b(&self, x: &[f64]) -> Vec<f64> {
        self.vpart(&self.phi(x))
    }

    pub fn c(&self, x: &[f64]) -> Vec<f64> {
        self.hpart(&self.phi(x))
    }

    /// Σ T_{u_j} u_j over the vertical frame (k times the mean curvature).
    pub fn mean_curvature_sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.point.len()];
        for u in &self.frame.vertical {
            s = linalg::add(&s, &self.t(u, u));
        }
        s
    }

    /// ξ position if the model is anti-invariant with ξ vertical or horizontal.
    pub fn anti_invariant_case(&self) -> Option<XiPosition> {
        let c = self.class.as_ref()?;
        (c.anti_invariant && c.xi_position != XiPosition::Mixed).then_some(c.xi_position)
    }

    /// Horizontal ξ with (ker F_*)^⊥ = φ(ker F_*) ⊕ span ξ, which forces C = 0.
    pub fn complement_is_phi_ker_plus_xi(&self) -> bool {
        self.anti_invariant_case() == Some(XiPosition::Horizontal)
            && self.class.as_ref().is_some_and(|c| c.dimension_relation.is_some())
    }

    pub fn random_pairs_all(&self) -> impl Iterator<Item = (&Vec<f64>, &Vec<f64>)> {
        self.random_all.chunks(2).take(WITNESS_SAMPLES).map(|c| (&c[0], &c[1]))
    }

    fn random_pairs_h(&self, count: usize) -> impl Iterator<Item = (&Vec<f64>, &Vec<f64>)> {
        self.random_h.chunks(2).take(count).map(|c| (&c[0], &c[1]))
    }

    fn random_pairs_v(&self, count: usize) -> impl Iterator<Item = (&Vec<f64>, &Vec<f64>)> {
        self.random_v.chunks(2).take(count).map(|c| (&c[0], &c[1]))
    }

    /// Horizontal pairs: the frame plus `RANDOM_COMBINATIONS` random pairs.
    fn h_pairs(&self) -> Vec<(&Vec<f64>, &Vec<f64>)> {
        let hs = &self.frame.horizontal;
        let mut out: Vec<_> = hs.iter().flat_map(|x| hs.iter().map(move |y| (x, y))).collect();
        out.extend(self.random_pairs_h(RANDOM_COMBINATIONS));
        out
    }

    fn v_pairs(&self) -> Vec<(&Vec<f64>, &Vec<f64>)> {
        let vs = &self.frame.vertical;
        let mut out: Vec<_> = vs.iter().flat_map(|x| vs.iter().map(move |y| (x, y))).collect();
        out.extend(self.random_pairs_v(RANDOM_COMBINATIONS));
        out
    }

    /// (X, Y, V) triples: horizontal frame pairs with each vertical frame
    /// vector, plus random triples.
    fn hhv_triples(&self) -> Vec<(&Vec<f64>, &Vec<f64>, &Vec<f64>)> {
        let hs = &self.frame.horizontal;
        let vs = &self.frame.vertical;
        let mut out = Vec::new();
        for x in hs {
            for y in hs {
                for v in vs {
                    out.push((x, y, v));
                }
            }
        }
        for i in 0..RANDOM_COMBINATIONS {
            out.push((&self.random_h[2 * i], &self.random_h[2 * i + 1], &self.random_v[i]));
        }
        out
    }

    /// (V, W, X) triples, vertical pairs with each horizontal frame vector.
    fn vvh_triples(&self) -> Vec<(&Vec<f64>, &Vec<f64>, &Vec<f64>)> {
        let hs = &self.frame.horizontal;
        let vs = &self.frame.vertical;
        let mut out = Vec::new();
        for v in vs {
            for w in vs {
                for x in hs {
                    out.push((v, w, x));
                }
            }
        }
        for i in 0..RANDOM_COMBINATIONS {
            out.push((&self.random_v[2 * i], &self.random_v[2 * i + 1], &self.random_h[i]));
        }
        out
    }

    fn target_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        linalg::bilinear(&self.map.target.g, a, b)
    }
}

fn max_over<I, F>(items: I, f: F) -> f64
where
    I: IntoIterator,
    F: Fn(I::Item) -> f64,
{
    items.into_iter().map(f).fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Decomposition of ∇ into T, A and projections; symmetries of T and A.
pub fn fundamental_checks(ctx: &PointContext) -> Vec<PointCheck> {
    let t = ctx.tol.tensor_derivative;
    let t1 = ctx.tol.first_derivative;
    let l = &ctx.lean;
    let vs = &ctx.frame.vertical;
    let hs = &ctx.frame.horizontal;
    let vf = |u: &[f64]| l.v(&l.constant(u));
    let hf = |u: &[f64]| l.h(&l.constant(u));
    let val = |f: &germ::Field<f64>| germ::values(f);

    let decomposition = |e: &[Vec<f64>], f: &[Vec<f64>], ev: bool, fv: bool| {
        let mut r: f64 = 0.0;
        for a in e {
            for b in f {
                let af = if ev { vf(a) } else { hf(a) };
                let bf = if fv { vf(b) } else { hf(b) };
                let nab = l.nabla(&af, &bf);
                let tensor = if ev { ctx.t(a, b) } else { ctx.a(a, b) };
                // the projection of ∇ that is not a tensor
                let rest = if fv { val(&l.v(&nab)) } else { val(&l.h(&nab)) };
                r = r.max(ctx.norm(&linalg::sub(&val(&nab), &linalg::add(&tensor, &rest))));
            }
        }
        r
    };
    let mut out = vec![
        PointCheck::bound("decomposition_vv", t, decomposition(vs, vs, true, true)),
        PointCheck::bound("decomposition_vh", t, decomposition(vs, hs, true, false)),
        PointCheck::bound("decomposition_hv", t, decomposition(hs, vs, false, true)),
        PointCheck::bound("decomposition_hh", t, decomposition(hs, hs, false, false)),
    ];

    let t_sym = max_over(ctx.v_pairs(), |(u, w)| ctx.norm(&linalg::sub(&ctx.t(u, w), &ctx.t(w, u))));
    let a_anti = max_over(ctx.h_pairs(), |(x, y)| ctx.norm(&linalg::add(&ctx.a(x, y), &ctx.a(y, x))));
    let a_half = max_over(ctx.h_pairs(), |(x, y)| {
        let br = val(&l.v(&l.bracket(&hf(x), &hf(y))));
        ctx.norm(&linalg::sub(&ctx.a(x, y), &linalg::scale(&br, 0.5)))
    });
    out.push(PointCheck::bound("T_symmetric", t1, t_sym));
    out.push(PointCheck::bound("A_antisymmetric", t1, a_anti));
    out.push(PointCheck::bound("A_half_bracket", t, a_half));

    let all: Vec<Vec<f64>> = ctx.frame.all().cloned().collect();
    let skew = |op: &dyn Fn(&[f64], &[f64]) -> Vec<f64>| {
        let table: Vec<Vec<Vec<f64>>> = all.iter().map(|d| all.iter().map(|e| op(d, e)).collect()).collect();
        let mut r: f64 = 0.0;
        for row in &table {
            for (i, e) in all.iter().enumerate() {
                for (j, g) in all.iter().enumerate() {
                    r = r.max((ctx.inner(&row[i], g) + ctx.inner(&row[j], e)).abs());
                }
            }
        }
        r
    };
    out.push(PointCheck::bound("T_skew", t1, skew(&|a, b| ctx.t(a, b))));
    out.push(PointCheck::bound("A_skew", t1, skew(&|a, b| ctx.a(a, b))));

    let slot = max_over(ctx.random_pairs_all(), |(e, f)| {
        let dt = ctx.norm(&linalg::sub(&ctx.t(e, f), &ctx.t(&ctx.vpart(e), f)));
        let da = ctx.norm(&linalg::sub(&ctx.a(e, f), &ctx.a(&ctx.hpart(e), f)));
        dt.max(da)
    });
    out.push(PointCheck::bound("T_first_slot_projection", ctx.tol.exact, slot));
    out
}

/// Mean curvature, umbilicity and the witnesses against umbilical fibres.
pub fn fiber_checks(ctx: &PointContext) -> Vec<PointCheck> {
    let t = ctx.tol.tensor_derivative;
    let vs = &ctx.frame.vertical;
    let k = vs.len();
    if k == 0 {
        return vec![PointCheck::skipped("fiber_implications", Kind::Consistency, "fibres are points")];
    }
    let h = linalg::scale(&ctx.mean_curvature_sum(), 1.0 / k as f64);
    let h_norm = ctx.norm(&h);
    let max_t = max_over(ctx.v_pairs(), |(u, w)| ctx.norm(&ctx.t(u, w)));
    let umb = |pairs: Vec<(&Vec<f64>, &Vec<f64>)>| {
        max_over(pairs, |(u, w)| {
            ctx.norm(&linalg::sub(&ctx.t(u, w), &linalg::scale(&h, ctx.inner(u, w))))
        })
    };
    let umbilic = umb(ctx.v_pairs());
    let geodesic = max_t <= t;
    let mut out = vec![
        PointCheck::info("mean_curvature_norm", h_norm),
        PointCheck::info("max_T_norm", max_t),
        PointCheck::info("umbilicity_residual", umbilic),
        PointCheck::agreement(
            "fiber_implications",
            !geodesic || (umbilic <= t && h_norm <= t),
            format!("max |T| {max_t:e}, umbilicity {umbilic:e}, |H| {h_norm:e}"),
        ),
    ];
    if ctx.anti_invariant_case() == Some(XiPosition::Vertical) {
        let mut pairs = ctx.v_pairs();
        pairs.extend(ctx.random_pairs_v(WITNESS_SAMPLES).skip(RANDOM_COMBINATIONS));
        out.push(PointCheck::witness("not_umbilical_witness", ctx.tol.witness, umb(pairs)));
        let xi = ctx.xi();
        let us = vs.iter().chain(ctx.random_v.iter().take(WITNESS_SAMPLES));
        let best = max_over(us, |u| ctx.norm(&ctx.t(u, &xi)));
        out.push(PointCheck::witness("T_U_xi_witness", 0.5, best));
    } else {
        let reason = "applies to anti-invariant submersions with vertical xi";
        out.push(PointCheck::skipped("not_umbilical_witness", Kind::Witness(ctx.tol.witness), reason));
        out.push(PointCheck::skipped("T_U_xi_witness", Kind::Witness(0.5), reason));
    }
    out
}

const VERTICAL_NAMES: [&str; 10] = [
    "vxi_T_U_xi_equals_minus_phi_U",
    "vxi_T_xi_xi",
    "vxi_C_equals_minus_A_xi",
    "vxi_A_xi_perp_phi_ker",
    "vxi_nabla_A_xi",
    "vxi_A_xi_skew",
    "vxi_BC_vanishes",
    "vxi_C2_plus_phiB",
    "vxi_nabla_phi_horizontal",
    "vxi_T_phi",
];
const HORIZONTAL_NAMES: [&str; 9] = [
    "hxi_B_equals_minus_A_xi",
    "hxi_T_xi_vanishes",
    "hxi_A_xi_perp_phi_ker",
    "hxi_nabla_A_xi",
    "hxi_nabla_C",
    "hxi_BC_vanishes",
    "hxi_phi2_decomposition",
    "hxi_nabla_phi_horizontal",
    "hxi_T_phi_commutes",
];

/// Max of `resid(a, b, u, ∇_b F_a)` where `F_a = build(a)` is a field on the
/// third-order germ, over horizontal frame pairs plus random pairs, and the
/// vertical frame plus random vertical vectors. Each field is built once.
fn derivative_residual<B, R>(ctx: &PointContext, build: B, resid: R) -> f64
where
    B: Fn(&SubmersionGerm<f64>, &[f64]) -> germ::Field<f64>,
    R: Fn(&[f64], &[f64], &[f64], &[f64]) -> f64,
{
    let f = ctx.full();
    let hs = &ctx.frame.horizontal;
    let us: Vec<&Vec<f64>> = ctx.frame.vertical.iter().chain(ctx.random_v.iter().take(RANDOM_COMBINATIONS)).collect();
    let mut worst: f64 = 0.0;
    let mut visit = |a: &[f64], field: &germ::Field<f64>, b: &[f64]| {
        let n = germ::values(&f.nabla(&f.constant(b), field));
        for u in &us {
            let r = resid(a, b, u, &n);
            worst = if r.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(r) };
        }
    };
    for a in hs {
        let field = build(f, a);
        for b in hs {
            visit(a, &field, b);
        }
    }
    for (a, b) in ctx.random_pairs_h(RANDOM_COMBINATIONS) {
        visit(a, &build(f, a), b);
    }
    worst
}

/// A_X ξ with X extended as a genuine horizontal field.
fn a_xi_field(f: &SubmersionGerm<f64>, x: &[f64]) -> germ::Field<f64> {
    f.tensor_a(&f.h(&f.constant(x)), &f.xi())
}

/// CY with Y extended as a genuine horizontal field.
fn c_field(f: &SubmersionGerm<f64>, y: &[f64]) -> germ::Field<f64> {
    f.c(&f.h(&f.constant(y)))
}

/// The general identity ∇_XY = −φ∇_XφY + η(∇_XY)ξ − η(Y)φX for genuine
/// horizontal X, Y; returns the residual of the form selected by `vertical`.
fn namblafi(ctx: &PointContext, x: &[f64], y: &[f64], vertical: bool) -> f64 {
    let l = &ctx.lean;
    let hx = l.h(&l.constant(x));
    let hy = l.h(&l.constant(y));
    let nxy = germ::values(&l.nabla(&hx, &hy));
    let nxphiy = germ::values(&l.nabla(&hx, &l.phi(&hy)));
    let xi = ctx.xi();
    let rhs = if vertical {
        linalg::add(&linalg::scale(&ctx.phi(&nxphiy), -1.0), &linalg::scale(&xi, ctx.inner(y, &ctx.phi(x))))
    } else {
        let a = linalg::scale(&ctx.phi(&nxphiy), -1.0);
        let b = linalg::scale(&xi, ctx.eta(&nxy));
        let c = linalg::scale(&ctx.phi(x), ctx.eta(y));
        linalg::sub(&linalg::add(&a, &b), &c)
    };
    ctx.norm(&linalg::sub(&nxy, &rhs))
}

pub fn lemma_checks(ctx: &PointContext) -> Vec<PointCheck> {
    let t = ctx.tol.tensor_derivative;
    let mut out = fiber_checks(ctx);
    let case = ctx.anti_invariant_case();
    if case.is_some() {
        let bc = max_over(ctx.frame.horizontal.iter().chain(&ctx.random_h), |x| {
            ctx.norm(&linalg::sub(&linalg::add(&ctx.b(x), &ctx.c(x)), &ctx.phi(x)))
        });
        out.push(PointCheck::bound("bc_sum", ctx.tol.frame, bc));
        let perp = max_over(ctx.hhv_triples(), |(x, _, u)| ctx.inner(&ctx.c(x), &ctx.phi(u)).abs());
        out.push(PointCheck::bound("c_perp_phi_ker", ctx.tol.first_derivative, perp));
    } else {
        let reason = "no anti-invariant structure with vertical or horizontal xi";
        out.push(PointCheck::skipped("bc_sum", Kind::Bound(ctx.tol.frame), reason));
        out.push(PointCheck::skipped("c_perp_phi_ker", Kind::Bound(ctx.tol.first_derivative), reason));
    }
    let hs: Vec<&Vec<f64>> = ctx.frame.horizontal.iter().chain(ctx.random_h.iter().take(RANDOM_COMBINATIONS)).collect();
    let us: Vec<&Vec<f64>> = ctx.frame.vertical.iter().chain(ctx.random_v.iter().take(RANDOM_COMBINATIONS)).collect();

    if case == Some(XiPosition::Vertical) {
        let xi = ctx.xi();
        let t1 = max_over(&us, |u| ctx.norm(&linalg::add(&ctx.t(u, &xi), &ctx.phi(u))));
        let txx = ctx.norm(&ctx.t(&xi, &xi));
        let c1 = max_over(&hs, |x| ctx.norm(&linalg::add(&ctx.c(x), &ctx.a(x, &xi))));
        let c2 = max_over(ctx.hhv_triples(), |(x, _, u)| ctx.inner(&ctx.a(x, &xi), &ctx.phi(u)).abs());
        let c3 = derivative_residual(ctx, a_xi_field, |x, y, u, nab| {
            let axi = ctx.a(x, &xi);
            let lhs = ctx.inner(nab, &ctx.phi(u));
            let rhs = -ctx.inner(&axi, &ctx.phi(&ctx.a(y, u))) + ctx.eta(u) * ctx.inner(&axi, y);
            (lhs - rhs).abs()
        });
        let c4 = max_over(ctx.h_pairs(), |(x, y)| {
            (ctx.inner(x, &ctx.a(y, &xi)) + ctx.inner(y, &ctx.a(x, &xi))).abs()
        });
        let bcx = max_over(&hs, |x| ctx.norm(&ctx.b(&ctx.c(x))));
        let c2phib = max_over(&hs, |x| {
            let lhs = linalg::add(&ctx.c(&ctx.c(x)), &ctx.phi(&ctx.b(x)));
            ctx.norm(&linalg::add(&lhs, x))
        });
        let nf2 = max_over(ctx.h_pairs(), |(x, y)| namblafi(ctx, x, y, true));
        let s15 = max_over(ctx.v_pairs(), |(v, w)| {
            let lhs = ctx.t(v, &ctx.phi(w));
            let rhs = linalg::add(
                &linalg::sub(&ctx.phi(&ctx.t(v, w)), &linalg::scale(v, ctx.eta(w))),
                &linalg::scale(&xi, ctx.inner(v, w)),
            );
            ctx.norm(&linalg::sub(&lhs, &rhs))
        });
        let vals = [t1, txx, c1, c2, c3, c4, bcx, c2phib, nf2, s15];
        for (name, v) in VERTICAL_NAMES.iter().zip(vals) {
            out.push(PointCheck::bound(name, t, v));
        }
    } else {
        for name in &VERTICAL_NAMES {
            out.push(PointCheck::skipped(name, Kind::Bound(t), "xi is not vertical for an anti-invariant map"));
        }
    }

    if case == Some(XiPosition::Horizontal) {
        let xi = ctx.xi();
        let ike1 = max_over(&hs, |x| ctx.norm(&linalg::add(&ctx.b(x), &ctx.a(x, &xi))));
        let ike2 = max_over(&us, |u| ctx.norm(&ctx.t(u, &xi)));
        let ike3 = max_over(ctx.hhv_triples(), |(x, _, u)| ctx.inner(&ctx.a(x, &xi), &ctx.phi(u)).abs());
        let ike4 = derivative_residual(ctx, a_xi_field, |x, y, u, nab| {
            let lhs = ctx.inner(nab, &ctx.phi(u));
            let rhs = -ctx.inner(&ctx.a(x, &xi), &ctx.phi(&ctx.a(y, u)));
            (lhs - rhs).abs()
        });
        // field built from Y, differentiated along X
        let ike6 = derivative_residual(ctx, c_field, |y, x, u, nab| {
            let lhs = ctx.inner(nab, &ctx.phi(u));
            let rhs = -ctx.inner(&ctx.c(y), &ctx.phi(&ctx.a(x, u)));
            (lhs - rhs).abs()
        });
        let bcx = max_over(&hs, |x| ctx.norm(&ctx.b(&ctx.c(x))));
        let phi2 = max_over(&hs, |x| {
            let rhs = linalg::add(&ctx.c(&ctx.c(x)), &ctx.phi(&ctx.b(x)));
            ctx.norm(&linalg::sub(&ctx.phi(&ctx.phi(x)), &rhs))
        });
        let nf3 = max_over(ctx.h_pairs(), |(x, y)| namblafi(ctx, x, y, false));
        let s5 = max_over(ctx.v_pairs(), |(v, w)| {
            ctx.norm(&linalg::sub(&ctx.t(v, &ctx.phi(w)), &ctx.phi(&ctx.t(v, w))))
        });
        let vals = [ike1, ike2, ike3, ike4, ike6, bcx, phi2, nf3, s5];
        for (name, v) in HORIZONTAL_NAMES.iter().zip(vals) {
            out.push(PointCheck::bound(name, t, v));
        }
    } else {
        for name in &HORIZONTAL_NAMES {
            out.push(PointCheck::skipped(name, Kind::Bound(t), "xi is not horizontal for an anti-invariant map"));
        }
    }
    out
}

/// Evaluate the sides of an equivalence; the check passes when every side
/// gives the same verdict at tolerance `tol`.
fn equivalence(out: &mut Vec<PointCheck>, name: &str, sides: &[f64], tol: f64) {
    for (i, s) in sides.iter().enumerate() {
        out.push(PointCheck::info(&format!("{name}_side{}", i + 1), *s));
    }
    let holds: Vec<bool> = sides.iter().map(|s| *s <= tol).collect();
    let agree = holds.windows(2).all(|w| w[0] == w[1]);
    let detail = sides
        .iter()
        .zip(&holds)
        .enumerate()
        .map(|(i, (s, h))| format!("side {} {} ({s:e})", i + 1, if *h { "holds" } else { "fails" }))
        .collect::<Vec<_>>()
        .join(", ");
    out.push(PointCheck::agreement(name, agree, detail));
}

pub fn criteria_checks(ctx: &PointContext) -> Vec<PointCheck> {
    let t = ctx.tol.tensor_derivative;
    let mut out = Vec::new();
    let Some(case) = ctx.anti_invariant_case() else {
        let reason = "no anti-invariant structure with vertical or horizontal xi";
        for name in [
            "integrability_equivalence",
            "horizontal_geodesic_equivalence",
            "vertical_geodesic_equivalence",
            "totally_geodesic_map_criterion",
        ] {
            out.push(PointCheck::skipped(name, Kind::Consistency, reason));
        }
        return out;
    };
    let l = &ctx.lean;
    let xi = ctx.xi();
    let map = &ctx.map;
    let hf = |u: &[f64]| l.h(&l.constant(u));
    let v_bracket = |x: &[f64], y: &[f64]| germ::values(&l.v(&l.bracket(&hf(x), &hf(y))));
    let triples = ctx.hhv_triples();
    let int_i = max_over(ctx.h_pairs(), |(x, y)| ctx.norm(&v_bracket(x, y)));
    let gn_phi = |a: &[f64], v: &[f64]| ctx.target_inner(a, &map.push(&ctx.phi(v)));

    match case {
        XiPosition::Vertical => {
            let cross = |x: &[f64], y: &[f64], v: &[f64]| {
                ctx.inner(&ctx.a(x, &xi), &ctx.phi(&ctx.a(y, v))) - ctx.inner(&ctx.a(y, &xi), &ctx.phi(&ctx.a(x, v)))
            };
            let int_ii = max_over(&triples, |&(x, y, v)| {
                let lhs = gn_phi(&map.sff(y, &ctx.b(x)), v);
                let rhs = gn_phi(&map.sff(x, &ctx.b(y)), v) + cross(x, y, v);
                (lhs - rhs).abs()
            });
            let int_iii = max_over(&triples, |&(x, y, v)| {
                let d = linalg::sub(&ctx.a(x, &ctx.b(y)), &ctx.a(y, &ctx.b(x)));
                (ctx.inner(&d, &ctx.phi(v)) - cross(x, y, v)).abs()
            });
            equivalence(&mut out, "integrability_equivalence", &[int_i, int_ii, int_iii], t);
            if ctx.class.as_ref().is_some_and(|c| c.phi_ker_equals_complement) {
                let cii = max_over(ctx.h_pairs(), |(x, y)| {
                    euclid(&linalg::sub(&map.sff(y, &ctx.phi(x)), &map.sff(x, &ctx.phi(y))))
                });
                let ciii = max_over(ctx.h_pairs(), |(x, y)| {
                    ctx.norm(&linalg::sub(&ctx.a(x, &ctx.phi(y)), &ctx.a(y, &ctx.phi(x))))
                });
                equivalence(&mut out, "integrability_corollary", &[int_i, cii, ciii], t);
            }
            let tg_i = max_over(ctx.h_pairs(), |(x, y)| ctx.norm(&ctx.a(x, y)));
            let tg_ii = max_over(&triples, |&(x, y, v)| {
                (ctx.inner(&ctx.a(x, &ctx.b(y)), &ctx.phi(v)) + ctx.inner(&ctx.a(y, &xi), &ctx.phi(&ctx.a(x, v))))
                    .abs()
            });
            let tg_iii = max_over(&triples, |&(x, y, v)| {
                let lhs = gn_phi(&map.sff(x, &ctx.phi(y)), v);
                let ayxi = ctx.a(y, &xi);
                let rhs = ctx.inner(&ayxi, &ctx.phi(&ctx.a(x, v))) - ctx.inner(&ayxi, x) * ctx.eta(v);
                (lhs - rhs).abs()
            });
            equivalence(&mut out, "horizontal_geodesic_equivalence", &[tg_i, tg_ii, tg_iii], t);
            if ctx.class.as_ref().is_some_and(|c| c.phi_ker_equals_complement) {
                let cii = max_over(ctx.h_pairs(), |(x, y)| ctx.norm(&ctx.a(x, &ctx.phi(y))));
                let ciii = max_over(ctx.h_pairs(), |(x, y)| euclid(&map.sff(x, &ctx.phi(y))));
                equivalence(&mut out, "horizontal_geodesic_corollary", &[tg_i, cii, ciii], t);
            }
            out.push(PointCheck::skipped(
                "vertical_geodesic_equivalence",
                Kind::Consistency,
                "stated for horizontal xi",
            ));
            for name in ["horizontal_not_integrable_witness", "no_totally_geodesic_horizontal_witness"] {
                out.push(PointCheck::skipped(name, Kind::Witness(ctx.tol.witness), "stated for horizontal xi"));
            }
            out.push(PointCheck::skipped("curvature_xi_A_residual", Kind::Info, "stated for horizontal xi"));
        }
        XiPosition::Horizontal | XiPosition::Mixed => {
            let common = |x: &[f64], y: &[f64], v: &[f64]| {
                ctx.inner(&ctx.c(x), &ctx.phi(&ctx.a(y, v))) - ctx.inner(&ctx.c(y), &ctx.phi(&ctx.a(x, v)))
                    + ctx.inner(&ctx.a(x, &xi), v) * ctx.eta(y)
                    - ctx.inner(&ctx.a(y, &xi), v) * ctx.eta(x)
            };
            let int_ii = max_over(&triples, |&(x, y, v)| {
                let lhs = gn_phi(&map.sff(y, &ctx.a(x, &xi)), v);
                let rhs = gn_phi(&map.sff(x, &ctx.a(y, &xi)), v) + common(x, y, v);
                (lhs - rhs).abs()
            });
            let int_iii = max_over(&triples, |&(x, y, v)| {
                let d = linalg::sub(&ctx.a(x, &ctx.a(y, &xi)), &ctx.a(y, &ctx.a(x, &xi)));
                (ctx.inner(&d, &ctx.phi(v)) - common(x, y, v)).abs()
            });
            equivalence(&mut out, "integrability_equivalence", &[int_i, int_ii, int_iii], t);
            out.push(PointCheck::skipped(
                "horizontal_geodesic_equivalence",
                Kind::Consistency,
                "stated for vertical xi",
            ));

            let vtriples = ctx.vvh_triples();
            let vg_i = max_over(ctx.v_pairs(), |(v, w)| ctx.norm(&ctx.t(v, w)));
            let vg_ii = max_over(&vtriples, |&(v, w, x)| gn_phi(&map.sff(v, &ctx.phi(x)), w).abs());
            let vg_iii = max_over(&vtriples, |&(v, _, x)| {
                let z = linalg::add(&ctx.t(v, &ctx.b(x)), &ctx.a(&ctx.c(x), v));
                let mut in_mu = vec![0.0; z.len()];
                for b in &ctx.mu {
                    in_mu = linalg::add(&in_mu, &linalg::scale(b, ctx.inner(b, &z)));
                }
                ctx.norm(&linalg::sub(&z, &in_mu))
            });
            equivalence(&mut out, "vertical_geodesic_equivalence", &[vg_i, vg_ii, vg_iii], t);
            if ctx.class.as_ref().is_some_and(|c| c.dimension_relation.is_some()) {
                let cii = max_over(&vtriples, |&(v, _, x)| euclid(&map.sff(v, &ctx.phi(x))));
                let ciii = max_over(ctx.v_pairs(), |(v, w)| ctx.norm(&ctx.t(v, &ctx.phi(w))));
                equivalence(&mut out, "vertical_geodesic_corollary", &[vg_i, cii, ciii], t);
            }

            if ctx.complement_is_phi_ker_plus_xi() {
                let hs: Vec<&Vec<f64>> = ctx.frame.horizontal.iter().collect();
                let mut pairs: Vec<(&Vec<f64>, &Vec<f64>)> =
                    hs.iter().flat_map(|x| hs.iter().map(move |y| (*x, *y))).collect();
                pairs.extend(ctx.random_pairs_h(WITNESS_SAMPLES));
                let best = pairs.iter().map(|(x, y)| ctx.norm(&v_bracket(x, y))).fold(0.0, f64::max);
                out.push(PointCheck::witness("horizontal_not_integrable_witness", ctx.tol.witness, best));
            } else {
                out.push(PointCheck::skipped(
                    "horizontal_not_integrable_witness",
                    Kind::Witness(ctx.tol.witness),
                    "needs complement = phi(ker) + span(xi)",
                ));
            }
            let xi_field = l.xi();
            let best = ctx
                .frame
                .horizontal
                .iter()
                .chain(ctx.random_h.iter().take(WITNESS_SAMPLES))
                .map(|x| ctx.norm(&germ::values(&l.v(&l.nabla(&l.constant(x), &xi_field)))))
                .fold(0.0, f64::max);
            out.push(PointCheck::witness("no_totally_geodesic_horizontal_witness", ctx.tol.witness, best));
            let cm2 = max_over(ctx.h_pairs(), |(x, y)| {
                let r = map.source.curvature(x, y, &xi);
                let aa = linalg::sub(&ctx.a(x, &ctx.a(y, &xi)), &ctx.a(y, &ctx.a(x, &xi)));
                ctx.norm(&linalg::sub(&r, &aa))
            });
            out.push(PointCheck::info("curvature_xi_A_residual", cm2));
        }
    }

    // totally geodesic map ⇔ T_W φV = 0 and A_X φW = 0
    if !ctx.complement_is_phi_ker_plus_xi() {
        out.push(PointCheck::skipped(
            "totally_geodesic_map_criterion",
            Kind::Consistency,
            "needs horizontal xi with complement = phi(ker) + span(xi)",
        ));
        return out;
    }
    let all: Vec<&Vec<f64>> = ctx.frame.all().collect();
    let sff_max = max_over(all.iter().flat_map(|u| all.iter().map(move |v| (*u, *v))), |(u, v)| {
        euclid(&map.sff(u, v))
    });
    let s1 = max_over(ctx.v_pairs(), |(w, v)| ctx.norm(&ctx.t(w, &ctx.phi(v))));
    let s2 = max_over(ctx.vvh_triples(), |(w, _, x)| ctx.norm(&ctx.a(x, &ctx.phi(w))));
    equivalence(&mut out, "totally_geodesic_map_criterion", &[sff_max, s1.max(s2)], t);
    out
}
