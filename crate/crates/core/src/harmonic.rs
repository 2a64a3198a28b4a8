//! Second fundamental form of the map, tension field, harmonicity and the
//! totally geodesic map criteria.
//!
//! Target vectors are compared in the Euclidean norm of their components:
//! these checks only ask whether something vanishes, and the target metric
//! of a bad model need not be positive definite.

use crate::error::SubmersionError;
use crate::geometry::LocalGeometry;
use crate::linalg::{self, Matrix};
use crate::oneill::PointContext;
use crate::report::{Kind, PointCheck};
use crate::submersion::{SubmersionSpec, XiPosition};

/// Pointwise data for (∇F_*)(X,Y): map Hessians, source and target
/// Christoffel symbols at p and F(p).
#[derive(Debug, Clone)]
pub struct MapHessian {
    pub df: Matrix<f64>,
    /// `hessian[a][i][j]` = ∂_i∂_j F^a.
    pub hessian: Vec<Matrix<f64>>,
    pub source: LocalGeometry<f64>,
    pub target: LocalGeometry<f64>,
}

impl MapHessian {
    pub fn new(spec: &SubmersionSpec, p: &[f64]) -> Result<Self, SubmersionError> {
        let m = spec.source_dim();
        let jets: Vec<_> = spec
            .components
            .iter()
            .map(|e| e.evaluate_jet(p))
            .collect::<Result<_, _>>()?;
        let df = jets.iter().map(|j| (0..m).map(|i| j.gradient(i)).collect()).collect();
        let hessian = jets.iter().map(|j| j.hessian_matrix(m)).collect();
        let q = spec.image(p)?;
        Ok(Self {
            df,
            hessian,
            source: LocalGeometry::new(&spec.source.metric, p)?,
            target: LocalGeometry::new(&spec.target, &q)?,
        })
    }

    pub fn push(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.df, x)
    }

    /// (∇F_*)(X,Y) = ∇^F_X F_*Y − F_*(∇_X Y) for constant-component X, Y.
    pub fn sff(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let gxy = self.source.gamma_contract(x, y);
        let (fx, fy) = (self.push(x), self.push(y));
        let pullback = self.target.gamma_contract(&fx, &fy);
        let fgamma = self.push(&gxy);
        (0..self.df.len())
            .map(|a| linalg::bilinear(&self.hessian[a], x, y) - fgamma[a] + pullback[a])
            .collect()
    }
}

pub fn second_fundamental_form_at(
    spec: &SubmersionSpec,
    x: &[f64],
    y: &[f64],
    p: &[f64],
) -> Result<Vec<f64>, SubmersionError> {
    Ok(MapHessian::new(spec, p)?.sff(x, y))
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Σ over the full orthonormal frame, and over its vertical part only.
pub fn tension(ctx: &PointContext) -> (Vec<f64>, Vec<f64>) {
    let n = ctx.map.df.len();
    let sum = |basis: &mut dyn Iterator<Item = &Vec<f64>>| {
        let mut t = vec![0.0; n];
        for e in basis {
            t = linalg::add(&t, &ctx.map.sff(e, e));
        }
        t
    };
    (sum(&mut ctx.frame.all()), sum(&mut ctx.frame.vertical.iter()))
}

pub fn tension_at(spec: &SubmersionSpec, p: &[f64]) -> Result<Vec<f64>, SubmersionError> {
    let ctx = PointContext::new(spec, p, 0, 0, &Default::default())?;
    Ok(tension(&ctx).0)
}

/// Harmonicity, symmetry of the second fundamental form and its vertical and
/// mixed formulas.
pub fn harmonic_checks(ctx: &PointContext) -> Vec<PointCheck> {
    let tol = &ctx.tol;
    let t = tol.tensor_derivative;
    let map = &ctx.map;
    let all: Vec<&Vec<f64>> = ctx.frame.all().collect();
    let mut sym: f64 = 0.0;
    let mut max_sff: f64 = 0.0;
    for u in &all {
        for v in &all {
            let a = map.sff(u, v);
            sym = sym.max(euclid(&linalg::sub(&a, &map.sff(v, u))));
            max_sff = max_sff.max(euclid(&a));
        }
    }
    let mut horiz: f64 = 0.0;
    for x in &ctx.frame.horizontal {
        for y in &ctx.frame.horizontal {
            horiz = horiz.max(euclid(&map.sff(x, y)));
        }
    }
    let (tau, tau_v) = tension(ctx);
    let tau_norm = euclid(&tau);
    let mean = ctx.mean_curvature_sum();
    let mean_norm = ctx.norm(&mean);
    let mut out = vec![
        PointCheck::bound("sff_symmetry", t, sym),
        PointCheck::bound("sff_horizontal", t, horiz),
        PointCheck::bound("tension_vertical_only", t, euclid(&linalg::sub(&tau, &tau_v))),
        PointCheck::info("tension_norm", tau_norm),
        PointCheck::info("minimal_fiber_norm", mean_norm),
    ];

    let case = ctx.anti_invariant_case();
    let trace = match case {
        Some(pos @ (XiPosition::Vertical | XiPosition::Horizontal)) => {
            // printed statement: Σ g(u_i, φT_V u_i) = (2m − n)η(V) or 0
            let (m, n) = (ctx.class.as_ref().and_then(|c| c.m).unwrap_or(0) as f64, ctx.spec.target_dim() as f64);
            let k = ctx.frame.vertical.len() as f64;
            let mean = ctx.mean_curvature_sum();
            let mut res: f64 = 0.0;
            let mut proof: f64 = 0.0;
            for v in &ctx.frame.vertical {
                let mut tr = 0.0;
                let mut lhs = 0.0;
                for u in &ctx.frame.vertical {
                    let tvu = ctx.t(v, u);
                    tr += ctx.inner(u, &ctx.phi(&tvu));
                    lhs += ctx.inner(&ctx.phi(u), &tvu);
                }
                let (rhs, shift) = match pos {
                    XiPosition::Vertical => ((2.0 * m - n) * ctx.eta(v), (k - 1.0) * ctx.eta(v)),
                    _ => (0.0, 0.0),
                };
                res = res.max((tr - rhs).abs());
                // Σ g(φe_i, T_V e_i) = g(Σ T_{e_i}e_i, φV) − (k − 1)η(V), used inside the proof
                proof = proof.max((lhs - ctx.inner(&mean, &ctx.phi(v)) + shift).abs());
            }
            out.push(PointCheck::info("trace_criterion_residual", res));
            out.push(PointCheck::info("trace_proof_identity_residual", proof));
            Some(res)
        }
        _ => {
            out.push(PointCheck::skipped(
                "trace_criterion_residual",
                Kind::Info,
                "no anti-invariant structure with vertical or horizontal xi",
            ));
            None
        }
    };
    let minimal = mean_norm <= t;
    let harmonic = tau_norm <= t;
    let coherent = match trace {
        Some(r) => (r <= t) == minimal && minimal == harmonic,
        None => minimal == harmonic,
    };
    out.push(PointCheck::agreement(
        "harmonic_coherence",
        coherent,
        format!(
            "trace residual {}, minimal-fiber norm {mean_norm:e}, tension norm {tau_norm:e}",
            trace.map_or("n/a".to_string(), |r| format!("{r:e}"))
        ),
    ));

    let split = ctx.complement_is_phi_ker_plus_xi();
    if split {
        let mut s3: f64 = 0.0;
        for w in &ctx.frame.vertical {
            for v in &ctx.frame.vertical {
                let rhs = map.push(&ctx.phi(&ctx.t(w, &ctx.phi(v))));
                s3 = s3.max(euclid(&linalg::sub(&map.sff(w, v), &rhs)));
            }
        }
        let xi = ctx.xi();
        let mut s4: f64 = 0.0;
        for x in &ctx.frame.horizontal {
            for w in &ctx.frame.vertical {
                let inner = ctx.inner(w, &ctx.phi(x));
                let z = linalg::sub(&ctx.phi(&ctx.a(x, &ctx.phi(w))), &linalg::scale(&xi, inner));
                s4 = s4.max(euclid(&linalg::sub(&map.sff(x, w), &map.push(&z))));
            }
        }
        out.push(PointCheck::bound("sff_vertical_formula", t, s3));
        out.push(PointCheck::bound("sff_mixed_formula", t, s4));
    } else {
        let reason = "needs horizontal xi with complement = phi(ker) + span(xi)";
        out.push(PointCheck::skipped("sff_vertical_formula", Kind::Bound(t), reason));
        out.push(PointCheck::skipped("sff_mixed_formula", Kind::Bound(t), reason));
    }
    if case == Some(XiPosition::Vertical) {
        let mut best = max_sff;
        for (u, v) in ctx.random_pairs_all() {
            best = best.max(euclid(&map.sff(u, v)));
        }
        out.push(PointCheck::witness("not_totally_geodesic_witness", tol.witness, best));
    } else {
        out.push(PointCheck::info("max_sff_norm", max_sff));
        out.push(PointCheck::skipped(
            "not_totally_geodesic_witness",
            Kind::Witness(tol.witness),
            "applies to anti-invariant submersions with vertical xi",
        ));
    }
    out
}
