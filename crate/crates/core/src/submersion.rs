//! Smooth maps between charted Riemannian manifolds: differential, the
//! vertical/horizontal splitting, the submersion axioms, anti-invariance and
//! the B/C decomposition of φ on horizontal vectors.

use serde::Serialize;

use crate::contact::StructuredManifold;
use crate::error::SubmersionError;
use crate::expr::{EvalError, Expression};
use crate::geometry::{metric_at, MetricField};
use crate::germ::{self, Field, FieldMatrix, Germ};
use crate::linalg::{self, Matrix};
use crate::report::{PointCheck, Tolerances};
use crate::scalar::Real;
use crate::taylor::Taylor;

/// Relative size below which a singular value or pivot counts as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SubmersionSpec {
    pub source: StructuredManifold,
    pub target: MetricField,
    /// Target coordinates as expressions in the source coordinates.
    pub components: Vec<Expression>,
    /// A point is admissible iff every source guard is > 0 at it.
    pub source_guards: Vec<Expression>,
    /// Evaluated in target coordinates at the image point.
    pub target_guards: Vec<Expression>,
}

impl SubmersionSpec {
    pub fn new(
        source: StructuredManifold,
        target: MetricField,
        components: Vec<Expression>,
    ) -> Result<Self, SubmersionError> {
        let (m, n) = (source.dim(), target.dim());
        if n > m || components.len() != n {
            return Err(SubmersionError::Dimensions {
                source_dim: m,
                target: n.max(components.len()),
            });
        }
        Ok(Self {
            source,
            target,
            components,
            source_guards: Vec::new(),
            target_guards: Vec::new(),
        })
    }

    pub fn with_guards(mut self, source: Vec<Expression>, target: Vec<Expression>) -> Self {
        self.source_guards = source;
        self.target_guards = target;
        self
    }

    pub fn source_dim(&self) -> usize {
        self.source.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target.dim()
    }

    pub fn image<T: Real>(&self, p: &[T]) -> Result<Vec<T>, EvalError> {
        self.components.iter().map(|e| e.eval::<T, T>(p)).collect()
    }

    pub fn admits<T: Real>(&self, p: &[T]) -> Result<bool, EvalError> {
        for g in &self.source_guards {
            if !(g.eval::<T, T>(p)? > T::zero()) {
                return Ok(false);
            }
        }
        if !self.target_guards.is_empty() {
            let q = self.image(p)?;
            for g in &self.target_guards {
                if !(g.eval::<T, T>(&q)? > T::zero()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn guard(&self, p: &[f64]) -> Result<(), SubmersionError> {
        if self.admits(p)? {
            Ok(())
        } else {
            Err(SubmersionError::GuardViolation { point: p.to_vec() })
        }
    }
}

/// Jacobian of the map at `p`, `n × m`.
pub fn differential_at<T: Real>(spec: &SubmersionSpec, p: &[T]) -> Result<Matrix<T>, SubmersionError> {
    let p64: Vec<f64> = p.iter().map(|x| x.as_f64()).collect();
    spec.guard(&p64)?;
    let m = spec.source_dim();
    spec.components
        .iter()
        .map(|e| {
            let j = e.evaluate_jet(p)?;
            Ok((0..m).map(|i| j.gradient(i)).collect())
        })
        .collect()
}

/// Numerical rank by row reduction, entries relative to the largest.
pub fn numerical_rank<T: Real>(a: &Matrix<T>) -> usize {
    let cols = a.first().map_or(0, |r| r.len());
    if cols == 0 {
        return 0;
    }
    // pivoted elimination: squaring into AᵀA would push round-off above the cut
    cols - linalg::nullspace(a, T::lit(RANK_TOL)).len()
}

/// g-orthonormal bases of `ker dF` and its g-orthogonal complement at a point.
#[derive(Debug, Clone)]
pub struct SplitFrame<T> {
    pub point: Vec<T>,
    pub metric: Matrix<T>,
    pub vertical: Vec<Vec<T>>,
    pub horizontal: Vec<Vec<T>>,
}

impl<T: Real> SplitFrame<T> {
    /// Vertical then horizontal vectors.
    pub fn all(&self) -> impl Iterator<Item = &Vec<T>> {
        self.vertical.iter().chain(&self.horizontal)
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        linalg::bilinear(&self.metric, u, v)
    }

    pub fn norm(&self, v: &[T]) -> T {
        self.inner(v, v).max(T::zero()).sqrt()
    }
}

pub fn split_frame_at<T: Real>(spec: &SubmersionSpec, p: &[T]) -> Result<SplitFrame<T>, SubmersionError> {
    split_frame_ordered(spec, p, false)
}

/// As [`split_frame_at`], optionally seeding Gram-Schmidt in reverse order.
/// Classification must not depend on the choice.
pub fn split_frame_ordered<T: Real>(
    spec: &SubmersionSpec,
    p: &[T],
    reversed: bool,
) -> Result<SplitFrame<T>, SubmersionError> {
    let g = metric_at(&spec.source.metric, p)?;
    let ginv = linalg::invert::<T, T>(&g).ok_or(crate::GeometryError::Singular)?;
    let df = differential_at(spec, p)?;
    let (m, n) = (spec.source_dim(), spec.target_dim());
    let rank = numerical_rank(&df);
    if rank < n {
        return Err(SubmersionError::RankDeficient {
            rank,
            expected: n,
            point: p.iter().map(|x| x.as_f64()).collect(),
        });
    }
    let mut vseeds = linalg::nullspace(&df, T::lit(RANK_TOL));
    let mut hseeds: Vec<Vec<T>> = df.iter().map(|row| linalg::mat_vec(&ginv, row)).collect();
    if reversed {
        vseeds.reverse();
        hseeds.reverse();
    }
    let vertical = linalg::gram_schmidt(&g, &vseeds, T::lit(RANK_TOL));
    let horizontal = linalg::gram_schmidt(&g, &hseeds, T::lit(RANK_TOL));
    debug_assert_eq!(vertical.len() + horizontal.len(), m);
    Ok(SplitFrame {
        point: p.to_vec(),
        metric: g,
        vertical,
        horizontal,
    })
}

/// `(V v, H v)` using the frame's orthonormal bases.
pub fn project<T: Real>(frame: &SplitFrame<T>, v: &[T]) -> (Vec<T>, Vec<T>) {
    let part = |basis: &[Vec<T>]| {
        let mut out = vec![T::zero(); v.len()];
        for b in basis {
            let c = frame.inner(b, v);
            for (o, x) in out.iter_mut().zip(b) {
                *o = *o + c * *x;
            }
        }
        out
    };
    (part(&frame.vertical), part(&frame.horizontal))
}

/// Taylor-level data of a submersion about a point: the source germ, the
/// differential and the projectors onto the vertical and horizontal
/// distributions as matrix fields, and the structure tensors if any.
///
/// Point vectors passed to the tensor methods are extended with constant
/// components; the projections inside `T` and `A` then make genuine vertical
/// and horizontal fields out of them.
#[derive(Debug, Clone)]
pub struct SubmersionGerm<T> {
    pub germ: Germ<T>,
    pub df: FieldMatrix<T>,
    pub pv: FieldMatrix<T>,
    pub ph: FieldMatrix<T>,
    phi: Option<FieldMatrix<T>>,
    xi: Option<Field<T>>,
    eta: Option<Field<T>>,
}

impl<T: Real> SubmersionGerm<T> {
    /// Expand with the source metric at `order` (projectors come out one lower).
    pub fn new(spec: &SubmersionSpec, p: &[T], order: usize) -> Result<Self, SubmersionError> {
        assert!(order >= 2, "projectors need a second-order expansion");
        let germ = Germ::new(&spec.source.metric, p, order)?;
        let comps = germ.field(&spec.components)?;
        let m = spec.source_dim();
        let df: FieldMatrix<T> = comps.iter().map(|c| (0..m).map(|i| c.derivative(i)).collect()).collect();
        let dft = linalg::transpose(&df);
        let ginv_dft = linalg::mat_mul(&germ.ginv, &dft);
        let k = linalg::mat_mul(&df, &ginv_dft);
        let kinv = linalg::invert::<T, Taylor<T>>(&k).ok_or_else(|| SubmersionError::RankDeficient {
            rank: numerical_rank(&values_matrix(&df)),
            expected: spec.target_dim(),
            point: p.iter().map(|x| x.as_f64()).collect(),
        })?;
        let ph = linalg::mat_mul(&linalg::mat_mul(&ginv_dft, &kinv), &df);
        let id: FieldMatrix<T> = linalg::identity(m);
        let pv = id
            .iter()
            .zip(&ph)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect())
            .collect();
        let (phi, xi, eta) = match &spec.source.structure {
            Some(st) => (
                Some(st.phi_germ(&germ)?),
                Some(germ.field(st.xi().components())?),
                Some(germ.field(st.eta_exprs())?),
            ),
            None => (None, None, None),
        };
        Ok(Self {
            germ,
            df,
            pv,
            ph,
            phi,
            xi,
            eta,
        })
    }

    /// Cheaper copy exact only up to `order` in the metric.
    pub fn truncated(&self, order: usize) -> Self {
        let lower = order.saturating_sub(1);
        Self {
            germ: self.germ.truncated(order),
            df: germ::truncate_matrix(&self.df, lower),
            pv: germ::truncate_matrix(&self.pv, lower),
            ph: germ::truncate_matrix(&self.ph, lower),
            phi: self.phi.as_ref().map(|m| germ::truncate_matrix(m, order)),
            xi: self.xi.as_ref().map(|f| germ::truncate_field(f, order)),
            eta: self.eta.as_ref().map(|f| germ::truncate_field(f, order)),
        }
    }

    pub fn dim(&self) -> usize {
        self.germ.dim()
    }

    pub fn has_structure(&self) -> bool {
        self.phi.is_some()
    }

    pub fn constant(&self, v: &[T]) -> Field<T> {
        germ::constant_field(v)
    }

    pub fn v(&self, f: &Field<T>) -> Field<T> {
        germ::apply(&self.pv, f)
    }

    pub fn h(&self, f: &Field<T>) -> Field<T> {
        germ::apply(&self.ph, f)
    }

    pub fn nabla(&self, x: &Field<T>, y: &Field<T>) -> Field<T> {
        self.germ.nabla(x, y)
    }

    pub fn bracket(&self, x: &Field<T>, y: &Field<T>) -> Field<T> {
        self.germ.bracket(x, y)
    }

    pub fn inner(&self, x: &Field<T>, y: &Field<T>) -> Taylor<T> {
        self.germ.inner(x, y)
    }

    /// T_E F = H∇_{VE} VF + V∇_{VE} HF.
    pub fn tensor_t(&self, e: &Field<T>, f: &Field<T>) -> Field<T> {
        let ve = self.v(e);
        let a = self.h(&self.nabla(&ve, &self.v(f)));
        let b = self.v(&self.nabla(&ve, &self.h(f)));
        germ::add(&a, &b)
    }

    /// A_E F = V∇_{HE} HF + H∇_{HE} VF.
    pub fn tensor_a(&self, e: &Field<T>, f: &Field<T>) -> Field<T> {
        let he = self.h(e);
        let a = self.v(&self.nabla(&he, &self.h(f)));
        let b = self.h(&self.nabla(&he, &self.v(f)));
        germ::add(&a, &b)
    }

    pub fn phi(&self, f: &Field<T>) -> Field<T> {
        germ::apply(self.phi.as_ref().expect("almost contact structure"), f)
    }

    pub fn xi(&self) -> Field<T> {
        self.xi.clone().expect("almost contact structure")
    }

    pub fn eta(&self, f: &Field<T>) -> Taylor<T> {
        let eta = self.eta.as_ref().expect("almost contact structure");
        let mut acc = Taylor::constant(T::zero());
        for (a, b) in eta.iter().zip(f) {
            acc = acc + a.clone() * b.clone();
        }
        acc
    }

    /// BX = V φX.
    pub fn b(&self, f: &Field<T>) -> Field<T> {
        self.v(&self.phi(f))
    }

    /// CX = H φX.
    pub fn c(&self, f: &Field<T>) -> Field<T> {
        self.h(&self.phi(f))
    }

    /// F_* applied to a field.
    pub fn push(&self, f: &Field<T>) -> Field<T> {
        germ::apply(&self.df, f)
    }
}

fn values_matrix<T: Real>(m: &FieldMatrix<T>) -> Matrix<T> {
    m.iter().map(|r| r.iter().map(|c| c.value()).collect()).collect()
}

pub fn tensor_t_at<T: Real>(
    spec: &SubmersionSpec,
    e: &[T],
    f: &[T],
    p: &[T],
) -> Result<Vec<T>, SubmersionError> {
    let sg = SubmersionGerm::new(spec, p, 2)?;
    Ok(germ::values(&sg.tensor_t(&sg.constant(e), &sg.constant(f))))
}

pub fn tensor_a_at<T: Real>(
    spec: &SubmersionSpec,
    e: &[T],
    f: &[T],
    p: &[T],
) -> Result<Vec<T>, SubmersionError> {
    let sg = SubmersionGerm::new(spec, p, 2)?;
    Ok(germ::values(&sg.tensor_a(&sg.constant(e), &sg.constant(f))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XiPosition {
    Vertical,
    Horizontal,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiInvarianceReport {
    pub anti_invariant: bool,
    pub xi_position: XiPosition,
    pub phi_ker_equals_complement: bool,
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    pub phi_ker_dim: usize,
    pub mu_dim: usize,
    /// dim(φ(ker F_*) ∩ (ker F_*)^⊥).
    pub intersection_dim: usize,
    /// Source dimension is 2m + 1.
    pub m: Option<usize>,
    pub n: usize,
    /// Whether m = n (vertical ξ, φ(ker) = complement) or m + 1 = n
    /// (horizontal ξ, complement = φ(ker) ⊕ span ξ); `None` when neither
    /// hypothesis holds.
    pub dimension_relation: Option<bool>,
    pub anti_invariance_residual: f64,
    pub xi_horizontal_part: f64,
    pub xi_vertical_part: f64,
}

impl AntiInvarianceReport {
    /// Equality of the discrete outcome, ignoring residual values.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.anti_invariant == other.anti_invariant
            && self.xi_position == other.xi_position
            && self.phi_ker_equals_complement == other.phi_ker_equals_complement
            && self.phi_ker_dim == other.phi_ker_dim
            && self.mu_dim == other.mu_dim
            && self.intersection_dim == other.intersection_dim
            && self.dimension_relation == other.dimension_relation
    }
}

/// μ: g-orthonormal basis of the complement of φ(ker F_*) in the horizontal
/// space, plus the rank of φ(ker F_*).
pub fn mu_basis(frame: &SplitFrame<f64>, phi: &Matrix<f64>) -> (usize, Vec<Vec<f64>>) {
    let images: Vec<Vec<f64>> = frame
        .vertical
        .iter()
        .map(|u| project(frame, &linalg::mat_vec(phi, u)).1)
        .collect();
    let phi_ker = linalg::gram_schmidt(&frame.metric, &images, 1e-8);
    let r = phi_ker.len();
    let mut seeds = phi_ker;
    seeds.extend(frame.horizontal.iter().cloned());
    let all = linalg::gram_schmidt(&frame.metric, &seeds, 1e-8);
    (r, all[r..].to_vec())
}

pub fn classify_anti_invariance(
    spec: &SubmersionSpec,
    frame: &SplitFrame<f64>,
    tol: f64,
) -> Result<Option<AntiInvarianceReport>, SubmersionError> {
    let Some(st) = &spec.source.structure else {
        return Ok(None);
    };
    let p = &frame.point;
    let phi = st.phi_at(p)?;
    let xi = st.xi_at(p)?;
    let (k, n) = (frame.vertical.len(), frame.horizontal.len());
    let mut residual: f64 = 0.0;
    let mut v_parts = Vec::new();
    for u in &frame.vertical {
        let w = linalg::mat_vec(&phi, u);
        let (vw, _) = project(frame, &w);
        residual = residual.max(frame.norm(&vw));
        v_parts.push(vw);
    }
    let anti_invariant = residual <= tol;
    let (vxi, hxi) = project(frame, &xi);
    let (xv, xh) = (frame.norm(&vxi), frame.norm(&hxi));
    let xi_position = if xh <= tol {
        XiPosition::Vertical
    } else if xv <= tol {
        XiPosition::Horizontal
    } else {
        XiPosition::Mixed
    };
    let images: Vec<Vec<f64>> = frame.vertical.iter().map(|u| linalg::mat_vec(&phi, u)).collect();
    let phi_ker_dim = linalg::gram_schmidt(&frame.metric, &images, 1e-8).len();
    // vectors of φ(ker) with no vertical part: dim φ(ker) − rank of the V-parts
    let gram: Matrix<f64> = v_parts
        .iter()
        .map(|a| v_parts.iter().map(|b| frame.inner(a, b)).collect())
        .collect();
    let v_rank = if gram.is_empty() {
        0
    } else {
        linalg::symmetric_eigenvalues(&gram).iter().filter(|&&e| e > tol * tol).count()
    };
    let intersection_dim = phi_ker_dim.saturating_sub(v_rank);
    let (_, mu) = mu_basis(frame, &phi);
    let mu_dim = if anti_invariant { n - phi_ker_dim.min(n) } else { mu.len() };
    let phi_ker_equals_complement = anti_invariant && phi_ker_dim == n;
    let dim = frame.point.len();
    let m = (dim % 2 == 1).then_some((dim - 1) / 2);
    let xi_in_mu = mu.iter().map(|b| frame.inner(b, &xi).powi(2)).sum::<f64>().sqrt();
    let dimension_relation = match (m, xi_position) {
        (Some(m), XiPosition::Vertical) if phi_ker_equals_complement => Some(m == n),
        (Some(m), XiPosition::Horizontal) if anti_invariant && mu_dim == 1 && (xi_in_mu - 1.0).abs() <= 1e-8 => {
            Some(m + 1 == n)
        }
        _ => None,
    };
    Ok(Some(AntiInvarianceReport {
        anti_invariant,
        xi_position,
        phi_ker_equals_complement,
        vertical_dim: k,
        horizontal_dim: n,
        phi_ker_dim,
        mu_dim,
        intersection_dim,
        m,
        n: spec.target_dim(),
        dimension_relation,
        anti_invariance_residual: residual,
        xi_horizontal_part: xh,
        xi_vertical_part: xv,
    }))
}

/// Split φX for horizontal X into its vertical part BX and horizontal part CX.
pub fn bc_decompose_at(
    spec: &SubmersionSpec,
    frame: &SplitFrame<f64>,
    x: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>), SubmersionError> {
    let (vx, _) = project(frame, x);
    let residual = frame.norm(&vx);
    if residual > tol {
        return Err(SubmersionError::NotHorizontal { residual });
    }
    let st = spec
        .source
        .structure
        .as_ref()
        .expect("B/C decomposition needs an almost contact structure");
    let phix = linalg::mat_vec(&st.phi_at(&frame.point)?, x);
    Ok(project(frame, &phix))
}

fn target_inner(gn: &Matrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    linalg::bilinear(gn, a, b)
}

/// Submersion axioms (full rank, horizontal isometry) and the frame invariants at one point.
pub fn check_submersion_axioms(
    spec: &SubmersionSpec,
    p: &[f64],
    tol: &Tolerances,
    random_vector: &[f64],
) -> Result<Vec<PointCheck>, SubmersionError> {
    let (m, n) = (spec.source_dim(), spec.target_dim());
    let df = differential_at(spec, p)?;
    let rank = numerical_rank(&df);
    let q = spec.image(p)?;
    let gn = spec.target.matrix_at(&q)?;
    let gn_min = linalg::symmetric_eigenvalues(&gn)[0];
    let mut out = vec![
        PointCheck::agreement(
            "target_metric_positive_definite",
            gn_min > 0.0,
            format!("g_N smallest eigenvalue {gn_min:e} at image {q:?}"),
        ),
        PointCheck::agreement("full_rank", rank == n, format!("rank {rank}, target dimension {n}")),
    ];
    let frame = split_frame_at(spec, p)?;
    let pushed: Vec<Vec<f64>> = frame.horizontal.iter().map(|x| linalg::mat_vec(&df, x)).collect();
    let mut s2: f64 = 0.0;
    for (a, xa) in pushed.iter().enumerate() {
        for (b, xb) in pushed.iter().enumerate() {
            let id = if a == b { 1.0 } else { 0.0 };
            s2 = s2.max((target_inner(&gn, xa, xb) - id).abs());
        }
    }
    out.push(PointCheck::bound("horizontal_isometry", tol.first_derivative, s2));

    let all: Vec<&Vec<f64>> = frame.all().collect();
    let mut gram: f64 = 0.0;
    for (i, u) in all.iter().enumerate() {
        for (j, v) in all.iter().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((frame.inner(u, v) - id).abs());
        }
    }
    let kernel = frame
        .vertical
        .iter()
        .map(|v| linalg::max_abs(&linalg::mat_vec(&df, v)))
        .fold(0.0, f64::max);
    out.push(PointCheck::bound("frame_gram", tol.frame, gram));
    out.push(PointCheck::bound("frame_kernel", tol.frame, kernel));
    out.push(PointCheck::agreement(
        "frame_dimensions",
        frame.vertical.len() + frame.horizontal.len() == m && frame.horizontal.len() == n,
        format!("{} vertical + {} horizontal, source {m}", frame.vertical.len(), frame.horizontal.len()),
    ));
    let (vv, hv) = project(&frame, random_vector);
    let whole = frame.inner(random_vector, random_vector);
    let parts = frame.inner(&vv, &vv) + frame.inner(&hv, &hv);
    let cross = frame.inner(&vv, &hv);
    out.push(PointCheck::bound(
        "pythagoras",
        tol.frame,
        ((whole - parts).abs() + cross.abs()) / whole.max(1.0),
    ));
    Ok(out)
}

/// Classification checks: anti-invariance, ξ position, dimension relations
/// and the TN = F_*(φ ker) ⊕ F_*(μ) decomposition.
pub fn check_classification(
    spec: &SubmersionSpec,
    p: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<PointCheck>, Option<AntiInvarianceReport>), SubmersionError> {
    let names = [
        "anti_invariant",
        "dimension_relation",
        "tn_decomposition",
        "dimension_bookkeeping",
        "classification_stable",
        "definition_intersection_dim",
    ];
    if spec.source.structure.is_none() {
        let reason = "model declares no almost contact structure";
        let out = names
            .iter()
            .map(|n| PointCheck::skipped(n, crate::report::Kind::Consistency, reason))
            .collect();
        return Ok((out, None));
    }
    let frame = split_frame_at(spec, p)?;
    let t = tol.first_derivative;
    let report = classify_anti_invariance(spec, &frame, t)?.expect("structure present");
    let shuffled = classify_anti_invariance(spec, &split_frame_ordered(spec, p, true)?, t)?.expect("structure present");
    let mut out = vec![PointCheck::agreement(
        names[0],
        report.anti_invariant,
        format!("|V(phi U)| up to {:e}", report.anti_invariance_residual),
    )];
    out.push(match report.dimension_relation {
        Some(ok) => PointCheck::agreement(
            names[1],
            ok,
            format!("m = {:?}, n = {}, xi {:?}", report.m, report.n, report.xi_position),
        ),
        None => PointCheck::skipped(
            names[1],
            crate::report::Kind::Consistency,
            "neither dimension theorem's hypothesis holds",
        ),
    });
    let st = spec.source.structure.as_ref().expect("structure present");
    let phi = st.phi_at(p)?;
    let df = differential_at(spec, p)?;
    let gn = spec.target.matrix_at(&spec.image(p)?)?;
    let phi_ker: Vec<Vec<f64>> = frame.vertical.iter().map(|u| linalg::mat_vec(&phi, u)).collect();
    let (_, mu) = mu_basis(&frame, &phi);
    let a: Vec<Vec<f64>> = phi_ker.iter().map(|w| linalg::mat_vec(&df, w)).collect();
    let b: Vec<Vec<f64>> = mu.iter().map(|w| linalg::mat_vec(&df, w)).collect();
    let mut cross: f64 = 0.0;
    for x in &a {
        for y in &b {
            cross = cross.max(target_inner(&gn, x, y).abs());
        }
    }
    let stacked: Matrix<f64> = a.iter().chain(&b).cloned().collect();
    let span = if stacked.is_empty() { 0 } else { numerical_rank(&stacked) };
    out.push(PointCheck::bound(names[2], t, cross));
    out.push(PointCheck::agreement(
        "tn_span",
        span == spec.target_dim(),
        format!("F_*(phi ker) + F_*(mu) has rank {span}"),
    ));
    out.push(PointCheck::agreement(
        names[3],
        report.vertical_dim + report.horizontal_dim == spec.source_dim()
            && (!report.anti_invariant || report.phi_ker_dim + report.mu_dim == report.horizontal_dim),
        format!(
            "vertical {} + horizontal {}; phi(ker) {} + mu {}",
            report.vertical_dim, report.horizontal_dim, report.phi_ker_dim, report.mu_dim
        ),
    ));
    out.push(PointCheck::agreement(
        names[4],
        report.same_outcome(&shuffled),
        "reordered Gram-Schmidt seeds changed the classification",
    ));
    out.push(PointCheck::info(names[5], report.intersection_dim as f64));
    out.push(PointCheck::info("mu_dim", report.mu_dim as f64));
    Ok((out, Some(report)))
}
