//! Almost contact metric structures (φ, ξ, η, g) and their pointwise checks.
//!
//! φ is stored as a matrix acting on component columns: (φv)^i = φ[i][j] v^j.

use crate::error::GeometryError;
use crate::expr::{EvalError, Expression};
use crate::geometry::{LocalGeometry, MetricField, VectorField};
use crate::germ::{self, FieldMatrix, Germ};
use crate::linalg::{self, Matrix};
use crate::report::{Kind, PointCheck, Tolerances};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct AlmostContactStructure {
    phi: Vec<Vec<Expression>>,
    xi: VectorField,
    eta: Vec<Expression>,
}

impl AlmostContactStructure {
    pub fn new(phi: Vec<Vec<Expression>>, xi: VectorField, eta: Vec<Expression>) -> Result<Self, GeometryError> {
        let n = xi.dim();
        if phi.len() != n || phi.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape {
                what: "phi",
                expected: n,
            });
        }
        if eta.len() != n {
            return Err(GeometryError::ChartMismatch {
                expected: n,
                got: eta.len(),
            });
        }
        Ok(Self { phi, xi, eta })
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    pub fn phi_exprs(&self) -> &[Vec<Expression>] {
        &self.phi
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn eta_exprs(&self) -> &[Expression] {
        &self.eta
    }

    pub fn phi_at<T: Real>(&self, p: &[T]) -> Result<Matrix<T>, EvalError> {
        self.phi
            .iter()
            .map(|r| r.iter().map(|e| e.eval::<T, T>(p)).collect())
            .collect()
    }

    pub fn xi_at<T: Real>(&self, p: &[T]) -> Result<Vec<T>, EvalError> {
        self.xi.at(p)
    }

    pub fn eta_at<T: Real>(&self, p: &[T]) -> Result<Vec<T>, EvalError> {
        self.eta.iter().map(|e| e.eval::<T, T>(p)).collect()
    }

    pub fn phi_germ<T: Real>(&self, g: &Germ<T>) -> Result<FieldMatrix<T>, EvalError> {
        g.matrix(&self.phi)
    }
}

/// A chart with a metric and, optionally, an almost contact structure and
/// a declared φ-basis `E_1..E_{2n}` (with ξ completing it).
#[derive(Debug, Clone)]
pub struct StructuredManifold {
    pub metric: MetricField,
    pub structure: Option<AlmostContactStructure>,
    pub phi_basis: Vec<(String, VectorField)>,
}

impl StructuredManifold {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `n` in dim = 2n + 1, if the dimension is odd.
    pub fn contact_n(&self) -> Option<usize> {
        let d = self.dim();
        (d % 2 == 1).then_some((d - 1) / 2)
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn rank(m: &Matrix<f64>) -> usize {
    m.len() - linalg::nullspace(m, 1e-10).len()
}

const NO_STRUCTURE: &str = "model declares no almost contact structure";

/// φ² = −I + η⊗ξ, φξ = 0, η∘φ = 0, η(ξ) = 1, compatibility with g, and
/// the declared φ-basis.
pub fn check_almost_contact(sm: &StructuredManifold, p: &[f64], tol: &Tolerances) -> Result<Vec<PointCheck>, GeometryError> {
    let t = tol.first_derivative;
    let names = [
        "phi_squared",
        "phi_xi",
        "eta_phi",
        "eta_xi",
        "metric_compatible",
        "eta_equals_g_xi",
        "eta_equals_g_xi_at_xi",
    ];
    let Some(st) = &sm.structure else {
        return Ok(names
            .iter()
            .map(|n| PointCheck::skipped(n, Kind::Bound(t), NO_STRUCTURE))
            .collect());
    };
    let n = sm.dim();
    let g = sm.metric.matrix_at(p)?;
    let phi = st.phi_at(p)?;
    let xi = st.xi_at(p)?;
    let eta = st.eta_at(p)?;
    let phi2 = linalg::mat_mul(&phi, &phi);
    let mut r_phi2: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            r_phi2 = r_phi2.max((phi2[i][j] + id - xi[i] * eta[j]).abs());
        }
    }
    let r_phi_xi = linalg::max_abs(&linalg::mat_vec(&phi, &xi));
    let eta_phi: Vec<f64> = (0..n).map(|j| (0..n).map(|i| eta[i] * phi[i][j]).sum()).collect();
    let eta_xi: f64 = eta.iter().zip(&xi).map(|(a, b)| a * b).sum();
    let gpp = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&phi), &g), &phi);
    let mut r_compat: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            r_compat = r_compat.max((gpp[i][j] - g[i][j] + eta[i] * eta[j]).abs());
        }
    }
    let gxi = linalg::mat_vec(&g, &xi);
    let at_xi = (eta_xi - linalg::bilinear(&g, &xi, &xi)).abs();
    let r_eta_g = linalg::max_abs(&linalg::sub(&eta, &gxi)).max(at_xi);

    let min_eig = linalg::symmetric_eigenvalues(&g)[0];
    let phi_rank = rank(&phi);
    let mut out = vec![
        PointCheck::agreement(
            "metric_positive_definite",
            min_eig > 0.0,
            format!("smallest eigenvalue {min_eig:e}"),
        ),
        PointCheck::bound(names[0], t, r_phi2),
        PointCheck::bound(names[1], t, r_phi_xi),
        PointCheck::bound(names[2], t, linalg::max_abs(&eta_phi)),
        PointCheck::bound(names[3], t, (eta_xi - 1.0).abs()),
        PointCheck::bound(names[4], t, r_compat),
        PointCheck::bound(names[5], t, r_eta_g),
        PointCheck::bound(names[6], t, at_xi),
        PointCheck::agreement("phi_rank", phi_rank + 1 == n, format!("rank(phi) = {phi_rank}, dim = {n}")),
    ];
    if !sm.phi_basis.is_empty() {
        let mut frame: Vec<Vec<f64>> = sm
            .phi_basis
            .iter()
            .map(|(_, f)| f.at(p))
            .collect::<Result<_, _>>()?;
        let half = frame.len() / 2;
        let mut r_action: f64 = 0.0;
        for i in 0..half {
            let a = linalg::mat_vec(&phi, &frame[i]);
            let b = linalg::mat_vec(&phi, &frame[half + i]);
            r_action = r_action
                .max(linalg::max_abs(&linalg::sub(&a, &frame[half + i])))
                .max(linalg::max_abs(&linalg::add(&b, &frame[i])));
        }
        frame.push(xi.clone());
        let mut r_gram: f64 = 0.0;
        for (i, u) in frame.iter().enumerate() {
            for (j, v) in frame.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                r_gram = r_gram.max((linalg::bilinear(&g, u, v) - id).abs());
            }
        }
        out.push(PointCheck::bound("phi_basis_orthonormal", t, r_gram));
        out.push(PointCheck::bound("phi_basis_action", t, r_action));
    }
    Ok(out)
}

/// dη = Φ on coordinate fields, dη(X,Y) = ½(Xη(Y) − Yη(X) − η([X,Y])) and
/// Φ(X,Y) = g(X, φY). The other sign convention is recorded as info.
pub fn check_contact_form(sm: &StructuredManifold, p: &[f64], tol: &Tolerances) -> Result<Vec<PointCheck>, GeometryError> {
    let t = tol.first_derivative;
    let Some(st) = &sm.structure else {
        return Ok(vec![PointCheck::skipped("d_eta_equals_Phi", Kind::Bound(t), NO_STRUCTURE)]);
    };
    let n = sm.dim();
    let g = sm.metric.matrix_at(p)?;
    let phi = st.phi_at(p)?;
    let eta_jets: Vec<_> = st.eta_exprs().iter().map(|e| e.evaluate_jet(p)).collect::<Result<_, _>>()?;
    let g_phi = linalg::mat_mul(&g, &phi);
    let mut r: f64 = 0.0;
    let mut r_other: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d_eta = 0.5 * (eta_jets[j].gradient(i) - eta_jets[i].gradient(j));
            r = r.max((d_eta - g_phi[i][j]).abs());
            // g(φ∂_i, ∂_j) = (gφ)_ji
            r_other = r_other.max((d_eta - g_phi[j][i]).abs());
        }
    }
    Ok(vec![
        PointCheck::bound("d_eta_equals_Phi", t, r),
        PointCheck::info("d_eta_minus_g_phiX_Y", r_other),
    ])
}

/// (∇_Xφ)Y = g(X,Y)ξ − η(Y)X, ∇_Xξ = −φX, R(ξ,X)Y = g(X,Y)ξ − η(Y)X and
/// S(X,ξ) = 2n η(X), over the coordinate basis (and ξ for the Ricci check).
pub fn check_sasakian(sm: &StructuredManifold, p: &[f64], tol: &Tolerances) -> Result<Vec<PointCheck>, GeometryError> {
    let Some(st) = &sm.structure else {
        return Ok(vec![
            PointCheck::skipped("nabla_phi", Kind::Bound(tol.tensor_derivative), NO_STRUCTURE),
            PointCheck::skipped("nabla_xi", Kind::Bound(tol.first_derivative), NO_STRUCTURE),
            PointCheck::skipped("curvature_R_xi", Kind::Bound(tol.curvature), NO_STRUCTURE),
            PointCheck::skipped("ricci_xi", Kind::Bound(tol.curvature), NO_STRUCTURE),
        ]);
    };
    let n = sm.dim();
    let germ = Germ::new(&sm.metric, p, 1)?;
    let phi_g = st.phi_germ(&germ)?;
    let xi_g = germ.field(st.xi().components())?;
    let geo = LocalGeometry::new(&sm.metric, p)?;
    let phi = st.phi_at(p)?;
    let xi = st.xi_at(p)?;
    let eta = st.eta_at(p)?;
    let basis: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect();

    let mut r_nabla_phi: f64 = 0.0;
    let mut r_nabla_xi: f64 = 0.0;
    let mut r_curv: f64 = 0.0;
    for x in &basis {
        let xf = germ::constant_field(x);
        let nabla_xi = germ::values(&germ.nabla(&xf, &xi_g));
        let phix = linalg::mat_vec(&phi, x);
        r_nabla_xi = r_nabla_xi.max(linalg::max_abs(&linalg::add(&nabla_xi, &phix)));
        for y in &basis {
            let yf = germ::constant_field(y);
            let lhs = linalg::sub(
                &germ::values(&germ.nabla(&xf, &germ::apply(&phi_g, &yf))),
                &linalg::mat_vec(&phi, &germ::values(&germ.nabla(&xf, &yf))),
            );
            let gxy = geo.inner(x, y);
            let eta_y: f64 = eta.iter().zip(y).map(|(a, b)| a * b).sum();
            let rhs = linalg::sub(&linalg::scale(&xi, gxy), &linalg::scale(x, eta_y));
            r_nabla_phi = r_nabla_phi.max(linalg::max_abs(&linalg::sub(&lhs, &rhs)));
            let curv = geo.curvature(&xi, x, y);
            r_curv = r_curv.max(linalg::max_abs(&linalg::sub(&curv, &rhs)));
        }
    }
    let mut out = vec![
        PointCheck::bound("nabla_phi", tol.tensor_derivative, r_nabla_phi),
        PointCheck::bound("nabla_xi", tol.first_derivative, r_nabla_xi),
        PointCheck::bound("curvature_R_xi", tol.curvature, r_curv),
    ];
    match sm.contact_n() {
        Some(cn) => {
            let mut r_ric: f64 = 0.0;
            for x in basis.iter().chain(std::iter::once(&xi)) {
                let eta_x: f64 = eta.iter().zip(x).map(|(a, b)| a * b).sum();
                r_ric = r_ric.max((geo.ricci(x, &xi) - 2.0 * cn as f64 * eta_x).abs());
            }
            out.push(PointCheck::bound("ricci_xi", tol.curvature, r_ric));
            out.push(PointCheck::info("ricci_xi_xi", geo.ricci(&xi, &xi)));
        }
        None => out.push(PointCheck::skipped(
            "ricci_xi",
            Kind::Bound(tol.curvature),
            "even-dimensional chart",
        )),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, fixture_source};
    use crate::model::parse_model;
    use crate::report::Observation;

    fn value(checks: &[PointCheck], name: &str) -> f64 {
        match &checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("{name}")).observation {
            Observation::Residual(v) | Observation::Witness(v) | Observation::Value(v) => *v,
            other => panic!("{name}: {other:?}"),
        }
    }

    const P: [f64; 5] = [0.3, -0.2, 0.5, 0.7, -0.4];

    #[test]
    fn corrected_structure_is_almost_contact_metric() {
        let m = fixture("example1").unwrap();
        let tol = Tolerances::default();
        let checks = check_almost_contact(&m.manifold, &P, &tol).unwrap();
        for c in &checks {
            if let Observation::Residual(r) = c.observation {
                assert!(r <= 1e-12, "{}: {r}", c.name);
            }
        }
        let rank = checks.iter().find(|c| c.name == "phi_rank").unwrap();
        assert!(matches!(rank.observation, Observation::Agreement { agree: true, .. }));
    }

    #[test]
    fn printed_metric_breaks_eta_equals_g_xi() {
        let m = fixture("example1-printed-metric").unwrap();
        let checks = check_almost_contact(&m.manifold, &P, &Tolerances::default()).unwrap();
        assert!((value(&checks, "eta_equals_g_xi_at_xi") - 0.75).abs() < 1e-12);
    }

    #[test]
    fn phi_of_xi_vanishes_and_ricci_of_xi_is_2n() {
        let m = fixture("example1").unwrap();
        let st = m.manifold.structure.as_ref().unwrap();
        let phi = st.phi_at(&P).unwrap();
        let xi = st.xi_at(&P).unwrap();
        assert!(linalg::max_abs(&linalg::mat_vec(&phi, &xi)) == 0.0);
        let checks = check_sasakian(&m.manifold, &P, &Tolerances::default()).unwrap();
        assert!((value(&checks, "ricci_xi_xi") - 4.0).abs() < 1e-9);
    }

    #[test]
    fn doubled_eta_fails_contact_form() {
        let text = fixture_source("example1")
            .unwrap()
            .replace(r#"eta = ["-y1/2", "-y2/2", 0, 0, "1/2"]"#, r#"eta = ["-y1", "-y2", 0, 0, "1"]"#);
        let m = parse_model(&text).unwrap();
        let checks = check_contact_form(&m.manifold, &P, &Tolerances::default()).unwrap();
        assert!(value(&checks, "d_eta_equals_Phi") > 0.1);
    }

    #[test]
    fn euclidean_with_zero_phi_is_not_sasakian() {
        let text = r#"
[model]
name = "flat"
[source]
coordinates = ["a", "b", "c", "d", "z"]
metric = { a.a = 1, b.b = 1, c.c = 1, d.d = 1, z.z = 1 }
[structure]
phi = {}
xi = [0, 0, 0, 0, 1]
eta = [0, 0, 0, 0, 1]
"#;
        let m = parse_model(text).unwrap();
        let checks = check_sasakian(&m.manifold, &P, &Tolerances::default()).unwrap();
        assert!((value(&checks, "nabla_phi") - 1.0).abs() < 1e-12);
        let form = check_contact_form(&m.manifold, &P, &Tolerances::default()).unwrap();
        assert_eq!(value(&form, "d_eta_equals_Phi"), 0.0);
    }

    #[test]
    fn no_structure_skips() {
        let m = fixture("flat-r2-r1").unwrap();
        let checks = check_almost_contact(&m.manifold, &[0.1, 0.2], &Tolerances::default()).unwrap();
        assert!(checks.iter().all(|c| matches!(c.observation, Observation::Skipped(_))));
    }
}
