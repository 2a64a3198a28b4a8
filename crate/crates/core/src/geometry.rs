//! Riemannian geometry on a single global chart.
//!
//! Index conventions:
//! * `gamma[k][i][j]` is Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij);
//! * `riemann[l][k][i][j]` is R^l_kij with R(∂_i, ∂_j)∂_k = R^l_kij ∂_l and
//!   R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z;
//! * Ricci is S(X,Y) = tr(V ↦ R(V,X)Y).

use crate::error::GeometryError;
use crate::expr::{EvalError, Expression};
use crate::jet::Jet2;
use crate::linalg::{self, Matrix};
use crate::scalar::{Coefficient, Real};

/// Ordered, uniquely named coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, GeometryError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(GeometryError::EmptyChart);
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(GeometryError::DuplicateCoordinate(a.clone()));
            }
        }
        Ok(Self { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Symmetric matrix of expressions, stored as its upper triangle.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Chart,
    upper: Vec<Expression>,
}

fn packed(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl MetricField {
    /// Build from a full matrix; `g[i][j]` and `g[j][i]` must be the same expression.
    pub fn new(chart: Chart, g: Vec<Vec<Expression>>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape {
                what: "metric",
                expected: n,
            });
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                if g[i][j] != g[j][i] {
                    return Err(GeometryError::AsymmetricMetric {
                        row: chart.names[i].clone(),
                        col: chart.names[j].clone(),
                        upper: g[i][j].to_string(),
                        lower: g[j][i].to_string(),
                    });
                }
                upper.push(g[i][j].clone());
            }
        }
        Ok(Self { chart, upper })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expression {
        &self.upper[packed(self.dim(), i, j)]
    }

    /// Evaluate every entry in coefficient ring `C`; mirrored, so exactly symmetric.
    pub fn eval<T: Real, C: Coefficient<T>>(&self, coords: &[C]) -> Result<Matrix<C>, EvalError> {
        let n = self.dim();
        let vals: Vec<C> = self
            .upper
            .iter()
            .map(|e| e.eval::<T, C>(coords))
            .collect::<Result<_, _>>()?;
        Ok((0..n)
            .map(|i| (0..n).map(|j| vals[packed(n, i, j)].clone()).collect())
            .collect())
    }

    fn check_point<T: Real>(&self, p: &[T]) -> Result<(), GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::PointDimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinitePoint);
        }
        Ok(())
    }

    /// Evaluated matrix, without the positive-definiteness check.
    pub fn matrix_at<T: Real>(&self, p: &[T]) -> Result<Matrix<T>, GeometryError> {
        self.check_point(p)?;
        Ok(self.eval::<T, T>(p)?)
    }

    /// Smallest eigenvalue of the evaluated matrix.
    pub fn min_eigenvalue<T: Real>(&self, p: &[T]) -> Result<T, GeometryError> {
        let g = self.matrix_at(p)?;
        Ok(linalg::symmetric_eigenvalues(&g)[0])
    }
}

/// Evaluated metric, asserting positive definiteness.
pub fn metric_at<T: Real>(m: &MetricField, p: &[T]) -> Result<Matrix<T>, GeometryError> {
    let g = m.matrix_at(p)?;
    let min = linalg::symmetric_eigenvalues(&g)[0];
    if !(min > T::zero()) {
        return Err(GeometryError::NotPositiveDefinite {
            min_eigenvalue: min.as_f64(),
            point: p.iter().map(|x| x.as_f64()).collect(),
        });
    }
    Ok(g)
}

pub fn inverse_metric_at<T: Real>(m: &MetricField, p: &[T]) -> Result<Matrix<T>, GeometryError> {
    let g = metric_at(m, p)?;
    linalg::invert::<T, T>(&g).ok_or(GeometryError::Singular)
}

/// Vector field with expression components in chart order.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<Expression>,
}

impl VectorField {
    pub fn new(components: Vec<Expression>) -> Self {
        Self { components }
    }

    /// Field with constant components.
    pub fn constant<T: Real>(v: &[T]) -> Self {
        Self {
            components: v.iter().map(|x| Expression::constant(x.as_f64())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn at<T: Real>(&self, p: &[T]) -> Result<Vec<T>, EvalError> {
        self.components.iter().map(|e| e.eval::<T, T>(p)).collect()
    }

    pub fn jets_at<T: Real>(&self, p: &[T]) -> Result<Vec<Jet2<T>>, EvalError> {
        self.components.iter().map(|e| e.evaluate_jet(p)).collect()
    }

    fn check(&self, dim: usize) -> Result<(), GeometryError> {
        if self.dim() != dim {
            return Err(GeometryError::ChartMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

/// Metric, connection and curvature coefficients at one point.
#[derive(Debug, Clone)]
pub struct LocalGeometry<T> {
    pub g: Matrix<T>,
    pub ginv: Matrix<T>,
    /// `dg[k][i][j]` = ∂_k g_ij.
    pub dg: Vec<Matrix<T>>,
    pub gamma: Vec<Vec<Vec<T>>>,
    /// `dgamma[m][k][i][j]` = ∂_m Γ^k_ij.
    pub dgamma: Vec<Vec<Vec<Vec<T>>>>,
    pub riemann: Vec<Vec<Vec<Vec<T>>>>,
}

impl<T: Real> LocalGeometry<T> {
    /// Requires only an invertible metric; positive definiteness is the caller's check.
    pub fn new(m: &MetricField, p: &[T]) -> Result<Self, GeometryError> {
        m.check_point(p)?;
        let n = m.dim();
        let vars: Vec<Jet2<T>> = p
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet2::variable(x, i, n))
            .collect();
        let jets = m.eval::<T, Jet2<T>>(&vars)?;
        let g: Matrix<T> = jets.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect();
        let ginv = linalg::invert::<T, T>(&g).ok_or(GeometryError::Singular)?;
        let dg: Vec<Matrix<T>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| (0..n).map(|j| jets[i][j].gradient(k)).collect())
                    .collect()
            })
            .collect();
        let ddg = |a: usize, b: usize, i: usize, j: usize| jets[i][j].hessian(a, b);
        let half = T::lit(0.5);

        // first kind: c[l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut c1 = vec![vec![vec![T::zero(); n]; n]; n];
        let mut dc1 = vec![vec![vec![vec![T::zero(); n]; n]; n]; n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    c1[l][i][j] = half * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    for mm in 0..n {
                        dc1[mm][l][i][j] =
                            half * (ddg(mm, i, j, l) + ddg(mm, j, i, l) - ddg(mm, l, i, j));
                    }
                }
            }
        }
        let mut gamma = vec![vec![vec![T::zero(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma[k][i][j] = (0..n).map(|l| ginv[k][l] * c1[l][i][j]).sum();
                }
            }
        }
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let dginv: Vec<Matrix<T>> = (0..n)
            .map(|mm| {
                let inner = linalg::mat_mul(&ginv, &dg[mm]);
                let full = linalg::mat_mul(&inner, &ginv);
                full.into_iter()
                    .map(|r| r.into_iter().map(|x| -x).collect())
                    .collect()
            })
            .collect();
        let mut dgamma = vec![vec![vec![vec![T::zero(); n]; n]; n]; n];
        for mm in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        dgamma[mm][k][i][j] = (0..n)
                            .map(|l| dginv[mm][k][l] * c1[l][i][j] + ginv[k][l] * dc1[mm][l][i][j])
                            .sum();
                    }
                }
            }
        }
        let mut riemann = vec![vec![vec![vec![T::zero(); n]; n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut r = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                        for a in 0..n {
                            r = r + gamma[l][i][a] * gamma[a][j][k] - gamma[l][j][a] * gamma[a][i][k];
                        }
                        riemann[l][k][i][j] = r;
                    }
                }
            }
        }
        Ok(Self {
            g,
            ginv,
            dg,
            gamma,
            dgamma,
            riemann,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        linalg::bilinear(&self.g, u, v)
    }

    /// Γ(X, Y)^k = Γ^k_ij X^i Y^j.
    pub fn gamma_contract(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut acc = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc = acc + self.gamma[k][i][j] * x[i] * y[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// R(X,Y)Z for vectors at the point.
    pub fn curvature(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|l| {
                let mut acc = T::zero();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            acc = acc + self.riemann[l][k][i][j] * x[i] * y[j] * z[k];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn ricci(&self, x: &[T], y: &[T]) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for l in 0..n {
            for k in 0..n {
                for j in 0..n {
                    acc = acc + self.riemann[l][k][l][j] * x[j] * y[k];
                }
            }
        }
        acc
    }
}

pub fn christoffel_at<T: Real>(m: &MetricField, p: &[T]) -> Result<Vec<Vec<Vec<T>>>, GeometryError> {
    metric_at(m, p)?;
    Ok(LocalGeometry::new(m, p)?.gamma)
}

fn directional<T: Real>(x: &[T], jets: &[Jet2<T>]) -> Vec<T> {
    jets.iter()
        .map(|y| x.iter().enumerate().map(|(i, &xi)| xi * y.gradient(i)).sum())
        .collect()
}

/// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j.
pub fn covariant_derivative_at<T: Real>(
    m: &MetricField,
    x: &VectorField,
    y: &VectorField,
    p: &[T],
) -> Result<Vec<T>, GeometryError> {
    x.check(m.dim())?;
    y.check(m.dim())?;
    let geo = LocalGeometry::new(m, p)?;
    let xv = x.at(p)?;
    let yj = y.jets_at(p)?;
    let yv: Vec<T> = yj.iter().map(|j| j.value()).collect();
    Ok(linalg::add(&directional(&xv, &yj), &geo.gamma_contract(&xv, &yv)))
}

pub fn lie_bracket_at<T: Real>(x: &VectorField, y: &VectorField, p: &[T]) -> Result<Vec<T>, GeometryError> {
    if x.dim() != y.dim() {
        return Err(GeometryError::ChartMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let xj = x.jets_at(p)?;
    let yj = y.jets_at(p)?;
    let xv: Vec<T> = xj.iter().map(|j| j.value()).collect();
    let yv: Vec<T> = yj.iter().map(|j| j.value()).collect();
    Ok(linalg::sub(&directional(&xv, &yj), &directional(&yv, &xj)))
}

pub fn riemann_at<T: Real>(
    m: &MetricField,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &[T],
) -> Result<Vec<T>, GeometryError> {
    for f in [x, y, z] {
        f.check(m.dim())?;
    }
    let geo = LocalGeometry::new(m, p)?;
    Ok(geo.curvature(&x.at(p)?, &y.at(p)?, &z.at(p)?))
}

pub fn ricci_at<T: Real>(m: &MetricField, x: &VectorField, y: &VectorField, p: &[T]) -> Result<T, GeometryError> {
    x.check(m.dim())?;
    y.check(m.dim())?;
    let geo = LocalGeometry::new(m, p)?;
    Ok(geo.ricci(&x.at(p)?, &y.at(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn metric(names: &[&str], rows: &[&[&str]]) -> MetricField {
        let chart = Chart::new(names.iter().copied()).unwrap();
        let g = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_expression(s, names).unwrap()).collect())
            .collect();
        MetricField::new(chart, g).unwrap()
    }

    #[test]
    fn euclidean_is_flat() {
        let m = metric(&["a", "b"], &[&["1", "0"], &["0", "1"]]);
        let geo = LocalGeometry::new(&m, &[0.3, -0.7]).unwrap();
        assert!(geo.gamma.iter().flatten().flatten().all(|&x| x == 0.0));
        assert!(geo.riemann.iter().flatten().flatten().flatten().all(|&x| x == 0.0));
        assert_eq!(inverse_metric_at(&m, &[0.0, 0.0]).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn polar_christoffels() {
        let m = metric(&["r", "t"], &[&["1", "0"], &["0", "r^2"]]);
        let gamma = christoffel_at(&m, &[2.0f64, 0.1]).unwrap();
        assert!((gamma[0][1][1] + 2.0).abs() < 1e-15);
        assert!((gamma[1][0][1] - 0.5).abs() < 1e-15);
        assert!((gamma[1][1][0] - 0.5).abs() < 1e-15);
        assert_eq!(gamma[0][0][0], 0.0);
        assert_eq!(gamma[1][1][1], 0.0);
    }

    #[test]
    fn round_sphere_curvature() {
        // dθ² + sin²θ dφ² approximated is not polynomial; use the metric
        // 4(dx²+dy²)/(1+x²+y²)² of the unit sphere, Gaussian curvature 1.
        let m = metric(
            &["x", "y"],
            &[&["4/(1+x^2+y^2)^2", "0"], &["0", "4/(1+x^2+y^2)^2"]],
        );
        let p = [0.3f64, -0.4];
        let geo = LocalGeometry::new(&m, &p).unwrap();
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        // K = g(R(e1,e2)e2, e1) / (g11 g22 - g12²)
        let r = geo.curvature(&e1, &e2, &e2);
        let k = geo.inner(&r, &e1) / (geo.g[0][0] * geo.g[1][1]);
        assert!((k - 1.0).abs() < 1e-12, "{k}");
        // Ricci = K g in dimension 2
        assert!((geo.ricci(&e1, &e1) - geo.g[0][0]).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let names = ["a", "b"];
        let chart = Chart::new(names).unwrap();
        let e = |s: &str| parse_expression(s, &names).unwrap();
        let err = MetricField::new(chart, vec![vec![e("1"), e("a")], vec![e("b"), e("1")]]).unwrap_err();
        assert!(err.to_string().contains("a") && err.to_string().contains("b"));
    }

    #[test]
    fn non_spd_reported() {
        let m = metric(&["a", "b"], &[&["1", "2"], &["2", "1"]]);
        assert!(matches!(
            metric_at(&m, &[0.0, 0.0]),
            Err(GeometryError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn single_precision_christoffels() {
        let m = metric(&["r", "t"], &[&["1", "0"], &["0", "r^2"]]);
        let gamma = christoffel_at(&m, &[2.0f32, 0.1]).unwrap();
        assert!((gamma[0][1][1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn constant_fields_have_zero_bracket() {
        let x = VectorField::constant(&[1.0, 2.0]);
        let y = VectorField::constant(&[-1.0, 0.5]);
        assert_eq!(lie_bracket_at(&x, &y, &[0.2, 0.2]).unwrap(), vec![0.0, 0.0]);
    }
}
