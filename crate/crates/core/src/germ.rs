//! Local Taylor geometry about a point.
//!
//! A [`Germ`] holds the metric, its inverse and the Christoffel symbols as
//! truncated Taylor polynomials about a base point. Vector fields are
//! vectors of [`Taylor`] components, so covariant derivatives and brackets of
//! fields built from projections, φ and other tensors stay exact up to the
//! order carried. Every derivative lowers the order by one; evaluating a
//! value never needs more than order 0.

use std::sync::Arc;

use crate::error::GeometryError;
use crate::expr::{EvalError, Expression};
use crate::geometry::MetricField;
use crate::linalg::{self, Matrix};
use crate::scalar::{Coefficient, Real};
use crate::taylor::{Layout, Taylor};

pub type Field<T> = Vec<Taylor<T>>;
pub type FieldMatrix<T> = Matrix<Taylor<T>>;

#[derive(Debug, Clone)]
pub struct Germ<T> {
    layout: Arc<Layout>,
    point: Vec<T>,
    order: usize,
    pub g: FieldMatrix<T>,
    pub ginv: FieldMatrix<T>,
    /// `gamma[k][i][j]`, one order below `g`.
    pub gamma: Vec<Vec<Vec<Taylor<T>>>>,
}

impl<T: Real> Germ<T> {
    /// Expand `metric` about `point` to `order` (at least 1).
    pub fn new(metric: &MetricField, point: &[T], order: usize) -> Result<Self, GeometryError> {
        assert!(order >= 1, "a connection needs a first-order metric");
        let n = metric.dim();
        if point.len() != n {
            return Err(GeometryError::PointDimension {
                expected: n,
                got: point.len(),
            });
        }
        let layout = Layout::shared(n);
        let coords = variables(&layout, point, order);
        let g = metric.eval::<T, Taylor<T>>(&coords)?;
        let ginv = linalg::invert::<T, Taylor<T>>(&g).ok_or(GeometryError::Singular)?;
        let dg: Vec<FieldMatrix<T>> = (0..n)
            .map(|k| g.iter().map(|r| r.iter().map(|e| e.derivative(k)).collect()).collect())
            .collect();
        let half = T::lit(0.5);
        let mut gamma = vec![vec![vec![Taylor::constant(T::zero()); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                let first: Vec<Taylor<T>> = (0..n)
                    .map(|l| (dg[i][j][l].clone() + dg[j][i][l].clone() - dg[l][i][j].clone()).scale(half))
                    .collect();
                for k in 0..n {
                    let mut acc = Taylor::constant(T::zero());
                    for (l, c) in first.iter().enumerate() {
                        acc = acc + ginv[k][l].clone() * c.clone();
                    }
                    gamma[k][i][j] = acc.clone();
                    gamma[k][j][i] = acc;
                }
            }
        }
        Ok(Self {
            layout,
            point: point.to_vec(),
            order,
            g,
            ginv,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coordinate functions expanded to this germ's order.
    pub fn coordinates(&self) -> Vec<Taylor<T>> {
        variables(&self.layout, &self.point, self.order)
    }

    pub fn scalar(&self, e: &Expression) -> Result<Taylor<T>, EvalError> {
        e.eval::<T, Taylor<T>>(&self.coordinates())
    }

    pub fn field(&self, components: &[Expression]) -> Result<Field<T>, EvalError> {
        let coords = self.coordinates();
        components.iter().map(|e| e.eval::<T, Taylor<T>>(&coords)).collect()
    }

    pub fn matrix(&self, entries: &[Vec<Expression>]) -> Result<FieldMatrix<T>, EvalError> {
        let coords = self.coordinates();
        entries
            .iter()
            .map(|r| r.iter().map(|e| e.eval::<T, Taylor<T>>(&coords)).collect())
            .collect()
    }

    /// Same germ with every stored polynomial truncated to `order`.
    ///
    /// Used when only low-order results are needed; it makes products cheap.
    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            layout: self.layout.clone(),
            point: self.point.clone(),
            order,
            g: truncate_matrix(&self.g, order),
            ginv: truncate_matrix(&self.ginv, order),
            gamma: self
                .gamma
                .iter()
                .map(|m| truncate_matrix(m, order.saturating_sub(1)))
                .collect(),
        }
    }

    /// (∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j.
    pub fn nabla(&self, x: &Field<T>, y: &Field<T>) -> Field<T> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut acc = directional(x, &y[k]);
                for i in 0..n {
                    let mut row = Taylor::constant(T::zero());
                    for j in 0..n {
                        row = row + self.gamma[k][i][j].clone() * y[j].clone();
                    }
                    acc = acc + x[i].clone() * row;
                }
                acc
            })
            .collect()
    }

    pub fn bracket(&self, x: &Field<T>, y: &Field<T>) -> Field<T> {
        (0..self.dim())
            .map(|k| directional(x, &y[k]) - directional(y, &x[k]))
            .collect()
    }

    pub fn inner(&self, x: &Field<T>, y: &Field<T>) -> Taylor<T> {
        linalg::bilinear(&self.g, x, y)
    }
}

fn variables<T: Real>(layout: &Arc<Layout>, point: &[T], order: usize) -> Vec<Taylor<T>> {
    point
        .iter()
        .enumerate()
        .map(|(i, &x)| Taylor::variable(layout, order, i, x))
        .collect()
}

pub fn truncate_matrix<T: Real>(m: &FieldMatrix<T>, order: usize) -> FieldMatrix<T> {
    m.iter().map(|r| r.iter().map(|e| e.truncate(order)).collect()).collect()
}

pub fn truncate_field<T: Real>(f: &Field<T>, order: usize) -> Field<T> {
    f.iter().map(|e| e.truncate(order)).collect()
}

/// X(f) = X^i ∂_i f.
pub fn directional<T: Real>(x: &Field<T>, f: &Taylor<T>) -> Taylor<T> {
    if f.is_constant() {
        return Taylor::constant(T::zero());
    }
    let mut acc = Taylor::constant(T::zero());
    for (i, xi) in x.iter().enumerate() {
        acc = acc + xi.clone() * f.derivative(i);
    }
    acc
}

pub fn constant_field<T: Real>(v: &[T]) -> Field<T> {
    v.iter().map(|&x| Taylor::constant(x)).collect()
}

pub fn apply<T: Real>(m: &FieldMatrix<T>, v: &Field<T>) -> Field<T> {
    linalg::mat_vec(m, v)
}

pub fn values<T: Real>(f: &Field<T>) -> Vec<T> {
    f.iter().map(|c| c.value()).collect()
}

pub fn add<T: Real>(a: &Field<T>, b: &Field<T>) -> Field<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Real>(a: &Field<T>, b: &Field<T>) -> Field<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Real>(a: &Field<T>, s: &Taylor<T>) -> Field<T> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}
