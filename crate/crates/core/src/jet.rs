//! Order-2 jets: value, gradient and Hessian propagated through arithmetic.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Coefficient, Real};

/// Value, gradient and Hessian of a scalar function at a point.
///
/// The Hessian is stored as its upper triangle and every update writes
/// `(i, j)` with `i <= j` once, so `hessian(i, j) == hessian(j, i)` exactly.
/// A jet with an empty gradient is a constant and broadcasts against jets of
/// any dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T> {
    value: T,
    gradient: Vec<T>,
    // packed upper triangle, row-major
    hessian: Vec<T>,
}

fn tri_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

fn tri_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl<T: Real> Jet2<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            gradient: Vec::new(),
            hessian: Vec::new(),
        }
    }

    /// The coordinate function `x_index` in a `dim`-dimensional chart, at `value`.
    pub fn variable(value: T, index: usize, dim: usize) -> Self {
        assert!(index < dim, "variable index {index} out of range for dim {dim}");
        let mut gradient = vec![T::zero(); dim];
        gradient[index] = T::one();
        Self {
            value,
            gradient,
            hessian: vec![T::zero(); tri_len(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn gradient(&self, i: usize) -> T {
        self.gradient.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn hessian(&self, i: usize, j: usize) -> T {
        if self.gradient.is_empty() {
            return T::zero();
        }
        self.hessian[tri_index(self.dim(), i, j)]
    }

    pub fn gradient_vec(&self, dim: usize) -> Vec<T> {
        (0..dim).map(|i| self.gradient(i)).collect()
    }

    pub fn hessian_matrix(&self, dim: usize) -> Vec<Vec<T>> {
        (0..dim)
            .map(|i| (0..dim).map(|j| self.hessian(i, j)).collect())
            .collect()
    }

    fn common_dim(&self, other: &Self) -> usize {
        match (self.dim(), other.dim()) {
            (0, d) | (d, 0) => d,
            (a, b) => {
                assert_eq!(a, b, "jets from charts of different dimension");
                a
            }
        }
    }

    /// Chain rule for a scalar function with derivatives `d1`, `d2` at `self.value`.
    pub fn compose(&self, f: T, d1: T, d2: T) -> Self {
        let dim = self.dim();
        let gradient = self.gradient.iter().map(|&g| d1 * g).collect();
        let mut hessian = Vec::with_capacity(tri_len(dim));
        for i in 0..dim {
            for j in i..dim {
                let h = self.hessian[tri_index(dim, i, j)];
                hessian.push(d1 * h + d2 * self.gradient[i] * self.gradient[j]);
            }
        }
        Self {
            value: f,
            gradient,
            hessian,
        }
    }

    fn zip(&self, other: &Self, value: T, fg: impl Fn(T, T) -> T) -> Self {
        let dim = self.common_dim(other);
        let gradient = (0..dim)
            .map(|i| fg(self.gradient(i), other.gradient(i)))
            .collect();
        let mut hessian = Vec::with_capacity(tri_len(dim));
        for i in 0..dim {
            for j in i..dim {
                hessian.push(fg(self.hessian(i, j), other.hessian(i, j)));
            }
        }
        Self {
            value,
            gradient,
            hessian,
        }
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip(&rhs, self.value + rhs.value, |a, b| a + b)
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip(&rhs, self.value - rhs.value, |a, b| a - b)
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            gradient: self.gradient.into_iter().map(|g| -g).collect(),
            hessian: self.hessian.into_iter().map(|h| -h).collect(),
        }
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let dim = self.common_dim(&rhs);
        let (a, b) = (self.value, rhs.value);
        let gradient = (0..dim)
            .map(|i| a * rhs.gradient(i) + b * self.gradient(i))
            .collect();
        let mut hessian = Vec::with_capacity(tri_len(dim));
        for i in 0..dim {
            for j in i..dim {
                let cross = self.gradient(i) * rhs.gradient(j) + self.gradient(j) * rhs.gradient(i);
                hessian.push(a * rhs.hessian(i, j) + b * self.hessian(i, j) + cross);
            }
        }
        Self {
            value: a * b,
            gradient,
            hessian,
        }
    }
}

impl<T: Real> Coefficient<T> for Jet2<T> {
    fn constant(c: T) -> Self {
        Jet2::constant(c)
    }

    fn value(&self) -> T {
        self.value
    }

    fn recip(&self) -> Self {
        let r = T::one() / self.value;
        self.compose(r, -r * r, T::lit(2.0) * r * r * r)
    }

    fn scale(&self, c: T) -> Self {
        Self {
            value: self.value * c,
            gradient: self.gradient.iter().map(|&g| g * c).collect(),
            hessian: self.hessian.iter().map(|&h| h * c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_variable() {
        let y = Jet2::variable(3.0, 0, 1);
        let sq = y.clone() * y;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.gradient(0), 6.0);
        assert_eq!(sq.hessian(0, 0), 2.0);
    }

    #[test]
    fn product_cross_term() {
        let a = Jet2::variable(1.0, 0, 2);
        let b = Jet2::variable(-1.0, 1, 2);
        let p = a * b;
        assert_eq!(p.value(), -1.0);
        assert_eq!(p.gradient_vec(2), vec![-1.0, 1.0]);
        assert_eq!(p.hessian(0, 1), 1.0);
        assert_eq!(p.hessian(1, 0), 1.0);
        assert_eq!(p.hessian(0, 0), 0.0);
    }

    #[test]
    fn reciprocal_second_derivative() {
        // 1/x at x = 2: -1/4, 2/8
        let x = Jet2::variable(2.0, 0, 1);
        let r = x.recip();
        assert_eq!(r.value(), 0.5);
        assert_eq!(r.gradient(0), -0.25);
        assert_eq!(r.hessian(0, 0), 0.25);
    }

    #[test]
    fn constants_broadcast() {
        let x = Jet2::variable(2.0, 1, 3);
        let s = Jet2::constant(5.0) * x.clone() + Jet2::constant(1.0);
        assert_eq!(s.value(), 11.0);
        assert_eq!(s.gradient_vec(3), vec![0.0, 5.0, 0.0]);
        assert_eq!(s.dim(), 3);
    }
}
