//! Truncated multivariate Taylor polynomials.
//!
//! A [`Taylor`] of order `k` stores the coefficients of the Taylor expansion
//! of a function about a base point, in the displacement from that point,
//! for every monomial of total degree `<= k`. Monomials are laid out by
//! increasing total degree, so the order-`k` coefficients are a prefix of the
//! order-`k + 1` coefficients and truncation is slicing.
//!
//! Differentiation lowers the order by one. The local geometry in
//! [`crate::germ`] relies on this to track how many derivatives are still
//! exact after building connections and projectors out of jets.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::{Coefficient, Real};

/// Highest order any layout is built for.
pub const MAX_ORDER: usize = 4;

/// Monomial bookkeeping shared by all polynomials in `dim` variables.
#[derive(Debug)]
pub struct Layout {
    dim: usize,
    max_order: usize,
    exponents: Vec<Vec<u8>>,
    // number of monomials of total degree <= k, for k = 0..=max_order
    counts: Vec<usize>,
    // (a, b, out) triples sorted by `out`; entries for order k are the prefix
    // of length `mul_counts[k]`
    mul_table: Vec<(u32, u32, u32)>,
    mul_counts: Vec<usize>,
    // derivative[i][alpha] = (index of alpha + e_i, alpha_i + 1), for |alpha| < max_order
    derivative: Vec<Vec<(usize, u32)>>,
}

impl Layout {
    fn build(dim: usize, max_order: usize) -> Self {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        let mut counts = Vec::with_capacity(max_order + 1);
        for degree in 0..=max_order {
            let mut current = vec![0u8; dim];
            push_degree(&mut exponents, &mut current, 0, degree);
            counts.push(exponents.len());
        }
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut mul_table = Vec::new();
        for (a, ea) in exponents.iter().enumerate() {
            let da: usize = ea.iter().map(|&x| x as usize).sum();
            for (b, eb) in exponents.iter().enumerate() {
                let db: usize = eb.iter().map(|&x| x as usize).sum();
                if da + db > max_order {
                    continue;
                }
                let sum: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                mul_table.push((a as u32, b as u32, index[&sum] as u32));
            }
        }
        mul_table.sort_by_key(|&(a, b, out)| (out, a, b));
        let mul_counts = counts
            .iter()
            .map(|&n| mul_table.partition_point(|&(_, _, out)| (out as usize) < n))
            .collect();

        let below = if max_order == 0 { 0 } else { counts[max_order - 1] };
        let derivative = (0..dim)
            .map(|i| {
                (0..below)
                    .map(|alpha| {
                        let mut raised = exponents[alpha].clone();
                        raised[i] += 1;
                        (index[&raised], raised[i] as u32)
                    })
                    .collect()
            })
            .collect();

        Self {
            dim,
            max_order,
            exponents,
            counts,
            mul_table,
            mul_counts,
            derivative,
        }
    }

    /// Shared layout for `dim` variables up to [`MAX_ORDER`].
    pub fn shared(dim: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry(dim)
            .or_insert_with(|| Arc::new(Layout::build(dim, MAX_ORDER)))
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self, order: usize) -> usize {
        self.counts[order.min(self.max_order)]
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exponents[index]
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() || current.is_empty() {
        match current.len() {
            0 if remaining == 0 => out.push(Vec::new()),
            0 => {}
            n => {
                current[n - 1] = remaining as u8;
                out.push(current.clone());
                current[n - 1] = 0;
            }
        }
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k as u8;
        push_degree(out, current, pos + 1, remaining - k);
    }
    current[pos] = 0;
}

/// Truncated Taylor polynomial; see the module docs.
///
/// A polynomial without a layout is an exact constant and combines with any
/// other polynomial.
#[derive(Clone, Debug)]
pub struct Taylor<T> {
    layout: Option<Arc<Layout>>,
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Real> Taylor<T> {
    pub fn constant(c: T) -> Self {
        Self {
            layout: None,
            order: usize::MAX,
            coeffs: vec![c],
        }
    }

    /// Coordinate function `x_index` about a base point where it equals `value`.
    pub fn variable(layout: &Arc<Layout>, order: usize, index: usize, value: T) -> Self {
        assert!(order <= layout.max_order, "order {order} above layout maximum");
        let mut coeffs = vec![T::zero(); layout.len(order)];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1 + index] = T::one();
        }
        Self {
            layout: Some(layout.clone()),
            order,
            coeffs,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.layout.is_none()
    }

    /// Number of exact derivatives carried (`usize::MAX` for constants).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// First partial derivative at the base point.
    pub fn partial(&self, i: usize) -> T {
        match &self.layout {
            None => T::zero(),
            Some(_) => {
                assert!(self.order >= 1, "first derivative of an order-0 jet");
                self.coeffs[1 + i]
            }
        }
    }

    /// Raw coefficient of monomial `index` (zero past the stored order).
    pub fn coeff(&self, index: usize) -> T {
        self.coeffs.get(index).copied().unwrap_or_else(T::zero)
    }

    /// Partial derivative as a polynomial of one lower order.
    pub fn derivative(&self, i: usize) -> Self {
        let Some(layout) = &self.layout else {
            return Self::constant(T::zero());
        };
        assert!(self.order >= 1, "differentiating an order-0 jet loses exactness");
        let order = self.order - 1;
        let coeffs = layout.derivative[i][..layout.len(order)]
            .iter()
            .map(|&(src, factor)| self.coeffs[src] * T::from_u32(factor).unwrap())
            .collect();
        Self {
            layout: self.layout.clone(),
            order,
            coeffs,
        }
    }

    /// Truncate to `order` (no-op if already lower).
    pub fn truncate(&self, order: usize) -> Self {
        match &self.layout {
            None => self.clone(),
            Some(layout) if order < self.order => Self {
                layout: self.layout.clone(),
                order,
                coeffs: self.coeffs[..layout.len(order)].to_vec(),
            },
            Some(_) => self.clone(),
        }
    }

    fn joint(&self, other: &Self) -> (Option<Arc<Layout>>, usize) {
        let layout = match (&self.layout, &other.layout) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b), "Taylor polynomials about different charts");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        (layout, self.order.min(other.order))
    }

    fn zip(self, other: Self, f: impl Fn(T, T) -> T) -> Self {
        let (layout, order) = self.joint(&other);
        let len = layout.as_ref().map_or(1, |l| l.len(order));
        let coeffs = (0..len).map(|i| f(self.coeff(i), other.coeff(i))).collect();
        Self {
            layout,
            order,
            coeffs,
        }
    }

    fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            layout: self.layout.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }
}

impl<T: Real> Add for Taylor<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for Taylor<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for Taylor<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl<T: Real> Mul for Taylor<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if rhs.is_constant() {
            let c = rhs.coeffs[0];
            return self.map(|a| a * c);
        }
        if self.is_constant() {
            let c = self.coeffs[0];
            return rhs.map(|a| a * c);
        }
        let (layout, order) = self.joint(&rhs);
        let layout = layout.expect("non-constant operands carry a layout");
        let mut coeffs = vec![T::zero(); layout.len(order)];
        for &(a, b, out) in &layout.mul_table[..layout.mul_counts[order]] {
            coeffs[out as usize] = coeffs[out as usize] + self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Self {
            layout: Some(layout),
            order,
            coeffs,
        }
    }
}

impl<T: Real> Coefficient<T> for Taylor<T> {
    fn constant(c: T) -> Self {
        Taylor::constant(c)
    }

    fn value(&self) -> T {
        self.coeffs[0]
    }

    fn recip(&self) -> Self {
        let r = T::one() / self.coeffs[0];
        if self.is_constant() {
            return Self::constant(r);
        }
        // 1/(b0 + h) = r * sum_k (-h r)^k, with h nilpotent of degree order + 1
        let mut q = self.map(|c| -c * r);
        q.coeffs[0] = T::zero();
        let mut sum = Self::constant(T::one());
        for _ in 0..self.order {
            sum = Self::constant(T::one()) + q.clone() * sum;
        }
        sum.scale(r).truncate(self.order)
    }

    fn scale(&self, c: T) -> Self {
        self.map(|a| a * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts() {
        let l = Layout::shared(3);
        assert_eq!(l.len(0), 1);
        assert_eq!(l.len(1), 4);
        assert_eq!(l.len(2), 10);
        assert_eq!(l.len(3), 20);
        // linear monomials follow the constant in variable order
        assert_eq!(l.exponents(1), &[1, 0, 0]);
        assert_eq!(l.exponents(3), &[0, 0, 1]);
    }

    #[test]
    fn product_and_derivative() {
        let l = Layout::shared(2);
        let x = Taylor::variable(&l, 3, 0, 2.0);
        let y = Taylor::variable(&l, 3, 1, -1.0);
        // f = x^2 y ; f_x = 2xy = -4 ; f_xy = 2x = 4 ; f_xx = 2y = -2
        let f = x.clone() * x * y;
        assert_eq!(f.value(), -4.0);
        let fx = f.derivative(0);
        assert_eq!(fx.value(), -4.0);
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.partial(1), 4.0);
        assert_eq!(fx.partial(0), -2.0);
        let fxx = fx.derivative(0);
        assert_eq!(fxx.partial(1), 2.0);
    }

    #[test]
    fn reciprocal_series() {
        let l = Layout::shared(1);
        let x = Taylor::variable(&l, 3, 0, 2.0);
        let r = x.recip();
        // derivatives of 1/x at 2: 1/2, -1/4, 2/8, -6/16
        assert_eq!(r.value(), 0.5);
        let d1 = r.derivative(0);
        assert_eq!(d1.value(), -0.25);
        let d2 = d1.derivative(0);
        assert_eq!(d2.value(), 0.25);
        let d3 = d2.derivative(0);
        assert_eq!(d3.value(), -0.375);
        assert_eq!(d3.order(), 0);
    }

    #[test]
    fn mixed_orders_truncate_to_lower() {
        let l = Layout::shared(2);
        let a = Taylor::variable(&l, 3, 0, 1.0);
        let b = Taylor::variable(&l, 1, 1, 1.0);
        assert_eq!((a * b).order(), 1);
    }
}
