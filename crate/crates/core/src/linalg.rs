//! Small dense linear algebra over [`Coefficient`] rings.
//!
//! Matrices are row-major `Vec<Vec<C>>`. Sizes in this crate never exceed a
//! few dozen, so nothing here is blocked or vectorised.

use crate::scalar::{Coefficient, Real};

pub type Matrix<C> = Vec<Vec<C>>;

pub fn zeros<T: Real, C: Coefficient<T>>(rows: usize, cols: usize) -> Matrix<C> {
    vec![vec![C::zero(); cols]; rows]
}

pub fn identity<T: Real, C: Coefficient<T>>(n: usize) -> Matrix<C> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C::one();
    }
    m
}

pub fn transpose<C: Clone>(a: &Matrix<C>) -> Matrix<C> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<T: Real, C: Coefficient<T>>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "matrix shapes do not chain");
            (0..cols)
                .map(|j| {
                    let mut acc = C::zero();
                    for (k, x) in row.iter().enumerate() {
                        acc = acc + x.clone() * b[k][j].clone();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: Real, C: Coefficient<T>>(a: &Matrix<C>, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), v.len(), "matrix/vector shape mismatch");
            let mut acc = C::zero();
            for (x, y) in row.iter().zip(v) {
                acc = acc + x.clone() * y.clone();
            }
            acc
        })
        .collect()
}

/// `uᵀ G v`.
pub fn bilinear<T: Real, C: Coefficient<T>>(g: &Matrix<C>, u: &[C], v: &[C]) -> C {
    let gv = mat_vec(g, v);
    let mut acc = C::zero();
    for (a, b) in u.iter().zip(&gv) {
        acc = acc + a.clone() * b.clone();
    }
    acc
}

/// Gauss-Jordan inverse with partial pivoting on the constant term.
///
/// Returns `None` when a pivot's value falls below `1e-13` times the largest
/// absolute entry.
pub fn invert<T: Real, C: Coefficient<T>>(a: &Matrix<C>) -> Option<Matrix<C>> {
    let n = a.len();
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.value().abs())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    let eps = T::lit(1e-13) * scale;
    let mut work: Matrix<C> = a.clone();
    let mut inv: Matrix<C> = identity(n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            work[i][col]
                .value()
                .abs()
                .partial_cmp(&work[j][col].value().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(work[pivot][col].value().abs() > eps) {
            return None;
        }
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let r = work[col][col].recip();
        for j in 0..n {
            work[col][j] = work[col][j].clone() * r.clone();
            inv[col][j] = inv[col][j].clone() * r.clone();
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = work[i][col].clone();
            for j in 0..n {
                let w = work[col][j].clone();
                let v = inv[col][j].clone();
                work[i][j] = work[i][j].clone() - factor.clone() * w;
                inv[i][j] = inv[i][j].clone() - factor.clone() * v;
            }
        }
    }
    Some(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + m[i][j] * m[i][j];
            }
        }
        let diag: T = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    eig
}

/// Orthonormalise `vectors` in the inner product `g`, dropping any vector
/// whose residual norm falls below `drop_tol` times its original norm.
///
/// Two passes of modified Gram-Schmidt per vector.
pub fn gram_schmidt<T: Real>(g: &Matrix<T>, vectors: &[Vec<T>], drop_tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let original = bilinear(g, v, v).max(T::zero()).sqrt();
        if original == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = bilinear(g, b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi = *wi - c * *bi;
                }
            }
        }
        let norm = bilinear(g, &w, &w).max(T::zero()).sqrt();
        if norm <= drop_tol * original {
            continue;
        }
        basis.push(w.into_iter().map(|x| x / norm).collect());
    }
    basis
}

/// Basis of the null space of `a` from its reduced row echelon form.
///
/// Entries below `rel_tol` times the largest entry are treated as zero. The
/// basis vectors come out in the order of the free columns.
pub fn nullspace<T: Real>(a: &Matrix<T>, rel_tol: T) -> Vec<Vec<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let scale = a.iter().flatten().map(|x| x.abs()).fold(T::zero(), T::max);
    let eps = rel_tol * scale.max(T::min_positive_value());
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .max_by(|&i, &j| {
                m[i][c]
                    .abs()
                    .partial_cmp(&m[j][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty row range");
        if m[best][c].abs() <= eps {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c];
        for x in m[r].iter_mut() {
            *x = *x / p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][c];
                if f != T::zero() {
                    for j in 0..cols {
                        let v = m[r][j];
                        m[i][j] = m[i][j] - f * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f];
            }
            v
        })
        .collect()
}

pub fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| x.abs()).fold(T::zero(), T::max)
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|x| *x * s).collect()
}
