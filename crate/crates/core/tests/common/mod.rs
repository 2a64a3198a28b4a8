//! Central finite-difference reference implementation.
//!
//! Uses nothing from the library but point evaluation of expressions, so it
//! shares no code path with the jet-based geometry.

#![allow(dead_code)]

use subverify::submersion::SubmersionSpec;
use subverify::{Expression, MetricField, Model};

pub const STEP: f64 = 1e-5;

pub type Mat = Vec<Vec<f64>>;

pub fn shifted(p: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += h;
    q
}

/// Gauss-Jordan with partial pivoting.
pub fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        assert!(d.abs() > 1e-14, "singular matrix in oracle");
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[r][j] -= f * m[c][j];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn matvec(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn values(exprs: &[Expression], p: &[f64]) -> Vec<f64> {
    exprs.iter().map(|e| e.value_at(p).unwrap()).collect()
}

pub fn metric(m: &MetricField, p: &[f64]) -> Mat {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m.entry(i, j).value_at(p).unwrap()).collect())
        .collect()
}

/// `dg[k][i][j]` = ∂_k g_ij.
pub fn metric_derivative(m: &MetricField, p: &[f64]) -> Vec<Mat> {
    let n = m.dim();
    (0..n)
        .map(|k| {
            let (gp, gm) = (metric(m, &shifted(p, k, STEP)), metric(m, &shifted(p, k, -STEP)));
            (0..n)
                .map(|i| (0..n).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * STEP)).collect())
                .collect()
        })
        .collect()
}

/// `gamma[k][i][j]` = Γ^k_ij.
pub fn christoffel(m: &MetricField, p: &[f64]) -> Vec<Mat> {
    let n = m.dim();
    let ginv = inverse(&metric(m, p));
    let dg = metric_derivative(m, p);
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            (0..n)
                                .map(|l| 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `r[l][k][i][j]` = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_ia Γ^a_jk − Γ^l_ja Γ^a_ik.
pub fn riemann(m: &MetricField, p: &[f64]) -> Vec<Vec<Mat>> {
    let n = m.dim();
    let g = christoffel(m, p);
    let dgamma: Vec<Vec<Mat>> = (0..n)
        .map(|a| {
            let (up, dn) = (christoffel(m, &shifted(p, a, STEP)), christoffel(m, &shifted(p, a, -STEP)));
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|i| (0..n).map(|j| (up[k][i][j] - dn[k][i][j]) / (2.0 * STEP)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for a in 0..n {
                        v += g[l][i][a] * g[a][j][k] - g[l][j][a] * g[a][i][k];
                    }
                    r[l][k][i][j] = v;
                }
            }
        }
    }
    r
}

/// `j[a][i]` = ∂_i F^a.
pub fn jacobian(spec: &SubmersionSpec, p: &[f64]) -> Mat {
    let m = p.len();
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let up = values(&spec.components, &shifted(p, i, STEP));
            let dn = values(&spec.components, &shifted(p, i, -STEP));
            up.iter().zip(&dn).map(|(u, d)| (u - d) / (2.0 * STEP)).collect()
        })
        .collect();
    transpose(&cols)
}

/// `h[a][i][j]` = ∂_i∂_j F^a by second central differences.
pub fn map_hessian(spec: &SubmersionSpec, p: &[f64]) -> Vec<Mat> {
    let m = p.len();
    let f = |q: &[f64]| values(&spec.components, q);
    let h = 1e-4;
    let mut out = vec![vec![vec![0.0; m]; m]; spec.components.len()];
    for i in 0..m {
        for j in 0..m {
            let pp = f(&shifted(&shifted(p, i, h), j, h));
            let pm = f(&shifted(&shifted(p, i, h), j, -h));
            let mp = f(&shifted(&shifted(p, i, -h), j, h));
            let mm = f(&shifted(&shifted(p, i, -h), j, -h));
            for a in 0..out.len() {
                out[a][i][j] = (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * h * h);
            }
        }
    }
    out
}

/// Orthogonal projector onto the vertical space ker F_*.
pub fn vertical_projector(spec: &SubmersionSpec, p: &[f64]) -> Mat {
    let g = metric(&spec.source.metric, p);
    let ginv = inverse(&g);
    let j = jacobian(spec, p);
    let gjt = matmul(&ginv, &transpose(&j));
    let ph = matmul(&matmul(&gjt, &inverse(&matmul(&j, &gjt))), &j);
    let n = p.len();
    (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 } - ph[r][c]).collect())
        .collect()
}

/// ∇_X(P f) for a constant vector f, with P a projector field.
fn nabla_projected(gamma: &[Mat], dp: &[Mat], p_at: &Mat, x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let pf = matvec(p_at, f);
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for a in 0..n {
                acc += x[a] * matvec(&dp[a], f)[k];
                for b in 0..n {
                    acc += gamma[k][a][b] * x[a] * pf[b];
                }
            }
            acc
        })
        .collect()
}

/// Reference O'Neill tensors at a point, for constant-component arguments.
pub struct Oneill {
    gamma: Vec<Mat>,
    pv: Mat,
    dpv: Vec<Mat>,
}

impl Oneill {
    pub fn new(spec: &SubmersionSpec, p: &[f64]) -> Self {
        let n = p.len();
        let dpv = (0..n)
            .map(|k| {
                let up = vertical_projector(spec, &shifted(p, k, STEP));
                let dn = vertical_projector(spec, &shifted(p, k, -STEP));
                (0..n)
                    .map(|r| (0..n).map(|c| (up[r][c] - dn[r][c]) / (2.0 * STEP)).collect())
                    .collect()
            })
            .collect();
        Self {
            gamma: christoffel(&spec.source.metric, p),
            pv: vertical_projector(spec, p),
            dpv,
        }
    }

    fn ph(&self) -> Mat {
        let n = self.pv.len();
        (0..n)
            .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 } - self.pv[r][c]).collect())
            .collect()
    }

    fn neg_dpv(&self) -> Vec<Mat> {
        self.dpv
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|x| -x).collect()).collect())
            .collect()
    }

    fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (matvec(&self.pv, x), matvec(&self.ph(), x))
    }

    /// T_E F = H∇_{VE}VF + V∇_{VE}HF.
    pub fn t(&self, e: &[f64], f: &[f64]) -> Vec<f64> {
        self.tensor(&self.split(e).0, f)
    }

    /// A_E F = V∇_{HE}HF + H∇_{HE}VF.
    pub fn a(&self, e: &[f64], f: &[f64]) -> Vec<f64> {
        self.tensor(&self.split(e).1, f)
    }

    fn tensor(&self, x: &[f64], f: &[f64]) -> Vec<f64> {
        let ph = self.ph();
        let nv = nabla_projected(&self.gamma, &self.dpv, &self.pv, x, f);
        let nh = nabla_projected(&self.gamma, &self.neg_dpv(), &ph, x, f);
        let a = matvec(&ph, &nv);
        let b = matvec(&self.pv, &nh);
        a.iter().zip(&b).map(|(u, v)| u + v).collect()
    }
}

/// (∇F_*)(X,Y) = Hess F(X,Y) − F_*Γ(X,Y) + Γ^N(F_*X, F_*Y).
pub fn second_fundamental_form(spec: &SubmersionSpec, x: &[f64], y: &[f64], p: &[f64]) -> Vec<f64> {
    let hess = map_hessian(spec, p);
    let j = jacobian(spec, p);
    let gm = christoffel(&spec.source.metric, p);
    let q = values(&spec.components, p);
    let gn = christoffel(&spec.target, &q);
    let m = p.len();
    let nabla_xy: Vec<f64> = (0..m)
        .map(|k| (0..m).flat_map(|i| (0..m).map(move |l| (i, l))).map(|(i, l)| gm[k][i][l] * x[i] * y[l]).sum())
        .collect();
    let (fx, fy, fg) = (matvec(&j, x), matvec(&j, y), matvec(&j, &nabla_xy));
    let n = fx.len();
    (0..n)
        .map(|a| {
            let mut v = -fg[a];
            for i in 0..m {
                for l in 0..m {
                    v += hess[a][i][l] * x[i] * y[l];
                }
            }
            for b in 0..n {
                for c in 0..n {
                    v += gn[a][b][c] * fx[b] * fy[c];
                }
            }
            v
        })
        .collect()
}

/// Seeded admissible points of a model, honouring target guards too.
pub fn points(model: &Model, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let (pts, _) = subverify::runner::sample_points(model, count * 4, seed).unwrap();
    let pts: Vec<_> = pts
        .into_iter()
        .filter(|p| model.submersion.as_ref().map_or(true, |s| s.admits(p).unwrap()))
        .take(count)
        .collect();
    assert_eq!(pts.len(), count, "not enough admissible points for {}", model.name);
    pts
}

/// Coordinate basis vectors followed by a few fixed mixed directions.
pub fn directions(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    out.push((0..n).map(|j| 0.3 + 0.1 * j as f64).collect());
    out.push((0..n).map(|j| if j % 2 == 0 { -0.7 } else { 0.4 }).collect());
    out
}

pub const MAP_FIXTURES: [&str; 5] = ["example2", "example3", "example4", "flat-r2-r1", "control-r3-r2"];

/// Largest jet-versus-oracle discrepancy per quantity.
#[derive(Debug, Default, Clone, Copy)]
pub struct Discrepancy {
    pub christoffel: f64,
    pub riemann: f64,
    pub t: f64,
    pub a: f64,
    pub sff: f64,
}

impl Discrepancy {
    pub fn max(&self) -> f64 {
        [self.christoffel, self.riemann, self.t, self.a, self.sff]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn flat4(v: &[Vec<Mat>]) -> Vec<f64> {
    v.iter().flatten().flatten().flatten().copied().collect()
}

pub fn compare_with_oracle(model: &Model, count: usize, seed: u64) -> Discrepancy {
    use subverify::harmonic::second_fundamental_form_at;
    use subverify::submersion::{tensor_a_at, tensor_t_at};
    use subverify::LocalGeometry;

    let mut d = Discrepancy::default();
    let metric = &model.manifold.metric;
    for p in points(model, count, seed) {
        let geo = LocalGeometry::new(metric, &p).unwrap();
        let gamma: Vec<f64> = geo.gamma.iter().flatten().flatten().copied().collect();
        let reference: Vec<f64> = christoffel(metric, &p).into_iter().flatten().flatten().collect();
        d.christoffel = d.christoffel.max(max_diff(&gamma, &reference));
        d.riemann = d.riemann.max(max_diff(&flat4(&geo.riemann), &flat4(&riemann(metric, &p))));

        let Some(spec) = &model.submersion else { continue };
        let oracle = Oneill::new(spec, &p);
        let dirs = directions(p.len());
        for e in &dirs {
            for f in &dirs {
                d.t = d.t.max(max_diff(&tensor_t_at(spec, e, f, &p).unwrap(), &oracle.t(e, f)));
                d.a = d.a.max(max_diff(&tensor_a_at(spec, e, f, &p).unwrap(), &oracle.a(e, f)));
                let sff = second_fundamental_form_at(spec, e, f, &p).unwrap();
                d.sff = d.sff.max(max_diff(&sff, &second_fundamental_form(spec, e, f, &p)));
            }
        }
    }
    d
}
