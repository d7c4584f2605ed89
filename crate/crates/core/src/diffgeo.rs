//! Finite-difference exterior calculus on coordinate charts.
//!
//! Fields are closures over chart coordinates; operators sample them on
//! central stencils of width 2h, so every derivative is second-order accurate.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Sorted index subsets of {0..n} of size k, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn perm_sign(seq: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

/// A k-form at a point of an n-dimensional chart, components on sorted index sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub n: usize,
    pub deg: usize,
    pub comps: Vec<f64>,
}

impl Form {
    pub fn zero(n: usize, deg: usize) -> Self {
        Self { n, deg, comps: vec![0.0; subsets(n, deg).len()] }
    }

    pub fn scalar(n: usize, v: f64) -> Self {
        Self { n, deg: 0, comps: vec![v] }
    }

    pub fn one_form(c: &[f64]) -> Self {
        Self { n: c.len(), deg: 1, comps: c.to_vec() }
    }

    /// Components from (sorted-or-not index list, value) pairs.
    pub fn from_entries(n: usize, deg: usize, entries: &[(&[usize], f64)]) -> Self {
        let mut f = Self::zero(n, deg);
        for (idx, v) in entries {
            let mut sorted = idx.to_vec();
            sorted.sort_unstable();
            let s = perm_sign(idx);
            let pos = f.position(&sorted).expect("repeated index");
            f.comps[pos] += s * v;
        }
        f
    }

    pub fn position(&self, sorted: &[usize]) -> Option<usize> {
        subsets(self.n, self.deg).iter().position(|s| s == sorted)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return 0.0;
        }
        self.position(&sorted).map(|p| perm_sign(idx) * self.comps[p]).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, o: &Form) -> Form {
        Form { n: self.n, deg: self.deg, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, o: &Form) -> Form {
        Form { n: self.n, deg: self.deg, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: f64) -> Form {
        Form { n: self.n, deg: self.deg, comps: self.comps.iter().map(|a| a * c).collect() }
    }
}

pub fn wedge(a: &Form, b: &Form) -> Form {
    let n = a.n;
    let mut out = Form::zero(n, a.deg + b.deg);
    let sa = subsets(n, a.deg);
    let sb = subsets(n, b.deg);
    for (i, ia) in sa.iter().enumerate() {
        for (j, ib) in sb.iter().enumerate() {
            if ia.iter().any(|x| ib.contains(x)) {
                continue;
            }
            let mut cat = ia.clone();
            cat.extend(ib);
            let s = perm_sign(&cat);
            cat.sort_unstable();
            let p = out.position(&cat).unwrap();
            out.comps[p] += s * a.comps[i] * b.comps[j];
        }
    }
    out
}

fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]).determinant()
}

/// Hodge star for metric g with orientation dx⁰∧…∧dx^{n−1}.
pub fn hodge_star(a: &Form, g: &DMatrix<f64>) -> Form {
    let n = a.n;
    let k = a.deg;
    let gi = g.clone().try_inverse().expect("metric must be invertible");
    let vol = g.determinant().abs().sqrt();
    let sets = subsets(n, k);
    let mut out = Form::zero(n, n - k);
    for (p, kset) in subsets(n, n - k).iter().enumerate() {
        let iset: Vec<usize> = (0..n).filter(|x| !kset.contains(x)).collect();
        // raised component α^I = Σ_J det(g⁻¹[I,J]) α_J
        let up: f64 = sets.iter().zip(&a.comps).map(|(j, c)| minor(&gi, &iset, j) * c).sum();
        let mut cat = iset.clone();
        cat.extend(kset);
        out.comps[p] = vol * perm_sign(&cat) * up;
    }
    out
}

/// Pointwise norm |F|_g of a 2-form given as an antisymmetric matrix, |F|² = ½ tr(F g⁻¹ Fᵀ g⁻¹).
pub fn two_form_norm(f: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let gi = g.clone().try_inverse().expect("metric must be invertible");
    (0.5 * (f * &gi * f.transpose() * &gi).trace()).max(0.0).sqrt()
}

impl Form {
    /// Antisymmetric matrix of a 2-form.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.deg, 2);
        let mut m = DMatrix::zeros(self.n, self.n);
        for (p, s) in subsets(self.n, 2).iter().enumerate() {
            m[(s[0], s[1])] = self.comps[p];
            m[(s[1], s[0])] = -self.comps[p];
        }
        m
    }
}

/// Rectangular chart with optional periodic axes and excluded balls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
    pub h: f64,
    pub exclusions: Vec<(Vec<f64>, f64)>,
}

impl ChartGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, h: f64) -> Result<Self> {
        if lo.len() != hi.len() || !(2..=4).contains(&lo.len()) {
            return Err(GeomError::InvalidParameter("grid dimension must be 2, 3 or 4".into()));
        }
        if !(h > 0.0) {
            return Err(GeomError::InvalidParameter("h must be positive".into()));
        }
        let d = lo.len();
        Ok(Self { lo, hi, periodic: vec![false; d], h, exclusions: Vec::new() })
    }

    pub fn with_periodic(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn exclude(mut self, center: Vec<f64>, radius: f64) -> Self {
        self.exclusions.push((center, radius));
        self
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn excluded(&self, x: &[f64]) -> bool {
        self.exclusions.iter().any(|(c, r)| {
            let d2: f64 = c
                .iter()
                .enumerate()
                .map(|(a, ca)| {
                    let mut d = x[a] - ca;
                    if self.periodic[a] {
                        let l = self.hi[a] - self.lo[a];
                        d -= (d / l).round() * l;
                    }
                    d * d
                })
                .sum();
            d2.sqrt() < *r
        })
    }

    /// Node coordinates with exclusion balls padded by two stencil widths.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = (0..self.dim())
            .map(|a| {
                let n = ((self.hi[a] - self.lo[a]) / self.h).round() as usize;
                if self.periodic[a] {
                    n
                } else {
                    n + 1
                }
            })
            .collect();
        let pad = 4.0 * self.h;
        let mut out = Vec::new();
        let total: usize = counts.iter().product();
        for mut flat in 0..total {
            let mut x = vec![0.0; self.dim()];
            for a in 0..self.dim() {
                x[a] = self.lo[a] + (flat % counts[a]) as f64 * self.h;
                flat /= counts[a];
            }
            let padded = self.exclusions.iter().any(|(c, r)| {
                let g = ChartGrid { exclusions: vec![(c.clone(), r + pad)], ..self.clone() };
                g.excluded(&x)
            });
            if !padded {
                out.push(x);
            }
        }
        out
    }

    // Stencil along axis a at x: returns (offsets, weights/h).
    fn stencil(&self, x: &[f64], a: usize) -> Result<[(f64, f64); 3]> {
        let h = self.h;
        let inside = |t: f64| self.periodic[a] || (t >= self.lo[a] - 1e-12 && t <= self.hi[a] + 1e-12);
        let st = if inside(x[a] - h) && inside(x[a] + h) {
            [(-h, -0.5), (0.0, 0.0), (h, 0.5)]
        } else if inside(x[a] + 2.0 * h) {
            [(0.0, -1.5), (h, 2.0), (2.0 * h, -0.5)]
        } else {
            [(0.0, 1.5), (-h, -2.0), (-2.0 * h, 0.5)]
        };
        for (o, _) in st {
            let mut y = x.to_vec();
            y[a] += o;
            if self.excluded(&y) {
                return Err(GeomError::StencilOverrun);
            }
        }
        Ok(st)
    }

    /// ∂_a of a vector-valued field at x.
    pub fn partial<F>(&self, f: &F, x: &[f64], a: usize) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let st = self.stencil(x, a)?;
        let mut acc: Option<Vec<f64>> = None;
        for (o, w) in st {
            if w == 0.0 {
                continue;
            }
            let mut y = x.to_vec();
            y[a] += o;
            let v = f(&y);
            let acc = acc.get_or_insert_with(|| vec![0.0; v.len()]);
            for (s, vi) in acc.iter_mut().zip(v) {
                *s += w * vi / self.h;
            }
        }
        Ok(acc.unwrap())
    }
}

/// Exterior derivative of a k-form field at x.
pub fn fd_d<F>(field: F, grid: &ChartGrid, x: &[f64]) -> Result<Form>
where
    F: Fn(&[f64]) -> Form,
{
    let f0 = field(x);
    let n = f0.n;
    let comps = |y: &[f64]| field(y).comps;
    let derivs: Vec<Vec<f64>> = (0..n).map(|a| grid.partial(&comps, x, a)).collect::<Result<_>>()?;
    let src = subsets(n, f0.deg);
    let mut out = Form::zero(n, f0.deg + 1);
    for (p, set) in subsets(n, f0.deg + 1).iter().enumerate() {
        let mut v = 0.0;
        for (m, &i) in set.iter().enumerate() {
            let rest: Vec<usize> = set.iter().copied().filter(|&j| j != i).collect();
            let q = src.iter().position(|s| *s == rest).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            v += sign * derivs[i][q];
        }
        out.comps[p] = v;
    }
    Ok(out)
}

/// d*η = −(1/√g) ∂_i(√g g^{ij} η_j) for a 1-form field.
pub fn fd_codifferential_1form<F, G>(eta: F, metric: G, grid: &ChartGrid, x: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    let flux = |y: &[f64]| {
        let g = metric(y);
        let vol = g.determinant().sqrt();
        let gi = g.try_inverse().unwrap();
        let e = eta(y);
        (0..n).map(|i| vol * (0..n).map(|j| gi[(i, j)] * e[j]).sum::<f64>()).collect::<Vec<f64>>()
    };
    let mut div = 0.0;
    for i in 0..n {
        div += grid.partial(&flux, x, i)?[i];
    }
    Ok(-div / metric(x).determinant().sqrt())
}

/// Scalar Laplacian (1/√g)∂_i(√g g^{ij}∂_j f) by nested central differences.
pub fn fd_laplacian<F, G>(f: F, metric: G, grid: &ChartGrid, x: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    let grad = |y: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|a| grid.partial(&|z: &[f64]| vec![f(z)], y, a).map(|v| v[0]).unwrap_or(f64::NAN))
            .collect()
    };
    fd_codifferential_1form(grad, metric, grid, x).map(|v| -v)
}

/// Flat Laplacian with the compact (2n+1)-point stencil.
pub fn fd_laplacian_flat<F>(f: F, x: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = f(x);
    let mut s = 0.0;
    for a in 0..x.len() {
        let mut y = x.to_vec();
        y[a] += h;
        s += f(&y);
        y[a] -= 2.0 * h;
        s += f(&y);
        s -= 2.0 * f0;
    }
    s / (h * h)
}

/// Real Hessian of a scalar at x by central differences.
pub fn fd_hessian<F>(f: &F, x: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let at = |da: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(a, o) in da {
            y[a] += o;
        }
        f(&y)
    };
    let f0 = f(x);
    let mut hm = DMatrix::zeros(n, n);
    for a in 0..n {
        hm[(a, a)] = (at(&[(a, h)]) - 2.0 * f0 + at(&[(a, -h)])) / (h * h);
        for b in a + 1..n {
            let v = (at(&[(a, h), (b, h)]) - at(&[(a, h), (b, -h)]) - at(&[(a, -h), (b, h)])
                + at(&[(a, -h), (b, -h)]))
                / (4.0 * h * h);
            hm[(a, b)] = v;
            hm[(b, a)] = v;
        }
    }
    hm
}

/// Complex Hessian ∂_a∂̄_b from a real Hessian in coordinates (x₁, y₁, x₂, y₂).
pub fn complex_hessian(hr: &DMatrix<f64>) -> Matrix2<Complex64> {
    let mut m = Matrix2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            m[(a, b)] = Complex64::new(
                0.25 * (hr[(xa, xb)] + hr[(ya, yb)]),
                0.25 * (hr[(xa, yb)] - hr[(ya, xb)]),
            );
        }
    }
    m
}

/// log det of the Kähler metric h_{ab̄} = ∂_a∂̄_b K computed by finite differences.
pub fn fd_log_det_kahler<F>(potential: &F, x: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let m = complex_hessian(&fd_hessian(potential, x, h));
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.ln()
}

/// sup over sample points of |∂∂̄ log det ∂∂̄K|, all derivatives by finite differences with step h.
pub fn kahler_ricci_residual<F>(potential: F, points: &[Vec<f64>], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    use rayon::prelude::*;
    if points.is_empty() {
        return Err(GeomError::EmptyRegion);
    }
    let vals: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let ld = |y: &[f64]| fd_log_det_kahler(&potential, y, h);
            complex_hessian(&fd_hessian(&ld, p, h)).norm()
        })
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::StencilOverrun);
    }
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Norm |Rm|_g of the Riemann tensor of a metric field, by nested central differences.
pub fn fd_riemann_norm<G>(metric: G, x: &[f64], h: f64) -> f64
where
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    // Γ^a_{bc} at y
    let christoffel = |y: &[f64]| -> Vec<f64> {
        let g = metric(y);
        let gi = g.clone().try_inverse().unwrap();
        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|c| {
                let mut yp = y.to_vec();
                let mut ym = y.to_vec();
                yp[c] += h;
                ym[c] -= h;
                (metric(&yp) - metric(&ym)) / (2.0 * h)
            })
            .collect();
        let mut gam = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += gi[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                    }
                    gam[(a * n + b) * n + c] = 0.5 * s;
                }
            }
        }
        gam
    };
    let g0 = christoffel(x);
    let dgam: Vec<Vec<f64>> = (0..n)
        .map(|d| {
            let mut yp = x.to_vec();
            let mut ym = x.to_vec();
            yp[d] += h;
            ym[d] -= h;
            christoffel(&yp).iter().zip(christoffel(&ym)).map(|(p, m)| (p - m) / (2.0 * h)).collect()
        })
        .collect();
    let gm = |a: usize, b: usize, c: usize| g0[(a * n + b) * n + c];
    // R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}
    let mut r = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgam[c][(a * n + d) * n + b] - dgam[d][(a * n + c) * n + b];
                    for e in 0..n {
                        v += gm(a, c, e) * gm(e, d, b) - gm(a, d, e) * gm(e, c, b);
                    }
                    r[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    let g = metric(x);
    let gi = g.clone().try_inverse().unwrap();
    // |Rm|² = R^a_{bcd} R^{b'}_{a'c'd'} g_{a a'}... contract via lowered first index
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let mut low = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    low[idx(a, b, c, d)] = (0..n).map(|e| g[(a, e)] * r[idx(e, b, c, d)]).sum();
                }
            }
        }
    }
    // raise b, c, d of the lowered tensor with g⁻¹ and contract with R^a_{bcd}
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut up = 0.0;
                    for b2 in 0..n {
                        for c2 in 0..n {
                            for d2 in 0..n {
                                up += gi[(b, b2)] * gi[(c, c2)] * gi[(d, d2)] * low[idx(a, b2, c2, d2)];
                            }
                        }
                    }
                    s += r[idx(a, b, c, d)] * up;
                }
            }
        }
    }
    s.max(0.0).sqrt()
}

/// Ratio e(h)/e(h/2); ≈ 4 for a second-order method.
pub fn convergence_ratio(err_h: f64, err_h2: f64) -> f64 {
    err_h / err_h2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn d_of_linear_form_exact() {
        let g = ChartGrid::new(vec![-1.0; 4], vec![1.0; 4], 0.1).unwrap();
        let f = |x: &[f64]| Form::one_form(&[0.0, x[0], 0.0, 0.0]);
        let d = fd_d(f, &g, &[0.2, 0.3, 0.1, 0.0]).unwrap();
        assert!((d.get(&[0, 1]) - 1.0).abs() < 1e-14);
        assert!(d.comps.iter().enumerate().all(|(i, v)| i == 0 || v.abs() < 1e-14));
    }

    #[test]
    fn hodge_involution() {
        let g = DMatrix::from_row_slice(4, 4, &[
            2.0, 0.3, 0.0, 0.1, 0.3, 1.5, 0.2, 0.0, 0.0, 0.2, 1.0, 0.0, 0.1, 0.0, 0.0, 3.0,
        ]);
        for k in 0..=4 {
            let f = Form { n: 4, deg: k, comps: (0..subsets(4, k).len()).map(|i| 0.3 + i as f64).collect() };
            let ss = hodge_star(&hodge_star(&f, &g), &g);
            let sign = if (k * (4 - k)) % 2 == 0 { 1.0 } else { -1.0 };
            assert!(ss.sub(&f.scale(sign)).max_abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn sphere_curvature() {
        // unit sphere in (θ, φ): |Rm|² = 4K² = 4
        let metric = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)]);
        let r = fd_riemann_norm(metric, &[1.0, 0.3], 1e-3);
        assert!((r - 2.0).abs() < 1e-5, "{r}");
    }

    #[test]
    fn euclidean_potential_residual_zero() {
        let k = |x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        let r = kahler_ricci_residual(k, &[vec![0.3, 0.1, -0.2, 0.5]], 0.05).unwrap();
        assert!(r < 1e-9);
    }
}
