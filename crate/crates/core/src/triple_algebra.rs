//! Algebra of definite triples of 2-forms in four dimensions.
//!
//! A 2-form at a point is a 4×4 antisymmetric matrix W with ω(X,Y) = XᵀWY.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};

pub type TwoForm = Matrix4<f64>;

/// Σ c·dx^a∧dx^b from (a, b, c) entries.
pub fn two_form(entries: &[(usize, usize, f64)]) -> TwoForm {
    let mut w = TwoForm::zeros();
    for &(a, b, c) in entries {
        w[(a, b)] += c;
        w[(b, a)] -= c;
    }
    w
}

/// α∧β as a multiple of dx⁰∧dx¹∧dx²∧dx³.
pub fn wedge(a: &TwoForm, b: &TwoForm) -> f64 {
    a[(0, 1)] * b[(2, 3)] - a[(0, 2)] * b[(1, 3)] + a[(0, 3)] * b[(1, 2)] + a[(1, 2)] * b[(0, 3)]
        - a[(1, 3)] * b[(0, 2)]
        + a[(2, 3)] * b[(0, 1)]
}

/// 1-form wedge 1-form.
pub fn wedge11(a: &[f64; 4], b: &[f64; 4]) -> TwoForm {
    let mut w = TwoForm::zeros();
    for i in 0..4 {
        for j in 0..4 {
            w[(i, j)] = a[i] * b[j] - a[j] * b[i];
        }
    }
    w
}

/// Hodge star of a 2-form for metric g and orientation dx⁰¹²³.
pub fn hodge_star(g: &Matrix4<f64>, w: &TwoForm) -> TwoForm {
    let gi = g.try_inverse().expect("metric must be invertible");
    let up = gi * w * gi;
    let vol = g.determinant().abs().sqrt();
    // (*ω)_{kl} = vol · Σ_{i<j} ω^{ij} ε_{ijkl}
    let pairs = [(0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2), (2, 3, 0, 1), (3, 1, 0, 2), (1, 2, 0, 3)];
    let mut out = TwoForm::zeros();
    for (i, j, k, l) in pairs {
        out[(k, l)] = vol * up[(i, j)];
        out[(l, k)] = -vol * up[(i, j)];
    }
    out
}

/// Three 2-forms at a point together with the reference volume dvol₀ = scale·dx⁰¹²³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefiniteTriple {
    pub forms: [TwoForm; 3],
    pub dvol0: f64,
}

impl DefiniteTriple {
    pub fn new(forms: [TwoForm; 3]) -> Self {
        Self { forms, dvol0: 1.0 }
    }

    pub fn with_dvol0(mut self, s: f64) -> Self {
        self.dvol0 = s;
        self
    }

    /// Standard flat hyperkähler triple on ℝ⁴ with g = Id.
    pub fn flat() -> Self {
        Self::new([
            two_form(&[(0, 1, 1.0), (2, 3, 1.0)]),
            two_form(&[(0, 2, 1.0), (3, 1, 1.0)]),
            two_form(&[(0, 3, 1.0), (1, 2, 1.0)]),
        ])
    }

    pub fn scaled(&self, c: [f64; 3]) -> Self {
        Self { forms: [self.forms[0] * c[0], self.forms[1] * c[1], self.forms[2] * c[2]], dvol0: self.dvol0 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QData {
    pub q: Matrix3<f64>,
    /// Coefficient of dvol_ω = det(Q)^{1/3} dvol₀ against dx⁰¹²³.
    pub dvol_omega: f64,
    pub q_omega: Matrix3<f64>,
}

/// Q from ½ωᵢ∧ωⱼ = Q_ij dvol₀ and its normalization Q_ω = det(Q)^{-1/3} Q.
pub fn q_matrix(t: &DefiniteTriple) -> Result<QData> {
    let mut q = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            q[(i, j)] = 0.5 * wedge(&t.forms[i], &t.forms[j]) / t.dvol0;
        }
    }
    let eig = SymmetricEigen::new(q);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(GeomError::DefiniteViolation);
    }
    let det: f64 = eig.eigenvalues.iter().product();
    let c = det.cbrt();
    Ok(QData { q, dvol_omega: c * t.dvol0, q_omega: q / c })
}

/// ‖Q_ω − Id‖ in the Frobenius norm.
pub fn q_defect(t: &DefiniteTriple) -> Result<f64> {
    Ok((q_matrix(t)?.q_omega - Matrix3::identity()).norm())
}

fn inv_sqrt(q: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let eig = SymmetricEigen::new(*q);
    let floor = 1e-14 * q.trace();
    let (lmin, lmax) = eig.eigenvalues.iter().fold((f64::MAX, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
    if lmin <= 0.0 {
        return Err(GeomError::DefiniteViolation);
    }
    if lmax / lmin > 1e12 {
        return Err(GeomError::NearDegenerate(lmax / lmin));
    }
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.max(floor).sqrt()));
    Ok(eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Riemannian metric whose self-dual forms are spanned by the triple, normalized
/// so that its volume form is dvol_ω.
pub fn metric_from_triple(t: &DefiniteTriple) -> Result<Matrix4<f64>> {
    let qd = q_matrix(t)?;
    let p = inv_sqrt(&qd.q)?;
    let w: Vec<TwoForm> = (0..3)
        .map(|i| (0..3).fold(TwoForm::zeros(), |acc, j| acc + t.forms[j] * p[(i, j)]))
        .collect();
    let w1_inv = w[0].try_inverse().ok_or(GeomError::DefiniteViolation)?;
    let j = w1_inv * w[2];
    let jj = j * j + Matrix4::identity();
    if jj.norm() > 1e-8 * (1.0 + j.norm() * j.norm()) {
        return Err(GeomError::NearDegenerate(jj.norm()));
    }
    let mut g = -(j.transpose() * w[1]);
    g = 0.5 * (g + g.transpose());
    if g[(0, 0)] < 0.0 {
        g = -g;
    }
    if SymmetricEigen::new(g).eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(GeomError::DefiniteViolation);
    }
    let vol = g.determinant().sqrt();
    Ok(g * (qd.dvol_omega / vol).sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HkErrorReport {
    pub sup: f64,
    pub weighted_sup: f64,
    pub holder_lower_bound: f64,
    pub pair_count: usize,
    pub samples: usize,
}

/// Sup, weighted sup 𝔰^{μ+1}‖Q_ω−Id‖ and a pair-sampled C^{0,α} seminorm lower bound.
///
/// `distance` approximates the geodesic distance between two sample points.
pub fn hk_error<P, F, W, D>(
    points: &[P],
    triple: F,
    weight: W,
    distance: D,
    mu: f64,
    alpha: f64,
    max_pairs: usize,
) -> Result<HkErrorReport>
where
    P: Sync,
    F: Fn(&P) -> Result<DefiniteTriple> + Sync,
    W: Fn(&P) -> f64 + Sync,
    D: Fn(&P, &P) -> f64 + Sync,
{
    if points.is_empty() {
        return Err(GeomError::EmptyRegion);
    }
    let defects: Vec<(Matrix3<f64>, f64)> = points
        .par_iter()
        .map(|p| {
            let e = q_matrix(&triple(p)?)?.q_omega - Matrix3::identity();
            Ok((e, weight(p)))
        })
        .collect::<Result<_>>()?;
    let sup = defects.iter().map(|(e, _)| e.norm()).fold(0.0, f64::max);
    let weighted_sup = defects.iter().map(|(e, s)| s.powf(mu + 1.0) * e.norm()).fold(0.0, f64::max);
    let n = points.len();
    let total = n * (n - 1) / 2;
    let stride = (total / max_pairs.max(1)).max(1);
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).step_by(stride).collect();
    let holder = pairs
        .par_iter()
        .map(|&(i, j)| {
            let d = distance(&points[i], &points[j]);
            if d > 0.0 {
                (defects[i].0 - defects[j].0).norm() / d.powf(alpha)
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(HkErrorReport { sup, weighted_sup, holder_lower_bound: holder, pair_count: pairs.len(), samples: n })
}
