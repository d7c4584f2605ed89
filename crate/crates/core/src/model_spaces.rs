//! Closed-form model geometries: Eguchi–Hanson, flat ALG models and flat orbifolds.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::k3_config::{FiberType, TauKind};
use crate::lattice_greens::{ModeSum, MonopoleSet};
use crate::triple_algebra::{two_form, DefiniteTriple, TwoForm};

/// Declared asymptotic error of a patch against its model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorModel {
    Exact,
    /// O(r^{-order}) as r → ∞.
    PowerDecay { order: f64 },
    /// O(e^{-rate·r}).
    ExponentialDecay { rate: f64 },
}

type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
type DistFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A coordinate chart with callable metric, distance to the singular locus, and error model.
#[derive(Clone)]
pub struct MetricPatch {
    pub name: String,
    pub dim: usize,
    pub metric: MetricFn,
    pub singular_distance: DistFn,
    pub error_model: ErrorModel,
}

impl std::fmt::Debug for MetricPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricPatch").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

// ---------------------------------------------------------------- Eguchi–Hanson

/// φ_EH as a function of t = r² = |z|², in a cancellation-free form.
pub fn eh_potential_t(t: f64) -> f64 {
    let s = (1.0 + t * t).sqrt();
    0.5 * (t + 1.0 / (s + t) - (1.0 / t).asinh())
}

/// φ_EH(r) = ½(√(1+r⁴) + 2 log r − log(1+√(1+r⁴))).
pub fn eh_potential(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::NonPositiveRadius);
    }
    Ok(eh_potential_t(r * r))
}

/// E(t) = φ_EH − t/2 and its first two t-derivatives.
pub fn eh_correction(t: f64) -> (f64, f64, f64) {
    let s = (1.0 + t * t).sqrt();
    let e = 0.5 * (1.0 / (s + t) - (1.0 / t).asinh());
    let e1 = 0.5 / (t * (s + t));
    let e2 = -0.5 / (s * t * t);
    (e, e1, e2)
}

/// Hermitian Hessian ∂_i∂̄_j F of a radial function F(|ξ|²) from (F', F'').
pub fn radial_complex_hessian(xi: [Complex64; 2], f1: f64, f2: f64) -> Matrix2<Complex64> {
    let mut m = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = xi[i].conj() * xi[j] * f2 + if i == j { Complex64::new(f1, 0.0) } else { 0.0.into() };
        }
    }
    m
}

/// Real 2-form i∂∂̄ψ in coordinates (x₁, y₁, x₂, y₂) from the Hermitian matrix h_{ij̄} = ∂_i∂̄_jψ.
pub fn kahler_form(h: &Matrix2<Complex64>) -> TwoForm {
    // i h_{ij̄} dz_i∧dz̄_j expanded with dz = dx + i dy
    let mut w = TwoForm::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let c = Complex64::i() * h[(i, j)];
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            // dz_i∧dz̄_j = dx_i∧dx_j − i dx_i∧dy_j + i dy_i∧dx_j + dy_i∧dy_j
            let parts = [
                (xi, xj, Complex64::new(1.0, 0.0)),
                (xi, yj, Complex64::new(0.0, -1.0)),
                (yi, xj, Complex64::new(0.0, 1.0)),
                (yi, yj, Complex64::new(1.0, 0.0)),
            ];
            for (a, b, k) in parts {
                let v = (c * k).re;
                w[(a, b)] += v;
                w[(b, a)] -= v;
            }
        }
    }
    w
}

/// Triple (i∂∂̄ψ, Re dz₁∧dz₂, Im dz₁∧dz₂) for a Kähler form with Hessian h.
pub fn kahler_triple(h: &Matrix2<Complex64>) -> DefiniteTriple {
    let re = two_form(&[(0, 2, 1.0), (1, 3, -1.0)]);
    let im = two_form(&[(0, 3, 1.0), (1, 2, 1.0)]);
    DefiniteTriple::new([kahler_form(h), re, im])
}

/// Eguchi–Hanson Hessian at ξ for the potential a²·φ_EH(|ξ|²/a²).
pub fn eh_hessian(xi: [Complex64; 2], a: f64) -> Matrix2<Complex64> {
    let t = (xi[0].norm_sqr() + xi[1].norm_sqr()) / (a * a);
    let (_, e1, e2) = eh_correction(t);
    radial_complex_hessian(xi, 0.5 + e1, e2 / (a * a))
}

// ---------------------------------------------------------------- ALG models

/// Flat model 𝒞_{β,τ}: (𝒰, 𝒱) ∈ ℂ×ℂ with 𝒱 modulo (ℤ+τℤ)/√Im τ and
/// (𝒰, 𝒱) ~ (e^{2πiβ}𝒰, e^{−2πiβ}𝒱).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgModel {
    pub fiber: FiberType,
    pub beta: f64,
    pub tau: (f64, f64),
}

impl AlgModel {
    /// Table model for a finite-monodromy type; `free_tau` is used for I₀*.
    pub fn for_fiber(fiber: FiberType, free_tau: Complex64) -> Result<Self> {
        let beta = fiber.beta().ok_or(GeomError::InvalidPair)?;
        let tau = match fiber.tau_kind().unwrap() {
            TauKind::Free => free_tau,
            TauKind::Hexagonal => Complex64::from_polar(1.0, TAU / 3.0),
            TauKind::Square => Complex64::i(),
        };
        Self::new(fiber, *beta.numer() as f64 / *beta.denom() as f64, tau)
    }

    pub fn new(fiber: FiberType, beta: f64, tau: Complex64) -> Result<Self> {
        let b = fiber.beta().ok_or(GeomError::InvalidPair)?;
        let ok_beta = (beta - *b.numer() as f64 / *b.denom() as f64).abs() < 1e-12;
        let ok_tau = match fiber.tau_kind().unwrap() {
            TauKind::Free => tau.im > 0.0,
            TauKind::Hexagonal => (tau - Complex64::from_polar(1.0, TAU / 3.0)).norm() < 1e-12,
            TauKind::Square => (tau - Complex64::i()).norm() < 1e-12,
        };
        if !(ok_beta && ok_tau) {
            return Err(GeomError::InvalidPair);
        }
        Ok(Self { fiber, beta, tau: (tau.re, tau.im) })
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.tau.0, self.tau.1)
    }

    /// Lattice generators of the 𝒱-torus.
    pub fn lattice(&self) -> [Complex64; 2] {
        let s = 1.0 / self.tau.1.sqrt();
        [Complex64::new(s, 0.0), self.tau() * s]
    }

    /// Sector rotation (𝒰, 𝒱) ↦ (e^{2πiβ}𝒰, e^{−2πiβ}𝒱).
    pub fn rotate(&self, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
        let r = Complex64::from_polar(1.0, TAU * self.beta);
        (u * r, v / r)
    }
}

/// (ω^FF, Re Ω^FF, Im Ω^FF) in real coordinates (Re 𝒰, Im 𝒰, Re 𝒱, Im 𝒱) and h^FF.
pub fn alg_model_forms(_model: &AlgModel) -> (DefiniteTriple, DMatrix<f64>) {
    let omega = two_form(&[(0, 1, 1.0), (2, 3, 1.0)]);
    // d𝒰∧d𝒱 = (du₁ + i du₂)∧(dv₁ + i dv₂)
    let re = two_form(&[(0, 2, 1.0), (1, 3, -1.0)]);
    let im = two_form(&[(0, 3, 1.0), (1, 2, 1.0)]);
    (DefiniteTriple::new([omega, re, im]), DMatrix::identity(4, 4))
}

/// Real Jacobian of a complex-linear map (𝒰,𝒱) ↦ (a𝒰, b𝒱).
pub fn complex_diag_jacobian(a: Complex64, b: Complex64) -> nalgebra::Matrix4<f64> {
    let mut j = nalgebra::Matrix4::zeros();
    for (k, c) in [(0usize, a), (2, b)] {
        j[(k, k)] = c.re;
        j[(k, k + 1)] = -c.im;
        j[(k + 1, k)] = c.im;
        j[(k + 1, k + 1)] = c.re;
    }
    j
}

/// Flat model plus the perturbation dη with η = ε Re(|𝒰|^{−ℵ}𝒰 d𝒱).
///
/// η is invariant under the sector rotation and lattice translations; at ℵ = 2
/// dη is anti-self-dual, so the triple stays hyperkähler to first order in ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticAlg {
    pub model: AlgModel,
    pub epsilon: f64,
    pub order: f64,
}

impl SyntheticAlg {
    pub fn new(model: AlgModel, epsilon: f64, order: f64) -> Self {
        Self { model, epsilon, order }
    }

    /// η at (𝒰, 𝒱) as a covector in (u₁, u₂, v₁, v₂).
    pub fn eta(&self, u: Complex64) -> [f64; 4] {
        let f = u * u.norm().powf(-self.order) * self.epsilon;
        // Re(f d𝒱) = Re f dv₁ − Im f dv₂
        [0.0, 0.0, f.re, -f.im]
    }

    /// dη.
    pub fn d_eta(&self, u: Complex64) -> TwoForm {
        let a = self.order;
        let m = u.norm().powf(-a) * self.epsilon;
        let df = Complex64::new((1.0 - 0.5 * a) * m, 0.0);
        let dbf = -0.5 * a * m * u / u.conj();
        // Re(∂f d𝒰∧d𝒱 + ∂̄f d𝒰̄∧d𝒱)
        let duv_re = two_form(&[(0, 2, 1.0), (1, 3, -1.0)]);
        let duv_im = two_form(&[(0, 3, 1.0), (1, 2, 1.0)]);
        let dubv_re = two_form(&[(0, 2, 1.0), (1, 3, 1.0)]);
        let dubv_im = two_form(&[(0, 3, 1.0), (1, 2, -1.0)]);
        duv_re * df.re - duv_im * df.im + dubv_re * dbf.re - dubv_im * dbf.im
    }

    pub fn triple(&self, u: Complex64) -> DefiniteTriple {
        let (mut t, _) = alg_model_forms(&self.model);
        t.forms[0] += self.d_eta(u);
        t
    }
}

// ---------------------------------------------------------------- flat orbifolds

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrbifoldKind {
    R4Z2,
    R3S1Z2,
    R3Z2,
    R2S1Z2,
    R2Z2,
    /// Flat cone of total angle 2πβ.
    Cone { beta: f64 },
}

impl OrbifoldKind {
    pub fn dim(&self) -> usize {
        match self {
            OrbifoldKind::R4Z2 | OrbifoldKind::R3S1Z2 => 4,
            OrbifoldKind::R3Z2 | OrbifoldKind::R2S1Z2 => 3,
            OrbifoldKind::R2Z2 | OrbifoldKind::Cone { .. } => 2,
        }
    }

    /// Whether the last coordinate is a circle of length 1.
    pub fn has_circle(&self) -> bool {
        matches!(self, OrbifoldKind::R3S1Z2 | OrbifoldKind::R2S1Z2)
    }

    /// Fixed points of the ℤ₂ action (or the cone vertex).
    pub fn fixed_points(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let origin = vec![0.0; d];
        if self.has_circle() {
            let mut half = origin.clone();
            half[d - 1] = 0.5;
            vec![origin, half]
        } else {
            vec![origin]
        }
    }

    /// The involution x ↦ −x (circle coordinate included).
    pub fn involution(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| -v).collect()
    }

    /// Flat distance to the singular set.
    pub fn distance_to_singular(&self, x: &[f64]) -> f64 {
        self.fixed_points()
            .iter()
            .map(|p| {
                x.iter()
                    .zip(p)
                    .enumerate()
                    .map(|(a, (xi, pi))| {
                        let mut d = xi - pi;
                        if self.has_circle() && a == self.dim() - 1 {
                            d -= d.round();
                        }
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Half the distance from x to its nearest nontrivial image.
    pub fn injectivity_radius(&self, x: &[f64]) -> f64 {
        match self {
            OrbifoldKind::Cone { beta } => {
                let r = x[0].hypot(x[1]);
                if *beta < 0.5 {
                    r * (PI * beta).sin()
                } else {
                    r
                }
            }
            _ => {
                let y = self.involution(x);
                let mut d2 = 0.0;
                for a in 0..self.dim() {
                    let mut d = x[a] - y[a];
                    if self.has_circle() && a == self.dim() - 1 {
                        d -= d.round();
                    }
                    d2 += d * d;
                }
                let mut r = 0.5 * d2.sqrt();
                if self.has_circle() {
                    r = r.min(0.5);
                }
                r
            }
        }
    }
}

pub fn flat_orbifold(kind: OrbifoldKind) -> MetricPatch {
    let d = kind.dim();
    MetricPatch {
        name: format!("{kind:?}"),
        dim: d,
        metric: Arc::new(move |_| DMatrix::identity(d, d)),
        singular_distance: Arc::new(move |x| kind.distance_to_singular(x)),
        error_model: ErrorModel::Exact,
    }
}

/// Eguchi–Hanson patch on ℂ²∖{0}, potential scale `a` (a = 1 for the unit metric).
pub fn eguchi_hanson_patch(a: f64) -> MetricPatch {
    MetricPatch {
        name: "EguchiHanson".into(),
        dim: 4,
        metric: Arc::new(move |x| {
            let xi = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
            hermitian_to_real(&eh_hessian(xi, a))
        }),
        singular_distance: Arc::new(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        error_model: ErrorModel::PowerDecay { order: 4.0 },
    }
}

/// Real metric g = 2 Re(h_{ij̄} dz_i dz̄_j) in (x₁, y₁, x₂, y₂).
pub fn hermitian_to_real(h: &Matrix2<Complex64>) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let c = h[(i, j)];
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            g[(xi, xj)] += c.re;
            g[(yi, yj)] += c.re;
            g[(xi, yj)] += c.im;
            g[(yi, xj)] -= c.im;
        }
    }
    let gt = g.transpose();
    g + gt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eh_value_at_one() {
        let v = eh_potential(1.0).unwrap();
        assert!((v - 0.5 * (2f64.sqrt() - (1.0 + 2f64.sqrt()).ln())).abs() < 1e-15);
        assert!(eh_potential(0.0).is_err());
    }

    #[test]
    fn eh_monge_ampere() {
        for &(a, b) in &[(0.3, 0.1), (1.0, -0.5), (4.0, 2.0)] {
            let xi = [Complex64::new(a, b), Complex64::new(b, 0.2)];
            let h = eh_hessian(xi, 1.0);
            let det = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
            assert!((det - 0.25).abs() < 1e-13, "{det}");
        }
    }

    #[test]
    fn orbifold_fixed_points() {
        let k = OrbifoldKind::R2S1Z2;
        assert_eq!(k.fixed_points(), vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.5]]);
        assert!((OrbifoldKind::R4Z2.injectivity_radius(&[1.0, 0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_pair_rejected() {
        assert!(AlgModel::new(FiberType::IV, 0.5, Complex64::from_polar(1.0, TAU / 3.0)).is_err());
        assert!(AlgModel::new(FiberType::III, 0.75, Complex64::from_polar(1.0, TAU / 3.0)).is_err());
        assert!(AlgModel::for_fiber(FiberType::I(2), Complex64::i()).is_err());
    }
}

// ---------------------------------------------------------------- Ooguri–Vafa Kähler potential

/// Kähler potential of the multi-OV metric (h ≡ 0) for the complex structure with
/// holomorphic base coordinate w = u₁ + iu₂, obtained by a Legendre transform in u₃.
///
/// Real coordinates are (Re w, Im w, x, u₄) with x = ∂₃G and
/// G = V₀u₃²/2 − P(ρ) − Σ g_k K₀(κρ)/κ², V₀ = T − ν log ρ, ΔP = V₀.
#[derive(Debug, Clone)]
pub struct OvKahlerPotential {
    pub poles: MonopoleSet,
    pub big_t: f64,
}

impl OvKahlerPotential {
    pub fn new(poles: MonopoleSet, big_t: f64) -> Self {
        Self { poles, big_t }
    }

    fn parts(&self, u3: f64, rho: f64) -> (f64, f64, f64) {
        let ms = ModeSum::new(u3, rho, &self.poles, 1e-16).expect("mode sum");
        let v0 = self.big_t - self.poles.nu() as f64 * rho.ln();
        let (mut s_hat, mut s_g, mut s_v) = (0.0, 0.0, 0.0);
        for m in &ms.modes {
            let [kappa, g, gh, k0e, _] = *m;
            let k0 = k0e * (-kappa * rho).exp();
            s_hat += gh * k0;
            s_g += g * k0 / (kappa * kappa);
            s_v += g * k0;
        }
        // (x, ∂x/∂u₃ = V, G + P)
        (v0 * u3 + s_hat, v0 + s_v, v0 * u3 * u3 / 2.0 - s_g)
    }

    /// u₃ solving ∂₃G = x at base radius ρ.
    pub fn u3_of(&self, rho: f64, x: f64) -> f64 {
        let v0 = self.big_t - self.poles.nu() as f64 * rho.ln();
        let mut u3 = x / v0;
        for _ in 0..60 {
            let (xv, v, _) = self.parts(u3, rho);
            let step = (xv - x) / v;
            u3 -= step;
            if step.abs() < 1e-16 * (1.0 + u3.abs()) {
                break;
            }
        }
        u3
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let rho = p[0].hypot(p[1]);
        let nu = self.poles.nu() as f64;
        let big_p = self.big_t * rho * rho / 4.0 - nu / 4.0 * rho * rho * rho.ln() + nu / 4.0 * rho * rho;
        let u3 = self.u3_of(rho, p[2]);
        let (_, _, g_plus_p) = self.parts(u3, rho);
        (p[2] * u3 - (g_plus_p - big_p)) / PI
    }
}
