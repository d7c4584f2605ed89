//! Period data, semi-flat forms, the McLean metric and the local formulas for
//! d⁺ and d* of a 1-form with base-only coefficients.
//!
//! Chart coordinates are (y₁, y₂, x₁, x₂) with y = y₁ + iy₂ the base coordinate
//! and (x₁, x₂) ∈ (ℝ/ℤ)² the fiber coordinates.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffgeo::{hodge_star, Form};
use crate::error::{GeomError, Result};
use crate::k3_config::{FiberType, TauKind};
use crate::lattice_greens::HolomorphicPoly;

/// Holomorphic periods (τ₁, τ₂) on a slit chart of the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodModel {
    /// τ₁ = 1, τ₂ = (ν/2πi) log y + h(y); the log branch has arg ∈ (cut − 2π, cut].
    Inu { nu: u32, h: HolomorphicPoly, cut: f64 },
    /// τ₁ = 1/√Im τ, τ₂ = (τ + c u^λ)/√Im τ with λ the tabulated distortion order.
    Table { fiber: FiberType, tau: (f64, f64), c: (f64, f64), cut: f64 },
    /// Normal form of type IV with k ≡ 1: τ₁ = 1 − u^{h/2}, τ₂ = ϖ − ϖ̄ u^{h/2}, ϖ = e^{2πi/3}.
    KodairaIv { hexp: u32, cut: f64 },
    /// Constant periods.
    Constant { tau1: (f64, f64), tau2: (f64, f64) },
}

fn c(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

/// log and powers on the branch arg ∈ (cut − 2π, cut].
fn branch_arg(y: Complex64, cut: f64) -> f64 {
    let a = y.arg();
    let mut t = a;
    while t > cut {
        t -= TAU;
    }
    while t <= cut - TAU {
        t += TAU;
    }
    t
}

fn branch_pow(y: Complex64, p: f64, cut: f64) -> Complex64 {
    Complex64::from_polar(y.norm().powf(p), p * branch_arg(y, cut))
}

impl PeriodModel {
    pub fn inu(nu: u32) -> Self {
        PeriodModel::Inu { nu, h: HolomorphicPoly::zero(), cut: PI }
    }

    /// Table model with c = i, so that Im(τ̄₁τ₂) − 1 = |u|^λ cos(λ arg u).
    pub fn table(fiber: FiberType, free_tau: Complex64) -> Result<Self> {
        let tau = match fiber.tau_kind().ok_or(GeomError::InvalidPair)? {
            TauKind::Free => free_tau,
            TauKind::Hexagonal => Complex64::from_polar(1.0, TAU / 3.0),
            TauKind::Square => Complex64::i(),
        };
        Ok(PeriodModel::Table { fiber, tau: (tau.re, tau.im), c: (0.0, 1.0), cut: PI })
    }

    pub fn fiber_type(&self) -> Option<FiberType> {
        match self {
            PeriodModel::Inu { nu, .. } => Some(FiberType::I(*nu)),
            PeriodModel::Table { fiber, .. } => Some(*fiber),
            PeriodModel::KodairaIv { .. } => Some(FiberType::IV),
            PeriodModel::Constant { .. } => None,
        }
    }

    /// (τ₁, τ₂) at y.
    pub fn tau(&self, y: Complex64) -> Result<(Complex64, Complex64)> {
        Ok(self.tau_and_derivative(y)?.0)
    }

    /// ((τ₁, τ₂), (τ₁', τ₂')).
    #[allow(clippy::type_complexity)]
    pub fn tau_and_derivative(&self, y: Complex64) -> Result<((Complex64, Complex64), (Complex64, Complex64))> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        if !matches!(self, PeriodModel::Constant { .. }) && y.norm() < 1e-300 {
            return Err(GeomError::SingularFiberHit);
        }
        Ok(match self {
            PeriodModel::Inu { nu, h, cut } => {
                let log = Complex64::new(y.norm().ln(), branch_arg(y, *cut));
                let k = *nu as f64 / (TAU * Complex64::i());
                ((one, k * log + h.eval(y)), (zero, k / y + h.derivative(y)))
            }
            PeriodModel::Table { fiber, tau, c: cc, cut } => {
                let lam = fiber.distortion_order().ok_or(GeomError::InvalidPair)?;
                let lam = *lam.numer() as f64 / *lam.denom() as f64;
                let s = 1.0 / tau.1.sqrt();
                let up = branch_pow(y, lam, *cut);
                let upm = branch_pow(y, lam - 1.0, *cut);
                ((one * s, (c(*tau) + c(*cc) * up) * s), (zero, c(*cc) * upm * lam * s))
            }
            PeriodModel::KodairaIv { hexp, cut } => {
                let p = *hexp as f64 / 2.0;
                let w = Complex64::from_polar(1.0, TAU / 3.0);
                let up = branch_pow(y, p, *cut);
                let upm = branch_pow(y, p - 1.0, *cut) * p;
                ((one - up, w - w.conj() * up), (-upm, -w.conj() * upm))
            }
            PeriodModel::Constant { tau1, tau2 } => ((c(*tau1), c(*tau2)), (zero, zero)),
        })
    }

    /// (τ₁ − τ₁⁰, τ₂ − τ₂⁰) relative to the central fiber, without cancellation.
    pub fn tau_offset(&self, y: Complex64) -> Result<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            PeriodModel::Table { fiber, tau, c: cc, cut } => {
                let lam = fiber.distortion_order().ok_or(GeomError::InvalidPair)?;
                let lam = *lam.numer() as f64 / *lam.denom() as f64;
                Ok((zero, c(*cc) * branch_pow(y, lam, *cut) / tau.1.sqrt()))
            }
            PeriodModel::KodairaIv { hexp, cut } => {
                let up = branch_pow(y, *hexp as f64 / 2.0, *cut);
                let w = Complex64::from_polar(1.0, TAU / 3.0);
                Ok((-up, -w.conj() * up))
            }
            PeriodModel::Constant { .. } => Ok((zero, zero)),
            PeriodModel::Inu { .. } => Err(GeomError::InvalidParameter("I_ν periods have no central value".into())),
        }
    }

    /// W = Im(τ̄₁τ₂).
    pub fn w(&self, y: Complex64) -> Result<f64> {
        let (t1, t2) = self.tau(y)?;
        let w = (t1.conj() * t2).im;
        if !(w > 0.0) {
            return Err(GeomError::DomainViolation(format!("Im(conj(tau1) tau2) = {w} is not positive")));
        }
        Ok(w)
    }

    /// W normalized by its value on the central fiber model (Im τ for finite types).
    pub fn w_normalized(&self, y: Complex64) -> Result<f64> {
        let w = self.w(y)?;
        Ok(match self {
            PeriodModel::KodairaIv { .. } => w / (TAU / 3.0).sin(),
            _ => w,
        })
    }

    /// ∂_y W.
    pub fn dw(&self, y: Complex64) -> Result<Complex64> {
        let ((t1, t2), (d1, d2)) = self.tau_and_derivative(y)?;
        Ok((t1.conj() * d2 - d1 * t2.conj()) / (2.0 * Complex64::i()))
    }

    /// Basis change (γ₁, γ₂) ↦ (γ₂, −γ₁) applied to periods at y.
    pub fn swapped_tau(&self, y: Complex64) -> Result<(Complex64, Complex64)> {
        let (t1, t2) = self.tau(y)?;
        Ok((t2, -t1))
    }
}

/// McLean metric W·(dy₁² + dy₂²).
pub fn mclean_metric(periods: &PeriodModel, y: Complex64) -> Result<nalgebra::Matrix2<f64>> {
    Ok(nalgebra::Matrix2::identity() * periods.w(y)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiFlatChart {
    pub periods: PeriodModel,
    pub delta: f64,
}

impl SemiFlatChart {
    pub fn new(periods: PeriodModel, delta: f64) -> Self {
        Self { periods, delta }
    }

    /// Coframe (e¹, e², e³, e⁴) as rows of covectors in (y₁, y₂, x₁, x₂).
    pub fn coframe(&self, y: Complex64) -> Result<[[f64; 4]; 4]> {
        let w = self.periods.w(y)?;
        let (t1, t2) = self.periods.tau(y)?;
        let sw = w.sqrt();
        let a1 = t1 * self.delta / sw;
        let a2 = t2 * self.delta / sw;
        Ok([[sw, 0.0, 0.0, 0.0], [0.0, sw, 0.0, 0.0], [0.0, 0.0, a1.re, a2.re], [0.0, 0.0, a1.im, a2.im]])
    }

    /// Semi-flat metric W|dy|² + δ²|τ₁dx₁ + τ₂dx₂|²/W.
    pub fn metric(&self, y: Complex64) -> Result<DMatrix<f64>> {
        let e = self.coframe(y)?;
        Ok(DMatrix::from_fn(4, 4, |i, j| (0..4).map(|a| e[a][i] * e[a][j]).sum()))
    }
}

/// (ω^SF, Re Ω, Im Ω) with ω^SF = δ²dx₁∧dx₂ + W dy₁∧dy₂ and Ω = −δ(τ₁dx₁ + τ₂dx₂)∧dy.
pub fn semiflat_forms(chart: &SemiFlatChart, y: Complex64) -> Result<[Form; 3]> {
    let w = chart.periods.w(y)?;
    let (t1, t2) = chart.periods.tau(y)?;
    let d = chart.delta;
    let omega = Form::from_entries(4, 2, &[(&[2, 3], d * d), (&[0, 1], w)]);
    // −δ(τ₁dx₁ + τ₂dx₂)∧(dy₁ + i dy₂)
    let mut re = Form::zero(4, 2);
    let mut im = Form::zero(4, 2);
    for (xi, t) in [(2usize, t1), (3, t2)] {
        for (yi, f) in [(0usize, Complex64::new(1.0, 0.0)), (1, Complex64::i())] {
            let v = -d * t * f;
            let e = Form::from_entries(4, 2, &[(&[xi, yi], 1.0)]);
            re = re.add(&e.scale(v.re));
            im = im.add(&e.scale(v.im));
        }
    }
    Ok([omega, re, im])
}

/// Base coefficient with its Wirtinger derivatives: y ↦ (f, ∂_y f, ∂_ȳ f).
pub type WirtingerFn = Arc<dyn Fn(Complex64) -> (Complex64, Complex64, Complex64) + Send + Sync>;

/// η = f dy + f̄ dȳ + Re(F e^{(x)}) with e^{(x)} = e³ + ie⁴, coefficients depending on y only.
#[derive(Clone)]
pub struct BaseOneForm {
    pub f: WirtingerFn,
    pub big_f: WirtingerFn,
}

impl BaseOneForm {
    /// Covector of η in (y₁, y₂, x₁, x₂).
    pub fn covector(&self, chart: &SemiFlatChart, y: Complex64) -> Result<[f64; 4]> {
        let (f, _, _) = (self.f)(y);
        let (bf, _, _) = (self.big_f)(y);
        let w = chart.periods.w(y)?;
        let (t1, t2) = chart.periods.tau(y)?;
        let k = bf * chart.delta / w.sqrt();
        Ok([2.0 * f.re, -2.0 * f.im, (k * t1).re, (k * t2).re])
    }
}

/// Closed-form d⁺η (as a 2-form in (y₁, y₂, x₁, x₂)) and d*η.
pub fn dplus_dstar_semiflat(chart: &SemiFlatChart, eta: &BaseOneForm, y: Complex64) -> Result<(Form, f64)> {
    let w = chart.periods.w(y)?;
    let dw = chart.periods.dw(y)?;
    let (t1, t2) = chart.periods.tau(y)?;
    let (_, _, fyb) = (eta.f)(y);
    let (bf, bfy, _) = (eta.big_f)(y);
    let g = chart.metric(y)?;
    // f^(ȳ) = conj f, so ∂_y f^(ȳ) = conj(∂_ȳ f)
    let a = fyb.conj() - fyb;
    // dy∧dȳ = −2i dy₁∧dy₂
    let dydyb = Form::from_entries(4, 2, &[(&[0, 1], 1.0)]);
    let sd = |f: &Form| f.add(&hodge_star(f, &g)).scale(0.5);
    let first = sd(&dydyb).scale((a * Complex64::new(0.0, -2.0)).re);
    // ∂_y(√W F)/√W = F ∂_yW/(2W) + ∂_y F
    let coef = bf * dw / (2.0 * w) + bfy;
    // dy∧e^{(x)} with e^{(x)} = δ(τ₁dx₁ + τ₂dx₂)/√W
    let mut second = Form::zero(4, 2);
    for (xi, t) in [(2usize, t1), (3, t2)] {
        for (yi, f) in [(0usize, Complex64::new(1.0, 0.0)), (1, Complex64::i())] {
            let v = coef * f * t * chart.delta / w.sqrt();
            second = second.add(&Form::from_entries(4, 2, &[(&[yi, xi], v.re)]));
        }
    }
    let dstar = -(2.0 / w) * (fyb + fyb.conj()).re;
    Ok((first.add(&second), dstar))
}
