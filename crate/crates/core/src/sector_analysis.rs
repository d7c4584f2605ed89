//! Fourier and indicial analysis on flat sectors of angle 2πβ with twisted
//! boundary conditions, plus distortion-order fitting for period models.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::fit::fit_power;
use crate::semi_flat::PeriodModel;

fn floor_frac(s: Rational64) -> (Rational64, Rational64) {
    let fl = s.floor();
    (fl, s - fl)
}

/// λ_j = (j − σ)/β.
pub fn lambda(beta: Rational64, sigma: Rational64, j: i64) -> Rational64 {
    (Rational64::from_integer(j) - sigma) / beta
}

/// The indicial ladder for |j| ≤ jmax and the gap ι_{β,σ} = min_j |λ_j| (1/β when σ ∈ ℤ).
pub fn indicial_data(beta: Rational64, sigma: Rational64, jmax: i64) -> Result<(Vec<Rational64>, Rational64)> {
    if beta <= Rational64::zero() || beta > Rational64::from_integer(1) {
        return Err(GeomError::InvalidParameter("beta must lie in (0, 1]".into()));
    }
    let ladder = (-jmax..=jmax).map(|j| lambda(beta, sigma, j)).collect();
    let (_, frac) = floor_frac(sigma);
    let half = Rational64::new(1, 2);
    let iota = if frac.is_zero() {
        beta.recip()
    } else if frac <= half {
        frac / beta
    } else {
        (Rational64::from_integer(1) - frac) / beta
    };
    Ok((ladder, iota))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    Functions,
    OneOneForms,
}

/// Indicial roots of the ALG Laplacian on torus-invariant functions or (1,1)-forms, |j| ≤ jmax, sorted.
pub fn alg_laplacian_indicial_roots(beta: Rational64, class: RootClass, jmax: i64) -> Vec<Rational64> {
    let two = Rational64::from_integer(2);
    let mut out = Vec::new();
    for j in -jmax..=jmax {
        let base = Rational64::from_integer(j) / beta;
        out.push(base);
        if class == RootClass::OneOneForms {
            out.push(base + two);
            out.push(base - two);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Roots strictly inside (lo, hi).
pub fn roots_in_window(beta: Rational64, class: RootClass, lo: Rational64, hi: Rational64) -> Vec<Rational64> {
    let jmax = ((hi.abs().max(lo.abs()) + Rational64::from_integer(2)) * beta).ceil().to_integer() + 1;
    alg_laplacian_indicial_roots(beta, class, jmax).into_iter().filter(|r| *r > lo && *r < hi).collect()
}

/// Largest root strictly below x.
pub fn next_root_below(beta: Rational64, class: RootClass, x: Rational64) -> Rational64 {
    let jmax = ((x.abs() + Rational64::from_integer(3)) * beta).ceil().to_integer() + 2;
    alg_laplacian_indicial_roots(beta, class, jmax).into_iter().filter(|r| *r < x).max().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub beta: f64,
    pub sigma: f64,
    pub r1: f64,
    pub r2: f64,
    pub samples: usize,
    pub jmax: i64,
}

impl SectorSpec {
    pub fn new(beta: f64, sigma: f64, r1: f64, r2: f64, jmax: i64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(GeomError::InvalidParameter("beta must lie in (0, 1]".into()));
        }
        if !(r1 > 0.0 && r2 > r1) {
            return Err(GeomError::InvalidParameter("need 0 < r1 < r2".into()));
        }
        let samples = (8 * jmax.max(1) as usize).max(64);
        Ok(Self { beta, sigma, r1, r2, samples, jmax })
    }

    pub fn lambda(&self, j: i64) -> f64 {
        (j as f64 - self.sigma) / self.beta
    }

    /// φ_j(θ) = exp(−iλ_jθ).
    pub fn mode(&self, j: i64, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.lambda(j) * theta)
    }

    fn sigma_integer(&self) -> Option<i64> {
        let r = self.sigma.round();
        ((self.sigma - r).abs() < 1e-12).then_some(r as i64)
    }

    /// Angular Fourier coefficient U_j(r) by the trapezoid rule on [0, 2πβ).
    pub fn coefficient<F: Fn(f64, f64) -> Complex64>(&self, u: &F, r: f64, j: i64) -> Complex64 {
        let n = self.samples;
        let dt = TAU * self.beta / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let t = k as f64 * dt;
            s += u(r, t) * self.mode(j, t).conj();
        }
        s / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorExpansion {
    pub spec: SectorSpec,
    /// (j, C_j, C_j*) for j ≠ σ.
    pub modes: Vec<(i64, Complex64, Complex64)>,
    /// (κ₀, c₀) when σ ∈ ℤ.
    pub log_mode: Option<(Complex64, Complex64)>,
    /// sup |U| on the inner circle.
    pub scale: f64,
    /// Relative reconstruction error on the circle r = √(r₁r₂).
    pub reconstruction_error: f64,
}

impl SectorExpansion {
    pub fn eval(&self, r: f64, theta: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        if let Some((k0, c0)) = self.log_mode {
            s += k0 + c0 * r.ln();
        }
        for &(j, c, cs) in &self.modes {
            let l = self.spec.lambda(j);
            s += (c * r.powf(l) + cs * r.powf(-l)) * self.spec.mode(j, theta);
        }
        s
    }

    pub fn coefficient(&self, j: i64) -> Option<(Complex64, Complex64)> {
        self.modes.iter().find(|m| m.0 == j).map(|m| (m.1, m.2))
    }

    /// Largest coefficient magnitude over all modes, including the log pair.
    pub fn max_coefficient(&self) -> f64 {
        let m = self.modes.iter().map(|m| m.1.norm().max(m.2.norm())).fold(0.0, f64::max);
        match self.log_mode {
            Some((a, b)) => m.max(a.norm()).max(b.norm()),
            None => m,
        }
    }
}

/// Expansion of a harmonic function U(r, θ) from its values on the circles r₁, r₂.
pub fn fit_expansion<F: Fn(f64, f64) -> Complex64>(u: F, spec: &SectorSpec) -> Result<SectorExpansion> {
    let (r1, r2) = (spec.r1, spec.r2);
    let mut scale: f64 = 0.0;
    for k in 0..spec.samples {
        let t = TAU * spec.beta * k as f64 / spec.samples as f64;
        scale = scale.max(u(r1, t).norm());
    }
    let twist = Complex64::from_polar(1.0, TAU * spec.sigma);
    for r in [r1, r2] {
        let gap = (u(r, TAU * spec.beta) - twist * u(r, 0.0)).norm();
        if gap > 1e-9 * scale.max(1e-300) && gap > 1e-300 {
            return Err(GeomError::BoundaryTwistViolation(gap));
        }
    }
    let (l1, l2) = (r1.ln(), r2.ln());
    let mut modes = Vec::new();
    let mut log_mode = None;
    for j in -spec.jmax..=spec.jmax {
        let a = spec.coefficient(&u, r1, j);
        let b = spec.coefficient(&u, r2, j);
        if spec.sigma_integer() == Some(j) {
            let c0 = (b - a) / (l2 - l1);
            log_mode = Some((a - c0 * l1, c0));
            continue;
        }
        let l = spec.lambda(j);
        let sep = l.abs() * (l2 - l1);
        if sep < 1e-6 {
            return Err(GeomError::IllConditioned(format!("mode {j}: |lambda| log(r2/r1) = {sep:e}")));
        }
        // U_j(r) = C r^λ + C* r^{-λ}, solved in the centered variable s = log r − (l1+l2)/2
        let m = 0.5 * (l1 + l2);
        let h = 0.5 * (l2 - l1);
        let (ep, em) = ((l * h).exp(), (-l * h).exp());
        // a = C' em + C*' ep, b = C' ep + C*' em with C' = C e^{λm}, C*' = C* e^{−λm}
        let det = em * em - ep * ep;
        let cp = (a * em - b * ep) / det;
        let csp = (b * em - a * ep) / det;
        modes.push((j, cp * (-l * m).exp(), csp * (l * m).exp()));
    }
    let mut exp = SectorExpansion { spec: *spec, modes, log_mode, scale, reconstruction_error: 0.0 };
    let r3 = (r1 * r2).sqrt();
    let mut err: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for k in 0..spec.samples {
        let t = TAU * spec.beta * (k as f64 + 0.37) / spec.samples as f64;
        let v = u(r3, t);
        err = err.max((exp.eval(r3, t) - v).norm());
        norm = norm.max(v.norm());
    }
    exp.reconstruction_error = if norm > 0.0 { err / norm } else { err };
    Ok(exp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleVerdict {
    pub pass: bool,
    /// Modes whose fitted coefficient exceeds the floor.
    pub offending: Vec<i64>,
    pub max_coefficient: f64,
}

/// Numerical Liouville test: for μ ∈ (0, ι_{β,σ}) no mode r^{±λ_j} (nor the log pair) is compatible
/// with a global bound C r^{−μ}, so every fitted coefficient must sit below `floor` (absolute, in units
/// of `bound`, the constant C).
pub fn liouville_check(exp: &SectorExpansion, mu: f64, bound: f64, floor: f64) -> LiouvilleVerdict {
    let spec = &exp.spec;
    let sigma_frac = spec.sigma - spec.sigma.floor();
    let iota = if sigma_frac.abs() < 1e-12 || (1.0 - sigma_frac).abs() < 1e-12 {
        1.0 / spec.beta
    } else {
        sigma_frac.min(1.0 - sigma_frac) / spec.beta
    };
    debug_assert!(mu > 0.0 && mu < iota);
    let c = bound.max(f64::MIN_POSITIVE);
    let mut offending = Vec::new();
    let mut max_c: f64 = 0.0;
    if let Some((k0, c0)) = exp.log_mode {
        let m = k0.norm().max(c0.norm()) / c;
        max_c = max_c.max(m);
        if m > floor {
            offending.push(spec.sigma.round() as i64);
        }
    }
    for &(j, a, b) in &exp.modes {
        let m = a.norm().max(b.norm()) / c;
        max_c = max_c.max(m);
        if m > floor {
            offending.push(j);
        }
    }
    LiouvilleVerdict { pass: offending.is_empty(), offending, max_coefficient: max_c }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionFit {
    /// Im(τ̄₁τ₂) − 1 vanishes identically on the samples.
    Flat,
    Order { lambda: f64, r2: f64 },
}

impl DistortionFit {
    pub fn lambda(&self) -> Option<f64> {
        match self {
            DistortionFit::Flat => None,
            DistortionFit::Order { lambda, .. } => Some(*lambda),
        }
    }
}

/// Log-log slope of sup_{|u|=r} |W(u) − 1| against r, W normalized to 1 on the central fiber.
pub fn distortion_fit(periods: &PeriodModel, radii: &[f64]) -> Result<DistortionFit> {
    if radii.len() < 3 || radii.iter().cloned().fold(0.0, f64::max) / radii.iter().cloned().fold(f64::INFINITY, f64::min) < 4.0 {
        return Err(GeomError::InsufficientRange);
    }
    let n_ang = 64;
    let mut sups = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut s: f64 = 0.0;
        for k in 0..n_ang {
            let u = Complex64::from_polar(r, TAU * (k as f64 + 0.5) / n_ang as f64 - std::f64::consts::PI);
            s = s.max((periods.w_normalized(u)? - 1.0).abs());
        }
        sups.push(s);
    }
    if sups.iter().all(|s| *s < 1e-14) {
        return Ok(DistortionFit::Flat);
    }
    if sups.iter().any(|s| *s == 0.0) {
        return Err(GeomError::InsufficientRange);
    }
    let f = fit_power(radii, &sups);
    Ok(DistortionFit::Order { lambda: f.slope, r2: f.r2 })
}

/// Convenience: the tabulated λ as f64.
pub fn rational_to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn iota_examples() {
        assert_eq!(indicial_data(q(2, 3), q(0, 1), 2).unwrap().1, q(3, 2));
        assert_eq!(indicial_data(q(5, 6), q(5, 6), 2).unwrap().1, q(1, 5));
        assert_eq!(indicial_data(q(1, 2), q(1, 2), 2).unwrap().1, q(1, 1));
    }

    #[test]
    fn forms_roots() {
        assert!(roots_in_window(q(5, 6), RootClass::OneOneForms, q(-2, 1), q(-3, 2)).contains(&q(-8, 5)));
        assert!(roots_in_window(q(2, 3), RootClass::OneOneForms, q(-2, 1), q(-3, 2)).is_empty());
        assert_eq!(next_root_below(q(5, 6), RootClass::OneOneForms, q(-6, 5)), q(-8, 5));
        let f = alg_laplacian_indicial_roots(q(1, 2), RootClass::Functions, 2);
        assert_eq!(f, vec![q(-4, 1), q(-2, 1), q(0, 1), q(2, 1), q(4, 1)]);
    }

    #[test]
    fn single_mode_recovered() {
        let spec = SectorSpec::new(2.0 / 3.0, 0.25, 0.5, 2.0, 6).unwrap();
        let l = spec.lambda(1);
        let e = fit_expansion(|r, t| r.powf(l) * spec.mode(1, t), &spec).unwrap();
        let (c, cs) = e.coefficient(1).unwrap();
        assert!((c - 1.0).norm() < 1e-12 && cs.norm() < 1e-12);
        assert!(e.reconstruction_error < 1e-12);
    }

    #[test]
    fn log_mode_recovered() {
        let spec = SectorSpec::new(0.5, 0.0, 0.5, 2.0, 4).unwrap();
        let e = fit_expansion(|r, _| Complex64::new(r.ln(), 0.0), &spec).unwrap();
        let (k0, c0) = e.log_mode.unwrap();
        assert!(k0.norm() < 1e-13 && (c0 - 1.0).norm() < 1e-13);
    }

    #[test]
    fn twist_violation_detected() {
        let spec = SectorSpec::new(0.5, 0.3, 0.5, 2.0, 4).unwrap();
        assert!(matches!(
            fit_expansion(|r, _| Complex64::new(r, 0.0), &spec),
            Err(GeomError::BoundaryTwistViolation(_))
        ));
    }
}
