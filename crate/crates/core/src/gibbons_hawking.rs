//! Gibbons–Hawking hyperkähler structures from a positive harmonic function on
//! a 3-dimensional base and a connection solving dθ = *dV.
//!
//! Coordinates are (u₁, u₂, u₃, u₄) with u₄ ∈ ℝ/2πℤ the fiber angle.

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::lattice_greens::{eval_green, HolomorphicPoly, ModeSum, MonopoleSet, SWITCH_RADIUS};
use crate::triple_algebra::{two_form, wedge11, DefiniteTriple, TwoForm};

/// Which half-axis carries the Dirac string of each pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// String from each pole towards +u₃.
    #[default]
    Upper,
    /// String from each pole towards −u₃.
    Lower,
}

/// Harmonic potential on the base together with its connection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// V ≡ c on ℝ³ or ℝ²×S¹, with A = 0.
    Constant { value: f64 },
    /// V = c + 1/(2|u − p|) on ℝ³.
    TaubNut { c: f64, center: [f64; 3] },
    /// V = T + G_P + 2π Im h(δw) on ℝ²×S¹.
    MultiOv { poles: MonopoleSet, big_t: f64, h: HolomorphicPoly, delta: f64 },
}

/// A Gibbons–Hawking chart: potential, gauge and the period shift c in θ = du₄ + A + c du₃.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GHChart {
    pub potential: Potential,
    pub gauge: Gauge,
    pub period_shift: f64,
    pub tol: f64,
    /// Radius of the excluded tube around Dirac strings.
    pub string_radius: f64,
}

const DPHI_EPS: f64 = 1e-12;

impl GHChart {
    pub fn new(potential: Potential) -> Self {
        Self { potential, gauge: Gauge::Upper, period_shift: 0.0, tol: 1e-15, string_radius: 1e-9 }
    }

    /// Multi-Ooguri–Vafa chart with T = −ν log δ.
    pub fn multi_ov(poles: MonopoleSet, delta: f64, h: HolomorphicPoly) -> Self {
        let big_t = poles.big_t(delta);
        Self::new(Potential::MultiOv { poles, big_t, h, delta })
    }

    pub fn taub_nut(c: f64) -> Self {
        Self::new(Potential::TaubNut { c, center: [0.0; 3] })
    }

    pub fn with_gauge(mut self, g: Gauge) -> Self {
        self.gauge = g;
        self
    }

    pub fn with_period_shift(mut self, c: f64) -> Self {
        self.period_shift = c;
        self
    }

    /// V and ∇V at a base point.
    pub fn potential(&self, u: [f64; 3]) -> Result<(f64, [f64; 3])> {
        match &self.potential {
            Potential::Constant { value } => Ok((*value, [0.0; 3])),
            Potential::TaubNut { c, center } => {
                let d = [u[0] - center[0], u[1] - center[1], u[2] - center[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if r < 1e-14 {
                    return Err(GeomError::PoleHit);
                }
                let g = -0.5 / (r * r * r);
                Ok((c + 0.5 / r, [g * d[0], g * d[1], g * d[2]]))
            }
            Potential::MultiOv { poles, big_t, h, delta } => {
                let ge = eval_green(u, poles, self.tol)?;
                let w = Complex64::new(u[0], u[1]);
                let hv = h.eval(w * *delta);
                // ∂_{u₁} Im H = Im(δh'), ∂_{u₂} Im H = Re(δh')
                let hp = h.derivative(w * *delta) * *delta;
                Ok((
                    big_t + ge.value + TAU * hv.im,
                    [ge.gradient[0] + TAU * hp.im, ge.gradient[1] + TAU * hp.re, ge.gradient[2]],
                ))
            }
        }
    }

    /// Connection coefficients (A₁, A₂, A₃), period shift included.
    pub fn connection(&self, u: [f64; 3]) -> Result<[f64; 3]> {
        let rho = u[0].hypot(u[1]);
        let dphi = |coef: f64| -> [f64; 3] {
            if coef == 0.0 {
                [0.0; 3]
            } else {
                [-coef * u[1] / (rho * rho), coef * u[0] / (rho * rho), 0.0]
            }
        };
        let mut a = match &self.potential {
            Potential::Constant { .. } => [0.0; 3],
            Potential::TaubNut { center, .. } => {
                let d = [u[0] - center[0], u[1] - center[1], u[2] - center[2]];
                let rr = d[0].hypot(d[1]);
                let r = rr.hypot(d[2]);
                let sgn = match self.gauge {
                    Gauge::Upper => 1.0,
                    Gauge::Lower => -1.0,
                };
                if rr < self.string_radius && sgn * d[2] >= 0.0 {
                    return Err(GeomError::GaugeStringHit);
                }
                if rr < DPHI_EPS {
                    [0.0; 3]
                } else {
                    let coef = 0.5 * (d[2] / r + sgn);
                    [-coef * d[1] / (rr * rr), coef * d[0] / (rr * rr), 0.0]
                }
            }
            Potential::MultiOv { poles, h, delta, .. } => {
                if rho < self.string_radius {
                    return Err(GeomError::GaugeStringHit);
                }
                let mut coef = periodic_connection_coefficient(u[2], rho, poles, self.tol)?;
                if self.gauge == Gauge::Lower {
                    coef -= poles.nu() as f64;
                }
                let mut a = dphi(coef);
                let w = Complex64::new(u[0], u[1]);
                a[2] -= TAU * h.eval(w * *delta).re;
                a
            }
        };
        a[2] += self.period_shift;
        Ok(a)
    }

    /// θ = du₄ + A as a covector in (u₁, u₂, u₃, u₄).
    pub fn theta(&self, u: [f64; 3]) -> Result<[f64; 4]> {
        let a = self.connection(u)?;
        Ok([a[0], a[1], a[2], 1.0])
    }

    /// FD residual |curl A − ∇V| at a base point, second-order stencil with step h.
    pub fn monopole_residual(&self, u: [f64; 3], h: f64) -> Result<f64> {
        self.curl_residual(u, h, &[(1.0, 0.5)])
    }

    /// As `monopole_residual` with the fourth-order five-point stencil.
    pub fn monopole_residual4(&self, u: [f64; 3], h: f64) -> Result<f64> {
        self.curl_residual(u, h, &[(1.0, 2.0 / 3.0), (2.0, -1.0 / 12.0)])
    }

    fn curl_residual(&self, u: [f64; 3], h: f64, stencil: &[(f64, f64)]) -> Result<f64> {
        let mut da = [[0.0; 3]; 3];
        for j in 0..3 {
            for &(k, w) in stencil {
                let mut p = u;
                let mut m = u;
                p[j] += k * h;
                m[j] -= k * h;
                let (ap, am) = (self.connection(p)?, self.connection(m)?);
                for i in 0..3 {
                    da[i][j] += w * (ap[i] - am[i]) / h;
                }
            }
        }
        let curl = [da[2][1] - da[1][2], da[0][2] - da[2][0], da[1][0] - da[0][1]];
        let (_, g) = self.potential(u)?;
        Ok(((curl[0] - g[0]).powi(2) + (curl[1] - g[1]).powi(2) + (curl[2] - g[2]).powi(2)).sqrt())
    }
}

// Coefficient a of the connection a·dφ for the periodic Green's function, upper gauge:
// per pole Σ_n ½((u₃ − t − n)/R_n + c_n) with c_n = +1 for n ≥ 0, −1 for n < 0.
fn periodic_connection_coefficient(u3: f64, rho: f64, poles: &MonopoleSet, tol: f64) -> Result<f64> {
    if rho >= SWITCH_RADIUS {
        // zero mode (u₃ − t + ½) per pole plus Σ ĝ_k κρ K₁(κρ)
        let ms = ModeSum::new(u3, rho, poles, tol)?;
        let mut a: f64 = poles.poles().iter().map(|t| u3 - t + 0.5).sum();
        for m in &ms.modes {
            let [kappa, _, gh, _, k1e] = *m;
            a += gh * kappa * rho * k1e * (-kappa * rho).exp();
        }
        return Ok(a);
    }
    let r2 = rho * rho;
    let mut total = 0.0;
    for &t in poles.poles() {
        let s = u3 - t;
        let m = s.floor();
        let sp = s - m;
        // fixed budget so the truncation is a smooth function of the point
        let n_max = ((5e-4 / tol.max(1e-16)).powf(0.2).ceil() as usize).max(16);
        // a(u) = ½(1 − u/√(ρ²+u²)), written without cancellation
        let a = |u: f64| {
            let r = (r2 + u * u).sqrt();
            if u >= 0.0 {
                0.5 * r2 / (r * (r + u))
            } else {
                0.5 * (1.0 - u / r)
            }
        };
        let mut v = 0.0;
        for j in 0..=n_max {
            v += a(j as f64 - sp);
        }
        for j in 1..=n_max {
            v -= a(sp + j as f64);
        }
        let big_m = n_max as f64 + 0.5;
        let tail = |u: f64| {
            let r = (r2 + u * u).sqrt();
            0.5 * r2 / (r + u) - 0.5 * r2 / (r * r * r) / 24.0
        };
        v += tail(big_m - sp) - tail(big_m + sp);
        // a(j − s') for j ≥ 0 gives ½(1 + (s'−j)/R); shift back by the twist
        total += v + m;
    }
    Ok(total)
}

/// Gibbons–Hawking metric (1/2π)(V|du|² + V⁻¹θ²), optionally scaled.
pub fn gh_metric(chart: &GHChart, p: [f64; 4]) -> Result<Matrix4<f64>> {
    let u = [p[0], p[1], p[2]];
    let (v, _) = chart.potential(u)?;
    let th = chart.theta(u)?;
    let mut g = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = th[i] * th[j] / v;
        }
    }
    for i in 0..3 {
        g[(i, i)] += v;
    }
    Ok(g / TAU)
}

/// Hyperkähler triple evaluator of a chart with an overall scale (e.g. δ²).
#[derive(Debug, Clone)]
pub struct GHTriple<'a> {
    pub chart: &'a GHChart,
    pub scale: f64,
}

pub fn gh_triple(chart: &GHChart) -> GHTriple<'_> {
    GHTriple { chart, scale: 1.0 }
}

/// ω₁ = (du₃∧θ + V du₁∧du₂)/2π and cyclically, from V and θ.
pub fn triple_from_data(v: f64, th: [f64; 4], scale: f64) -> [TwoForm; 3] {
    let e = |i: usize| {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        c
    };
    let c = scale / TAU;
    [
        (wedge11(&e(2), &th) + two_form(&[(0, 1, v)])) * c,
        (wedge11(&e(0), &th) + two_form(&[(1, 2, v)])) * c,
        (wedge11(&e(1), &th) + two_form(&[(2, 0, v)])) * c,
    ]
}

impl GHTriple<'_> {
    pub fn scaled(mut self, s: f64) -> Self {
        self.scale = s;
        self
    }

    pub fn eval(&self, p: [f64; 4]) -> Result<DefiniteTriple> {
        let u = [p[0], p[1], p[2]];
        let (v, _) = self.chart.potential(u)?;
        let th = self.chart.theta(u)?;
        Ok(DefiniteTriple::new(triple_from_data(v, th, self.scale)))
    }

    /// Holomorphic 2-form Ω = ω₂ + iω₃ as (real, imaginary) parts.
    pub fn omega_c(&self, p: [f64; 4]) -> Result<(TwoForm, TwoForm)> {
        let t = self.eval(p)?;
        Ok((t.forms[1], t.forms[2]))
    }
}

/// Lift of u ↦ −u for an involution-symmetric pole set:
/// (u, u₄) ↦ (−u, −u₄ − cφ) with c = ν − 2Σt_i and φ the polar angle of (u₁, u₂).
///
/// In the upper gauge the pulled-back connection is −A + c dφ (c defined with t_i ∈ [0,1)), which the fiber shift absorbs.
pub fn involution_lift(poles: &MonopoleSet, p: [f64; 4]) -> [f64; 4] {
    let phi = p[1].atan2(p[0]);
    [-p[0], -p[1], -p[2], -p[3] - involution_shift(poles) * phi]
}

fn involution_shift(poles: &MonopoleSet) -> f64 {
    poles.nu() as f64 - 2.0 * poles.poles().iter().sum::<f64>()
}

/// Jacobian of `involution_lift` at p.
pub fn involution_jacobian(poles: &MonopoleSet, p: [f64; 4]) -> Matrix4<f64> {
    let r2 = p[0] * p[0] + p[1] * p[1];
    let c = involution_shift(poles);
    let mut j = -Matrix4::identity();
    j[(3, 0)] = c * p[1] / r2;
    j[(3, 1)] = -c * p[0] / r2;
    j
}

/// Largest V⁻¹ fiber-to-base eigenvalue ratio predicted by the metric formula.
pub fn fiber_base_ratio(v: f64) -> f64 {
    1.0 / (v * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_is_flat_product() {
        let c = GHChart::new(Potential::Constant { value: TAU });
        let g = gh_metric(&c, [0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut e = Matrix4::identity();
        e[(3, 3)] = 1.0 / (TAU * TAU);
        assert!((g - e).norm() < 1e-15);
    }

    #[test]
    fn connection_representations_agree() {
        let poles = MonopoleSet::new(vec![0.0, 0.4]).unwrap();
        for &u3 in &[0.1, 0.55, 1.3, -0.7] {
            let img = periodic_connection_coefficient(u3, 0.2499999, &poles, 1e-14).unwrap();
            let fb = periodic_connection_coefficient(u3, 0.25, &poles, 1e-14).unwrap();
            // values at ρ and ρ+1e-7 differ by O(1e-7)
            assert!((img - fb).abs() < 1e-6, "{u3}: {img} {fb}");
        }
    }

    #[test]
    fn lower_gauge_differs_by_closed_form() {
        let poles = MonopoleSet::new(vec![0.0, 0.5]).unwrap();
        let up = GHChart::multi_ov(poles.clone(), (-10.0f64).exp(), HolomorphicPoly::zero());
        let lo = up.clone().with_gauge(Gauge::Lower);
        for u in [[0.1, 0.05, 0.2], [0.5, -0.3, 0.7]] {
            for c in [&up, &lo] {
                let r = c.monopole_residual(u, 1e-3).unwrap() / c.monopole_residual(u, 5e-4).unwrap();
                assert!((3.5..4.5).contains(&r), "{r}");
                assert!(c.monopole_residual4(u, 1e-3).unwrap() < 1e-8);
            }
        }
    }
}
