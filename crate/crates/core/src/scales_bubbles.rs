//! Regularity-scale weight 𝔰 near each kind of singular fiber and the canonical
//! bubble at a point as δ → 0.
//!
//! A probe is a family of points indexed by δ. Its defining distance follows a
//! power law c·δ^a·(log 1/δ)^p, so the δ → 0 direction is part of the data and
//! bubble labels can be decided by comparing exponents.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::diffgeo::fd_riemann_norm;
use crate::error::{GeomError, Result};
use crate::gibbons_hawking::{gh_metric, GHChart};
use crate::gluing_engine::CutoffProfile;
use crate::k3_config::FiberType;
use crate::lattice_greens::{circle_dist, eval_green, HolomorphicPoly, MonopoleSet};

/// Multiplier on ‖Rm‖^{-1/2} fixed once from the I₁ Ooguri–Vafa chart.
pub const CURVATURE_PROXY_SCALE: f64 = 1.47;
/// Band for 𝔰 / proxy.
pub const CURVATURE_BAND: (f64, f64) = (1.0 / 20.0, 20.0);

const EXP_EPS: f64 = 1e-12;

/// c·δ^a·(log 1/δ)^p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub c: f64,
    pub a: f64,
    pub p: f64,
}

/// Limit of x/y as δ → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptotic {
    Vanishing,
    Bounded(f64),
    Diverging,
}

impl Scaling {
    pub fn new(c: f64, a: f64, p: f64) -> Self {
        Self { c, a, p }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    pub fn value(&self, delta: f64) -> f64 {
        self.c * delta.powf(self.a) * (1.0 / delta).ln().powf(self.p)
    }

    pub fn mul(&self, o: &Scaling) -> Scaling {
        Scaling::new(self.c * o.c, self.a + o.a, self.p + o.p)
    }

    pub fn div(&self, o: &Scaling) -> Scaling {
        Scaling::new(self.c / o.c, self.a - o.a, self.p - o.p)
    }

    /// Behavior of self/o along δ → 0.
    pub fn compare(&self, o: &Scaling) -> Asymptotic {
        let q = self.div(o);
        if q.c == 0.0 || q.a > EXP_EPS {
            Asymptotic::Vanishing
        } else if q.a < -EXP_EPS {
            Asymptotic::Diverging
        } else if q.p < -EXP_EPS {
            Asymptotic::Vanishing
        } else if q.p > EXP_EPS {
            Asymptotic::Diverging
        } else {
            Asymptotic::Bounded(q.c)
        }
    }
}

/// Where a probe sits, with its defining distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Locus {
    /// Distance to the nearest singular fiber, in the regular region.
    Regular { dist: Scaling },
    /// d(Ψ(p), x) in a finite-monodromy region.
    Alg { dist: Scaling },
    /// Q³ offset from monopole `index` along `dir`.
    Pole { index: usize, dist: Scaling, dir: [f64; 3] },
    /// Q³ offset from 0³ along `dir` at large scale.
    Origin { dist: Scaling, dir: [f64; 3] },
    /// d_{g_δ}(x, q_index) from a ℤ₂-fixed point, `dir` in (u, u₄) coordinates.
    Fixed { index: usize, dist: Scaling, dir: [f64; 4] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub locus: Locus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BubbleLabel {
    TaubNut,
    EguchiHanson,
    Alg { beta: Rational64, tau: (f64, f64) },
    Cone { beta: Rational64 },
    R3,
    R2xS1,
    R2,
    R4Z2,
    R3xS1Z2,
    R3Z2,
    R2xS1Z2,
    R2Z2,
    McLeanP1,
}

impl fmt::Display for BubbleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BubbleLabel::TaubNut => write!(f, "TaubNUT"),
            BubbleLabel::EguchiHanson => write!(f, "EguchiHanson"),
            BubbleLabel::Alg { beta, tau } => write!(f, "ALG({beta},{}+{}i)", tau.0, tau.1),
            BubbleLabel::Cone { beta } => write!(f, "Cone(2π·{beta})"),
            BubbleLabel::R3 => write!(f, "R3"),
            BubbleLabel::R2xS1 => write!(f, "R2xS1"),
            BubbleLabel::R2 => write!(f, "R2"),
            BubbleLabel::R4Z2 => write!(f, "R4/Z2"),
            BubbleLabel::R3xS1Z2 => write!(f, "(R3xS1)/Z2"),
            BubbleLabel::R3Z2 => write!(f, "R3/Z2"),
            BubbleLabel::R2xS1Z2 => write!(f, "(R2xS1)/Z2"),
            BubbleLabel::R2Z2 => write!(f, "R2/Z2"),
            BubbleLabel::McLeanP1 => write!(f, "McLean-P1"),
        }
    }
}

/// Fixed points q₁..q₄ as (u₃, u₄) over the axis.
const FIXED_POINTS: [(f64, f64); 4] = [(0.0, 0.0), (0.0, PI), (0.5, 0.0), (0.5, PI)];

/// Data needed to evaluate 𝔰 near one singular fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    pub fiber: FiberType,
    /// Monopoles on Q³; for I_ν* these are the 2ν lifted poles.
    pub poles: Option<MonopoleSet>,
    pub delta0: f64,
    /// 𝔢_λ as a law in δ; the default is (log 1/δ)^{-3/4}.
    pub orbifold_law: Scaling,
    /// Lattice parameter reported for ALG labels (I₀* only; table types are fixed).
    pub free_tau: (f64, f64),
}

impl WeightField {
    pub fn new(fiber: FiberType, poles: Option<MonopoleSet>) -> Result<Self> {
        match fiber {
            FiberType::I(nu) => {
                let p = poles.as_ref().ok_or_else(|| GeomError::InvalidParameter("I_ν needs monopoles".into()))?;
                if p.nu() != nu as usize {
                    return Err(GeomError::InvalidParameter(format!("{} poles for {fiber}", p.nu())));
                }
            }
            FiberType::IStar(nu) if nu > 0 => {
                let p = poles.as_ref().ok_or_else(|| GeomError::InvalidParameter("I_ν* needs monopoles".into()))?;
                if p.nu() != 2 * nu as usize || !p.is_involution_symmetric() {
                    return Err(GeomError::FixedPointMismatch);
                }
                if p.poles().iter().any(|&t| circle_dist(t, 0.0) < 1e-9 || circle_dist(t, 0.5) < 1e-9) {
                    return Err(GeomError::FixedPointMismatch);
                }
            }
            _ => {}
        }
        Ok(Self { fiber, poles, delta0: 0.1, orbifold_law: Scaling::new(1.0, 0.0, -0.75), free_tau: (0.0, 1.0) })
    }

    fn is_star(&self) -> bool {
        matches!(self.fiber, FiberType::IStar(n) if n > 0)
    }

    fn q3_poles(&self) -> Result<&MonopoleSet> {
        self.poles.as_ref().ok_or_else(|| GeomError::RegionUnresolved(format!("no monopoles for {}", self.fiber)))
    }

    /// Number of monopoles on Q³ (2ν for I_ν*).
    fn nu_eff(&self) -> Result<f64> {
        Ok(self.q3_poles()?.nu() as f64)
    }

    /// T = −ν_eff log δ.
    pub fn big_t(&self, delta: f64) -> Result<f64> {
        Ok(-self.nu_eff()? * delta.ln())
    }

    fn iota0(&self) -> Result<f64> {
        let p = self.q3_poles()?;
        if !self.is_star() {
            return Ok(p.iota0());
        }
        let mut pts: Vec<f64> = p.poles().to_vec();
        pts.extend([0.0, 0.5]);
        let mut m: f64 = 1.0;
        for i in 0..pts.len() {
            for j in 0..i {
                m = m.min(circle_dist(pts[i], pts[j]));
            }
        }
        Ok(0.5 * m)
    }

    /// ῑ₀, chosen so that base distance ι₀ from a fixed point sits at 4ῑ₀T^{1/2} in g_{2ν,T}.
    fn iota0_bar(&self) -> Result<f64> {
        Ok(self.iota0()? / (4.0 * TAU.sqrt()))
    }

    fn t0(&self) -> Result<f64> {
        let p = self.q3_poles()?;
        let far = p.poles().iter().map(|&t| circle_dist(t, 0.0)).fold(0.0, f64::max);
        Ok((2.0 * far).max(2.0 * self.iota0()?))
    }

    fn alg_label(&self) -> Result<(Rational64, (f64, f64))> {
        let beta = self.fiber.beta().ok_or_else(|| GeomError::RegionUnresolved(format!("{} is not finite monodromy", self.fiber)))?;
        let tau = match self.fiber.tau_kind() {
            Some(crate::k3_config::TauKind::Hexagonal) => ((TAU / 3.0).cos(), (TAU / 3.0).sin()),
            Some(crate::k3_config::TauKind::Square) => (0.0, 1.0),
            _ => self.free_tau,
        };
        Ok((beta, tau))
    }

    /// Mollified distance 𝔯 on Q³.
    pub fn frak_r(&self, u: [f64; 3], delta: f64) -> Result<f64> {
        let t = self.big_t(delta)?;
        let nu = self.nu_eff()?;
        let p = self.q3_poles()?;
        let dmin = p.poles().iter().map(|&s| q3_dist(u, [0.0, 0.0, s])).fold(f64::INFINITY, f64::min);
        let d0 = q3_dist(u, [0.0; 3]);
        let (i0, t0) = (self.iota0()?, self.t0()?);
        let (e2, e1) = (((t - 2.0) / nu).exp(), ((t - 1.0) / nu).exp());
        Ok(if dmin <= 2.0 / t {
            blend(1.0 / t, dmin, rise(dmin, 1.0 / t, 2.0 / t))
        } else if dmin <= i0 {
            dmin
        } else if dmin <= t0 {
            blend(dmin, d0, rise(dmin, i0, t0))
        } else {
            blend(d0, e2, rise(dmin, e2, e1))
        })
    }

    /// L_T = T + L₀(d(x, 0³)).
    pub fn l_t(&self, u: [f64; 3], delta: f64) -> Result<f64> {
        let r = q3_dist(u, [0.0; 3]);
        let l0 = if r <= 2.0 { 0.0 } else { -self.nu_eff()? * r.ln() * rise(r, 2.0, 4.0) };
        Ok(self.big_t(delta)? + l0)
    }

    /// 𝔰 on the Q³ part of an I_ν or I_ν* region: δ·L_T^{1/2}·𝔯.
    fn weight_q3(&self, u: [f64; 3], delta: f64) -> Result<f64> {
        Ok(delta * self.l_t(u, delta)?.sqrt() * self.frak_r(u, delta)?)
    }

    /// Potential at a fixed point, used for the local flat metric there.
    fn v_fixed(&self, index: usize, delta: f64) -> Result<f64> {
        let p = self.q3_poles()?;
        let g = eval_green([0.0, 0.0, FIXED_POINTS[index].0], p, 1e-15)?;
        Ok(self.big_t(delta)? + g.value)
    }

    /// d_{g_δ}(x, q_λ) in the flat approximation at q_λ; x = (u, u₄).
    fn fixed_dist(&self, x: [f64; 4], index: usize, delta: f64) -> Result<f64> {
        let v = self.v_fixed(index, delta)?;
        let (s3, s4) = FIXED_POINTS[index];
        let du3 = {
            let d = (x[2] - s3).rem_euclid(1.0);
            d.min(1.0 - d)
        };
        let du4 = {
            let d = (x[3] - s4).rem_euclid(TAU);
            d.min(TAU - d)
        };
        let base2 = x[0] * x[0] + x[1] * x[1] + du3 * du3;
        Ok(delta * ((v * base2 + du4 * du4 / v) / TAU).sqrt())
    }

    /// 𝔡_* in g_{2ν,T} units, given m = min_λ d_{g_δ}(x, q_λ)/δ.
    fn frak_d_star(&self, m: f64, delta: f64) -> Result<f64> {
        let e = self.orbifold_law.value(delta);
        let e2 = e * e;
        let st = self.big_t(delta)?.sqrt();
        let ib = self.iota0_bar()?;
        Ok(if m <= 2.0 * e2 {
            blend(e2, m, rise(m, e2, 2.0 * e2))
        } else if m <= 0.25 * ib * st {
            m
        } else {
            blend(m, st, rise(m, 0.25 * ib * st, 0.5 * ib * st))
        })
    }

    /// Concrete position of a probe at δ: (Q³ point, fiber angle).
    pub fn position(&self, locus: &Locus, delta: f64) -> Result<[f64; 4]> {
        Ok(match locus {
            Locus::Pole { index, dist, dir } => {
                let p = self.q3_poles()?;
                let t = *p.poles().get(*index).ok_or_else(|| GeomError::RegionUnresolved(format!("no pole {index}")))?;
                let d = unit3(*dir)?;
                let r = dist.value(delta);
                [r * d[0], r * d[1], t + r * d[2], 0.0]
            }
            Locus::Origin { dist, dir } => {
                let d = unit3(*dir)?;
                let r = dist.value(delta);
                [r * d[0], r * d[1], r * d[2], 0.0]
            }
            Locus::Fixed { index, dist, dir } => {
                if *index >= 4 {
                    return Err(GeomError::RegionUnresolved(format!("no fixed point {index}")));
                }
                let v = self.v_fixed(*index, delta)?;
                let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(n > 0.0) {
                    return Err(GeomError::InvalidParameter("zero direction".into()));
                }
                let s = dist.value(delta) / (delta * n);
                let (a, b) = ((TAU / v).sqrt() * s, (TAU * v).sqrt() * s);
                let (s3, s4) = FIXED_POINTS[*index];
                [a * dir[0], a * dir[1], s3 + a * dir[2], s4 + b * dir[3]]
            }
            Locus::Regular { .. } | Locus::Alg { .. } => {
                return Err(GeomError::RegionUnresolved("locus has no chart position".into()))
            }
        })
    }

    /// 𝔰 at a probe for a given δ.
    pub fn weight(&self, locus: &Locus, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(GeomError::InvalidParameter(format!("δ = {delta}")));
        }
        match locus {
            Locus::Regular { dist } => {
                let d = dist.value(delta);
                let (a, b) = (8.0 * self.delta0, 16.0 * self.delta0);
                Ok(if d <= a { d } else { blend(d, 1.0, rise(d, a, b)) })
            }
            Locus::Alg { dist } => {
                if self.fiber.beta().is_none() {
                    return Err(GeomError::RegionUnresolved(format!("{} has no ALG region", self.fiber)));
                }
                let d = dist.value(delta);
                Ok(blend(delta, d, rise(d, delta, 2.0 * delta)))
            }
            _ => {
                let x = self.position(locus, delta)?;
                self.weight_at(x, delta)
            }
        }
    }

    /// 𝔰 at a chart point (u₁, u₂, u₃, u₄) of an I_ν or I_ν* region.
    pub fn weight_at(&self, x: [f64; 4], delta: f64) -> Result<f64> {
        let u = [x[0], x[1], x[2]];
        let outer = self.weight_q3(u, delta)?;
        if !self.is_star() {
            return Ok(outer);
        }
        let mut dq = f64::INFINITY;
        for i in 0..4 {
            dq = dq.min(self.fixed_dist(x, i, delta)?);
        }
        let m = dq / delta;
        let st = self.big_t(delta)?.sqrt();
        let ib = self.iota0_bar()?;
        let inner = delta * self.frak_d_star(m, delta)?;
        Ok(blend(inner, outer, rise(m, ib * st, 2.0 * ib * st)))
    }

    /// Canonical bubble of a probe family as δ → 0.
    pub fn classify_bubble(&self, locus: &Locus) -> Result<BubbleLabel> {
        let unresolved = |s: &str| Err(GeomError::RegionUnresolved(s.into()));
        let one = Scaling::constant(1.0);
        let star = self.is_star();
        match locus {
            Locus::Regular { dist } => match dist.compare(&one) {
                Asymptotic::Bounded(_) => Ok(BubbleLabel::McLeanP1),
                _ => unresolved("regular-region probe must stay at bounded distance"),
            },
            Locus::Alg { dist } => {
                let (beta, tau) = self.alg_label()?;
                match dist.compare(&Scaling::new(1.0, 1.0, 0.0)) {
                    Asymptotic::Vanishing | Asymptotic::Bounded(_) => Ok(BubbleLabel::Alg { beta, tau }),
                    Asymptotic::Diverging => match dist.compare(&one) {
                        Asymptotic::Vanishing => Ok(BubbleLabel::Cone { beta }),
                        _ => unresolved("probe leaves the ALG region"),
                    },
                }
            }
            Locus::Pole { dist, .. } => {
                let nu = self.nu_eff()?;
                let inv_t = Scaling::new(1.0 / nu, 0.0, -1.0);
                match dist.compare(&inv_t) {
                    Asymptotic::Vanishing | Asymptotic::Bounded(_) => Ok(BubbleLabel::TaubNut),
                    Asymptotic::Diverging => match dist.compare(&one) {
                        Asymptotic::Vanishing => Ok(BubbleLabel::R3),
                        Asymptotic::Bounded(c) if c <= self.iota0()? + EXP_EPS => {
                            Ok(if star { BubbleLabel::R2xS1Z2 } else { BubbleLabel::R2xS1 })
                        }
                        _ => unresolved("use an origin-centered probe beyond ι₀"),
                    },
                }
            }
            Locus::Origin { dist, .. } => {
                let q = dist.div(&Scaling::new(1.0, -1.0, 0.0));
                match dist.compare(&one) {
                    Asymptotic::Vanishing => unresolved("origin probe must not shrink"),
                    Asymptotic::Bounded(c) if c >= self.t0()? - EXP_EPS => {
                        Ok(if star { BubbleLabel::R2xS1Z2 } else { BubbleLabel::R2xS1 })
                    }
                    Asymptotic::Bounded(_) => unresolved("origin probe inside the monopole cluster"),
                    Asymptotic::Diverging => match q.compare(&one) {
                        // L_T stays bounded only when the radius is c/δ
                        Asymptotic::Bounded(_) => Ok(BubbleLabel::McLeanP1),
                        Asymptotic::Vanishing => Ok(if star { BubbleLabel::R2Z2 } else { BubbleLabel::R2 }),
                        Asymptotic::Diverging => unresolved("probe leaves the Ooguri–Vafa chart"),
                    },
                }
            }
            Locus::Fixed { dist, .. } => {
                if !star {
                    return unresolved("fixed points exist only for I_ν*");
                }
                let nu = self.nu_eff()?;
                let m = dist.div(&Scaling::new(1.0, 1.0, 0.0));
                let e2 = self.orbifold_law.mul(&self.orbifold_law);
                let sqrt_t = Scaling::new(nu.sqrt(), 0.0, 0.5);
                let inv_sqrt_t = Scaling::new(1.0 / nu.sqrt(), 0.0, -0.5);
                if !matches!(m.compare(&e2), Asymptotic::Diverging) {
                    return Ok(BubbleLabel::EguchiHanson);
                }
                match m.compare(&inv_sqrt_t) {
                    Asymptotic::Vanishing => Ok(BubbleLabel::R4Z2),
                    Asymptotic::Bounded(_) => Ok(BubbleLabel::R3xS1Z2),
                    Asymptotic::Diverging => match m.compare(&sqrt_t) {
                        Asymptotic::Vanishing => Ok(BubbleLabel::R3Z2),
                        Asymptotic::Bounded(c) if c <= self.iota0_bar()? + EXP_EPS => Ok(BubbleLabel::R2xS1Z2),
                        _ => unresolved("use a pole- or origin-centered probe away from the fixed points"),
                    },
                }
            }
        }
    }
}

fn rise(x: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return if x < a { 0.0 } else { 1.0 };
    }
    CutoffProfile::rising(a, b).map(|c| c.eval(x).0).unwrap_or(if x < a { 0.0 } else { 1.0 })
}

/// Geometric interpolation a^{1−χ} b^χ.
fn blend(a: f64, b: f64, chi: f64) -> f64 {
    if chi <= 0.0 {
        a
    } else if chi >= 1.0 {
        b
    } else {
        (a.ln() * (1.0 - chi) + b.ln() * chi).exp()
    }
}

fn unit3(d: [f64; 3]) -> Result<[f64; 3]> {
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if !(n > 0.0) {
        return Err(GeomError::InvalidParameter("zero direction".into()));
    }
    Ok([d[0] / n, d[1] / n, d[2] / n])
}

/// Distance on ℝ² × ℝ/ℤ.
pub fn q3_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dz = circle_dist(a[2], b[2]);
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + dz * dz).sqrt()
}

/// CURVATURE_PROXY_SCALE·‖Rm‖^{-1/2} of δ²·g_GH on a multi-Ooguri–Vafa chart.
pub fn curvature_proxy(chart: &GHChart, delta: f64, p: [f64; 4], h: f64) -> Result<f64> {
    // validate the point before differencing around it
    gh_metric(chart, p)?;
    let metric = |x: &[f64]| -> DMatrix<f64> {
        let g = gh_metric(chart, [x[0], x[1], x[2], x[3]]).expect("metric near a valid point");
        DMatrix::from_iterator(4, 4, g.iter().copied())
    };
    let rm = fd_riemann_norm(metric, &p, h);
    Ok(CURVATURE_PROXY_SCALE * delta / rm.sqrt())
}

/// Sample grid on a multi-OV chart: offsets from each pole, between poles, and far out.
pub fn band_samples(field: &WeightField, delta: f64) -> Result<Vec<[f64; 4]>> {
    let p = field.q3_poles()?;
    let t = field.big_t(delta)?;
    let i0 = field.iota0()?;
    let mut out = Vec::new();
    for &s in p.poles() {
        for k in 0..10 {
            let r = (0.5 / t) * (2.0 * i0 * t).powf(k as f64 / 9.0);
            let th = 0.3 + 0.7 * k as f64;
            out.push([r * th.cos(), r * th.sin(), s - 0.3 * r, 0.0]);
        }
    }
    for k in 0..6 {
        let r = 2.0 * 10f64.powf(k as f64 / 2.0);
        out.push([r * (0.2 * k as f64).cos(), r * (0.2 * k as f64).sin(), 0.37, 0.0]);
    }
    Ok(out)
}

/// 𝔰/proxy at each sample of the grid.
pub fn band_ratios(field: &WeightField, delta: f64) -> Result<Vec<f64>> {
    let p = field.q3_poles()?.clone();
    let t = field.big_t(delta)?;
    let chart = GHChart::multi_ov(p, delta, HolomorphicPoly::zero());
    band_samples(field, delta)?
        .into_iter()
        .map(|x| {
            let scale = x[0].hypot(x[1]).max(1.0 / t);
            let proxy = curvature_proxy(&chart, delta, x, 1e-2 * scale.min(0.05))?;
            Ok(field.weight_at(x, delta)? / proxy)
        })
        .collect()
}

/// (min, max) of 𝔰/proxy over the sample grid.
pub fn curvature_band(field: &WeightField, delta: f64) -> Result<(f64, f64)> {
    let r = band_ratios(field, delta)?;
    Ok((r.iter().copied().fold(f64::INFINITY, f64::min), r.iter().copied().fold(0.0, f64::max)))
}

/// Geometric mean of 𝔰/‖Rm‖^{-1/2} on the I₁ chart with one pole at u₃ = 0.1 and δ = e^{-20}.
pub fn calibrate_curvature_proxy() -> Result<f64> {
    let field = WeightField::new(FiberType::I(1), Some(MonopoleSet::new(vec![0.1])?))?;
    let r = band_ratios(&field, (-20.0f64).exp())?;
    let mean = r.iter().map(|x| x.ln()).sum::<f64>() / r.len() as f64;
    Ok(CURVATURE_PROXY_SCALE * mean.exp())
}
