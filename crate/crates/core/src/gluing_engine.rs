//! Approximate hyperkähler triples near singular fibers, assembled from model
//! metrics by cutoff interpolation of primitives.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffgeo::{fd_d, two_form_norm, ChartGrid, Form};
use crate::error::{GeomError, Result};
use crate::gibbons_hawking::{gh_triple, triple_from_data, GHChart};
use crate::lattice_greens::{HolomorphicPoly, ModeSum, MonopoleSet};
use crate::model_spaces::{eh_correction, kahler_triple, AlgModel};
use crate::semi_flat::{PeriodModel, SemiFlatChart};
use crate::special::{bessel_k0_scaled, bessel_k1_scaled, gauss_legendre, smoothstep, smoothstep_d1, smoothstep_d2};
use crate::triple_algebra::{q_defect, wedge, wedge11, DefiniteTriple, TwoForm};

/// Weight exponent μ used in weighted error reports.
pub const DEFAULT_MU: f64 = 1.0 / 20.0;
/// Default ALG gluing exponent ℓ.
pub const DEFAULT_ELL: f64 = 11.0 / 12.0;

/// Orbifold parameter 𝔢 = (log 1/δ)^{−3/4}.
pub fn default_orbifold_parameter(delta: f64) -> f64 {
    (1.0 / delta).ln().powf(-0.75)
}

/// χ on [inner, outer] built from the quintic step; `rising` means χ = 0 inside and 1 outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub inner: f64,
    pub outer: f64,
    pub rising: bool,
}

impl CutoffProfile {
    pub fn rising(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(GeomError::InvalidParameter("cutoff needs 0 < inner < outer".into()));
        }
        Ok(Self { inner, outer, rising: true })
    }

    pub fn falling(inner: f64, outer: f64) -> Result<Self> {
        Ok(Self { rising: false, ..Self::rising(inner, outer)? })
    }

    fn t(&self, r: f64) -> f64 {
        (r - self.inner) / (self.outer - self.inner)
    }

    /// (χ, χ', χ'') at radius r.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let t = self.t(r);
        let w = self.outer - self.inner;
        let (v, d1, d2) = (smoothstep(t), smoothstep_d1(t) / w, smoothstep_d2(t) / (w * w));
        if self.rising {
            (v, d1, d2)
        } else {
            (1.0 - v, -d1, -d2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Core,
    DamageZone,
    Exterior,
}

// ------------------------------------------------------------------ I_ν

/// Glued triple around an I_ν fiber in Gibbons–Hawking coordinates:
/// ω = ω^OV − d(χα) with dα = ω^OV − ω^SF, χ rising across ρ ∈ [δ₀/δ, 2δ₀/δ].
#[derive(Debug, Clone)]
pub struct InuAssembly {
    pub chart: GHChart,
    pub poles: MonopoleSet,
    pub delta: f64,
    pub delta0: f64,
    pub big_t: f64,
    pub cutoff: CutoffProfile,
}

/// Oscillating parts at a base point, each multiplied by e^{sρ}:
/// ΔV = Σg_kK₀, a = Σĝ_kκρK₁ (so ΔA = a dφ), f = −Σ(g_k/κ)ρK₁ (2πα₁ = f dφ), S = Σĝ_kK₀.
#[derive(Debug, Clone, Copy)]
struct OscTerms {
    dv: f64,
    a: f64,
    f: f64,
    s: f64,
}

fn osc_terms(u: [f64; 3], poles: &MonopoleSet, shift: f64) -> Result<OscTerms> {
    let rho = u[0].hypot(u[1]);
    let modes: Vec<[f64; 5]> = if shift == 0.0 {
        ModeSum::new(u[2], rho, poles, 1e-17)?.modes
    } else {
        // modes below the leading frequency cancel identically; four modes above it are ample
        let k0 = (shift / TAU).round() as usize;
        (k0..k0 + 4)
            .map(|k| {
                let kappa = TAU * k as f64;
                let (c, s) = poles.poles().iter().fold((0.0, 0.0), |(c, s), t| {
                    let (sn, cs) = (kappa * (u[2] - t)).sin_cos();
                    (c + cs, s + sn)
                });
                [kappa, 2.0 * c, 2.0 * s / kappa, bessel_k0_scaled(kappa * rho), bessel_k1_scaled(kappa * rho)]
            })
            .collect()
    };
    let mut t = OscTerms { dv: 0.0, a: 0.0, f: 0.0, s: 0.0 };
    for m in &modes {
        let [kappa, g, gh, k0e, k1e] = *m;
        let e = (-(kappa - shift) * rho).exp();
        t.dv += g * k0e * e;
        t.a += gh * kappa * rho * k1e * e;
        t.f -= g / kappa * rho * k1e * e;
        t.s += gh * k0e * e;
    }
    Ok(t)
}

/// Frequency of the first Fourier mode whose coefficients survive cancellation between poles
/// (2πν for equally spaced poles).
fn leading_frequency(poles: &MonopoleSet) -> f64 {
    let nu = poles.nu();
    for k in 1..=nu {
        let kappa = TAU * k as f64;
        let (c, s) = poles.poles().iter().fold((0.0, 0.0), |(c, s), t| (c + (kappa * t).cos(), s + (kappa * t).sin()));
        if c.hypot(s) > 1e-9 * nu as f64 {
            return kappa;
        }
    }
    TAU * nu as f64
}

fn dphi(u: [f64; 3]) -> [f64; 4] {
    let r2 = u[0] * u[0] + u[1] * u[1];
    [-u[1] / r2, u[0] / r2, 0.0, 0.0]
}

fn scale4(v: [f64; 4], c: f64) -> [f64; 4] {
    [v[0] * c, v[1] * c, v[2] * c, v[3] * c]
}

impl OscTerms {
    fn delta_omega(&self, u: [f64; 3]) -> [TwoForm; 3] {
        triple_from_data(self.dv, scale4(dphi(u), self.a), 1.0)
    }

    fn alpha(&self, u: [f64; 3]) -> [[f64; 4]; 3] {
        let c = 1.0 / TAU;
        [scale4(dphi(u), self.f * c), [0.0, -self.s * c, 0.0, 0.0], [self.s * c, 0.0, 0.0, 0.0]]
    }
}

pub fn glue_inu(delta: f64, poles: MonopoleSet, delta0: f64) -> Result<InuAssembly> {
    if !(delta > 0.0 && delta < 1.0) || !(delta0 > 0.0) {
        return Err(GeomError::InvalidParameter("need 0 < δ < 1 and δ₀ > 0".into()));
    }
    let big_t = poles.big_t(delta);
    if big_t <= 1.0 {
        return Err(GeomError::DomainViolation(format!("T = {big_t} too small for a positive potential")));
    }
    let cutoff = CutoffProfile::rising(delta0 / delta, 2.0 * delta0 / delta)?;
    let chart = GHChart::multi_ov(poles.clone(), delta, HolomorphicPoly::zero());
    let asm = InuAssembly { chart, poles, delta, delta0, big_t, cutoff };
    asm.check_primitive()?;
    Ok(asm)
}

impl InuAssembly {
    pub fn region(&self, rho: f64) -> Region {
        if rho < self.cutoff.inner {
            Region::Core
        } else if rho > self.cutoff.outer {
            Region::Exterior
        } else {
            Region::DamageZone
        }
    }

    /// Semi-flat potential V₀ = T − ν log ρ and connection θ₀.
    pub fn semi_flat_data(&self, u: [f64; 3]) -> ([f64; 4], f64) {
        let rho = u[0].hypot(u[1]);
        let v0 = self.big_t - self.poles.nu() as f64 * rho.ln();
        let a0: f64 = self.poles.poles().iter().map(|t| u[2] - t + 0.5).sum();
        let mut th = scale4(dphi(u), a0);
        th[2] += self.chart.period_shift;
        th[3] = 1.0;
        (th, v0)
    }

    pub fn semi_flat_triple(&self, u: [f64; 3]) -> DefiniteTriple {
        let (th, v0) = self.semi_flat_data(u);
        DefiniteTriple::new(triple_from_data(v0, th, 1.0))
    }

    /// dα = ω^OV − ω^SF checked by finite differences at a reference point.
    fn check_primitive(&self) -> Result<()> {
        let u = [0.8, 0.3, 0.35];
        let h = 1e-4;
        let grid = ChartGrid::new(vec![-5.0; 4], vec![5.0; 4], h)?;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let field = |p: &[f64]| {
                let q = [p[0], p[1], p[2]];
                Form::one_form(&osc_terms(q, &self.poles, 0.0).expect("mode sum").alpha(q)[i])
            };
            let d = fd_d(field, &grid, &[u[0], u[1], u[2], 0.0])?.to_matrix();
            let want = osc_terms(u, &self.poles, 0.0)?.delta_omega(u)[i];
            for a in 0..4 {
                for b in 0..4 {
                    worst = worst.max((d[(a, b)] - want[(a, b)]).abs());
                }
            }
        }
        if worst > 1e-6 {
            return Err(GeomError::PotentialMismatch(worst));
        }
        Ok(())
    }

    /// Glued triple at p = (u₁, u₂, u₃, u₄), evaluated directly.
    pub fn triple(&self, p: [f64; 4]) -> Result<DefiniteTriple> {
        let u = [p[0], p[1], p[2]];
        let rho = u[0].hypot(u[1]);
        match self.region(rho) {
            Region::Core => gh_triple(&self.chart).eval(p),
            Region::Exterior => Ok(self.semi_flat_triple(u)),
            Region::DamageZone => {
                let ov = gh_triple(&self.chart).eval(p)?;
                let osc = osc_terms(u, &self.poles, 0.0)?;
                let (chi, chi1, _) = self.cutoff.eval(rho);
                let dw = osc.delta_omega(u);
                let al = osc.alpha(u);
                let drho = [u[0] / rho, u[1] / rho, 0.0, 0.0];
                let forms = [0, 1, 2].map(|i| ov.forms[i] - dw[i] * chi - wedge11(&drho, &al[i]) * chi1);
                Ok(DefiniteTriple::new(forms))
            }
        }
    }

    pub fn direct_defect(&self, p: [f64; 4]) -> Result<f64> {
        q_defect(&self.triple(p)?)
    }

    /// log‖Q_ω − Id‖ from the first-order expansion about ω^SF, with the e^{−2πρ} factor kept in log form.
    pub fn linearized_log_defect(&self, p: [f64; 4]) -> Result<f64> {
        let u = [p[0], p[1], p[2]];
        let rho = u[0].hypot(u[1]);
        if self.region(rho) != Region::DamageZone {
            return Err(GeomError::DomainViolation("linearization is only used in the damage zone".into()));
        }
        let sf = self.semi_flat_triple(u);
        let kappa = leading_frequency(&self.poles);
        let osc = osc_terms(u, &self.poles, kappa)?;
        let (chi, chi1, _) = self.cutoff.eval(rho);
        let dw = osc.delta_omega(u);
        let al = osc.alpha(u);
        let drho = [u[0] / rho, u[1] / rho, 0.0, 0.0];
        let pert = [0, 1, 2].map(|i| dw[i] * (1.0 - chi) - wedge11(&drho, &al[i]) * chi1);
        let q0 = 0.5 * wedge(&sf.forms[0], &sf.forms[0]);
        let mut s = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                s[(i, j)] = 0.5 * (wedge(&sf.forms[i], &pert[j]) + wedge(&pert[i], &sf.forms[j])) / q0;
            }
        }
        let tr = s.trace() / 3.0;
        let d = s - Matrix3::identity() * tr;
        Ok(-kappa * rho + d.norm().ln())
    }

    /// Sample points (u₁, u₂, u₃, 0) across the damage zone.
    pub fn damage_zone_samples(&self, n_rho: usize, n_u3: usize, n_phi: usize) -> Vec<[f64; 4]> {
        let mut out = Vec::new();
        for i in 0..n_rho {
            let t = (i as f64 + 0.5) / n_rho as f64;
            let rho = self.cutoff.inner + t * (self.cutoff.outer - self.cutoff.inner);
            for j in 0..n_phi {
                let phi = TAU * (j as f64 + 0.25) / n_phi as f64;
                for k in 0..n_u3 {
                    let u3 = k as f64 / n_u3 as f64;
                    out.push([rho * phi.cos(), rho * phi.sin(), u3, 0.0]);
                }
            }
        }
        out
    }

    /// log sup over the damage zone of ‖Q_ω − Id‖ (linearized, log domain).
    pub fn damage_zone_log_error(&self, n_rho: usize, n_u3: usize) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for p in self.damage_zone_samples(n_rho, n_u3, 2) {
            best = best.max(self.linearized_log_defect(p)?);
        }
        Ok(best)
    }
}

// ------------------------------------------------------------------ I_ν* / Eguchi–Hanson caps

/// One Eguchi–Hanson cap glued into the flat orbifold chart ℂ²/ℤ₂ near a fixed point.
///
/// Coordinates are rescaled by r₀ = 𝔢δ, so the damage zone is 1 ≤ |ζ| ≤ 2 and the
/// potential is |ζ|²/2 + χ̌·𝔢²E(|ζ|²/𝔢²) + (1 − χ̌)·c r₀² Re(ζ₁²ζ̄₂²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhCap {
    pub delta: f64,
    pub e_frak: f64,
    pub orbifold_coeff: f64,
    pub cutoff: CutoffProfile,
}

impl EhCap {
    pub fn new(delta: f64, e_frak: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0 && e_frak > 0.0 && e_frak < 1.0) {
            return Err(GeomError::InvalidParameter("EH cap needs δ, 𝔢 in (0, 1)".into()));
        }
        Ok(Self { delta, e_frak, orbifold_coeff: 1.0, cutoff: CutoffProfile::falling(1.0, 2.0)? })
    }

    pub fn r0(&self) -> f64 {
        self.e_frak * self.delta
    }

    /// Complex Hessian of the rescaled potential at ζ.
    pub fn hessian(&self, z: [Complex64; 2]) -> Matrix2<Complex64> {
        let t = z[0].norm_sqr() + z[1].norm_sqr();
        let s = t.sqrt();
        let (c0, c1s, c2s) = self.cutoff.eval(s);
        // χ̌ as a function of t = s²
        let c1 = c1s / (2.0 * s);
        let c2 = (c2s - c1s / s) / (4.0 * s * s);
        let e2 = self.e_frak * self.e_frak;
        let (ee, e1, e2d) = eh_correction(t / e2);
        let (f0, f1, f2) = (e2 * ee, e1, e2d / e2);
        let rad1 = 0.5 + c1 * f0 + c0 * f1;
        let rad2 = c2 * f0 + 2.0 * c1 * f1 + c0 * f2;
        let mut h = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                h[(i, j)] = z[i].conj() * z[j] * rad2 + if i == j { Complex64::new(rad1, 0.0) } else { 0.0.into() };
            }
        }
        // (1 − χ̌)·k·O with O = Re(ζ₁²ζ̄₂²)
        let k = self.orbifold_coeff * self.r0() * self.r0();
        let (a, b) = (z[0], z[1]);
        let o = (a * a * b.conj() * b.conj()).re;
        let od = [a * b.conj() * b.conj(), a.conj() * a.conj() * b];
        let odb = [od[0].conj(), od[1].conj()];
        let mut oh = Matrix2::zeros();
        oh[(0, 1)] = 2.0 * a * b.conj();
        oh[(1, 0)] = 2.0 * b * a.conj();
        let u0 = 1.0 - c0;
        for i in 0..2 {
            for j in 0..2 {
                let uij = -(z[i].conj() * z[j] * c2 + if i == j { Complex64::new(c1, 0.0) } else { 0.0.into() });
                let ui = -z[i].conj() * c1;
                let ujb = -z[j] * c1;
                h[(i, j)] += (uij * o + ui * odb[j] + ujb * od[i] + oh[(i, j)] * u0) * k;
            }
        }
        h
    }

    pub fn triple(&self, z: [Complex64; 2]) -> DefiniteTriple {
        kahler_triple(&self.hessian(z))
    }

    /// Sample points on 1 ≤ |ζ| ≤ 2 (deterministic quasi-random directions).
    pub fn damage_zone_samples(&self, n: usize) -> Vec<[Complex64; 2]> {
        let g = [0.754_877_666_246_692_7, 0.569_840_290_998_053_2, 0.430_159_709_001_946_8];
        (0..n)
            .map(|i| {
                let f = |k: usize| (0.5 + g[k] * (i + 1) as f64).fract();
                let s = 1.0 + f(0);
                let eta = (f(1)).sqrt().asin();
                let (p1, p2) = (TAU * f(2), TAU * (0.5 + 0.618_033_988_749_895 * i as f64).fract());
                [Complex64::from_polar(s * eta.cos(), p1), Complex64::from_polar(s * eta.sin(), p2)]
            })
            .collect()
    }

    /// (sup ‖Q_ω − Id‖, sup ‖Q_ω − Id‖·d^{μ+1}) over the damage zone, d = r₀|ζ| the distance to the fixed point.
    pub fn damage_zone_error(&self, n: usize, mu: f64) -> Result<(f64, f64)> {
        let (mut plain, mut weighted) = (0.0f64, 0.0f64);
        for z in self.damage_zone_samples(n) {
            let d = q_defect(&self.triple(z))?;
            let r = self.r0() * (z[0].norm_sqr() + z[1].norm_sqr()).sqrt();
            plain = plain.max(d);
            weighted = weighted.max(d * r.powf(mu + 1.0));
        }
        Ok((plain, weighted))
    }
}

/// ℤ₂-quotient multi-OV background with four Eguchi–Hanson caps at the lifted fixed points.
#[derive(Debug, Clone)]
pub struct InuStarAssembly {
    pub background: GHChart,
    pub poles: MonopoleSet,
    pub delta: f64,
    pub delta0: f64,
    pub caps: [EhCap; 4],
    /// Fixed points (u₁, u₂, u₃, u₄).
    pub fixed_points: [[f64; 4]; 4],
}

pub fn glue_inustar(delta: f64, poles: MonopoleSet, delta0: f64, e_frak: [f64; 4], eta0: f64) -> Result<InuStarAssembly> {
    if !poles.is_involution_symmetric() {
        return Err(GeomError::FixedPointMismatch);
    }
    for &t in poles.poles() {
        let t = t.rem_euclid(1.0);
        if t < 1e-9 || (t - 0.5).abs() < 1e-9 || t > 1.0 - 1e-9 {
            return Err(GeomError::FixedPointMismatch);
        }
    }
    let bound = eta0 / (poles.nu() as f64 * (1.0 / delta).ln()).sqrt();
    for e in e_frak {
        if !(e > 0.0) || e > bound {
            return Err(GeomError::ScaleViolation(format!("orbifold parameter {e} exceeds {bound}")));
        }
    }
    let background = GHChart::multi_ov(poles.clone(), delta, HolomorphicPoly::zero());
    let caps = [EhCap::new(delta, e_frak[0])?, EhCap::new(delta, e_frak[1])?, EhCap::new(delta, e_frak[2])?, EhCap::new(delta, e_frak[3])?];
    let fixed_points = [[0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, PI], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.5, PI]];
    Ok(InuStarAssembly { background, poles, delta, delta0, caps, fixed_points })
}

impl InuStarAssembly {
    /// Largest weighted EH damage-zone error over the four caps.
    pub fn eh_damage_zone_error(&self, n: usize, mu: f64) -> Result<f64> {
        let mut w: f64 = 0.0;
        for c in &self.caps {
            w = w.max(c.damage_zone_error(n, mu)?.1);
        }
        Ok(w)
    }
}

// ------------------------------------------------------------------ primitives

fn quadrature_panels() -> Vec<(f64, f64)> {
    // geometric panels on (0, 1] in t = r/s
    let mut v = Vec::new();
    let mut b = 1.0;
    for _ in 0..12 {
        v.push((b / 2.0, b));
        b /= 2.0;
    }
    v.push((0.0, b));
    v
}

/// η = −∫_r^∞ ι_{∂_r}ψ along rays in the y-plane of a chart (y₁, y₂, x₁, x₂), so that dη = ψ
/// for closed ψ decaying like r^{−ℵ}. The dθ component needs ℵ > 2.
pub fn radial_primitive<F>(psi: F, aleph: f64, p: [f64; 4]) -> Result<[f64; 4]>
where
    F: Fn([f64; 4]) -> TwoForm,
{
    if !(aleph > 1.0) {
        return Err(GeomError::InvalidParameter("decay order must exceed 1".into()));
    }
    let r = p[0].hypot(p[1]);
    if !(r > 0.0) {
        return Err(GeomError::NonPositiveRadius);
    }
    let (er, et) = ([p[0] / r, p[1] / r], [-p[1] / r, p[0] / r]);
    let at = |s: f64| [er[0] * s, er[1] * s, p[2], p[3]];
    // (ψ(∂_r, ê_θ), ψ(∂_r, ∂x₁), ψ(∂_r, ∂x₂)) at radius s
    let contract = |s: f64| {
        let m = psi(at(s));
        let row = |b: [f64; 4]| (0..2).map(|a| (0..4).map(|c| er[a] * m[(a, c)] * b[c]).sum::<f64>()).sum::<f64>();
        [row([et[0], et[1], 0.0, 0.0]), row([0.0, 0.0, 1.0, 0.0]), row([0.0, 0.0, 0.0, 1.0])]
    };
    let mag = |s: f64| psi(at(s)).norm();
    let (m1, m8) = (mag(r), mag(8.0 * r));
    if m1 > 0.0 && m8 > 0.0 {
        let rate = -(m8 / m1).ln() / 8f64.ln();
        if rate < aleph - 0.25 {
            return Err(GeomError::DecayViolation(format!("measured decay r^-{rate:.3}, declared r^-{aleph}")));
        }
    }
    let th_far = contract(8.0 * r)[0].abs() * 8.0 * r;
    let th_near = contract(r)[0].abs() * r;
    if aleph <= 2.0 && th_near > 0.0 && th_far > 1e-3 * th_near {
        return Err(GeomError::DecayViolation("angular component not integrable for decay order ≤ 2".into()));
    }
    let (x, w) = gauss_legendre(24);
    let mut acc = [0.0; 3];
    for (a, b) in quadrature_panels() {
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let s = r / t;
            let jac = 0.5 * (b - a) * wi * r / (t * t);
            let c = contract(s);
            // dθ coefficient uses ∂_θ = s ê_θ
            acc[0] += jac * c[0] * s;
            acc[1] += jac * c[1];
            acc[2] += jac * c[2];
        }
    }
    // η = −(acc₀ dθ + acc₁ dx₁ + acc₂ dx₂), dθ = ê_θ·dy / r
    Ok([-acc[0] * et[0] / r, -acc[0] * et[1] / r, -acc[1], -acc[2]])
}

/// Coefficient f of η^B = f dθ on the semi-flat annulus: f(r, θ) = ∫_{r₀}^r (W(se^{iθ}) − 1) s ds.
pub fn annulus_primitive(periods: &PeriodModel, r0: f64, u: Complex64) -> Result<f64> {
    let (r, th) = (u.norm(), u.arg());
    let (x, w) = gauss_legendre(24);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let s = 0.5 * (r + r0) + 0.5 * (r - r0) * xi;
        acc += 0.5 * (r - r0) * wi * (periods.w_normalized(Complex64::from_polar(s, th))? - 1.0) * s;
    }
    Ok(acc)
}

// ------------------------------------------------------------------ ALG

/// ω^C = ω^FF + d(χ·η^G + (1 − χ)·η^B) on the chart (y₁, y₂, x₁, x₂) of a sector around a
/// finite-monodromy fiber, with χ = 1 on the core |y| ≤ δ^ℓ and 0 beyond 2δ^ℓ.
#[derive(Debug, Clone)]
pub struct AlgAssembly {
    pub delta: f64,
    pub ell: f64,
    pub model: AlgModel,
    pub periods: PeriodModel,
    pub epsilon: f64,
    pub order: f64,
    pub cutoff: CutoffProfile,
    tau0: [Complex64; 2],
}

pub fn glue_alg(delta: f64, ell: f64, model: AlgModel, periods: PeriodModel, epsilon: f64, order: f64) -> Result<AlgAssembly> {
    if !(ell > 0.0 && ell < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(GeomError::InvalidParameter("need 0 < ℓ < 1 and 0 < δ < 1".into()));
    }
    if order < 2.0 {
        return Err(GeomError::DecayViolation(format!("model decay order {order} below 2")));
    }
    if periods.fiber_type() != Some(model.fiber) {
        return Err(GeomError::SectorMismatch(format!("period model does not match fiber {}", model.fiber)));
    }
    let r = delta.powf(ell);
    let cutoff = CutoffProfile::falling(r, 2.0 * r)?;
    let tau0 = model.lattice();
    Ok(AlgAssembly { delta, ell, model, periods, epsilon, order, cutoff, tau0 })
}

impl AlgAssembly {
    /// Metric of ω^FF_{δ,𝒦}: |dy|² + δ²|τ₁⁰dx₁ + τ₂⁰dx₂|².
    pub fn flat_metric(&self) -> DMatrix<f64> {
        let p = PeriodModel::Constant { tau1: (self.tau0[0].re, self.tau0[0].im), tau2: (self.tau0[1].re, self.tau0[1].im) };
        SemiFlatChart::new(p, self.delta).metric(Complex64::new(1.0, 0.0)).expect("constant periods")
    }

    /// Rescaled model perturbation Ψ*η^G = δ^{ℵ+1} ε Re(u|u|^{−ℵ} d𝒱), d𝒱 = τ₁⁰dx₁ + τ₂⁰dx₂.
    pub fn eta_g(&self, p: [f64; 4]) -> [f64; 4] {
        let u = Complex64::new(p[0], p[1]);
        let c = u * u.norm().powf(-self.order) * self.epsilon * self.delta.powf(self.order + 1.0);
        [0.0, 0.0, (c * self.tau0[0]).re, (c * self.tau0[1]).re]
    }

    /// η^B = f dθ with dη^B = (W − 1) dy₁∧dy₂ on the annulus.
    pub fn eta_b(&self, p: [f64; 4]) -> Result<[f64; 4]> {
        let u = Complex64::new(p[0], p[1]);
        let f = annulus_primitive(&self.periods, self.cutoff.inner, u)?;
        let r2 = u.norm_sqr();
        Ok([-f * p[1] / r2, f * p[0] / r2, 0.0, 0.0])
    }

    pub fn transition_one_form(&self, p: [f64; 4]) -> Result<[f64; 4]> {
        let (chi, _, _) = self.cutoff.eval(Complex64::new(p[0], p[1]).norm());
        let g = self.eta_g(p);
        let b = self.eta_b(p)?;
        Ok([0, 1, 2, 3].map(|i| chi * g[i] + (1.0 - chi) * b[i]))
    }

    /// |ω^C − ω^FF|_g at p by finite differences of the transition 1-form.
    pub fn transition_error_at(&self, p: [f64; 4]) -> Result<f64> {
        let r = p[0].hypot(p[1]);
        let grid = ChartGrid::new(vec![-1.0; 4], vec![1.0; 4], 1e-4 * r)?;
        let d = fd_d(|q| Form::one_form(&self.transition_one_form([q[0], q[1], q[2], q[3]]).expect("primitive")), &grid, &p)?;
        Ok(two_form_norm(&d.to_matrix(), &self.flat_metric()))
    }

    /// Sample points in the transition annulus on the sector chart |arg u| < πβ.
    pub fn annulus_samples(&self, n_r: usize, n_th: usize) -> Vec<[f64; 4]> {
        let mut out = Vec::new();
        let half = PI * self.model.beta;
        for i in 0..n_r {
            let r = self.cutoff.inner * (1.0 + (i as f64 + 0.5) / n_r as f64);
            for j in 0..n_th {
                let th = -half + 2.0 * half * (j as f64 + 0.5) / n_th as f64;
                out.push([r * th.cos(), r * th.sin(), 0.0, 0.0]);
            }
        }
        out
    }

    pub fn transition_error(&self, n_r: usize, n_th: usize) -> Result<f64> {
        let mut best: f64 = 0.0;
        for p in self.annulus_samples(n_r, n_th) {
            best = best.max(self.transition_error_at(p)?);
        }
        Ok(best)
    }

    /// sup of |δΩ_𝒦 − δ²Ψ*Ω^G|_g over δR/2 ≤ |u| ≤ δR on the sector chart.
    pub fn core_distortion(&self, big_r: f64, n: usize) -> Result<f64> {
        let g = self.flat_metric();
        let half = PI * self.model.beta;
        let mut best: f64 = 0.0;
        for i in 0..n {
            let r = self.delta * big_r * (0.5 + 0.5 * (i as f64 + 0.5) / n as f64);
            for j in 0..n {
                let th = -half + 2.0 * half * (j as f64 + 0.5) / n as f64;
                let u = Complex64::from_polar(r, th);
                let (t1, t2) = self.periods.tau_offset(u)?;
                let d = [t1 * self.delta, t2 * self.delta];
                // −δ((τ − τ⁰)·dx)∧dy, real and imaginary parts
                for part in 0..2 {
                    let pick = |z: Complex64, f: Complex64| if part == 0 { (z * f).re } else { (z * f).im };
                    let mut m = DMatrix::zeros(4, 4);
                    for (xi, dz) in [(2usize, d[0]), (3, d[1])] {
                        for (yi, f) in [(0usize, Complex64::new(1.0, 0.0)), (1, Complex64::i())] {
                            let v = -pick(dz, f);
                            m[(xi, yi)] += v;
                            m[(yi, xi)] -= v;
                        }
                    }
                    best = best.max(two_form_norm(&m, &g));
                }
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::{complex_hessian, fd_hessian};

    #[test]
    fn cutoff_orientation() {
        let c = CutoffProfile::rising(1.0, 2.0).unwrap();
        assert_eq!(c.eval(0.5).0, 0.0);
        assert_eq!(c.eval(2.5).0, 1.0);
        let f = CutoffProfile::falling(1.0, 2.0).unwrap();
        assert_eq!(f.eval(0.5).0, 1.0);
        assert!((c.eval(1.3).0 + f.eval(1.3).0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eh_cap_hessian_matches_fd() {
        let cap = EhCap { orbifold_coeff: 1e5, ..EhCap::new(1e-2, 0.3).unwrap() };
        let e2 = cap.e_frak * cap.e_frak;
        let k = cap.orbifold_coeff * cap.r0() * cap.r0();
        let pot = |x: &[f64]| {
            let z = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
            let t = z[0].norm_sqr() + z[1].norm_sqr();
            let c = cap.cutoff.eval(t.sqrt()).0;
            t / 2.0 + c * e2 * eh_correction(t / e2).0 + (1.0 - c) * k * (z[0] * z[0] * z[1].conj() * z[1].conj()).re
        };
        let x = [0.9, 0.4, -0.5, 0.6];
        let fd = complex_hessian(&fd_hessian(&pot, &x, 1e-4));
        let an = cap.hessian([Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])]);
        assert!((fd - an).norm() < 1e-6, "{fd} vs {an}");
    }

    #[test]
    fn radial_primitive_of_exact_form() {
        // ψ = d(r^{-2} (y₁dx₁ + y₂dx₂)/r) decays like r^{-3}
        let eta = |p: [f64; 4]| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            let r3 = r2 * r2.sqrt();
            [0.0, 0.0, p[0] / r3, p[1] / r3]
        };
        let psi = |p: [f64; 4]| {
            let h = 1e-6;
            let mut m = TwoForm::zeros();
            for a in 0..2 {
                let mut pp = p;
                let mut pm = p;
                pp[a] += h;
                pm[a] -= h;
                let (ep, em) = (eta(pp), eta(pm));
                for b in 2..4 {
                    let v = (ep[b] - em[b]) / (2.0 * h);
                    m[(a, b)] += v;
                    m[(b, a)] -= v;
                }
            }
            m
        };
        let p = [1.2, -0.7, 0.3, 0.1];
        let got = radial_primitive(psi, 2.0, p).unwrap();
        let want = eta(p);
        for i in 0..4 {
            assert!((got[i] - want[i]).abs() < 1e-8, "{got:?} vs {want:?}");
        }
    }
}
