//! Green's function of the multi-pole Laplacian on ℝ²×S¹ (circle of length 1).
//!
//! Two representations are provided: a Fourier–Bessel mode sum, accurate away
//! from the axis, and a regularized image-charge sum, accurate near it.

use std::f64::consts::{LN_2, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::special::{bessel_k0_bound, bessel_k0_scaled, bessel_k1_scaled, EULER_GAMMA};

/// Poles p_i = (0, 0, t_i) on the axis of ℝ²×S¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonopoleSet {
    poles: Vec<f64>,
}

impl MonopoleSet {
    pub fn new(poles: Vec<f64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(GeomError::InvalidParameter("at least one pole required".into()));
        }
        let poles: Vec<f64> = poles.into_iter().map(|t| t.rem_euclid(1.0)).collect();
        for i in 0..poles.len() {
            for j in 0..i {
                if circle_dist(poles[i], poles[j]) < 1e-12 {
                    return Err(GeomError::InvalidParameter("coincident poles".into()));
                }
            }
        }
        Ok(Self { poles })
    }

    /// ν equally spaced poles starting at `offset`.
    pub fn equally_spaced(nu: usize, offset: f64) -> Result<Self> {
        Self::new((0..nu).map(|i| offset + i as f64 / nu as f64).collect())
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn nu(&self) -> usize {
        self.poles.len()
    }

    /// T = −ν log δ.
    pub fn big_t(&self, delta: f64) -> f64 {
        -(self.nu() as f64) * delta.ln()
    }

    /// Half the minimal circle distance between distinct poles (or to the pole's own image).
    pub fn iota0(&self) -> f64 {
        let mut m: f64 = 1.0;
        for i in 0..self.nu() {
            for j in 0..i {
                m = m.min(circle_dist(self.poles[i], self.poles[j]));
            }
        }
        0.5 * m
    }

    /// Invariance under t ↦ −t, the axis restriction of the involution u ↦ −u.
    pub fn is_involution_symmetric(&self) -> bool {
        self.poles
            .iter()
            .all(|&t| self.poles.iter().any(|&s| circle_dist(s, -t) < 1e-12))
    }
}

pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Offset reduced to [−½, ½).
pub(crate) fn reduce(s: f64) -> f64 {
    s - (s + 0.5).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    ImageSum,
    FourierBessel,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreensEval {
    pub value: f64,
    pub gradient: [f64; 3],
    pub representation_used: Representation,
    pub truncation_error_bound: f64,
}

/// Radius below which the image sum is used.
pub const SWITCH_RADIUS: f64 = 0.25;

const MAX_MODES: usize = 200_000;
const MAX_IMAGES: usize = 20_000;

/// G_ν at `point`, choosing the representation by distance to the axis.
pub fn eval_green(point: [f64; 3], poles: &MonopoleSet, tol: f64) -> Result<GreensEval> {
    let rho = point[0].hypot(point[1]);
    let rep = if rho >= SWITCH_RADIUS { Representation::FourierBessel } else { Representation::ImageSum };
    eval_green_with(point, poles, tol, rep)
}

pub fn eval_green_with(
    point: [f64; 3],
    poles: &MonopoleSet,
    tol: f64,
    rep: Representation,
) -> Result<GreensEval> {
    if !(tol > 0.0) {
        return Err(GeomError::InvalidParameter("tol must be positive".into()));
    }
    let rho = point[0].hypot(point[1]);
    for &t in poles.poles() {
        if rho.hypot(reduce(point[2] - t)) < 1e-12 {
            return Err(GeomError::PoleHit);
        }
    }
    match rep {
        Representation::FourierBessel => fourier_bessel(point, poles, tol),
        Representation::ImageSum => {
            let c = image_sum_constant();
            let mut value = 0.0;
            let mut grad = [0.0; 3];
            let mut bound = 0.0;
            for &t in poles.poles() {
                let (v, g, b) = image_sum_single(point, t, tol / poles.nu() as f64)?;
                value += v + c;
                for a in 0..3 {
                    grad[a] += g[a];
                }
                bound += b;
            }
            Ok(GreensEval { value, gradient: grad, representation_used: rep, truncation_error_bound: bound })
        }
    }
}

/// Mode data for G − ν log(1/ρ) = Σ_k g_k(u₃) K₀(2πkρ).
///
/// Each entry is (κ, g_k, ĝ_k, e^{κρ}K₀(κρ), e^{κρ}K₁(κρ)) with
/// g_k = 2Σ cos κ(u₃−t_i) and ĝ_k = 2Σ sin κ(u₃−t_i)/κ, so that ĝ_k' = g_k.
#[derive(Debug, Clone)]
pub struct ModeSum {
    pub rho: f64,
    pub modes: Vec<[f64; 5]>,
    pub tail_bound: f64,
}

impl ModeSum {
    pub fn new(u3: f64, rho: f64, poles: &MonopoleSet, tol: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(GeomError::DomainViolation("mode sum needs rho > 0".into()));
        }
        let nu = poles.nu() as f64;
        let geo = 1.0 / (1.0 - (-TAU * rho).exp());
        let mut modes = Vec::new();
        let mut k = 1usize;
        loop {
            let kappa = TAU * k as f64;
            let x = kappa * rho;
            let (mut c, mut s) = (0.0, 0.0);
            for &t in poles.poles() {
                let (sn, cs) = (kappa * (u3 - t)).sin_cos();
                c += cs;
                s += sn;
            }
            modes.push([kappa, 2.0 * c, 2.0 * s / kappa, bessel_k0_scaled(x), bessel_k1_scaled(x)]);
            // tail of value and of κ-weighted gradient terms
            let xn = TAU * (k + 1) as f64 * rho;
            let tail = 2.0 * nu * bessel_k0_bound(xn) * geo * (1.0 + xn / rho) * (1.0 + 1.0 / xn);
            if tail <= tol {
                return Ok(Self { rho, modes, tail_bound: tail });
            }
            k += 1;
            if k > MAX_MODES {
                return Err(GeomError::ToleranceUnreachable(tol));
            }
        }
    }

    /// Σ g_k K₀(κρ) and its (ρ, u₃) derivatives.
    pub fn oscillating(&self) -> (f64, f64, f64) {
        let (mut v, mut dr, mut d3) = (0.0, 0.0, 0.0);
        for m in &self.modes {
            let [kappa, g, gh, k0e, k1e] = *m;
            let e = (-kappa * self.rho).exp();
            v += g * k0e * e;
            dr -= g * kappa * k1e * e;
            d3 -= kappa * kappa * gh * k0e * e;
        }
        (v, dr, d3)
    }
}

fn fourier_bessel(point: [f64; 3], poles: &MonopoleSet, tol: f64) -> Result<GreensEval> {
    let rho = point[0].hypot(point[1]);
    let ms = ModeSum::new(point[2], rho, poles, tol)?;
    let nu = poles.nu() as f64;
    let (osc, dr, d3) = ms.oscillating();
    let value = -nu * rho.ln() + osc;
    let drho = -nu / rho + dr;
    Ok(GreensEval {
        value,
        gradient: [drho * point[0] / rho, drho * point[1] / rho, d3],
        representation_used: Representation::FourierBessel,
        truncation_error_bound: ms.tail_bound,
    })
}

// Uncalibrated image sum for one pole at height t:
//   1/(2R_0) + Σ_{n≠0} (1/(2R_n) − 1/(2|n|)),
// with the tail n > N replaced by its midpoint-rule integral plus the first
// Euler–Maclaurin correction.
fn image_sum_single(point: [f64; 3], t: f64, tol: f64) -> Result<(f64, [f64; 3], f64)> {
    let rho = point[0].hypot(point[1]);
    let s = reduce(point[2] - t);
    let r2 = rho * rho;
    let c = s * s + r2;
    // budget from the worst case over the image-sum regime, so that the
    // truncation does not jump between neighbouring points
    let c_max = c.max(0.25 + SWITCH_RADIUS * SWITCH_RADIUS);
    let n_max = ((0.25 * c_max / tol).powf(1.0 / 6.0).ceil() as usize).max(8);
    if n_max > MAX_IMAGES {
        return Err(GeomError::ToleranceUnreachable(tol));
    }
    let r0 = (r2 + s * s).sqrt();
    let mut v = 0.5 / r0;
    // derivatives in (ρ, s)
    let mut dr = -0.5 * rho / (r0 * r0 * r0);
    let mut ds = -0.5 * s / (r0 * r0 * r0);
    for n in 1..=n_max {
        let nf = n as f64;
        let (a, b) = (s - nf, s + nf);
        let ra = (r2 + a * a).sqrt();
        let rb = (r2 + b * b).sqrt();
        v += 0.5 / ra + 0.5 / rb - 1.0 / nf;
        let (ra3, rb3) = (ra * ra * ra, rb * rb * rb);
        dr -= 0.5 * rho * (1.0 / ra3 + 1.0 / rb3);
        ds -= 0.5 * (a / ra3 + b / rb3);
    }
    let m = n_max as f64 + 0.5;
    let (a, b) = (m - s, m + s);
    let ra = (r2 + a * a).sqrt();
    let rb = (r2 + b * b).sqrt();
    // ∫_M^∞ f = ln 2 + ln M − ½ ln(a+R_a) − ½ ln(b+R_b); the ln ρ pieces cancel
    v += LN_2 + m.ln() - 0.5 * (a + ra).ln() - 0.5 * (b + rb).ln();
    dr -= 0.5 * rho / (ra * (a + ra)) + 0.5 * rho / (rb * (b + rb));
    ds += 0.5 / ra - 0.5 / rb;
    // + f'(M)/24 with f'(x) = −½(a/R_a³ + b/R_b³) + 1/x²
    let (ra3, rb3) = (ra * ra * ra, rb * rb * rb);
    let (ra5, rb5) = (ra3 * ra * ra, rb3 * rb * rb);
    v += (-0.5 * (a / ra3 + b / rb3) + 1.0 / (m * m)) / 24.0;
    dr += (1.5 * rho * (a / ra5 + b / rb5)) / 24.0;
    ds += (-0.5 * (-(1.0 / ra3 - 3.0 * a * a / ra5) + (1.0 / rb3 - 3.0 * b * b / rb5))) / 24.0;
    let grad = if rho > 0.0 {
        [dr * point[0] / rho, dr * point[1] / rho, ds]
    } else {
        [0.0, 0.0, ds]
    };
    Ok((v, grad, 0.25 * c / m.powi(6)))
}

/// Additive constant of the image sum, fixed by requiring the S¹-average of
/// G − ν log(1/ρ) to vanish.
pub fn calibrate_image_constant() -> f64 {
    let rho = 1.0;
    let n = 64;
    let mut mean = 0.0;
    for i in 0..n {
        let u3 = i as f64 / n as f64;
        let (v, _, _) = image_sum_single([rho, 0.0, u3], 0.0, 1e-15).expect("calibration");
        mean += v;
    }
    mean /= n as f64;
    -(mean + rho.ln())
}

/// Cached calibration constant (numerically equal to γ − ln 2).
pub fn image_sum_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(calibrate_image_constant)
}

/// Closed form of the calibration constant, used as a test oracle.
pub fn image_sum_constant_closed_form() -> f64 {
    EULER_GAMMA - LN_2
}

/// Polynomial h(y) = Σ c_n yⁿ standing in for the holomorphic correction of the period.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicPoly {
    /// Coefficients as (re, im) pairs, lowest degree first.
    pub coeffs: Vec<(f64, f64)>,
}

impl HolomorphicPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs: coeffs.into_iter().map(|c| (c.re, c.im)).collect() }
    }

    fn c(&self, n: usize) -> Complex64 {
        let (re, im) = self.coeffs[n];
        Complex64::new(re, im)
    }

    pub fn eval(&self, y: Complex64) -> Complex64 {
        (0..self.coeffs.len()).rev().fold(Complex64::new(0.0, 0.0), |acc, n| acc * y + self.c(n))
    }

    pub fn derivative(&self, y: Complex64) -> Complex64 {
        (1..self.coeffs.len()).rev().fold(Complex64::new(0.0, 0.0), |acc, n| acc * y + self.c(n) * n as f64)
    }

    /// Primitive of w ↦ h(δw), vanishing at 0.
    pub fn scaled_primitive(&self, delta: f64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (0..self.coeffs.len()).rev() {
            acc = acc * w + self.c(n) * delta.powi(n as i32) / (n as f64 + 1.0);
        }
        acc * w
    }

    /// Whether h(−y) = h(y).
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&(a, b)| a == 0.0 && b == 0.0)
    }
}

/// V_T = T + G + 2π Im h(δ(u₁+iu₂)) on the domain |δ(u₁+iu₂)| ≤ 2δ₀.
pub fn eval_potential_v(
    point: [f64; 3],
    poles: &MonopoleSet,
    big_t: f64,
    h: &HolomorphicPoly,
    delta: f64,
    delta0: f64,
) -> Result<f64> {
    let w = Complex64::new(point[0], point[1]);
    if delta * w.norm() > 2.0 * delta0 {
        return Err(GeomError::DomainViolation(format!("|δw| = {:e} exceeds 2δ₀", delta * w.norm())));
    }
    let g = eval_green(point, poles, 1e-12)?;
    Ok(big_t + g.value + TAU * h.eval(w * delta).im)
}

/// Used by tests and benches: uniform average of a function over the circle.
pub fn fiber_mean(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    (0..n).map(|i| f(i as f64 / n as f64)).sum::<f64>() / n as f64
}
