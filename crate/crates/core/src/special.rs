//! Modified Bessel functions of the second kind and the smooth step used for cutoffs.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Integral representation K_n(x) e^x = ∫_0^∞ exp(-x(cosh t - 1)) cosh(n t) dt.
// The integrand is entire and doubly-exponentially decaying, so the plain
// trapezoid rule converges geometrically once the step resolves the peak width.
fn k_scaled(order: f64, x: f64) -> f64 {
    assert!(x > 0.0, "Bessel K requires a positive argument");
    let h = (0.5 / x.sqrt()).min(0.1);
    // Stop once x(cosh t - 1) - order t exceeds ~50 (relative 1e-22).
    let t_max = ((50.0 + 10.0 * order) / x + 1.0).acosh() + 2.0 * h;
    let n = (t_max / h).ceil() as usize;
    let mut sum = 0.5;
    for i in 1..=n {
        let t = i as f64 * h;
        // cosh t - 1 = 2 sinh^2(t/2) avoids cancellation at small t
        let s = (0.5 * t).sinh();
        sum += (-2.0 * x * s * s).exp() * (order * t).cosh();
    }
    sum * h
}

/// e^x K_0(x).
pub fn bessel_k0_scaled(x: f64) -> f64 {
    k_scaled(0.0, x)
}

/// e^x K_1(x).
pub fn bessel_k1_scaled(x: f64) -> f64 {
    k_scaled(1.0, x)
}

pub fn bessel_k0(x: f64) -> f64 {
    bessel_k0_scaled(x) * (-x).exp()
}

pub fn bessel_k1(x: f64) -> f64 {
    bessel_k1_scaled(x) * (-x).exp()
}

/// Upper bound for K_0(x), valid for x > 0.
pub fn bessel_k0_bound(x: f64) -> f64 {
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / (8.0 * x)).max(1.0)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quintic smooth step, 0 for t ≤ 0 and 1 for t ≥ 1, C² at both ends.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

pub fn smoothstep_d1(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (t - 1.0) * (t - 1.0)
    }
}

pub fn smoothstep_d2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        60.0 * t * (t - 1.0) * (2.0 * t - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    // (x, K0, K1) reference values from arbitrary-precision evaluation.
    const TABLE: [(f64, f64, f64); 5] = [
        (1e-3, 7.023_688_800_562_381, 999.996_238_156_085_6),
        (0.1, 2.427_069_024_702_016_6, 9.853_844_780_870_606),
        (1.0, 0.421_024_438_240_708_33, 0.601_907_230_197_234_6),
        (5.0, 3.691_098_334_042_594e-3, 4.044_613_445_452_164e-3),
        (30.0, 2.132_477_496_463_056_4e-14, 2.167_732_001_891_549_4e-14),
    ];

    #[test]
    fn matches_reference_values() {
        for (x, k0, k1) in TABLE {
            assert!((bessel_k0(x) / k0 - 1.0).abs() < 1e-13, "K0({x})");
            assert!((bessel_k1(x) / k1 - 1.0).abs() < 1e-13, "K1({x})");
        }
    }

    #[test]
    fn scaled_forms_survive_underflow() {
        assert!((bessel_k0_scaled(200.0) / 0.088_567_458_339_296_66 - 1.0).abs() < 1e-13);
        assert!((bessel_k1_scaled(1e4) / 0.012_533_611_351_270_506 - 1.0).abs() < 1e-12);
        assert!((bessel_k0_scaled(1e4) / 0.012_532_984_717_699_285 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_dominates() {
        for &x in &[0.05, 0.5, 2.0, 10.0, 40.0] {
            assert!(bessel_k0(x) <= bessel_k0_bound(x));
        }
    }

    #[test]
    fn smoothstep_profile() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for &t in &[0.2, 0.5, 0.9] {
            let fd = (smoothstep(t + h) - smoothstep(t - h)) / (2.0 * h);
            assert!((fd - smoothstep_d1(t)).abs() < 1e-8);
            let fd2 = (smoothstep_d1(t + h) - smoothstep_d1(t - h)) / (2.0 * h);
            assert!((fd2 - smoothstep_d2(t)).abs() < 1e-6);
        }
    }
}
