use k3glue_core::lattice_greens::{eval_green, eval_green_with, fiber_mean, MonopoleSet, Representation, SWITCH_RADIUS};
use proptest::prelude::*;

fn poles() -> MonopoleSet {
    MonopoleSet::new(vec![0.1, 0.35, 0.72]).unwrap()
}

fn g(p: [f64; 3]) -> f64 {
    eval_green(p, &poles(), 1e-15).unwrap().value
}

#[test]
fn harmonic_off_poles() {
    let h = 2.5e-4;
    for p in [[0.3, 0.1, 0.5], [0.9, -0.4, 0.2], [0.2, 0.2, 0.0]] {
        let mut lap = -6.0 * g(p);
        for i in 0..3 {
            let (mut a, mut b) = (p, p);
            a[i] += h;
            b[i] -= h;
            lap += g(a) + g(b);
        }
        assert!((lap / (h * h)).abs() < 1e-4, "{p:?}: {}", lap / (h * h));
    }
}

#[test]
fn gradient_matches_fd() {
    let h = 1e-5;
    for p in [[0.4, 0.1, 0.6], [0.15, -0.05, 0.3]] {
        let e = eval_green(p, &poles(), 1e-15).unwrap();
        for i in 0..3 {
            let (mut a, mut b) = (p, p);
            a[i] += h;
            b[i] -= h;
            let fd = (g(a) - g(b)) / (2.0 * h);
            assert!((fd - e.gradient[i]).abs() < 1e-7, "{p:?} axis {i}");
        }
    }
}

#[test]
fn zero_fiber_mean_of_oscillation() {
    for r in [1.0, 2.5] {
        let m = fiber_mean(|t| g([r, 0.0, t]) - 3.0 * (1.0 / r).ln(), 64);
        assert!(m.abs() < 1e-10, "r={r}: {m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representations_agree(r in 0.05f64..1.2, phi in 0.0f64..6.28, t in 0.0f64..1.0) {
        let p = [r * phi.cos(), r * phi.sin(), t];
        let a = eval_green_with(p, &poles(), 1e-14, Representation::ImageSum).unwrap().value;
        let b = eval_green_with(p, &poles(), 1e-14, Representation::FourierBessel).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn periodic_and_rotation_invariant(r in 0.3f64..2.0, phi in 0.0f64..6.28, t in 0.0f64..1.0) {
        let base = g([r, 0.0, t]);
        prop_assert!((g([r * phi.cos(), r * phi.sin(), t]) - base).abs() < 1e-11);
        prop_assert!((g([r, 0.0, t + 1.0]) - base).abs() < 1e-11);
    }

    #[test]
    fn switch_is_continuous(t in 0.0f64..1.0) {
        let a = g([SWITCH_RADIUS * (1.0 - 1e-9), 0.0, t]);
        let b = g([SWITCH_RADIUS * (1.0 + 1e-9), 0.0, t]);
        prop_assert!((a - b).abs() < 1e-8);
    }
}
