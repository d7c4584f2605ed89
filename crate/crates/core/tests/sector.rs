use k3glue_core::k3_config::{FiberType, FINITE_TYPES};
use k3glue_core::sector_analysis::*;
use k3glue_core::semi_flat::PeriodModel;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

#[test]
fn seven_pairs_exact() {
    let expected = [(1, 6, 1, 1), (1, 4, 1, 1), (1, 3, 1, 1), (1, 2, 1, 1), (2, 3, 1, 2), (3, 4, 1, 3), (5, 6, 1, 5)];
    for (a, b, ia, ib) in expected {
        let beta = Rational64::new(a, b);
        let (ladder, iota) = indicial_data(beta, beta, 3).unwrap();
        assert_eq!(iota, Rational64::new(ia, ib), "beta = {beta}");
        for (k, l) in ladder.iter().enumerate() {
            let j = k as i64 - 3;
            assert_eq!(*l, (Rational64::from_integer(j) - beta) / beta);
        }
    }
}

#[test]
fn mode_orthonormality_and_twist() {
    let spec = SectorSpec::new(0.75, 0.4, 0.5, 2.0, 5).unwrap();
    for j in -5..=5 {
        for k in -5..=5 {
            let ip = spec.coefficient(&|_, t| spec.mode(j, t), 1.0, k);
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((ip - want).norm() < 1e-12);
        }
        let tw = spec.mode(j, std::f64::consts::TAU * spec.beta) - Complex64::from_polar(1.0, std::f64::consts::TAU * spec.sigma);
        assert!(tw.norm() < 1e-12);
    }
}

#[test]
fn fit_stable_across_circle_pairs() {
    let s1 = SectorSpec::new(0.5, 0.5, 0.5, 2.0, 4).unwrap();
    let s2 = SectorSpec { r2: 3.0, ..s1 };
    let u = |r: f64, t: f64| {
        (r.powf(s1.lambda(1)) * 0.3 + r.powf(-s1.lambda(1)) * 0.7) * s1.mode(1, t) + r.powf(s1.lambda(2)) * s1.mode(2, t) * 0.2
    };
    let a = fit_expansion(u, &s1).unwrap();
    let b = fit_expansion(u, &s2).unwrap();
    for j in -4..=4 {
        let (x, y) = (a.coefficient(j).unwrap(), b.coefficient(j).unwrap());
        assert!((x.0 - y.0).norm() < 1e-6 && (x.1 - y.1).norm() < 1e-6);
    }
}

#[test]
fn liouville_flags_growth() {
    let spec = SectorSpec::new(5.0 / 6.0, 5.0 / 6.0, 0.5, 2.0, 4).unwrap();
    // j = 1 gives λ = ι = 1/5
    let u = |r: f64, t: f64| r.powf(-spec.lambda(1)) * spec.mode(1, t);
    let e = fit_expansion(u, &spec).unwrap();
    let v = liouville_check(&e, 0.1, 1.0, 1e-8);
    assert!(!v.pass && v.offending == vec![1]);
    let z = fit_expansion(|_, _| Complex64::new(0.0, 0.0), &spec).unwrap();
    assert!(liouville_check(&z, 0.1, 1.0, 1e-8).pass);
}

#[test]
fn distortion_orders_match_table() {
    let radii: Vec<f64> = (0..8).map(|k| 1e-3 * 2f64.powi(k)).collect();
    for f in FINITE_TYPES {
        let p = PeriodModel::table(f, Complex64::new(0.3, 1.1)).unwrap();
        let got = distortion_fit(&p, &radii).unwrap().lambda().unwrap();
        let want = rational_to_f64(f.distortion_order().unwrap());
        assert!((got / want - 1.0).abs() < 0.1, "{f}: {got} vs {want}");
    }
    let flat = PeriodModel::Constant { tau1: (1.0, 0.0), tau2: (0.0, 1.0) };
    assert_eq!(distortion_fit(&flat, &radii).unwrap(), DistortionFit::Flat);
    let iv = PeriodModel::KodairaIv { hexp: 2, cut: std::f64::consts::PI };
    let got = distortion_fit(&iv, &radii).unwrap().lambda().unwrap();
    assert!((got - 2.0).abs() < 1e-6);
    assert!(matches!(distortion_fit(&flat, &radii[..2]), Err(_)));
    let _ = FiberType::II;
}

proptest! {
    #[test]
    fn synthesis_analysis_round_trip(
        seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 5),
        bidx in 0usize..7,
    ) {
        let betas = [1.0 / 6.0, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 5.0 / 6.0];
        let beta = betas[bidx];
        let spec = SectorSpec::new(beta, beta, 0.7, 1.4, 6).unwrap();
        let js = [-2i64, -1, 0, 1, 2];
        let coeffs: Vec<(i64, Complex64, Complex64)> = js
            .iter()
            .zip(&seed)
            .map(|(&j, &(a, b, c, d))| (j, Complex64::new(a, b), Complex64::new(c, d)))
            .collect();
        let cc = coeffs.clone();
        let u = move |r: f64, t: f64| {
            cc.iter()
                .map(|&(j, c, cs)| {
                    let l = spec.lambda(j);
                    (c * r.powf(l) + cs * r.powf(-l)) * spec.mode(j, t)
                })
                .sum::<Complex64>()
        };
        let e = fit_expansion(u, &spec).unwrap();
        for (j, c, cs) in coeffs {
            let (a, b) = e.coefficient(j).unwrap();
            prop_assert!((a - c).norm() < 1e-8 && (b - cs).norm() < 1e-8);
        }
        for j in [-6i64, -5, -4, -3, 3, 4, 5, 6] {
            let (a, b) = e.coefficient(j).unwrap();
            prop_assert!(a.norm() < 1e-8 && b.norm() < 1e-8);
        }
    }
}
