use k3glue_core::gibbons_hawking::{gh_metric, gh_triple, GHChart};
use k3glue_core::lattice_greens::{HolomorphicPoly, MonopoleSet};
use k3glue_core::triple_algebra::{metric_from_triple, q_defect};
use num_complex::Complex64;
use proptest::prelude::*;

fn chart(nu: usize, k: f64) -> GHChart {
    GHChart::multi_ov(MonopoleSet::equally_spaced(nu, 0.1).unwrap(), (-k).exp(), HolomorphicPoly::zero())
}

#[test]
fn monopole_equation_fourth_order() {
    let c = chart(2, 15.0);
    let u = [0.4, -0.3, 0.55];
    let (a, b) = (c.monopole_residual4(u, 2e-2).unwrap(), c.monopole_residual4(u, 1e-2).unwrap());
    assert!(b < 1e-6);
    let ratio = a / b;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn harmonic_twist_keeps_identity() {
    let h = HolomorphicPoly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.3, -0.1), Complex64::new(0.05, 0.2)]);
    let c = GHChart::multi_ov(MonopoleSet::equally_spaced(1, 0.1).unwrap(), (-12f64).exp(), h);
    let t = gh_triple(&c).eval([0.2, 0.5, 0.3, 1.0]).unwrap();
    assert!(q_defect(&t).unwrap() < 1e-10);
    assert!(c.monopole_residual4([0.2, 0.5, 0.3], 1e-3).unwrap() < 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triple_is_hyperkahler_and_matches_metric(
        nu in 1usize..=4,
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in 0.0f64..1.0, w in 0.0f64..6.28,
    ) {
        prop_assume!(x * x + y * y > 1e-2);
        let c = chart(nu, 20.0);
        let p = [x, y, z, w];
        let t = gh_triple(&c).eval(p).unwrap();
        prop_assert!(q_defect(&t).unwrap() < 1e-6);
        let g = gh_metric(&c, p).unwrap();
        let m = metric_from_triple(&t).unwrap();
        prop_assert!((m - g).norm() <= 1e-8 * g.norm());
    }
}
