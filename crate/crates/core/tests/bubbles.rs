mod common;

use common::*;
use k3glue_core::gibbons_hawking::{gh_metric, GHChart};
use k3glue_core::k3_config::FiberType;
use k3glue_core::lattice_greens::{HolomorphicPoly, MonopoleSet};
use k3glue_core::scales_bubbles::*;
use k3glue_core::GeomError;

#[test]
fn tour_labels() {
    let tour = bubble_tour();
    assert_eq!(tour.len(), 30);
    for (i, (field, locus, want)) in tour.iter().enumerate() {
        assert_eq!(&field.classify_bubble(locus).unwrap(), want, "probe {i}");
    }
}

#[test]
fn tour_weights_positive() {
    for (field, locus, _) in bubble_tour() {
        for k in [10.0f64, 20.0] {
            let w = field.weight(&locus, (-k).exp()).unwrap();
            assert!(w > 0.0 && w.is_finite());
        }
    }
}

#[test]
fn closed_form_examples() {
    // monopole point of an I₁ fiber
    let f = WeightField::new(FiberType::I(1), Some(MonopoleSet::new(vec![0.1]).unwrap())).unwrap();
    let t: f64 = 15.0;
    let w = f.weight(&Locus::Pole { index: 0, dist: Scaling::constant(0.0), dir: [1.0, 0.0, 0.0] }, (-t).exp()).unwrap();
    let want = (-t).exp() / t.sqrt();
    assert!((w / want - 1.0).abs() < 1e-12);
    // regular region
    let w = f.weight(&Locus::Regular { dist: Scaling::constant(2.0) }, 1e-6).unwrap();
    assert_eq!(w, 1.0);
    // center of an Eguchi–Hanson cap
    let g = i1star_field();
    let delta = 1e-8;
    let e = (1.0 / delta as f64).ln().powf(-0.75);
    let w = g.weight(&Locus::Fixed { index: 2, dist: Scaling::constant(0.0), dir: [1.0, 0.0, 0.0, 0.0] }, delta).unwrap();
    assert!((w / (delta * e * e) - 1.0).abs() < 1e-12);
}

#[test]
fn unresolved_probes() {
    let f = i2_field();
    let far = Locus::Origin { dist: Scaling::new(1.0, -2.0, 0.0), dir: [1.0, 0.0, 0.0] };
    assert!(matches!(f.classify_bubble(&far), Err(GeomError::RegionUnresolved(_))));
    let fixed = Locus::Fixed { index: 0, dist: Scaling::constant(0.0), dir: [1.0, 0.0, 0.0, 0.0] };
    assert!(matches!(f.classify_bubble(&fixed), Err(GeomError::RegionUnresolved(_))));
    assert!(matches!(iv_field().weight(&far, 1e-3), Err(GeomError::RegionUnresolved(_))));
}

#[test]
fn global_minimum_tracks_cap_scale() {
    let g = i1star_field();
    for k in [8.0f64, 12.0, 16.0] {
        let delta = (-k).exp();
        let e = (1.0 / delta).ln().powf(-0.75);
        let mut lo = f64::INFINITY;
        for i in 0..200 {
            let r = 10f64.powf(-6.0 + 6.0 * i as f64 / 199.0);
            let x = [r * 0.6, r * 0.8, 0.3 * r, 0.0];
            lo = lo.min(g.weight_at(x, delta).unwrap());
        }
        let ratio = lo / (delta * e * e);
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn band_holds_on_ov_charts() {
    assert!((calibrate_curvature_proxy().unwrap() / CURVATURE_PROXY_SCALE - 1.0).abs() < 0.05);
    for nu in 1..=3 {
        let f = WeightField::new(FiberType::I(nu), Some(MonopoleSet::equally_spaced(nu as usize, 0.1).unwrap())).unwrap();
        for k in [10.0f64, 20.0] {
            let (lo, hi) = curvature_band(&f, (-k).exp()).unwrap();
            assert!(lo >= CURVATURE_BAND.0 && hi <= CURVATURE_BAND.1, "nu {nu}: {lo} {hi}");
        }
    }
}

/// sup |𝔰(x) − 𝔰(y)| / d_g(x, y) over nearby pairs on an I₂ chart, with d_g from δ²·g_GH.
#[test]
fn lipschitz_surrogate() {
    let f = i2_field();
    let delta = (-10.0f64).exp();
    let chart = GHChart::multi_ov(MonopoleSet::equally_spaced(2, 0.1).unwrap(), delta, HolomorphicPoly::zero());
    let mut worst: f64 = 0.0;
    for i in 0..120 {
        let r = 10f64.powf(-2.5 + 4.0 * i as f64 / 119.0);
        let th = 0.7 * i as f64;
        let x = [r * th.cos(), r * th.sin(), 0.1 - 0.2 * r.min(0.2), 0.0];
        let dx = [1e-4 * r * th.cos(), 1e-4 * r * th.sin(), 0.0, 0.0];
        let y = [x[0] + dx[0], x[1] + dx[1], x[2], x[3]];
        let g = gh_metric(&chart, x).unwrap() * (delta * delta);
        let v = nalgebra::Vector4::from(dx);
        let d = (v.transpose() * g * v)[(0, 0)].sqrt();
        let ds = (f.weight_at(x, delta).unwrap() - f.weight_at(y, delta).unwrap()).abs();
        worst = worst.max(ds / d);
    }
    assert!(worst <= 4.0, "Lipschitz constant {worst}");
}
