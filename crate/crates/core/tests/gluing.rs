use k3glue_core::fit::{fit_affine, fit_line};
use k3glue_core::gluing_engine::{glue_alg, glue_inu, EhCap, DEFAULT_MU};
use k3glue_core::k3_config::FiberType;
use k3glue_core::lattice_greens::MonopoleSet;
use k3glue_core::model_spaces::AlgModel;
use k3glue_core::sector_analysis::rational_to_f64;
use k3glue_core::semi_flat::PeriodModel;
use num_complex::Complex64;

#[test]
fn inu_error_is_exponentially_small() {
    let poles = MonopoleSet::equally_spaced(1, 0.1).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for k in [10.0f64, 12.5, 15.0] {
        x.push(k.exp());
        y.push(glue_inu((-k).exp(), poles.clone(), 0.1).unwrap().damage_zone_log_error(8, 4).unwrap());
    }
    let f = fit_line(&x, &y);
    assert!(f.slope < 0.0 && f.r2 > 0.99, "{f:?}");
}

#[test]
fn eh_cap_exponents() {
    let (mut rows, mut y) = (Vec::new(), Vec::new());
    for k in [10.0f64, 15.0] {
        for e in [0.1, 0.15] {
            let (_, w) = EhCap::new((-k).exp(), e).unwrap().damage_zone_error(60, DEFAULT_MU).unwrap();
            rows.push(vec![-k, f64::ln(e)]);
            y.push(w.ln());
        }
    }
    let c = fit_affine(&rows, &y);
    assert!((c[1] - (1.0 + DEFAULT_MU)).abs() < 0.1, "{c:?}");
    assert!((c[2] - (5.0 + DEFAULT_MU)).abs() < 0.5, "{c:?}");
}

#[test]
fn alg_core_distortion_follows_table() {
    let tau = Complex64::new(0.3, 1.1);
    for f in [FiberType::III, FiberType::IStar(0)] {
        let lam = rational_to_f64(f.distortion_order().unwrap());
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for k in [20.0f64, 25.0] {
            let d = 10f64.powf(-k);
            let a = glue_alg(d, 11.0 / 12.0, AlgModel::for_fiber(f, tau).unwrap(), PeriodModel::table(f, tau).unwrap(), 1.0, 2.0).unwrap();
            x.push(d.ln());
            y.push(a.core_distortion(1.0, 4).unwrap().ln());
        }
        let s = fit_line(&x, &y).slope;
        assert!((s / lam - 1.0).abs() < 0.1, "{f}: {s} vs {lam}");
    }
}

#[test]
fn rejects_bad_parameters() {
    let poles = MonopoleSet::equally_spaced(1, 0.1).unwrap();
    assert!(glue_inu(2.0, poles.clone(), 0.1).is_err());
    assert!(glue_inu(0.0, poles, 0.1).is_err());
    assert!(EhCap::new(1e-5, 0.0).is_err());
}
