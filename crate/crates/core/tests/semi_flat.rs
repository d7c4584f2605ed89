use std::sync::Arc;

use k3glue_core::diffgeo::{fd_codifferential_1form, fd_d, hodge_star, ChartGrid, Form};
use k3glue_core::k3_config::FiberType;
use k3glue_core::semi_flat::{dplus_dstar_semiflat, semiflat_forms, BaseOneForm, PeriodModel, SemiFlatChart};
use num_complex::Complex64;

fn eta() -> BaseOneForm {
    BaseOneForm {
        f: Arc::new(|y: Complex64| {
            let yb = y.conj();
            let e = (2.0 * yb).exp();
            (y * e, e, 2.0 * y * e)
        }),
        big_f: Arc::new(|y: Complex64| {
            let yb = y.conj();
            (y * yb * yb + 0.3 * y, yb * yb + 0.3, 2.0 * y * yb)
        }),
    }
}

fn fd_errors(chart: &SemiFlatChart, y: Complex64, h: f64) -> (f64, f64) {
    let e = eta();
    let x = [y.re, y.im, 0.2, 0.7];
    let grid = ChartGrid::new(vec![-10.0; 4], vec![10.0; 4], h).unwrap();
    let cov = |p: &[f64]| e.covector(chart, Complex64::new(p[0], p[1])).unwrap().to_vec();
    let metric = |p: &[f64]| chart.metric(Complex64::new(p[0], p[1])).unwrap();
    let d = fd_d(|p| Form::one_form(&cov(p)), &grid, &x).unwrap();
    let g = metric(&x);
    let dplus = d.add(&hodge_star(&d, &g)).scale(0.5);
    let dstar = fd_codifferential_1form(cov, metric, &grid, &x).unwrap();
    let (sp, ss) = dplus_dstar_semiflat(chart, &e, y).unwrap();
    (dplus.sub(&sp).max_abs(), (dstar - ss).abs())
}

fn check_second_order(chart: SemiFlatChart, y: Complex64) {
    let (a1, b1) = fd_errors(&chart, y, 2e-3);
    let (a2, b2) = fd_errors(&chart, y, 1e-3);
    let ra = a1 / a2;
    let rb = b1 / b2;
    assert!((3.5..=4.5).contains(&ra), "d+ ratio {ra} ({a1}, {a2})");
    assert!((3.5..=4.5).contains(&rb), "d* ratio {rb} ({b1}, {b2})");
}

#[test]
fn semiflat_operators_i1() {
    check_second_order(SemiFlatChart::new(PeriodModel::inu(1), 0.5), Complex64::new(0.05, 0.03));
}

#[test]
fn semiflat_operators_iv() {
    let p = PeriodModel::table(FiberType::IV, Complex64::i()).unwrap();
    check_second_order(SemiFlatChart::new(p, 0.5), Complex64::new(0.3, 0.2));
}

#[test]
fn semiflat_forms_are_hyperkaehler_triple() {
    use k3glue_core::diffgeo::wedge;
    let chart = SemiFlatChart::new(PeriodModel::inu(2), 0.3);
    let [w, re, im] = semiflat_forms(&chart, Complex64::new(0.02, -0.01)).unwrap();
    let ww = wedge(&w, &w).comps[0];
    assert!((wedge(&re, &re).comps[0] - ww).abs() < 1e-12 * ww.abs());
    assert!((wedge(&im, &im).comps[0] - ww).abs() < 1e-12 * ww.abs());
    assert!(wedge(&w, &re).max_abs() < 1e-14);
    assert!(wedge(&re, &im).max_abs() < 1e-14);
}
