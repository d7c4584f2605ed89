use std::sync::Arc;

use k3glue_core::diffgeo::{fd_codifferential_1form, fd_d, hodge_star, ChartGrid, Form};
use k3glue_core::fit::{fit_affine, fit_line};
use k3glue_core::gibbons_hawking::{gh_metric, gh_triple, GHChart};
use k3glue_core::gluing_engine::{glue_alg, glue_inu, EhCap, DEFAULT_MU};
use k3glue_core::k3_config::{moduli_dims, validate, FiberConfig, FiberType, FINITE_TYPES};
use k3glue_core::lattice_greens::{eval_green, HolomorphicPoly, MonopoleSet};
use k3glue_core::model_spaces::AlgModel;
use k3glue_core::scales_bubbles::{curvature_band, WeightField, CURVATURE_BAND};
use k3glue_core::sector_analysis::{distortion_fit, fit_expansion, indicial_data, liouville_check, rational_to_f64, SectorSpec};
use k3glue_core::semi_flat::{dplus_dstar_semiflat, BaseOneForm, PeriodModel, SemiFlatChart};
use k3glue_core::triple_algebra::{metric_from_triple, q_defect};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{f, RateFit, Report};
use crate::scenario::{parse_rational, Kind, Params, Scenario};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Strict,
    Fast,
}

impl Profile {
    fn pick<T>(self, strict: T, fast: T) -> T {
        match self {
            Profile::Strict => strict,
            Profile::Fast => fast,
        }
    }
}

pub fn run(sc: &Scenario, profile: Profile, seed: u64) -> Result<Report, CliError> {
    let p = &sc.params;
    let mut rep = match sc.kind {
        Kind::Green => green(p)?,
        Kind::OvTriple => ov_triple(p, profile, seed)?,
        Kind::GlueInu => inu(p, profile)?,
        Kind::GlueInustar => inustar(p, profile)?,
        Kind::GlueAlg => alg(p, profile)?,
        Kind::SectorLiouville => sector(p, seed)?,
        Kind::Distortion => distortion(p)?,
        Kind::Indicial => indicial(p)?,
        Kind::Moduli => moduli(p)?,
        Kind::BubbleMap => bubbles(p)?,
        Kind::SemiflatOps => semiflat(p)?,
    };
    rep.profile = format!("{profile:?}").to_lowercase();
    rep.seed = seed;
    Ok(rep)
}

fn poles(p: &Params) -> Result<MonopoleSet, CliError> {
    MonopoleSet::new(p.pole_list()?).map_err(|e| CliError::Config(e.to_string()))
}

fn tau(p: &Params) -> Complex64 {
    let t = p.tau.unwrap_or([0.3, 1.1]);
    Complex64::new(t[0], t[1])
}

fn within(got: f64, want: f64, rel: f64) -> bool {
    (got / want - 1.0).abs() <= rel
}

fn green(p: &Params) -> Result<Report, CliError> {
    let set = poles(p)?;
    let nu = set.nu() as f64;
    let u3 = p.u3.unwrap_or(0.0);
    let radii = p.radii.clone().unwrap_or_else(|| (0..9).map(|i| 2.0 + 0.25 * i as f64).collect());
    let vals: Vec<f64> = radii
        .par_iter()
        .map(|&r| eval_green([r, 0.0, u3], &set, 1e-15).map(|g| (g.value - nu * (1.0 / r).ln()).abs()))
        .collect::<Result<_, _>>()?;
    let mut rep = Report::new("green", &["r", "abs_dev_from_log"]);
    for (r, v) in radii.iter().zip(&vals) {
        rep.row(vec![f(*r), f(*v)]);
    }
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&radii, &ys);
    rep.fits.push(RateFit { name: "decay".into(), exponent: fit.slope, r2: fit.r2, points: zip(&radii, &ys) });
    let want = -std::f64::consts::TAU;
    rep.check("decay slope", within(fit.slope, want, 0.05), format!("slope {:.5} vs {want:.5}", fit.slope));
    Ok(rep)
}

fn ov_triple(p: &Params, profile: Profile, seed: u64) -> Result<Report, CliError> {
    let delta = p.delta.unwrap_or((-20f64).exp());
    let n = p.grid.unwrap_or(profile.pick(48, 12));
    let mut chart = GHChart::multi_ov(poles(p)?, delta, HolomorphicPoly::zero());
    chart.tol = 1e-12;
    let tri = gh_triple(&chart);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fibre: Vec<f64> = (0..n * n * n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let c = |m: usize| -1.0 + 2.0 * (m as f64 + 0.5) / n as f64;
    // per u₃ slice: (kept, max |Q − Id|, max relative metric gap)
    let slices: Vec<(usize, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = (0usize, 0.0f64, 0.0f64);
            for i in 0..n {
                for j in 0..n {
                    let u = [c(i), c(j), (k as f64 + 0.5) / n as f64];
                    if !matches!(chart.monopole_residual4(u, 1e-3), Ok(r) if r <= 1e-8) {
                        continue;
                    }
                    let x = [u[0], u[1], u[2], fibre[(k * n + i) * n + j]];
                    let Ok(t) = tri.eval(x) else { continue };
                    let (Ok(q), Ok(g), Ok(m)) = (q_defect(&t), gh_metric(&chart, x), metric_from_triple(&t)) else { continue };
                    acc.0 += 1;
                    acc.1 = acc.1.max(q);
                    acc.2 = acc.2.max((m - g).norm() / g.norm());
                }
            }
            acc
        })
        .collect();
    let mut rep = Report::new("ov-triple", &["u3", "points_kept", "max_q_minus_id", "max_metric_rel_gap"]);
    let (mut kept, mut wq, mut wg) = (0, 0.0f64, 0.0f64);
    for (k, s) in slices.iter().enumerate() {
        rep.row(vec![f((k as f64 + 0.5) / n as f64), s.0.to_string(), f(s.1), f(s.2)]);
        kept += s.0;
        wq = wq.max(s.1);
        wg = wg.max(s.2);
    }
    rep.note("grid", n);
    rep.note("points_kept", kept);
    rep.check("definite triple", wq <= 1e-6, format!("sup |Q - Id| = {wq:.2e}"));
    rep.check("metric from triple", wg <= 1e-8, format!("relative gap {wg:.2e}"));
    rep.check("mask coverage", 2 * kept > n * n * n, format!("{kept} of {} points pass the residual mask", n * n * n));
    Ok(rep)
}

fn inu(p: &Params, profile: Profile) -> Result<Report, CliError> {
    let set = poles(p)?;
    let deltas = p.delta_list()?;
    let d0 = p.delta0.unwrap_or(0.1);
    let (nr, nz) = profile.pick((16, 8), (8, 4));
    let errs: Vec<f64> = deltas
        .par_iter()
        .map(|&d| glue_inu(d, set.clone(), d0).and_then(|a| a.damage_zone_log_error(nr, nz)))
        .collect::<Result<_, _>>()?;
    let mut rep = Report::new("glue-inu", &["delta", "inv_delta", "log_sup_error"]);
    let x: Vec<f64> = deltas.iter().map(|d| 1.0 / d).collect();
    for i in 0..deltas.len() {
        rep.row(vec![f(deltas[i]), f(x[i]), f(errs[i])]);
    }
    let fit = fit_line(&x, &errs);
    rep.fits.push(RateFit { name: "log error vs 1/delta".into(), exponent: fit.slope, r2: fit.r2, points: zip(&x, &errs) });
    let linear = deltas.len() < 3 || fit.r2 >= 0.99;
    rep.check("exponential law", linear && fit.slope < 0.0, format!("slope {:.4e}, R2 {:.6}", fit.slope, fit.r2));
    Ok(rep)
}

fn inustar(p: &Params, profile: Profile) -> Result<Report, CliError> {
    let deltas = p.delta_list()?;
    let es = p.e_values.clone().unwrap_or_else(|| vec![0.1, 0.2]);
    let mu = p.mu.unwrap_or(DEFAULT_MU);
    let n = profile.pick(200, 60);
    let grid: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| es.iter().map(move |&e| (d, e))).collect();
    let errs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&(d, e)| EhCap::new(d, e).and_then(|c| c.damage_zone_error(n, mu)))
        .collect::<Result<_, _>>()?;
    let mut rep = Report::new("glue-inustar", &["delta", "e", "sup_error", "weighted_error"]);
    let (mut rows, mut y) = (Vec::new(), Vec::new());
    for (&(d, e), &(plain, w)) in grid.iter().zip(&errs) {
        rep.row(vec![f(d), f(e), f(plain), f(w)]);
        rows.push(vec![d.ln(), e.ln()]);
        y.push(w.ln());
    }
    if deltas.len() < 2 || es.len() < 2 {
        return Err(CliError::Config("need at least two deltas and two e values".into()));
    }
    let c = fit_affine(&rows, &y);
    let r2 = affine_r2(&rows, &y, &c);
    let pts = |k: usize| rows.iter().zip(&y).map(|(r, v)| [r[k], *v]).collect();
    rep.fits.push(RateFit { name: "delta exponent".into(), exponent: c[1], r2, points: pts(0) });
    rep.fits.push(RateFit { name: "e exponent".into(), exponent: c[2], r2, points: pts(1) });
    let (wa, wb) = (mu + 1.0, mu + 5.0);
    rep.check("delta exponent", within(c[1], wa, 0.1), format!("{:.4} vs {wa}", c[1]));
    rep.check("e exponent", within(c[2], wb, 0.1), format!("{:.4} vs {wb}", c[2]));
    Ok(rep)
}

fn alg(p: &Params, profile: Profile) -> Result<Report, CliError> {
    let fiber = p.fiber_type()?;
    let lam = rational_to_f64(fiber.distortion_order().ok_or_else(|| CliError::Config(format!("{fiber} has no ALG model")))?);
    let ell = p.ell.unwrap_or(11.0 / 12.0);
    let t = tau(p);
    let deltas = p.delta_list()?;
    let (nr, nt, nc) = profile.pick((6, 7, 6), (4, 5, 4));
    let vals: Vec<(f64, f64)> = deltas
        .par_iter()
        .map(|&d| {
            let a = glue_alg(d, ell, AlgModel::for_fiber(fiber, t)?, PeriodModel::table(fiber, t)?, 1.0, 2.0)?;
            Ok((a.transition_error(nr, nt)?, a.core_distortion(1.0, nc)?))
        })
        .collect::<Result<_, k3glue_core::GeomError>>()?;
    let mut rep = Report::new("glue-alg", &["delta", "transition_error", "core_distortion"]);
    let x: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let (yt, yc): (Vec<f64>, Vec<f64>) = vals.iter().map(|(a, b)| (a.ln(), b.ln())).unzip();
    for (d, v) in deltas.iter().zip(&vals) {
        rep.row(vec![f(*d), f(v.0), f(v.1)]);
    }
    let ft = fit_line(&x, &yt);
    let fc = fit_line(&x, &yc);
    rep.fits.push(RateFit { name: "transition".into(), exponent: ft.slope, r2: ft.r2, points: zip(&x, &yt) });
    rep.fits.push(RateFit { name: "core distortion".into(), exponent: fc.slope, r2: fc.r2, points: zip(&x, &yc) });
    let want = (2.0 - 2.0 * ell).min(ell * lam);
    rep.check("transition exponent", within(ft.slope, want, 0.1), format!("{:.4} vs {want:.4}", ft.slope));
    rep.check("core exponent", within(fc.slope, lam, 0.1), format!("{:.4} vs {lam:.4}", fc.slope));
    Ok(rep)
}

fn sector(p: &Params, seed: u64) -> Result<Report, CliError> {
    let beta = rational_to_f64(parse_rational(p.beta.as_deref().unwrap_or("1/2"))?);
    let sigma = p.sigma.as_deref().map(parse_rational).transpose()?.map(rational_to_f64).unwrap_or(beta);
    let spec = SectorSpec::new(beta, sigma, p.r1.unwrap_or(0.7), p.r2.unwrap_or(1.4), p.jmax.unwrap_or(6))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gen = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let coeffs: Vec<(i64, Complex64, Complex64)> = (-2i64..=2).map(|j| (j, gen(), gen())).collect();
    let cc = coeffs.clone();
    let s2 = spec.clone();
    let u = move |r: f64, t: f64| cc.iter().map(|&(j, a, b)| (a * r.powf(s2.lambda(j)) + b * r.powf(-s2.lambda(j))) * s2.mode(j, t)).sum::<Complex64>();
    let e = fit_expansion(u, &spec)?;
    let mut rep = Report::new("sector-liouville", &["j", "lambda_j", "coef_plus_err", "coef_minus_err"]);
    let mut worst: f64 = 0.0;
    for (j, a, b) in &coeffs {
        let (fa, fb) = e.coefficient(*j).ok_or_else(|| CliError::Config(format!("mode {j} outside jmax")))?;
        let (ea, eb) = ((fa - a).norm(), (fb - b).norm());
        worst = worst.max(ea).max(eb);
        rep.row(vec![j.to_string(), f(spec.lambda(*j)), f(ea), f(eb)]);
    }
    rep.check("round trip", worst <= 1e-8, format!("max coefficient error {worst:.2e}"));
    let mu = p.mu.unwrap_or(0.1);
    let zero = fit_expansion(|_, _| Complex64::new(0.0, 0.0), &spec)?;
    let v = liouville_check(&zero, mu, 1.0, 1e-8);
    rep.check("decaying input fits zero", v.pass && v.max_coefficient <= 1e-8, format!("max coefficient {:.2e}", v.max_coefficient));
    Ok(rep)
}

fn distortion(p: &Params) -> Result<Report, CliError> {
    let types: Vec<FiberType> = match &p.fiber {
        Some(_) => vec![p.fiber_type()?],
        None => FINITE_TYPES.to_vec(),
    };
    let radii = p.radii.clone().unwrap_or_else(|| (0..8).map(|k| 1e-3 * 2f64.powi(k)).collect());
    let t = tau(p);
    let mut rep = Report::new("distortion", &["fiber", "lambda_fit", "lambda_expected"]);
    for ft in types {
        let want = ft.distortion_order().map(rational_to_f64);
        let got = distortion_fit(&PeriodModel::table(ft, t)?, &radii)?.lambda();
        let pass = match (got, want) {
            (Some(g), Some(w)) => within(g, w, 0.1),
            (None, None) => true,
            _ => false,
        };
        let show = |v: Option<f64>| v.map(f).unwrap_or_else(|| "flat".into());
        rep.row(vec![ft.to_string(), show(got), show(want)]);
        rep.check(&format!("lambda {ft}"), pass, format!("{} vs {}", show(got), show(want)));
    }
    Ok(rep)
}

fn indicial(p: &Params) -> Result<Report, CliError> {
    let beta = parse_rational(p.beta.as_deref().unwrap_or("1"))?;
    let sigma = p.sigma.as_deref().map(parse_rational).transpose()?.unwrap_or(beta);
    let jmax = p.jmax.unwrap_or(3);
    let (ladder, iota) = indicial_data(beta, sigma, jmax)?;
    let mut rep = Report::new("indicial", &["j", "lambda_j"]);
    for (k, l) in ladder.iter().enumerate() {
        rep.row(vec![(k as i64 - jmax).to_string(), l.to_string()]);
    }
    rep.note("iota", iota.to_string());
    if let Some(want) = &p.expect_iota {
        let want = parse_rational(want)?;
        rep.check("iota", iota == want, format!("{iota} vs {want}"));
    }
    Ok(rep)
}

fn moduli(p: &Params) -> Result<Report, CliError> {
    let spec = p.fibers.as_deref().unwrap_or_default();
    let cfg = FiberConfig::parse(spec).map_err(|e| CliError::Config(e.to_string()))?;
    let v = validate(&cfg);
    let mut rep = Report::new("moduli", &["quantity", "value"]);
    rep.check("configuration valid", v.pass, v.reasons.join("; "));
    if !v.pass {
        return Ok(rep);
    }
    let d = moduli_dims(&cfg)?;
    rep.row(vec!["dimB".into(), d.dim_b.to_string()]);
    rep.row(vec!["dimU".into(), d.dim_u.iter().sum::<i64>().to_string()]);
    rep.row(vec!["dimV".into(), d.dim_v.iter().sum::<i64>().to_string()]);
    rep.row(vec!["dimW".into(), d.dim_w.iter().sum::<i64>().to_string()]);
    rep.row(vec!["total".into(), d.total.to_string()]);
    rep.note("dimB", d.dim_b);
    rep.note("total", d.total);
    rep.check("total is 20", d.total == 20, d.total.to_string());
    if let Some(want) = p.expect_dim_b {
        rep.check("dimB", d.dim_b == want, format!("{} vs {want}", d.dim_b));
    }
    Ok(rep)
}

fn bubbles(p: &Params) -> Result<Report, CliError> {
    let fiber = p.fiber_type()?;
    let set = if p.poles.is_some() || p.nu.is_some() { Some(poles(p)?) } else { None };
    let field = WeightField::new(fiber, set)?;
    let mut rep = Report::new("bubble-map", &["probe", "label", "expected"]);
    for probe in p.probes.iter().flatten() {
        let label = field.classify_bubble(&probe.locus)?.to_string();
        let want = probe.expect.clone().unwrap_or_default();
        if !want.is_empty() {
            rep.check(&format!("probe {}", probe.name), label == want, format!("{label} vs {want}"));
        }
        rep.row(vec![probe.name.clone(), label, want]);
    }
    if let (FiberType::I(_), Some(d)) = (fiber, p.delta) {
        let (lo, hi) = curvature_band(&field, d)?;
        rep.note("band", [lo, hi]);
        rep.check("curvature band", lo >= CURVATURE_BAND.0 && hi <= CURVATURE_BAND.1, format!("[{lo:.3}, {hi:.3}]"));
    }
    Ok(rep)
}

fn semiflat(p: &Params) -> Result<Report, CliError> {
    let fiber = p.fiber_type()?;
    let periods = match fiber {
        FiberType::I(nu) => PeriodModel::inu(nu),
        _ => PeriodModel::table(fiber, tau(p))?,
    };
    let chart = SemiFlatChart::new(periods, p.delta.unwrap_or(0.5));
    let y = p.y.map(|v| Complex64::new(v[0], v[1])).unwrap_or(Complex64::new(0.05, 0.03));
    let steps = p.steps.clone().unwrap_or_else(|| vec![2e-3, 1e-3]);
    // a fixed non-holomorphic test form with all Wirtinger derivatives nonzero
    let eta = BaseOneForm {
        f: Arc::new(|y: Complex64| {
            let e = (2.0 * y.conj()).exp();
            (y * e, e, 2.0 * y * e)
        }),
        big_f: Arc::new(|y: Complex64| {
            let yb = y.conj();
            (y * yb * yb + 0.3 * y, yb * yb + 0.3, 2.0 * y * yb)
        }),
    };
    let (sp, ss) = dplus_dstar_semiflat(&chart, &eta, y)?;
    let x = [y.re, y.im, 0.2, 0.7];
    let mut errs = Vec::new();
    for &h in &steps {
        let grid = ChartGrid::new(vec![-10.0; 4], vec![10.0; 4], h)?;
        let cov = |q: &[f64]| eta.covector(&chart, Complex64::new(q[0], q[1])).map(|c| c.to_vec()).unwrap_or_else(|_| vec![f64::NAN; 4]);
        let metric = |q: &[f64]| chart.metric(Complex64::new(q[0], q[1])).unwrap_or_else(|_| nalgebra::DMatrix::from_element(4, 4, f64::NAN));
        let d = fd_d(|q| Form::one_form(&cov(q)), &grid, &x)?;
        let dplus = d.add(&hodge_star(&d, &metric(&x))).scale(0.5);
        let dstar = fd_codifferential_1form(cov, metric, &grid, &x)?;
        errs.push((dplus.sub(&sp).max_abs(), (dstar - ss).abs()));
    }
    let mut rep = Report::new("semiflat-ops", &["h", "dplus_error", "dstar_error"]);
    for (h, e) in steps.iter().zip(&errs) {
        rep.row(vec![f(*h), f(e.0), f(e.1)]);
    }
    let q = (steps[0] / steps[1]).powi(2);
    let (ra, rb) = (errs[0].0 / errs[1].0, errs[0].1 / errs[1].1);
    let ok = |r: f64| within(r, q, 0.125);
    rep.check("d+ second order", ok(ra), format!("error ratio {ra:.4}, expected {q:.2}"));
    rep.check("d* second order", ok(rb), format!("error ratio {rb:.4}, expected {q:.2}"));
    Ok(rep)
}

fn zip(x: &[f64], y: &[f64]) -> Vec<[f64; 2]> {
    x.iter().zip(y).map(|(a, b)| [*a, *b]).collect()
}

fn affine_r2(rows: &[Vec<f64>], y: &[f64], c: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (r, v) in rows.iter().zip(y) {
        let fit = c[0] + r.iter().zip(&c[1..]).map(|(a, b)| a * b).sum::<f64>();
        ss_res += (v - fit).powi(2);
        ss_tot += (v - mean).powi(2);
    }
    if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    }
}
