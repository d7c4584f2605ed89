#![allow(dead_code)]

use k3glue_core::k3_config::FiberType;
use k3glue_core::lattice_greens::MonopoleSet;
use k3glue_core::scales_bubbles::{BubbleLabel, Locus, Scaling, WeightField};
use num_rational::Rational64;

pub fn i2_field() -> WeightField {
    WeightField::new(FiberType::I(2), Some(MonopoleSet::equally_spaced(2, 0.1).unwrap())).unwrap()
}

pub fn i1star_field() -> WeightField {
    WeightField::new(FiberType::IStar(1), Some(MonopoleSet::new(vec![0.25, 0.75]).unwrap())).unwrap()
}

pub fn iv_field() -> WeightField {
    WeightField::new(FiberType::IV, None).unwrap()
}

fn s(c: f64, a: f64, p: f64) -> Scaling {
    Scaling::new(c, a, p)
}

/// Probe tour with labels read off the region-by-region case analysis.
pub fn bubble_tour() -> Vec<(WeightField, Locus, BubbleLabel)> {
    use BubbleLabel::*;
    let dir = [0.6, 0.8, 0.0];
    let tilt = [0.3, 0.4, -0.5];
    let pole = |index, dist| Locus::Pole { index, dist, dir };
    let origin = |dist| Locus::Origin { dist, dir: tilt };
    let fixed = |index, dist| Locus::Fixed { index, dist, dir: [0.5, 0.5, 0.5, 0.5] };
    let alg = |dist| Locus::Alg { dist };
    let iv_alg = Alg { beta: Rational64::new(2, 3), tau: ((std::f64::consts::TAU / 3.0).cos(), (std::f64::consts::TAU / 3.0).sin()) };
    let iv_cone = Cone { beta: Rational64::new(2, 3) };
    let (a, b, c) = (i2_field(), i1star_field(), iv_field());
    vec![
        // I₂, T = 2 log 1/δ
        (a.clone(), pole(0, s(0.0, 0.0, 0.0)), TaubNut),
        (a.clone(), pole(1, s(0.25, 0.0, -1.0)), TaubNut),
        (a.clone(), pole(0, s(1.5, 0.0, -1.0)), TaubNut),
        (a.clone(), pole(1, s(1.0, 0.0, -0.5)), R3),
        (a.clone(), pole(0, s(2.0, 0.0, -0.8)), R3),
        (a.clone(), pole(1, s(0.2, 0.0, 0.0)), R2xS1),
        (a.clone(), origin(s(5.0, 0.0, 0.0)), R2xS1),
        (a.clone(), origin(s(1.0, 0.0, 1.0)), R2),
        (a.clone(), origin(s(1.0, -0.5, 0.0)), R2),
        (a.clone(), origin(s(0.05, -1.0, 0.0)), McLeanP1),
        (a, Locus::Regular { dist: s(0.5, 0.0, 0.0) }, McLeanP1),
        // I₁*, lifted poles at u₃ = 1/4, 3/4
        (b.clone(), pole(0, s(0.0, 0.0, 0.0)), TaubNut),
        (b.clone(), pole(1, s(0.5, 0.0, -1.0)), TaubNut),
        (b.clone(), pole(0, s(1.0, 0.0, -1.0 / 3.0)), R3),
        (b.clone(), pole(1, s(0.1, 0.0, 0.0)), R2xS1Z2),
        (b.clone(), origin(s(3.0, 0.0, 0.0)), R2xS1Z2),
        (b.clone(), origin(s(1.0, 0.0, 2.0)), R2Z2),
        (b.clone(), origin(s(0.1, -1.0, 0.0)), McLeanP1),
        (b.clone(), fixed(0, s(0.0, 1.0, 0.0)), EguchiHanson),
        (b.clone(), fixed(1, s(1.0, 1.0, -1.5)), EguchiHanson),
        (b.clone(), fixed(2, s(5.0, 1.0, -1.5)), EguchiHanson),
        (b.clone(), fixed(3, s(1.0, 1.0, -0.75)), R4Z2),
        (b.clone(), fixed(0, s(0.7, 1.0, -0.5)), R3xS1Z2),
        (b.clone(), fixed(1, s(1.0, 1.0, 0.0)), R3Z2),
        (b.clone(), fixed(2, s(0.014, 1.0, 0.5)), R2xS1Z2),
        // IV, β = 2/3
        (c.clone(), alg(s(0.0, 1.0, 0.0)), iv_alg.clone()),
        (c.clone(), alg(s(0.5, 1.0, 0.0)), iv_alg.clone()),
        (c.clone(), alg(s(3.0, 1.0, 0.0)), iv_alg),
        (c.clone(), alg(s(1.0, 0.9, 0.0)), iv_cone.clone()),
        (c, alg(s(1.0, 0.5, 1.0)), iv_cone),
    ]
}
