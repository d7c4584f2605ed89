//! Least-squares rate fitting.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y ≈ intercept + slope·x.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept, r2 }
}

/// Slope of log|y| against log x.
pub fn fit_power(x: &[f64], y: &[f64]) -> LineFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    fit_line(&lx, &ly)
}

/// Least squares y ≈ c_0 + Σ c_k x_k; returns (c_0, c_1, ..).
pub fn fit_affine(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = rows.len();
    let p = rows[0].len() + 1;
    let a = DMatrix::from_fn(m, p, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14).expect("svd solve").iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 3.0 * v).collect();
        let f = fit_line(&x, &y);
        assert!((f.slope + 3.0).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-13);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_law() {
        let x = [0.1, 0.01, 0.001];
        let y: Vec<f64> = x.iter().map(|v: &f64| 5.0 * v.powf(1.5)).collect();
        assert!((fit_power(&x, &y).slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn affine_two_regressors() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let y: Vec<f64> = rows.iter().map(|r| 1.0 + 2.0 * r[0] - 0.5 * r[1]).collect();
        let c = fit_affine(&rows, &y);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12 && (c[2] + 0.5).abs() < 1e-12);
    }
}
