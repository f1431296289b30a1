//! Least-squares fits of delay against black-hole size.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// `y = a x^p`, fitted linearly in `ln y` against `ln x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLaw {
    pub a: f64,
    pub p: f64,
    /// Coefficient of determination in log space.
    pub r2: f64,
    /// Points used; non-positive `y` cannot enter a log fit.
    pub points: usize,
}

/// `y = a x + b sqrt(x) + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mixed {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms: f64,
}

/// Solves `min |X beta - y|` by SVD.
fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    x.clone().svd(true, true).solve(y, 1e-12).ok()
}

pub fn power_law(xs: &[f64], ys: &[f64]) -> Option<PowerLaw> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 || pts.iter().all(|p| p.0 == pts[0].0) {
        return None;
    }
    let x = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let beta = least_squares(&x, &y)?;
    let resid = &x * &beta - &y;
    let mean = y.mean();
    let total: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = if total > 0.0 { 1.0 - resid.norm_squared() / total } else { 1.0 };
    Some(PowerLaw {
        a: beta[0].exp(),
        p: beta[1],
        r2,
        points: pts.len(),
    })
}

pub fn mixed(xs: &[f64], ys: &[f64]) -> Option<Mixed> {
    if xs.len() < 3 || xs.len() != ys.len() || xs.iter().any(|&x| x < 0.0) {
        return None;
    }
    let x = DMatrix::from_fn(xs.len(), 3, |i, j| match j {
        0 => xs[i],
        1 => xs[i].sqrt(),
        _ => 1.0,
    });
    let y = DVector::from_column_slice(ys);
    let beta = least_squares(&x, &y)?;
    let rms = ((&x * &beta - &y).norm_squared() / xs.len() as f64).sqrt();
    Some(Mixed {
        a: beta[0],
        b: beta[1],
        c: beta[2],
        rms,
    })
}
