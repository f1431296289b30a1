//! Information-remnant diagnostics: AM statistics of the remaining black
//! hole, the symmetry-breaking degree `zeta`, heuristic lower bounds on
//! `eta`, and spin-coherent Q-function grids.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::eta;
use crate::error::{Error, Result};
use crate::logspace::{log_binomial, LogAccumulator};
use crate::radiation::s_sector_weights;
use crate::spectrum::{moments, BlackHoleSpec, SectorSpectrum};

/// Distribution of the up-spin count `nu` of `S_in` under `Gamma`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SinMarginal {
    pub p: Vec<f64>,
    pub mean_nu: f64,
    pub var_nu: f64,
}

pub fn sin_marginal_stats(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<SinMarginal> {
    spec.validate()?;
    spec.check_ell(ell)?;
    chi.check_matches(spec)?;
    let a = s_sector_weights(spec, chi);
    let total = spec.total() as i64;
    let l = ell as i64;
    let raw: Vec<f64> = (0..=total - l)
        .map(|nu| {
            let c_nu = log_binomial(total - l, nu);
            let acc: LogAccumulator = (nu..=nu + l)
                .map(|m| a[m as usize] * log_binomial(l, m - nu) * c_nu / log_binomial(total, m))
                .collect();
            acc.value().to_f64()
        })
        .collect();
    let z: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / z).collect();
    let mean_nu: f64 = p.iter().enumerate().map(|(nu, q)| nu as f64 * q).sum();
    let var_nu: f64 = p
        .iter()
        .enumerate()
        .map(|(nu, q)| (nu as f64 - mean_nu).powi(2) * q)
        .sum();
    Ok(SinMarginal { p, mean_nu, var_nu })
}

/// Symmetry-breaking degree of the initial black hole, `2 Var(mu)`.
pub fn zeta_initial(chi: &SectorSpectrum) -> f64 {
    let (_, dl) = moments(chi);
    2.0 * dl * dl
}

/// Mean absolute deviation of `kappa ~ Binomial(k, 1/2)` from `k/2`.
pub fn mad_kappa(k: usize) -> f64 {
    (0..=k as i64)
        .map(|kappa| {
            let q = log_binomial(k as i64, kappa).scale_pow2(-(k as f64)).to_f64();
            q * (kappa as f64 - k as f64 / 2.0).abs()
        })
        .sum()
}

/// Heuristic remnant bounds. Every bound is `inf` when it does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RemnantReport {
    pub ell: usize,
    pub eta_exact: f64,
    pub var_nu: f64,
    pub zeta: f64,
    pub mad_kappa: f64,
    pub shrink: f64,
    pub bound_exact_variance: f64,
    pub bound_branch_small_ell: f64,
    pub bound_branch_large_ell: f64,
    /// False when `zeta = 0`.
    pub applicable: bool,
}

pub fn remnant_bounds(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<RemnantReport> {
    let stats = sin_marginal_stats(spec, chi, ell)?;
    let eta_exact = eta(spec, chi, ell)?;
    let mad = mad_kappa(spec.k);
    let shrink = 1.0 - ell as f64 / spec.total() as f64;
    let a = (2.0f64 / 3.0).sqrt() * mad * shrink;
    let zeta = 2.0 * stats.var_nu;
    let ratio = |den: f64| if den > 0.0 { a / den } else { f64::INFINITY };
    Ok(RemnantReport {
        ell,
        eta_exact,
        var_nu: stats.var_nu,
        zeta,
        mad_kappa: mad,
        shrink,
        bound_exact_variance: ratio(zeta.sqrt()),
        bound_branch_small_ell: ratio(2f64.sqrt() * spec.delta_l),
        bound_branch_large_ell: ratio((ell as f64).sqrt()),
        applicable: zeta > 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QSample {
    pub x: f64,
    pub z: f64,
    pub q: f64,
}

/// Q function on a `resolution x resolution` grid over `[-1, 1]^2`,
/// row by row in `z`, keeping only points inside the unit disk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QGrid {
    pub resolution: usize,
    pub samples: Vec<QSample>,
}

/// `|<theta, phi|xi>|^2` at `x = sin(theta) cos(phi)`, `z = cos(theta)`,
/// on the `sin(phi) >= 0` branch. An up-spin pairs with `cos(theta/2)`.
/// `None` outside the unit disk.
pub fn q_value(chi: &SectorSpectrum, x: f64, z: f64) -> Option<f64> {
    if x * x + z * z > 1.0 + 1e-12 {
        return None;
    }
    let z = z.clamp(-1.0, 1.0);
    let sin_t = (1.0 - z * z).max(0.0).sqrt();
    let phi = if sin_t > 0.0 {
        (x / sin_t).clamp(-1.0, 1.0).acos()
    } else {
        0.0
    };
    let ln_c = ((1.0 + z) / 2.0).sqrt().ln();
    let ln_s = ((1.0 - z) / 2.0).sqrt().ln();
    let n = chi.n();
    let terms: Vec<(f64, usize)> = (0..=n)
        .filter_map(|mu| {
            let w = chi.log_chi(mu as i64);
            if w.is_zero() {
                return None;
            }
            let up = if mu == 0 { 0.0 } else { mu as f64 * ln_c };
            let down = if mu == n { 0.0 } else { (n - mu) as f64 * ln_s };
            let ln_mag = 0.5 * (w.ln() + log_binomial(n as i64, mu as i64).ln()) + up + down;
            (ln_mag > f64::NEG_INFINITY).then_some((ln_mag, mu))
        })
        .collect();
    let Some(max) = terms.iter().map(|t| t.0).reduce(f64::max) else {
        return Some(0.0);
    };
    let (mut re, mut im) = (0.0, 0.0);
    for (ln_mag, mu) in terms {
        let r = (ln_mag - max).exp();
        let angle = -(mu as f64) * phi;
        re += r * angle.cos();
        im += r * angle.sin();
    }
    Some((re * re + im * im) * (2.0 * max).exp())
}

pub fn q_function(spec: &BlackHoleSpec, chi: &SectorSpectrum, resolution: usize) -> Result<QGrid> {
    chi.check_matches(spec)?;
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least 8, got {resolution}"
        )));
    }
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64;
    let rows: Vec<Vec<QSample>> = (0..resolution)
        .into_par_iter()
        .map(|iz| {
            let z = coord(iz);
            (0..resolution)
                .filter_map(|ix| {
                    let x = coord(ix);
                    q_value(chi, x, z).map(|q| QSample { x, z, q })
                })
                .collect()
        })
        .collect();
    Ok(QGrid {
        resolution,
        samples: rows.into_iter().flatten().collect(),
    })
}
