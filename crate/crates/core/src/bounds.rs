//! Partial-decoupling recovery-error bounds.
//!
//! `theta` bounds the symmetry-invariant recovery error, `theta + eta` the
//! total one. The smoothing parameter is optimized exactly by sweeping the
//! candidate thresholds of the radiation distribution.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::{log_binomial, LogAccumulator, LogReal};
use crate::radiation::{
    candidate_thresholds, d_min_for_range, distribution_from_weights, s_sector_weights,
    RadiationDistribution,
};
use crate::spectrum::{gaussian_spectrum, BlackHoleSpec, Purity, SectorSpectrum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub spec: BlackHoleSpec,
    pub ell: usize,
    pub theta: f64,
    pub theta_clamped: f64,
    pub eta: f64,
    pub delta_inv_bound: f64,
    pub delta_tot_bound: f64,
    /// `inf` when the optimum is the empty probable set.
    pub opt_epsilon: f64,
    pub w_opt: f64,
    #[serde(skip)]
    pub d_min_opt: Option<LogReal>,
    #[serde(skip)]
    pub gamma_log: LogReal,
}

impl BoundsReport {
    /// `ln d_min` at the optimum; `NaN` for an empty probable set.
    pub fn log_d_min(&self) -> f64 {
        self.d_min_opt.map_or(f64::NAN, |d| d.ln())
    }
}

/// The `theta` part of a [`BoundsReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaReport {
    pub theta: f64,
    pub opt_epsilon: f64,
    pub w_opt: f64,
    pub d_min_opt: Option<LogReal>,
    pub gamma_log: LogReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DelayReport {
    pub delta: f64,
    pub ell_delta: Option<usize>,
    pub baseline: Option<usize>,
    pub delay: Option<i64>,
}

fn require_kind(spec: &BlackHoleSpec, kind: Purity) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::KindMismatch {
            expected: kind.to_string(),
            got: spec.kind.to_string(),
        });
    }
    Ok(())
}

fn check_inputs(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<()> {
    spec.validate()?;
    chi.check_matches(spec)?;
    spec.check_ell(ell)
}

/// Per-`n` contributions to the pure-state `gamma`, `n = 0..=ell`.
fn pure_gamma_terms(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Vec<LogReal> {
    let total = spec.total() as i64;
    let k = spec.k as i64;
    let l = ell as i64;
    let outer: Vec<LogReal> = (0..=total)
        .map(|m| {
            let acc: LogAccumulator = (0..=k)
                .map(|kappa| chi.log_chi(m - kappa).sqrt() * log_binomial(k, kappa))
                .collect();
            acc.value() / log_binomial(total, m).sqrt()
        })
        .collect();
    (0..=l)
        .map(|n| {
            let acc: LogAccumulator = (0..=total)
                .map(|m| outer[m as usize] * log_binomial(total - l, m - n))
                .collect();
            acc.value().square()
        })
        .collect()
}

/// Per-`n` contributions to the mixed-state `gamma`, `n = 0..=ell`.
///
/// The `m`-sum only visits the support `[mu, mu + k]` of `C(k, m - mu)`.
fn mixed_gamma_terms(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Vec<LogReal> {
    let total = spec.total() as i64;
    let k = spec.k as i64;
    let l = ell as i64;
    let inv_sqrt_dim: Vec<LogReal> = (0..=total)
        .map(|m| log_binomial(total, m).sqrt().recip())
        .collect();
    let mut accs = vec![LogAccumulator::new(); ell + 1];
    for mu in 0..=spec.n as i64 {
        let c = chi.log_chi(mu);
        if c.is_zero() {
            continue;
        }
        let weight = c / log_binomial(spec.n as i64, mu);
        for (n, acc) in accs.iter_mut().enumerate() {
            let n = n as i64;
            let inner: LogAccumulator = (mu..=mu + k)
                .map(|m| {
                    inv_sqrt_dim[m as usize] * log_binomial(total - l, m - n) * log_binomial(k, m - mu)
                })
                .collect();
            acc.push(weight * inner.value().square());
        }
    }
    accs.iter().map(|a| a.value()).collect()
}

fn gamma_terms(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Vec<LogReal> {
    match spec.kind {
        Purity::Pure => pure_gamma_terms(spec, chi, ell),
        Purity::Mixed => mixed_gamma_terms(spec, chi, ell),
    }
}

fn sum_members(terms: &[LogReal], members: &[usize]) -> LogReal {
    members
        .iter()
        .filter_map(|&n| terms.get(n).copied())
        .collect::<LogAccumulator>()
        .value()
}

pub fn gamma_pure(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
    members: &[usize],
) -> Result<LogReal> {
    require_kind(spec, Purity::Pure)?;
    check_inputs(spec, chi, ell)?;
    Ok(sum_members(&pure_gamma_terms(spec, chi, ell), members))
}

pub fn gamma_mixed(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
    members: &[usize],
) -> Result<LogReal> {
    require_kind(spec, Purity::Mixed)?;
    check_inputs(spec, chi, ell)?;
    Ok(sum_members(&mixed_gamma_terms(spec, chi, ell), members))
}

/// `gamma` for the spec's own kind.
pub fn gamma(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
    members: &[usize],
) -> Result<LogReal> {
    check_inputs(spec, chi, ell)?;
    Ok(sum_members(&gamma_terms(spec, chi, ell), members))
}

/// `2^(1 - k/2) sqrt(gamma) + 2 w`.
pub fn theta_candidate(k: usize, gamma: LogReal, w: f64) -> f64 {
    gamma.sqrt().scale_pow2(1.0 - k as f64 / 2.0).to_f64() + 2.0 * w
}

pub fn theta(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<ThetaReport> {
    check_inputs(spec, chi, ell)?;
    let a = s_sector_weights(spec, chi);
    let dist = distribution_from_weights(spec, &a, ell);
    Ok(theta_from(spec, &dist, &gamma_terms(spec, chi, ell)))
}

fn theta_from(spec: &BlackHoleSpec, dist: &RadiationDistribution, g: &[LogReal]) -> ThetaReport {
    let p = dist.p();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| p[i].total_cmp(&p[j]).then(i.cmp(&j)));

    // suffix[j] = gamma over order[j..]; prefix[j] = weight of order[..j].
    let mut suffix = vec![LogReal::ZERO; p.len() + 1];
    let mut acc = LogAccumulator::new();
    for j in (0..p.len()).rev() {
        acc.push(g[order[j]]);
        suffix[j] = acc.value();
    }
    let mut prefix = vec![0.0; p.len() + 1];
    for j in 0..p.len() {
        prefix[j + 1] = prefix[j] + p[order[j]];
    }

    let mut best = ThetaReport {
        theta: f64::INFINITY,
        opt_epsilon: f64::INFINITY,
        w_opt: prefix[p.len()],
        d_min_opt: None,
        gamma_log: LogReal::ZERO,
    };
    let mut best_cut = p.len();
    let mut cut = 0;
    for eps in candidate_thresholds(dist) {
        while cut < p.len() && p[order[cut]] < eps {
            cut += 1;
        }
        let t = theta_candidate(spec.k, suffix[cut], prefix[cut]);
        if t < best.theta {
            best.theta = t;
            best.opt_epsilon = eps;
            best.w_opt = prefix[cut];
            best.gamma_log = suffix[cut];
            best_cut = cut;
        }
    }
    // Empty probable set: gamma = 0, w = 1.
    let empty = 2.0 * prefix[p.len()];
    if empty < best.theta {
        best.theta = empty;
        best.opt_epsilon = f64::INFINITY;
        best.w_opt = prefix[p.len()];
        best.gamma_log = LogReal::ZERO;
        best_cut = p.len();
    }
    if best_cut < p.len() {
        let kept = &order[best_cut..];
        let lo = *kept.iter().min().unwrap();
        let hi = *kept.iter().max().unwrap();
        best.d_min_opt = Some(d_min_for_range(spec, dist.ell(), lo, hi));
    }
    best
}

/// Information remnant `eta`.
pub fn eta(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<f64> {
    check_inputs(spec, chi, ell)?;
    let a = s_sector_weights(spec, chi);
    Ok(eta_from(spec, chi, &a, ell))
}

fn eta_from(spec: &BlackHoleSpec, chi: &SectorSpectrum, a: &[LogReal], ell: usize) -> f64 {
    let total = spec.total() as i64;
    let k = spec.k as i64;
    let l = ell as i64;
    let inv_dim: Vec<LogReal> = (0..=total).map(|m| log_binomial(total, m).recip()).collect();
    // diff[kappa][m] = chi[m - kappa] - a_m, with a_m the kappa-average.
    let diff: Vec<Vec<LogReal>> = (0..=k)
        .map(|kappa| {
            (0..=total)
                .map(|m| chi.log_chi(m - kappa) - a[m as usize])
                .collect()
        })
        .collect();
    let mut outer = LogAccumulator::new();
    for nu in 0..=(total - l) {
        let c_nu = log_binomial(total - l, nu);
        for kappa in 0..=k {
            let f: LogAccumulator = (nu..=nu + l)
                .map(|m| log_binomial(l, m - nu) * inv_dim[m as usize] * diff[kappa as usize][m as usize])
                .collect();
            outer.push(f.value().abs() * c_nu * log_binomial(k, kappa));
        }
    }
    outer.value().scale_pow2(-(spec.k as f64)).to_f64()
}

pub fn recovery_bounds(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<BoundsReport> {
    check_inputs(spec, chi, ell)?;
    let a = s_sector_weights(spec, chi);
    Ok(report_from(spec, chi, &a, ell))
}

fn report_from(spec: &BlackHoleSpec, chi: &SectorSpectrum, a: &[LogReal], ell: usize) -> BoundsReport {
    let dist = distribution_from_weights(spec, a, ell);
    let t = theta_from(spec, &dist, &gamma_terms(spec, chi, ell));
    let eta = eta_from(spec, chi, a, ell);
    BoundsReport {
        spec: *spec,
        ell,
        theta: t.theta,
        theta_clamped: t.theta.min(1.0),
        eta,
        delta_inv_bound: t.theta.min(1.0),
        delta_tot_bound: (t.theta + eta).min(1.0),
        opt_epsilon: t.opt_epsilon,
        w_opt: t.w_opt,
        d_min_opt: t.d_min_opt,
        gamma_log: t.gamma_log,
    }
}

/// Reports for every `ell` in `ells`, computed in parallel, in input order.
pub fn bounds_sweep(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ells: &[usize],
) -> Result<Vec<BoundsReport>> {
    spec.validate()?;
    chi.check_matches(spec)?;
    for &ell in ells {
        spec.check_ell(ell)?;
    }
    let a = s_sector_weights(spec, chi);
    Ok(ells
        .par_iter()
        .map(|&ell| report_from(spec, chi, &a, ell))
        .collect())
}

/// Least `ell` whose clamped `theta` is at most `delta`.
pub fn first_ell_below(spec: &BlackHoleSpec, chi: &SectorSpectrum, delta: f64) -> Result<Option<usize>> {
    spec.validate()?;
    chi.check_matches(spec)?;
    if delta >= 1.0 {
        return Ok(Some(0));
    }
    let a = s_sector_weights(spec, chi);
    Ok((0..=spec.total()).into_par_iter().find_first(|&ell| {
        let dist = distribution_from_weights(spec, &a, ell);
        theta_from(spec, &dist, &gamma_terms(spec, chi, ell)).theta.min(1.0) <= delta
    }))
}

/// `ell_Delta` for `(spec, chi)` and its excess over the `L = deltaL = 0`
/// baseline with the same `N`, `k` and kind.
pub fn ell_delta(spec: &BlackHoleSpec, chi: &SectorSpectrum, delta: f64) -> Result<DelayReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("Delta must be positive, got {delta}")));
    }
    let base_spec = BlackHoleSpec {
        l: 0.0,
        delta_l: 0.0,
        ..*spec
    };
    let base_chi = gaussian_spectrum(&base_spec)?;
    let ell_delta = first_ell_below(spec, chi, delta)?;
    let baseline = first_ell_below(&base_spec, &base_chi, delta)?;
    let delay = match (ell_delta, baseline) {
        (Some(a), Some(b)) => Some(a as i64 - b as i64),
        _ => None,
    };
    Ok(DelayReport {
        delta,
        ell_delta,
        baseline,
        delay,
    })
}

/// `exp(-delta^2 d_min / 48)`, underflowing gracefully to zero.
pub fn failure_probability(d_min: LogReal, delta: f64) -> f64 {
    if delta == 0.0 || d_min.is_zero() {
        return 1.0;
    }
    let x = (2.0 * delta.abs().ln() + d_min.ln() - 48f64.ln()).exp();
    (-x).exp()
}
