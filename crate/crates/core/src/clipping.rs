//! Entanglement-clipping predictor for the onset of information leakage.
//!
//! Dimension counting (`C`, `C_ini`, `ell0`) is in bits. The Gaussian
//! variance step uses natural-log derivatives of `s`, which reproduces the
//! exact hypergeometric variance `ell/4 (1 - ell/M)` at `lambda = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::log_binomial;
use crate::spectrum::{round_toward_center, BlackHoleSpec, Purity};

/// Binary entropy per spin at polarization `lambda` and its derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyDensity {
    pub lambda: f64,
    pub s_bits: f64,
    pub s_nats: f64,
    /// `ds/dlambda` in nats.
    pub s1: f64,
    /// `d^2 s/dlambda^2` in nats.
    pub s2: f64,
    /// True at `|lambda| = 1/2`, where the derivatives diverge.
    pub boundary: bool,
}

pub fn entropy_density(lambda: f64) -> Result<EntropyDensity> {
    if !(lambda.abs() <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "|lambda| must not exceed 1/2, got {lambda}"
        )));
    }
    // Evaluated at |lambda| so that the symmetry in lambda is exact.
    let a = 0.5 - lambda.abs();
    let b = 0.5 + lambda.abs();
    let xlnx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let xlog2x = |x: f64| if x == 0.0 { 0.0 } else { x * x.log2() };
    let slope = (b / a).ln();
    Ok(EntropyDensity {
        lambda,
        s_bits: -xlog2x(a) - xlog2x(b),
        s_nats: -xlnx(a) - xlnx(b),
        s1: if lambda > 0.0 { -slope } else if lambda < 0.0 { slope } else { 0.0 },
        s2: -1.0 / (a * b),
        boundary: a == 0.0 || b == 0.0,
    })
}

/// Fixed-AM sector index `K = round(lambda N + (N+k)/2)` of `S`.
pub fn sector_index(spec: &BlackHoleSpec, lambda: f64) -> i64 {
    let m = spec.total() as f64;
    round_toward_center(lambda * spec.n as f64 + m / 2.0, m / 2.0).clamp(0, spec.total() as i64)
}

/// How `H(B_in)` of a mixed black hole is assigned.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyConvention {
    /// `N s(lambda)` bits; exactly `N` at `lambda = 0`.
    #[default]
    Density,
    /// `log2 C(N, lambda N + N/2)`, the exact sector dimension.
    SectorCount,
}

impl std::str::FromStr for EntropyConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "density" => Ok(EntropyConvention::Density),
            "sector-count" | "sectorcount" => Ok(EntropyConvention::SectorCount),
            other => Err(Error::Parse(format!("unknown entropy convention {other:?}"))),
        }
    }
}

/// `H(B_in)` in bits: 0 for a pure black hole; for a mixed one, maximally
/// entangled within its sector, per `convention`.
pub fn entropy_bits(spec: &BlackHoleSpec, lambda: f64, convention: EntropyConvention) -> Result<f64> {
    let ed = entropy_density(lambda)?;
    Ok(match (spec.kind, convention) {
        (Purity::Pure, _) => 0.0,
        (Purity::Mixed, EntropyConvention::Density) => spec.n as f64 * ed.s_bits,
        (Purity::Mixed, EntropyConvention::SectorCount) => {
            let n = spec.n as f64;
            let mu = round_toward_center(lambda * n + n / 2.0, n / 2.0).clamp(0, spec.n as i64);
            log_binomial(spec.n as i64, mu).log2()
        }
    })
}

/// [`entropy_bits`] with the default convention.
pub fn default_entropy_bits(spec: &BlackHoleSpec, lambda: f64) -> Result<f64> {
    entropy_bits(spec, lambda, EntropyConvention::default())
}

/// Degree of clipping `C(H_n)` in bits. `-inf` marks an unreachable sector.
pub fn clipping_degree(spec: &BlackHoleSpec, h_bits: f64, ell: usize, n: i64, lambda: f64) -> f64 {
    let m = spec.total() as i64;
    let l = ell as i64;
    let rad = log_binomial(l, n);
    let rem = log_binomial(m - l, sector_index(spec, lambda) - n);
    if rad.is_zero() || rem.is_zero() {
        return f64::NEG_INFINITY;
    }
    h_bits + rad.log2() - rem.log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorStats {
    pub mean_n: f64,
    pub var_n_exact: f64,
    pub var_n_approx: f64,
}

/// Moments of the hypergeometric `W(n)`: `ell` draws from `N+k` spins of
/// which `K` are up. The Gaussian variance uses `s''` at the polarization
/// `K/(N+k) - 1/2` of that sector.
pub fn sector_stats(spec: &BlackHoleSpec, lambda: f64, ell: usize) -> Result<SectorStats> {
    spec.check_ell(ell)?;
    entropy_density(lambda)?;
    let m = spec.total() as f64;
    let p = sector_index(spec, lambda) as f64 / m;
    let ed = entropy_density(p - 0.5)?;
    let l = ell as f64;
    let var_n_exact = if spec.total() > 1 {
        l * p * (1.0 - p) * (m - l) / (m - 1.0)
    } else {
        0.0
    };
    Ok(SectorStats {
        mean_n: l * p,
        var_n_exact,
        var_n_approx: (1.0 - l / m) * l / ed.s2.abs(),
    })
}

/// Least `ell` whose clipping degree exceeds `k` for every integer `n` in
/// the window `|n - <n>| <= c sd(n)`, restricted to the support of `W`.
pub fn ell_hat_exact(spec: &BlackHoleSpec, lambda: f64, h_bits: f64, c: f64) -> Result<Option<usize>> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    entropy_density(lambda)?;
    let m = spec.total() as i64;
    let kk = sector_index(spec, lambda);
    let k = spec.k as f64;
    for ell in 0..=spec.total() {
        let st = sector_stats(spec, lambda, ell)?;
        let l = ell as i64;
        let lo_support = (l - (m - kk)).max(0);
        let hi_support = l.min(kk);
        let half = c * st.var_n_exact.sqrt();
        let lo = ((st.mean_n - half).ceil() as i64).max(lo_support);
        let hi = ((st.mean_n + half).floor() as i64).min(hi_support);
        let window: Vec<i64> = if lo <= hi {
            (lo..=hi).collect()
        } else {
            vec![(st.mean_n.round() as i64).clamp(lo_support, hi_support)]
        };
        if window
            .iter()
            .all(|&n| clipping_degree(spec, h_bits, ell, n, lambda) > k)
        {
            return Ok(Some(ell));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedForm {
    pub c_ini: f64,
    pub ell0: f64,
    pub ell_fl: f64,
    /// `ell0 + c ell_fl`.
    pub ell_hat_closed: f64,
    /// Root of the threshold inequality with the variance kept exact in `ell`.
    pub ell_hat_solved: f64,
    /// False when `ell0` lies outside `[0, N+k]`.
    pub in_range: bool,
}

pub fn ell_closed_form(spec: &BlackHoleSpec, lambda: f64, h_bits: f64, c: f64) -> Result<ClosedForm> {
    let ed = entropy_density(lambda)?;
    if ed.boundary {
        return Err(Error::InvalidParameter(
            "closed form needs |lambda| < 1/2".into(),
        ));
    }
    let m = spec.total() as f64;
    let k = spec.k as f64;
    let c_ini = h_bits - m * ed.s_bits;
    let ell0 = (k - c_ini) / (2.0 * ed.s_bits);
    let ratio = ed.s1.abs() / ed.s_nats;
    let ell_fl = ratio * (ell0 / ed.s2.abs() * (1.0 - ell0 / m)).max(0.0).sqrt();
    // (ell - ell0)^2 = b^2 ell (1 - ell/M), larger root.
    let b2 = (c * ratio).powi(2) / ed.s2.abs();
    let qa = 1.0 + b2 / m;
    let qb = -(2.0 * ell0 + b2);
    let qc = ell0 * ell0;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let ell_hat_solved = (-qb + disc.sqrt()) / (2.0 * qa);
    Ok(ClosedForm {
        c_ini,
        ell0,
        ell_fl,
        ell_hat_closed: ell0 + c * ell_fl,
        ell_hat_solved,
        in_range: (0.0..=m).contains(&ell0),
    })
}

/// Thermodynamic reading of the delay, with `hbar = k_B = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoQuantities {
    pub t: f64,
    pub omega: f64,
    /// `None` at `lambda = 0`.
    pub alpha: Option<f64>,
    pub omega_alpha: Option<f64>,
    /// `lambda ell_fl`.
    pub l_fl: f64,
    /// `(L/S) sqrt(|omega alpha| (1 - L0/L) |L0|)`; `None` at `lambda = 0`.
    pub l_fl_thermo: Option<f64>,
    pub l0: f64,
}

pub fn thermodynamics(spec: &BlackHoleSpec, lambda: f64, h_bits: f64, t: f64) -> Result<ThermoQuantities> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
    }
    let ed = entropy_density(lambda)?;
    let cf = ell_closed_form(spec, lambda, h_bits, 1.0)?;
    let omega = t * ed.s1;
    let l0 = lambda * cf.ell0;
    let l_fl = lambda * cf.ell_fl;
    if lambda == 0.0 {
        return Ok(ThermoQuantities {
            t,
            omega,
            alpha: None,
            omega_alpha: None,
            l_fl,
            l_fl_thermo: None,
            l0,
        });
    }
    let alpha = -ed.s1 / (ed.s2 * lambda * t);
    // T cancels in the product; evaluated without it so the result is
    // bit-identical at every temperature.
    let oa = -ed.s1 * ed.s1 / (ed.s2 * lambda);
    let n = spec.n as f64;
    let l = lambda * n;
    let s = ed.s_nats * n;
    let l_fl_thermo = l / s * (oa.abs() * (1.0 - l0 / l) * l0.abs()).max(0.0).sqrt();
    Ok(ThermoQuantities {
        t,
        omega,
        alpha: Some(alpha),
        omega_alpha: Some(oa),
        l_fl,
        l_fl_thermo: Some(l_fl_thermo),
        l0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClippingReport {
    pub lambda: f64,
    pub c: f64,
    pub h_bits: f64,
    pub ell_hat_exact: Option<usize>,
    pub closed: ClosedForm,
    /// Moments of `W(n)` at `ell_hat_exact`, or at `round(ell0)` if unreached.
    pub stats: SectorStats,
    pub thermo: ThermoQuantities,
}

pub fn clipping_report(
    spec: &BlackHoleSpec,
    lambda: f64,
    h_bits: f64,
    c: f64,
    t: f64,
) -> Result<ClippingReport> {
    let ell_hat = ell_hat_exact(spec, lambda, h_bits, c)?;
    let closed = ell_closed_form(spec, lambda, h_bits, c)?;
    let at = ell_hat.unwrap_or_else(|| closed.ell0.round().clamp(0.0, spec.total() as f64) as usize);
    Ok(ClippingReport {
        lambda,
        c,
        h_bits,
        ell_hat_exact: ell_hat,
        closed,
        stats: sector_stats(spec, lambda, at)?,
        thermo: thermodynamics(spec, lambda, h_bits, t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(n: usize, k: usize) -> BlackHoleSpec {
        BlackHoleSpec::new(n, k, 0.0, 0.0, Purity::Pure).unwrap()
    }

    #[test]
    fn entropy_density_values() {
        let e = entropy_density(0.0).unwrap();
        assert_eq!(e.s_bits, 1.0);
        assert_eq!(e.s1, 0.0);
        assert_eq!(e.s2, -4.0);
        let q = entropy_density(0.25).unwrap();
        assert!((q.s_bits - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!((q.s_nats - q.s_bits * std::f64::consts::LN_2).abs() < 1e-15);
        let edge = entropy_density(0.5).unwrap();
        assert_eq!(edge.s_bits, 0.0);
        assert!(edge.boundary);
        assert!(entropy_density(0.6).is_err());
    }

    #[test]
    fn analytic_thresholds() {
        let spec = pure(300, 3);
        let cf = ell_closed_form(&spec, 0.0, 0.0, 2.6).unwrap();
        assert_eq!(cf.ell0, 153.0);
        assert_eq!(cf.ell_fl, 0.0);
        let mixed = BlackHoleSpec { kind: Purity::Mixed, ..spec };
        let cf = ell_closed_form(&mixed, 0.0, 300.0, 2.6).unwrap();
        assert_eq!(cf.ell0, 3.0);
    }

    #[test]
    fn symmetric_point_mean() {
        let spec = pure(300, 4);
        let st = sector_stats(&spec, 0.0, 100).unwrap();
        assert_eq!(st.mean_n, 50.0);
    }

    #[test]
    fn no_radiation_degree_is_initial_clipping() {
        let spec = pure(300, 3);
        let c = clipping_degree(&spec, 0.0, 0, 0, 0.1);
        let kk = sector_index(&spec, 0.1);
        assert!((c + log_binomial(303, kk).log2()).abs() < 1e-12);
        assert_eq!(clipping_degree(&spec, 0.0, 5, 6, 0.1), f64::NEG_INFINITY);
    }

    #[test]
    fn thermo_product_is_temperature_free() {
        let spec = pure(300, 3);
        let a = thermodynamics(&spec, 0.25, 0.0, 1.0).unwrap();
        let b = thermodynamics(&spec, 0.25, 0.0, 2.0).unwrap();
        assert_eq!(a.omega_alpha, b.omega_alpha);
        let z = thermodynamics(&spec, 0.0, 0.0, 1.0).unwrap();
        assert!(z.alpha.is_none());
        assert_eq!(z.l_fl, 0.0);
    }

    #[test]
    fn small_c_recovers_no_symmetry_thresholds() {
        let spec = pure(300, 3);
        let l = ell_hat_exact(&spec, 0.0, 0.0, 1e-6).unwrap().unwrap() as f64;
        assert!((l - 153.0).abs() <= 1.0, "pure threshold {l}");
        let mixed = BlackHoleSpec { kind: Purity::Mixed, ..spec };
        let l = ell_hat_exact(&mixed, 0.0, 300.0, 1e-6).unwrap().unwrap() as f64;
        assert!((l - 3.0).abs() <= 1.0, "mixed threshold {l}");
    }
}
