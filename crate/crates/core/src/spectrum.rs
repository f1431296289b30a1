//! Black-hole parameters and the sector weight profile `chi[mu]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, LogReal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

impl fmt::Display for Purity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Purity::Pure => "pure",
            Purity::Mixed => "mixed",
        })
    }
}

impl FromStr for Purity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pure" => Ok(Purity::Pure),
            "mixed" => Ok(Purity::Mixed),
            other => Err(Error::Parse(format!("unknown kind {other:?}"))),
        }
    }
}

/// How `delta_l` enters the Gaussian profile.
///
/// `StdDev` uses `exp(-x^2 / (2 dL^2))`, so `dL` is the standard deviation
/// of the sampled profile. `Literal` uses `exp(-x^2 / dL^2)`, whose standard
/// deviation is `dL / sqrt(2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthConvention {
    #[default]
    StdDev,
    Literal,
}

impl FromStr for WidthConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stddev" | "std" => Ok(WidthConvention::StdDev),
            "literal" => Ok(WidthConvention::Literal),
            other => Err(Error::Parse(format!("unknown width convention {other:?}"))),
        }
    }
}

/// Protocol parameters. `l` and `delta_l` are in spin-1/2 units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackHoleSpec {
    pub n: usize,
    pub k: usize,
    pub l: f64,
    pub delta_l: f64,
    pub kind: Purity,
    #[serde(default)]
    pub width: WidthConvention,
}

impl BlackHoleSpec {
    pub fn new(n: usize, k: usize, l: f64, delta_l: f64, kind: Purity) -> Result<Self> {
        let spec = BlackHoleSpec {
            n,
            k,
            l,
            delta_l,
            kind,
            width: WidthConvention::StdDev,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_width(mut self, width: WidthConvention) -> Self {
        self.width = width;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !self.l.is_finite() || self.l.abs() > self.n as f64 / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "|L| = {} exceeds N/2 = {}",
                self.l.abs(),
                self.n as f64 / 2.0
            )));
        }
        if !self.delta_l.is_finite() || self.delta_l < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "deltaL must be finite and non-negative, got {}",
                self.delta_l
            )));
        }
        Ok(())
    }

    /// Total qubit count `N + k` of the scrambled system.
    pub fn total(&self) -> usize {
        self.n + self.k
    }

    pub fn check_ell(&self, ell: usize) -> Result<()> {
        if ell > self.total() {
            return Err(Error::InvalidParameter(format!(
                "ell = {ell} exceeds N + k = {}",
                self.total()
            )));
        }
        Ok(())
    }

    pub fn with_l(&self, l: f64) -> Result<Self> {
        let spec = BlackHoleSpec { l, ..*self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_delta_l(&self, delta_l: f64) -> Result<Self> {
        let spec = BlackHoleSpec { delta_l, ..*self };
        spec.validate()?;
        Ok(spec)
    }
}

/// Rounds `t` to the nearest integer, breaking half-integer ties toward
/// `center`. This keeps rounding covariant under the reflection
/// `t -> 2 * center - t`.
pub fn round_toward_center(t: f64, center: f64) -> i64 {
    let down = t.floor();
    let frac = t - down;
    if frac < 0.5 {
        down as i64
    } else if frac > 0.5 {
        down as i64 + 1
    } else if t > center {
        down as i64
    } else if t < center {
        down as i64 + 1
    } else {
        down as i64
    }
}

/// Normalized sector weights `chi[mu]`, `mu = 0..=N`, stored in log form.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSpectrum {
    log_chi: Vec<LogReal>,
}

impl SectorSpectrum {
    /// Normalizes non-negative log-domain weights.
    pub fn from_log_weights(weights: Vec<LogReal>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidSpectrum(
                "need at least two sectors (N >= 1)".into(),
            ));
        }
        if weights.iter().any(|w| w.sign() == crate::logspace::Sign::Negative) {
            return Err(Error::InvalidSpectrum("negative weight".into()));
        }
        if weights.iter().any(|w| !w.is_zero() && !w.ln().is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite weight".into()));
        }
        let z = log_sum_exp(weights.iter().copied());
        if z.is_zero() {
            return Err(Error::InvalidSpectrum("all weights are zero".into()));
        }
        let log_chi = weights.into_iter().map(|w| w / z).collect();
        Ok(SectorSpectrum { log_chi })
    }

    /// Import hook for a raw weight vector; normalizes to unit sum.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "weights must be finite and non-negative, got {w}"
            )));
        }
        SectorSpectrum::from_log_weights(weights.iter().map(|&w| LogReal::from_f64(w)).collect())
    }

    /// One-hot spectrum at `mu`.
    pub fn one_hot(n: usize, mu: usize) -> Result<Self> {
        if mu > n {
            return Err(Error::InvalidParameter(format!("mu = {mu} exceeds N = {n}")));
        }
        let mut w = vec![LogReal::ZERO; n + 1];
        w[mu] = LogReal::ONE;
        SectorSpectrum::from_log_weights(w)
    }

    /// Number of B_in qubits.
    pub fn n(&self) -> usize {
        self.log_chi.len() - 1
    }

    /// `chi[mu]` in log form; exact zero outside `[0, N]`.
    pub fn log_chi(&self, mu: i64) -> LogReal {
        if mu < 0 || mu as usize >= self.log_chi.len() {
            LogReal::ZERO
        } else {
            self.log_chi[mu as usize]
        }
    }

    pub fn chi(&self, mu: i64) -> f64 {
        self.log_chi(mu).to_f64()
    }

    pub fn log_weights(&self) -> &[LogReal] {
        &self.log_chi
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.log_chi.iter().map(|w| w.to_f64()).collect()
    }

    /// Spin-flip image: `mu -> N - mu`.
    pub fn reversed(&self) -> SectorSpectrum {
        let mut log_chi = self.log_chi.clone();
        log_chi.reverse();
        SectorSpectrum { log_chi }
    }

    pub fn check_matches(&self, spec: &BlackHoleSpec) -> Result<()> {
        if self.n() != spec.n {
            return Err(Error::SpectrumLength {
                expected: spec.n + 1,
                got: self.log_chi.len(),
            });
        }
        Ok(())
    }

    /// Support `[first, last]` of non-zero weights.
    pub fn support(&self) -> (usize, usize) {
        let first = self.log_chi.iter().position(|w| !w.is_zero()).unwrap_or(0);
        let last = self.log_chi.iter().rposition(|w| !w.is_zero()).unwrap_or(0);
        (first, last)
    }
}

/// Gaussian profile centered at `L + N/2`, sampled on integer `mu` and
/// renormalized. `deltaL = 0` gives a one-hot spectrum.
pub fn gaussian_spectrum(spec: &BlackHoleSpec) -> Result<SectorSpectrum> {
    spec.validate()?;
    let n = spec.n;
    let center = spec.l + n as f64 / 2.0;
    if spec.delta_l == 0.0 {
        let mu = round_toward_center(center, n as f64 / 2.0).clamp(0, n as i64);
        return SectorSpectrum::one_hot(n, mu as usize);
    }
    let denom = match spec.width {
        WidthConvention::StdDev => 2.0 * spec.delta_l * spec.delta_l,
        WidthConvention::Literal => spec.delta_l * spec.delta_l,
    };
    let weights = (0..=n)
        .map(|mu| {
            let x = mu as f64 - center;
            LogReal::from_ln(-x * x / denom)
        })
        .collect();
    SectorSpectrum::from_log_weights(weights)
}

/// Realized `(L, deltaL)` of a spectrum.
pub fn moments(chi: &SectorSpectrum) -> (f64, f64) {
    let half = chi.n() as f64 / 2.0;
    let w = chi.to_vec();
    let l: f64 = w
        .iter()
        .enumerate()
        .map(|(mu, c)| c * (mu as f64 - half))
        .sum();
    let var: f64 = w
        .iter()
        .enumerate()
        .map(|(mu, c)| {
            let d = mu as f64 - half - l;
            c * d * d
        })
        .sum();
    (l, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_profile_at_center() {
        let spec = BlackHoleSpec::new(2, 1, 0.0, 0.0, Purity::Pure).unwrap();
        let chi = gaussian_spectrum(&spec).unwrap();
        assert_eq!(chi.to_vec(), vec![0.0, 1.0, 0.0]);
        assert_eq!(moments(&chi), (0.0, 0.0));
    }

    #[test]
    fn two_point_moments() {
        let chi = SectorSpectrum::from_weights(&[0.5, 0.0, 0.5]).unwrap();
        let (l, dl) = moments(&chi);
        assert!(l.abs() < 1e-15);
        assert!((dl - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BlackHoleSpec::new(10, 1, 5.5, 1.0, Purity::Pure).is_err());
        assert!(BlackHoleSpec::new(10, 0, 0.0, 1.0, Purity::Pure).is_err());
        assert!(BlackHoleSpec::new(10, 1, 0.0, -1.0, Purity::Pure).is_err());
        assert!(BlackHoleSpec::new(0, 1, 0.0, 1.0, Purity::Pure).is_err());
        assert!(SectorSpectrum::from_weights(&[0.0, 0.0]).is_err());
        assert!(SectorSpectrum::from_weights(&[1.0, -0.1]).is_err());
        assert!(SectorSpectrum::from_weights(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn tie_rounding_is_reflection_covariant() {
        assert_eq!(round_toward_center(3.5, 2.0), 3);
        assert_eq!(round_toward_center(0.5, 2.0), 1);
        assert_eq!(round_toward_center(2.4, 2.0), 2);
        assert_eq!(round_toward_center(2.6, 2.0), 3);
        for t in [0.5, 1.5, 2.5, 3.5, 7.5, 1.2, 6.8] {
            let c = 4.0;
            assert_eq!(round_toward_center(2.0 * c - t, c), 8 - round_toward_center(t, c));
        }
    }

    #[test]
    fn literal_width_is_narrower() {
        let spec = BlackHoleSpec::new(400, 1, 0.0, 10.0, Purity::Pure).unwrap();
        let (_, std_dl) = moments(&gaussian_spectrum(&spec).unwrap());
        let lit = spec.with_width(WidthConvention::Literal);
        let (_, lit_dl) = moments(&gaussian_spectrum(&lit).unwrap());
        assert!((std_dl - 10.0).abs() < 0.01);
        assert!((lit_dl - 10.0 / 2f64.sqrt()).abs() < 0.01);
    }
}
