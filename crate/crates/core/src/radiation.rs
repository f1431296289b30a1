//! Radiation-sector statistics: `p_n`, probable sets `I_eps`, rare-event
//! weight `w(eps)` and the concentration dimension `d_min(eps)`.

use crate::error::Result;
use crate::logspace::{log_binomial, LogAccumulator, LogReal};
use crate::spectrum::{BlackHoleSpec, SectorSpectrum};

/// Relative gap below which two probabilities are treated as one threshold.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RadiationDistribution {
    ell: usize,
    p: Vec<f64>,
}

impl RadiationDistribution {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn total(&self) -> f64 {
        sum_ascending(self.p.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingSet {
    pub epsilon: f64,
    pub members: Vec<usize>,
    pub w: f64,
    /// `None` when `members` is empty.
    pub d_min: Option<LogReal>,
}

/// Weight of the S sector `m` before scrambling:
/// `a_m = 2^-k sum_kappa C(k, kappa) chi[m - kappa]`, for `m = 0..=N+k`.
pub fn s_sector_weights(spec: &BlackHoleSpec, chi: &SectorSpectrum) -> Vec<LogReal> {
    let k = spec.k as i64;
    let half_k = LogReal::ONE.scale_pow2(-(spec.k as f64));
    (0..=spec.total() as i64)
        .map(|m| {
            let acc: LogAccumulator = (0..=k)
                .map(|kappa| log_binomial(k, kappa) * chi.log_chi(m - kappa))
                .collect();
            acc.value() * half_k
        })
        .collect()
}

pub fn radiation_distribution(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
) -> Result<RadiationDistribution> {
    spec.validate()?;
    spec.check_ell(ell)?;
    chi.check_matches(spec)?;
    let a = s_sector_weights(spec, chi);
    Ok(distribution_from_weights(spec, &a, ell))
}

pub(crate) fn distribution_from_weights(
    spec: &BlackHoleSpec,
    a: &[LogReal],
    ell: usize,
) -> RadiationDistribution {
    let total = spec.total() as i64;
    let l = ell as i64;
    let p = (0..=l)
        .map(|n| {
            let c_ln = log_binomial(l, n);
            let acc: LogAccumulator = (0..=total)
                .map(|m| {
                    a[m as usize] * c_ln * log_binomial(total - l, m - n)
                        / log_binomial(total, m)
                })
                .collect();
            acc.value().to_f64()
        })
        .collect();
    RadiationDistribution { ell, p }
}

/// Sum of non-negative values, smallest first.
pub(crate) fn sum_ascending<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

/// `d_min` for the members window `[n_lo, n_hi]`.
///
/// `C(N+k, j)` is unimodal in `j`, so its minimum over the union of
/// `[n, n + N+k-ell]` is reached at one of the two outer endpoints.
pub(crate) fn d_min_for_range(spec: &BlackHoleSpec, ell: usize, n_lo: usize, n_hi: usize) -> LogReal {
    let total = spec.total() as i64;
    let lo = log_binomial(total, n_lo as i64);
    let hi = log_binomial(total, (n_hi + spec.total() - ell) as i64);
    if lo < hi {
        lo
    } else {
        hi
    }
}

pub fn smoothing_set(dist: &RadiationDistribution, epsilon: f64, spec: &BlackHoleSpec) -> SmoothingSet {
    let members: Vec<usize> = (0..dist.p.len()).filter(|&n| dist.p[n] >= epsilon).collect();
    let w = sum_ascending((0..dist.p.len()).filter(|&n| dist.p[n] < epsilon).map(|n| dist.p[n]));
    let d_min = match (members.first(), members.last()) {
        (Some(&lo), Some(&hi)) => Some(d_min_for_range(spec, dist.ell, lo, hi)),
        _ => None,
    };
    SmoothingSet {
        epsilon,
        members,
        w: if dist.p.iter().all(|&p| p < epsilon) { 1.0 } else { w },
        d_min,
    }
}

/// Sorted distinct values of `{0} ∪ {p_n}`.
///
/// Values within [`TIE_TOL`] relative of each other collapse to their
/// smallest representative, so mirror-image distributions that differ only
/// in rounding yield the same family of probable sets.
pub fn candidate_thresholds(dist: &RadiationDistribution) -> Vec<f64> {
    let mut v: Vec<f64> = dist.p.iter().copied().chain(std::iter::once(0.0)).collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&rep) if x <= rep * (1.0 + TIE_TOL) => {}
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Purity;

    fn tiny() -> (BlackHoleSpec, SectorSpectrum) {
        let spec = BlackHoleSpec::new(1, 1, 0.0, 0.0, Purity::Pure).unwrap();
        let chi = SectorSpectrum::from_weights(&[1.0, 0.0]).unwrap();
        (spec, chi)
    }

    #[test]
    fn no_radiation_is_certain() {
        let (spec, chi) = tiny();
        let d = radiation_distribution(&spec, &chi, 0).unwrap();
        assert_eq!(d.p().len(), 1);
        assert!((d.p()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_evaluated_two_qubit_case() {
        let (spec, chi) = tiny();
        let d = radiation_distribution(&spec, &chi, 1).unwrap();
        assert!((d.p()[0] - 0.75).abs() < 1e-15);
        assert!((d.p()[1] - 0.25).abs() < 1e-15);
        assert_eq!(candidate_thresholds(&d), vec![0.0, 0.25, 0.75]);
    }

    #[test]
    fn rejects_ell_out_of_range() {
        let (spec, chi) = tiny();
        assert!(radiation_distribution(&spec, &chi, 3).is_err());
    }

    #[test]
    fn smoothing_set_edges() {
        let (spec, chi) = tiny();
        let d = radiation_distribution(&spec, &chi, 1).unwrap();
        let all = smoothing_set(&d, 0.0, &spec);
        assert_eq!(all.members, vec![0, 1]);
        assert_eq!(all.w, 0.0);
        let none = smoothing_set(&d, 0.9, &spec);
        assert!(none.members.is_empty());
        assert_eq!(none.w, 1.0);
        assert!(none.d_min.is_none());
        let tie = smoothing_set(&d, 0.25, &spec);
        assert_eq!(tie.members, vec![0, 1]);
    }

    #[test]
    fn equal_entries_give_two_thresholds() {
        let d = RadiationDistribution {
            ell: 3,
            p: vec![0.25; 4],
        };
        assert_eq!(candidate_thresholds(&d), vec![0.0, 0.25]);
    }

    #[test]
    fn d_min_window_matches_brute_force() {
        let spec = BlackHoleSpec::new(9, 3, 0.0, 1.0, Purity::Pure).unwrap();
        let ell = 5;
        for lo in 0..=ell {
            for hi in lo..=ell {
                let mut best = f64::INFINITY;
                for n in lo..=hi {
                    for m in 0..=(spec.total() - ell) {
                        best = best.min(log_binomial(12, (m + n) as i64).ln());
                    }
                }
                let got = d_min_for_range(&spec, ell, lo, hi).ln();
                assert!((got - best).abs() < 1e-12);
            }
        }
    }
}
