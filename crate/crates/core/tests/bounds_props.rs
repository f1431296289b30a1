mod common;

use common::{close, random_chi};
use hpsym_core::bounds::{
    eta, ell_delta, failure_probability, first_ell_below, gamma, gamma_mixed, gamma_pure, recovery_bounds,
    theta, theta_candidate,
};
use hpsym_core::radiation::radiation_distribution;
use hpsym_core::{gaussian_spectrum, log_binomial, BlackHoleSpec, LogReal, Purity, SectorSpectrum};
use proptest::prelude::*;

#[test]
fn gamma_pure_two_qubit_example() {
    let spec = BlackHoleSpec::new(1, 1, 0.0, 0.0, Purity::Pure).unwrap();
    let chi = SectorSpectrum::from_weights(&[1.0, 0.0]).unwrap();
    let got = gamma_pure(&spec, &chi, 1, &[0, 1]).unwrap().to_f64();
    let want = common::gamma_pure(&spec, &[1.0, 0.0], 1, &[0, 1]);
    assert!(close(got, want, 1e-13), "{got} vs {want}");
    assert!(gamma_pure(&spec, &chi, 1, &[]).unwrap().is_zero());
}

#[test]
fn gamma_mixed_three_qubit_example() {
    let spec = BlackHoleSpec::new(2, 1, 0.0, 0.0, Purity::Mixed).unwrap();
    let chi = SectorSpectrum::one_hot(2, 1).unwrap();
    let got = gamma_mixed(&spec, &chi, 1, &[0, 1]).unwrap().to_f64();
    let want = common::gamma_mixed(&spec, &chi.to_vec(), 1, &[0, 1]);
    assert!(close(got, want, 1e-13), "{got} vs {want}");
    assert!(gamma_mixed(&spec, &chi, 1, &[]).unwrap().is_zero());
}

#[test]
fn gamma_and_eta_match_linear_formulas() {
    for n in 1..=7usize {
        for k in 1..=3usize {
            for seed in 0..3u64 {
                let chi = random_chi(n, 100 * seed + 10 * n as u64 + k as u64);
                let raw = chi.to_vec();
                for kind in [Purity::Pure, Purity::Mixed] {
                    let spec = BlackHoleSpec::new(n, k, 0.0, 0.0, kind).unwrap();
                    for ell in 0..=n + k {
                        let members: Vec<usize> = (0..=ell).filter(|i| (i + seed as usize) % 3 != 0).collect();
                        let got = gamma(&spec, &chi, ell, &members).unwrap().to_f64();
                        let want = match kind {
                            Purity::Pure => common::gamma_pure(&spec, &raw, ell, &members),
                            Purity::Mixed => common::gamma_mixed(&spec, &raw, ell, &members),
                        };
                        assert!(close(got, want, 1e-12), "{kind} N={n} k={k} ell={ell}: {got} vs {want}");
                    }
                }
                let spec = BlackHoleSpec::new(n, k, 0.0, 0.0, Purity::Pure).unwrap();
                for ell in 0..=n + k {
                    let got = eta(&spec, &chi, ell).unwrap();
                    let want = common::eta(&spec, &raw, ell);
                    assert!((got - want).abs() <= 1e-12, "eta N={n} k={k} ell={ell}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn kind_is_enforced() {
    let pure = BlackHoleSpec::new(3, 1, 0.0, 0.0, Purity::Pure).unwrap();
    let mixed = BlackHoleSpec::new(3, 1, 0.0, 0.0, Purity::Mixed).unwrap();
    let chi = gaussian_spectrum(&pure).unwrap();
    assert!(gamma_mixed(&pure, &chi, 1, &[0]).is_err());
    assert!(gamma_pure(&mixed, &chi, 1, &[0]).is_err());
}

/// Every distinct probable set, built directly from the definition.
fn brute_force_theta(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> (f64, Vec<f64>) {
    let dist = radiation_distribution(spec, chi, ell).unwrap();
    let p = dist.p();
    let mut eps: Vec<f64> = p.to_vec();
    eps.push(0.0);
    eps.push(f64::INFINITY);
    let values: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let members: Vec<usize> = (0..p.len()).filter(|&i| p[i] >= e).collect();
            let w: f64 = (0..p.len()).filter(|&i| p[i] < e).map(|i| p[i]).sum();
            theta_candidate(spec.k, gamma(spec, chi, ell, &members).unwrap(), w)
        })
        .collect();
    (values.iter().copied().fold(f64::INFINITY, f64::min), values)
}

#[test]
fn theta_is_minimal_over_all_thresholds() {
    for n in 1..=10usize {
        for k in 1..=3usize {
            for kind in [Purity::Pure, Purity::Mixed] {
                let spec = BlackHoleSpec::new(n, k, 0.0, 0.0, kind).unwrap();
                let chi = random_chi(n, (n * 7 + k) as u64);
                for ell in 0..=(n + k).min(12) {
                    let t = theta(&spec, &chi, ell).unwrap();
                    let (best, all) = brute_force_theta(&spec, &chi, ell);
                    assert!(close(t.theta, best, 1e-12), "{kind} N={n} k={k} ell={ell}: {} vs {best}", t.theta);
                    for v in all {
                        assert!(v >= t.theta * (1.0 - 1e-12));
                    }
                    let again = theta_candidate(k, t.gamma_log, t.w_opt);
                    assert!(close(again, t.theta, 1e-12));
                }
            }
        }
    }
}

#[test]
fn no_radiation_is_vacuous() {
    let spec = BlackHoleSpec::new(500, 5, 0.0, 0.1 * 500f64.sqrt(), Purity::Pure).unwrap();
    let chi = gaussian_spectrum(&spec).unwrap();
    let r = recovery_bounds(&spec, &chi, 0).unwrap();
    assert!(r.theta >= 1.0);
    assert_eq!(r.delta_inv_bound, 1.0);
    assert_eq!(r.delta_tot_bound, 1.0);
}

#[test]
fn gamma_sign_symmetry_at_n500() {
    let n = 500;
    for kind in [Purity::Pure, Purity::Mixed] {
        let spec = BlackHoleSpec::new(n, 5, n as f64 / 8.0, 0.5 * (n as f64).sqrt(), kind).unwrap();
        let flipped = spec.with_l(-spec.l).unwrap();
        let (chi, chi_f) = (gaussian_spectrum(&spec).unwrap(), gaussian_spectrum(&flipped).unwrap());
        for ell in [40usize, 200, 330] {
            let all: Vec<usize> = (0..=ell).collect();
            let a = gamma(&spec, &chi, ell, &all).unwrap();
            let b = gamma(&flipped, &chi_f, ell, &all).unwrap();
            assert!((a.ln() - b.ln()).abs() < 1e-10, "{kind} ell={ell}");
        }
    }
}

#[test]
fn sign_symmetry_over_grid() {
    for kind in [Purity::Pure, Purity::Mixed] {
        for n in [24usize, 61, 120] {
            for k in [1usize, 3] {
                for lf in [0.1, 0.25, 0.4] {
                    for dlf in [0.0, 0.5, 2.0] {
                        let l = (lf * n as f64).round();
                        let spec = BlackHoleSpec::new(n, k, l, dlf * (n as f64).sqrt(), kind).unwrap();
                        let flipped = spec.with_l(-l).unwrap();
                        let chi = gaussian_spectrum(&spec).unwrap();
                        let chi_f = gaussian_spectrum(&flipped).unwrap();
                        for ell in (0..=n + k).step_by(7) {
                            let a = recovery_bounds(&spec, &chi, ell).unwrap();
                            let b = recovery_bounds(&flipped, &chi_f, ell).unwrap();
                            assert!(close(a.theta, b.theta, 1e-10), "{kind} N={n} k={k} L={l} ell={ell}");
                            assert!(close(a.eta, b.eta, 1e-10) || (a.eta - b.eta).abs() < 1e-15);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn eta_is_nearly_independent_of_l() {
    let n = 500;
    let dl = 0.5 * (n as f64).sqrt();
    for ell in [50usize, 250] {
        let values: Vec<f64> = [0.0, n as f64 / 8.0, n as f64 / 4.0]
            .iter()
            .map(|&l| {
                let spec = BlackHoleSpec::new(n, 1, l, dl, Purity::Pure).unwrap();
                eta(&spec, &gaussian_spectrum(&spec).unwrap(), ell).unwrap()
            })
            .collect();
        let residual = values.iter().map(|v| (v - values[0]).abs() / values[0]).fold(0.0, f64::max);
        println!("eta L-residual at ell={ell}: {residual:.3e} ({values:?})");
        // The sector variance shrinks like 1/4 - lambda^2, so only approximate invariance holds.
        assert!(residual < 0.15);
    }
}

#[test]
fn full_evaporation_has_no_remnant() {
    for kind in [Purity::Pure, Purity::Mixed] {
        let spec = BlackHoleSpec::new(80, 2, 10.0, 3.0, kind).unwrap();
        let chi = gaussian_spectrum(&spec).unwrap();
        assert_eq!(eta(&spec, &chi, 82).unwrap(), 0.0);
    }
}

#[test]
fn failure_probability_underflows() {
    let d = log_binomial(505, 252);
    assert_eq!(failure_probability(d, 1e-3), 0.0);
    assert_eq!(failure_probability(d, 0.0), 1.0);
    assert!((failure_probability(LogReal::ONE, 1.0) - (-1.0f64 / 48.0).exp()).abs() < 1e-15);
    assert!((failure_probability(LogReal::ONE, 1.0) - 0.97938).abs() < 1e-5);
}

#[test]
fn delay_is_monotone_in_delta() {
    let spec = BlackHoleSpec::new(60, 3, 12.0, 2.0, Purity::Pure).unwrap();
    let chi = gaussian_spectrum(&spec).unwrap();
    let mut last = 0usize;
    for delta in [0.9, 0.5, 0.2, 0.05, 0.01, 1e-3] {
        let r = ell_delta(&spec, &chi, delta).unwrap();
        let e = r.ell_delta.unwrap_or(usize::MAX);
        assert!(e >= last, "Delta={delta}");
        last = e;
    }
    assert_eq!(ell_delta(&spec, &chi, 1.0).unwrap().ell_delta, Some(0));
    assert!(ell_delta(&spec, &chi, 0.0).is_err());
    assert_eq!(first_ell_below(&spec, &chi, 2.0).unwrap(), Some(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn report_invariants(n in 1usize..60, k in 1usize..5, lf in -0.5f64..0.5, dlf in 0.0f64..0.3, ellf in 0.0f64..=1.0, mixed in any::<bool>()) {
        let kind = if mixed { Purity::Mixed } else { Purity::Pure };
        let spec = BlackHoleSpec::new(n, k, lf * n as f64, dlf * n as f64, kind).unwrap();
        let chi = gaussian_spectrum(&spec).unwrap();
        let ell = (ellf * (n + k) as f64) as usize;
        let r = recovery_bounds(&spec, &chi, ell).unwrap();
        prop_assert!(r.eta >= 0.0);
        prop_assert!(r.theta >= 0.0);
        prop_assert!(r.delta_inv_bound <= r.delta_tot_bound);
        prop_assert!((0.0..=1.0).contains(&r.delta_inv_bound));
        prop_assert!((0.0..=1.0).contains(&r.delta_tot_bound));
        prop_assert_eq!(r.theta_clamped, r.theta.min(1.0));
        prop_assert!(close(theta_candidate(k, r.gamma_log, r.w_opt), r.theta, 1e-12));
    }
}
