//! Naive linear-domain evaluations of the sector formulas. Only usable at
//! small `N`, where nothing overflows.

#![allow(dead_code)]

use hpsym_core::{BlackHoleSpec, SectorSpectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(n: i64, r: i64) -> f64 {
    if r < 0 || r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn chi_at(chi: &[f64], mu: i64) -> f64 {
    if mu < 0 || mu as usize >= chi.len() {
        0.0
    } else {
        chi[mu as usize]
    }
}

pub fn p_n(spec: &BlackHoleSpec, chi: &[f64], ell: usize) -> Vec<f64> {
    let (mt, k, l) = (spec.total() as i64, spec.k as i64, ell as i64);
    (0..=l)
        .map(|n| {
            let mut s = 0.0;
            for m in 0..=mt {
                for kappa in 0..=k {
                    s += chi_at(chi, m - kappa) * c(l, n) * c(mt - l, m - n) * c(k, kappa) / c(mt, m);
                }
            }
            s / 2f64.powi(k as i32)
        })
        .collect()
}

pub fn gamma_pure(spec: &BlackHoleSpec, chi: &[f64], ell: usize, members: &[usize]) -> f64 {
    let (mt, k, l) = (spec.total() as i64, spec.k as i64, ell as i64);
    members
        .iter()
        .map(|&n| {
            let n = n as i64;
            let mut s = 0.0;
            for m in 0..=mt {
                for kappa in 0..=k {
                    s += (chi_at(chi, m - kappa) / c(mt, m)).sqrt() * c(mt - l, m - n) * c(k, kappa);
                }
            }
            s * s
        })
        .sum()
}

pub fn gamma_mixed(spec: &BlackHoleSpec, chi: &[f64], ell: usize, members: &[usize]) -> f64 {
    let (mt, k, l, big_n) = (spec.total() as i64, spec.k as i64, ell as i64, spec.n as i64);
    let mut total = 0.0;
    for mu in 0..=big_n {
        let w = chi_at(chi, mu) / c(big_n, mu);
        for &n in members {
            let n = n as i64;
            let s: f64 = (0..=mt)
                .map(|m| (1.0 / c(mt, m)).sqrt() * c(mt - l, m - n) * c(k, m - mu))
                .sum();
            total += w * s * s;
        }
    }
    total
}

pub fn eta(spec: &BlackHoleSpec, chi: &[f64], ell: usize) -> f64 {
    let (mt, k, l) = (spec.total() as i64, spec.k as i64, ell as i64);
    let scale = 2f64.powi(-(k as i32));
    let avg = |m: i64| -> f64 { (0..=k).map(|kp| c(k, kp) * chi_at(chi, m - kp)).sum::<f64>() * scale };
    let mut total = 0.0;
    for nu in 0..=(mt - l) {
        for kappa in 0..=k {
            let f: f64 = (0..=mt)
                .map(|m| c(l, m - nu) / c(mt, m) * (chi_at(chi, m - kappa) - avg(m)))
                .sum();
            total += f.abs() * c(mt - l, nu) * c(k, kappa);
        }
    }
    total * scale
}

/// Random spectrum with some exact zeros, deterministic per seed.
pub fn random_chi(n: usize, seed: u64) -> SectorSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..=n)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[n / 2] = 1.0;
    }
    SectorSpectrum::from_weights(&w).unwrap()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
