#![allow(dead_code)]

use hpsym_core::SectorSpectrum;
use hpsym_validate::dense::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random spectrum over `0..=n` with roughly a fifth of the sectors empty.
pub fn random_chi(n: usize, seed: u64) -> SectorSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..=n).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect();
    if w.iter().all(|&x| x == 0.0) {
        w[n / 2] = 1.0;
    }
    SectorSpectrum::from_weights(&w).unwrap()
}

pub fn ginibre(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Full-rank random density matrix `G G^† / tr`.
pub fn random_density(d: usize, seed: u64) -> DMatrix<C64> {
    let g = ginibre(d, &mut ChaCha8Rng::seed_from_u64(seed));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Trace norm as the sum of singular values.
pub fn svd_trace_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}
