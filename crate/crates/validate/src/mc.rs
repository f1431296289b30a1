//! Monte-Carlo check of the partial-decoupling bounds.

use hpsym_core::bounds::{failure_probability, gamma, theta, theta_candidate};
use hpsym_core::io::{format_number, CsvTable};
use hpsym_core::radiation::{radiation_distribution, smoothing_set};
use hpsym_core::{BlackHoleSpec, Error, LogReal, Result, SectorSpectrum};
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{sector_indices, trace_distance, DenseState};
use crate::haar::{qubit_sector_dims, sample_block_haar_with, sample_rng};
use crate::oracle::{check_dense, gamma_from, initial_ensemble, Ensemble};

/// Largest `S_in R` register, in qubits, diagonalised once per sample.
pub const MAX_SAMPLED_QUBITS: usize = 10;

/// Batch-mean distances at or below this count as exact agreement.
pub const ROUNDING_DISTANCE: f64 = 1e-12;

/// Number of batches used for the convergence check.
pub const BATCHES: usize = 16;
/// Batches merged into one group, so groups hold four times the samples.
pub const GROUP: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    #[default]
    SmoothedTail,
    RefinedTail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationOptions {
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    /// Smoothing threshold; `None` uses the one minimising `Theta`.
    pub epsilon: Option<f64>,
    pub mode: BoundMode,
    /// Threshold dimension for the refined tail; `None` picks the largest
    /// one whose sectors carry weight `>= 1 - delta`.
    pub d_th: Option<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            samples: 2000,
            seed: 42,
            delta: 0.1,
            epsilon: None,
            mode: BoundMode::SmoothedTail,
            d_th: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationCheck {
    pub log2_gamma: f64,
    pub bound: f64,
    pub applicable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    pub epsilon: f64,
    pub w: f64,
    pub log2_gamma: f64,
    pub log_d_min: f64,
    pub bound: f64,
    pub tail: f64,
    pub violations: usize,
    pub violation_fraction: f64,
    pub allowed_fraction: f64,
    pub applicable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinedTailCheck {
    pub d_th: f64,
    pub weight_above: f64,
    pub rho_s_norm: f64,
    pub c: f64,
    pub f_delta: f64,
    pub bound: f64,
    pub tail: f64,
    pub violations: usize,
    pub violation_fraction: f64,
    pub allowed_fraction: f64,
    pub applicable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceCheck {
    pub batch_size: usize,
    pub small_batches: Vec<f64>,
    pub large_batches: Vec<f64>,
    pub ratio: f64,
    pub ratio_sigma: f64,
    /// Every batch mean already equals `Gamma` to rounding.
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub kind: String,
    pub l: f64,
    pub delta_l: f64,
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    pub mode: BoundMode,
    pub gamma_trace: f64,
    pub gamma_min_eigenvalue: f64,
    pub mean_distance: f64,
    pub std_distance: f64,
    pub max_distance: f64,
    pub expectation: ExpectationCheck,
    pub smoothed_tail: TailCheck,
    pub refined_tail: Option<RefinedTailCheck>,
    pub mean_state_distance: f64,
    pub mean_state_distance_quarter: Option<f64>,
    pub convergence: Option<ConvergenceCheck>,
    pub passed: bool,
    pub distances: Vec<f64>,
}

impl ValidationReport {
    pub fn distances_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["sample", "distance"]);
        for (i, d) in self.distances.iter().enumerate() {
            t.push(vec![i.to_string(), format_number(*d)]);
        }
        t
    }
}

/// Binomial allowance `tail + 3 sqrt(tail (1 - tail) / samples)`.
fn allowed(tail: f64, samples: usize) -> f64 {
    tail + 3.0 * (tail * (1.0 - tail) / samples as f64).sqrt()
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Chunk {
    distances: Vec<f64>,
    sum: DenseState,
}

fn chunk_bounds(samples: usize) -> (Option<usize>, Vec<(usize, usize)>) {
    if samples >= BATCHES * GROUP {
        let b = samples / BATCHES;
        let mut v: Vec<(usize, usize)> = (0..BATCHES).map(|i| (i * b, (i + 1) * b)).collect();
        if BATCHES * b < samples {
            v.push((BATCHES * b, samples));
        }
        (Some(b), v)
    } else {
        (None, (0..samples).map(|i| (i, i + 1)).collect())
    }
}

fn run_chunk(ens: &Ensemble, gamma: &DenseState, ell: usize, seed: u64, range: (usize, usize)) -> Result<Chunk> {
    let sectors = sector_indices(ens.s_qubits);
    let dims = qubit_sector_dims(ens.s_qubits);
    let mut sum = DenseState::zeros(gamma.qubits);
    let mut distances = Vec::with_capacity(range.1 - range.0);
    for i in range.0..range.1 {
        let u = sample_block_haar_with(&dims, &mut sample_rng(seed, i as u64))?;
        let rho = ens.scrambled_remainder(&u, &sectors, ell);
        distances.push(trace_distance(&rho, gamma)?);
        sum.add_assign(&rho)?;
    }
    Ok(Chunk { distances, sum })
}

fn distance_of_mean(sum: &DenseState, count: usize, gamma: &DenseState) -> Result<f64> {
    trace_distance(&sum.scaled(1.0 / count as f64), gamma)
}

pub fn run_validation(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
    samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    run_validation_with(
        spec,
        chi,
        ell,
        &ValidationOptions {
            samples,
            seed,
            ..ValidationOptions::default()
        },
    )
}

pub fn run_validation_with(
    spec: &BlackHoleSpec,
    chi: &SectorSpectrum,
    ell: usize,
    opts: &ValidationOptions,
) -> Result<ValidationReport> {
    check_dense(spec, chi, ell)?;
    if opts.samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {}", opts.delta)));
    }
    let remainder_qubits = spec.total() - ell + spec.k;
    if remainder_qubits > MAX_SAMPLED_QUBITS {
        return Err(Error::NumericalGuard(format!(
            "S_in R has {remainder_qubits} qubits, above the sampling limit {MAX_SAMPLED_QUBITS}"
        )));
    }
    let ens = initial_ensemble(spec, chi)?;
    let gamma_state = gamma_from(&ens, ell)?;

    let (batch_size, ranges) = chunk_bounds(opts.samples);
    let chunks: Vec<Chunk> = ranges
        .par_iter()
        .map(|&r| run_chunk(&ens, &gamma_state, ell, opts.seed, r))
        .collect::<Result<_>>()?;

    let distances: Vec<f64> = chunks.iter().flat_map(|c| c.distances.iter().copied()).collect();
    let mut total = DenseState::zeros(gamma_state.qubits);
    for c in &chunks {
        total.add_assign(&c.sum)?;
    }
    let (mean_distance, std_distance) = mean_sd(&distances);
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let samples = opts.samples;

    // Expectation form with H_min >= k - log2 gamma over all n.
    let all: Vec<usize> = (0..=ell).collect();
    let gamma_all = gamma(spec, chi, ell, &all)?;
    let exp_bound = gamma_all.sqrt().scale_pow2(-(spec.k as f64) / 2.0).to_f64();
    let exp_applicable = exp_bound < 2.0;
    let expectation = ExpectationCheck {
        log2_gamma: gamma_all.log2(),
        bound: exp_bound,
        applicable: exp_applicable,
        pass: !exp_applicable || mean_distance <= exp_bound + 3.0 * std_distance / (samples as f64).sqrt(),
    };

    let (epsilon, w, gamma_eps, d_min) = match opts.epsilon {
        None => {
            let t = theta(spec, chi, ell)?;
            (t.opt_epsilon, t.w_opt, t.gamma_log, t.d_min_opt)
        }
        Some(eps) => {
            let dist = radiation_distribution(spec, chi, ell)?;
            let set = smoothing_set(&dist, eps, spec);
            (eps, set.w, gamma(spec, chi, ell, &set.members)?, set.d_min)
        }
    };
    let bound = theta_candidate(spec.k, gamma_eps, w) + 2.0 * opts.delta;
    let tail = d_min.map_or(1.0, |d| failure_probability(d, opts.delta));
    let violations = distances.iter().filter(|&&d| d > bound).count();
    let applicable = bound < 2.0;
    let fraction = violations as f64 / samples as f64;
    let allowed_fraction = allowed(tail, samples);
    let smoothed_tail = TailCheck {
        epsilon,
        w,
        log2_gamma: gamma_eps.log2(),
        log_d_min: d_min.map_or(f64::NEG_INFINITY, LogReal::ln),
        bound,
        tail,
        violations,
        violation_fraction: fraction,
        allowed_fraction,
        applicable,
        pass: !applicable || fraction <= allowed_fraction,
    };

    let refined_tail = match opts.mode {
        BoundMode::SmoothedTail => None,
        BoundMode::RefinedTail => Some(refined_tail_check(&ens, opts, exp_bound, &distances)?),
    };

    let mean_state_distance = distance_of_mean(&total, samples, &gamma_state)?;
    let (mean_state_distance_quarter, convergence) = match batch_size {
        Some(b) => {
            let small: Vec<f64> = chunks[..BATCHES]
                .iter()
                .map(|c| distance_of_mean(&c.sum, b, &gamma_state))
                .collect::<Result<_>>()?;
            let large: Vec<f64> = chunks[..BATCHES]
                .chunks(GROUP)
                .map(|g| {
                    let mut s = DenseState::zeros(gamma_state.qubits);
                    for c in g {
                        s.add_assign(&c.sum)?;
                    }
                    distance_of_mean(&s, GROUP * b, &gamma_state)
                })
                .collect::<Result<_>>()?;
            let (ms, ss) = mean_sd(&small);
            let (ml, sl) = mean_sd(&large);
            let (es, el) = (ss / (small.len() as f64).sqrt(), sl / (large.len() as f64).sqrt());
            let ratio = ml / ms;
            let sigma = ratio * ((el / ml).powi(2) + (es / ms).powi(2)).sqrt();
            let quarter = large[0];
            let exact = small.iter().all(|&d| d <= ROUNDING_DISTANCE);
            (
                Some(quarter),
                Some(ConvergenceCheck {
                    batch_size: b,
                    small_batches: small,
                    large_batches: large,
                    ratio,
                    ratio_sigma: sigma,
                    exact,
                    pass: exact || (ratio - 0.5).abs() <= 3.0 * sigma,
                }),
            )
        }
        None => (None, None),
    };

    let passed = expectation.pass
        && smoothed_tail.pass
        && refined_tail.as_ref().is_none_or(|c| c.pass)
        && convergence.as_ref().is_none_or(|c| c.pass);

    Ok(ValidationReport {
        n: spec.n,
        k: spec.k,
        ell,
        kind: spec.kind.to_string(),
        l: spec.l,
        delta_l: spec.delta_l,
        samples,
        seed: opts.seed,
        delta: opts.delta,
        mode: opts.mode,
        gamma_trace: gamma_state.trace(),
        gamma_min_eigenvalue: gamma_state.min_eigenvalue(),
        mean_distance,
        std_distance,
        max_distance,
        expectation,
        smoothed_tail,
        refined_tail,
        mean_state_distance,
        mean_state_distance_quarter,
        convergence,
        passed,
        distances,
    })
}

/// `f(delta) = 2 sqrt(delta) + delta + delta / (1 - delta)`.
pub fn gentle_measurement_term(delta: f64) -> f64 {
    2.0 * delta.sqrt() + delta + delta / (1.0 - delta)
}

/// Largest sector dimension `d` such that sectors of dimension `>= d` carry
/// weight at least `1 - delta`, with that weight.
pub fn threshold_dimension(dims: &[usize], weights: &[f64], delta: f64) -> (f64, f64) {
    let weight_above = |d: usize| -> f64 {
        dims.iter().zip(weights).filter(|(&dm, _)| dm >= d).map(|(_, w)| w).sum()
    };
    let mut candidates: Vec<usize> = dims.to_vec();
    candidates.sort_unstable_by(|a, b| b.cmp(a));
    candidates.dedup();
    for d in candidates {
        let w = weight_above(d);
        if w >= 1.0 - delta {
            return (d as f64, w);
        }
    }
    (1.0, weight_above(1))
}

fn refined_tail_check(ens: &Ensemble, opts: &ValidationOptions, h_term: f64, distances: &[f64]) -> Result<RefinedTailCheck> {
    let dims = qubit_sector_dims(ens.s_qubits);
    let weights = ens.sector_weights();
    let (d_th, weight_above) = match opts.d_th {
        None => threshold_dimension(&dims, &weights, opts.delta),
        Some(d) => {
            if !(d >= 1.0) {
                return Err(Error::InvalidParameter(format!("d_th must be a positive integer, got {d}")));
            }
            let w = dims.iter().zip(&weights).filter(|(&dm, _)| dm as f64 >= d).map(|(_, w)| w).sum();
            (d.floor(), w)
        }
    };
    let delta = opts.delta;
    let rho_s_norm = ens.reduced_s().max_eigenvalue();
    let c = (rho_s_norm / (1.0 - delta)).min(1.0);
    let f_delta = gentle_measurement_term(delta);
    let bound = h_term / (1.0 - delta).sqrt() + delta + f_delta;
    let tail = (-(delta * delta * d_th / (48.0 * c))).exp();
    let samples = distances.len();
    let violations = distances.iter().filter(|&&d| d > bound).count();
    let fraction = violations as f64 / samples as f64;
    let allowed_fraction = allowed(tail, samples);
    let applicable = bound < 2.0 && weight_above >= 1.0 - delta;
    Ok(RefinedTailCheck {
        d_th,
        weight_above,
        rho_s_norm,
        c,
        f_delta,
        bound,
        tail,
        violations,
        violation_fraction: fraction,
        allowed_fraction,
        applicable,
        pass: !applicable || fraction <= allowed_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_all_samples() {
        let (b, r) = chunk_bounds(2003);
        assert_eq!(b, Some(125));
        assert_eq!(r.len(), 17);
        assert_eq!(r.last().unwrap(), &(2000, 2003));
        let (b, r) = chunk_bounds(10);
        assert_eq!(b, None);
        assert_eq!(r.len(), 10);
    }

    #[test]
    fn threshold_dimension_choice() {
        let dims = [1, 3, 3, 1];
        let (d, w) = threshold_dimension(&dims, &[0.05, 0.45, 0.45, 0.05], 0.1);
        assert_eq!((d, w), (3.0, 0.9));
        let (d, _) = threshold_dimension(&dims, &[0.2, 0.3, 0.3, 0.2], 0.1);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn gentle_measurement_value() {
        assert!((gentle_measurement_term(0.01) - (0.2 + 0.01 + 0.01 / 0.99)).abs() < 1e-15);
    }
}
