//! Block-diagonal Haar unitaries, one independent block per sector.

use hpsym_core::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{sector_indices, C64};

/// Largest total dimension the sampler accepts.
pub const MAX_DIMENSION: usize = 4096;

/// Independent stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-random `d x d` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let scale = 0.5f64.sqrt();
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U = ⊕_m U_m`, block `m` acting on the up-spin-count-`m` sector.
#[derive(Clone, Debug)]
pub struct BlockHaarUnitary {
    pub blocks: Vec<DMatrix<C64>>,
}

fn check_dims(sector_dims: &[usize]) -> Result<()> {
    let total: usize = sector_dims.iter().sum();
    if total > MAX_DIMENSION {
        return Err(Error::NumericalGuard(format!(
            "total dimension {total} exceeds the dense limit {MAX_DIMENSION}"
        )));
    }
    Ok(())
}

pub fn sample_block_haar(sector_dims: &[usize], seed: u64) -> Result<BlockHaarUnitary> {
    sample_block_haar_with(sector_dims, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_block_haar_with<R: Rng + ?Sized>(sector_dims: &[usize], rng: &mut R) -> Result<BlockHaarUnitary> {
    check_dims(sector_dims)?;
    Ok(BlockHaarUnitary {
        blocks: sector_dims.iter().map(|&d| haar_unitary(d, rng)).collect(),
    })
}

/// Sector dimensions `C(qubits, m)` for `m = 0..=qubits`.
pub fn qubit_sector_dims(qubits: usize) -> Vec<usize> {
    sector_indices(qubits).iter().map(Vec::len).collect()
}

impl BlockHaarUnitary {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    /// `max_ij |(B^† B - I)_ij|` over all blocks.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for b in &self.blocks {
            let d = b.nrows();
            let g = b.adjoint() * b - DMatrix::<C64>::identity(d, d);
            worst = g.iter().fold(worst, |acc, z| acc.max(z.norm()));
        }
        worst
    }

    /// Full matrix in the computational basis of `qubits` qubits.
    pub fn to_dense(&self, qubits: usize) -> Result<DMatrix<C64>> {
        let sectors = sector_indices(qubits);
        if sectors.iter().map(Vec::len).ne(self.blocks.iter().map(|b| b.nrows())) {
            return Err(Error::InvalidParameter(format!("blocks do not match {qubits} qubits")));
        }
        let d = 1usize << qubits;
        let mut u = DMatrix::zeros(d, d);
        for (idx, b) in sectors.iter().zip(&self.blocks) {
            for (i, &si) in idx.iter().enumerate() {
                for (j, &sj) in idx.iter().enumerate() {
                    u[(si, sj)] = b[(i, j)];
                }
            }
        }
        Ok(u)
    }

    /// `(U ⊗ I_aux) v` for `v` indexed `s * 2^aux + r`.
    pub fn apply(&self, sectors: &[Vec<usize>], aux_qubits: usize, v: &DVector<C64>) -> DVector<C64> {
        let da = 1usize << aux_qubits;
        let mut out = DVector::zeros(v.len());
        for (idx, b) in sectors.iter().zip(&self.blocks) {
            for r in 0..da {
                for (i, &si) in idx.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, &sj) in idx.iter().enumerate() {
                        acc += b[(i, j)] * v[sj * da + r];
                    }
                    out[si * da + r] = acc;
                }
            }
        }
        out
    }
}
