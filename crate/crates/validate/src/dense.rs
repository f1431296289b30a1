//! Dense operators on qubit registers and the trace norm.

use hpsym_core::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Inputs whose Hermiticity defect exceeds this are rejected.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Largest register, in qubits, stored as a full matrix.
pub const MAX_FULL_QUBITS: usize = 12;

pub fn popcount(x: usize) -> usize {
    x.count_ones() as usize
}

/// Basis indices of `qubits` qubits grouped by up-spin count, ascending.
pub fn sector_indices(qubits: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); qubits + 1];
    for s in 0..1usize << qubits {
        out[popcount(s)].push(s);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    /// Real diagonal in the computational basis.
    Diagonal(Vec<f64>),
    Full(DMatrix<C64>),
}

/// Operator on `qubits` qubits, basis index with the first register in the
/// high bits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub qubits: usize,
    pub storage: Storage,
}

fn check_full(qubits: usize) -> Result<()> {
    if qubits > MAX_FULL_QUBITS {
        return Err(Error::NumericalGuard(format!(
            "full operator on {qubits} qubits exceeds the dense limit {MAX_FULL_QUBITS}"
        )));
    }
    Ok(())
}

fn is_zero(z: C64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

impl DenseState {
    pub fn full(qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let d = 1usize << qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidParameter(format!(
                "{}x{} matrix on {qubits} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseState {
            qubits,
            storage: Storage::Full(matrix),
        })
    }

    pub fn diagonal_state(qubits: usize, diag: Vec<f64>) -> Result<Self> {
        if diag.len() != 1usize << qubits {
            return Err(Error::InvalidParameter(format!("{} diagonal entries on {qubits} qubits", diag.len())));
        }
        Ok(DenseState {
            qubits,
            storage: Storage::Diagonal(diag),
        })
    }

    pub fn zeros(qubits: usize) -> Self {
        DenseState {
            qubits,
            storage: Storage::Diagonal(vec![0.0; 1usize << qubits]),
        }
    }

    /// Maximally mixed state on `qubits` qubits.
    pub fn maximally_mixed(qubits: usize) -> DenseState {
        let d = 1usize << qubits;
        DenseState {
            qubits,
            storage: Storage::Diagonal(vec![1.0 / d as f64; d]),
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    pub fn trace(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().sum(),
            Storage::Full(m) => m.trace().re,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Diagonal(d) => d.clone(),
            Storage::Full(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        match &self.storage {
            Storage::Full(m) => Ok(m.clone()),
            Storage::Diagonal(d) => {
                check_full(self.qubits)?;
                let v = DVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
                Ok(DMatrix::from_diagonal(&v))
            }
        }
    }

    /// True when every off-diagonal entry is exactly zero and the diagonal
    /// is real.
    pub fn is_diagonal(&self) -> bool {
        match &self.storage {
            Storage::Diagonal(_) => true,
            Storage::Full(m) => {
                let d = m.nrows();
                (0..d).all(|j| (0..d).all(|i| if i == j { m[(i, i)].im == 0.0 } else { is_zero(m[(i, j)]) }))
            }
        }
    }

    /// Same operator, stored diagonally when it is exactly diagonal.
    pub fn compact(self) -> DenseState {
        if matches!(self.storage, Storage::Full(_)) && self.is_diagonal() {
            let d = self.diagonal();
            DenseState {
                qubits: self.qubits,
                storage: Storage::Diagonal(d),
            }
        } else {
            self
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(_) => 0.0,
            Storage::Full(m) => {
                let d = m.nrows();
                let mut worst = 0.0f64;
                for j in 0..d {
                    for i in 0..=j {
                        worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
                worst
            }
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Diagonal(d) => d.clone(),
            Storage::Full(m) => {
                if self.is_diagonal() {
                    self.diagonal()
                } else {
                    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
                }
            }
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &DenseState) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::InvalidParameter(format!("{} vs {} qubits", self.qubits, other.qubits)));
        }
        match (&mut self.storage, &other.storage) {
            (Storage::Diagonal(a), Storage::Diagonal(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (Storage::Full(a), Storage::Full(b)) => *a += b,
            (Storage::Full(a), Storage::Diagonal(b)) => {
                for (i, y) in b.iter().enumerate() {
                    a[(i, i)] += C64::new(*y, 0.0);
                }
            }
            (Storage::Diagonal(_), Storage::Full(b)) => {
                let mut a = self.to_matrix()?;
                a += b;
                self.storage = Storage::Full(a);
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> DenseState {
        let storage = match &self.storage {
            Storage::Diagonal(d) => Storage::Diagonal(d.iter().map(|x| x * factor).collect()),
            Storage::Full(m) => Storage::Full(m * C64::new(factor, 0.0)),
        };
        DenseState {
            qubits: self.qubits,
            storage,
        }
    }

    /// Traces out the lowest `bits` qubits.
    pub fn trace_low(&self, bits: usize) -> DenseState {
        let keep = self.qubits - bits;
        let (dk, dt) = (1usize << keep, 1usize << bits);
        let storage = match &self.storage {
            Storage::Diagonal(d) => Storage::Diagonal((0..dk).map(|i| d[i * dt..(i + 1) * dt].iter().sum()).collect()),
            Storage::Full(m) => {
                Storage::Full(DMatrix::from_fn(dk, dk, |i, j| (0..dt).map(|t| m[(i * dt + t, j * dt + t)]).sum()))
            }
        };
        DenseState { qubits: keep, storage }
    }

    /// Traces out the highest `bits` qubits.
    pub fn trace_high(&self, bits: usize) -> DenseState {
        let keep = self.qubits - bits;
        let (dk, dt) = (1usize << keep, 1usize << bits);
        let storage = match &self.storage {
            Storage::Diagonal(d) => Storage::Diagonal((0..dk).map(|i| (0..dt).map(|t| d[t * dk + i]).sum()).collect()),
            Storage::Full(m) => {
                Storage::Full(DMatrix::from_fn(dk, dk, |i, j| (0..dt).map(|t| m[(t * dk + i, t * dk + j)]).sum()))
            }
        };
        DenseState { qubits: keep, storage }
    }

    /// `self ⊗ other`, with `self` in the high bits.
    pub fn kron(&self, other: &DenseState) -> Result<DenseState> {
        let qubits = self.qubits + other.qubits;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Diagonal(a), Storage::Diagonal(b)) => {
                Storage::Diagonal(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            _ => {
                check_full(qubits)?;
                Storage::Full(self.to_matrix()?.kronecker(&other.to_matrix()?))
            }
        };
        Ok(DenseState { qubits, storage })
    }
}

/// `||a - b||_1`, the sum of absolute eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.qubits != b.qubits {
        return Err(Error::InvalidParameter(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    for (name, x) in [("first", a), ("second", b)] {
        let err = x.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "{name} operand is not Hermitian (defect {err:.3e})"
            )));
        }
    }
    let mut diff = a.clone();
    diff.add_assign(&b.scaled(-1.0))?;
    Ok(diff.eigenvalues().iter().map(|e| e.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(v: &[C64]) -> DenseState {
        let v = DVector::from_column_slice(v);
        let q = v.len().trailing_zeros() as usize;
        DenseState::full(q, &v * v.adjoint()).unwrap()
    }

    #[test]
    fn sectors_partition_the_basis() {
        let s = sector_indices(4);
        assert_eq!(s.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 4, 6, 4, 1]);
        assert_eq!(s[1], vec![1, 2, 4, 8]);
    }

    #[test]
    fn trace_distance_extremes() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let a = pure(&[one, zero]);
        let b = pure(&[zero, one]);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(trace_distance(&a, &b).unwrap(), 2.0);
        let plus = pure(&[one / 2f64.sqrt(), one / 2f64.sqrt()]);
        assert!((trace_distance(&a, &plus).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1e-6, 0.0);
        let x = DenseState::full(1, m).unwrap();
        assert!(trace_distance(&x, &DenseState::zeros(1)).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = DenseState::diagonal_state(1, vec![0.25, 0.75]).unwrap();
        let b = DenseState::maximally_mixed(2);
        let ab = a.kron(&b).unwrap();
        assert_eq!(ab.trace_low(2), a);
        assert_eq!(ab.trace_high(1), b);
        let full = DenseState::full(3, ab.to_matrix().unwrap()).unwrap();
        assert_eq!(full.trace_low(2).compact(), a);
        assert_eq!(full.trace_high(1).compact(), b);
    }

    #[test]
    fn mixed_storage_arithmetic() {
        let d = DenseState::diagonal_state(1, vec![0.5, 0.5]).unwrap();
        let mut m = DMatrix::from_element(2, 2, C64::new(0.5, 0.0));
        let f = DenseState::full(1, m.clone()).unwrap();
        let mut acc = d.clone();
        acc.add_assign(&f).unwrap();
        m[(0, 0)] += C64::new(0.5, 0.0);
        m[(1, 1)] += C64::new(0.5, 0.0);
        assert_eq!(acc, DenseState::full(1, m).unwrap());
        assert!((trace_distance(&d, &f).unwrap() - 1.0).abs() < 1e-15);
    }
}
