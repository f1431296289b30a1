//! Dense construction of the initial state, the exact `Gamma^{S_in R}` and
//! the brute-force `p_n`, `P(nu)` and `eta` oracles.
//!
//! Layout: `S = A B_in` with `A` in the high `k` bits, `S_rad` the low
//! `ell` bits of `S`, and `S R` vectors indexed `s * 2^k + r`.

use hpsym_core::{BlackHoleSpec, Error, Purity, Result, SectorSpectrum};
use nalgebra::{DMatrix, DVector};

use crate::dense::{popcount, sector_indices, trace_distance, DenseState, Storage, C64};
use crate::haar::BlockHaarUnitary;

/// Largest `N + k` for which `Gamma` is built densely.
pub const MAX_DENSE_QUBITS: usize = 10;

/// Weighted pure states `sum_i w_i |v_i><v_i|` on `S R`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub s_qubits: usize,
    pub r_qubits: usize,
    pub members: Vec<(f64, DVector<C64>)>,
}

pub fn check_dense(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<()> {
    spec.validate()?;
    spec.check_ell(ell)?;
    chi.check_matches(spec)?;
    if spec.total() > MAX_DENSE_QUBITS {
        return Err(Error::NumericalGuard(format!(
            "N + k = {} exceeds the dense limit {MAX_DENSE_QUBITS}",
            spec.total()
        )));
    }
    Ok(())
}

/// `Phi^{AR} ⊗ xi^{B_in}`. Pure kind: one vector with in-sector fiducials
/// `|phi_mu>` uniform over weight-`mu` strings. Mixed kind: the `B_rad`
/// purification traced out, leaving one basis state of `B_in` per member.
pub fn initial_ensemble(spec: &BlackHoleSpec, chi: &SectorSpectrum) -> Result<Ensemble> {
    check_dense(spec, chi, 0)?;
    let (n, k) = (spec.n, spec.k);
    let dr = 1usize << k;
    let amp_ar = 1.0 / (dr as f64).sqrt();
    let counts: Vec<usize> = sector_indices(n).iter().map(Vec::len).collect();
    let per_string = |b: usize| chi.chi(popcount(b) as i64) / counts[popcount(b)] as f64;
    let embed = |xi: &dyn Fn(usize) -> f64| {
        let mut v = DVector::zeros(1usize << (n + k + k));
        for a in 0..dr {
            for b in 0..1usize << n {
                let s = (a << n) | b;
                v[s * dr + a] = C64::new(amp_ar * xi(b), 0.0);
            }
        }
        v
    };
    let members = match spec.kind {
        Purity::Pure => vec![(1.0, embed(&|b| per_string(b).sqrt()))],
        Purity::Mixed => (0..1usize << n)
            .filter(|&b| per_string(b) > 0.0)
            .map(|b| (per_string(b), embed(&|x| if x == b { 1.0 } else { 0.0 })))
            .collect(),
    };
    Ok(Ensemble {
        s_qubits: n + k,
        r_qubits: k,
        members,
    })
}

impl Ensemble {
    /// `tr_S[Pi_m psi^{SR}]` for every `m`.
    pub fn reference_blocks(&self) -> Vec<DenseState> {
        let dr = 1usize << self.r_qubits;
        sector_indices(self.s_qubits)
            .iter()
            .map(|idx| {
                let mut x = DMatrix::zeros(dr, dr);
                for (w, v) in &self.members {
                    for &s in idx {
                        let row = v.rows(s * dr, dr);
                        x += (&row * row.adjoint()) * C64::new(*w, 0.0);
                    }
                }
                DenseState {
                    qubits: self.r_qubits,
                    storage: Storage::Full(x),
                }
                .compact()
            })
            .collect()
    }

    /// `tr[Pi_m rho^S]`.
    pub fn sector_weights(&self) -> Vec<f64> {
        self.reference_blocks().iter().map(DenseState::trace).collect()
    }

    /// `rho^S = tr_R psi^{SR}`.
    pub fn reduced_s(&self) -> DenseState {
        let dr = 1usize << self.r_qubits;
        let ds = 1usize << self.s_qubits;
        let mut m = DMatrix::zeros(ds, ds);
        for (w, v) in &self.members {
            let mat = DMatrix::from_fn(ds, dr, |s, r| v[s * dr + r]);
            m += (&mat * mat.adjoint()) * C64::new(*w, 0.0);
        }
        DenseState {
            qubits: self.s_qubits,
            storage: Storage::Full(m),
        }
    }

    /// `tr_{S_rad}[(U ⊗ I_R) psi^{SR} (U ⊗ I_R)^†]` on `S_in R`.
    pub fn scrambled_remainder(&self, u: &BlockHaarUnitary, sectors: &[Vec<usize>], ell: usize) -> DenseState {
        let dr = 1usize << self.r_qubits;
        let d_in = 1usize << (self.s_qubits - ell);
        let d_rad = 1usize << ell;
        let mut rho = DMatrix::zeros(d_in * dr, d_in * dr);
        for (w, v) in &self.members {
            let out = u.apply(sectors, self.r_qubits, v);
            let wmat = DMatrix::from_fn(d_in * dr, d_rad, |row, s_rad| {
                let (s_in, r) = (row / dr, row % dr);
                out[((s_in << ell) | s_rad) * dr + r]
            });
            rho += (&wmat * wmat.adjoint()) * C64::new(*w, 0.0);
        }
        DenseState {
            qubits: self.s_qubits - ell + self.r_qubits,
            storage: Storage::Full(rho),
        }
    }
}

/// `2^M / C(M, m) tr_{S'}[Pi_m^{S'} (pi^{S'_rad} ⊗ Phi^{S_in S'_in})]`, by
/// summing projector matrix elements.
fn s_in_block(m_qubits: usize, ell: usize, m: usize, sector_dim: usize) -> DenseState {
    let d_in = 1usize << (m_qubits - ell);
    let d_rad = 1usize << ell;
    let projector = |row: usize, col: usize| (row == col && popcount(row) == m) as u8 as f64;
    let norm = (1usize << m_qubits) as f64 / sector_dim as f64 / (d_in * d_rad) as f64;
    let mat = DMatrix::from_fn(d_in, d_in, |i, j| {
        let mut acc = 0.0;
        for s_rad in 0..d_rad {
            acc += projector((j << ell) | s_rad, (i << ell) | s_rad);
        }
        C64::new(norm * acc, 0.0)
    });
    DenseState {
        qubits: m_qubits - ell,
        storage: Storage::Full(mat),
    }
    .compact()
}

/// `Gamma^{S_in R} = sum_m D_m ⊗ tr_S[Pi_m psi^{SR}]`.
pub fn exact_gamma(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<DenseState> {
    check_dense(spec, chi, ell)?;
    gamma_from(&initial_ensemble(spec, chi)?, ell)
}

/// Stored diagonally whenever every factor is exactly diagonal.
pub fn gamma_from(ens: &Ensemble, ell: usize) -> Result<DenseState> {
    let m_qubits = ens.s_qubits;
    let sectors = sector_indices(m_qubits);
    let mut gamma = DenseState::zeros(m_qubits - ell + ens.r_qubits);
    for (m, x) in ens.reference_blocks().iter().enumerate() {
        if x.trace() == 0.0 {
            continue;
        }
        let d = s_in_block(m_qubits, ell, m, sectors[m].len());
        gamma.add_assign(&d.kron(x)?)?;
    }
    Ok(gamma)
}

/// Diagonal of the Schur average `sum_m tr[Pi_m rho^S] Pi_m / d_m`.
pub fn schur_average_diagonal(ens: &Ensemble) -> Vec<f64> {
    let sectors = sector_indices(ens.s_qubits);
    let t = ens.sector_weights();
    let mut e = vec![0.0; 1usize << ens.s_qubits];
    for (m, idx) in sectors.iter().enumerate() {
        for &s in idx {
            e[s] = t[m] / idx.len() as f64;
        }
    }
    e
}

/// `p_n` from the exact Schur average, reduced onto `S_rad`.
pub fn dense_radiation_distribution(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<Vec<f64>> {
    check_dense(spec, chi, ell)?;
    let e = schur_average_diagonal(&initial_ensemble(spec, chi)?);
    let mask = (1usize << ell) - 1;
    let mut p = vec![0.0; ell + 1];
    for (s, x) in e.iter().enumerate() {
        p[popcount(s & mask)] += x;
    }
    Ok(p)
}

/// `P(nu)`, the up-spin distribution of `Gamma^{S_in}`.
pub fn dense_sin_marginal(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<Vec<f64>> {
    let g = exact_gamma(spec, chi, ell)?.trace_low(spec.k);
    let mut p = vec![0.0; spec.total() - ell + 1];
    for (s_in, x) in g.diagonal().iter().enumerate() {
        p[popcount(s_in)] += x;
    }
    Ok(p)
}

/// `|| Gamma^{S_in R} - Gamma^{S_in} ⊗ pi^R ||_1`.
pub fn dense_eta(spec: &BlackHoleSpec, chi: &SectorSpectrum, ell: usize) -> Result<f64> {
    let g = exact_gamma(spec, chi, ell)?;
    let product = g.trace_low(spec.k).kron(&DenseState::maximally_mixed(spec.k))?;
    trace_distance(&g, &product)
}
