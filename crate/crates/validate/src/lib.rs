//! Dense small-system oracle for the symmetry-preserving scrambling model:
//! block-diagonal Haar sampling, the exact `Gamma^{S_in R}`, brute-force
//! `p_n` / `P(nu)` / `eta`, and a Monte-Carlo check of the decoupling bounds.

pub mod dense;
pub mod haar;
pub mod mc;
pub mod oracle;

pub use dense::{trace_distance, DenseState};
pub use haar::{sample_block_haar, BlockHaarUnitary};
pub use mc::{run_validation, run_validation_with, BoundMode, ValidationOptions, ValidationReport};
pub use oracle::{dense_eta, dense_radiation_distribution, dense_sin_marginal, exact_gamma};
