//! Numerics for information recovery in the Hayden-Preskill protocol with a
//! conserved Z-axis angular momentum.
//!
//! Conventions: natural logs internally, spin-1/2 units with `hbar = 1`,
//! `mu` counts up-spins of `B_in`, `m` of the scrambled system `S = A B_in`
//! and `n` of the radiated subsystem `S_rad`.

pub mod bounds;
pub mod clipping;
pub mod error;
pub mod io;
pub mod logspace;
pub mod radiation;
pub mod remnant;
pub mod spectrum;

pub use error::{Error, Result};
pub use logspace::{log_binomial, log_sum_exp, LogAccumulator, LogReal, Sign};
pub use spectrum::{gaussian_spectrum, moments, BlackHoleSpec, Purity, SectorSpectrum, WidthConvention};
