//! Spectral toolkit for dyadic frequency analysis on the torus.
//!
//! The crate provides, bottom to top:
//!
//! * [`grid`], [`field`], [`multiplier`], [`norms`], [`io`] — periodic grids,
//!   spectral fields with dealiased products, Fourier multipliers and
//!   differential operators, Lebesgue norms, and a fixed binary field format;
//! * [`lp`] — the smooth dyadic ring decomposition with partition,
//!   orthogonality, and Bernstein diagnostics;
//! * [`besov`] — frequency-weighted block norms, including the hybrid
//!   two-regime norms and their time-integrated (per-block-first) variants;
//! * [`paraproduct`] — the product split into paraproducts and remainder,
//!   commutators, pointwise composition, and randomized estimate probes;
//! * [`green`] — the exact frequency-side propagator of the linearized
//!   barotropic flow system, its four-term high-frequency expansion, heat
//!   and viscoelastic semigroups, and decay-rate probes;
//! * [`oscillation`] — modulated initial data and norm-scaling sweeps;
//! * [`solver`] — a pseudospectral exponential integrator for the full
//!   nonlinear system with block-norm monitoring;
//! * [`fit`] — shared least-squares rate extraction.

pub mod error;
pub mod fft;
pub mod grid;
pub mod field;
pub mod multiplier;
pub mod norms;
pub mod io;
pub mod fit;
pub mod lp;
pub mod sampling;
pub mod besov;
pub mod paraproduct;
pub mod green;
pub mod oscillation;
pub mod solver;

pub use error::{Error, Result};
pub use field::{Rank, SpectralField};
pub use grid::Grid;
/// Coefficient scalar used throughout the public API (re-exported so
/// downstream crates need not pin the same `num-complex` version).
pub use num_complex::Complex64;
