//! Seeded random fields with prescribed multiscale spectra.
//!
//! Estimate probes and residual checks need generic fields whose ring
//! blocks carry comparable, controllable energy. The sampler draws one
//! complex Gaussian per lattice mode, shapes it radially so that ring `j`
//! has `L^2` size about `2^{-j * slope}`, projects onto conjugate symmetry
//! (real fields), zeroes the mean and Nyquist rows, and band-limits to the
//! covered band so that decompositions reconstruct exactly. A fixed 64-bit
//! seed makes every draw reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Rank, SpectralField};
use crate::grid::Grid;

/// Spectrum shape for sampled fields.
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    /// Ring `j` receives `L^2` weight about `2^{-j * slope}`.
    pub slope: f64,
    /// Keep only modes with `|xi| <= band_top`; `None` means the grid's
    /// covered band.
    pub band_top: Option<f64>,
}

impl SampleSpec {
    /// Flat ring energies, band-limited to the covered band.
    pub fn flat() -> Self {
        SampleSpec { slope: 0.0, band_top: None }
    }

    /// Decaying ring energies `2^{-j * slope}`.
    pub fn decaying(slope: f64) -> Self {
        SampleSpec { slope, band_top: None }
    }

    pub fn banded(mut self, top: f64) -> Self {
        self.band_top = Some(top);
        self
    }
}

/// One standard complex Gaussian via Box-Muller.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * th.cos(), r * th.sin())
}

/// Draw a real random field with the given spectrum shape.
pub fn sample_field(grid: Grid, rank: Rank, spec: SampleSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, rank);
    let band_top = spec.band_top.unwrap_or(grid.covered_band().1);
    let vol = grid.len();
    for c in 0..f.n_components() {
        for idx in 1..vol {
            // Draw unconditionally so the stream position does not depend
            // on the band filter.
            let z = complex_gaussian(&mut rng);
            if grid.is_nyquist(idx) {
                continue;
            }
            let r = grid.xi_norm(idx);
            if r > band_top {
                continue;
            }
            // Ring-count normalization: white noise carries ring energy
            // proportional to the mode count, which grows like 2^{j n};
            // divide out its square root so the slope alone sets the ring
            // profile.
            let j = r.log2();
            let n_ring = (j * grid.dim() as f64).exp2();
            let amp = (-j * spec.slope).exp2() / n_ring.sqrt();
            *f.coeff_mut(c, idx) = z * amp;
        }
    }
    f.hermitian_symmetrize();
    f.zero_mean();
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::DyadicSystem;
    use std::f64::consts::PI;

    #[test]
    fn samples_are_reproducible_and_real() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let a = sample_field(g, Rank::Scalar, SampleSpec::flat(), 42);
        let b = sample_field(g, Rank::Scalar, SampleSpec::flat(), 42);
        assert_eq!(a.max_diff(&b).unwrap(), 0.0);
        let c = sample_field(g, Rank::Scalar, SampleSpec::flat(), 43);
        assert!(a.max_diff(&c).unwrap() > 1e-6);
        assert!(a.hermitian_defect() < 1e-15);
        assert_eq!(a.mean(0), Complex64::default());
    }

    #[test]
    fn sampled_fields_reconstruct_exactly() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::decaying(1.0), 7);
        assert!(sys.coverage_defect(&f) < 1e-12);
    }

    #[test]
    fn slope_shapes_ring_energies() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::decaying(2.0), 11);
        let norms = sys.block_norms(&f, 2.0).unwrap();
        // Interior rings: energy ratio between j and j+2 should reflect the
        // slope within a generous stochastic factor.
        let at = |j: i32| norms.iter().find(|(k, _)| *k == j).unwrap().1;
        let ratio = at(1) / at(3);
        assert!(
            ratio > 4.0 && ratio < 64.0,
            "ring energy ratio {ratio} inconsistent with slope 2"
        );
    }
}
