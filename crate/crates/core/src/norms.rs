//! Physical-space Lebesgue norms.
//!
//! Norms are computed by quadrature on the sample lattice:
//! `||f||_p = ( (L/N)^n * sum_x |f(x)|^p )^{1/p}` with `p = inf` the sample
//! maximum. Vector and matrix fields are measured through their pointwise
//! Euclidean magnitude, and complex fields through `|f(x)|`, so modulated
//! profiles are handled uniformly.

use crate::error::{Error, Result};
use crate::field::SpectralField;

/// `L^p` norm of a field for `1 <= p <= inf`.
pub fn lebesgue_norm(f: &SpectralField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Inadmissible(format!("Lebesgue exponent p = {p}, need p >= 1")));
    }
    let grid = f.grid();
    let vol = grid.len();
    let comps = f.n_components();
    let samples = f.to_complex_samples();
    let mut mags = vec![0.0f64; vol];
    for c in 0..comps {
        for (i, m) in mags.iter_mut().enumerate() {
            *m += samples[c * vol + i].norm_sqr();
        }
    }
    if p.is_infinite() {
        return Ok(mags.iter().map(|m| m.sqrt()).fold(0.0, f64::max));
    }
    let cell = grid.cell_volume();
    if p == 2.0 {
        return Ok((cell * mags.iter().sum::<f64>()).sqrt());
    }
    let sum: f64 = mags.iter().map(|m| m.sqrt().powf(p)).sum();
    Ok((cell * sum).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rank;
    use crate::grid::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn cosine_norms_match_closed_forms() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        f.set_mode_pair(0, &[1, 0], Complex64::new(0.5, 0.0)).unwrap();
        // On [0, 2pi]^2: ||cos x_1||_2 = sqrt(2) * pi, ||.||_inf = 1,
        // ||.||_4 = (2 pi * 3 pi / 4)^{1/4}. These integrands are trig
        // polynomials below the grid band, so the quadrature is exact.
        assert!((lebesgue_norm(&f, 2.0).unwrap() - 2.0f64.sqrt() * PI).abs() < 1e-10);
        assert!((lebesgue_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        let l4_expected = (2.0 * PI * 3.0 * PI / 4.0).powf(0.25);
        assert!((lebesgue_norm(&f, 4.0).unwrap() - l4_expected).abs() < 1e-10);
        // |cos| has a kink, so the p = 1 quadrature is only approximate:
        // ||cos x_1||_1 = 8 pi up to the trapezoidal error of |cos|.
        assert!((lebesgue_norm(&f, 1.0).unwrap() - 8.0 * PI).abs() < 0.05);
        // A nonnegative trig polynomial is exact at p = 1 as well:
        // ||1 + cos x_1||_1 = (2 pi)^2.
        let mut g1 = SpectralField::zeros(g, Rank::Scalar);
        g1.set_mode_pair(0, &[1, 0], Complex64::new(0.5, 0.0)).unwrap();
        *g1.coeff_mut(0, 0) = Complex64::new(1.0, 0.0);
        let area = (2.0 * PI) * (2.0 * PI);
        assert!((lebesgue_norm(&g1, 1.0).unwrap() - area).abs() < 1e-10 * area);
    }

    #[test]
    fn parseval_agrees_with_coefficient_sum() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        f.set_mode_pair(0, &[2, 3], Complex64::new(0.3, 0.4)).unwrap();
        f.set_mode_pair(0, &[5, -1], Complex64::new(-0.2, 0.1)).unwrap();
        let direct = lebesgue_norm(&f, 2.0).unwrap();
        assert!((direct - f.l2_norm()).abs() < 1e-10 * direct);
    }

    #[test]
    fn vector_fields_use_euclidean_magnitude() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        // Constant vector (3, 4): |v| = 5 everywhere.
        let mut v = SpectralField::zeros(g, Rank::Vector);
        *v.coeff_mut(0, 0) = Complex64::new(3.0, 0.0);
        *v.coeff_mut(1, 0) = Complex64::new(4.0, 0.0);
        assert!((lebesgue_norm(&v, f64::INFINITY).unwrap() - 5.0).abs() < 1e-12);
        let l2 = lebesgue_norm(&v, 2.0).unwrap();
        assert!((l2 - 5.0 * 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn rejects_p_below_one() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let f = SpectralField::zeros(g, Rank::Scalar);
        assert!(lebesgue_norm(&f, 0.5).is_err());
        assert!(lebesgue_norm(&f, f64::NAN).is_err());
    }
}
