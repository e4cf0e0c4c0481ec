//! Highly oscillating initial data and the norm-scaling experiment that
//! shows why such data is small in spaces with a negative high-frequency
//! index.
//!
//! All generators modulate a fixed smooth periodic envelope
//! `phi(x) = exp(-4 sum_i sin^2(x_i / 2)) - mean` by a carrier wave of
//! frequency `1/epsilon`. The carrier is snapped to an integer lattice
//! frequency so the construction is leakage-free, and must stay below
//! half the Nyquist frequency so the modulated spectrum is resolved.

use crate::besov::{hybrid_norm, HybridParams};
use crate::error::{Error, Result};
use crate::field::{Rank, SpectralField};
use crate::fit::{fit_line, FitResult};
use crate::grid::Grid;
use crate::lp::DyadicSystem;
use crate::multiplier::gradient;

/// Shapes of oscillating data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillationKind {
    /// `e^{i x_1 / eps} phi(x)`: a complex scalar, kept as its real and
    /// imaginary parts. Any dimension.
    ScalarModulated,
    /// `(0, sin(x_1 / eps) phi(x))`: a shear velocity in two dimensions.
    PlanarShear,
    /// `sin(x_3 / eps) (-d_2 phi, d_1 phi, 0)`: a divergence-free shear
    /// velocity in three dimensions.
    ShearVelocity,
}

impl OscillationKind {
    pub fn parse(name: &str) -> Option<OscillationKind> {
        match name {
            "scalar_modulated" => Some(OscillationKind::ScalarModulated),
            "planar_shear" => Some(OscillationKind::PlanarShear),
            "shear_velocity" => Some(OscillationKind::ShearVelocity),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OscillationKind::ScalarModulated => "scalar_modulated",
            OscillationKind::PlanarShear => "planar_shear",
            OscillationKind::ShearVelocity => "shear_velocity",
        }
    }
}

/// Components of one oscillating datum.
#[derive(Debug, Clone)]
pub enum OscillatingField {
    /// Real and imaginary parts of a complex scalar.
    ComplexScalar { re: SpectralField, im: SpectralField },
    /// A real velocity field.
    Velocity(SpectralField),
}

/// An oscillating datum with its snapped wavelength.
#[derive(Debug, Clone)]
pub struct OscillatingDatum {
    pub kind: OscillationKind,
    /// Snapped wavelength: the reciprocal of the carrier frequency (or
    /// infinity when the carrier is zero).
    pub epsilon: f64,
    /// Carrier frequency `round(1/epsilon)` on the integer lattice.
    pub carrier: i64,
    pub field: OscillatingField,
}

/// Sharpness of the periodic envelope bump. The value balances two
/// competing needs: a concentrated profile in space against a spectrum
/// narrow enough that a wave packet on carrier 4 (the coarsest sweep
/// point) already sits cleanly inside two dyadic rings. Wider envelopes
/// smear coarse carriers across several rings and visibly bias the
/// fitted scaling exponent.
const ENVELOPE_SHARPNESS: f64 = 1.5;

/// Pointwise samples of the raw periodic bump
/// `exp(-c sum_i sin^2(x_i/2))` with `c = ENVELOPE_SHARPNESS`.
fn raw_bump_samples(grid: Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| {
            let x = grid.position(idx);
            let mut s = 0.0;
            for i in 0..grid.dim() {
                s += (0.5 * x[i]).sin().powi(2);
            }
            (-ENVELOPE_SHARPNESS * s).exp()
        })
        .collect()
}

/// The smooth periodic envelope: the raw bump minus its mean. Its
/// spectrum decays super-exponentially (coefficients are modified Bessel
/// values), so sampled products with low carriers are alias-free to
/// machine precision.
///
/// The generators modulate the raw bump and remove the mean of the
/// *product*: subtracting the bump's own mean first would delete the
/// carrier line from the modulated spectrum and distort the wave
/// packet. In the zero-carrier limit the two orders coincide and the
/// datum degenerates to exactly this field.
pub fn envelope(grid: Grid) -> SpectralField {
    let samples = raw_bump_samples(grid);
    let mut f = SpectralField::from_real_samples(grid, Rank::Scalar, &samples)
        .expect("envelope samples match the grid");
    f.zero_mean();
    f
}

fn snap_carrier(grid: Grid, epsilon: f64) -> Result<i64> {
    if !(epsilon > 0.0) {
        return Err(Error::Inadmissible(format!(
            "oscillation wavelength must be positive, got {epsilon}"
        )));
    }
    let carrier = (1.0 / epsilon).round();
    if carrier >= grid.xi_nyquist() / 2.0 {
        return Err(Error::InvalidGrid(format!(
            "under-resolved oscillation: carrier frequency {carrier} must stay below \
             half the Nyquist frequency {}",
            grid.xi_nyquist()
        )));
    }
    Ok(carrier as i64)
}

/// Build an oscillating datum on the grid, snapping `1/epsilon` to the
/// lattice. A zero carrier (epsilon beyond the period) degenerates to the
/// envelope itself for the modulated kind and to zero for the shear
/// kinds.
pub fn make_oscillating(
    grid: Grid,
    kind: OscillationKind,
    epsilon: f64,
) -> Result<OscillatingDatum> {
    let carrier = snap_carrier(grid, epsilon)?;
    let snapped = if carrier == 0 {
        f64::INFINITY
    } else {
        1.0 / carrier as f64
    };
    let phi_samples = raw_bump_samples(grid);
    let field = match kind {
        OscillationKind::ScalarModulated => {
            let mut re = Vec::with_capacity(grid.len());
            let mut im = Vec::with_capacity(grid.len());
            for (idx, &p) in phi_samples.iter().enumerate() {
                let x1 = grid.position(idx)[0];
                re.push((carrier as f64 * x1).cos() * p);
                im.push((carrier as f64 * x1).sin() * p);
            }
            let mut re = SpectralField::from_real_samples(grid, Rank::Scalar, &re)?;
            let mut im = SpectralField::from_real_samples(grid, Rank::Scalar, &im)?;
            re.zero_mean();
            im.zero_mean();
            OscillatingField::ComplexScalar { re, im }
        }
        OscillationKind::PlanarShear => {
            if grid.dim() != 2 {
                return Err(Error::Inadmissible(format!(
                    "planar shear data is two-dimensional, grid has n = {}",
                    grid.dim()
                )));
            }
            let mut samples = vec![0.0; 2 * grid.len()];
            for (idx, &p) in phi_samples.iter().enumerate() {
                let x1 = grid.position(idx)[0];
                samples[grid.len() + idx] = (carrier as f64 * x1).sin() * p;
            }
            let mut v = SpectralField::from_real_samples(grid, Rank::Vector, &samples)?;
            v.zero_mean();
            OscillatingField::Velocity(v)
        }
        OscillationKind::ShearVelocity => {
            if grid.dim() != 3 {
                return Err(Error::Inadmissible(format!(
                    "shear velocity data is three-dimensional, grid has n = {}",
                    grid.dim()
                )));
            }
            let grad = gradient(&envelope(grid))?;
            let grad_samples = grad.to_real_samples();
            let (d1, d2) = (
                &grad_samples[..grid.len()],
                &grad_samples[grid.len()..2 * grid.len()],
            );
            let mut samples = vec![0.0; 3 * grid.len()];
            for idx in 0..grid.len() {
                let x3 = grid.position(idx)[2];
                let s = (carrier as f64 * x3).sin();
                samples[idx] = -s * d2[idx];
                samples[grid.len() + idx] = s * d1[idx];
            }
            OscillatingField::Velocity(SpectralField::from_real_samples(
                grid,
                Rank::Vector,
                &samples,
            )?)
        }
    };
    Ok(OscillatingDatum {
        kind,
        epsilon: snapped,
        carrier,
        field,
    })
}

/// One `(epsilon, norm)` measurement of the sweep.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    pub epsilon: f64,
    pub norm: f64,
}

/// Outcome of a wavelength sweep: measured norms and the fitted
/// log-norm-versus-log-epsilon line.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub kind: OscillationKind,
    pub p: f64,
    /// Exponent the hybrid-norm mechanism predicts: `1 - n/p`.
    pub expected_slope: f64,
    pub points: Vec<ScalingPoint>,
    pub fit: FitResult,
}

fn datum_norm(sys: &DyadicSystem, datum: &OscillatingDatum, hp: &HybridParams) -> Result<f64> {
    match &datum.field {
        OscillatingField::ComplexScalar { re, im } => {
            let a = hybrid_norm(sys, re, hp)?;
            let b = hybrid_norm(sys, im, hp)?;
            Ok(a.hypot(b))
        }
        OscillatingField::Velocity(v) => hybrid_norm(sys, v, hp),
    }
}

/// Sweep the wavelength list and fit the scaling of the hybrid norm with
/// indices `(n/2 - 1, n/p - 1)`. No admissibility guard: exposes the
/// contrast case `p = 2` where the norm does not decay.
pub fn scaling_sweep(
    grid: Grid,
    kind: OscillationKind,
    p: f64,
    eps_list: &[f64],
    r0: f64,
) -> Result<ScalingReport> {
    let n = grid.dim() as f64;
    let sys = DyadicSystem::new(grid);
    let hp = HybridParams::new(0.5 * n - 1.0, n / p - 1.0, p, r0)?;
    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let datum = make_oscillating(grid, kind, eps)?;
        if datum.carrier == 0 {
            return Err(Error::Inadmissible(
                "scaling sweep needs a nonzero carrier for every wavelength".into(),
            ));
        }
        let norm = datum_norm(&sys, &datum, &hp)?;
        points.push(ScalingPoint {
            epsilon: datum.epsilon,
            norm,
        });
    }
    let xs: Vec<f64> = points.iter().map(|q| q.epsilon.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|q| q.norm.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(ScalingReport {
        kind,
        p,
        expected_slope: 1.0 - n / p,
        points,
        fit,
    })
}

/// Low/high frequency threshold used by the scaling experiment. The
/// sweep has no viscosity in play, so the threshold sits at unit
/// frequency: every carrier in a dyadic sweep then lands in the
/// high-frequency part, where the negative index produces the decay the
/// experiment measures. Larger thresholds let the coarsest carriers leak
/// into the unweighted low-frequency sum and bias the fit upward.
const SCALING_R0: f64 = 1.0;

/// The guarded scaling experiment: requires `p > n` so the expected
/// exponent `1 - n/p` is positive, then runs [`scaling_sweep`] with the
/// unit low/high threshold.
pub fn oscillation_scaling_experiment(
    grid: Grid,
    kind: OscillationKind,
    p: f64,
    eps_list: &[f64],
) -> Result<ScalingReport> {
    let n = grid.dim() as f64;
    if !(p > n) {
        return Err(Error::Inadmissible(format!(
            "scaling exponent 1 - n/p = {} is nonpositive; the oscillation-scaling \
             regime requires p > n",
            1.0 - n / p
        )));
    }
    scaling_sweep(grid, kind, p, eps_list, SCALING_R0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::divergence;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Modified Bessel function of the first kind `I_m(z)`, by its
    /// absolutely convergent series.
    fn bessel_i(m: u32, z: f64) -> f64 {
        let half = 0.5 * z;
        let mut term = half.powi(m as i32);
        for k in 1..=m {
            term /= k as f64;
        }
        let mut sum = 0.0;
        let mut j = 0u32;
        loop {
            sum += term;
            j += 1;
            term *= half * half / ((j as f64) * ((j + m) as f64));
            if term < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn envelope_spectrum_matches_bessel_coefficients() {
        // exp(-c sin^2(x/2)) = e^{-c/2} e^{(c/2) cos x}, whose Fourier
        // coefficients are e^{-c/2} I_m(c/2).
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let c = super::ENVELOPE_SHARPNESS;
        let samples: Vec<f64> = (0..64)
            .map(|k| {
                let x = g.position(k)[0];
                (-c * (0.5 * x).sin().powi(2)).exp()
            })
            .collect();
        let f = SpectralField::from_real_samples(g, Rank::Scalar, &samples).unwrap();
        let scale = (-0.5 * c).exp();
        for m in 0..6i64 {
            let idx = g.index_of_freq(&[m, 0, 0]).unwrap();
            let coeff = f.coeff(0, idx);
            assert_relative_eq!(
                coeff.re,
                scale * bessel_i(m as u32, 0.5 * c),
                max_relative = 1e-12
            );
            assert!(coeff.im.abs() < 1e-15);
        }
        let env = envelope(g);
        assert!(env.mean(0).norm() < 1e-15);
    }

    #[test]
    fn shear_velocity_is_divergence_free() {
        let g = Grid::new(3, 32, 2.0 * PI).unwrap();
        let datum = make_oscillating(g, OscillationKind::ShearVelocity, 0.25).unwrap();
        let OscillatingField::Velocity(v) = &datum.field else {
            panic!("shear velocity produces a velocity field");
        };
        let div = divergence(v).unwrap();
        assert!(div.l2_norm() < 1e-12 * v.l2_norm().max(1.0));
        assert!(v.l2_norm() > 1e-3);
    }

    #[test]
    fn infinite_wavelength_degenerates_to_the_envelope() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let datum = make_oscillating(g, OscillationKind::ScalarModulated, 1e9).unwrap();
        assert_eq!(datum.carrier, 0);
        let OscillatingField::ComplexScalar { re, im } = &datum.field else {
            panic!("modulated kind produces a complex scalar");
        };
        assert!(re.max_diff(&envelope(g)).unwrap() < 1e-14);
        assert!(im.l2_norm() < 1e-14);
    }

    #[test]
    fn wavelength_snaps_to_the_lattice() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let datum = make_oscillating(g, OscillationKind::PlanarShear, 0.26).unwrap();
        assert_eq!(datum.carrier, 4);
        assert_relative_eq!(datum.epsilon, 0.25);
    }

    #[test]
    fn unresolved_carrier_is_rejected() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let err = make_oscillating(g, OscillationKind::PlanarShear, 1.0 / 30.0).unwrap_err();
        assert!(
            err.to_string().contains("under-resolved oscillation"),
            "got: {err}"
        );
    }

    #[test]
    fn kinds_check_the_dimension() {
        let g2 = Grid::new(2, 32, 2.0 * PI).unwrap();
        let g3 = Grid::new(3, 16, 2.0 * PI).unwrap();
        assert!(make_oscillating(g2, OscillationKind::ShearVelocity, 0.25).is_err());
        assert!(make_oscillating(g3, OscillationKind::PlanarShear, 0.25).is_err());
    }

    #[test]
    fn norm_scales_like_the_predicted_exponent() {
        let g = Grid::new(2, 256, 2.0 * PI).unwrap();
        let eps: Vec<f64> = (2..=5).map(|k| 0.5f64.powi(k)).collect();
        let report =
            oscillation_scaling_experiment(g, OscillationKind::PlanarShear, 4.0, &eps).unwrap();
        assert!(
            (report.fit.slope - 0.5).abs() < 0.1,
            "slope {} vs expected 0.5",
            report.fit.slope
        );
        assert!(report.fit.r_squared > 0.98);
    }

    #[test]
    fn critical_exponent_norm_does_not_decay() {
        let g = Grid::new(2, 256, 2.0 * PI).unwrap();
        let eps: Vec<f64> = (2..=5).map(|k| 0.5f64.powi(k)).collect();
        let report = scaling_sweep(g, OscillationKind::PlanarShear, 2.0, &eps, 1.0).unwrap();
        assert!(
            report.fit.slope.abs() < 0.1,
            "control slope {} should vanish",
            report.fit.slope
        );
    }

    #[test]
    fn subcritical_exponent_is_rejected() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let eps = [0.25, 0.125];
        let err = oscillation_scaling_experiment(g, OscillationKind::PlanarShear, 2.0, &eps)
            .unwrap_err();
        assert!(err.to_string().contains("requires p > n"), "got: {err}");
    }
}
