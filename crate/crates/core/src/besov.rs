//! Dyadic-block norms: Besov, hybrid (split Lebesgue exponents across a
//! frequency threshold), and time-integrated block norms.
//!
//! The hybrid norm weighs low-frequency blocks in `L^2` and high-frequency
//! blocks in `L^p`, with the crossover at a threshold frequency `R0`:
//!
//! ```text
//! ||f|| = sum_{2^j <= R0} 2^{j s} ||Delta_j f||_2
//!       + sum_{2^j >  R0} 2^{j sigma} ||Delta_j f||_p
//! ```
//!
//! Time-integrated ("block-first") norms take an `L^r` norm in time of each
//! block's Lebesgue norm *before* summing over blocks; for `r = 1` the two
//! orders of summation agree exactly.
//!
//! Mean modes are excluded throughout (these are homogeneous norms); a
//! nonzero mean is tolerated with a warning. Block sums run over the grid's
//! ring range, so energy outside the covered band is invisible to these
//! norms — `DyadicSystem::coverage_defect` measures that truncation.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::DyadicSystem;
use crate::norms::lebesgue_norm;

/// Parameters of the hybrid norm: low-frequency regularity `s` (measured in
/// `L^2`), high-frequency regularity `sigma` (measured in `L^p`), and the
/// threshold `R0` separating the two regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams {
    pub s: f64,
    pub sigma: f64,
    pub p: f64,
    pub r0: f64,
}

impl HybridParams {
    pub fn new(s: f64, sigma: f64, p: f64, r0: f64) -> Result<Self> {
        if !s.is_finite() || !sigma.is_finite() {
            return Err(Error::Inadmissible(format!(
                "hybrid norm exponents must be finite, got s = {s}, sigma = {sigma}"
            )));
        }
        if !(p >= 2.0) {
            return Err(Error::Inadmissible(format!(
                "hybrid norm requires p >= 2, got p = {p}"
            )));
        }
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Inadmissible(format!(
                "hybrid norm threshold must be positive and finite, got R0 = {r0}"
            )));
        }
        Ok(HybridParams { s, sigma, p, r0 })
    }

    /// Default threshold for a given total viscosity: the frequency at which
    /// the linearized acoustic eigenvalues degenerate.
    pub fn default_threshold(nu_bar: f64) -> f64 {
        2.0 / nu_bar
    }

    /// True when ring `j` belongs to the low-frequency regime.
    pub fn is_low(&self, j: i32) -> bool {
        (j as f64).exp2() <= self.r0
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value.is_nan() || value < 1.0 {
        return Err(Error::Inadmissible(format!(
            "{name} must lie in [1, inf], got {value}"
        )));
    }
    Ok(())
}

fn warn_on_mean(f: &SpectralField) {
    let scale = 1.0 + f.l2_norm();
    for c in 0..f.n_components() {
        let m = f.mean(c).norm();
        if m > 1e-10 * scale {
            log::warn!(
                "homogeneous block norm ignores a nonzero mean (component {c}, |mean| = {m:.3e})"
            );
            return;
        }
    }
}

/// `l^q` sum over rings of `2^{j s} ||Delta_j f||_p`.
pub fn besov_norm(sys: &DyadicSystem, f: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    warn_on_mean(f);
    let terms: Vec<f64> = sys
        .block_norms(f, p)?
        .into_iter()
        .map(|(j, norm)| (j as f64 * s).exp2() * norm)
        .collect();
    Ok(sequence_lq(&terms, q))
}

fn sequence_lq(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().cloned().fold(0.0, f64::max)
    } else if (q - 1.0).abs() < 1e-14 {
        terms.iter().sum()
    } else {
        terms.iter().map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Hybrid norm: `L^2` blocks with weight `2^{j s}` up to the threshold,
/// `L^p` blocks with weight `2^{j sigma}` above it.
pub fn hybrid_norm(sys: &DyadicSystem, f: &SpectralField, hp: &HybridParams) -> Result<f64> {
    warn_on_mean(f);
    let low = sys.block_norms(f, 2.0)?;
    let high = sys.block_norms(f, hp.p)?;
    let mut total = 0.0;
    for ((j, n2), (_, np)) in low.into_iter().zip(high) {
        if hp.is_low(j) {
            total += (j as f64 * hp.s).exp2() * n2;
        } else {
            total += (j as f64 * hp.sigma).exp2() * np;
        }
    }
    Ok(total)
}

/// Per-block norm samples of a time-dependent field, in both the `L^2` and
/// `L^p` families, on strictly increasing sample instants.
#[derive(Debug, Clone)]
pub struct NormSeries {
    p: f64,
    js: Vec<i32>,
    times: Vec<f64>,
    /// `l2[sample][block]`
    l2: Vec<Vec<f64>>,
    /// `lp[sample][block]`
    lp: Vec<Vec<f64>>,
}

impl NormSeries {
    pub fn new(sys: &DyadicSystem, p: f64) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(NormSeries {
            p,
            js: sys.js().collect(),
            times: Vec::new(),
            l2: Vec::new(),
            lp: Vec::new(),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn js(&self) -> &[i32] {
        &self.js
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Per-sample `L^2` block norms, one row per recorded time, one column
    /// per ring in [`Self::js`] order.
    pub fn l2_rows(&self) -> &[Vec<f64>] {
        &self.l2
    }

    /// Per-sample `L^p` block norms, laid out like [`Self::l2_rows`].
    pub fn lp_rows(&self) -> &[Vec<f64>] {
        &self.lp
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Record the block norms of `f` at time `t`. Times must strictly
    /// increase; the field must live on the grid the series was built for.
    pub fn push_sample(&mut self, sys: &DyadicSystem, t: f64, f: &SpectralField) -> Result<()> {
        if self.js.as_slice() != sys.js().collect::<Vec<_>>().as_slice() {
            return Err(Error::Mismatch(
                "norm series recorded on a different ring range".into(),
            ));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Inadmissible(format!(
                    "norm series times must strictly increase ({t} after {last})"
                )));
            }
        }
        let mut row2 = Vec::with_capacity(self.js.len());
        let mut rowp = Vec::with_capacity(self.js.len());
        for &j in &self.js {
            let block = sys.delta_j(f, j)?;
            row2.push(block.l2_norm());
            rowp.push(lebesgue_norm(&block, self.p)?);
        }
        self.times.push(t);
        self.l2.push(row2);
        self.lp.push(rowp);
        Ok(())
    }

    /// `L^r` norm in time of one block's sample sequence: trapezoid
    /// quadrature of the `r`-th power for finite `r`, max for `r = inf`.
    /// A single sample spans a zero-length interval, so finite `r` gives 0.
    fn time_lr(&self, samples: impl Iterator<Item = f64> + Clone, r: f64) -> f64 {
        if r.is_infinite() {
            return samples.fold(0.0, f64::max);
        }
        let vals: Vec<f64> = samples.map(|v| v.powf(r)).collect();
        let mut integral = 0.0;
        for i in 1..vals.len() {
            integral += 0.5 * (vals[i] + vals[i - 1]) * (self.times[i] - self.times[i - 1]);
        }
        integral.powf(1.0 / r)
    }
}

/// Time-integrated hybrid norm: per-block `L^r` in time first, then the
/// hybrid-weighted sum over rings.
pub fn chemin_lerner_norm(series: &NormSeries, r: f64, hp: &HybridParams) -> Result<f64> {
    check_exponent("r", r)?;
    if series.is_empty() {
        return Err(Error::Inadmissible("empty norm series".into()));
    }
    if (series.p - hp.p).abs() > 1e-12 {
        return Err(Error::Mismatch(format!(
            "norm series sampled with p = {} but hybrid parameters use p = {}",
            series.p, hp.p
        )));
    }
    let mut total = 0.0;
    for (b, &j) in series.js.iter().enumerate() {
        if hp.is_low(j) {
            let tn = series.time_lr(series.l2.iter().map(move |row| row[b]), r);
            total += (j as f64 * hp.s).exp2() * tn;
        } else {
            let tn = series.time_lr(series.lp.iter().map(move |row| row[b]), r);
            total += (j as f64 * hp.sigma).exp2() * tn;
        }
    }
    Ok(total)
}

/// Both sides of the convexity (interpolation) inequality between two
/// hybrid norms sharing `p` and threshold: with intermediate exponents
/// `theta * a + (1 - theta) * b` the norm is bounded by the product of
/// endpoint norms raised to `theta` and `1 - theta`, with constant one.
pub fn interpolation_probe(
    sys: &DyadicSystem,
    f: &SpectralField,
    a: &HybridParams,
    b: &HybridParams,
    theta: f64,
) -> Result<(f64, f64)> {
    if (a.p - b.p).abs() > 1e-12 || (a.r0 - b.r0).abs() > 1e-12 {
        return Err(Error::Mismatch(
            "interpolation endpoints must share p and threshold".into(),
        ));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Inadmissible(format!(
            "interpolation weight must lie in [0, 1], got {theta}"
        )));
    }
    let mid = HybridParams {
        s: theta * a.s + (1.0 - theta) * b.s,
        sigma: theta * a.sigma + (1.0 - theta) * b.sigma,
        p: a.p,
        r0: a.r0,
    };
    let lhs = hybrid_norm(sys, f, &mid)?;
    let rhs = hybrid_norm(sys, f, a)?.powf(theta) * hybrid_norm(sys, f, b)?.powf(1.0 - theta);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy)]
pub struct InterpolationSample {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    /// Interpolation inequality samples; `lhs <= rhs` must hold with
    /// constant one.
    pub interpolation: Vec<InterpolationSample>,
    /// Max-norm of the field.
    pub sup_norm: f64,
    /// Hybrid norm with exponents `(n/2, n/p)` that dominates the max-norm
    /// up to a grid-dependent constant.
    pub sup_bound_norm: f64,
    /// Observed constant `sup_norm / sup_bound_norm`.
    pub sup_constant: f64,
}

/// Empirical check of two norm comparisons on a mean-zero field: the
/// sup-norm against the hybrid `(n/2, n/p)` norm (finite constant,
/// recorded), and exponent interpolation at `theta in {1/4, 1/2, 3/4}`
/// between `(n/2 - 1, n/p - 1)` and `(n/2 + 1, n/p + 1)` (constant one).
pub fn embedding_probe(
    sys: &DyadicSystem,
    f: &SpectralField,
    p: f64,
    r0: f64,
) -> Result<EmbeddingReport> {
    let n = sys.grid().dim() as f64;
    let lo = HybridParams::new(0.5 * n - 1.0, n / p - 1.0, p, r0)?;
    let hi = HybridParams::new(0.5 * n + 1.0, n / p + 1.0, p, r0)?;
    let mut interpolation = Vec::new();
    for theta in [0.25, 0.5, 0.75] {
        let (lhs, rhs) = interpolation_probe(sys, f, &lo, &hi, theta)?;
        interpolation.push(InterpolationSample { theta, lhs, rhs });
    }
    let sup_norm = lebesgue_norm(f, f64::INFINITY)?;
    let bound = HybridParams::new(0.5 * n, n / p, p, r0)?;
    let sup_bound_norm = hybrid_norm(sys, f, &bound)?;
    let sup_constant = if sup_bound_norm > 0.0 {
        sup_norm / sup_bound_norm
    } else {
        0.0
    };
    Ok(EmbeddingReport {
        interpolation,
        sup_norm,
        sup_bound_norm,
        sup_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rank;
    use crate::grid::Grid;
    use crate::sampling::{sample_field, SampleSpec};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid2(n_points: usize) -> Grid {
        Grid::new(2, n_points, 2.0 * PI).unwrap()
    }

    fn single_mode(grid: Grid, m: [i64; 3]) -> SpectralField {
        let mut f = SpectralField::zeros(grid, Rank::Scalar);
        f.set_mode_pair(0, &m, Complex64::new(0.5, 0.0)).unwrap();
        f
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = SpectralField::zeros(g, Rank::Scalar);
        assert_eq!(besov_norm(&sys, &f, 0.7, 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn cosine_norm_matches_closed_form() {
        // f = cos(4 x_1) on the 2-torus: the mode radius 4 = 2^2 meets the
        // rings j = 1 (ring value chi(1)) and j = 2 (ring value 1 - chi(1)),
        // so the norm is (2^s chi(1) + 4^s (1 - chi(1))) * ||cos||_p.
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let f = single_mode(g, [4, 0, 0]);
        let chi1 = sys.chi(1.0);
        let s = 0.85;
        let l2 = (2.0 * PI * 2.0 * PI / 2.0).sqrt();
        let expected = ((1f64).exp2().powf(s) * chi1 + (2f64).exp2().powf(s) * (1.0 - chi1)) * l2;
        let got = besov_norm(&sys, &f, s, 2.0, 1.0).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-10);

        // Same check in L^4: int cos^4 over a period is 3 pi / 4.
        let l4 = (2.0 * PI * (3.0 * PI / 4.0)).powf(0.25);
        let expected4 = ((1f64).exp2().powf(s) * chi1 + (2f64).exp2().powf(s) * (1.0 - chi1)) * l4;
        let got4 = besov_norm(&sys, &f, s, 4.0, 1.0).unwrap();
        assert_relative_eq!(got4, expected4, max_relative = 1e-10);
    }

    #[test]
    fn dyadic_dilation_scales_norms() {
        // f(2x) sampled on a half-period grid with the same spacing: the
        // norm picks up the factor 2^{s - n/p}.
        let s = 1.3;
        let p = 4.0;
        let ga = grid2(64);
        let sa = DyadicSystem::new(ga);
        let fa = single_mode(ga, [4, 0, 0]);
        let na = besov_norm(&sa, &fa, s, p, 1.0).unwrap();

        let gb = Grid::new(2, 32, PI).unwrap();
        let sb = DyadicSystem::new(gb);
        let fb = single_mode(gb, [4, 0, 0]); // xi = 8 on the half-period box
        let nb = besov_norm(&sb, &fb, s, p, 1.0).unwrap();

        let expected = (s - 2.0 / p).exp2();
        assert_relative_eq!(nb / na, expected, max_relative = 1e-10);
    }

    #[test]
    fn hybrid_degenerates_to_l1_besov() {
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::decaying(1.0), 5);
        let s = 0.4;
        let hp = HybridParams::new(s, s, 2.0, 1e9).unwrap();
        let hybrid = hybrid_norm(&sys, &f, &hp).unwrap();
        let besov = besov_norm(&sys, &f, s, 2.0, 1.0).unwrap();
        assert_relative_eq!(hybrid, besov, max_relative = 1e-12);
    }

    #[test]
    fn low_supported_field_has_no_high_sum() {
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let f = single_mode(g, [1, 0, 0]); // rings -1 and 0 only
        let hp = HybridParams::new(0.3, 7.0, 6.0, 4.0).unwrap();
        let hybrid = hybrid_norm(&sys, &f, &hp).unwrap();
        let low_only = besov_norm(&sys, &f, 0.3, 2.0, 1.0).unwrap();
        assert_relative_eq!(hybrid, low_only, max_relative = 1e-12);
    }

    #[test]
    fn l2_besov_controls_hybrid_with_shifted_exponent() {
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let n = 2.0;
        for seed in [1, 2, 3, 4, 5] {
            let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), seed);
            for p in [2.0, 4.0, 8.0] {
                let s = 0.6;
                let hp = HybridParams::new(s, s - 0.5 * n + n / p, p, 2.0).unwrap();
                let lhs = hybrid_norm(&sys, &f, &hp).unwrap();
                let rhs = besov_norm(&sys, &f, s, 2.0, 1.0).unwrap();
                assert!(
                    lhs <= 4.0 * rhs,
                    "embedding constant too large: {} vs {}",
                    lhs,
                    rhs
                );
            }
        }
    }

    #[test]
    fn norm_axioms_hold() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 9);
        let h = sample_field(g, Rank::Scalar, SampleSpec::flat(), 10);
        let s = 0.5;
        let nf = besov_norm(&sys, &f, s, 3.0, 1.0).unwrap();
        let scaled = &f * -3.5;
        let ns = besov_norm(&sys, &scaled, s, 3.0, 1.0).unwrap();
        assert_relative_eq!(ns, 3.5 * nf, max_relative = 1e-12);
        let sum = &f + &h;
        let nsum = besov_norm(&sys, &sum, s, 3.0, 1.0).unwrap();
        let nh = besov_norm(&sys, &h, s, 3.0, 1.0).unwrap();
        assert!(nsum <= nf + nh + 1e-12 * (nf + nh));
    }

    #[test]
    fn raising_low_exponent_is_bounded_by_threshold_power() {
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 21);
        let (s1, s2) = (1.25, 0.25);
        let r0 = 2.0;
        let hp1 = HybridParams::new(s1, 0.0, 2.0, r0).unwrap();
        let hp2 = HybridParams::new(s2, 0.0, 2.0, r0).unwrap();
        let n1 = hybrid_norm(&sys, &f, &hp1).unwrap();
        let n2 = hybrid_norm(&sys, &f, &hp2).unwrap();
        // Each low block satisfies 2^{j s1} <= 2^{j s2} R0^{s1 - s2}, and the
        // high parts coincide, so the whole norms obey the same bound.
        assert!(n1 <= r0.powf(s1 - s2) * n2 * (1.0 + 1e-12));
    }

    #[test]
    fn time_constant_series_reduces_to_hybrid_norm() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 3);
        let hp = HybridParams::new(0.5, 0.9, 4.0, 2.0).unwrap();
        let mut series = NormSeries::new(&sys, 4.0).unwrap();
        let t_final = 2.5;
        for k in 0..=10 {
            series
                .push_sample(&sys, t_final * k as f64 / 10.0, &f)
                .unwrap();
        }
        let base = hybrid_norm(&sys, &f, &hp).unwrap();
        for r in [1.0, 2.0] {
            let cl = chemin_lerner_norm(&series, r, &hp).unwrap();
            assert_relative_eq!(cl, t_final.powf(1.0 / r) * base, max_relative = 1e-10);
        }
        let cl_inf = chemin_lerner_norm(&series, f64::INFINITY, &hp).unwrap();
        assert_relative_eq!(cl_inf, base, max_relative = 1e-12);
    }

    #[test]
    fn block_first_l1_norm_equals_time_integrated_hybrid_norm() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 3);
        let h = sample_field(g, Rank::Scalar, SampleSpec::decaying(1.0), 8);
        let hp = HybridParams::new(0.5, 0.9, 4.0, 2.0).unwrap();
        let times: Vec<f64> = (0..=8).map(|k| 0.3 * k as f64).collect();
        let mut series = NormSeries::new(&sys, 4.0).unwrap();
        let mut pointwise = Vec::new();
        for &t in &times {
            let ft = &(&f * (-t).exp()) + &(&h * (0.5 * t).sin());
            series.push_sample(&sys, t, &ft).unwrap();
            pointwise.push(hybrid_norm(&sys, &ft, &hp).unwrap());
        }
        let mut integral = 0.0;
        for i in 1..times.len() {
            integral += 0.5 * (pointwise[i] + pointwise[i - 1]) * (times[i] - times[i - 1]);
        }
        let cl = chemin_lerner_norm(&series, 1.0, &hp).unwrap();
        // Block-first and time-first summation commute exactly for r = 1 on
        // shared sample instants (the quadrature is linear).
        assert_relative_eq!(cl, integral, max_relative = 1e-12);
    }

    #[test]
    fn sup_time_norm_of_decaying_samples_is_initial_value() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 6);
        let hp = HybridParams::new(0.2, 0.4, 2.0, 2.0).unwrap();
        let mut series = NormSeries::new(&sys, 2.0).unwrap();
        for k in 0..5 {
            let t = k as f64;
            series.push_sample(&sys, t, &(&f * (-t).exp())).unwrap();
        }
        let cl = chemin_lerner_norm(&series, f64::INFINITY, &hp).unwrap();
        let base = hybrid_norm(&sys, &f, &hp).unwrap();
        assert_relative_eq!(cl, base, max_relative = 1e-12);
    }

    #[test]
    fn series_guards_reject_misuse() {
        let g = grid2(32);
        let sys = DyadicSystem::new(g);
        let f = sample_field(g, Rank::Scalar, SampleSpec::flat(), 6);
        let mut series = NormSeries::new(&sys, 2.0).unwrap();
        series.push_sample(&sys, 0.0, &f).unwrap();
        assert!(series.push_sample(&sys, 0.0, &f).is_err());
        let hp_wrong_p = HybridParams::new(0.2, 0.4, 4.0, 2.0).unwrap();
        assert!(chemin_lerner_norm(&series, 1.0, &hp_wrong_p).is_err());
        let empty = NormSeries::new(&sys, 2.0).unwrap();
        let hp = HybridParams::new(0.2, 0.4, 2.0, 2.0).unwrap();
        assert!(chemin_lerner_norm(&empty, 1.0, &hp).is_err());
    }

    #[test]
    fn single_mode_interpolates_with_equality() {
        // |xi| = 3 meets exactly one ring (j = 1), making the interpolation
        // inequality an identity.
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let f = single_mode(g, [3, 0, 0]);
        let report = embedding_probe(&sys, &f, 4.0, 2.0).unwrap();
        for row in &report.interpolation {
            assert_relative_eq!(row.lhs, row.rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn interpolation_holds_with_constant_one_on_random_fields() {
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        for seed in [11, 12, 13, 14, 15] {
            let f = sample_field(g, Rank::Scalar, SampleSpec::decaying(0.5), seed);
            let report = embedding_probe(&sys, &f, 4.0, 2.0).unwrap();
            for row in &report.interpolation {
                assert!(
                    row.lhs <= row.rhs * (1.0 + 1e-12),
                    "interpolation violated at theta = {}: {} > {}",
                    row.theta,
                    row.lhs,
                    row.rhs
                );
            }
            assert!(report.sup_constant.is_finite());
        }
    }

    #[test]
    fn spike_field_sup_constant_is_finite() {
        // Equal-coefficient spike: every covered mode at the same amplitude.
        let g = grid2(64);
        let sys = DyadicSystem::new(g);
        let mut f = SpectralField::zeros(g, Rank::Scalar);
        let band_top = g.covered_band().1;
        for idx in 1..g.len() {
            if !g.is_nyquist(idx) && g.xi_norm(idx) <= band_top {
                *f.coeff_mut(0, idx) = Complex64::new(1e-3, 0.0);
            }
        }
        f.hermitian_symmetrize();
        f.zero_mean();
        let report = embedding_probe(&sys, &f, 4.0, 2.0).unwrap();
        assert!(report.sup_constant.is_finite() && report.sup_constant > 0.0);
        assert!(report.sup_norm > 0.0);
    }
}
