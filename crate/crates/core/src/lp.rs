//! Dyadic ring decomposition of the frequency lattice.
//!
//! The decomposition is built from a smooth radial cutoff pair. With
//! `g(s) = exp(-1/s)` for `s > 0` (else 0) and
//! `ramp(s) = g(s) / (g(s) + g(1-s))`, the lowpass profile is
//!
//! ```text
//! chi(r)  = ramp((outer - r) / (outer - inner)),   defaults inner = 3/4, outer = 4/3,
//! phi(r)  = chi(r/2) - chi(r),
//! ```
//!
//! so `chi` is identically 1 on `{r <= inner}`, vanishes for `r >= outer`,
//! and `phi` is supported on the ring `{inner <= r <= 2*outer}`. The ring
//! operator `Delta_j` multiplies by `phi(2^{-j} |xi|)`, the lowpass `S_j` by
//! `chi(2^{-j} |xi|)`, and the telescoping identity
//! `sum_{j=a}^{b} phi(2^{-j} r) = chi(2^{-b-1} r) - chi(2^{-a} r)` makes the
//! ring weights sum to one exactly on the covered magnitude band of the
//! grid. Ring supports at distance `>= 2` are disjoint, so
//! `Delta_j Delta_k = 0` for `|j - k| >= 2`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::multiplier::{Multiplier, ZeroModeRule};
use crate::grid::Grid;
use crate::norms::lebesgue_norm;
use num_complex::Complex64;

/// Radii shaping the cutoff pair. `inner < outer < 2 * inner` is required
/// for disjointness of next-nearest rings; out-of-range requests are
/// clamped (with a warning) rather than rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub inner: f64,
    pub outer: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams { inner: 0.75, outer: 4.0 / 3.0 }
    }
}

impl ProfileParams {
    fn clamped(self) -> Self {
        let inner = if self.inner.is_finite() && self.inner > 0.0 { self.inner } else { 0.75 };
        let lo = inner * (1.0 + 1e-9);
        let hi = inner * (2.0 - 1e-9);
        let outer = if self.outer.is_finite() { self.outer.clamp(lo, hi) } else { 4.0 / 3.0 };
        let out = ProfileParams { inner, outer };
        if out != self {
            log::warn!("profile params clamped from {self:?} to {out:?}");
        }
        out
    }
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = bump(s);
        a / (a + bump(1.0 - s))
    }
}

/// The dyadic ring system attached to one grid.
#[derive(Debug, Clone)]
pub struct DyadicSystem {
    grid: Grid,
    profile: ProfileParams,
    truncated: Vec<i32>,
}

/// One ring block together with its index.
pub struct Block {
    pub j: i32,
    pub field: SpectralField,
}

/// Complete decomposition: the lowpass floor (mean mode) plus all rings.
pub struct Decomposition {
    pub lowpass: SpectralField,
    pub blocks: Vec<Block>,
}

impl DyadicSystem {
    /// Build the system with explicit profile radii.
    pub fn with_profile(grid: Grid, profile: ProfileParams) -> Self {
        let profile = profile.clamped();
        let truncated = (grid.j_min()..=grid.j_max())
            .filter(|&j| (j as f64).exp2() * 2.0 * profile.outer > grid.xi_nyquist())
            .collect();
        DyadicSystem { grid, profile, truncated }
    }

    /// Build the system with the standard radii `(3/4, 4/3)`.
    pub fn new(grid: Grid) -> Self {
        Self::with_profile(grid, ProfileParams::default())
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn profile(&self) -> ProfileParams {
        self.profile
    }

    #[inline]
    pub fn j_min(&self) -> i32 {
        self.grid.j_min()
    }

    #[inline]
    pub fn j_max(&self) -> i32 {
        self.grid.j_max()
    }

    /// Ring indices in order.
    pub fn js(&self) -> impl Iterator<Item = i32> {
        self.j_min()..=self.j_max()
    }

    /// Rings whose support is clipped by the per-axis Nyquist cutoff.
    pub fn truncated_rings(&self) -> &[i32] {
        &self.truncated
    }

    /// Lowpass profile value at radius `r`.
    pub fn chi(&self, r: f64) -> f64 {
        ramp((self.profile.outer - r) / (self.profile.outer - self.profile.inner))
    }

    /// Ring profile value at radius `r`.
    pub fn phi(&self, r: f64) -> f64 {
        self.chi(r / 2.0) - self.chi(r)
    }

    /// Sum of all ring weights at radius `r` (telescoped).
    pub fn partition_sum(&self, r: f64) -> f64 {
        self.chi(r * (-(self.j_max() + 1) as f64).exp2()) - self.chi(r * (-self.j_min() as f64).exp2())
    }

    fn check_j(&self, j: i32) -> Result<()> {
        if j < self.j_min() || j > self.j_max() {
            return Err(Error::Inadmissible(format!(
                "ring index j = {j} outside the grid's range [{}, {}]",
                self.j_min(),
                self.j_max()
            )));
        }
        Ok(())
    }

    /// Ring block `Delta_j f`.
    pub fn delta_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_j(j)?;
        Ok(self.delta_j_unchecked(f, j))
    }

    /// Ring block without the range check; rings outside the grid range are
    /// legitimate zero operators on covered fields, which the paraproduct
    /// split relies on.
    pub(crate) fn delta_j_unchecked(&self, f: &SpectralField, j: i32) -> SpectralField {
        let scale = (-j as f64).exp2();
        let sys = self.clone();
        Multiplier::radial(ZeroModeRule::Annihilate, move |r| sys.phi(scale * r))
            .apply(f)
            .expect("radial multiplier applies to any rank")
    }

    /// Lowpass `S_j f`. Valid for `j` in `[j_min - 1, j_max + 1]`, the range
    /// needed by paraproducts (`S_{j-1}`) and reconstruction checks
    /// (`S_{j_max + 1}`).
    pub fn s_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        if j < self.j_min() - 1 || j > self.j_max() + 1 {
            return Err(Error::Inadmissible(format!(
                "lowpass index j = {j} outside [{}, {}]",
                self.j_min() - 1,
                self.j_max() + 1
            )));
        }
        let scale = (-j as f64).exp2();
        let sys = self.clone();
        Ok(Multiplier::radial(ZeroModeRule::FromSymbol, move |r| sys.chi(scale * r))
            .apply(f)
            .expect("radial multiplier applies to any rank"))
    }

    /// Full decomposition into the lowpass floor and all ring blocks.
    pub fn decompose(&self, f: &SpectralField) -> Decomposition {
        let mut lowpass = SpectralField::zeros(f.grid(), f.rank());
        for c in 0..f.n_components() {
            *lowpass.coeff_mut(c, 0) = f.mean(c);
        }
        let blocks = self
            .js()
            .map(|j| Block { j, field: self.delta_j_unchecked(f, j) })
            .collect();
        Decomposition { lowpass, blocks }
    }

    /// `L^p` norms of every ring block: `(j, ||Delta_j f||_p)`.
    pub fn block_norms(&self, f: &SpectralField, p: f64) -> Result<Vec<(i32, f64)>> {
        self.js()
            .map(|j| Ok((j, lebesgue_norm(&self.delta_j_unchecked(f, j), p)?)))
            .collect()
    }

    /// Energy outside the covered band (plus mean): the reconstruction
    /// defect `||f - mean - sum_j Delta_j f||_{L^2}`.
    pub fn coverage_defect(&self, f: &SpectralField) -> f64 {
        let d = self.decompose(f);
        let mut acc = d.lowpass;
        for b in &d.blocks {
            acc.axpy(1.0, &b.field).expect("blocks share layout");
        }
        (&acc - f).l2_norm()
    }
}

impl Decomposition {
    /// Sum the lowpass floor and all blocks back together.
    pub fn reconstruct(&self) -> SpectralField {
        let mut acc = self.lowpass.clone();
        for b in &self.blocks {
            acc.axpy(1.0, &b.field).expect("blocks share layout");
        }
        acc
    }
}

/// Measured data for one Bernstein-inequality probe.
#[derive(Debug, Clone)]
pub struct BernsteinReport {
    pub j: i32,
    pub p: f64,
    pub q: f64,
    pub gamma: Vec<u32>,
    /// `||d^gamma Delta_j f||_q`.
    pub lhs: f64,
    /// `2^{j(|gamma| + n(1/p - 1/q))} ||Delta_j f||_p`.
    pub rhs: f64,
    /// `lhs / rhs`; bounded uniformly in `j` for a sound implementation.
    pub ratio: f64,
}

/// Measure the directional-derivative Bernstein ratio on ring `j`:
/// derivatives of ring-localized fields cost a factor `2^{j |gamma|}`, and
/// passing from `L^p` to `L^q` (`q >= p`) costs `2^{j n (1/p - 1/q)}`.
pub fn bernstein_probe(
    sys: &DyadicSystem,
    f: &SpectralField,
    j: i32,
    p: f64,
    q: f64,
    gamma: &[u32],
) -> Result<BernsteinReport> {
    if q < p {
        return Err(Error::Inadmissible(format!(
            "Bernstein probe requires q >= p, got p = {p}, q = {q}"
        )));
    }
    if gamma.len() != sys.grid().dim() {
        return Err(Error::Inadmissible(format!(
            "multi-index has {} entries for dimension {}",
            gamma.len(),
            sys.grid().dim()
        )));
    }
    let block = sys.delta_j(f, j)?;
    let base = lebesgue_norm(&block, p)?;
    if base == 0.0 {
        return Err(Error::Inadmissible(format!("ring {j} carries no energy")));
    }
    let order: u32 = gamma.iter().sum();
    let gamma_owned: Vec<u32> = gamma.to_vec();
    let deriv = Multiplier::scalar(ZeroModeRule::Annihilate, move |xi, _| {
        let mut acc = Complex64::new(1.0, 0.0);
        for (axis, &g) in gamma_owned.iter().enumerate() {
            for _ in 0..g {
                acc *= Complex64::new(0.0, xi[axis]);
            }
        }
        acc
    })
    .apply(&block)?;
    let lhs = lebesgue_norm(&deriv, q)?;
    let n = sys.grid().dim() as f64;
    let exponent = j as f64 * (order as f64 + n * (1.0 / p - 1.0 / q));
    let rhs = exponent.exp2() * base;
    Ok(BernsteinReport { j, p, q, gamma: gamma.to_vec(), lhs, rhs, ratio: lhs / rhs })
}
