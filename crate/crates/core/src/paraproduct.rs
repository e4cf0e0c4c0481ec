//! Frequency-interaction decomposition of products, transport commutators,
//! pointwise composition operators, and empirical constant probes for the
//! bilinear and composition estimates used by the solver analysis.
//!
//! The product of two fields splits by which factor carries the higher
//! frequency:
//!
//! ```text
//! f g = T_f g + T_g f + R(f, g)
//! T_f g   = sum_j S_{j-1} f * Delta_j g        (f at lower frequency)
//! R(f, g) = sum_{|j-k|<=1} Delta_j f * Delta_k g + mean(f) mean(g)
//! ```
//!
//! On the torus the lowpass `S_{j-1}` retains the mean, and the
//! mean-times-mean term is assigned to the remainder; with those conventions
//! the identity is exact for band-limited fields (products are dealiased, so
//! no spurious terms appear).


use crate::besov::{hybrid_norm, HybridParams};
use crate::error::{Error, Result};
use crate::field::{pointwise_dot, pointwise_map, pointwise_product, Rank, SpectralField};
use crate::grid::Grid;
use crate::lp::DyadicSystem;
use crate::multiplier::gradient;
use crate::norms::lebesgue_norm;
use crate::sampling::{sample_field, SampleSpec};

/// The three interaction classes of a product.
#[derive(Debug, Clone)]
pub struct BonySplit {
    /// Low frequencies of `f` times dyadic blocks of `g`.
    pub t_fg: SpectralField,
    /// Low frequencies of `g` times dyadic blocks of `f`.
    pub t_gf: SpectralField,
    /// Comparable-frequency interactions plus the mean-times-mean term.
    pub remainder: SpectralField,
}

impl BonySplit {
    /// `t_fg + t_gf + remainder`, which must equal the dealiased product.
    pub fn total(&self) -> SpectralField {
        let mut sum = self.t_fg.clone();
        sum.axpy(1.0, &self.t_gf).expect("parts share a grid");
        sum.axpy(1.0, &self.remainder).expect("parts share a grid");
        sum
    }
}

fn require_scalar(name: &str, f: &SpectralField) -> Result<()> {
    if f.rank() != Rank::Scalar {
        return Err(Error::Mismatch(format!("{name} must be a scalar field")));
    }
    Ok(())
}

/// Split the (dealiased) product `f g` into the three interaction classes.
pub fn bony_split(sys: &DyadicSystem, f: &SpectralField, g: &SpectralField) -> Result<BonySplit> {
    require_scalar("bony factor f", f)?;
    require_scalar("bony factor g", g)?;
    if f.grid() != g.grid() {
        return Err(Error::Mismatch("bony factors live on different grids".into()));
    }
    let grid = f.grid();
    let mut t_fg = SpectralField::zeros(grid, Rank::Scalar);
    let mut t_gf = SpectralField::zeros(grid, Rank::Scalar);
    let mut remainder = SpectralField::zeros(grid, Rank::Scalar);
    for j in sys.js() {
        let block_g = sys.delta_j(g, j)?;
        let block_f = sys.delta_j(f, j)?;
        t_fg.axpy(1.0, &pointwise_product(&sys.s_j(f, j - 1)?, &block_g)?)?;
        t_gf.axpy(1.0, &pointwise_product(&sys.s_j(g, j - 1)?, &block_f)?)?;
        // Comparable frequencies: neighbors within one ring. Out-of-range
        // neighbors are zero operators on covered fields.
        for k in (j - 1)..=(j + 1) {
            let near = sys.delta_j_unchecked(g, k);
            remainder.axpy(1.0, &pointwise_product(&block_f, &near)?)?;
        }
    }
    let mean_product = f.mean(0) * g.mean(0);
    remainder.coeff_mut(0, 0).re += mean_product.re;
    remainder.coeff_mut(0, 0).im += mean_product.im;
    Ok(BonySplit { t_fg, t_gf, remainder })
}

/// Transport commutator `[v, Delta_j] . grad f = v . grad(Delta_j f)
/// - Delta_j(v . grad f)`, with dealiased products.
pub fn commutator_field(
    sys: &DyadicSystem,
    v: &SpectralField,
    f: &SpectralField,
    j: i32,
) -> Result<SpectralField> {
    if v.rank() != Rank::Vector {
        return Err(Error::Mismatch("commutator velocity must be a vector field".into()));
    }
    require_scalar("commutator argument f", f)?;
    if v.grid() != f.grid() {
        return Err(Error::Mismatch("commutator fields live on different grids".into()));
    }
    let block = sys.delta_j(f, j)?;
    let first = pointwise_dot(v, &gradient(&block)?)?;
    let transport = pointwise_dot(v, &gradient(f)?)?;
    let second = sys.delta_j(&transport, j)?;
    Ok(&first - &second)
}

/// Minimum of `1 + f` over grid points (the density when `f` is the
/// relative density deviation).
pub fn min_density(f: &SpectralField) -> Result<f64> {
    require_scalar("density deviation", f)?;
    Ok(f.to_real_samples()
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(1.0 + x)))
}

fn check_density_floor(f: &SpectralField, floor: f64, context: &str) -> Result<()> {
    let min = min_density(f)?;
    if min <= floor {
        return Err(Error::Vacuum {
            min_density: min,
            floor,
            context: context.to_string(),
        });
    }
    Ok(())
}

/// Default density floor below which compositions in `1/(1+a)` or
/// fractional powers of `1+a` are refused.
pub const DENSITY_FLOOR: f64 = 1e-3;

/// Pointwise composition `F(f)` in physical space, re-transformed. The
/// caller declares `F(0) = 0`; smoothness is the caller's responsibility.
pub fn compose_pointwise(f: &SpectralField, func: impl Fn(f64) -> f64) -> Result<SpectralField> {
    require_scalar("composition argument", f)?;
    pointwise_map(f, func)
}

/// Pressure-coupling coefficient `K(a) = (1+a)^{gamma-2} - 1` arising from
/// a power-law equation of state; identically zero when `gamma = 2`.
pub fn pressure_coupling(f: &SpectralField, gamma: f64) -> Result<SpectralField> {
    check_density_floor(f, DENSITY_FLOOR, "pressure coefficient composition")?;
    compose_pointwise(f, move |a| (1.0 + a).powf(gamma - 2.0) - 1.0)
}

/// Density-ratio coefficient `L(a) = a / (1+a)` multiplying the viscous
/// terms in the reformulated momentum equation.
pub fn density_ratio(f: &SpectralField) -> Result<SpectralField> {
    check_density_floor(f, DENSITY_FLOOR, "density ratio composition")?;
    compose_pointwise(f, |a| a / (1.0 + a))
}

/// Which bilinear/composition estimate a probe exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// High-band product sum against shifted hybrid norms.
    ProductA,
    /// Low-band product sum against exponent-split hybrid norms.
    ProductB,
    /// Per-ring paraproduct bound above the threshold.
    ParaHigh,
    /// Per-ring remainder bound.
    Remainder,
    /// Per-ring transport-commutator bound above the threshold.
    Commutator,
    /// Composition `L(a) = a/(1+a)` against the quasi-linear bound.
    Composition,
}

impl ProbeKind {
    pub fn parse(name: &str) -> Option<ProbeKind> {
        match name {
            "product_a" => Some(ProbeKind::ProductA),
            "product_b" => Some(ProbeKind::ProductB),
            "para_high" => Some(ProbeKind::ParaHigh),
            "remainder" => Some(ProbeKind::Remainder),
            "commutator" => Some(ProbeKind::Commutator),
            "composition" => Some(ProbeKind::Composition),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProbeKind::ProductA => "product_a",
            ProbeKind::ProductB => "product_b",
            ProbeKind::ParaHigh => "para_high",
            ProbeKind::Remainder => "remainder",
            ProbeKind::Commutator => "commutator",
            ProbeKind::Composition => "composition",
        }
    }

    pub fn all() -> [ProbeKind; 6] {
        [
            ProbeKind::ProductA,
            ProbeKind::ProductB,
            ProbeKind::ParaHigh,
            ProbeKind::Remainder,
            ProbeKind::Commutator,
            ProbeKind::Composition,
        ]
    }
}

/// Exponents for an estimate probe. Each kind reads the entries it needs:
/// `(s, sigma)` grade the first factor, `(t, tau)` the second, `s_tilde`
/// sets the alternative split of `s + t` in the low-band product law, `p`
/// is the high-band Lebesgue exponent, and `r0` the hybrid threshold.
#[derive(Debug, Clone, Copy)]
pub struct ProbeParams {
    pub s: f64,
    pub sigma: f64,
    pub t: f64,
    pub tau: f64,
    pub s_tilde: f64,
    pub p: f64,
    pub r0: f64,
}

impl ProbeParams {
    /// A default admissible for every probe kind in dimension `n`: the
    /// first-factor exponents sit at half of `n/p` and the second-factor
    /// low exponent is raised enough to clear the low-band product
    /// condition `s + t > n - 2n/p`.
    pub fn balanced(n: usize, p: f64, r0: f64) -> Self {
        let np = n as f64 / p;
        let s = 0.5 * np;
        let t = (n as f64 - 2.0 * np - s + 0.5).max(s);
        ProbeParams {
            s,
            sigma: s,
            t,
            tau: s,
            s_tilde: s,
            p,
            r0,
        }
    }
}

/// One probe outcome: the measured left side, the right side without its
/// constant, and their ratio (the empirical constant).
#[derive(Debug, Clone, Copy)]
pub struct ProbeReport {
    pub kind: ProbeKind,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn check_admissible(kind: ProbeKind, pr: &ProbeParams, n: f64) -> Result<()> {
    if !(2.0..=4.0).contains(&pr.p) {
        return Err(Error::Inadmissible(format!(
            "estimate probes require 2 <= p <= 4, got p = {}",
            pr.p
        )));
    }
    if !(pr.r0 > 0.0) {
        return Err(Error::Inadmissible(format!(
            "estimate probes require a positive threshold, got R0 = {}",
            pr.r0
        )));
    }
    let np = n / pr.p;
    match kind {
        ProbeKind::ProductA => {
            if pr.sigma > np || pr.tau > np || pr.sigma + pr.tau <= 0.0 {
                return Err(Error::Inadmissible(format!(
                    "high-band product probe requires sigma <= n/p, tau <= n/p, and sigma + tau > 0 \
                     (got sigma = {}, tau = {}, n/p = {np})",
                    pr.sigma, pr.tau
                )));
            }
        }
        ProbeKind::ProductB => {
            if pr.s > np || pr.s_tilde > np || pr.s + pr.t <= n - 2.0 * np {
                return Err(Error::Inadmissible(format!(
                    "low-band product probe requires s <= n/p, s_tilde <= n/p, and s + t > n - 2n/p \
                     (got s = {}, s_tilde = {}, t = {})",
                    pr.s, pr.s_tilde, pr.t
                )));
            }
        }
        ProbeKind::ParaHigh => {
            if pr.s > 0.5 * n || pr.sigma > np {
                return Err(Error::Inadmissible(format!(
                    "paraproduct probe requires s <= n/2 and sigma <= n/p (got s = {}, sigma = {})",
                    pr.s, pr.sigma
                )));
            }
        }
        ProbeKind::Remainder => {
            if pr.s + pr.t <= 0.0
                || pr.s + pr.tau <= 0.0
                || pr.sigma + pr.t <= 0.0
                || pr.sigma + pr.tau <= 0.0
            {
                return Err(Error::Inadmissible(format!(
                    "remainder probe requires s + t > 0, s + tau > 0, sigma + t > 0, and \
                     sigma + tau > 0 (got s = {}, sigma = {}, t = {}, tau = {})",
                    pr.s, pr.sigma, pr.t, pr.tau
                )));
            }
        }
        ProbeKind::Commutator => {
            if pr.s <= -np || pr.s > 0.5 * n + 1.0 || pr.sigma <= -np || pr.sigma > np + 1.0 {
                return Err(Error::Inadmissible(format!(
                    "commutator probe requires -n/p < s <= n/2 + 1 and -n/p < sigma <= n/p + 1 \
                     (got s = {}, sigma = {})",
                    pr.s, pr.sigma
                )));
            }
        }
        ProbeKind::Composition => {
            if pr.s <= 0.0 || pr.sigma <= 0.0 || pr.s < pr.sigma - 0.5 * n + np {
                return Err(Error::Inadmissible(format!(
                    "composition probe requires s > 0, sigma > 0, and s >= sigma - n/2 + n/p \
                     (got s = {}, sigma = {})",
                    pr.s, pr.sigma
                )));
            }
        }
    }
    Ok(())
}

/// Paraproduct `T_f g` alone (the `f`-low part of the split).
fn paraproduct_only(
    sys: &DyadicSystem,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(f.grid(), Rank::Scalar);
    for j in sys.js() {
        let block_g = sys.delta_j(g, j)?;
        acc.axpy(1.0, &pointwise_product(&sys.s_j(f, j - 1)?, &block_g)?)?;
    }
    Ok(acc)
}

/// Remainder `R(f, g)` alone (comparable frequencies plus mean term).
fn remainder_only(
    sys: &DyadicSystem,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(f.grid(), Rank::Scalar);
    for j in sys.js() {
        let block_f = sys.delta_j(f, j)?;
        for k in (j - 1)..=(j + 1) {
            let near = sys.delta_j_unchecked(g, k);
            acc.axpy(1.0, &pointwise_product(&block_f, &near)?)?;
        }
    }
    let mean_product = f.mean(0) * g.mean(0);
    acc.coeff_mut(0, 0).re += mean_product.re;
    acc.coeff_mut(0, 0).im += mean_product.im;
    Ok(acc)
}

/// Evaluate one probe on caller-supplied fields. For the commutator kind
/// `f` must be a vector field (the velocity) and `g` a scalar; for the
/// composition kind only `f` is used.
pub fn estimate_ratio_with(
    sys: &DyadicSystem,
    kind: ProbeKind,
    pr: &ProbeParams,
    f: &SpectralField,
    g: &SpectralField,
    seed: u64,
) -> Result<ProbeReport> {
    let grid = sys.grid();
    let n = grid.dim() as f64;
    check_admissible(kind, pr, n)?;
    let np = n / pr.p;
    let npp = n - np; // n / p' for the conjugate exponent
    let (lhs, rhs) = match kind {
        ProbeKind::ProductA => {
            let product = pointwise_product(f, g)?;
            let mut lhs = 0.0;
            for (j, norm) in sys.block_norms(&product, pr.p)? {
                if (j as f64).exp2() > pr.r0 {
                    lhs += (j as f64 * (pr.sigma + pr.tau - np)).exp2() * norm;
                }
            }
            let hf = HybridParams::new(0.5 * n - np + pr.sigma, pr.sigma, pr.p, pr.r0)?;
            let hg = HybridParams::new(0.5 * n - np + pr.tau, pr.tau, pr.p, pr.r0)?;
            (lhs, hybrid_norm(sys, f, &hf)? * hybrid_norm(sys, g, &hg)?)
        }
        ProbeKind::ProductB => {
            let product = pointwise_product(f, g)?;
            let t_tilde = pr.s + pr.t - pr.s_tilde;
            let mut lhs = 0.0;
            for (j, norm) in sys.block_norms(&product, 2.0)? {
                if (j as f64).exp2() <= pr.r0 {
                    lhs += (j as f64 * (pr.s + pr.t - 0.5 * n)).exp2() * norm;
                }
            }
            let shift = -0.5 * n + np;
            let h1f = HybridParams::new(pr.s, pr.s + shift, pr.p, pr.r0)?;
            let h1g = HybridParams::new(pr.t, pr.t + shift, pr.p, pr.r0)?;
            let h2g = HybridParams::new(pr.s_tilde, pr.s_tilde + shift, pr.p, pr.r0)?;
            let h2f = HybridParams::new(t_tilde, t_tilde + shift, pr.p, pr.r0)?;
            let rhs = hybrid_norm(sys, f, &h1f)? * hybrid_norm(sys, g, &h1g)?
                + hybrid_norm(sys, g, &h2g)? * hybrid_norm(sys, f, &h2f)?;
            (lhs, rhs)
        }
        ProbeKind::ParaHigh => {
            let para = paraproduct_only(sys, f, g)?;
            let hf = HybridParams::new(pr.s, pr.sigma, pr.p, pr.r0)?;
            let hg = HybridParams::new(pr.t, pr.tau, pr.p, pr.r0)?;
            let norms = hybrid_norm(sys, f, &hf)? * hybrid_norm(sys, g, &hg)?;
            let mut worst = (0.0, norms);
            for (j, norm) in sys.block_norms(&para, pr.p)? {
                if (j as f64).exp2() > pr.r0 {
                    let jf = j as f64;
                    let bracket = (jf * (npp - pr.s - pr.t)).exp2()
                        + (jf * (0.5 * n - pr.s - pr.tau)).exp2()
                        + (jf * (np - pr.sigma - pr.tau)).exp2();
                    let rhs_j = bracket * norms;
                    if ratio_of(norm, rhs_j) > ratio_of(worst.0, worst.1) {
                        worst = (norm, rhs_j);
                    }
                }
            }
            worst
        }
        ProbeKind::Remainder => {
            let rem = remainder_only(sys, f, g)?;
            let hf = HybridParams::new(pr.s, pr.sigma, pr.p, pr.r0)?;
            let hg = HybridParams::new(pr.t, pr.tau, pr.p, pr.r0)?;
            let norms = hybrid_norm(sys, f, &hf)? * hybrid_norm(sys, g, &hg)?;
            let mut worst = (0.0, norms);
            for (j, norm) in sys.block_norms(&rem, pr.p)? {
                let jf = j as f64;
                let bracket = (jf * (npp - pr.s - pr.t)).exp2()
                    + (jf * (0.5 * n - pr.s - pr.tau)).exp2()
                    + (jf * (0.5 * n - pr.sigma - pr.t)).exp2()
                    + (jf * (np - pr.sigma - pr.tau)).exp2();
                let rhs_j = bracket * norms;
                if ratio_of(norm, rhs_j) > ratio_of(worst.0, worst.1) {
                    worst = (norm, rhs_j);
                }
            }
            worst
        }
        ProbeKind::Commutator => {
            let hv = HybridParams::new(0.5 * n + 1.0, np + 1.0, pr.p, pr.r0)?;
            let hf = HybridParams::new(pr.s, pr.sigma, pr.p, pr.r0)?;
            let norms = hybrid_norm(sys, f, &hv)? * hybrid_norm(sys, g, &hf)?;
            let mut worst = (0.0, norms);
            for j in sys.js() {
                if (j as f64).exp2() < pr.r0 {
                    continue;
                }
                let comm = commutator_field(sys, f, g, j)?;
                let norm = lebesgue_norm(&comm, pr.p)?;
                let jf = j as f64;
                let bracket = (-jf * pr.sigma).exp2() + (jf * (0.5 * n - np - pr.s)).exp2();
                let rhs_j = bracket * norms;
                if ratio_of(norm, rhs_j) > ratio_of(worst.0, worst.1) {
                    worst = (norm, rhs_j);
                }
            }
            worst
        }
        ProbeKind::Composition => {
            let composed = density_ratio(f)?;
            let hp = HybridParams::new(pr.s, pr.sigma, pr.p, pr.r0)?;
            let lhs = hybrid_norm(sys, &composed, &hp)?;
            let base = HybridParams::new(np, np, pr.p, pr.r0)?;
            let power = pr.s.floor().max(pr.sigma.floor()) + 1.0;
            let rhs = (1.0 + hybrid_norm(sys, f, &base)?).powf(power)
                * hybrid_norm(sys, f, &hp)?;
            (lhs, rhs)
        }
    };
    Ok(ProbeReport {
        kind,
        seed,
        lhs,
        rhs,
        ratio: ratio_of(lhs, rhs),
    })
}

fn probe_inputs(grid: Grid, kind: ProbeKind, seed: u64) -> (SpectralField, SpectralField) {
    // Mildly decaying spectra keep every hybrid norm finite while exercising
    // all rings; the second stream is decorrelated from the first.
    let spec = SampleSpec::decaying(1.0);
    let g = sample_field(grid, Rank::Scalar, spec, seed ^ 0x517c_c1b7_2722_0a95);
    let f = match kind {
        ProbeKind::Commutator => sample_field(grid, Rank::Vector, spec, seed),
        ProbeKind::Composition => {
            let mut a = sample_field(grid, Rank::Scalar, spec, seed);
            // Keep the density 1 + a well away from zero so the composition
            // is smooth on the sampled range.
            let sup = lebesgue_norm(&a, f64::INFINITY).expect("finite samples");
            if sup > 0.0 {
                a.scale(0.3 / sup);
            }
            a
        }
        _ => sample_field(grid, Rank::Scalar, spec, seed),
    };
    (f, g)
}

/// Evaluate one probe on freshly sampled input fields.
pub fn estimate_ratio_probe(
    sys: &DyadicSystem,
    kind: ProbeKind,
    pr: &ProbeParams,
    seed: u64,
) -> Result<ProbeReport> {
    let (f, g) = probe_inputs(sys.grid(), kind, seed);
    estimate_ratio_with(sys, kind, pr, &f, &g, seed)
}

/// Run a probe over many seeds; the maximum ratio is the empirical constant.
pub fn probe_batch(
    sys: &DyadicSystem,
    kind: ProbeKind,
    pr: &ProbeParams,
    seeds: impl Iterator<Item = u64>,
) -> Result<Vec<ProbeReport>> {
    let mut out = Vec::new();
    for seed in seeds {
        out.push(estimate_ratio_probe(sys, kind, pr, seed)?);
    }
    Ok(out)
}

/// Largest ratio in a batch: the empirical constant of the estimate.
pub fn empirical_constant(reports: &[ProbeReport]) -> f64 {
    reports.iter().map(|r| r.ratio).fold(0.0, f64::max)
}
