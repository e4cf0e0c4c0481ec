//! Spectral fields on the periodic grid.
//!
//! A [`SpectralField`] stores the Fourier-series coefficients of a scalar,
//! vector, or matrix field, one full complex lattice per component
//! (components outermost, lattice row-major). The transform convention is
//! "unitary in the mean":
//!
//! * forward: `c(m) = N^{-n} * sum_x f(x) e^{-i x . xi_m}`,
//! * inverse: `f(x) = sum_m c(m) e^{+i x . xi_m}`,
//!
//! so `f(x) = cos(x_1)` on period `2*pi` has coefficients `1/2` at `m = e_1`
//! and `m = -e_1`, and the physical `L^2` norm satisfies
//! `||f||_2^2 = L^n * sum_m |c(m)|^2`.
//!
//! Pointwise products go through zero-padding to `3N/2` points per axis, so
//! the retained coefficients of quadratic expressions are exact (no
//! aliasing) for band-limited inputs. The unmatched Nyquist row `m = -N/2`
//! is zeroed whenever a product or multiplier writes a field.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::transform_nd;
use crate::grid::Grid;

/// Tensor rank of a field: scalar, vector (`n` components), or matrix
/// (`n*n` components, row-major, entry `(i, j)` at `i*n + j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
    Matrix,
}

impl Rank {
    /// Number of components for spatial dimension `n`.
    pub fn components(self, n: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => n,
            Rank::Matrix => n * n,
        }
    }

    /// Stable single-byte code used by the field-file format.
    pub(crate) fn code(self) -> u8 {
        match self {
            Rank::Scalar => 0,
            Rank::Vector => 1,
            Rank::Matrix => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Rank> {
        match code {
            0 => Some(Rank::Scalar),
            1 => Some(Rank::Vector),
            2 => Some(Rank::Matrix),
            _ => None,
        }
    }
}

/// A spectral field: Fourier coefficients of all components on one grid.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    rank: Rank,
    data: Vec<Complex64>,
}

impl SpectralField {
    /// The zero field.
    pub fn zeros(grid: Grid, rank: Rank) -> Self {
        let len = rank.components(grid.dim()) * grid.len();
        SpectralField { grid, rank, data: vec![Complex64::default(); len] }
    }

    /// Forward-transform real physical samples (components outermost,
    /// row-major sites).
    pub fn from_real_samples(grid: Grid, rank: Rank, samples: &[f64]) -> Result<Self> {
        let comps = rank.components(grid.dim());
        if samples.len() != comps * grid.len() {
            return Err(Error::Mismatch(format!(
                "sample buffer has {} values, grid needs {}",
                samples.len(),
                comps * grid.len()
            )));
        }
        let complex: Vec<Complex64> =
            samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_complex_samples(grid, rank, &complex)
    }

    /// Forward-transform complex physical samples. Complex samples are the
    /// honest representation of modulated profiles like `e^{i x_1 / eps} f`;
    /// conjugate symmetry is neither assumed nor enforced here.
    pub fn from_complex_samples(grid: Grid, rank: Rank, samples: &[Complex64]) -> Result<Self> {
        let comps = rank.components(grid.dim());
        let vol = grid.len();
        if samples.len() != comps * vol {
            return Err(Error::Mismatch(format!(
                "sample buffer has {} values, grid needs {}",
                samples.len(),
                comps * vol
            )));
        }
        let shape = vec![grid.points_per_axis(); grid.dim()];
        let mut data = samples.to_vec();
        let scale = 1.0 / vol as f64;
        for c in 0..comps {
            let lane = &mut data[c * vol..(c + 1) * vol];
            transform_nd(lane, &shape, true);
            for v in lane.iter_mut() {
                *v *= scale;
            }
        }
        Ok(SpectralField { grid, rank, data })
    }

    /// Inverse-transform to complex physical samples.
    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        let vol = self.grid.len();
        let shape = vec![self.grid.points_per_axis(); self.grid.dim()];
        let mut out = self.data.clone();
        for c in 0..self.n_components() {
            transform_nd(&mut out[c * vol..(c + 1) * vol], &shape, false);
        }
        out
    }

    /// Inverse-transform and keep the real part. Appropriate when the field
    /// represents a real function; see [`SpectralField::hermitian_defect`]
    /// for the symmetry diagnostic.
    pub fn to_real_samples(&self) -> Vec<f64> {
        self.to_complex_samples().iter().map(|v| v.re).collect()
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn rank(&self) -> Rank {
        self.rank
    }

    #[inline]
    pub fn n_components(&self) -> usize {
        self.rank.components(self.grid.dim())
    }

    /// Coefficient lattice of one component.
    #[inline]
    pub fn component(&self, c: usize) -> &[Complex64] {
        let vol = self.grid.len();
        &self.data[c * vol..(c + 1) * vol]
    }

    /// Mutable coefficient lattice of one component.
    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let vol = self.grid.len();
        &mut self.data[c * vol..(c + 1) * vol]
    }

    #[inline]
    pub fn coeff(&self, c: usize, idx: usize) -> Complex64 {
        self.data[c * self.grid.len() + idx]
    }

    #[inline]
    pub fn coeff_mut(&mut self, c: usize, idx: usize) -> &mut Complex64 {
        let vol = self.grid.len();
        &mut self.data[c * vol + idx]
    }

    /// Whole coefficient buffer (components outermost), e.g. for file I/O.
    pub(crate) fn raw(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn from_raw(grid: Grid, rank: Rank, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rank.components(grid.dim()) * grid.len());
        SpectralField { grid, rank, data }
    }

    /// Mean value (the `xi = 0` coefficient) of one component.
    pub fn mean(&self, c: usize) -> Complex64 {
        self.coeff(c, 0)
    }

    /// Remove the mean of every component.
    pub fn zero_mean(&mut self) {
        for c in 0..self.n_components() {
            *self.coeff_mut(c, 0) = Complex64::default();
        }
    }

    /// Zero the unmatched Nyquist rows (`m_i = -N/2` on any axis).
    pub fn zero_nyquist(&mut self) {
        let vol = self.grid.len();
        let grid = self.grid;
        for idx in 0..vol {
            if grid.is_nyquist(idx) {
                for c in 0..self.n_components() {
                    self.data[c * vol + idx] = Complex64::default();
                }
            }
        }
    }

    /// Set the conjugate pair `c(m) = a`, `c(-m) = conj(a)` in one
    /// component, producing the real profile `2 Re(a e^{i x . xi_m})`.
    /// Errors when `m` is out of range or on a Nyquist row.
    pub fn set_mode_pair(&mut self, comp: usize, m: &[i64], a: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of_freq(m)
            .ok_or_else(|| Error::Mismatch(format!("mode {m:?} outside the lattice")))?;
        if self.grid.is_nyquist(idx) {
            return Err(Error::Mismatch(format!("mode {m:?} lies on a Nyquist row")));
        }
        let neg: Vec<i64> = m.iter().map(|&v| -v).collect();
        let nidx = self.grid.index_of_freq(&neg).expect("mirror of non-Nyquist mode exists");
        *self.coeff_mut(comp, idx) = a;
        if nidx != idx {
            *self.coeff_mut(comp, nidx) = a.conj();
        } else {
            *self.coeff_mut(comp, idx) = Complex64::new(a.re, 0.0);
        }
        Ok(())
    }

    /// Flat index of the frequency `-m`, when representable (no component on
    /// the unmatched Nyquist row).
    fn mirror_index(&self, idx: usize) -> Option<usize> {
        let m = self.grid.freq(idx);
        let neg = [-m[0], -m[1], -m[2]];
        self.grid.index_of_freq(&neg[..self.grid.dim()])
    }

    /// Project onto the conjugate-symmetric part: `c(m) <-
    /// (c(m) + conj(c(-m))) / 2`, zeroing unmatched Nyquist rows. After this
    /// the field represents a real function.
    pub fn hermitian_symmetrize(&mut self) {
        let vol = self.grid.len();
        for c in 0..self.n_components() {
            for idx in 0..vol {
                match self.mirror_index(idx) {
                    Some(nidx) if nidx >= idx => {
                        let a = self.coeff(c, idx);
                        let b = self.coeff(c, nidx);
                        let half = 0.5 * (a + b.conj());
                        *self.coeff_mut(c, idx) = half;
                        *self.coeff_mut(c, nidx) = half.conj();
                    }
                    Some(_) => {}
                    None => *self.coeff_mut(c, idx) = Complex64::default(),
                }
            }
        }
    }

    /// Largest violation of conjugate symmetry, `max |c(m) - conj(c(-m))|`
    /// over representable pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let vol = self.grid.len();
        let mut worst = 0.0f64;
        for c in 0..self.n_components() {
            for idx in 0..vol {
                if let Some(nidx) = self.mirror_index(idx) {
                    let d = (self.coeff(c, idx) - self.coeff(c, nidx).conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Physical `L^2` norm via the coefficient sum
    /// `sqrt(L^n * sum |c|^2)`, with vector and matrix fields measured by
    /// their pointwise Euclidean magnitude.
    pub fn l2_norm(&self) -> f64 {
        let vol_factor = self.grid.period().powi(self.grid.dim() as i32);
        let sum: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        (vol_factor * sum).sqrt()
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_abs_coeff(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Whether every coefficient is finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) -> Result<()> {
        self.check_same_layout(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    /// Multiply every coefficient by a real scalar.
    pub fn scale(&mut self, s: f64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    fn check_same_layout(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Mismatch("fields live on different grids".into()));
        }
        if self.rank != other.rank {
            return Err(Error::Mismatch("fields have different ranks".into()));
        }
        Ok(())
    }

    /// Maximum coefficient difference against another field of the same
    /// layout (diagnostic for residual checks).
    pub fn max_diff(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl std::ops::Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("operands must share grid and rank");
        out
    }
}

impl std::ops::Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("operands must share grid and rank");
        out
    }
}

impl std::ops::Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(s);
        out
    }
}

// ---------------------------------------------------------------------------
// Dealiased pointwise products (zero-padding to 3N/2 points per axis).
// ---------------------------------------------------------------------------

fn padded_points(n_points: usize) -> usize {
    n_points + n_points / 2
}

/// Flat index on the padded lattice carrying the same frequency as `idx`.
fn padded_index(grid: &Grid, m_pad: usize, idx: usize) -> usize {
    let mut out = 0usize;
    for axis in 0..grid.dim() {
        let m = grid.freq_component(idx, axis);
        let i = if m >= 0 { m as usize } else { (m + m_pad as i64) as usize };
        out = out * m_pad + i;
    }
    out
}

/// Physical samples of every component on the padded lattice.
fn padded_physical(f: &SpectralField) -> Vec<Vec<Complex64>> {
    let grid = f.grid();
    let m_pad = padded_points(grid.points_per_axis());
    let pad_vol = m_pad.pow(grid.dim() as u32);
    let shape = vec![m_pad; grid.dim()];
    (0..f.n_components())
        .map(|c| {
            let lane = f.component(c);
            let mut buf = vec![Complex64::default(); pad_vol];
            for (idx, &v) in lane.iter().enumerate() {
                if v != Complex64::default() {
                    buf[padded_index(&grid, m_pad, idx)] = v;
                }
            }
            transform_nd(&mut buf, &shape, false);
            buf
        })
        .collect()
}

/// Forward-transform padded physical lanes and truncate back to the grid,
/// zeroing Nyquist rows.
fn padded_synthesis(grid: Grid, rank: Rank, mut lanes: Vec<Vec<Complex64>>) -> SpectralField {
    let m_pad = padded_points(grid.points_per_axis());
    let pad_vol = m_pad.pow(grid.dim() as u32);
    let shape = vec![m_pad; grid.dim()];
    let scale = 1.0 / pad_vol as f64;
    let mut out = SpectralField::zeros(grid, rank);
    for (c, lane) in lanes.iter_mut().enumerate() {
        transform_nd(lane, &shape, true);
        let comp = out.component_mut(c);
        for (idx, slot) in comp.iter_mut().enumerate() {
            if !grid.is_nyquist(idx) {
                *slot = lane[padded_index(&grid, m_pad, idx)] * scale;
            }
        }
    }
    out
}

/// Dealiased pointwise product of a scalar field with a field of any rank
/// (componentwise scaling). Exact on the retained modes for band-limited
/// inputs.
pub fn pointwise_product(scalar: &SpectralField, other: &SpectralField) -> Result<SpectralField> {
    if scalar.grid() != other.grid() {
        return Err(Error::Mismatch("product factors live on different grids".into()));
    }
    if scalar.rank() != Rank::Scalar {
        return Err(Error::Mismatch("first product factor must be scalar".into()));
    }
    let s = padded_physical(scalar);
    let o = padded_physical(other);
    let lanes: Vec<Vec<Complex64>> = o
        .iter()
        .map(|lane| lane.iter().zip(&s[0]).map(|(a, b)| a * b).collect())
        .collect();
    Ok(padded_synthesis(other.grid(), other.rank(), lanes))
}

/// Dealiased pointwise dot product of two vector fields.
pub fn pointwise_dot(u: &SpectralField, w: &SpectralField) -> Result<SpectralField> {
    if u.grid() != w.grid() {
        return Err(Error::Mismatch("product factors live on different grids".into()));
    }
    if u.rank() != Rank::Vector || w.rank() != Rank::Vector {
        return Err(Error::Mismatch("dot product needs two vector fields".into()));
    }
    let a = padded_physical(u);
    let b = padded_physical(w);
    let len = a[0].len();
    let mut acc = vec![Complex64::default(); len];
    for c in 0..a.len() {
        for i in 0..len {
            acc[i] += a[c][i] * b[c][i];
        }
    }
    Ok(padded_synthesis(u.grid(), Rank::Scalar, vec![acc]))
}

/// Dealiased contraction `out_i = sum_j v_j * M_{i j}` of a vector field
/// with a matrix field. With `M_{i j} = d_j w_i` this is the convective
/// derivative `(v . grad) w`.
pub fn pointwise_vec_mat(v: &SpectralField, m: &SpectralField) -> Result<SpectralField> {
    if v.grid() != m.grid() {
        return Err(Error::Mismatch("product factors live on different grids".into()));
    }
    if v.rank() != Rank::Vector || m.rank() != Rank::Matrix {
        return Err(Error::Mismatch("contraction needs a vector and a matrix field".into()));
    }
    let n = v.grid().dim();
    let vp = padded_physical(v);
    let mp = padded_physical(m);
    let len = vp[0].len();
    let mut lanes = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = vec![Complex64::default(); len];
        for j in 0..n {
            let mat = &mp[i * n + j];
            let vec = &vp[j];
            for s in 0..len {
                acc[s] += vec[s] * mat[s];
            }
        }
        lanes.push(acc);
    }
    Ok(padded_synthesis(v.grid(), Rank::Vector, lanes))
}

/// Apply a real scalar function pointwise in physical space and transform
/// back (no padding: composition is not polynomial, so exactness is not on
/// offer; band content beyond the grid is truncated, Nyquist rows zeroed).
pub fn pointwise_map(f: &SpectralField, func: impl Fn(f64) -> f64) -> Result<SpectralField> {
    if f.rank() != Rank::Scalar {
        return Err(Error::Mismatch("pointwise map needs a scalar field".into()));
    }
    let samples = f.to_real_samples();
    let mapped: Vec<f64> = samples.iter().map(|&v| func(v)).collect();
    let mut out = SpectralField::from_real_samples(f.grid(), Rank::Scalar, &mapped)?;
    out.zero_nyquist();
    Ok(out)
}
