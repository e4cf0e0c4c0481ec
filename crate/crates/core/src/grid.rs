//! Periodic grid and its dual lattice.
//!
//! Fields live on the torus `[0, L)^n` sampled at `N` equispaced points per
//! axis. The dual lattice consists of wavevectors `xi = (2*pi/L) * m` with
//! integer `m_i` in `[-N/2, N/2)`; the layout along each axis is the usual
//! FFT order (`m = i` for `i < N/2`, `m = i - N` otherwise). The grid also
//! fixes the dyadic ring range `[j_min, j_max]` used by the ring
//! decomposition: ring `j` occupies `{ 2^j * 3/4 <= |xi| <= 2^j * 8/3 }`,
//! rings below `j_min` contain no nonzero lattice point, and the ring at
//! `j_max` is the first one clipped by the per-axis Nyquist frequency.

use crate::error::{Error, Result};

/// Guard against floating-point jitter when placing exact powers of two on
/// ring boundaries.
const LOG_EPS: f64 = 1e-9;

/// An `n`-dimensional periodic grid (`n` in `1..=3`) with `N` points per
/// axis and period `L`. Cheap to copy; every field carries one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    n_points: usize,
    length: f64,
    j_min: i32,
    j_max: i32,
}

impl Grid {
    /// Build a grid, validating the supported envelope: `n` in `1..=3`,
    /// `N` a power of two with `8 <= N <= 4096`, and `L > 0`. One-dimensional
    /// grids are intended for multiplier-level diagnostics (decay sweeps,
    /// kernel checks), not for the full solver.
    pub fn new(n: usize, n_points: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension n = {n}, expected 1, 2, or 3")));
        }
        if !n_points.is_power_of_two() || !(8..=4096).contains(&n_points) {
            return Err(Error::InvalidGrid(format!(
                "N = {n_points}, expected a power of two in [8, 4096]"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("period L = {length}, expected L > 0")));
        }
        let xi_min = 2.0 * std::f64::consts::PI / length;
        let j_min = (0.75 * xi_min).log2().sub_eps_ceil() - 1;
        let xi_nyq = xi_min * (n_points as f64) / 2.0;
        let j_max = (xi_nyq * 3.0 / 8.0).log2().add_eps_floor() + 1;
        Ok(Grid { n, n_points, length, j_min, j_max })
    }

    /// Spatial dimension `n`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Points per axis `N`.
    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.n_points
    }

    /// Torus period `L`.
    #[inline]
    pub fn period(&self) -> f64 {
        self.length
    }

    /// Total number of lattice sites `N^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n_points.pow(self.n as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `L / N`.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.n_points as f64
    }

    /// Quadrature weight of one site, `(L/N)^n`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.n as i32)
    }

    /// Smallest nonzero wavevector magnitude, `2*pi/L`.
    #[inline]
    pub fn xi_min(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Per-axis Nyquist magnitude `(2*pi/L) * N/2`.
    #[inline]
    pub fn xi_nyquist(&self) -> f64 {
        self.xi_min() * (self.n_points as f64) / 2.0
    }

    /// Lowest dyadic ring index: the smallest `j` whose ring reaches the
    /// first nonzero lattice frequency.
    #[inline]
    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    /// Highest dyadic ring index; this ring is clipped by the Nyquist cutoff.
    #[inline]
    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Magnitude band `[2^j_min * 4/3, 2^j_max * 3/2]` on which the dyadic
    /// ring weights sum exactly to one. Fields whose spectrum lies inside
    /// this band (plus the mean) reconstruct exactly from their ring blocks.
    pub fn covered_band(&self) -> (f64, f64) {
        (
            (self.j_min as f64).exp2() * (4.0 / 3.0),
            (self.j_max as f64).exp2() * 1.5,
        )
    }

    /// Integer frequency along one axis for a flat lattice index.
    #[inline]
    pub fn freq_component(&self, idx: usize, axis: usize) -> i64 {
        let nn = self.n_points;
        debug_assert!(axis < self.n);
        // Row-major with axis 0 outermost.
        let mut rem = idx;
        for _ in (axis + 1)..self.n {
            rem /= nn;
        }
        let i = rem % nn;
        if i < nn / 2 {
            i as i64
        } else {
            i as i64 - nn as i64
        }
    }

    /// All integer frequency components for a flat index (unused trailing
    /// entries are zero).
    #[inline]
    pub fn freq(&self, idx: usize) -> [i64; 3] {
        let nn = self.n_points;
        let mut m = [0i64; 3];
        let mut rem = idx;
        for axis in (0..self.n).rev() {
            let i = rem % nn;
            rem /= nn;
            m[axis] = if i < nn / 2 { i as i64 } else { i as i64 - nn as i64 };
        }
        m
    }

    /// Wavevector `xi = (2*pi/L) * m` for a flat index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.freq(idx);
        let k = self.xi_min();
        [m[0] as f64 * k, m[1] as f64 * k, m[2] as f64 * k]
    }

    /// `|xi|^2` for a flat index.
    #[inline]
    pub fn xi_norm_sq(&self, idx: usize) -> f64 {
        let xi = self.wavevector(idx);
        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
    }

    /// `|xi|` for a flat index.
    #[inline]
    pub fn xi_norm(&self, idx: usize) -> f64 {
        self.xi_norm_sq(idx).sqrt()
    }

    /// Whether the site carries the unmatched Nyquist frequency `m = -N/2`
    /// on any axis. Such rows cannot participate in a conjugate-symmetric
    /// pair and are zeroed by every multiplier application.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = -(self.n_points as i64) / 2;
        let m = self.freq(idx);
        (0..self.n).any(|ax| m[ax] == half)
    }

    /// Physical coordinates of a flat index.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let nn = self.n_points;
        let dx = self.dx();
        let mut x = [0.0f64; 3];
        let mut rem = idx;
        for axis in (0..self.n).rev() {
            x[axis] = (rem % nn) as f64 * dx;
            rem /= nn;
        }
        x
    }

    /// Flat index of an integer frequency vector; `None` when a component
    /// lies outside `[-N/2, N/2)`.
    pub fn index_of_freq(&self, m: &[i64]) -> Option<usize> {
        let nn = self.n_points as i64;
        let mut idx = 0usize;
        for axis in 0..self.n {
            let mi = m.get(axis).copied().unwrap_or(0);
            if mi < -nn / 2 || mi >= nn / 2 {
                return None;
            }
            let i = if mi >= 0 { mi } else { mi + nn } as usize;
            idx = idx * self.n_points + i;
        }
        Some(idx)
    }
}

trait EpsRound {
    fn sub_eps_ceil(self) -> i32;
    fn add_eps_floor(self) -> i32;
}

impl EpsRound for f64 {
    fn sub_eps_ceil(self) -> i32 {
        (self - LOG_EPS).ceil() as i32
    }
    fn add_eps_floor(self) -> i32 {
        (self + LOG_EPS).floor() as i32
    }
}
