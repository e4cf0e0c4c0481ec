//! Fourier multipliers and the differential operators built from them.
//!
//! A [`Multiplier`] is a mapping `xi -> scalar` (acting componentwise on any
//! rank) or `xi -> n x n complex matrix` (acting on vector fields), together
//! with an explicit rule for the zero mode, where symbols like `1/|xi|` are
//! undefined. Every application zeroes the unmatched Nyquist rows.
//!
//! Derivatives use `d_j <-> i xi_j`. The operator `Lambda^s` multiplies by
//! `|xi|^s` and annihilates the mean for `s < 0`; `Lambda^{-1}` composed
//! with `Lambda` is therefore the identity minus the mean projection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Rank, SpectralField};

/// What a multiplier does to the `xi = 0` coefficient.
#[derive(Clone, Copy, Debug)]
pub enum ZeroModeRule {
    /// Evaluate the symbol at `xi = 0` (symbol must be finite there).
    FromSymbol,
    /// Force the mean to zero (required for negative powers of `Lambda`).
    Annihilate,
    /// Multiply the mean by a fixed value.
    Value(Complex64),
}

type ScalarSymbol = Box<dyn Fn(&[f64; 3], f64) -> Complex64 + Send + Sync>;
type MatrixSymbol = Box<dyn Fn(&[f64; 3], f64) -> [[Complex64; 3]; 3] + Send + Sync>;

enum Symbol {
    Scalar(ScalarSymbol),
    Matrix(MatrixSymbol),
}

/// A Fourier multiplier with a declared zero-mode rule.
pub struct Multiplier {
    symbol: Symbol,
    zero_mode: ZeroModeRule,
}

impl Multiplier {
    /// Scalar symbol `(xi, |xi|) -> value`, applied to every component.
    pub fn scalar(
        zero_mode: ZeroModeRule,
        f: impl Fn(&[f64; 3], f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Multiplier { symbol: Symbol::Scalar(Box::new(f)), zero_mode }
    }

    /// Real radial symbol `|xi| -> value`, the common case for cutoffs and
    /// semigroup factors.
    pub fn radial(
        zero_mode: ZeroModeRule,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Multiplier::scalar(zero_mode, move |_, r| Complex64::new(f(r), 0.0))
    }

    /// Matrix symbol `(xi, |xi|) -> M(xi)`, applied to vector fields as
    /// `out_i = sum_j M_{i j} v_j`.
    pub fn matrix(
        zero_mode: ZeroModeRule,
        f: impl Fn(&[f64; 3], f64) -> [[Complex64; 3]; 3] + Send + Sync + 'static,
    ) -> Self {
        Multiplier { symbol: Symbol::Matrix(Box::new(f)), zero_mode }
    }

    /// Apply to a field, producing a new field of the same rank.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        let grid = f.grid();
        let vol = grid.len();
        match &self.symbol {
            Symbol::Scalar(sym) => {
                let mut out = f.clone();
                let comps = out.n_components();
                for idx in 0..vol {
                    let scale = if idx == 0 {
                        match self.zero_mode {
                            ZeroModeRule::FromSymbol => sym(&[0.0; 3], 0.0),
                            ZeroModeRule::Annihilate => Complex64::default(),
                            ZeroModeRule::Value(v) => v,
                        }
                    } else if grid.is_nyquist(idx) {
                        Complex64::default()
                    } else {
                        sym(&grid.wavevector(idx), grid.xi_norm(idx))
                    };
                    for c in 0..comps {
                        *out.coeff_mut(c, idx) *= scale;
                    }
                }
                Ok(out)
            }
            Symbol::Matrix(sym) => {
                if f.rank() != Rank::Vector {
                    return Err(Error::Mismatch(
                        "matrix multipliers act on vector fields".into(),
                    ));
                }
                let n = grid.dim();
                let mut out = SpectralField::zeros(grid, Rank::Vector);
                for idx in 0..vol {
                    if grid.is_nyquist(idx) {
                        continue;
                    }
                    let mat = if idx == 0 {
                        match self.zero_mode {
                            ZeroModeRule::FromSymbol => sym(&[0.0; 3], 0.0),
                            ZeroModeRule::Annihilate => [[Complex64::default(); 3]; 3],
                            ZeroModeRule::Value(v) => {
                                let mut m = [[Complex64::default(); 3]; 3];
                                for (i, row) in m.iter_mut().enumerate() {
                                    row[i] = v;
                                }
                                m
                            }
                        }
                    } else {
                        sym(&grid.wavevector(idx), grid.xi_norm(idx))
                    };
                    for i in 0..n {
                        let mut acc = Complex64::default();
                        for j in 0..n {
                            acc += mat[i][j] * f.coeff(j, idx);
                        }
                        *out.coeff_mut(i, idx) = acc;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Gradient of a scalar field: `(grad f)_i = d_i f`.
pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    if f.rank() != Rank::Scalar {
        return Err(Error::Mismatch("gradient expects a scalar field".into()));
    }
    let grid = f.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, Rank::Vector);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        let v = f.coeff(0, idx);
        for i in 0..n {
            *out.coeff_mut(i, idx) = Complex64::new(0.0, xi[i]) * v;
        }
    }
    Ok(out)
}

/// Divergence of a vector field: `div v = sum_j d_j v_j`.
pub fn divergence(v: &SpectralField) -> Result<SpectralField> {
    if v.rank() != Rank::Vector {
        return Err(Error::Mismatch("divergence expects a vector field".into()));
    }
    let grid = v.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, Rank::Scalar);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        let mut acc = Complex64::default();
        for j in 0..n {
            acc += Complex64::new(0.0, xi[j]) * v.coeff(j, idx);
        }
        *out.coeff_mut(0, idx) = acc;
    }
    Ok(out)
}

/// Row-wise divergence of a matrix field: `(div M)_i = sum_j d_j M_{i j}`.
pub fn divergence_matrix(m: &SpectralField) -> Result<SpectralField> {
    if m.rank() != Rank::Matrix {
        return Err(Error::Mismatch("matrix divergence expects a matrix field".into()));
    }
    let grid = m.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, Rank::Vector);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        for i in 0..n {
            let mut acc = Complex64::default();
            for j in 0..n {
                acc += Complex64::new(0.0, xi[j]) * m.coeff(i * n + j, idx);
            }
            *out.coeff_mut(i, idx) = acc;
        }
    }
    Ok(out)
}

/// Full gradient of a vector field as a matrix: `(grad v)_{i j} = d_j v_i`.
pub fn gradient_vector(v: &SpectralField) -> Result<SpectralField> {
    if v.rank() != Rank::Vector {
        return Err(Error::Mismatch("vector gradient expects a vector field".into()));
    }
    let grid = v.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, Rank::Matrix);
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        for i in 0..n {
            let vi = v.coeff(i, idx);
            for j in 0..n {
                *out.coeff_mut(i * n + j, idx) = Complex64::new(0.0, xi[j]) * vi;
            }
        }
    }
    Ok(out)
}

/// Antisymmetrized gradient: `(curl v)_{i j} = d_j v_i - d_i v_j`.
pub fn curl_matrix(v: &SpectralField) -> Result<SpectralField> {
    let g = gradient_vector(v)?;
    let grid = v.grid();
    let n = grid.dim();
    let mut out = SpectralField::zeros(grid, Rank::Matrix);
    for idx in 0..grid.len() {
        for i in 0..n {
            for j in 0..n {
                *out.coeff_mut(i * n + j, idx) =
                    g.coeff(i * n + j, idx) - g.coeff(j * n + i, idx);
            }
        }
    }
    Ok(out)
}

/// Laplacian on any rank: multiplication by `-|xi|^2`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    Multiplier::radial(ZeroModeRule::FromSymbol, |r| -(r * r))
        .apply(f)
        .expect("scalar multiplier applies to any rank")
}

/// `Lambda^s` = multiplication by `|xi|^s`. Negative powers annihilate the
/// mean; `s = 0` keeps it (identity).
pub fn lambda_pow(f: &SpectralField, s: f64) -> SpectralField {
    let rule = if s == 0.0 { ZeroModeRule::FromSymbol } else { ZeroModeRule::Annihilate };
    Multiplier::scalar(rule, move |_, r| {
        Complex64::new(if r == 0.0 && s == 0.0 { 1.0 } else { r.powf(s) }, 0.0)
    })
    .apply(f)
    .expect("scalar multiplier applies to any rank")
}
