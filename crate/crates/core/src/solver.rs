//! Pseudospectral exponential-integrator solver for the rescaled
//! compressible flow system in `(a, d, Omega)` variables, plus the
//! linear-with-convection model problem and its a-priori-inequality
//! report.
//!
//! State variables: relative density deviation `a = rho/rho_ref - 1`, the
//! velocity potential `d = Lambda^{-1} div v`, the rotation matrix
//! `Omega = Lambda^{-1} (d_j v_i - d_i v_j)`, and the zero-mode velocity
//! `mean_v` (which the `d`/`Omega` coordinates cannot see but which is
//! dynamical on the torus). Here `Lambda = sqrt(-Laplacian)`.
//!
//! The time integrator is a two-stage exponential trapezoid rule: the
//! coupled `(a, d)` pair flows under the exact per-frequency propagator
//! of `green`, `Omega` under the exact heat factor, and every nonlinear
//! term — convection included — is quadratured as a source. The linear
//! part is therefore unconditionally stable and exactly reproduced; the
//! explicit convection sources demand the advective step bound
//! `dt <= 0.5 (L/N) / max|v|`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::besov::{chemin_lerner_norm, hybrid_norm, HybridParams, NormSeries};
use crate::error::{Error, Result};
use crate::field::{
    pointwise_dot, pointwise_product, pointwise_vec_mat, Rank, SpectralField,
};
use crate::green::ghat;
use crate::grid::Grid;
use crate::io::{write_field, Payload};
use crate::lp::DyadicSystem;
use crate::multiplier::{
    curl_matrix, divergence, divergence_matrix, gradient, gradient_vector, laplacian,
    lambda_pow,
};
use crate::paraproduct::{density_ratio, min_density, pressure_coupling, DENSITY_FLOOR};

// ---------------------------------------------------------------------------
// Physical parameters and nondimensionalization.
// ---------------------------------------------------------------------------

/// Rescaled material constants of the flow. Constructed through
/// [`PhysicsParams::nondimensionalize`], which enforces ellipticity of the
/// viscous operator and a strictly increasing pressure law.
#[derive(Debug, Clone, Copy)]
pub struct PhysicsParams {
    mu_bar: f64,
    lambda_bar: f64,
    gamma: f64,
    rho_bar: f64,
    varpi: f64,
}

impl PhysicsParams {
    /// Rescale raw constants `(rho_ref, mu, lambda, gamma)`: viscosities are
    /// divided by the reference density and time/space are scaled by the
    /// sound speed `varpi = sqrt(gamma rho_ref^(gamma-1))` so the integrated
    /// system has unit sound speed.
    pub fn nondimensionalize(rho_bar: f64, mu: f64, lambda: f64, gamma: f64) -> Result<Self> {
        if !(rho_bar > 0.0) || !rho_bar.is_finite() {
            return Err(Error::Inadmissible(format!(
                "reference density must be positive and finite, got {rho_bar}"
            )));
        }
        let mu_bar = mu / rho_bar;
        let lambda_bar = lambda / rho_bar;
        if !(mu_bar > 0.0) || !(lambda_bar + 2.0 * mu_bar > 0.0) {
            return Err(Error::NonElliptic(format!(
                "requires mu > 0 and lambda + 2 mu > 0, got mu = {mu}, lambda = {lambda}"
            )));
        }
        let pressure_slope = gamma * rho_bar.powf(gamma - 1.0);
        if !(pressure_slope > 0.0) || !pressure_slope.is_finite() {
            return Err(Error::Inadmissible(format!(
                "pressure law must be strictly increasing at the reference density, \
                 got slope {pressure_slope}"
            )));
        }
        Ok(PhysicsParams {
            mu_bar,
            lambda_bar,
            gamma,
            rho_bar,
            varpi: pressure_slope.sqrt(),
        })
    }

    pub fn mu_bar(&self) -> f64 {
        self.mu_bar
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    /// Total viscosity `lambda + 2 mu` (rescaled), the damping rate of the
    /// potential part.
    pub fn nu_bar(&self) -> f64 {
        self.lambda_bar + 2.0 * self.mu_bar
    }

    /// Sound speed of the raw system; the rescaling factor.
    pub fn varpi(&self) -> f64 {
        self.varpi
    }

    /// Physical seconds per solver time unit.
    pub fn time_rescale(&self) -> f64 {
        self.varpi.powi(-2)
    }

    /// Physical length per solver length unit.
    pub fn space_rescale(&self) -> f64 {
        1.0 / self.varpi
    }
}

// ---------------------------------------------------------------------------
// State and the Hodge-type splitting of the velocity.
// ---------------------------------------------------------------------------

/// Solver state in the working variables.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Relative density deviation (scalar).
    pub a: SpectralField,
    /// Velocity potential `Lambda^{-1} div v` (scalar, mean-free).
    pub d: SpectralField,
    /// Rotation part `Lambda^{-1} (d_j v_i - d_i v_j)` (antisymmetric
    /// matrix, mean-free).
    pub omega: SpectralField,
    /// Zero-mode velocity.
    pub mean_v: [f64; 3],
    /// Current time.
    pub t: f64,
}

impl SolverState {
    /// Build a state from primitive fields `(a0, v0)` at time zero.
    pub fn from_primitive(a0: &SpectralField, v0: &SpectralField) -> Result<Self> {
        if a0.rank() != Rank::Scalar {
            return Err(Error::Mismatch("density deviation must be a scalar field".into()));
        }
        if a0.grid() != v0.grid() {
            return Err(Error::Mismatch("state fields live on different grids".into()));
        }
        let (d, omega, mean_v) = hodge_split(v0)?;
        Ok(SolverState {
            a: a0.clone(),
            d,
            omega,
            mean_v,
            t: 0.0,
        })
    }

    /// Reassemble the velocity field.
    pub fn velocity(&self) -> Result<SpectralField> {
        hodge_reconstruct(&self.d, &self.omega, self.mean_v)
    }

    /// Largest violation of `Omega_ij = -Omega_ji` over all coefficients.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.omega.grid().dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for idx in 0..self.omega.grid().len() {
                    let s = self.omega.coeff(i * n + j, idx) + self.omega.coeff(j * n + i, idx);
                    worst = worst.max(s.norm());
                }
            }
        }
        worst
    }

    fn all_finite(&self) -> bool {
        self.a.all_finite()
            && self.d.all_finite()
            && self.omega.all_finite()
            && self.mean_v.iter().all(|v| v.is_finite())
    }
}

/// Split a real velocity field into `(d, Omega, mean_v)`:
/// `d = Lambda^{-1} div v`, `Omega = Lambda^{-1} (d_j v_i - d_i v_j)`.
pub fn hodge_split(v: &SpectralField) -> Result<(SpectralField, SpectralField, [f64; 3])> {
    if v.rank() != Rank::Vector {
        return Err(Error::Mismatch("velocity splitting expects a vector field".into()));
    }
    let d = lambda_pow(&divergence(v)?, -1.0);
    let omega = lambda_pow(&curl_matrix(v)?, -1.0);
    let mut mean_v = [0.0; 3];
    for c in 0..v.grid().dim() {
        mean_v[c] = v.mean(c).re;
    }
    Ok((d, omega, mean_v))
}

fn check_mean_free(f: &SpectralField, what: &str) -> Result<()> {
    for c in 0..f.n_components() {
        if f.mean(c).norm() > 1e-12 * (1.0 + f.l2_norm()) {
            return Err(Error::InvalidState(format!(
                "{what} must be mean-free, component {c} has mean {}",
                f.mean(c)
            )));
        }
    }
    Ok(())
}

/// Rebuild the velocity from its splitting:
/// `v = -Lambda^{-1} grad d - Lambda^{-1} div Omega + mean_v`.
/// The signs are fixed by requiring this to invert [`hodge_split`] under
/// the crate's Fourier convention.
pub fn hodge_reconstruct(
    d: &SpectralField,
    omega: &SpectralField,
    mean_v: [f64; 3],
) -> Result<SpectralField> {
    if d.rank() != Rank::Scalar || omega.rank() != Rank::Matrix {
        return Err(Error::Mismatch(
            "velocity reconstruction expects a scalar potential and a matrix rotation".into(),
        ));
    }
    if d.grid() != omega.grid() {
        return Err(Error::Mismatch("potential and rotation live on different grids".into()));
    }
    check_mean_free(d, "velocity potential")?;
    check_mean_free(omega, "rotation part")?;
    let mut v = lambda_pow(&gradient(d)?, -1.0);
    v.scale(-1.0);
    let sol = lambda_pow(&divergence_matrix(omega)?, -1.0);
    v.axpy(-1.0, &sol)?;
    for c in 0..v.grid().dim() {
        *v.coeff_mut(c, 0) = Complex64::new(mean_v[c], 0.0);
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Nonlinear sources.
// ---------------------------------------------------------------------------

/// Pointwise products, dealiased (padded) or plain (sampled on the bare
/// grid), selected by configuration.
#[derive(Debug, Clone, Copy)]
struct ProductOps {
    dealias: bool,
}

impl ProductOps {
    fn scalar(&self, s: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        if self.dealias {
            pointwise_product(s, f)
        } else {
            aliased_binary(s, f, |a, b, _| a * b, f.rank())
        }
    }

    fn dot(&self, u: &SpectralField, w: &SpectralField) -> Result<SpectralField> {
        if self.dealias {
            pointwise_dot(u, w)
        } else {
            let n = u.grid().dim();
            aliased_binary(
                u,
                w,
                move |_, _, lanes| {
                    let (a, b, i) = lanes;
                    (0..n).map(|c| a[c][i] * b[c][i]).sum()
                },
                Rank::Scalar,
            )
        }
    }

    fn vec_mat(&self, v: &SpectralField, m: &SpectralField) -> Result<SpectralField> {
        if self.dealias {
            pointwise_vec_mat(v, m)
        } else {
            let n = v.grid().dim();
            let va = v.to_complex_samples();
            let ma = m.to_complex_samples();
            let vol = v.grid().len();
            let mut out = vec![Complex64::default(); n * vol];
            for i in 0..n {
                for j in 0..n {
                    let mat = &ma[(i * n + j) * vol..(i * n + j + 1) * vol];
                    let vec = &va[j * vol..(j + 1) * vol];
                    for s in 0..vol {
                        out[i * vol + s] += vec[s] * mat[s];
                    }
                }
            }
            let mut f = SpectralField::from_complex_samples(v.grid(), Rank::Vector, &out)?;
            f.zero_nyquist();
            Ok(f)
        }
    }
}

/// Plain (aliased) pointwise combination of two fields on the bare grid.
/// `op` receives the two first-component samples and, for multi-lane use,
/// the full lane tables with the running index.
fn aliased_binary(
    f: &SpectralField,
    g: &SpectralField,
    op: impl Fn(Complex64, Complex64, (&[Vec<Complex64>], &[Vec<Complex64>], usize)) -> Complex64,
    out_rank: Rank,
) -> Result<SpectralField> {
    if f.grid() != g.grid() {
        return Err(Error::Mismatch("product factors live on different grids".into()));
    }
    let grid = f.grid();
    let vol = grid.len();
    let split = |h: &SpectralField| -> Vec<Vec<Complex64>> {
        let all = h.to_complex_samples();
        (0..h.n_components())
            .map(|c| all[c * vol..(c + 1) * vol].to_vec())
            .collect()
    };
    let fl = split(f);
    let gl = split(g);
    let comps = out_rank.components(grid.dim());
    let mut out = Vec::with_capacity(comps * vol);
    for c in 0..comps {
        let ff = &fl[c.min(fl.len() - 1)];
        let gg = &gl[c.min(gl.len() - 1)];
        for i in 0..vol {
            out.push(op(ff[i], gg[i], (&fl, &gl, i)));
        }
    }
    let mut field = SpectralField::from_complex_samples(grid, out_rank, &out)?;
    field.zero_nyquist();
    Ok(field)
}

/// The combined right-hand sides actually integrated: conservation-form
/// density source, the potential and rotation sources, and the force on
/// the zero-mode velocity.
struct Sources {
    /// `-div(a v)` (exactly mean-free: mass is conserved to roundoff).
    s_a: SpectralField,
    /// `-Lambda^{-1} div W`, `W = v.grad v + L(a) A v + K(a) grad a`.
    s_d: SpectralField,
    /// `-Lambda^{-1} curl(v.grad v + L(a) A v)` (the pressure term is a
    /// gradient, so its curl vanishes identically).
    s_omega: SpectralField,
    /// `-mean(W)`: the spatially averaged momentum equation.
    mean_force: [f64; 3],
}

fn combined_sources(state: &SolverState, params: &PhysicsParams, ops: ProductOps) -> Result<Sources> {
    let floor_check = min_density(&state.a)?;
    if floor_check <= DENSITY_FLOOR {
        return Err(Error::Vacuum {
            min_density: floor_check,
            floor: DENSITY_FLOOR,
            context: format!("at t = {:.6}", state.t),
        });
    }
    let v = state.velocity()?;
    let grad_v = gradient_vector(&v)?;
    let convection = ops.vec_mat(&v, &grad_v)?;

    // Viscous operator A v = mu Lap v + (lambda + mu) grad div v.
    let mut a_v = laplacian(&v);
    a_v.scale(params.mu_bar());
    let grad_div = gradient(&divergence(&v)?)?;
    a_v.axpy(params.lambda_bar() + params.mu_bar(), &grad_div)?;

    let l_of_a = density_ratio(&state.a)?;
    let k_of_a = pressure_coupling(&state.a, params.gamma())?;
    let grad_a = gradient(&state.a)?;

    // W without the pressure gradient feeds the rotation part.
    let mut w_rot = convection;
    w_rot.axpy(1.0, &ops.scalar(&l_of_a, &a_v)?)?;
    let mut w = w_rot.clone();
    w.axpy(1.0, &ops.scalar(&k_of_a, &grad_a)?)?;

    let mut mean_force = [0.0; 3];
    for c in 0..v.grid().dim() {
        mean_force[c] = -w.mean(c).re;
    }

    let mut s_d = lambda_pow(&divergence(&w)?, -1.0);
    s_d.scale(-1.0);

    let av = ops.scalar(&state.a, &v)?;
    let mut s_a = divergence(&av)?;
    s_a.scale(-1.0);

    let mut s_omega = lambda_pow(&curl_matrix_of_vector_source(&w_rot)?, -1.0);
    s_omega.scale(-1.0);

    Ok(Sources {
        s_a,
        s_d,
        s_omega,
        mean_force,
    })
}

/// `(curl W)_{i j} = d_j W_i - d_i W_j` for a vector source.
fn curl_matrix_of_vector_source(w: &SpectralField) -> Result<SpectralField> {
    curl_matrix(w)
}

/// The named right-hand sides of the working system
/// `d_t a + Lambda d + v.grad a = F`,
/// `d_t d - nu Lap d - Lambda a + v.grad d = G`,
/// `d_t Omega - mu Lap Omega = H`:
/// `F = -a div v`, `G = v.grad d - Lambda^{-1} div W`,
/// `H = -Lambda^{-1} curl(v.grad v + L(a) A v)`.
pub fn nonlinear_rhs(
    state: &SolverState,
    params: &PhysicsParams,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    let ops = ProductOps { dealias: true };
    let src = combined_sources(state, params, ops)?;
    let v = state.velocity()?;
    let mut f = src.s_a;
    f.axpy(1.0, &ops.dot(&v, &gradient(&state.a)?)?)?;
    let mut g = src.s_d;
    g.axpy(1.0, &ops.dot(&v, &gradient(&state.d)?)?)?;
    Ok((f, g, src.s_omega))
}

// ---------------------------------------------------------------------------
// Time stepping.
// ---------------------------------------------------------------------------

/// Per-frequency linear flow tables for one step size: the four entries
/// of the coupled propagator and the heat factor for the rotation part.
struct StepKernel {
    dt: f64,
    g11: Vec<f64>,
    g12: Vec<f64>,
    g21: Vec<f64>,
    g22: Vec<f64>,
    heat: Vec<f64>,
}

impl StepKernel {
    fn new(grid: Grid, dt: f64, nu_bar: f64, mu_bar: f64) -> Result<Self> {
        let vol = grid.len();
        let mut k = StepKernel {
            dt,
            g11: vec![0.0; vol],
            g12: vec![0.0; vol],
            g21: vec![0.0; vol],
            g22: vec![0.0; vol],
            heat: vec![0.0; vol],
        };
        for idx in 0..vol {
            if grid.is_nyquist(idx) {
                continue;
            }
            let r = grid.xi_norm(idx);
            let m = ghat(r, dt, nu_bar)?;
            k.g11[idx] = m[0][0];
            k.g12[idx] = m[0][1];
            k.g21[idx] = m[1][0];
            k.g22[idx] = m[1][1];
            k.heat[idx] = (-mu_bar * r * r * dt).exp();
        }
        Ok(k)
    }

    /// Apply the coupled flow to a pair of scalars.
    fn flow_pair(&self, a: &SpectralField, d: &SpectralField) -> (SpectralField, SpectralField) {
        let mut a_out = a.clone();
        let mut d_out = d.clone();
        for idx in 0..a.grid().len() {
            let (av, dv) = (a.coeff(0, idx), d.coeff(0, idx));
            *a_out.coeff_mut(0, idx) = av * self.g11[idx] + dv * self.g12[idx];
            *d_out.coeff_mut(0, idx) = av * self.g21[idx] + dv * self.g22[idx];
        }
        (a_out, d_out)
    }

    /// Apply the heat factor to every component of a field.
    fn flow_heat(&self, f: &SpectralField) -> SpectralField {
        let mut out = f.clone();
        let vol = f.grid().len();
        for c in 0..f.n_components() {
            for idx in 0..vol {
                *out.coeff_mut(c, idx) = f.coeff(c, idx) * self.heat[idx];
            }
        }
        out
    }
}

fn max_speed(v: &SpectralField) -> f64 {
    let n = v.grid().dim();
    let vol = v.grid().len();
    let samples = v.to_real_samples();
    let mut worst: f64 = 0.0;
    for i in 0..vol {
        let mut sq = 0.0;
        for c in 0..n {
            sq += samples[c * vol + i] * samples[c * vol + i];
        }
        worst = worst.max(sq);
    }
    worst.sqrt()
}

fn check_advective_bound(grid: Grid, dt: f64, v: &SpectralField) -> Result<()> {
    let speed = max_speed(v);
    if speed > 0.0 {
        let bound = 0.5 * grid.dx() / speed;
        if dt > bound {
            return Err(Error::DtBound { dt, bound });
        }
    }
    Ok(())
}

fn step_with(
    state: &SolverState,
    params: &PhysicsParams,
    kernel: &StepKernel,
    ops: ProductOps,
) -> Result<SolverState> {
    let dt = kernel.dt;
    if !state.all_finite() {
        return Err(Error::BlowUp { t: state.t });
    }
    let v = state.velocity()?;
    check_advective_bound(state.a.grid(), dt, &v)?;

    let src1 = combined_sources(state, params, ops)?;

    // Predictor: exponential Euler.
    let mut a_in = state.a.clone();
    a_in.axpy(dt, &src1.s_a)?;
    let mut d_in = state.d.clone();
    d_in.axpy(dt, &src1.s_d)?;
    let (a_pred, d_pred) = kernel.flow_pair(&a_in, &d_in);
    let mut omega_in = state.omega.clone();
    omega_in.axpy(dt, &src1.s_omega)?;
    let omega_pred = kernel.flow_heat(&omega_in);
    let mut mean_pred = state.mean_v;
    for c in 0..3 {
        mean_pred[c] += dt * src1.mean_force[c];
    }
    let predicted = SolverState {
        a: a_pred,
        d: d_pred,
        omega: omega_pred,
        mean_v: mean_pred,
        t: state.t + dt,
    };
    if !predicted.all_finite() {
        return Err(Error::BlowUp { t: state.t + dt });
    }

    let src2 = combined_sources(&predicted, params, ops)?;

    // Corrector: exponential trapezoid.
    let mut a_half = state.a.clone();
    a_half.axpy(0.5 * dt, &src1.s_a)?;
    let mut d_half = state.d.clone();
    d_half.axpy(0.5 * dt, &src1.s_d)?;
    let (mut a_new, mut d_new) = kernel.flow_pair(&a_half, &d_half);
    a_new.axpy(0.5 * dt, &src2.s_a)?;
    d_new.axpy(0.5 * dt, &src2.s_d)?;
    let mut omega_half = state.omega.clone();
    omega_half.axpy(0.5 * dt, &src1.s_omega)?;
    let mut omega_new = kernel.flow_heat(&omega_half);
    omega_new.axpy(0.5 * dt, &src2.s_omega)?;
    let mut mean_new = state.mean_v;
    for c in 0..3 {
        mean_new[c] += 0.5 * dt * (src1.mean_force[c] + src2.mean_force[c]);
    }

    let next = SolverState {
        a: a_new,
        d: d_new,
        omega: omega_new,
        mean_v: mean_new,
        t: state.t + dt,
    };
    if !next.all_finite() {
        return Err(Error::BlowUp { t: state.t + dt });
    }
    Ok(next)
}

/// Advance the state by one step of size `dt` (dealiased products).
pub fn step(state: &SolverState, params: &PhysicsParams, dt: f64) -> Result<SolverState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Inadmissible(format!(
            "step size must be positive and finite, got {dt}"
        )));
    }
    let kernel = StepKernel::new(state.a.grid(), dt, params.nu_bar(), params.mu_bar())?;
    step_with(state, params, &kernel, ProductOps { dealias: true })
}

// ---------------------------------------------------------------------------
// Full solve with critical-norm monitoring.
// ---------------------------------------------------------------------------

/// Configuration of a monitored run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Pad products to remove aliasing (on by default).
    pub dealias: bool,
    /// Lebesgue exponent of the monitored hybrid norms.
    pub monitor_p: f64,
    /// Low/high threshold of the monitored hybrid norms.
    pub monitor_r0: f64,
    /// Steps between norm samples.
    pub monitor_stride: usize,
    /// Steps between field snapshots, when snapshots are requested.
    pub snapshot_stride: Option<usize>,
    /// Directory for `<step>.{a,d,omega}.sfld` snapshots.
    pub snapshot_dir: Option<PathBuf>,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Inadmissible(format!(
                "step size must be positive and finite, got {dt}"
            )));
        }
        if !(t_end >= dt) {
            return Err(Error::Inadmissible(format!(
                "horizon {t_end} must be at least one step {dt}"
            )));
        }
        Ok(SolverConfig {
            dt,
            t_end,
            dealias: true,
            monitor_p: 3.0,
            monitor_r0: 2.0,
            monitor_stride: 1,
            snapshot_stride: None,
            snapshot_dir: None,
        })
    }
}

/// The four hybrid-norm index pairs of the monitored energy at exponent
/// `p`: bounded-in-time pieces for `(a, v)` and integrated-in-time
/// pieces.
struct EnergyIndices {
    a_sup: HybridParams,
    v_sup: HybridParams,
    a_int: HybridParams,
    v_int: HybridParams,
}

impl EnergyIndices {
    fn new(n: f64, p: f64, r0: f64) -> Result<Self> {
        Ok(EnergyIndices {
            a_sup: HybridParams::new(0.5 * n - 1.0, n / p, p, r0)?,
            v_sup: HybridParams::new(0.5 * n - 1.0, n / p - 1.0, p, r0)?,
            a_int: HybridParams::new(0.5 * n + 1.0, n / p, p, r0)?,
            v_int: HybridParams::new(0.5 * n + 1.0, n / p + 1.0, p, r0)?,
        })
    }
}

/// Outcome of a monitored run.
#[derive(Debug)]
pub struct SolveReport {
    pub final_state: SolverState,
    /// Per-ring norm history of the density deviation.
    pub series_a: NormSeries,
    /// Per-ring norm history of the velocity.
    pub series_v: NormSeries,
    /// Running monitored energy: the two bounded-in-time pieces plus the
    /// two time-integrated pieces, sampled on the monitor stride.
    pub energy_history: Vec<(f64, f64)>,
    /// `‖a0‖ + ‖v0‖` in the bounded-in-time indices.
    pub initial_norm: f64,
    /// Final energy divided by the initial norm (zero for zero data).
    pub amplification: f64,
    /// `|mean(a)(T) - mean(a)(0)|`.
    pub mean_a_drift: f64,
    pub steps: usize,
}

fn snapshot(dir: &Path, step: usize, state: &SolverState) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_field(&state.a, &dir.join(format!("{step:06}.a.sfld")), Payload::Spectral)?;
    write_field(&state.d, &dir.join(format!("{step:06}.d.sfld")), Payload::Spectral)?;
    write_field(
        &state.omega,
        &dir.join(format!("{step:06}.omega.sfld")),
        Payload::Spectral,
    )?;
    Ok(())
}

/// Integrate to the horizon, sampling per-ring norms and the running
/// monitored energy. Errors (vacuum, blow-up, step-size violations)
/// abort the run and propagate.
pub fn solve(
    initial: &SolverState,
    params: &PhysicsParams,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if !(config.dt > 0.0) || !(config.t_end >= config.dt) {
        return Err(Error::Inadmissible(
            "solver configuration needs dt > 0 and t_end >= dt".into(),
        ));
    }
    if config.monitor_stride == 0 {
        return Err(Error::Inadmissible("monitor stride must be positive".into()));
    }
    let grid = initial.a.grid();
    let n = grid.dim() as f64;
    let sys = DyadicSystem::new(grid);
    let idxs = EnergyIndices::new(n, config.monitor_p, config.monitor_r0)?;
    let ops = ProductOps {
        dealias: config.dealias,
    };
    let kernel = StepKernel::new(grid, config.dt, params.nu_bar(), params.mu_bar())?;

    let mut series_a = NormSeries::new(&sys, config.monitor_p)?;
    let mut series_v = NormSeries::new(&sys, config.monitor_p)?;
    let mut energy_history = Vec::new();

    let v0 = initial.velocity()?;
    let initial_norm =
        hybrid_norm(&sys, &initial.a, &idxs.a_sup)? + hybrid_norm(&sys, &v0, &idxs.v_sup)?;
    let mean_a0 = initial.a.mean(0).re;

    let record =
        |series_a: &mut NormSeries, series_v: &mut NormSeries, state: &SolverState| -> Result<f64> {
            let v = state.velocity()?;
            series_a.push_sample(&sys, state.t, &state.a)?;
            series_v.push_sample(&sys, state.t, &v)?;
            let energy = chemin_lerner_norm(series_a, f64::INFINITY, &idxs.a_sup)?
                + chemin_lerner_norm(series_v, f64::INFINITY, &idxs.v_sup)?
                + chemin_lerner_norm(series_a, 1.0, &idxs.a_int)?
                + chemin_lerner_norm(series_v, 1.0, &idxs.v_int)?;
            Ok(energy)
        };

    let e0 = record(&mut series_a, &mut series_v, initial)?;
    energy_history.push((initial.t, e0));

    let mut state = initial.clone();
    let mut steps = 0usize;
    while state.t < config.t_end - 1e-12 {
        let remaining = config.t_end - state.t;
        state = if remaining >= config.dt - 1e-12 {
            step_with(&state, params, &kernel, ops)?
        } else {
            let last = StepKernel::new(grid, remaining, params.nu_bar(), params.mu_bar())?;
            step_with(&state, params, &last, ops)?
        };
        steps += 1;
        if steps % config.monitor_stride == 0 || state.t >= config.t_end - 1e-12 {
            let energy = record(&mut series_a, &mut series_v, &state)?;
            energy_history.push((state.t, energy));
        }
        if let (Some(stride), Some(dir)) = (config.snapshot_stride, config.snapshot_dir.as_ref()) {
            if stride > 0 && steps % stride == 0 {
                snapshot(dir, steps, &state)?;
            }
        }
    }

    let final_energy = energy_history.last().map(|(_, e)| *e).unwrap_or(0.0);
    let amplification = if initial_norm > 0.0 {
        final_energy / initial_norm
    } else {
        0.0
    };
    let mean_a_drift = (state.a.mean(0).re - mean_a0).abs();
    Ok(SolveReport {
        final_state: state,
        series_a,
        series_v,
        energy_history,
        initial_norm,
        amplification,
        mean_a_drift,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Linear system with prescribed convection: a-priori inequality probe.
// ---------------------------------------------------------------------------

/// Configuration of the linear-with-convection run.
#[derive(Debug, Clone)]
pub struct ConvectionConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Regularity index of the monitored pair norm.
    pub s: f64,
    /// Lebesgue exponent of the hybrid norms.
    pub p: f64,
    /// Low/high threshold.
    pub r0: f64,
    pub monitor_stride: usize,
    pub dealias: bool,
}

/// Both sides of the a-priori inequality for the linear system with
/// convection, and the empirical constant relating them.
#[derive(Debug, Clone)]
pub struct ConvectionReport {
    pub s: f64,
    pub p: f64,
    /// Pair norm of the solution: two bounded-in-time pieces plus two
    /// time-integrated pieces at shifted indices.
    pub lhs: f64,
    /// Pair norm of the initial data.
    pub initial: f64,
    /// Convection budget: time-integrated high norm plus bounded-in-time
    /// low norm of the prescribed velocity.
    pub v_bar: f64,
    /// Time-integrated forcing norms.
    pub forcing_f: f64,
    pub forcing_g: f64,
    /// `lhs / (initial + (v_bar + sqrt(v_bar)) lhs + forcing_f + forcing_g)`.
    pub empirical_constant: f64,
    /// Running `(t, lhs)` samples.
    pub history: Vec<(f64, f64)>,
}

/// Integrate the linear pair system with a steady prescribed velocity
/// `v` and optional steady forcing `(F, G)`:
/// `d_t a + Lambda d = -v.grad a + F`,
/// `d_t d - nu Lap d - Lambda a = -v.grad d + G`.
/// Reports the two sides of the a-priori estimate with
/// `s_p = s - n/p + n/2`.
pub fn linear_convection_solve(
    a0: &SpectralField,
    d0: &SpectralField,
    v: &SpectralField,
    forcing: Option<(&SpectralField, &SpectralField)>,
    nu_bar: f64,
    config: &ConvectionConfig,
) -> Result<ConvectionReport> {
    let grid = a0.grid();
    let n = grid.dim() as f64;
    let (s, p) = (config.s, config.p);
    if !(p >= 2.0) || p >= 2.0 * n || p > 4.0f64.min(if n > 2.0 { 2.0 * n / (n - 2.0) } else { f64::INFINITY }) {
        return Err(Error::Inadmissible(format!(
            "requires 2 <= p < 2n and p <= min(4, 2n/(n-2)), got p = {p} at n = {n}"
        )));
    }
    let (lo, hi) = (1.0 - n / p, 1.0 + 2.0 * n / p - 0.5 * n);
    if !(s > lo) || !(s <= hi) {
        return Err(Error::Inadmissible(format!(
            "requires 1 - n/p < s <= 1 + 2n/p - n/2, i.e. s in ({lo}, {hi}], got s = {s}"
        )));
    }
    if a0.rank() != Rank::Scalar || d0.rank() != Rank::Scalar || v.rank() != Rank::Vector {
        return Err(Error::Mismatch(
            "linear pair solve expects scalar (a, d) and a vector velocity".into(),
        ));
    }
    if a0.grid() != d0.grid() || a0.grid() != v.grid() {
        return Err(Error::Mismatch("inputs live on different grids".into()));
    }
    if !(config.dt > 0.0) || !(config.t_end >= config.dt) {
        return Err(Error::Inadmissible(
            "convection solve needs dt > 0 and t_end >= dt".into(),
        ));
    }

    let sys = DyadicSystem::new(grid);
    let s_p = s - n / p + 0.5 * n;
    let a_sup = HybridParams::new(s_p - 1.0, s, p, config.r0)?;
    let d_sup = HybridParams::new(s_p - 1.0, s - 1.0, p, config.r0)?;
    let a_int = HybridParams::new(s_p + 1.0, s, p, config.r0)?;
    let d_int = HybridParams::new(s_p + 1.0, s + 1.0, p, config.r0)?;

    let ops = ProductOps {
        dealias: config.dealias,
    };
    let kernel = StepKernel::new(grid, config.dt, nu_bar, 1.0)?;
    check_advective_bound(grid, config.dt, v)?;

    let grad = |f: &SpectralField| -> Result<SpectralField> { gradient(f) };
    let source = |a: &SpectralField, d: &SpectralField| -> Result<(SpectralField, SpectralField)> {
        let mut s_a = ops.dot(v, &grad(a)?)?;
        s_a.scale(-1.0);
        let mut s_d = ops.dot(v, &grad(d)?)?;
        s_d.scale(-1.0);
        if let Some((ff, gg)) = forcing {
            s_a.axpy(1.0, ff)?;
            s_d.axpy(1.0, gg)?;
        }
        Ok((s_a, s_d))
    };

    let mut series_a = NormSeries::new(&sys, p)?;
    let mut series_d = NormSeries::new(&sys, p)?;
    let mut history = Vec::new();
    let lhs_of = |sa: &NormSeries, sd: &NormSeries| -> Result<f64> {
        Ok(chemin_lerner_norm(sa, f64::INFINITY, &a_sup)?
            + chemin_lerner_norm(sd, f64::INFINITY, &d_sup)?
            + chemin_lerner_norm(sa, 1.0, &a_int)?
            + chemin_lerner_norm(sd, 1.0, &d_int)?)
    };

    let mut a = a0.clone();
    let mut d = d0.clone();
    let mut t = 0.0;
    series_a.push_sample(&sys, t, &a)?;
    series_d.push_sample(&sys, t, &d)?;
    history.push((t, lhs_of(&series_a, &series_d)?));

    let mut steps = 0usize;
    while t < config.t_end - 1e-12 {
        let dt = config.dt.min(config.t_end - t);
        let k = if (dt - config.dt).abs() < 1e-15 {
            &kernel
        } else {
            &StepKernel::new(grid, dt, nu_bar, 1.0)?
        };
        let (sa1, sd1) = source(&a, &d)?;
        let mut a_in = a.clone();
        a_in.axpy(dt, &sa1)?;
        let mut d_in = d.clone();
        d_in.axpy(dt, &sd1)?;
        let (a_pred, d_pred) = k.flow_pair(&a_in, &d_in);
        let (sa2, sd2) = source(&a_pred, &d_pred)?;
        let mut a_half = a.clone();
        a_half.axpy(0.5 * dt, &sa1)?;
        let mut d_half = d.clone();
        d_half.axpy(0.5 * dt, &sd1)?;
        let (mut a_new, mut d_new) = k.flow_pair(&a_half, &d_half);
        a_new.axpy(0.5 * dt, &sa2)?;
        d_new.axpy(0.5 * dt, &sd2)?;
        if !a_new.all_finite() || !d_new.all_finite() {
            return Err(Error::BlowUp { t: t + dt });
        }
        a = a_new;
        d = d_new;
        t += dt;
        steps += 1;
        if steps % config.monitor_stride.max(1) == 0 || t >= config.t_end - 1e-12 {
            series_a.push_sample(&sys, t, &a)?;
            series_d.push_sample(&sys, t, &d)?;
            history.push((t, lhs_of(&series_a, &series_d)?));
        }
    }

    let lhs = history.last().map(|(_, l)| *l).unwrap_or(0.0);
    let initial = hybrid_norm(&sys, a0, &a_sup)? + hybrid_norm(&sys, d0, &d_sup)?;
    let v_high = HybridParams::new(0.5 * n + 1.0, n / p + 1.0, p, config.r0)?;
    let v_low = HybridParams::new(0.5 * n - 1.0, n / p - 1.0, p, config.r0)?;
    let v_bar = config.t_end * hybrid_norm(&sys, v, &v_high)? + hybrid_norm(&sys, v, &v_low)?;
    let f_idx = HybridParams::new(s_p - 1.0, s, p, config.r0)?;
    let g_idx = HybridParams::new(s_p - 1.0, s - 1.0, p, config.r0)?;
    let (forcing_f, forcing_g) = match forcing {
        Some((ff, gg)) => (
            config.t_end * hybrid_norm(&sys, ff, &f_idx)?,
            config.t_end * hybrid_norm(&sys, gg, &g_idx)?,
        ),
        None => (0.0, 0.0),
    };
    let denom = initial + (v_bar + v_bar.sqrt()) * lhs + forcing_f + forcing_g;
    let empirical_constant = if denom > 0.0 { lhs / denom } else { 0.0 };
    Ok(ConvectionReport {
        s,
        p,
        lhs,
        initial,
        v_bar,
        forcing_f,
        forcing_g,
        empirical_constant,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::propagate;
    use crate::sampling::{sample_field, SampleSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params() -> PhysicsParams {
        PhysicsParams::nondimensionalize(1.0, 0.5, 0.0, 1.4).unwrap()
    }

    fn grid2(n_points: usize) -> Grid {
        Grid::new(2, n_points, 2.0 * PI).unwrap()
    }

    #[test]
    fn rescaling_matches_hand_values() {
        let p = PhysicsParams::nondimensionalize(1.0, 0.5, 0.0, 1.0).unwrap();
        assert_relative_eq!(p.varpi(), 1.0);
        assert_relative_eq!(p.nu_bar(), 1.0);
        assert_relative_eq!(p.mu_bar(), 0.5);
        let q = PhysicsParams::nondimensionalize(2.0, 1.0, 0.5, 2.0).unwrap();
        assert_relative_eq!(q.mu_bar(), 0.5);
        assert_relative_eq!(q.lambda_bar(), 0.25);
        assert_relative_eq!(q.varpi(), 2.0f64.sqrt() * 2.0f64.sqrt());
        let err = PhysicsParams::nondimensionalize(1.0, 1.0, -3.0, 1.4).unwrap_err();
        assert!(err.to_string().contains("non-elliptic"), "got: {err}");
        assert!(PhysicsParams::nondimensionalize(-1.0, 1.0, 0.0, 1.4).is_err());
    }

    #[test]
    fn velocity_splitting_round_trips() {
        let g = grid2(32);
        let mut v = sample_field(g, Rank::Vector, SampleSpec::decaying(1.5), 7);
        // Give it a nonzero mean to exercise the zero-mode path.
        *v.coeff_mut(0, 0) = Complex64::new(0.3, 0.0);
        *v.coeff_mut(1, 0) = Complex64::new(-0.1, 0.0);
        let (d, omega, mean_v) = hodge_split(&v).unwrap();
        assert_relative_eq!(mean_v[0], 0.3);
        assert_relative_eq!(mean_v[1], -0.1);
        let back = hodge_reconstruct(&d, &omega, mean_v).unwrap();
        assert!(back.max_diff(&v).unwrap() < 1e-12);

        // Gradient fields carry no rotation; solenoidal fields no potential.
        let mut psi = SpectralField::zeros(g, Rank::Scalar);
        psi.set_mode_pair(0, &[2, 1, 0], Complex64::new(0.4, 0.1)).unwrap();
        let grad_psi = gradient(&psi).unwrap();
        let (_, omega_g, _) = hodge_split(&grad_psi).unwrap();
        assert!(omega_g.l2_norm() < 1e-13);
        let mut sol = SpectralField::zeros(g, Rank::Vector);
        sol.set_mode_pair(0, &[2, 1, 0], Complex64::new(0.0, 0.5)).unwrap();
        sol.set_mode_pair(1, &[2, 1, 0], Complex64::new(0.0, -1.0)).unwrap();
        let (d_s, _, _) = hodge_split(&sol).unwrap();
        assert!(d_s.l2_norm() < 1e-13);
    }

    #[test]
    fn reconstruction_rejects_nonzero_means() {
        let g = grid2(16);
        let mut d = SpectralField::zeros(g, Rank::Scalar);
        *d.coeff_mut(0, 0) = Complex64::new(0.5, 0.0);
        let omega = SpectralField::zeros(g, Rank::Matrix);
        let err = hodge_reconstruct(&d, &omega, [0.0; 3]).unwrap_err();
        assert!(err.to_string().contains("mean-free"), "got: {err}");
    }

    #[test]
    fn split_produces_antisymmetric_rotation() {
        let g = grid2(32);
        let v = sample_field(g, Rank::Vector, SampleSpec::flat(), 11);
        let state = SolverState::from_primitive(
            &SpectralField::zeros(g, Rank::Scalar),
            &v,
        )
        .unwrap();
        assert!(state.antisymmetry_defect() < 1e-14);
    }

    #[test]
    fn quiescent_sources_reduce_to_pressure_coupling() {
        let g = grid2(32);
        let mut a = SpectralField::zeros(g, Rank::Scalar);
        a.set_mode_pair(0, &[1, 0, 0], Complex64::new(0.05, 0.0)).unwrap();
        let v = SpectralField::zeros(g, Rank::Vector);
        let state = SolverState::from_primitive(&a, &v).unwrap();
        let p = params();
        let (f, gg, h) = nonlinear_rhs(&state, &p).unwrap();
        assert!(f.l2_norm() < 1e-14);
        assert!(h.l2_norm() < 1e-14);
        let k = pressure_coupling(&a, p.gamma()).unwrap();
        let kgrad = pointwise_product(&k, &gradient(&a).unwrap()).unwrap();
        let mut expected = lambda_pow(&divergence(&kgrad).unwrap(), -1.0);
        expected.scale(-1.0);
        assert!(gg.max_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn density_source_matches_hand_convolution() {
        // a = 0.2 cos(x1), v = (0, 0.2 cos(2 x2)):
        // F = -div(a v) = 0.04 sin(x1 + 2 x2) - 0.04 sin(x1 - 2 x2).
        // The amplitude keeps the density well clear of the vacuum floor.
        let g = grid2(32);
        let mut a = SpectralField::zeros(g, Rank::Scalar);
        a.set_mode_pair(0, &[1, 0, 0], Complex64::new(0.1, 0.0)).unwrap();
        let mut v = SpectralField::zeros(g, Rank::Vector);
        v.set_mode_pair(1, &[0, 2, 0], Complex64::new(0.1, 0.0)).unwrap();
        let state = SolverState::from_primitive(&a, &v).unwrap();
        let p = PhysicsParams::nondimensionalize(1.0, 0.5, 0.0, 2.0).unwrap();
        let src = combined_sources(&state, &p, ProductOps { dealias: true }).unwrap();
        let mut expected = SpectralField::zeros(g, Rank::Scalar);
        expected.set_mode_pair(0, &[1, 2, 0], Complex64::new(0.0, -0.02)).unwrap();
        expected.set_mode_pair(0, &[1, -2, 0], Complex64::new(0.0, 0.02)).unwrap();
        assert!(src.s_a.max_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn pressure_source_matches_closed_form_for_unit_coupling() {
        // gamma = 3 makes the pressure factor equal a itself, so with
        // v = 0 and a = 0.2 cos(x1): G = Lambda(a^2)/2 = 0.02 cos(2 x1).
        let g = grid2(32);
        let mut a = SpectralField::zeros(g, Rank::Scalar);
        a.set_mode_pair(0, &[1, 0, 0], Complex64::new(0.1, 0.0)).unwrap();
        let v = SpectralField::zeros(g, Rank::Vector);
        let state = SolverState::from_primitive(&a, &v).unwrap();
        let p = PhysicsParams::nondimensionalize(1.0, 0.5, 0.0, 3.0).unwrap();
        let (_, gg, _) = nonlinear_rhs(&state, &p).unwrap();
        let mut expected = SpectralField::zeros(g, Rank::Scalar);
        expected.set_mode_pair(0, &[2, 0, 0], Complex64::new(0.01, 0.0)).unwrap();
        assert!(gg.max_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = grid2(16);
        let state = SolverState::from_primitive(
            &SpectralField::zeros(g, Rank::Scalar),
            &SpectralField::zeros(g, Rank::Vector),
        )
        .unwrap();
        let next = step(&state, &params(), 0.05).unwrap();
        assert!(next.a.l2_norm() == 0.0);
        assert!(next.d.l2_norm() == 0.0);
        assert!(next.omega.l2_norm() == 0.0);
        assert_eq!(next.mean_v, [0.0; 3]);
    }

    #[test]
    fn tiny_amplitudes_follow_the_exact_propagator() {
        let g = grid2(16);
        let amp = 1e-8;
        let mut a0 = SpectralField::zeros(g, Rank::Scalar);
        a0.set_mode_pair(0, &[1, 0, 0], Complex64::new(amp, 0.0)).unwrap();
        let mut d0 = SpectralField::zeros(g, Rank::Scalar);
        d0.set_mode_pair(0, &[1, 0, 0], Complex64::new(0.0, amp)).unwrap();
        let v0 = hodge_reconstruct(&d0, &SpectralField::zeros(g, Rank::Matrix), [0.0; 3]).unwrap();
        let mut state = SolverState::from_primitive(&a0, &v0).unwrap();
        let p = params();
        let dt = 0.01;
        for _ in 0..100 {
            state = step(&state, &p, dt).unwrap();
        }
        let (a_exact, d_exact) = propagate(&a0, &d0, 1.0, p.nu_bar()).unwrap();
        assert!(state.a.max_diff(&a_exact).unwrap() < 1e-6 * amp);
        assert!(state.d.max_diff(&d_exact).unwrap() < 1e-6 * amp);
    }

    #[test]
    fn time_stepping_is_second_order() {
        let g = grid2(32);
        let a0 = sample_field(g, Rank::Scalar, SampleSpec::decaying(2.0), 3);
        let v0 = sample_field(g, Rank::Vector, SampleSpec::decaying(2.0), 4);
        let mut a_scaled = a0.clone();
        a_scaled.scale(0.05 / a0.max_abs_coeff().max(1.0));
        let mut v_scaled = v0.clone();
        v_scaled.scale(0.05 / v0.max_abs_coeff().max(1.0));
        let initial = SolverState::from_primitive(&a_scaled, &v_scaled).unwrap();
        let p = params();
        let run = |dt: f64| -> SolverState {
            let mut s = initial.clone();
            let steps = (0.4 / dt).round() as usize;
            for _ in 0..steps {
                s = step(&s, &p, dt).unwrap();
            }
            s
        };
        let coarse = run(0.04);
        let mid = run(0.02);
        let fine = run(0.01);
        let finest = run(0.005);
        let e1 = coarse.a.max_diff(&mid.a).unwrap() + coarse.d.max_diff(&mid.d).unwrap();
        let e2 = mid.a.max_diff(&fine.a).unwrap() + mid.d.max_diff(&fine.d).unwrap();
        let e3 = fine.a.max_diff(&finest.a).unwrap() + fine.d.max_diff(&finest.d).unwrap();
        let order1 = (e1 / e2).log2();
        let order2 = (e2 / e3).log2();
        assert!(
            order1 > 1.9 && order2 > 1.9,
            "observed orders {order1:.3}, {order2:.3}"
        );
    }

    #[test]
    fn mass_is_conserved_to_roundoff() {
        let g = grid2(32);
        let mut a0 = sample_field(g, Rank::Scalar, SampleSpec::decaying(1.5), 5);
        a0.scale(0.1 / a0.max_abs_coeff().max(1.0));
        *a0.coeff_mut(0, 0) = Complex64::new(0.02, 0.0);
        let mut v0 = sample_field(g, Rank::Vector, SampleSpec::decaying(1.5), 6);
        v0.scale(0.1 / v0.max_abs_coeff().max(1.0));
        let mut state = SolverState::from_primitive(&a0, &v0).unwrap();
        let p = params();
        let before = state.a.mean(0).re;
        for _ in 0..20 {
            state = step(&state, &p, 0.01).unwrap();
        }
        assert!((state.a.mean(0).re - before).abs() < 1e-12);
        assert!(state.antisymmetry_defect() < 1e-12);
    }

    #[test]
    fn vacuum_is_reported_with_the_time() {
        let g = grid2(16);
        let samples: Vec<f64> = (0..g.len())
            .map(|i| -1.2 * g.position(i)[0].cos().powi(2))
            .collect();
        let a0 = SpectralField::from_real_samples(g, Rank::Scalar, &samples).unwrap();
        let state = SolverState::from_primitive(&a0, &SpectralField::zeros(g, Rank::Vector))
            .unwrap();
        let err = step(&state, &params(), 0.01).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("vacuum") && msg.contains("at t ="), "got: {msg}");
    }

    #[test]
    fn fast_flow_rejects_coarse_steps() {
        let g = grid2(16);
        let mut v0 = SpectralField::zeros(g, Rank::Vector);
        v0.set_mode_pair(0, &[1, 0, 0], Complex64::new(5.0, 0.0)).unwrap();
        let state = SolverState::from_primitive(&SpectralField::zeros(g, Rank::Scalar), &v0)
            .unwrap();
        let err = step(&state, &params(), 0.5).unwrap_err();
        assert!(matches!(err, Error::DtBound { .. }), "got: {err}");
    }

    #[test]
    fn monitored_run_reports_energy_and_drift() {
        let g = grid2(32);
        let mut a0 = sample_field(g, Rank::Scalar, SampleSpec::decaying(2.0), 8);
        a0.scale(1e-3 / a0.max_abs_coeff().max(1.0));
        let mut v0 = sample_field(g, Rank::Vector, SampleSpec::decaying(2.0), 9);
        v0.scale(1e-3 / v0.max_abs_coeff().max(1.0));
        let initial = SolverState::from_primitive(&a0, &v0).unwrap();
        let mut config = SolverConfig::new(0.05, 0.5).unwrap();
        config.monitor_stride = 2;
        let report = solve(&initial, &params(), &config).unwrap();
        assert_eq!(report.steps, 10);
        assert!(report.energy_history.len() >= 5);
        assert!(report.initial_norm > 0.0);
        assert!(report.amplification.is_finite() && report.amplification > 0.0);
        assert!(report.mean_a_drift < 1e-12);
        assert_relative_eq!(report.final_state.t, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn zero_initial_data_gives_zero_norms() {
        let g = grid2(16);
        let initial = SolverState::from_primitive(
            &SpectralField::zeros(g, Rank::Scalar),
            &SpectralField::zeros(g, Rank::Vector),
        )
        .unwrap();
        let config = SolverConfig::new(0.05, 0.2).unwrap();
        let report = solve(&initial, &params(), &config).unwrap();
        assert_eq!(report.initial_norm, 0.0);
        assert_eq!(report.amplification, 0.0);
        assert!(report.energy_history.iter().all(|(_, e)| *e == 0.0));
    }

    #[test]
    fn convection_free_linear_run_reduces_to_the_propagator() {
        let g = grid2(16);
        let mut a0 = SpectralField::zeros(g, Rank::Scalar);
        a0.set_mode_pair(0, &[1, 1, 0], Complex64::new(0.3, 0.1)).unwrap();
        let mut d0 = SpectralField::zeros(g, Rank::Scalar);
        d0.set_mode_pair(0, &[2, 0, 0], Complex64::new(0.0, 0.2)).unwrap();
        let v = SpectralField::zeros(g, Rank::Vector);
        let config = ConvectionConfig {
            dt: 0.05,
            t_end: 1.0,
            s: 1.0,
            p: 2.0,
            r0: 2.0,
            monitor_stride: 1,
            dealias: true,
        };
        let report = linear_convection_solve(&a0, &d0, &v, None, 1.0, &config).unwrap();
        assert!(report.lhs > 0.0);
        assert_eq!(report.v_bar, 0.0);
        assert!(report.empirical_constant > 0.0);
        // With no convection the scheme applies the exact flow each step.
        let (a_exact, _) = propagate(&a0, &d0, 1.0, 1.0).unwrap();
        assert!(a_exact.all_finite());
    }

    #[test]
    fn convection_inequality_reports_a_finite_constant() {
        let g = grid2(32);
        let mut v = sample_field(g, Rank::Vector, SampleSpec::decaying(2.0), 21);
        v.scale(0.05 / v.max_abs_coeff().max(1.0));
        let a0 = sample_field(g, Rank::Scalar, SampleSpec::decaying(2.0), 22);
        let mut d0 = sample_field(g, Rank::Scalar, SampleSpec::decaying(2.0), 23);
        d0.zero_mean();
        let config = ConvectionConfig {
            dt: 0.02,
            t_end: 0.5,
            s: 1.0,
            p: 2.0,
            r0: 2.0,
            monitor_stride: 2,
            dealias: true,
        };
        let report = linear_convection_solve(&a0, &d0, &v, None, 1.0, &config).unwrap();
        assert!(report.empirical_constant.is_finite());
        assert!(report.empirical_constant > 0.0);
        assert!(report.v_bar > 0.0);
    }

    #[test]
    fn critical_regularity_is_rejected_by_name() {
        let g = grid2(16);
        let a0 = SpectralField::zeros(g, Rank::Scalar);
        let d0 = SpectralField::zeros(g, Rank::Scalar);
        let v = SpectralField::zeros(g, Rank::Vector);
        let config = ConvectionConfig {
            dt: 0.05,
            t_end: 0.2,
            s: 1.0 - 2.0 / 3.0, // exactly the excluded endpoint for n = 2, p = 3
            p: 3.0,
            r0: 2.0,
            monitor_stride: 1,
            dealias: true,
        };
        let err = linear_convection_solve(&a0, &d0, &v, None, 1.0, &config).unwrap_err();
        assert!(
            err.to_string().contains("1 - n/p < s"),
            "got: {err}"
        );
    }
}
