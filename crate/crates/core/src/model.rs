//! Model parameters, flow state, and right-hand-side assembly for the
//! epsilon-scaled compressible nematic system and its incompressible limit.
//!
//! The stiff constant-coefficient part (acoustic coupling, viscosity,
//! director diffusion) is owned by the linear propagator in [`crate::stepper`];
//! the functions here return only the nonlinear tendencies, mirroring the
//! reformulation around the equilibrium `(0, 0, d_hat)`:
//!
//! ```text
//!   d/dt b = -div(u)/eps                    - div(b u)
//!   d/dt u = -grad(b)/eps + A u             - u.grad(u) - I(eps b) A u
//!                                           + k_eps(b) grad(b) + elastic(d, b)
//!   d/dt d = theta Lap(d)                   - u.grad(d) + theta |grad d|^2 d
//! ```
//!
//! with `A = mu Lap + (mu + lambda) grad div`, `I(z) = z/(1+z)` and
//! `k_eps(b) = K(eps b)/eps`, `K(z) = 1 - P'(1+z)/(1+z)`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::C64;

/// Barotropic pressure law, normalized so that `P'(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureLaw {
    /// `P(rho) = rho`
    Linear,
    /// `P(rho) = rho^gamma / gamma`, `gamma > 1`
    Gamma(f64),
}

impl PressureLaw {
    /// `K(z) = 1 - P'(1+z)/(1+z)`.
    pub fn k(&self, z: f64) -> f64 {
        match self {
            PressureLaw::Linear => z / (1.0 + z),
            PressureLaw::Gamma(g) => -((g - 2.0) * (1.0 + z).ln()).exp_m1(),
        }
    }

    /// `K(eps * b) / eps`, evaluated in a cancellation-safe form.
    pub fn k_eps(&self, b: f64, eps: f64) -> f64 {
        match self {
            PressureLaw::Linear => b / (1.0 + eps * b),
            PressureLaw::Gamma(g) => -((g - 2.0) * (eps * b).ln_1p()).exp_m1() / eps,
        }
    }

    /// `K'(0)`; nonzero unless `gamma = 2`.
    pub fn k_prime_zero(&self) -> f64 {
        match self {
            PressureLaw::Linear => 1.0,
            PressureLaw::Gamma(g) => 2.0 - g,
        }
    }
}

/// Physical constants of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: f64,
    pub lambda: f64,
    pub xi: f64,
    pub theta: f64,
    pub eps: f64,
    pub pressure: PressureLaw,
}

impl ModelParams {
    pub fn new(
        mu: f64,
        lambda: f64,
        xi: f64,
        theta: f64,
        eps: f64,
        pressure: PressureLaw,
    ) -> Result<Self> {
        let p = ModelParams { mu, lambda, xi, theta, eps, pressure };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.nu() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nu = lambda + 2 mu must be positive, got {}",
                self.nu()
            )));
        }
        if !(self.xi > 0.0) || !(self.theta > 0.0) {
            return Err(Error::InvalidParameter(
                "xi and theta must be positive".into(),
            ));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {}",
                self.eps
            )));
        }
        if let PressureLaw::Gamma(g) = self.pressure {
            if !(g > 1.0) {
                return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {g}")));
            }
        }
        Ok(())
    }

    /// `nu = lambda + 2 mu`, the full viscosity seen by the gradient part.
    pub fn nu(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    /// `min(mu, lambda + 2 mu)`.
    pub fn nu_lower(&self) -> f64 {
        self.mu.min(self.nu())
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// State triple of the flow: density perturbation `b` (scalar), velocity `u`
/// and full director `d` (both `dim`-component), at simulation time `t`.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub b: SpectralField,
    pub u: SpectralField,
    pub d: SpectralField,
    pub t: f64,
}

impl FlowState {
    pub fn new(b: SpectralField, u: SpectralField, d: SpectralField, t: f64) -> Result<Self> {
        let grid = *b.grid();
        if *u.grid() != grid || *d.grid() != grid {
            return Err(Error::GridMismatch);
        }
        let dim = grid.dim();
        if b.components() != 1 {
            return Err(Error::ComponentMismatch { expected: 1, got: b.components() });
        }
        if u.components() != dim {
            return Err(Error::ComponentMismatch { expected: dim, got: u.components() });
        }
        if d.components() != dim {
            return Err(Error::ComponentMismatch { expected: dim, got: d.components() });
        }
        Ok(FlowState { b, u, d, t })
    }

    pub fn grid(&self) -> &Grid {
        self.b.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.u.is_finite() && self.d.is_finite()
    }

    /// Largest pointwise violation of the unit-sphere constraint,
    /// `max_x | |d(x)|^2 - 1 |`.
    pub fn director_drift(&self) -> f64 {
        let len = self.grid().len();
        let phys = self.d.to_physical();
        let dim = self.grid().dim();
        let mut worst = 0.0f64;
        for idx in 0..len {
            let mag2: f64 = (0..dim).map(|c| phys[c * len + idx] * phys[c * len + idx]).sum();
            worst = worst.max((mag2 - 1.0).abs());
        }
        worst
    }

    /// Director perturbation `d - d_hat` (affects only the zero mode).
    pub fn d_perturbation(&self, d_hat: &[f64]) -> SpectralField {
        let mut g = self.d.clone();
        for (c, &component) in d_hat.iter().take(g.components()).enumerate() {
            *g.coeff_mut(c, 0) -= C64::new(component, 0.0);
        }
        g
    }
}

/// Equilibrium director along the last coordinate axis.
pub fn default_d_hat(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[dim - 1] = 1.0;
    v
}

/// Uniform director state `d = d_hat` as a spectral field.
pub fn constant_director(grid: Grid, d_hat: &[f64]) -> SpectralField {
    let mut d = SpectralField::zeros(grid, grid.dim());
    for (c, &component) in d_hat.iter().take(grid.dim()).enumerate() {
        *d.coeff_mut(c, 0) = C64::new(component, 0.0);
    }
    d
}

/// Nonlinear tendencies of the compressible system.
#[derive(Debug, Clone)]
pub struct CompressibleTendency {
    pub db: SpectralField,
    pub du: SpectralField,
    pub dd: SpectralField,
}

/// Nonlinear tendencies of the incompressible system.
#[derive(Debug, Clone)]
pub struct IncompressibleTendency {
    pub du: SpectralField,
    pub dd: SpectralField,
}

const DENSITY_FLOOR: f64 = 0.1;

/// Pointwise pressure coefficients `K(eps b)`, `I(eps b)` and
/// `k_eps(b) = K(eps b)/eps`, evaluated in physical space, transformed back
/// and dealiased. Fails the density positivity guard when
/// `1 + eps b < 0.1` anywhere.
pub fn pressure_coeffs(
    b: &SpectralField,
    params: &ModelParams,
    time: f64,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    if b.components() != 1 {
        return Err(Error::ComponentMismatch { expected: 1, got: b.components() });
    }
    let grid = *b.grid();
    let phys = b.to_physical();
    let (k, i, keps) = pressure_tables(&phys, params, time)?;
    Ok((
        SpectralField::from_physical(grid, 1, &k)?.dealiased(),
        SpectralField::from_physical(grid, 1, &i)?.dealiased(),
        SpectralField::from_physical(grid, 1, &keps)?.dealiased(),
    ))
}

fn pressure_tables(
    phys_b: &[f64],
    params: &ModelParams,
    time: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let eps = params.eps;
    let mut k = vec![0.0; phys_b.len()];
    let mut i = vec![0.0; phys_b.len()];
    let mut keps = vec![0.0; phys_b.len()];
    let mut min_density = f64::INFINITY;
    for (idx, &b) in phys_b.iter().enumerate() {
        let z = eps * b;
        let density = 1.0 + z;
        min_density = min_density.min(density);
        if density < DENSITY_FLOOR {
            return Err(Error::PositivityGuard { time, min_density: density });
        }
        k[idx] = params.pressure.k(z);
        i[idx] = z / density;
        keps[idx] = params.pressure.k_eps(b, eps);
    }
    Ok((k, i, keps))
}

/// Elliptic operator `A u = mu Lap u + (mu + lambda) grad div u` in
/// coefficients.
pub fn lame_operator(u: &SpectralField, params: &ModelParams) -> SpectralField {
    let grid = *u.grid();
    let dim = grid.dim();
    let len = grid.len();
    let mut out = SpectralField::zeros(grid, dim);
    let mul = params.mu + params.lambda;
    for idx in 0..len {
        let xi = grid.wavevector(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let mut dot = C64::new(0.0, 0.0);
        for a in 0..dim {
            dot += xi[a] * u.coeff(a, idx);
        }
        for a in 0..dim {
            *out.coeff_mut(a, idx) = -params.mu * k2 * u.coeff(a, idx) - mul * xi[a] * dot;
        }
    }
    out
}

/// Physical gradients of all components: `out[a][c]` holds `d u_c / d x_a`.
fn physical_gradients(f: &SpectralField) -> Vec<Vec<f64>> {
    let grid = *f.grid();
    let dim = grid.dim();
    let len = grid.len();
    let mut out = Vec::with_capacity(dim);
    for a in 0..dim {
        let d = f.derivative(a).to_physical();
        let mut per_comp = Vec::with_capacity(f.components());
        for c in 0..f.components() {
            per_comp.push(d[c * len..(c + 1) * len].to_vec());
        }
        out.push(per_comp);
    }
    // reshape to [axis][component] flattened vectors
    out.into_iter().map(|per_comp| per_comp.concat()).collect()
}

/// `div(grad d (.) grad d - trace_part * |grad d|^2/2 I)` in physical space,
/// from the physical gradient table `gd[a]` (component-major per axis).
fn elastic_divergence(
    grid: &Grid,
    gd: &[Vec<f64>],
    include_trace: bool,
) -> Result<Vec<Vec<f64>>> {
    let dim = grid.dim();
    let len = grid.len();
    // S_{a c} = sum_i (d_a d_i)(d_c d_i) - [include_trace] delta_{ac} |grad d|^2 / 2
    let mut grad_sq = vec![0.0; len];
    for ga in gd.iter() {
        for c in 0..dim {
            for idx in 0..len {
                let v = ga[c * len + idx];
                grad_sq[idx] += v * v;
            }
        }
    }
    let mut s_hat: Vec<Vec<SpectralField>> = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut entry = vec![0.0; len];
            for idx in 0..len {
                let mut acc = 0.0;
                for i in 0..dim {
                    acc += gd[a][i * len + idx] * gd[c][i * len + idx];
                }
                if include_trace && a == c {
                    acc -= 0.5 * grad_sq[idx];
                }
                entry[idx] = acc;
            }
            row.push(SpectralField::from_physical(*grid, 1, &entry)?.dealiased());
        }
        s_hat.push(row);
    }
    let mut div = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut acc = SpectralField::zeros(*grid, 1);
        for (a, row) in s_hat.iter().enumerate() {
            acc.axpy(1.0, &row[c].derivative(a))?;
        }
        div.push(acc.to_physical());
    }
    Ok(div)
}

/// Nonlinear tendencies of the epsilon-scaled compressible system. See the
/// module docs for the linear/nonlinear split.
pub fn rhs_compressible(state: &FlowState, params: &ModelParams) -> Result<CompressibleTendency> {
    let grid = *state.grid();
    let dim = grid.dim();
    let len = grid.len();

    let pb = state.b.to_physical();
    let pu = state.u.to_physical();
    let pd_grad = physical_gradients(&state.d);
    let pu_grad = physical_gradients(&state.u);
    let pb_grad = physical_gradients(&state.b);
    let pau = lame_operator(&state.u, params).to_physical();

    let (_, i_table, keps_table) = pressure_tables(&pb, params, state.t)?;

    // b-equation: -div(b u)
    let mut db = SpectralField::zeros(grid, 1);
    for a in 0..dim {
        let mut w = vec![0.0; len];
        for idx in 0..len {
            w[idx] = pb[idx] * pu[a * len + idx];
        }
        let w = SpectralField::from_physical(grid, 1, &w)?.dealiased();
        db.axpy(-1.0, &w.derivative(a))?;
    }

    // elastic forcing with the half-trace term, multiplied by -xi/(1 + eps b)
    let div_s = elastic_divergence(&grid, &pd_grad, true)?;

    let mut du_values = vec![0.0; dim * len];
    for c in 0..dim {
        for idx in 0..len {
            let mut advect = 0.0;
            for (a, ga) in pu_grad.iter().enumerate() {
                advect += pu[a * len + idx] * ga[c * len + idx];
            }
            let one_minus_i = 1.0 - i_table[idx];
            du_values[c * len + idx] = -advect - i_table[idx] * pau[c * len + idx]
                + keps_table[idx] * pb_grad[c][idx]
                - params.xi * one_minus_i * div_s[c][idx];
        }
    }

    // director: -u.grad(d) + theta |grad d|^2 d
    let pd = state.d.to_physical();
    let mut grad_sq = vec![0.0; len];
    for ga in pd_grad.iter() {
        for i in 0..dim {
            for idx in 0..len {
                let v = ga[i * len + idx];
                grad_sq[idx] += v * v;
            }
        }
    }
    let mut dd_values = vec![0.0; dim * len];
    for c in 0..dim {
        for idx in 0..len {
            let mut advect = 0.0;
            for (a, ga) in pd_grad.iter().enumerate() {
                advect += pu[a * len + idx] * ga[c * len + idx];
            }
            dd_values[c * len + idx] = -advect + params.theta * grad_sq[idx] * pd[c * len + idx];
        }
    }

    let du = SpectralField::from_physical(grid, dim, &du_values)?.dealiased();
    let dd = SpectralField::from_physical(grid, dim, &dd_values)?.dealiased();
    if !db.is_finite() || !du.is_finite() || !dd.is_finite() {
        return Err(Error::NanDetected { time: state.t, context: "compressible tendency".into() });
    }
    Ok(CompressibleTendency { db, du, dd })
}

/// Nonlinear tendencies of the incompressible limit system: the velocity
/// tendency is Leray-projected, the pressure is gone. Warns when the input
/// velocity has picked up divergence.
pub fn rhs_incompressible(
    state: &FlowState,
    params: &ModelParams,
) -> Result<IncompressibleTendency> {
    let grid = *state.grid();
    let dim = grid.dim();
    let len = grid.len();

    let div_u = state.u.divergence()?.l2_norm();
    if div_u > 1e-10 {
        log::warn!("incompressible velocity has ||div u||_L2 = {div_u:.3e}");
    }

    let pu = state.u.to_physical();
    let pd = state.d.to_physical();
    let pu_grad = physical_gradients(&state.u);
    let pd_grad = physical_gradients(&state.d);

    // grad d (.) grad d without the trace part; P kills pure gradients anyway
    let div_s = elastic_divergence(&grid, &pd_grad, false)?;

    let mut du_values = vec![0.0; dim * len];
    let mut grad_sq = vec![0.0; len];
    for ga in pd_grad.iter() {
        for i in 0..dim {
            for idx in 0..len {
                let v = ga[i * len + idx];
                grad_sq[idx] += v * v;
            }
        }
    }
    let mut dd_values = vec![0.0; dim * len];
    for c in 0..dim {
        for idx in 0..len {
            let mut advect_u = 0.0;
            let mut advect_d = 0.0;
            for (a, (gu, gd)) in pu_grad.iter().zip(&pd_grad).enumerate() {
                advect_u += pu[a * len + idx] * gu[c * len + idx];
                advect_d += pu[a * len + idx] * gd[c * len + idx];
            }
            du_values[c * len + idx] = -advect_u - params.xi * div_s[c][idx];
            dd_values[c * len + idx] =
                -advect_d + params.theta * grad_sq[idx] * pd[c * len + idx];
        }
    }
    let raw_du = SpectralField::from_physical(grid, dim, &du_values)?.dealiased();
    let (du, _) = raw_du.leray_decompose()?;
    let dd = SpectralField::from_physical(grid, dim, &dd_values)?.dealiased();
    if !du.is_finite() || !dd.is_finite() {
        return Err(Error::NanDetected { time: state.t, context: "incompressible tendency".into() });
    }
    Ok(IncompressibleTendency { du, dd })
}

/// Project the director back to the unit sphere pointwise, then dealias.
/// Fails when the magnitude dips below 0.5 anywhere.
pub fn renormalize_director(d: &SpectralField) -> Result<SpectralField> {
    let grid = *d.grid();
    let dim = grid.dim();
    if d.components() != dim {
        return Err(Error::ComponentMismatch { expected: dim, got: d.components() });
    }
    let len = grid.len();
    let mut phys = d.to_physical();
    for idx in 0..len {
        let mag2: f64 = (0..dim).map(|c| phys[c * len + idx] * phys[c * len + idx]).sum();
        let mag = mag2.sqrt();
        if mag < 0.5 {
            return Err(Error::DirectorDegenerate { magnitude: mag });
        }
        for c in 0..dim {
            phys[c * len + idx] /= mag;
        }
    }
    Ok(SpectralField::from_physical(grid, dim, &phys)?.dealiased())
}

/// Differences between a compressible state and its incompressible
/// reference at matched times.
#[derive(Debug, Clone)]
pub struct LimitDiagnostics {
    /// `P u_eps - u`
    pub w: SpectralField,
    /// `d_eps - d`
    pub dbar: SpectralField,
    /// `Q u_eps`
    pub qu: SpectralField,
    /// `b_eps` passthrough
    pub b: SpectralField,
}

pub fn compute_limit_diagnostics(
    comp: &FlowState,
    incomp: &FlowState,
    time_tol: f64,
) -> Result<LimitDiagnostics> {
    if comp.grid() != incomp.grid() {
        return Err(Error::GridMismatch);
    }
    let diff = (comp.t - incomp.t).abs();
    if diff > time_tol {
        return Err(Error::TimeMismatch { diff, tol: time_tol });
    }
    let (p, q) = comp.u.leray_decompose()?;
    let w = &p - &incomp.u;
    let dbar = &comp.d - &incomp.d;
    Ok(LimitDiagnostics { w, dbar, qu: q, b: comp.b.clone() })
}

/// Realize the zoom `(b, u, d)(t, x) -> (eps b, eps u, d)(t/eps^2, x/...)`
/// by reinterpreting the coefficients on a box of length `L/eps`. Requires
/// dyadic `eps = 2^-k`.
pub fn rescale_state(state: &FlowState, eps: f64) -> Result<FlowState> {
    let log = -eps.log2();
    if !(eps > 0.0 && eps <= 1.0) || (log - log.round()).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "rescaling needs dyadic eps = 2^-k, got {eps}"
        )));
    }
    let grid = *state.grid();
    let new_grid = Grid::new(
        grid.dim(),
        grid.points_per_axis(),
        grid.box_length() / eps,
        grid.dealias_fraction(),
    )?;
    let remap = |f: &SpectralField, amp: f64| -> Result<SpectralField> {
        let mut out =
            SpectralField::from_coeffs(new_grid, f.components(), f.coeffs().to_vec())?;
        out.scale(amp);
        Ok(out)
    };
    Ok(FlowState {
        b: remap(&state.b, eps)?,
        u: remap(&state.u, eps)?,
        d: remap(&state.d, 1.0)?,
        t: state.t / (eps * eps),
    })
}

/// Admissibility bookkeeping for the dispersive estimate of the acoustic
/// semigroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzExponents {
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub p_bar: f64,
    pub r_bar: f64,
}

impl StrichartzExponents {
    /// `gamma(q) = (N-1)(1/2 - 1/q)`.
    pub fn gamma(q: f64, dim: usize) -> f64 {
        (dim as f64 - 1.0) * (0.5 - 1.0 / q)
    }

    /// Whether `(p, r)` (and the dual pair) satisfy the admissibility
    /// conditions in dimension `dim`.
    pub fn admissible(&self, dim: usize) -> bool {
        let ok = |p: f64, r: f64| {
            p >= 2.0
                && 2.0 / r <= Self::gamma(p, dim).min(1.0) + 1e-12
                && !(r == 2.0 && p.is_infinite() && dim == 3)
        };
        ok(self.p, self.r) && ok(self.p_bar, self.r_bar)
    }

    /// Conjugate exponent `1/p + 1/p' = 1`.
    pub fn dual(p: f64) -> f64 {
        if p.is_infinite() {
            1.0
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            p / (p - 1.0)
        }
    }

    /// Regularity of the space the free evolution is measured in:
    /// `s + N(1/p - 1/2) + 1/r`.
    pub fn measured_regularity(&self, dim: usize) -> f64 {
        self.s + dim as f64 * (1.0 / self.p - 0.5) + 1.0 / self.r
    }
}

/// Convergence-rate exponent of the acoustic part in dimension `dim` for
/// integrability `p` (the headline rates of the limit theorem).
pub fn theorem_rate_exponent(dim: usize, p: f64) -> f64 {
    match dim {
        2 => 0.25 - 1.0 / (2.0 * p),
        3 => 0.5 - 1.0 / p,
        _ => 0.5,
    }
}

/// Smallest admissible `p` for the `r = 2` endpoint in dimension `dim >= 4`:
/// `p_N = 2(N-1)/(N-3)`.
pub fn p_critical(dim: usize) -> f64 {
    assert!(dim >= 4, "p_N is defined for dimension >= 4");
    2.0 * (dim as f64 - 1.0) / (dim as f64 - 3.0)
}
