//! Integrating-factor Heun time stepping with an exact constant-coefficient
//! propagator.
//!
//! One step advances the transformed variable `V = exp(-tL) Y` with Heun's
//! method, which unwinds to
//!
//! ```text
//!   Y_{n+1} = P(Y_n + dt/2 N(Y_n)) + dt/2 N(P(Y_n + dt N(Y_n)))
//! ```
//!
//! where `P = exp(dt L)` is exact per mode. Linear-only runs therefore
//! reproduce the semigroup to rounding, and the stiff `1/eps` oscillation
//! never restricts the step size.

use crate::acoustic::acoustic_block;
use crate::besov::Trajectory;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::model::{
    rhs_compressible, rhs_incompressible, renormalize_director, FlowState, ModelParams,
};
use crate::C64;

/// Which system the explicit stage assembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Compressible,
    Incompressible,
}

/// Per-step options.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub kind: ModelKind,
    /// disable to propagate the linearized system exactly
    pub nonlinear: bool,
    /// pointwise unit-sphere projection of the director after each step
    pub renormalize_director: bool,
}

impl StepOptions {
    pub fn new(kind: ModelKind) -> Self {
        StepOptions { kind, nonlinear: true, renormalize_director: true }
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn without_renormalization(mut self) -> Self {
        self.renormalize_director = false;
        self
    }
}

/// Exact propagator of the constant-coefficient part over one `dt`:
/// a 2x2 acoustic-viscous block per mode for `(b, Lambda^{-1} div Q u)`,
/// heat factors for the solenoidal velocity part and the director.
pub struct LinearPropagator {
    grid: Grid,
    kind: ModelKind,
    dt: f64,
    acoustic: Vec<[f64; 4]>,
    heat_u: Vec<f64>,
    heat_d: Vec<f64>,
}

/// Build the propagator for a time step `dt > 0`.
pub fn build_propagator(
    grid: Grid,
    params: &ModelParams,
    dt: f64,
    kind: ModelKind,
) -> Result<LinearPropagator> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let len = grid.len();
    let nu = params.nu();
    let mut acoustic = Vec::with_capacity(len);
    let mut heat_u = Vec::with_capacity(len);
    let mut heat_d = Vec::with_capacity(len);
    for idx in 0..len {
        let k2 = grid.k2(idx);
        let k = k2.sqrt();
        acoustic.push(if kind == ModelKind::Compressible {
            acoustic_block(k, params.eps, nu, dt)
        } else {
            [1.0, 0.0, 0.0, 1.0]
        });
        heat_u.push((-params.mu * k2 * dt).exp());
        heat_d.push((-params.theta * k2 * dt).exp());
    }
    Ok(LinearPropagator { grid, kind, dt, acoustic, heat_u, heat_d })
}

impl LinearPropagator {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Advance the constant-coefficient part by one `dt`.
    pub fn apply(&self, state: &FlowState) -> Result<FlowState> {
        if state.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let dim = self.grid.dim();
        let len = self.grid.len();
        let mut b = state.b.clone();
        let mut u = state.u.clone();
        let mut d = state.d.clone();

        for idx in 0..len {
            let hd = self.heat_d[idx];
            for c in 0..dim {
                *d.coeff_mut(c, idx) *= hd;
            }
        }

        match self.kind {
            ModelKind::Incompressible => {
                for idx in 0..len {
                    let hu = self.heat_u[idx];
                    for c in 0..dim {
                        *u.coeff_mut(c, idx) *= hu;
                    }
                }
            }
            ModelKind::Compressible => {
                for idx in 1..len {
                    let xi = self.grid.wavevector(idx);
                    let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let k = k2.sqrt();
                    let mut dot = C64::new(0.0, 0.0);
                    for a in 0..dim {
                        dot += xi[a] * u.coeff(a, idx);
                    }
                    // l = Lambda^{-1} div u; Q u = -i xi l / k
                    let l = C64::new(0.0, 1.0) * dot / k;
                    let m = self.acoustic[idx];
                    let b_old = b.coeff(0, idx);
                    let b_new = m[0] * b_old + m[1] * l;
                    let l_new = m[2] * b_old + m[3] * l;
                    *b.coeff_mut(0, idx) = b_new;
                    let hu = self.heat_u[idx];
                    for a in 0..dim {
                        let q_a = xi[a] * (dot / k2);
                        let p_a = u.coeff(a, idx) - q_a;
                        let q_new = -C64::new(0.0, 1.0) * xi[a] * l_new / k;
                        *u.coeff_mut(a, idx) = hu * p_a + q_new;
                    }
                }
            }
        }
        FlowState::new(b, u, d, state.t + self.dt)
    }

    /// Largest linear amplification over all modes: the spectral norm of the
    /// acoustic block combined with the heat factors. At most 1 for every
    /// `dt`, `eps` by dissipativity of the generator.
    pub fn max_amplification(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.grid.len() {
            worst = worst.max(spectral_norm_2x2(&self.acoustic[idx]));
            worst = worst.max(self.heat_u[idx]);
            worst = worst.max(self.heat_d[idx]);
        }
        worst
    }
}

fn spectral_norm_2x2(m: &[f64; 4]) -> f64 {
    // singular values of [[a,b],[c,d]]
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let q = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let s = ((q + 2.0 * det.abs()).max(0.0)).sqrt();
    let t = ((q - 2.0 * det.abs()).max(0.0)).sqrt();
    0.5 * (s + t)
}

#[derive(Debug, Clone)]
struct Tendency {
    db: Option<SpectralField>,
    du: SpectralField,
    dd: SpectralField,
}

fn tendency(state: &FlowState, params: &ModelParams, kind: ModelKind) -> Result<Tendency> {
    match kind {
        ModelKind::Compressible => {
            let t = rhs_compressible(state, params)?;
            Ok(Tendency { db: Some(t.db), du: t.du, dd: t.dd })
        }
        ModelKind::Incompressible => {
            let t = rhs_incompressible(state, params)?;
            Ok(Tendency { db: None, du: t.du, dd: t.dd })
        }
    }
}

fn add_tendency(state: &FlowState, tend: &Tendency, factor: f64) -> Result<FlowState> {
    let mut out = state.clone();
    if let Some(db) = &tend.db {
        out.b.axpy(factor, db)?;
    }
    out.u.axpy(factor, &tend.du)?;
    out.d.axpy(factor, &tend.dd)?;
    Ok(out)
}

/// One integrating-factor Heun step.
pub fn step(
    state: &FlowState,
    propagator: &LinearPropagator,
    params: &ModelParams,
    opts: &StepOptions,
) -> Result<FlowState> {
    let dt = propagator.dt;
    let mut next = if opts.nonlinear {
        let k1 = tendency(state, params, opts.kind)?;
        let half = add_tendency(state, &k1, 0.5 * dt)?;
        let full = add_tendency(state, &k1, dt)?;
        let predictor = propagator.apply(&full)?;
        let k2 = tendency(&predictor, params, opts.kind)?;
        let mut out = propagator.apply(&half)?;
        out = add_tendency(&out, &k2, 0.5 * dt)?;
        out
    } else {
        propagator.apply(state)?
    };
    if opts.renormalize_director {
        next.d = renormalize_director(&next.d)?;
    }
    if !next.is_finite() {
        return Err(Error::NanDetected { time: next.t, context: "time step".into() });
    }
    Ok(next)
}

/// Guard trip encountered mid-run.
#[derive(Debug, Clone)]
pub struct GuardEvent {
    pub time: f64,
    pub error: Error,
}

/// Recorded run: snapshots plus an abort marker when a guard fired.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub aborted: Option<GuardEvent>,
}

impl FlowTrajectory {
    pub fn extract(&self, f: impl Fn(&FlowState) -> SpectralField) -> Result<Trajectory> {
        Trajectory::new(self.times.clone(), self.states.iter().map(f).collect())
    }

    pub fn b_trajectory(&self) -> Result<Trajectory> {
        self.extract(|s| s.b.clone())
    }

    pub fn u_trajectory(&self) -> Result<Trajectory> {
        self.extract(|s| s.u.clone())
    }

    pub fn d_perturbation_trajectory(&self, d_hat: &[f64]) -> Result<Trajectory> {
        self.extract(|s| s.d_perturbation(d_hat))
    }

    pub fn final_state(&self) -> &FlowState {
        self.states.last().expect("trajectory never empty")
    }
}

/// Integrate from `state0` to time `T` in steps of `dt`, recording every
/// `snapshot_every`-th step plus the final state. A guard violation stops
/// the run and is reported inside the returned trajectory; the snapshots up
/// to that point are kept.
pub fn integrate(
    state0: FlowState,
    params: &ModelParams,
    opts: &StepOptions,
    t_final: f64,
    dt: f64,
    snapshot_every: usize,
) -> Result<FlowTrajectory> {
    if !(t_final > 0.0) || !(dt > 0.0) || dt > t_final * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < dt <= T, got dt = {dt}, T = {t_final}"
        )));
    }
    if snapshot_every == 0 {
        return Err(Error::InvalidParameter("snapshot_every must be >= 1".into()));
    }
    params.validate()?;
    let n_steps = (t_final / dt).round().max(1.0) as usize;
    let propagator = build_propagator(*state0.grid(), params, dt, opts.kind)?;

    let mut times = vec![state0.t];
    let mut states = vec![state0.clone()];
    let mut current = state0;
    let t0 = current.t;
    for i in 1..=n_steps {
        match step(&current, &propagator, params, opts) {
            Ok(mut next) => {
                // pin time arithmetically to keep runs bit-reproducible
                next.t = t0 + i as f64 * dt;
                if i % snapshot_every == 0 || i == n_steps {
                    times.push(next.t);
                    states.push(next.clone());
                }
                current = next;
            }
            Err(e) => {
                let event = GuardEvent { time: current.t, error: e };
                return Ok(FlowTrajectory { times, states, aborted: Some(event) });
            }
        }
    }
    Ok(FlowTrajectory { times, states, aborted: None })
}
