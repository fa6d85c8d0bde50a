//! Small-data boundedness sweep at `eps = 1`: for a ladder of data
//! amplitudes, integrate the compressible system, measure the solution-space
//! norm against the initial quantity, and report the empirical stability
//! constant. A deliberately oversized amplitude exercises the positivity
//! guard and is recorded as a data point, not a failure.

use anyhow::{Context, Result};
use critlab_core::besov::{besov_norm, hybrid_norm, solution_norm, BesovIndex};
use critlab_core::lp::DyadicPartition;
use critlab_core::model::{constant_director, default_d_hat, renormalize_director, FlowState};
use critlab_core::stepper::{integrate, ModelKind, StepOptions};
use critlab_core::{synth, Grid, ModelParams};

use crate::parallel::parallel_map;
use crate::report::{RatioRow, SweepReport, SweepRow};

#[derive(Debug, Clone)]
pub struct SmallnessConfig {
    pub grid: Grid,
    /// constants with `eps = 1` (the unscaled system)
    pub params: ModelParams,
    /// decreasing amplitude ladder
    pub eta_list: Vec<f64>,
    pub seed: u64,
    pub t_final: f64,
    pub dt: f64,
    pub snapshot_every: usize,
    /// amplitude expected to trip the density positivity guard
    pub oversized_eta: Option<f64>,
    /// also compute the `eta -> 0` reference with the nonlinearity disabled
    pub include_linear_reference: bool,
}

pub struct EtaOutcome {
    pub eta: f64,
    pub ratio: f64,
    pub initial_quantity: f64,
    pub aborted: Option<String>,
}

fn build_state(cfg: &SmallnessConfig, eta: f64) -> Result<FlowState> {
    let grid = cfg.grid;
    let dim = grid.dim();
    let k0 = 3.0;
    let b0 = synth::random_smooth(grid, 1, cfg.seed, k0).scaled(eta);
    let u0 = synth::random_smooth(grid, dim, cfg.seed + 1, k0).scaled(eta);
    // director perturbations capped so data construction stays well posed
    // even for the guard-tripping amplitude
    let d_amp = eta.min(0.3);
    let mut d0 = constant_director(grid, &default_d_hat(dim));
    d0.axpy(d_amp, &synth::random_smooth(grid, dim, cfg.seed + 2, k0))?;
    let d0 = renormalize_director(&d0)?;
    FlowState::new(b0, u0, d0, 0.0).map_err(Into::into)
}

pub fn run_eta(cfg: &SmallnessConfig, eta: f64, nonlinear: bool) -> Result<EtaOutcome> {
    let grid = cfg.grid;
    let dim = grid.dim() as f64;
    let part = DyadicPartition::new(grid)?;
    let s = dim / 2.0;
    let nu = cfg.params.nu();
    let state = build_state(cfg, eta)?;
    let d_hat = default_d_hat(grid.dim());

    let initial_quantity = hybrid_norm(&part, &state.b, s, f64::INFINITY, nu)?
        + besov_norm(&part, &state.u, BesovIndex::new(s - 1.0, 2.0, 1.0)?)?
        + besov_norm(&part, &state.d_perturbation(&d_hat), BesovIndex::new(s, 2.0, 1.0)?)?;
    if initial_quantity == 0.0 {
        return Ok(EtaOutcome { eta, ratio: 0.0, initial_quantity, aborted: None });
    }

    let opts = StepOptions {
        kind: ModelKind::Compressible,
        nonlinear,
        renormalize_director: true,
    };
    let traj = integrate(state, &cfg.params, &opts, cfg.t_final, cfg.dt, cfg.snapshot_every)
        .with_context(|| format!("smallness run at eta = {eta}"))?;
    if let Some(event) = &traj.aborted {
        return Ok(EtaOutcome {
            eta,
            ratio: f64::NAN,
            initial_quantity,
            aborted: Some(format!("t = {}: {}", event.time, event.error)),
        });
    }
    let b_traj = traj.b_trajectory()?;
    let u_traj = traj.u_trajectory()?;
    let g_traj = traj.d_perturbation_trajectory(&d_hat)?;
    let total = solution_norm(
        &part,
        &b_traj,
        &u_traj,
        &g_traj,
        s,
        nu,
        cfg.params.nu_lower(),
        cfg.params.theta,
    )?;
    Ok(EtaOutcome { eta, ratio: total / initial_quantity, initial_quantity, aborted: None })
}

pub fn smallness_sweep(cfg: &SmallnessConfig, config_echo: String) -> Result<SweepReport> {
    anyhow::ensure!(
        cfg.eta_list.windows(2).all(|w| w[1] < w[0]),
        "eta ladder must decrease strictly"
    );
    anyhow::ensure!((cfg.params.eps - 1.0).abs() < 1e-12, "smallness sweep runs at eps = 1");
    let mut report = SweepReport::new("smallness-sweep", config_echo, cfg.seed);

    let outcomes = parallel_map(cfg.eta_list.clone(), |_, eta| run_eta(cfg, eta, true));
    let mut ratios = Vec::new();
    for outcome in outcomes {
        let o = outcome?;
        if let Some(event) = &o.aborted {
            report.notes.push(format!(
                "eta = {}: blow-up recorded as a data point ({event})",
                o.eta
            ));
            continue;
        }
        report.rows.push(SweepRow {
            eps: o.eta,
            quantity: "gamma_ratio".into(),
            norm_spec: "solution_norm / initial_quantity".into(),
            value: o.ratio,
        });
        report.rows.push(SweepRow {
            eps: o.eta,
            quantity: "initial_quantity".into(),
            norm_spec: "hybrid+besov data norm".into(),
            value: o.initial_quantity,
        });
        ratios.push(o.ratio);
    }
    if !ratios.is_empty() {
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        report.ratios.push(RatioRow {
            name: "empirical_gamma".into(),
            max_ratio: max,
            min_ratio: min,
            samples: ratios.len(),
            per_grid: vec![max],
            hypothesis_met: true,
        });
    }

    if cfg.include_linear_reference {
        let eta = *cfg.eta_list.last().expect("nonempty ladder");
        let linear = run_eta(cfg, eta, false)?;
        report.rows.push(SweepRow {
            eps: eta,
            quantity: "gamma_ratio_linear".into(),
            norm_spec: "solution_norm / initial_quantity (nonlinearity off)".into(),
            value: linear.ratio,
        });
    }

    if let Some(eta) = cfg.oversized_eta {
        let outcome = run_eta(cfg, eta, true)?;
        match outcome.aborted {
            Some(event) => report.notes.push(format!(
                "oversized eta = {eta}: positivity guard tripped cleanly ({event})"
            )),
            None => report.notes.push(format!(
                "oversized eta = {eta}: no guard trip (ratio {})",
                outcome.ratio
            )),
        }
    }
    Ok(report)
}
