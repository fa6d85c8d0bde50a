//! Incompressible-limit sweep: run the epsilon-scaled compressible system
//! over a decreasing epsilon ladder against one incompressible reference,
//! measure the convergence-theorem norm menu, and fit rates in epsilon.

use anyhow::{Context, Result};
use critlab_core::besov::{chemin_lerner, time_lp_of_besov, BesovIndex, Trajectory};
use critlab_core::lp::DyadicPartition;
use critlab_core::model::{
    compute_limit_diagnostics, constant_director, default_d_hat, renormalize_director, FlowState,
    ModelParams,
};
use critlab_core::stepper::{integrate, FlowTrajectory, ModelKind, StepOptions};
use critlab_core::{synth, Grid, SpectralField};

use crate::config::{DataFamily, MenuEntry, Quantity};
use crate::experiments::{menu_norms, NormSpec};
use crate::parallel::parallel_map;
use crate::ratefit::fit_rate;
use crate::report::{FitRow, SweepReport, SweepRow};

#[derive(Debug, Clone)]
pub struct LimitSweepConfig {
    pub grid: Grid,
    pub params: ModelParams,
    pub eps_list: Vec<f64>,
    pub family: DataFamily,
    pub amplitude: f64,
    pub seed: u64,
    pub t_final: f64,
    /// snapshots land on multiples of this interval in every run
    pub snapshot_dt: f64,
    /// per-point step cap `dt <= dt_eps_factor * eps`
    pub dt_eps_factor: f64,
    pub menu: Vec<MenuEntry>,
    /// |slope - target| beyond this flags (never fails) the fit
    pub rate_tolerance: f64,
    pub renormalize_director: bool,
}

/// Initial data shared by every sweep point.
pub struct SweepData {
    pub b0: SpectralField,
    pub u0: SpectralField,
    pub d0: SpectralField,
    pub u0_ref: SpectralField,
}

pub fn build_data(cfg: &LimitSweepConfig) -> Result<SweepData> {
    let grid = cfg.grid;
    let dim = grid.dim();
    let k0 = 3.0;
    let amp = cfg.amplitude;
    let u_raw = synth::random_smooth(grid, dim, cfg.seed, k0).scaled(amp);
    let (u_div_free, _) = u_raw.leray_decompose()?;
    let (b0, u0) = match cfg.family {
        DataFamily::WellPrepared => (SpectralField::zeros(grid, 1), u_div_free.clone()),
        DataFamily::IllPrepared => {
            let b0 = synth::random_smooth(grid, 1, cfg.seed + 1, k0).scaled(amp);
            (b0, u_raw)
        }
    };
    let d_hat = default_d_hat(dim);
    let mut d0 = constant_director(grid, &d_hat);
    d0.axpy(amp, &synth::random_smooth(grid, dim, cfg.seed + 2, k0))?;
    let d0 = renormalize_director(&d0)?;
    let (u0_ref, _) = u0.leray_decompose()?;
    Ok(SweepData { b0, u0, d0, u0_ref })
}

/// Choose the number of substeps per snapshot interval so that
/// `dt <= min(dt_eps_factor * eps, advective CFL)`.
fn substeps(cfg: &LimitSweepConfig, eps: f64, u_inf: f64) -> usize {
    let cfl = 0.5 * cfg.grid.dx() / (4.0 * u_inf).max(1e-9);
    let cap = (cfg.dt_eps_factor * eps).min(cfl).min(cfg.snapshot_dt);
    (cfg.snapshot_dt / cap).ceil() as usize
}

struct PointOutcome {
    eps: f64,
    values: Vec<(NormSpec, f64)>,
    dt: f64,
    aborted: Option<String>,
}

pub fn limit_sweep(cfg: &LimitSweepConfig, config_echo: String) -> Result<SweepReport> {
    anyhow::ensure!(!cfg.eps_list.is_empty(), "empty eps ladder");
    anyhow::ensure!(
        cfg.eps_list.windows(2).all(|w| w[1] < w[0]),
        "eps ladder must decrease strictly"
    );
    let grid = cfg.grid;
    let dim = grid.dim();
    let part = DyadicPartition::new(grid)?;
    let data = build_data(cfg)?;
    let d_hat = default_d_hat(dim);
    let u_inf = data.u0.lp_norm(f64::INFINITY)?;

    let mut report = SweepReport::new("limit-sweep", config_echo, cfg.seed);

    // one incompressible reference from (P u0, d0)
    let snapshots_per_run = (cfg.t_final / cfg.snapshot_dt).round() as usize;
    anyhow::ensure!(snapshots_per_run >= 2, "need at least two snapshot intervals");
    let ref_sub = substeps(cfg, 1.0, u_inf);
    let ref_dt = cfg.snapshot_dt / ref_sub as f64;
    let ref_opts = StepOptions {
        kind: ModelKind::Incompressible,
        nonlinear: true,
        renormalize_director: cfg.renormalize_director,
    };
    let ref_state =
        FlowState::new(SpectralField::zeros(grid, 1), data.u0_ref.clone(), data.d0.clone(), 0.0)?;
    let reference = integrate(ref_state, &cfg.params, &ref_opts, cfg.t_final, ref_dt, ref_sub)
        .context("incompressible reference run")?;
    anyhow::ensure!(reference.aborted.is_none(), "incompressible reference tripped a guard");
    report.notes.push(format!("reference run: dt = {ref_dt}, snapshots = {}", reference.times.len()));
    report.notes.push(format!(
        "reference boundedness ratio (global estimate proxy): {:.4}",
        reference_boundedness_ratio(&part, &reference, &d_hat)?
    ));

    // expand the menu once
    let specs: Vec<NormSpec> =
        cfg.menu.iter().flat_map(|entry| menu_norms(dim, *entry)).collect();

    let outcomes = parallel_map(cfg.eps_list.clone(), |_, eps| -> Result<PointOutcome> {
        let sub = substeps(cfg, eps, u_inf);
        let dt = cfg.snapshot_dt / sub as f64;
        let params = cfg.params.with_eps(eps);
        let opts = StepOptions {
            kind: ModelKind::Compressible,
            nonlinear: true,
            renormalize_director: cfg.renormalize_director,
        };
        let state = FlowState::new(data.b0.clone(), data.u0.clone(), data.d0.clone(), 0.0)?;
        let traj = integrate(state, &params, &opts, cfg.t_final, dt, sub)
            .with_context(|| format!("compressible run at eps = {eps}"))?;
        if let Some(event) = &traj.aborted {
            return Ok(PointOutcome {
                eps,
                values: Vec::new(),
                dt,
                aborted: Some(format!("t = {}: {}", event.time, event.error)),
            });
        }
        let values = evaluate_menu(&part, &traj, &reference, &specs, dt)?;
        Ok(PointOutcome { eps, values, dt, aborted: None })
    });

    let mut per_quantity: Vec<(NormSpec, Vec<(f64, f64)>)> =
        specs.iter().map(|s| (s.clone(), Vec::new())).collect();
    for outcome in outcomes {
        let outcome = outcome?;
        report.notes.push(format!("eps = {}: dt = {}", outcome.eps, outcome.dt));
        if let Some(event) = outcome.aborted {
            report.notes.push(format!(
                "eps = {}: guard violation recorded, point skipped ({event})",
                outcome.eps
            ));
            continue;
        }
        for (spec, value) in outcome.values {
            report.rows.push(SweepRow {
                eps: outcome.eps,
                quantity: spec.quantity.clone(),
                norm_spec: spec.label(),
                value,
            });
            if let Some(slot) =
                per_quantity.iter_mut().find(|(s, _)| s.quantity == spec.quantity)
            {
                slot.1.push((outcome.eps, value));
            }
        }
    }

    for (spec, points) in per_quantity {
        if points.len() < 3 || points.iter().any(|p| !(p.1 > 0.0)) {
            report
                .notes
                .push(format!("{}: too few valid points for a rate fit", spec.quantity));
            continue;
        }
        let fit = fit_rate(&points)?;
        let flagged = (fit.slope - spec.target_exponent).abs() > cfg.rate_tolerance;
        report.fits.push(FitRow {
            quantity: spec.quantity.clone(),
            norm_spec: spec.label(),
            target_exponent: Some(spec.target_exponent),
            fitted_slope: fit.slope,
            stderr: fit.stderr,
            residual: fit.residual,
            sample_count: fit.n,
            flagged,
            analytical_only: false,
        });
    }

    // dimensions without a solver still get their analytical targets
    if dim >= 4 {
        for entry in &cfg.menu {
            for spec in menu_norms(dim, *entry) {
                report.fits.push(FitRow {
                    quantity: spec.quantity.clone(),
                    norm_spec: spec.label(),
                    target_exponent: Some(spec.target_exponent),
                    fitted_slope: f64::NAN,
                    stderr: f64::NAN,
                    residual: f64::NAN,
                    sample_count: 0,
                    flagged: false,
                    analytical_only: true,
                });
            }
        }
    }
    Ok(report)
}

/// Evaluate every menu entry on one compressible run against the reference.
fn evaluate_menu(
    part: &DyadicPartition,
    comp: &FlowTrajectory,
    reference: &FlowTrajectory,
    specs: &[NormSpec],
    dt: f64,
) -> Result<Vec<(NormSpec, f64)>> {
    anyhow::ensure!(
        comp.times.len() == reference.times.len(),
        "snapshot grids diverged: {} vs {}",
        comp.times.len(),
        reference.times.len()
    );
    // pair snapshots through the limit diagnostics
    let mut b_fields = Vec::new();
    let mut qu_fields = Vec::new();
    let mut w_fields = Vec::new();
    let mut dbar_fields = Vec::new();
    for (cs, rs) in comp.states.iter().zip(&reference.states) {
        let diag = compute_limit_diagnostics(cs, rs, 0.5 * dt)
            .map_err(|e| anyhow::anyhow!("snapshot pairing failed: {e}"))?;
        b_fields.push(diag.b);
        qu_fields.push(diag.qu);
        w_fields.push(diag.w);
        dbar_fields.push(diag.dbar);
    }
    let times = comp.times.clone();
    let trajectories = [
        (Quantity::B, Trajectory::new(times.clone(), b_fields)?),
        (Quantity::Qu, Trajectory::new(times.clone(), qu_fields)?),
        (Quantity::W, Trajectory::new(times.clone(), w_fields)?),
        (Quantity::Dbar, Trajectory::new(times, dbar_fields)?),
    ];
    let mut out = Vec::new();
    for spec in specs {
        let quantity = spec
            .quantity
            .split('@')
            .next()
            .unwrap()
            .split('_')
            .next()
            .unwrap();
        let traj = &trajectories
            .iter()
            .find(|(q, _)| q.to_string() == quantity)
            .expect("menu quantity")
            .1;
        let value = if spec.tilde {
            chemin_lerner(part, traj, spec.rho, spec.index)?
        } else {
            time_lp_of_besov(part, traj, spec.rho, spec.index)?
        };
        out.push((spec.clone(), value));
    }
    Ok(out)
}

/// Boundedness ratio of the incompressible reference: solution norms over
/// data norms, the proxy for the global-existence estimate of the limit
/// system.
fn reference_boundedness_ratio(
    part: &DyadicPartition,
    reference: &FlowTrajectory,
    d_hat: &[f64],
) -> Result<f64> {
    let dim = reference.states[0].grid().dim() as f64;
    let u_traj = reference.u_trajectory()?;
    let g_traj = reference.d_perturbation_trajectory(d_hat)?;
    let su = chemin_lerner(part, &u_traj, f64::INFINITY, BesovIndex::new(dim / 2.0 - 1.0, 2.0, 1.0)?)?;
    let iu = time_lp_of_besov(part, &u_traj, 1.0, BesovIndex::new(dim / 2.0 + 1.0, 2.0, 1.0)?)?;
    let sg = chemin_lerner(part, &g_traj, f64::INFINITY, BesovIndex::new(dim / 2.0, 2.0, 1.0)?)?;
    let ig = time_lp_of_besov(part, &g_traj, 1.0, BesovIndex::new(dim / 2.0 + 2.0, 2.0, 1.0)?)?;
    let u0 = &reference.states[0].u;
    let g0 = reference.states[0].d_perturbation(d_hat);
    let denom = critlab_core::besov::besov_norm(part, u0, BesovIndex::new(dim / 2.0 - 1.0, 2.0, 1.0)?)?
        + critlab_core::besov::besov_norm(part, &g0, BesovIndex::new(dim / 2.0, 2.0, 1.0)?)?;
    Ok((su + iu + sg + ig) / denom.max(1e-300))
}
