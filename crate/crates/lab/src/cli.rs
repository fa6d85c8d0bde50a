//! Command-line surface.
//!
//! Exit codes: 0 success, 1 assertion/guard failure, 2 configuration error.

use clap::{Args, Parser, Subcommand};
use critlab_core::besov::{besov_norm, BesovIndex};
use critlab_core::lp::DyadicPartition;
use critlab_core::model::{constant_director, default_d_hat, renormalize_director, FlowState};
use critlab_core::stepper::{integrate, ModelKind, StepOptions};
use critlab_core::{synth, SpectralField};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::{DataFamily, MenuEntry, RunConfig};
use crate::experiments::inequalities::{inequality_harness, InequalityConfig};
use crate::experiments::limit::{limit_sweep, LimitSweepConfig};
use crate::experiments::smallness::{smallness_sweep, SmallnessConfig};
use crate::experiments::strichartz::{strichartz_scan, StrichartzConfig};
use crate::plot::{render, GuideLine, RatePlot};
use crate::ratefit::fit_rate;
use crate::report::{RatioRow, SweepReport, SweepRow};

#[derive(Parser)]
#[command(name = "critlab", version, about = "Spectral laboratory for compressible nematic flow and its incompressible limit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonIo {
    /// run configuration file (flat INI sections)
    #[arg(long)]
    config: PathBuf,
    /// output directory for reports
    #[arg(long)]
    out: PathBuf,
    /// also emit SVG log-log rate plots
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run and report its norms and invariant diagnostics
    Solve(CommonIo),
    /// Epsilon ladder of compressible runs against one incompressible reference
    LimitSweep(CommonIo),
    /// Amplitude ladder probing the small-data stability constant
    SmallnessSweep(CommonIo),
    /// Seeded functional-inequality zoo
    VerifyInequalities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dispersive scaling of the free acoustic evolution
    StrichartzCheck {
        #[command(flatten)]
        io: CommonIo,
        /// spatial integrability of the measured norm
        #[arg(long)]
        p: Option<f64>,
        /// time integrability; the predicted exponent is 1/r
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 64)]
        snapshots: usize,
    },
    /// Evaluate one homogeneous Besov norm of a stored field and print it
    BesovNorm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        r: String,
    },
}

pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with its own success exit
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(violations) if violations.is_empty() => 0,
        Ok(violations) => {
            for v in violations {
                eprintln!("assertion failure: {v}");
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<Vec<String>> {
    match cli.command {
        Command::Solve(io) => cmd_solve(&io),
        Command::LimitSweep(io) => cmd_limit_sweep(&io),
        Command::SmallnessSweep(io) => cmd_smallness(&io),
        Command::VerifyInequalities { seed, out } => cmd_verify(seed, out.as_deref()),
        Command::StrichartzCheck { io, p, r, snapshots } => {
            cmd_strichartz(&io, p, r, snapshots)
        }
        Command::BesovNorm { config, field, s, p, r } => cmd_besov_norm(&config, &field, s, &p, &r),
    }
}

fn parse_extended(raw: &str) -> anyhow::Result<f64> {
    if raw == "inf" || raw == "infinity" {
        return Ok(f64::INFINITY);
    }
    raw.parse::<f64>().map_err(|_| anyhow::anyhow!("cannot parse exponent '{raw}'"))
}

fn cmd_besov_norm(config: &Path, field: &Path, s: f64, p: &str, r: &str) -> anyhow::Result<Vec<String>> {
    let cfg = RunConfig::parse_file(config)?;
    let grid = cfg.require_grid()?.build()?;
    let f = crate::fieldio::read_field(field, grid.dealias_fraction())?;
    anyhow::ensure!(
        f.grid().dim() == grid.dim()
            && f.grid().points_per_axis() == grid.points_per_axis()
            && (f.grid().box_length() - grid.box_length()).abs() <= 1e-12 * grid.box_length(),
        "field file geometry does not match the [grid] section"
    );
    let part = DyadicPartition::new(*f.grid())?;
    let index = BesovIndex::new(s, parse_extended(p)?, parse_extended(r)?)?;
    let value = besov_norm(&part, &f, index)?;
    println!("{value:.16e}");
    Ok(Vec::new())
}

fn cmd_verify(seed: u64, out: Option<&Path>) -> anyhow::Result<Vec<String>> {
    let cfg = InequalityConfig { seed, ..InequalityConfig::default() };
    let rows = inequality_harness(&cfg)?;
    let mut report = SweepReport::new("verify-inequalities", format!("seed = {seed}\n"), seed);
    report.ratios = rows.clone();
    if let Some(dir) = out {
        report.write(dir, "inequalities")?;
    }
    println!("{}", report.to_json());
    Ok(check_inequality_bands(&rows))
}

/// Frozen empirical bands for the zoo; violations are assertion failures.
pub fn check_inequality_bands(rows: &[RatioRow]) -> Vec<String> {
    let mut violations = Vec::new();
    let mut check = |name: &str, ok: Box<dyn Fn(&RatioRow) -> bool>| {
        match rows.iter().find(|r| r.name == name) {
            None => violations.push(format!("missing inequality row '{name}'")),
            Some(row) => {
                if !ok(row) {
                    violations.push(format!(
                        "{name}: ratios [{:.3e}, {:.3e}] outside the frozen band",
                        row.min_ratio, row.max_ratio
                    ));
                }
            }
        }
    };
    check("partition_residual", Box::new(|r| r.max_ratio <= 1e-14));
    check("quasi_orthogonality_residual", Box::new(|r| r.max_ratio <= 1e-12));
    check("bony_residual", Box::new(|r| r.max_ratio <= 1e-10));
    check("bernstein_first_order", Box::new(|r| r.min_ratio >= 0.25 && r.max_ratio <= 4.0));
    check("derivation_shift", Box::new(|r| r.min_ratio >= 0.25 && r.max_ratio <= 4.0));
    check("sobolev_embedding", Box::new(|r| r.max_ratio <= 2.0));
    check("interpolation_r1_slack", Box::new(|r| r.max_ratio <= 1.0 + 1e-12));
    check("dilation_scaling", Box::new(|r| r.min_ratio >= 0.95 && r.max_ratio <= 1.05));
    check("product_cor21", Box::new(|r| r.max_ratio <= 10.0));
    check("composition_f_of_u", Box::new(|r| r.max_ratio <= 4.0));
    check("composition_difference_shifted", Box::new(|r| r.max_ratio <= 10.0));
    check("hybrid_equivalence_violation", Box::new(|r| r.max_ratio <= 1.0 + 1e-12));
    violations
}

fn io_config(io: &CommonIo) -> anyhow::Result<RunConfig> {
    Ok(RunConfig::parse_file(&io.config)?)
}

fn cmd_solve(io: &CommonIo) -> anyhow::Result<Vec<String>> {
    let cfg = io_config(io)?;
    let grid = cfg.require_grid()?.build()?;
    let params = cfg.require_params()?.build()?;
    let run = cfg.require_run()?;
    let data = cfg.require_data()?;

    let dim = grid.dim();
    let d_hat = default_d_hat(dim);
    let amp = data.amplitude;
    let u_raw = synth::random_smooth(grid, dim, data.seed + 1, 3.0).scaled(amp);
    let (b0, u0) = match data.family {
        DataFamily::WellPrepared => {
            let (p, _) = u_raw.leray_decompose()?;
            (SpectralField::zeros(grid, 1), p)
        }
        DataFamily::IllPrepared => {
            (synth::random_smooth(grid, 1, data.seed, 3.0).scaled(amp), u_raw)
        }
    };
    let mut d0 = constant_director(grid, &d_hat);
    d0.axpy(amp.min(0.3), &synth::random_smooth(grid, dim, data.seed + 2, 3.0))?;
    let d0 = renormalize_director(&d0)?;
    let state = FlowState::new(b0, u0, d0, 0.0)?;
    let opts = StepOptions {
        kind: ModelKind::Compressible,
        nonlinear: true,
        renormalize_director: run.renormalize_director,
    };
    let traj = integrate(state, &params, &opts, run.t_final, run.dt, run.snapshot_every)?;

    let part = DyadicPartition::new(grid)?;
    let mut report = SweepReport::new("solve", cfg.serialize(), data.seed);
    let s = dim as f64 / 2.0;
    for (i, st) in traj.states.iter().enumerate() {
        report.rows.push(SweepRow {
            eps: traj.times[i],
            quantity: "b_hybrid".into(),
            norm_spec: format!("hybrid[s={s};r=inf;nu={}]", params.nu()),
            value: critlab_core::besov::hybrid_norm(&part, &st.b, s, f64::INFINITY, params.nu())?,
        });
        report.rows.push(SweepRow {
            eps: traj.times[i],
            quantity: "u_besov".into(),
            norm_spec: format!("B[s={};p=2;r=1]", s - 1.0),
            value: besov_norm(&part, &st.u, BesovIndex::new(s - 1.0, 2.0, 1.0)?)?,
        });
        report.rows.push(SweepRow {
            eps: traj.times[i],
            quantity: "director_drift".into(),
            norm_spec: "max | |d|^2 - 1 |".into(),
            value: st.director_drift(),
        });
    }
    let final_state = traj.final_state();
    report.notes.push(format!(
        "mass drift: {:.3e}",
        (final_state.b.mean(0) - traj.states[0].b.mean(0)).abs()
    ));
    let mut violations = Vec::new();
    if let Some(event) = &traj.aborted {
        report.notes.push(format!("run aborted at t = {}: {}", event.time, event.error));
        violations.push(format!("guard violation at t = {}: {}", event.time, event.error));
    }
    report.write(&io.out, "solve")?;
    crate::fieldio::write_field(&io.out.join("final_b.field"), &final_state.b)?;
    crate::fieldio::write_field(&io.out.join("final_u.field"), &final_state.u)?;
    crate::fieldio::write_field(&io.out.join("final_d.field"), &final_state.d)?;
    Ok(violations)
}

fn cmd_limit_sweep(io: &CommonIo) -> anyhow::Result<Vec<String>> {
    let cfg = io_config(io)?;
    let grid = cfg.require_grid()?.build()?;
    let params = cfg.require_params()?.build()?;
    let run = cfg.require_run()?;
    let data = cfg.require_data()?;
    let sweep = cfg.require_sweep()?;
    let menu = if sweep.norm_menu.is_empty() {
        vec![
            MenuEntry::from_str("b@4").unwrap(),
            MenuEntry::from_str("qu@4").unwrap(),
            MenuEntry::from_str("b@6").unwrap(),
            MenuEntry::from_str("qu@6").unwrap(),
            MenuEntry::from_str("w@6").unwrap(),
            MenuEntry::from_str("dbar@6").unwrap(),
        ]
    } else {
        sweep.norm_menu.clone()
    };
    let lcfg = LimitSweepConfig {
        grid,
        params,
        eps_list: sweep.eps_list.clone(),
        family: data.family,
        amplitude: data.amplitude,
        seed: data.seed,
        t_final: run.t_final,
        snapshot_dt: run.dt * run.snapshot_every as f64,
        dt_eps_factor: 0.1,
        menu,
        rate_tolerance: 0.15,
        renormalize_director: run.renormalize_director,
    };
    let report = limit_sweep(&lcfg, cfg.serialize())?;
    report.write(&io.out, "limit_sweep")?;
    if io.plot {
        write_rate_plots(&report, &io.out)?;
    }
    Ok(Vec::new())
}

fn cmd_smallness(io: &CommonIo) -> anyhow::Result<Vec<String>> {
    let cfg = io_config(io)?;
    let grid = cfg.require_grid()?.build()?;
    let params = cfg.require_params()?.build()?;
    let run = cfg.require_run()?;
    let data = cfg.require_data()?;
    let sweep = cfg.require_sweep()?;
    // the [sweep] ladder doubles as the amplitude ladder scaled by the
    // configured base amplitude
    let eta_list: Vec<f64> = sweep.eps_list.iter().map(|e| e * data.amplitude).collect();
    let scfg = SmallnessConfig {
        grid,
        params,
        eta_list,
        seed: data.seed,
        t_final: run.t_final,
        dt: run.dt,
        snapshot_every: run.snapshot_every,
        oversized_eta: Some(200.0 * data.amplitude),
        include_linear_reference: true,
    };
    let report = smallness_sweep(&scfg, cfg.serialize())?;
    report.write(&io.out, "smallness_sweep")?;
    if io.plot {
        write_rate_plots(&report, &io.out)?;
    }
    Ok(Vec::new())
}

fn cmd_strichartz(
    io: &CommonIo,
    p: Option<f64>,
    r: Option<f64>,
    snapshots: usize,
) -> anyhow::Result<Vec<String>> {
    let cfg = io_config(io)?;
    let grid_section = cfg.require_grid()?;
    let sweep = cfg.require_sweep()?;
    let data = cfg.require_data()?;
    let mut scfg = StrichartzConfig::defaults(grid_section.dim, grid_section.n);
    scfg.box_length = grid_section.box_length;
    scfg.eps_list = sweep.eps_list.clone();
    scfg.seed = data.seed;
    scfg.snapshots = snapshots;
    if let Some(p) = p {
        scfg.p = p;
    }
    if let Some(r) = r {
        scfg.r = r;
    }
    let outcome = strichartz_scan(&scfg)?;
    let mut report = SweepReport::new("strichartz-check", cfg.serialize(), data.seed);
    report.rows = outcome.rows.clone();
    report.fits.push(crate::report::FitRow {
        quantity: "acoustic_pair".into(),
        norm_spec: format!(
            "Ltilde[rho={}]B[s={:.4};p={};r=1]",
            scfg.r, outcome.measured_regularity, scfg.p
        ),
        target_exponent: Some(outcome.target),
        fitted_slope: outcome.fit.slope,
        stderr: outcome.fit.stderr,
        residual: outcome.fit.residual,
        sample_count: outcome.fit.n,
        flagged: (outcome.fit.slope - outcome.target).abs() > 0.1,
        analytical_only: false,
    });
    for (eps, frac) in &outcome.edge_fractions {
        report.notes.push(format!("eps = {eps}: edge energy fraction {frac:.3e}"));
    }
    for eps in &outcome.wrapped {
        report.notes.push(format!("eps = {eps}: wavefront reached the box edge, point invalidated"));
    }
    report.write(&io.out, "strichartz")?;
    if io.plot {
        write_rate_plots(&report, &io.out)?;
    }
    let mut violations = Vec::new();
    if (outcome.fit.slope - outcome.target).abs() > 0.1 {
        violations.push(format!(
            "acoustic scaling exponent {:.4} misses target {:.4} by more than 0.1",
            outcome.fit.slope, outcome.target
        ));
    }
    Ok(violations)
}

/// One SVG per fitted quantity: measured points, fitted line, target guide.
pub fn write_rate_plots(report: &SweepReport, out_dir: &Path) -> anyhow::Result<()> {
    for fit in &report.fits {
        if fit.analytical_only {
            continue;
        }
        let points: Vec<(f64, f64)> = report
            .rows
            .iter()
            .filter(|row| row.quantity == fit.quantity && row.value > 0.0)
            .map(|row| (row.eps, row.value))
            .collect();
        if points.len() < 2 {
            continue;
        }
        let refit = fit_rate(&points);
        let intercept = refit.map(|f| f.intercept).unwrap_or(0.0);
        let mut guides = Vec::new();
        if let Some(t) = fit.target_exponent {
            guides.push(GuideLine { slope: t, label: format!("target slope {t:.4}") });
        }
        let plot = RatePlot {
            title: format!("{} [{}]", fit.quantity, report.kind),
            points,
            fitted_slope: fit.fitted_slope,
            fitted_intercept_ln: intercept,
            guides,
        };
        let name = fit.quantity.replace(['@', '/'], "_");
        std::fs::write(out_dir.join(format!("rate_{name}.svg")), render(&plot))?;
    }
    Ok(())
}
