//! Homogeneous Besov, hybrid Besov and Chemin-Lerner norms.
//!
//! All norms aggregate the dyadic blocks of a [`DyadicPartition`]; the zero
//! mode never contributes (homogeneous convention). Time integrals over a
//! snapshot trajectory use trapezoidal quadrature on the recorded times.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::DyadicPartition;

/// Index triple of the homogeneous Besov space `B^s_{p,r}`.
///
/// `p` and `r` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    /// regularity
    pub s: f64,
    /// integrability
    pub p: f64,
    /// shell summation
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0) || !(r >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Besov index needs p, r >= 1, got p = {p}, r = {r}"
            )));
        }
        Ok(BesovIndex { s, p, r })
    }
}

/// `ell^r` aggregation of weighted shell values.
fn lr_aggregate(values: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.fold(0.0, f64::max)
    } else if r == 1.0 {
        values.sum()
    } else {
        values.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Homogeneous Besov norm `|| 2^{js} ||Delta_j f||_{L^p} ||_{ell^r}`.
pub fn besov_norm(part: &DyadicPartition, f: &SpectralField, idx: BesovIndex) -> Result<f64> {
    let shell_norms = part.shell_lp_norms(f, idx.p)?;
    Ok(lr_aggregate(
        part.shells()
            .zip(shell_norms)
            .map(|(j, a)| (j as f64 * idx.s).exp2() * a),
        idx.r,
    ))
}

/// Hybrid Besov norm
/// `sum_j 2^{js} max(nu, 2^{-j})^{1 - 2/r} ||Delta_j f||_{L^2}`.
pub fn hybrid_norm(part: &DyadicPartition, f: &SpectralField, s: f64, r: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("hybrid norm needs nu > 0, got {nu}")));
    }
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("hybrid norm needs r >= 1, got {r}")));
    }
    let exponent = if r.is_infinite() { 1.0 } else { 1.0 - 2.0 / r };
    let shell_norms = part.shell_l2_norms(f)?;
    Ok(part
        .shells()
        .zip(shell_norms)
        .map(|(j, a)| {
            let weight = nu.max((-(j as f64)).exp2()).powf(exponent);
            (j as f64 * s).exp2() * weight * a
        })
        .sum())
}

/// Time-ordered snapshots of one field on a fixed grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::InvalidTrajectory("times and fields differ in length".into()));
        }
        if times.is_empty() {
            return Err(Error::InvalidTrajectory("empty trajectory".into()));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidTrajectory("times must be strictly increasing".into()));
        }
        let grid = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Trajectory { times, fields })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap() - self.times[0]
    }
}

/// Trapezoidal `L^rho(dt)` norm of a sampled scalar function of time;
/// `rho = infinity` is the max over samples.
pub fn time_lp(times: &[f64], values: &[f64], rho: f64) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    if rho.is_infinite() {
        return values.iter().fold(0.0, |m, &v| m.max(v));
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        acc += 0.5 * dt * (values[i - 1].powf(rho) + values[i].powf(rho));
    }
    acc.powf(1.0 / rho)
}

/// Chemin-Lerner norm `|| 2^{js} ||Delta_j f(t)||_{L^rho(0,T; L^p)} ||_{ell^r}`:
/// the time norm is taken per shell, then shells are aggregated.
pub fn chemin_lerner(
    part: &DyadicPartition,
    traj: &Trajectory,
    rho: f64,
    idx: BesovIndex,
) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InvalidTrajectory("Chemin-Lerner norm needs >= 2 snapshots".into()));
    }
    let n_shells = (part.j_max() - part.j_min() + 1) as usize;
    let mut series = vec![Vec::with_capacity(traj.len()); n_shells];
    for f in traj.fields() {
        let norms = part.shell_lp_norms(f, idx.p)?;
        for (slot, v) in series.iter_mut().zip(norms) {
            slot.push(v);
        }
    }
    Ok(lr_aggregate(
        part.shells().zip(&series).map(|(j, vals)| {
            (j as f64 * idx.s).exp2() * time_lp(traj.times(), vals, rho)
        }),
        idx.r,
    ))
}

/// Plain `L^rho(0,T; B^s_{p,r})` norm: spatial Besov norm first, then the
/// time norm (the aggregation order opposite to [`chemin_lerner`]).
pub fn time_lp_of_besov(
    part: &DyadicPartition,
    traj: &Trajectory,
    rho: f64,
    idx: BesovIndex,
) -> Result<f64> {
    let values: Vec<f64> =
        traj.fields().iter().map(|f| besov_norm(part, f, idx)).collect::<Result<_>>()?;
    Ok(time_lp(traj.times(), &values, rho))
}

/// Plain time norm of the hybrid norm, `L^rho(0,T; hybrid B^{s,r}_nu)`.
pub fn time_lp_of_hybrid(
    part: &DyadicPartition,
    traj: &Trajectory,
    rho: f64,
    s: f64,
    r: f64,
    nu: f64,
) -> Result<f64> {
    let values: Vec<f64> =
        traj.fields().iter().map(|f| hybrid_norm(part, f, s, r, nu)).collect::<Result<_>>()?;
    Ok(time_lp(traj.times(), &values, rho))
}

/// The mixed solution-space norm of a `(b, u, d - d_hat)` triple of
/// trajectories:
///
/// ```text
///   ||b||_{L^inf hybrid(s, inf)} + ||u||_{L^inf B^{s-1}} + ||g||_{L^inf B^s}
/// + nu ||b||_{L^1 hybrid(s, 1)} + nu_lower ||u||_{L^1 B^{s+1}} + theta ||g||_{L^1 B^{s+2}}
/// ```
pub fn solution_norm(
    part: &DyadicPartition,
    b: &Trajectory,
    u: &Trajectory,
    g: &Trajectory,
    s: f64,
    nu: f64,
    nu_lower: f64,
    theta: f64,
) -> Result<f64> {
    let inf = f64::INFINITY;
    let sup_b = time_lp_of_hybrid(part, b, inf, s, inf, nu)?;
    let sup_u = time_lp_of_besov(part, u, inf, BesovIndex::new(s - 1.0, 2.0, 1.0)?)?;
    let sup_g = time_lp_of_besov(part, g, inf, BesovIndex::new(s, 2.0, 1.0)?)?;
    let int_b = time_lp_of_hybrid(part, b, 1.0, s, 1.0, nu)?;
    let int_u = time_lp_of_besov(part, u, 1.0, BesovIndex::new(s + 1.0, 2.0, 1.0)?)?;
    let int_g = time_lp_of_besov(part, g, 1.0, BesovIndex::new(s + 2.0, 2.0, 1.0)?)?;
    Ok(sup_b + sup_u + sup_g + nu * int_b + nu_lower * int_u + theta * int_g)
}
