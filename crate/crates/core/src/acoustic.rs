//! Exact per-mode propagation of the (viscous) acoustic pair.
//!
//! The pair `(b, l)` with `l = Lambda^{-1} div Qu` obeys, mode by mode,
//!
//! ```text
//!   d/dt [b; l] = [[0, -k/eps], [k/eps, -nu k^2]] [b; l]      (k = |xi|)
//! ```
//!
//! whose matrix exponential is evaluated in closed form on all three
//! eigenvalue branches (oscillatory, overdamped, near-critical).

use crate::besov::Trajectory;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::C64;

/// `exp(t A)` for `A = [[0, -a], [a, -c]]`, `a = k/eps`, `c = nu k^2`,
/// as a 2x2 row-major real matrix.
///
/// Writing `A = -(c/2) I + B` with `B^2 = delta I`, `delta = c^2/4 - a^2`:
/// `exp(tA) = e^{-ct/2} (cosh(sqrt(delta) t) I + sinh(sqrt(delta) t)/sqrt(delta) B)`.
pub fn acoustic_block(k: f64, eps: f64, nu: f64, t: f64) -> [f64; 4] {
    let a = if eps == 0.0 { 0.0 } else { k / eps };
    let c = nu * k * k;
    let delta = 0.25 * c * c - a * a;
    let half = 0.5 * c * t;

    // ch = e^{-ct/2} cosh(sqrt(delta) t), sh = e^{-ct/2} sinh(sqrt(delta) t)/sqrt(delta)
    let (ch, sh);
    let x = delta * t * t;
    if x.abs() < 1e-10 * (1.0 + half * half) {
        // near-critical damping: series in delta t^2
        let e = (-half).exp();
        ch = e * (1.0 + x / 2.0 + x * x / 24.0);
        sh = e * t * (1.0 + x / 6.0 + x * x / 120.0);
    } else if delta > 0.0 {
        // overdamped: combine exponents so nothing overflows (sd <= c/2)
        let sd = delta.sqrt();
        let ep = (sd * t - half).exp();
        let em = (-sd * t - half).exp();
        ch = 0.5 * (ep + em);
        sh = 0.5 * (ep - em) / sd;
    } else {
        // oscillatory
        let w = (-delta).sqrt();
        let e = (-half).exp();
        ch = e * (w * t).cos();
        sh = e * (w * t).sin() / w;
    }

    let hc = 0.5 * c;
    [ch + hc * sh, -a * sh, a * sh, ch - hc * sh]
}

/// Sampled forcing `(F, G)` for Duhamel integration.
#[derive(Debug, Clone)]
pub struct AcousticForcing {
    pub times: Vec<f64>,
    pub f: Vec<SpectralField>,
    pub g: Vec<SpectralField>,
}

/// Advance the acoustic pair `(b, v)` from 0 to `t` with the exact per-mode
/// propagator; an optional forcing is folded in by trapezoidal Duhamel
/// quadrature with the same propagator.
pub fn acoustic_propagate(
    b0: &SpectralField,
    v0: &SpectralField,
    eps: f64,
    nu: f64,
    t: f64,
    forcing: Option<&AcousticForcing>,
) -> Result<(SpectralField, SpectralField)> {
    if b0.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    if b0.components() != 1 || v0.components() != 1 {
        return Err(Error::ComponentMismatch { expected: 1, got: b0.components().max(v0.components()) });
    }
    let grid = *b0.grid();
    let len = grid.len();

    let mut b = b0.clone();
    let mut v = v0.clone();
    apply_block(&mut b, &mut v, |k| acoustic_block(k, eps, nu, t));

    if let Some(forcing) = forcing {
        if forcing.times.len() < 2 {
            return Err(Error::InvalidTrajectory("Duhamel forcing needs >= 2 samples".into()));
        }
        // trapezoid over samples s_i of e^{(t - s_i) A} (F, G)(s_i)
        let m = forcing.times.len();
        for i in 0..m {
            let s = forcing.times[i];
            if s < -1e-12 || s > t + 1e-12 {
                return Err(Error::InvalidTrajectory(format!(
                    "forcing sample at {s} outside [0, {t}]"
                )));
            }
            let weight = if i == 0 {
                0.5 * (forcing.times[1] - forcing.times[0])
            } else if i == m - 1 {
                0.5 * (forcing.times[m - 1] - forcing.times[m - 2])
            } else {
                0.5 * (forcing.times[i + 1] - forcing.times[i - 1])
            };
            let mut fb = forcing.f[i].clone();
            let mut fv = forcing.g[i].clone();
            apply_block(&mut fb, &mut fv, |k| acoustic_block(k, eps, nu, t - s));
            for idx in 0..len {
                *b.coeff_mut(0, idx) += weight * fb.coeff(0, idx);
                *v.coeff_mut(0, idx) += weight * fv.coeff(0, idx);
            }
        }
    }
    Ok((b, v))
}

/// Sample the free evolution at the given times.
pub fn acoustic_free_trajectory(
    b0: &SpectralField,
    v0: &SpectralField,
    eps: f64,
    nu: f64,
    times: &[f64],
) -> Result<(Trajectory, Trajectory)> {
    let mut bs = Vec::with_capacity(times.len());
    let mut vs = Vec::with_capacity(times.len());
    for &t in times {
        let (b, v) = acoustic_propagate(b0, v0, eps, nu, t, None)?;
        bs.push(b);
        vs.push(v);
    }
    Ok((Trajectory::new(times.to_vec(), bs)?, Trajectory::new(times.to_vec(), vs)?))
}

fn apply_block(
    b: &mut SpectralField,
    v: &mut SpectralField,
    block: impl Fn(f64) -> [f64; 4],
) {
    let grid = *b.grid();
    let len = grid.len();
    for idx in 0..len {
        let k = grid.k2(idx).sqrt();
        let m = block(k);
        let bb: C64 = b.coeff(0, idx);
        let vv: C64 = v.coeff(0, idx);
        *b.coeff_mut(0, idx) = m[0] * bb + m[1] * vv;
        *v.coeff_mut(0, idx) = m[2] * bb + m[3] * vv;
    }
}
