//! Seeded synthetic fields for experiments and tests.
//!
//! Fields are built from real white noise on the grid shaped by a radial
//! spectral envelope, so conjugate symmetry is automatic and every field is
//! reproducible from its seed.

use crate::field::SpectralField;
use crate::grid::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// White noise filtered by `envelope(|xi|)`, dealiased, all components drawn
/// independently. The zero mode is removed.
pub fn random_field(
    grid: Grid,
    components: usize,
    seed: u64,
    envelope: impl Fn(f64) -> f64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = grid.len();
    let mut values = vec![0.0; components * len];
    for v in values.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    let mut field = SpectralField::from_physical(grid, components, &values).expect("sized buffer");
    for c in 0..components {
        for idx in 0..len {
            let k = grid.k2(idx).sqrt();
            let w = if idx == 0 { 0.0 } else { envelope(k) };
            *field.coeff_mut(c, idx) *= w;
        }
    }
    field.dealiased()
}

/// Mean-zero field supported on wavevectors `k_lo <= |xi| <= k_hi`,
/// normalized to unit `L^2` norm (zero field if the band is empty).
pub fn random_band_limited(
    grid: Grid,
    components: usize,
    seed: u64,
    k_lo: f64,
    k_hi: f64,
) -> SpectralField {
    let mut f = random_field(grid, components, seed, |k| {
        if k >= k_lo && k <= k_hi {
            1.0
        } else {
            0.0
        }
    });
    let n = f.l2_norm();
    if n > 0.0 {
        f.scale(1.0 / n);
    }
    f
}

/// Smooth random field with Gaussian spectral decay `exp(-(k/k0)^2)` above
/// `k_lo`, unit `L^2` norm. Good initial data for solver runs: well resolved,
/// negligible truncation tail.
pub fn random_smooth(grid: Grid, components: usize, seed: u64, k0: f64) -> SpectralField {
    let mut f = random_field(grid, components, seed, |k| (-(k / k0).powi(2)).exp());
    let n = f.l2_norm();
    if n > 0.0 {
        f.scale(1.0 / n);
    }
    f
}

/// `C^infinity` bump, equal to `exp(1 - 1/(1-r^2))` for `r < 1`, zero outside.
pub fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Compactly supported random field: a low-order random trigonometric
/// profile windowed by a radial bump of radius `support_radius` centered in
/// the box. Support is exact in physical space up to the dealias ripple.
pub fn random_compact(
    grid: Grid,
    components: usize,
    seed: u64,
    support_radius: f64,
    oscillation: f64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let l = grid.box_length();
    let center = l / 2.0;
    let n_modes = 4usize;
    // random plane-wave superposition, wavevectors of size ~oscillation
    let mut waves = Vec::new();
    for _ in 0..n_modes {
        let dir: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            if dim >= 2 { rng.gen_range(-1.0..1.0) } else { 0.0 },
            if dim >= 3 { rng.gen_range(-1.0..1.0) } else { 0.0 },
        ];
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt().max(1e-9);
        let amp: f64 = rng.gen_range(0.5..1.0);
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        waves.push((dir.map(|d| d / norm * oscillation), amp, phase));
    }
    let len = grid.len();
    let mut values = vec![0.0; components * len];
    for c in 0..components {
        for idx in 0..len {
            let x = grid.point(idx);
            let r2: f64 =
                (0..dim).map(|a| (x[a] - center) * (x[a] - center)).sum::<f64>();
            let w = bump(r2.sqrt() / support_radius);
            if w == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (k, amp, phase) in &waves {
                let dot: f64 = (0..dim).map(|a| k[a] * x[a]).sum();
                s += amp * (dot + phase + c as f64).cos();
            }
            values[c * len + idx] = w * s;
        }
    }
    SpectralField::from_physical(grid, components, &values)
        .expect("sized buffer")
        .dealiased()
}
