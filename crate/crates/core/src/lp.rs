//! Homogeneous Littlewood-Paley decomposition on the grid.
//!
//! The radial cutoff `chi` equals 1 for `|xi| <= 3/4` and 0 for
//! `|xi| >= 4/3`, glued with the standard `exp(-1/t)` bump, and
//! `phi(xi) = chi(xi/2) - chi(xi)` is supported in the annulus
//! `3/4 <= |xi| <= 8/3`. Shell tables are built as differences of the same
//! stored `chi` values, so the partition of unity telescopes exactly in
//! floating point on every nonzero retained wavevector.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

/// `0` for `t <= 0`, `1` for `t >= 1`, smooth in between.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial low-pass cutoff: 1 on `|xi| <= 3/4`, 0 on `|xi| >= 4/3`.
pub fn chi(r: f64) -> f64 {
    const LO: f64 = 0.75;
    const HI: f64 = 4.0 / 3.0;
    smooth_step((HI - r.abs()) / (HI - LO))
}

/// Dyadic bump `phi(xi) = chi(xi/2) - chi(xi)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Tabulated dyadic partition for one grid: multiplier values
/// `phi(2^-j xi)` and `chi(2^-j xi)` for every mode, over the shell range
/// `[j_min, j_max]` covering all retained nonzero wavevectors.
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    /// `phi_table[j - j_min][idx]`, rows `j_min..=j_max`
    phi_table: Vec<Vec<f64>>,
    /// `chi_table[j - j_min][idx]`, rows `j_min..=j_max + 1`
    chi_table: Vec<Vec<f64>>,
}

impl DyadicPartition {
    /// Tabulate the partition. Fails if the grid's frequency range cannot
    /// host at least 3 shells.
    pub fn new(grid: Grid) -> Result<Self> {
        let k_min = grid.k_min();
        let k_max = grid.k_max();
        // pad by the support edges so out-of-range shells vanish identically
        let j_min = (0.375 * k_min).log2().floor() as i32;
        let j_max = ((4.0 / 3.0) * k_max).log2().ceil() as i32;
        // shells whose annulus meets [k_min, k_max]
        let hosted = ((4.0 / 3.0) * k_max).log2().floor() as i32
            - (0.375 * k_min).log2().ceil() as i32
            + 1;
        if hosted < 3 {
            return Err(Error::InvalidGrid(format!(
                "frequency range [{k_min}, {k_max}] hosts only {hosted} dyadic shells, need 3"
            )));
        }
        let len = grid.len();
        let rows = (j_max - j_min + 2) as usize;
        let mut chi_table = Vec::with_capacity(rows);
        for j in j_min..=j_max + 1 {
            let scale = (-(j as f64)).exp2();
            let mut row = vec![0.0; len];
            for (idx, slot) in row.iter_mut().enumerate() {
                *slot = chi(scale * grid.k2(idx).sqrt());
            }
            chi_table.push(row);
        }
        let mut phi_table = Vec::with_capacity(rows - 1);
        for j in 0..rows - 1 {
            let row: Vec<f64> = (0..len).map(|idx| chi_table[j + 1][idx] - chi_table[j][idx]).collect();
            phi_table.push(row);
        }
        Ok(DyadicPartition { grid, j_min, j_max, phi_table, chi_table })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Shell indices as a range, `j_min..=j_max`.
    pub fn shells(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// `phi(2^-j xi)` values for shell `j`, if tabulated.
    pub fn phi_row(&self, j: i32) -> Option<&[f64]> {
        if j < self.j_min || j > self.j_max {
            None
        } else {
            Some(&self.phi_table[(j - self.j_min) as usize])
        }
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Frequency-localized block `Delta_j f`. Shells outside the tabulated
    /// range are identically zero on the grid.
    pub fn delta_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        match self.phi_row(j) {
            None => Ok(SpectralField::zeros(self.grid, f.components())),
            Some(row) => Ok(multiply_row(f, row)),
        }
    }

    /// Low-frequency block `S_j f = sum_{k <= j-1} Delta_k f` plus the mean;
    /// realized as the `chi(2^-j xi)` multiplier.
    pub fn s_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(f)?;
        if j < self.j_min {
            // only the zero mode survives
            let mut out = SpectralField::zeros(self.grid, f.components());
            for c in 0..f.components() {
                *out.coeff_mut(c, 0) = f.coeff(c, 0);
            }
            return Ok(out);
        }
        if j > self.j_max + 1 {
            return Ok(f.clone());
        }
        let row = &self.chi_table[(j - self.j_min) as usize];
        Ok(multiply_row(f, row))
    }

    /// All blocks `Delta_j f` for `j_min..=j_max` in one pass.
    pub fn shell_fields(&self, f: &SpectralField) -> Result<Vec<SpectralField>> {
        self.check_grid(f)?;
        Ok(self.phi_table.iter().map(|row| multiply_row(f, row)).collect())
    }

    /// Per-shell `L^2` norms straight from coefficients (no transform).
    pub fn shell_l2_norms(&self, f: &SpectralField) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        let len = self.grid.len();
        let vol = self.grid.volume();
        let mut out = Vec::with_capacity(self.phi_table.len());
        for row in &self.phi_table {
            let mut sum = 0.0;
            for c in 0..f.components() {
                let slab = f.component_slice(c);
                for idx in 0..len {
                    let w = row[idx];
                    if w != 0.0 {
                        sum += w * w * slab[idx].norm_sqr();
                    }
                }
            }
            out.push((vol * sum).sqrt());
        }
        Ok(out)
    }

    /// Per-shell `L^p` norms (`p = 2` avoids transforms).
    pub fn shell_lp_norms(&self, f: &SpectralField, p: f64) -> Result<Vec<f64>> {
        if p == 2.0 {
            return self.shell_l2_norms(f);
        }
        let shells = self.shell_fields(f)?;
        shells.iter().map(|s| s.lp_norm(p)).collect()
    }

    /// Bony paraproduct `T_f g = sum_q S_{q-1} f Delta_q g`, dealiased.
    pub fn paraproduct(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.check_grid(f)?;
        self.check_grid(g)?;
        let m = product_components(f, g)?;
        let len = self.grid.len();
        let mut acc = vec![0.0; m * len];
        for q in self.shells() {
            let low = self.s_j(f, q - 1)?.to_physical();
            let block = self.delta_j(g, q)?.to_physical();
            accumulate_product(&mut acc, &low, &block, f.components(), g.components(), len);
        }
        Ok(SpectralField::from_physical(self.grid, m, &acc)?.dealiased())
    }

    /// Bony remainder `R(f, g) = sum_q Delta_q f (Delta_{q-1} + Delta_q +
    /// Delta_{q+1}) g`, dealiased.
    pub fn remainder(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.check_grid(f)?;
        self.check_grid(g)?;
        let m = product_components(f, g)?;
        let len = self.grid.len();
        let mut acc = vec![0.0; m * len];
        for q in self.shells() {
            let block_f = self.delta_j(f, q)?.to_physical();
            let mut near = self.delta_j(g, q)?;
            for dq in [-1i32, 1] {
                if let Some(row) = self.phi_row(q + dq) {
                    let extra = multiply_row(g, row);
                    near.axpy(1.0, &extra)?;
                }
            }
            let near = near.to_physical();
            accumulate_product(&mut acc, &block_f, &near, f.components(), g.components(), len);
        }
        Ok(SpectralField::from_physical(self.grid, m, &acc)?.dealiased())
    }

    /// Full Bony sum `T_g f + T_f g + R(f, g)`; equals the dealiased product
    /// `f g` when `mean(f) * mean(g) = 0`.
    pub fn bony_sum(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        let mut out = self.paraproduct(g, f)?;
        out.axpy(1.0, &self.paraproduct(f, g)?)?;
        out.axpy(1.0, &self.remainder(f, g)?)?;
        Ok(out)
    }
}

fn multiply_row(f: &SpectralField, row: &[f64]) -> SpectralField {
    let len = f.grid().len();
    let mut out = f.clone();
    for c in 0..f.components() {
        for idx in 0..len {
            *out.coeff_mut(c, idx) = f.coeff(c, idx) * row[idx];
        }
    }
    out
}

fn product_components(f: &SpectralField, g: &SpectralField) -> Result<usize> {
    if f.components() == 1 {
        Ok(g.components())
    } else if g.components() == 1 || f.components() == g.components() {
        Ok(f.components().max(g.components()))
    } else {
        Err(Error::ComponentMismatch { expected: f.components(), got: g.components() })
    }
}

fn accumulate_product(
    acc: &mut [f64],
    a: &[f64],
    b: &[f64],
    ma: usize,
    mb: usize,
    len: usize,
) {
    let m = ma.max(mb);
    for c in 0..m {
        let ca = if ma == 1 { 0 } else { c };
        let cb = if mb == 1 { 0 } else { c };
        for idx in 0..len {
            acc[c * len + idx] += a[ca * len + idx] * b[cb * len + idx];
        }
    }
}
