//! The functional-inequality zoo: Bernstein, derivation, embedding,
//! interpolation, dilation scaling, product and composition estimates, the
//! Bony identity, quasi-orthogonality and the hybrid-norm equivalence.
//!
//! Constants in the underlying statements are non-constructive, so every
//! check reports an empirical ratio over seeded samples together with its
//! spread across two grid resolutions; assertions against frozen bands live
//! in the acceptance suite, not here.

use anyhow::Result;
use critlab_core::besov::{besov_norm, hybrid_norm, BesovIndex};
use critlab_core::lp::DyadicPartition;
use critlab_core::model::PressureLaw;
use critlab_core::{synth, Grid, SpectralField};

use crate::report::RatioRow;

#[derive(Debug, Clone)]
pub struct InequalityConfig {
    pub seed: u64,
    /// grid sizes for the resolution-stability scan (2D)
    pub sizes: Vec<usize>,
    /// random fields per check per grid
    pub samples: usize,
    /// random pairs for the Bony residual on the finest grid
    pub bony_pairs: usize,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        InequalityConfig { seed: 1, sizes: vec![64, 128], samples: 20, bony_pairs: 50 }
    }
}

fn grid_2d(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * std::f64::consts::PI, 2.0 / 3.0).expect("2d grid")
}

fn idx(s: f64, p: f64, r: f64) -> BesovIndex {
    BesovIndex::new(s, p, r).expect("besov index")
}

struct RatioScan {
    name: &'static str,
    min: f64,
    max: f64,
    samples: usize,
    per_grid: Vec<f64>,
    hypothesis_met: bool,
}

impl RatioScan {
    fn new(name: &'static str) -> Self {
        RatioScan {
            name,
            min: f64::INFINITY,
            max: 0.0,
            samples: 0,
            per_grid: Vec::new(),
            hypothesis_met: true,
        }
    }

    fn push(&mut self, ratio: f64) {
        self.min = self.min.min(ratio);
        self.max = self.max.max(ratio);
        self.samples += 1;
    }

    fn close_grid(&mut self) {
        self.per_grid.push(self.max);
    }

    fn row(self) -> RatioRow {
        RatioRow {
            name: self.name.to_string(),
            max_ratio: self.max,
            min_ratio: if self.min.is_finite() { self.min } else { 0.0 },
            samples: self.samples,
            per_grid: self.per_grid,
            hypothesis_met: self.hypothesis_met,
        }
    }
}

/// Run the whole zoo; one [`RatioRow`] per inequality.
pub fn inequality_harness(cfg: &InequalityConfig) -> Result<Vec<RatioRow>> {
    let mut bernstein = RatioScan::new("bernstein_first_order");
    let mut derivation = RatioScan::new("derivation_shift");
    let mut embedding = RatioScan::new("sobolev_embedding");
    let mut interpolation = RatioScan::new("interpolation_r1_slack");
    let mut dilation = RatioScan::new("dilation_scaling");
    let mut product = RatioScan::new("product_cor21");
    let mut comp = RatioScan::new("composition_f_of_u");
    let mut comp_diff = RatioScan::new("composition_difference_shifted");
    let mut comp_diff_raw = RatioScan::new("composition_difference_raw");
    comp_diff_raw.hypothesis_met = false; // K'(0) != 0 for the raw pressure coefficient
    let mut bony = RatioScan::new("bony_residual");
    let mut quasi = RatioScan::new("quasi_orthogonality_residual");
    let mut partition = RatioScan::new("partition_residual");
    let mut hybrid = RatioScan::new("hybrid_equivalence_violation");

    for (gi, &n) in cfg.sizes.iter().enumerate() {
        let grid = grid_2d(n);
        let part = DyadicPartition::new(grid)?;
        let seed0 = cfg.seed + 10_000 * gi as u64;

        partition.push(partition_residual(&grid, &part));
        partition.close_grid();

        quasi.push(quasi_orthogonality_residual(&grid, &part, seed0)?);
        quasi.close_grid();

        for s in 0..cfg.samples as u64 {
            let f = synth::random_smooth(grid, 1, seed0 + 100 + s, 6.0);

            // Bernstein on every populated shell, p in {2, 4, inf}
            for j in part.shells() {
                let block = part.delta_j(&f, j)?;
                if block.l2_norm() <= 1e-10 {
                    continue;
                }
                for p in [2.0, 4.0, f64::INFINITY] {
                    let fp = block.lp_norm(p)?;
                    let dfp = (0..grid.dim())
                        .map(|a| block.derivative(a).lp_norm(p).unwrap())
                        .fold(0.0, f64::max);
                    bernstein.push(dfp / ((j as f64).exp2() * fp));
                }
            }

            // || grad f ||_{B^0} / || f ||_{B^1}
            let gf = f.gradient()?;
            derivation.push(
                besov_norm(&part, &gf, idx(0.0, 2.0, 1.0))?
                    / besov_norm(&part, &f, idx(1.0, 2.0, 1.0))?,
            );

            // B^1_{2,1} -> B^{1 - 1 + 1/3}_{6,2}
            embedding.push(
                besov_norm(&part, &f, idx(1.0 - 1.0 + 1.0 / 3.0, 6.0, 2.0))?
                    / besov_norm(&part, &f, idx(1.0, 2.0, 1.0))?,
            );

            // interpolation at theta = 1/2 between s = 0 and s = 2
            let lhs = besov_norm(&part, &f, idx(1.0, 2.0, 1.0))?;
            let rhs = (besov_norm(&part, &f, idx(0.0, 2.0, 1.0))?
                * besov_norm(&part, &f, idx(2.0, 2.0, 1.0))?)
            .sqrt();
            interpolation.push(lhs / rhs);

            // hybrid equivalence with the forced constant 2
            for nu in [0.05, 1.0] {
                let h = hybrid_norm(&part, &f, 1.0, f64::INFINITY, nu)?;
                let split = besov_norm(&part, &f, idx(0.0, 2.0, 1.0))?
                    + nu * besov_norm(&part, &f, idx(1.0, 2.0, 1.0))?;
                hybrid.push(h / split);
                hybrid.push(split / (2.0 * h));
            }

            // composition with the pressure coefficient K (linear law: K(0) = 0)
            let law = PressureLaw::Linear;
            let u = f.clone().scaled(0.3 / f.lp_norm(f64::INFINITY)?.max(1e-12));
            let ku = pointwise_map(&u, |z| law.k(z))?;
            comp.push(
                besov_norm(&part, &ku, idx(1.0, 2.0, 1.0))?
                    / besov_norm(&part, &u, idx(1.0, 2.0, 1.0))?,
            );

            // composition difference, both with G'(0) = 0 arranged and raw
            let v = synth::random_smooth(grid, 1, seed0 + 600 + s, 6.0);
            let v = v.clone().scaled(0.3 / v.lp_norm(f64::INFINITY)?.max(1e-12));
            let kp0 = law.k_prime_zero();
            let denom = (besov_norm(&part, &u, idx(1.0, 2.0, 1.0))?
                + besov_norm(&part, &v, idx(1.0, 2.0, 1.0))?)
                * besov_norm(&part, &(&v - &u), idx(1.0, 2.0, 1.0))?;
            let shifted = pointwise_map2(&u, &v, |a, b| {
                (law.k(b) - kp0 * b) - (law.k(a) - kp0 * a)
            })?;
            comp_diff.push(besov_norm(&part, &shifted, idx(1.0, 2.0, 1.0))? / denom);
            let raw = pointwise_map2(&u, &v, |a, b| law.k(b) - law.k(a))?;
            comp_diff_raw.push(besov_norm(&part, &raw, idx(1.0, 2.0, 1.0))? / denom);

            // dilation f(2x) on the half box: ratio / 2^{s - N/p}
            let fb = synth::random_band_limited(grid, 1, seed0 + 700 + s, 2.0, n as f64 / 8.0);
            let half = Grid::new(2, n, std::f64::consts::PI, 2.0 / 3.0)?;
            let part_half = DyadicPartition::new(half)?;
            let g = SpectralField::from_coeffs(half, 1, fb.coeffs().to_vec())?;
            let (s_dil, p_dil) = (0.75, 2.0);
            let predicted = (s_dil - 2.0 / p_dil as f64).exp2();
            dilation.push(
                besov_norm(&part_half, &g, idx(s_dil, p_dil, 1.0))?
                    / besov_norm(&part, &fb, idx(s_dil, p_dil, 1.0))?
                    / predicted,
            );
        }
        bernstein.close_grid();
        derivation.close_grid();
        embedding.close_grid();
        interpolation.close_grid();
        hybrid.close_grid();
        comp.close_grid();
        comp_diff.close_grid();
        comp_diff_raw.close_grid();
        dilation.close_grid();

        // product estimate over many random pairs, several index tuples
        for (s1, s2, p1, p2) in [(1.0, 1.0, 2.0, 2.0), (0.5, 0.5, 2.0, 2.0), (1.0, 1.0 / 3.0, 2.0, 6.0)]
        {
            for s in 0..cfg.samples as u64 {
                let u = synth::random_smooth(grid, 1, seed0 + 800 + s, 6.0);
                let v = synth::random_smooth(grid, 1, seed0 + 900 + s, 6.0);
                let uv = u.pointwise_product(&v)?;
                let ratio = besov_norm(&part, &uv, idx(s1 + s2 - 2.0 / p1, p2, 1.0))?
                    / (besov_norm(&part, &u, idx(s1, p1, 1.0))?
                        * besov_norm(&part, &v, idx(s2, p2, 1.0))?);
                product.push(ratio);
            }
        }
        product.close_grid();
    }

    // Bony residual on the finest grid over the requested number of pairs
    {
        let n = *cfg.sizes.last().expect("at least one grid");
        let grid = grid_2d(n);
        let part = DyadicPartition::new(grid)?;
        let band_hi = grid.max_retained_index() as f64 / 2.0;
        for s in 0..cfg.bony_pairs as u64 {
            let f = synth::random_band_limited(grid, 1, cfg.seed + 5_000 + 2 * s, 1.0, band_hi);
            let g = synth::random_band_limited(grid, 1, cfg.seed + 5_001 + 2 * s, 1.0, band_hi);
            let fg = f.pointwise_product(&g)?;
            let residual = (&part.bony_sum(&f, &g)? - &fg).l2_norm() / fg.l2_norm();
            bony.push(residual);
        }
        bony.close_grid();
    }

    Ok(vec![
        partition.row(),
        quasi.row(),
        bony.row(),
        bernstein.row(),
        derivation.row(),
        embedding.row(),
        interpolation.row(),
        dilation.row(),
        product.row(),
        comp.row(),
        comp_diff.row(),
        comp_diff_raw.row(),
        hybrid.row(),
    ])
}

/// Largest deviation of the shell sum from 1 over retained nonzero modes.
fn partition_residual(grid: &Grid, part: &DyadicPartition) -> f64 {
    let mut worst = 0.0f64;
    for idx in 1..grid.len() {
        if !grid.retained(idx) {
            continue;
        }
        let total: f64 = part.shells().map(|j| part.phi_row(j).unwrap()[idx]).sum();
        worst = worst.max((total - 1.0).abs());
    }
    worst
}

/// Largest leak of both quasi-orthogonality identities on one random field,
/// relative to its squared norm.
fn quasi_orthogonality_residual(
    grid: &Grid,
    part: &DyadicPartition,
    seed: u64,
) -> Result<f64> {
    let u = synth::random_band_limited(*grid, 1, seed, 1.0, grid.max_retained_index() as f64 / 2.0);
    let scale = u.l2_norm() * u.l2_norm();
    let mut worst = 0.0f64;
    for q in part.shells() {
        let block_q = part.delta_j(&u, q)?;
        for p in part.shells() {
            if (p - q).abs() >= 2 {
                worst = worst.max(part.delta_j(&block_q, p)?.l2_norm());
            }
        }
        if block_q.l2_norm() > 0.0 {
            let low = part.s_j(&u, q - 1)?;
            let prod = low.pointwise_product(&block_q)?;
            for p in part.shells() {
                if (p - q).abs() >= 5 {
                    worst = worst.max(part.delta_j(&prod, p)?.l2_norm() / scale.max(1e-300));
                }
            }
        }
    }
    Ok(worst)
}

fn pointwise_map(f: &SpectralField, map: impl Fn(f64) -> f64) -> Result<SpectralField> {
    let grid = *f.grid();
    let vals: Vec<f64> = f.to_physical().into_iter().map(map).collect();
    Ok(SpectralField::from_physical(grid, f.components(), &vals)?.dealiased())
}

fn pointwise_map2(
    a: &SpectralField,
    b: &SpectralField,
    map: impl Fn(f64, f64) -> f64,
) -> Result<SpectralField> {
    let grid = *a.grid();
    let pa = a.to_physical();
    let pb = b.to_physical();
    let vals: Vec<f64> = pa.iter().zip(&pb).map(|(&x, &y)| map(x, y)).collect();
    Ok(SpectralField::from_physical(grid, a.components(), &vals)?.dealiased())
}
