use critlab_core::symbol::apply_symbol;
use critlab_core::{synth, Grid, SpectralField, Symbol};
use std::f64::consts::PI;

fn grid_1d(n: usize) -> Grid {
    Grid::new(1, n, 2.0 * PI, 1.0).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn round_trip_physical_spectral() {
    let grid = Grid::new(2, 32, 2.0 * PI, 2.0 / 3.0).unwrap();
    let f = synth::random_smooth(grid, 2, 7, 4.0);
    let phys = f.to_physical();
    let back = SpectralField::from_physical(grid, 2, &phys).unwrap();
    let num = (&back - &f).l2_norm();
    let den = f.l2_norm();
    assert!(num / den <= 1e-12, "round trip error {}", num / den);
}

#[test]
fn lambda_is_eigenvalue_on_single_mode() {
    // Lambda cos(3x) = 3 cos(3x)
    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, x| (3.0 * x[0]).cos());
    let lf = apply_symbol(&f, &Symbol::LambdaPow(1.0)).unwrap();
    let expected = f.clone().scaled(3.0);
    assert!((&lf - &expected).l2_norm() <= 1e-12 * expected.l2_norm());
}

#[test]
fn derivative_of_cosine() {
    let k = 5.0;
    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, x| (k * x[0]).cos());
    let df = apply_symbol(&f, &Symbol::DerivAxis(0)).unwrap();
    let expected = SpectralField::from_fn(grid, 1, |_, x| -k * (k * x[0]).sin());
    assert!((&df - &expected).l2_norm() <= 1e-11);
}

#[test]
fn negative_powers_kill_the_mean() {
    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, _| 4.2);
    let g = apply_symbol(&f, &Symbol::LambdaPow(-1.0)).unwrap();
    assert_eq!(g.l2_norm(), 0.0);
    let h = apply_symbol(&f, &Symbol::LambdaPow(-2.0)).unwrap();
    assert_eq!(h.l2_norm(), 0.0);
}

#[test]
fn leray_of_gradient_is_pure_q() {
    let grid = Grid::new(2, 32, 2.0 * PI, 2.0 / 3.0).unwrap();
    let f = synth::random_smooth(grid, 1, 3, 3.0);
    let gf = f.gradient().unwrap();
    let (p, q) = gf.leray_decompose().unwrap();
    assert!(p.l2_norm() <= 1e-13 * gf.l2_norm().max(1e-30));
    assert!((&q - &gf).l2_norm() <= 1e-13 * gf.l2_norm());
}

#[test]
fn leray_keeps_divergence_free_fields() {
    // u = (sin y, sin x) has div u = 0: P u = u, Q u = 0
    let grid = Grid::new(2, 32, 2.0 * PI, 1.0).unwrap();
    let u = SpectralField::from_fn(grid, 2, |c, x| if c == 0 { x[1].sin() } else { x[0].sin() });
    let (p, q) = u.leray_decompose().unwrap();
    assert!(q.l2_norm() <= 1e-14 * u.l2_norm());
    assert!((&p - &u).l2_norm() <= 1e-14 * u.l2_norm());
}

#[test]
fn projector_algebra_is_machine_exact() {
    let grid = Grid::new(2, 32, 2.0 * PI, 2.0 / 3.0).unwrap();
    let u = synth::random_smooth(grid, 2, 11, 4.0);
    let scale = u.l2_norm();
    let (p, q) = u.leray_decompose().unwrap();
    // P + Q = u exactly
    assert!((&(&p + &q) - &u).l2_norm() <= 1e-14 * scale);
    // div P u = 0
    assert!(p.divergence().unwrap().l2_norm() <= 1e-13 * scale);
    // idempotence and annihilation
    let (pp, pq) = p.leray_decompose().unwrap();
    assert!((&pp - &p).l2_norm() <= 1e-13 * scale);
    assert!(pq.l2_norm() <= 1e-13 * scale);
    let (qp, qq) = q.leray_decompose().unwrap();
    assert!((&qq - &q).l2_norm() <= 1e-13 * scale);
    assert!(qp.l2_norm() <= 1e-13 * scale);
}

#[test]
fn l2_norm_of_sine_is_sqrt_pi() {
    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, x| x[0].sin());
    assert!(rel_err(f.lp_norm(2.0).unwrap(), PI.sqrt()) <= 1e-13);
}

#[test]
fn linf_norm_of_constant() {
    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, _| 3.0);
    assert!(rel_err(f.lp_norm(f64::INFINITY).unwrap(), 3.0) <= 1e-13);
}

#[test]
fn l4_norm_of_sine_matches_quadrature_oracle() {
    // oracle: brute-force trapezoid of sin^4 at high resolution
    let m = 1 << 16;
    let h = 2.0 * PI / m as f64;
    let integral: f64 = (0..m).map(|i| (i as f64 * h).sin().powi(4) * h).sum();
    let oracle = integral.powf(0.25);
    // closed form: integral of sin^4 over one period is 2*pi*3/8
    assert!(rel_err(integral, 2.0 * PI * 3.0 / 8.0) <= 1e-10);

    let grid = grid_1d(64);
    let f = SpectralField::from_fn(grid, 1, |_, x| x[0].sin());
    assert!(rel_err(f.lp_norm(4.0).unwrap(), oracle) <= 1e-12);
}

#[test]
fn lp_norm_rejects_p_below_one() {
    let grid = grid_1d(8);
    let f = SpectralField::zeros(grid, 1);
    assert!(f.lp_norm(0.5).is_err());
}

#[test]
fn parseval_matches_collocation_quadrature() {
    let grid = Grid::new(2, 32, 2.0 * PI, 2.0 / 3.0).unwrap();
    let f = synth::random_smooth(grid, 1, 23, 4.0);
    let parseval = f.lp_norm(2.0).unwrap();
    let len = grid.len();
    let phys = f.to_physical();
    let quad =
        (grid.cell_volume() * phys[..len].iter().map(|v| v * v).sum::<f64>()).sqrt();
    assert!(rel_err(parseval, quad) <= 1e-12);
}

#[test]
fn dealias_is_idempotent_and_kills_high_modes() {
    let grid = Grid::new(1, 64, 2.0 * PI, 2.0 / 3.0).unwrap();
    // single mode beyond the cutoff (|m| = 25 > 21)
    let f = SpectralField::from_fn(grid, 1, |_, x| (25.0 * x[0]).cos());
    let g = f.clone().dealiased();
    assert!(g.l2_norm() <= 1e-13 * f.l2_norm());

    let mut h = synth::random_smooth(grid, 1, 5, 4.0);
    let before = h.clone();
    h.dealias();
    assert_eq!(h, before, "already-dealiased field must be unchanged");
}

#[test]
fn squared_mode_42_is_removed_by_dealiasing() {
    // sin(42x)^2 = 1/2 - cos(84x)/2; mode 84 aliases to -44 on n = 128 and
    // must be cut, leaving the constant
    let grid = Grid::new(1, 128, 2.0 * PI, 2.0 / 3.0).unwrap();
    let f = SpectralField::from_fn(grid, 1, |_, x| (42.0 * x[0]).sin());
    let prod = f.pointwise_product(&f).unwrap();
    assert!((prod.mean(0) - 0.5).abs() <= 1e-13);
    let constant = SpectralField::from_fn(grid, 1, |_, _| 0.5);
    assert!((&prod - &constant).l2_norm() <= 1e-13);
    // the aliased image sat at -44 before the cut
    let idx_alias = 128 - 44;
    assert_eq!(prod.coeff(0, idx_alias).norm(), 0.0);
}

#[test]
fn spectral_derivative_beats_fd4_at_fourth_order() {
    // difference between the spectral derivative and a 4th-order stencil
    // shrinks like h^4 for analytic data
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [32usize, 64, 128] {
        let grid = grid_1d(n);
        let f = SpectralField::from_fn(grid, 1, |_, x| x[0].sin().exp());
        let df = f.derivative(0);
        let phys = f.to_physical();
        let dphys = df.to_physical();
        let h = grid.dx();
        let mut worst = 0.0f64;
        for i in 0..n {
            let at = |j: i64| phys[((i as i64 + j).rem_euclid(n as i64)) as usize];
            let fd4 = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
            worst = worst.max((fd4 - dphys[i]).abs());
        }
        errs.push(worst);
        hs.push(h);
    }
    let slope = fit_slope(&hs, &errs);
    assert!(
        (slope - 4.0).abs() <= 0.3,
        "FD4 agreement order {slope}, errors {errs:?}"
    );
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn round_trip_any_seed(seed in 0u64..1u64 << 32) {
            let grid = Grid::new(2, 16, 2.0 * PI, 2.0 / 3.0).unwrap();
            let f = synth::random_smooth(grid, 1, seed, 3.0);
            let back = SpectralField::from_physical(grid, 1, &f.to_physical()).unwrap();
            prop_assert!((&back - &f).l2_norm() <= 1e-12 * f.l2_norm().max(1e-30));
        }

        #[test]
        fn leray_parts_are_orthogonal(seed in 0u64..1u64 << 32) {
            let grid = Grid::new(2, 16, 2.0 * PI, 2.0 / 3.0).unwrap();
            let u = synth::random_smooth(grid, 2, seed, 3.0);
            let (p, q) = u.leray_decompose().unwrap();
            // Pythagoras in L^2
            let lhs = u.l2_norm().powi(2);
            let rhs = p.l2_norm().powi(2) + q.l2_norm().powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-30));
        }
    }
}
