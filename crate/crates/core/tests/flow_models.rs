use critlab_core::acoustic::{acoustic_block, acoustic_propagate};
use critlab_core::besov::{besov_norm, time_lp, BesovIndex};
use critlab_core::lp::DyadicPartition;
use critlab_core::model::{
    compute_limit_diagnostics, constant_director, default_d_hat, p_critical, pressure_coeffs,
    renormalize_director, rescale_state, rhs_compressible, rhs_incompressible,
    theorem_rate_exponent, FlowState, ModelParams, PressureLaw, StrichartzExponents,
};
use critlab_core::{synth, Error, Grid, SpectralField};
use std::f64::consts::PI;

fn grid_2d(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * PI, 2.0 / 3.0).unwrap()
}

fn params(eps: f64, pressure: PressureLaw) -> ModelParams {
    ModelParams::new(0.5, 0.25, 0.4, 0.3, eps, pressure).unwrap()
}

fn small_state(grid: Grid, seed: u64, amp: f64) -> FlowState {
    let b = synth::random_smooth(grid, 1, seed, 4.0).scaled(amp);
    let u = synth::random_smooth(grid, 2, seed + 1, 4.0).scaled(amp);
    let d_hat = default_d_hat(2);
    let mut d = constant_director(grid, &d_hat);
    d.axpy(amp, &synth::random_smooth(grid, 2, seed + 2, 4.0)).unwrap();
    let d = renormalize_director(&d).unwrap();
    FlowState::new(b, u, d, 0.0).unwrap()
}

#[test]
fn model_params_validation() {
    assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, PressureLaw::Linear).is_err());
    assert!(ModelParams::new(0.5, -2.0, 1.0, 1.0, 1.0, PressureLaw::Linear).is_err());
    assert!(ModelParams::new(0.5, 0.0, 1.0, 1.0, 2.0, PressureLaw::Linear).is_err());
    assert!(ModelParams::new(0.5, 0.0, 1.0, 1.0, 1.0, PressureLaw::Gamma(0.8)).is_err());
    let p = params(1.0, PressureLaw::Gamma(1.4));
    assert!((p.nu() - 1.25).abs() < 1e-15);
    assert!((p.nu_lower() - 0.5).abs() < 1e-15);
}

#[test]
fn pressure_law_identities() {
    let linear = PressureLaw::Linear;
    let gamma2 = PressureLaw::Gamma(2.0);
    let gamma = PressureLaw::Gamma(1.4);
    for b in [-0.4, -0.01, 0.0, 0.3, 1.2] {
        // linear law: K(b) = I(b) = b/(1+b)
        assert!((linear.k(b) - b / (1.0 + b)).abs() <= 1e-15);
        // gamma = 2 degenerates: P'(rho)/rho = 1
        assert!(gamma2.k(b).abs() <= 1e-15);
        assert!(gamma2.k_eps(b, 0.25).abs() <= 1e-15);
    }
    assert_eq!(gamma.k(0.0), 0.0);
    // k_eps stays accurate for tiny eps*b (the naive form would cancel)
    let eps = 1e-8;
    let b = 0.3;
    let expected = -(1.4 - 2.0) * b; // K(z)/eps -> K'(0) b as eps -> 0
    assert!((gamma.k_eps(b, eps) - expected).abs() <= 1e-6 * expected.abs());
    assert!((gamma.k_prime_zero() - 0.6).abs() <= 1e-15);
    assert!((linear.k_prime_zero() - 1.0).abs() <= 1e-15);
}

#[test]
fn pressure_coeffs_respect_the_positivity_guard() {
    let grid = grid_2d(32);
    let p = params(1.0, PressureLaw::Linear);
    // constant b = -0.95 drives 1 + eps b below the 0.1 floor
    let b = SpectralField::from_fn(grid, 1, |_, _| -0.95);
    match pressure_coeffs(&b, &p, 0.3) {
        Err(Error::PositivityGuard { time, min_density }) => {
            assert_eq!(time, 0.3);
            assert!(min_density < 0.1);
        }
        other => panic!("expected a positivity guard trip, got {other:?}"),
    }
    // small data passes and K = I for the linear law
    let b = synth::random_smooth(grid, 1, 4, 4.0).scaled(0.05);
    let (k, i, keps) = pressure_coeffs(&b, &p, 0.0).unwrap();
    assert!((&k - &i).l2_norm() <= 1e-12 * k.l2_norm().max(1e-30));
    assert!(keps.is_finite());
}

#[test]
fn zero_state_has_zero_tendency() {
    let grid = grid_2d(32);
    let p = params(0.5, PressureLaw::Gamma(2.0));
    let state = FlowState::new(
        SpectralField::zeros(grid, 1),
        SpectralField::zeros(grid, 2),
        constant_director(grid, &default_d_hat(2)),
        0.0,
    )
    .unwrap();
    let t = rhs_compressible(&state, &p).unwrap();
    assert_eq!(t.db.l2_norm(), 0.0);
    assert_eq!(t.du.l2_norm(), 0.0);
    assert_eq!(t.dd.l2_norm(), 0.0);
    let ti = rhs_incompressible(&state, &p).unwrap();
    assert_eq!(ti.du.l2_norm(), 0.0);
    assert_eq!(ti.dd.l2_norm(), 0.0);
}

#[test]
fn uniform_director_drops_all_elastic_terms() {
    let grid = grid_2d(32);
    let p = params(1.0, PressureLaw::Linear);
    let b = synth::random_smooth(grid, 1, 21, 4.0).scaled(0.05);
    let u = synth::random_smooth(grid, 2, 22, 4.0).scaled(0.05);
    let d = constant_director(grid, &default_d_hat(2));
    let state = FlowState::new(b.clone(), u.clone(), d, 0.0).unwrap();
    let t = rhs_compressible(&state, &p).unwrap();
    // director tendency vanishes: grad d = 0 kills advection and |grad d|^2 d
    assert_eq!(t.dd.l2_norm(), 0.0);
    // xi must not enter: doubling it changes nothing
    let p2 = ModelParams { xi: 2.0 * p.xi, ..p };
    let t2 = rhs_compressible(&state, &p2).unwrap();
    assert!((&t.du - &t2.du).l2_norm() <= 1e-14 * t.du.l2_norm().max(1e-30));
}

#[test]
fn compressible_tendency_projects_onto_incompressible_one() {
    // b = 0, div u = 0: P(du_comp) recovers the incompressible tendency and
    // the director tendencies agree identically
    let grid = grid_2d(64);
    let p = params(0.25, PressureLaw::Gamma(1.4));
    let (u, _) = synth::random_smooth(grid, 2, 31, 4.0).scaled(0.1).leray_decompose().unwrap();
    let d_hat = default_d_hat(2);
    let mut d = constant_director(grid, &d_hat);
    d.axpy(0.1, &synth::random_smooth(grid, 2, 32, 4.0)).unwrap();
    let d = renormalize_director(&d).unwrap();
    let state =
        FlowState::new(SpectralField::zeros(grid, 1), u.clone(), d.clone(), 0.0).unwrap();

    let tc = rhs_compressible(&state, &p).unwrap();
    let ti = rhs_incompressible(&state, &p).unwrap();
    let (proj, _) = tc.du.leray_decompose().unwrap();
    let rel = (&proj - &ti.du).l2_norm() / ti.du.l2_norm();
    assert!(rel <= 1e-10, "projected compressible tendency differs: {rel}");
    assert!((&tc.dd - &ti.dd).l2_norm() <= 1e-12 * ti.dd.l2_norm());
}

#[test]
fn incompressible_tendency_is_divergence_free() {
    let grid = grid_2d(64);
    let p = params(1.0, PressureLaw::Linear);
    let state = small_state(grid, 40, 0.1);
    let (div_free_u, _) = state.u.leray_decompose().unwrap();
    let state = FlowState::new(state.b, div_free_u, state.d, 0.0).unwrap();
    let t = rhs_incompressible(&state, &p).unwrap();
    assert!(t.du.divergence().unwrap().l2_norm() <= 1e-12 * t.du.l2_norm().max(1e-30));
}

#[test]
fn taylor_green_with_uniform_director_is_classical() {
    // du = P(-u . grad u), assembled here independently mode by mode
    let grid = Grid::new(2, 64, 2.0 * PI, 2.0 / 3.0).unwrap();
    let p = params(1.0, PressureLaw::Linear);
    let u = SpectralField::from_fn(grid, 2, |c, x| {
        if c == 0 {
            x[0].cos() * x[1].sin()
        } else {
            -x[0].sin() * x[1].cos()
        }
    });
    let d = constant_director(grid, &default_d_hat(2));
    let state = FlowState::new(SpectralField::zeros(grid, 1), u.clone(), d, 0.0).unwrap();
    let t = rhs_incompressible(&state, &p).unwrap();

    let advect = |c: usize| {
        let ux = u.component_field(0).to_physical();
        let uy = u.component_field(1).to_physical();
        let dx = u.component_field(c).derivative(0).to_physical();
        let dy = u.component_field(c).derivative(1).to_physical();
        let vals: Vec<f64> =
            (0..grid.len()).map(|i| -(ux[i] * dx[i] + uy[i] * dy[i])).collect();
        SpectralField::from_physical(grid, 1, &vals).unwrap().dealiased()
    };
    let manual = SpectralField::stack(&[advect(0), advect(1)]).unwrap();
    let (manual_proj, _) = manual.leray_decompose().unwrap();
    assert!((&t.du - &manual_proj).l2_norm() <= 1e-12 * manual_proj.l2_norm().max(1e-30));
}

#[test]
fn pure_director_forcing_matches_manual_assembly() {
    let grid = grid_2d(64);
    let p = params(1.0, PressureLaw::Linear);
    let d_hat = default_d_hat(2);
    let mut d = constant_director(grid, &d_hat);
    d.axpy(0.2, &synth::random_smooth(grid, 2, 55, 3.0)).unwrap();
    let d = renormalize_director(&d).unwrap();
    let state =
        FlowState::new(SpectralField::zeros(grid, 1), SpectralField::zeros(grid, 2), d.clone(), 0.0)
            .unwrap();
    let t = rhs_incompressible(&state, &p).unwrap();

    // manual: -xi P div(grad d (.) grad d)
    let len = grid.len();
    let gd: Vec<Vec<f64>> = (0..2).map(|a| d.derivative(a).to_physical()).collect();
    let mut cols = Vec::new();
    for c in 0..2 {
        let mut acc = SpectralField::zeros(grid, 1);
        for a in 0..2 {
            let vals: Vec<f64> = (0..len)
                .map(|i| (0..2).map(|k| gd[a][k * len + i] * gd[c][k * len + i]).sum())
                .collect();
            let s = SpectralField::from_physical(grid, 1, &vals).unwrap().dealiased();
            acc.axpy(1.0, &s.derivative(a)).unwrap();
        }
        cols.push(acc);
    }
    let div_s = SpectralField::stack(&cols).unwrap();
    let (proj, _) = div_s.leray_decompose().unwrap();
    let expected = proj.scaled(-p.xi);
    assert!((&t.du - &expected).l2_norm() <= 1e-12 * expected.l2_norm());
}

/// RK4 integration of the 2x2 mode ODE, columns give the fundamental matrix.
fn brute_force_block(k: f64, eps: f64, nu: f64, t: f64, steps: usize) -> [f64; 4] {
    let a = k / eps;
    let c = nu * k * k;
    let rhs = |y: [f64; 2]| [-a * y[1], a * y[0] - c * y[1]];
    let mut out = [0.0; 4];
    for (col, init) in [[1.0, 0.0], [0.0, 1.0]].iter().enumerate() {
        let mut y = *init;
        let h = t / steps as f64;
        for _ in 0..steps {
            let k1 = rhs(y);
            let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        out[col] = y[0];
        out[col + 2] = y[1];
    }
    out
}

#[test]
fn inviscid_block_is_a_rotation() {
    let (k, eps, t) = (3.0, 0.25, 0.7);
    let m = acoustic_block(k, eps, 0.0, t);
    let angle = k * t / eps;
    assert!((m[0] - angle.cos()).abs() <= 1e-13);
    assert!((m[1] + angle.sin()).abs() <= 1e-13);
    assert!((m[2] - angle.sin()).abs() <= 1e-13);
    assert!((m[3] - angle.cos()).abs() <= 1e-13);
    // energy conserved
    let det = m[0] * m[3] - m[1] * m[2];
    assert!((det - 1.0).abs() <= 1e-13);
}

#[test]
fn halving_eps_doubles_the_phase() {
    let (k, t) = (2.0, 0.31);
    let m_half = acoustic_block(k, 0.5, 0.0, t);
    let m_double_time = acoustic_block(k, 1.0, 0.0, 2.0 * t);
    for i in 0..4 {
        assert!((m_half[i] - m_double_time[i]).abs() <= 1e-13);
    }
}

#[test]
fn viscous_block_matches_ode_oracle() {
    // eigenvalues -nu k^2/2 +- sqrt((nu k^2/2)^2 - k^2/eps^2); the reference
    // is a brute-force mode integration
    for (k, eps, nu, t) in [
        (1.0, 1.0, 3.0, 0.8),    // oscillatory branch
        (4.0, 1.0, 3.0, 0.3),    // overdamped branch
        (1.0, 0.5, 4.0, 0.5),    // near critical: nu k = 2/eps
        (2.0, 0.125, 0.7, 0.4),  // fast oscillation
    ] {
        let exact = acoustic_block(k, eps, nu, t);
        let oracle = brute_force_block(k, eps, nu, t, 1_000_000);
        for i in 0..4 {
            assert!(
                (exact[i] - oracle[i]).abs() <= 1e-9,
                "block mismatch at k={k} eps={eps} nu={nu}: {exact:?} vs {oracle:?}"
            );
        }
    }
}

#[test]
fn free_acoustic_evolution_conserves_energy() {
    let grid = grid_2d(32);
    let b0 = synth::random_smooth(grid, 1, 61, 4.0);
    let v0 = synth::random_smooth(grid, 1, 62, 4.0);
    let e0 = b0.l2_norm().powi(2) + v0.l2_norm().powi(2);
    let (b, v) = acoustic_propagate(&b0, &v0, 0.25, 0.0, 0.9, None).unwrap();
    let e1 = b.l2_norm().powi(2) + v.l2_norm().powi(2);
    assert!((e1 - e0).abs() <= 1e-12 * e0);
}

#[test]
fn duhamel_forcing_reduces_to_linear_growth_on_zero_mode() {
    // b' = F with constant F and no coupling at k = 0: b(t) = t F
    let grid = grid_2d(16);
    let b0 = SpectralField::zeros(grid, 1);
    let v0 = SpectralField::zeros(grid, 1);
    let f = SpectralField::from_fn(grid, 1, |_, _| 2.0);
    let g = SpectralField::zeros(grid, 1);
    let times: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
    let forcing = critlab_core::acoustic::AcousticForcing {
        times: times.clone(),
        f: vec![f.clone(); 5],
        g: vec![g.clone(); 5],
    };
    let (b, _) = acoustic_propagate(&b0, &v0, 1.0, 0.0, 1.0, Some(&forcing)).unwrap();
    assert!((b.mean(0) - 2.0).abs() <= 1e-12);
}

#[test]
fn renormalization_examples() {
    let grid = grid_2d(32);
    let d_hat = default_d_hat(2);
    // exactly unit field is a fixed point
    let d = constant_director(grid, &d_hat);
    let r = renormalize_director(&d).unwrap();
    assert!((&r - &d).l2_norm() <= 1e-14);
    // 1.1 * d_hat maps back to d_hat
    let stretched = d.clone().scaled(1.1);
    let r = renormalize_director(&stretched).unwrap();
    assert!((&r - &d).l2_norm() <= 1e-13);
    // a degenerate director aborts
    let tiny = d.scaled(0.2);
    assert!(matches!(renormalize_director(&tiny), Err(Error::DirectorDegenerate { .. })));
}

#[test]
fn limit_diagnostics_and_gradient_invariance() {
    let grid = grid_2d(32);
    let state = {
        let s = small_state(grid, 70, 0.1);
        let (div_free, _) = s.u.leray_decompose().unwrap();
        FlowState::new(s.b, div_free, s.d, s.t).unwrap()
    };
    let incomp = state.clone();
    let diag = compute_limit_diagnostics(&state, &incomp, 1e-9).unwrap();
    // identical states: w and dbar vanish, Qu is the gradient part of u
    assert!(diag.w.l2_norm() <= 1e-13);
    assert!(diag.dbar.l2_norm() <= 1e-13);

    // adding a gradient to u_eps leaves w unchanged and lands in Qu
    let extra = synth::random_smooth(grid, 1, 71, 4.0).gradient().unwrap();
    let mut shifted = state.clone();
    shifted.u.axpy(1.0, &extra).unwrap();
    let diag2 = compute_limit_diagnostics(&shifted, &incomp, 1e-9).unwrap();
    assert!((&diag2.w - &diag.w).l2_norm() <= 1e-12 * diag2.qu.l2_norm());
    assert!(
        (&(&diag2.qu - &diag.qu) - &extra).l2_norm() <= 1e-12 * extra.l2_norm()
    );

    // time mismatch rejected
    let mut late = incomp;
    late.t = 1.0;
    assert!(matches!(
        compute_limit_diagnostics(&state, &late, 1e-9),
        Err(Error::TimeMismatch { .. })
    ));
}

#[test]
fn rescaling_is_identity_at_eps_one_and_rejects_non_dyadic() {
    let grid = grid_2d(32);
    let state = small_state(grid, 80, 0.1);
    let same = rescale_state(&state, 1.0).unwrap();
    assert!((&same.b - &state.b).l2_norm() <= 1e-15);
    assert_eq!(same.grid(), state.grid());
    assert!(rescale_state(&state, 0.3).is_err());
}

#[test]
fn rescaled_norms_obey_the_dilation_law() {
    // || f(eps x) ||_{B^s_{p,1}} = eps^{s - N/p} || f || for dyadic eps, up
    // to partition-edge effects
    let grid = grid_2d(64);
    let part = DyadicPartition::new(grid).unwrap();
    let state = {
        let b = synth::random_band_limited(grid, 1, 90, 4.0, 16.0);
        let u = synth::random_band_limited(grid, 2, 91, 4.0, 16.0);
        let d = constant_director(grid, &default_d_hat(2));
        FlowState::new(b, u, d, 0.25).unwrap()
    };
    let eps = 0.25;
    let scaled = rescale_state(&state, eps).unwrap();
    assert!((scaled.t - state.t / (eps * eps)).abs() <= 1e-15);
    let part_scaled = DyadicPartition::new(*scaled.grid()).unwrap();
    for (s, p) in [(0.5f64, 2.0f64), (1.0, 2.0)] {
        let idx = BesovIndex::new(s, p, 1.0).unwrap();
        let before = besov_norm(&part, &state.b, idx).unwrap();
        let after = besov_norm(&part_scaled, &scaled.b, idx).unwrap();
        // extra factor eps from the amplitude scaling of b
        let predicted = eps * eps.powf(s - 2.0 / p) * before;
        assert!(
            (after / predicted - 1.0).abs() <= 0.05,
            "dilation law violated: {after} vs {predicted}"
        );
    }
}

#[test]
fn time_rescaled_trajectory_norm_obeys_the_space_time_law() {
    // || f(l^a t, l^b x) ||_{L^r_T(B^s_{p,1})} = l^{b(s - N/p) - a/r} || f ||_{L^r_{l^a T}}
    // realized with l = eps, a = 2, b = 1 on a synthetic trajectory
    let grid = grid_2d(64);
    let part = DyadicPartition::new(grid).unwrap();
    let eps = 0.5;
    let (s, p, r) = (0.5, 2.0, 2.0);
    let idx = BesovIndex::new(s, p, 1.0).unwrap();

    let times: Vec<f64> = (0..9).map(|i| i as f64 * 0.125).collect();
    let states: Vec<FlowState> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let b = synth::random_band_limited(grid, 1, 300 + i as u64, 4.0, 16.0)
                .scaled(1.0 + t);
            FlowState::new(
                b,
                SpectralField::zeros(grid, 2),
                constant_director(grid, &default_d_hat(2)),
                t,
            )
            .unwrap()
        })
        .collect();

    // original L^r norm over [0, T]
    let values: Vec<f64> = states
        .iter()
        .map(|st| besov_norm(&part, &st.b, idx).unwrap())
        .collect();
    let original = time_lp(&times, &values, r);

    // rescaled trajectory lives on [0, T/eps^2] on the larger box
    let rescaled: Vec<FlowState> =
        states.iter().map(|st| rescale_state(st, eps).unwrap()).collect();
    let part_scaled = DyadicPartition::new(*rescaled[0].grid()).unwrap();
    let times_scaled: Vec<f64> = rescaled.iter().map(|st| st.t).collect();
    let values_scaled: Vec<f64> = rescaled
        .iter()
        .map(|st| besov_norm(&part_scaled, &st.b, idx).unwrap())
        .collect();
    let transformed = time_lp(&times_scaled, &values_scaled, r);

    // amplitude factor eps, dilation factor eps^{s - N/p}, time factor eps^{-2/r}
    let predicted = eps * eps.powf(s - 2.0 / p) * eps.powf(-2.0 / r) * original;
    assert!(
        (transformed / predicted - 1.0).abs() <= 0.05,
        "space-time scaling violated: {transformed} vs {predicted}"
    );
}

#[test]
fn strichartz_exponent_bookkeeping() {
    // gamma(q) = (N-1)(1/2 - 1/q)
    assert!((StrichartzExponents::gamma(6.0, 2) - 1.0 / 3.0).abs() <= 1e-15);
    assert!((StrichartzExponents::gamma(4.0, 3) - 0.5).abs() <= 1e-15);
    // admissible in 3D: p = 4, r = 4 (2/r = 1/2 <= gamma(4) = 1/2)
    let ok = StrichartzExponents { s: 0.5, p: 4.0, r: 4.0, p_bar: 2.0, r_bar: f64::INFINITY };
    assert!(ok.admissible(3));
    // the excluded endpoint (r, p, N) = (2, inf, 3)
    let endpoint =
        StrichartzExponents { s: 0.5, p: f64::INFINITY, r: 2.0, p_bar: 2.0, r_bar: f64::INFINITY };
    assert!(!endpoint.admissible(3));
    // duals
    assert_eq!(StrichartzExponents::dual(f64::INFINITY), 1.0);
    assert_eq!(StrichartzExponents::dual(1.0), f64::INFINITY);
    assert!((StrichartzExponents::dual(4.0) - 4.0 / 3.0).abs() <= 1e-15);
    // measured regularity s + N(1/p - 1/2) + 1/r
    assert!((ok.measured_regularity(3) - (0.5 + 3.0 * (0.25 - 0.5) + 0.25)).abs() <= 1e-15);
}

#[test]
fn theorem_rate_exponents() {
    assert!((theorem_rate_exponent(3, 4.0) - 0.25).abs() <= 1e-15);
    assert!((theorem_rate_exponent(2, 6.0) - 1.0 / 6.0).abs() <= 1e-15);
    assert!((theorem_rate_exponent(4, 8.0) - 0.5).abs() <= 1e-15);
    assert!((p_critical(4) - 6.0).abs() <= 1e-15);
}
