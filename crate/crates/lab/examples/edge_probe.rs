use critlab::experiments::strichartz::StrichartzConfig;
use critlab_core::acoustic::acoustic_propagate;
use critlab_core::{synth, Grid};

fn main() {
    let cfg = StrichartzConfig::defaults(3, 64);
    let grid = Grid::new(cfg.dim, cfg.n, cfg.box_length, 2.0 / 3.0).unwrap();
    let radius = cfg.support_fraction * cfg.box_length;
    let b0 = synth::random_compact(grid, 1, cfg.seed, radius, cfg.oscillation);
    let v0 = synth::random_compact(grid, 1, cfg.seed + 1, radius, cfg.oscillation);

    let frame_fraction = |b: &critlab_core::SpectralField, v: &critlab_core::SpectralField| {
        let len = grid.len();
        let l = grid.box_length();
        let c = 0.5 * l;
        let pb = b.to_physical();
        let pv = v.to_physical();
        let (mut tot, mut edge) = (0.0, 0.0);
        for i in 0..len {
            let x = grid.point(i);
            let e = pb[i] * pb[i] + pv[i] * pv[i];
            tot += e;
            if (0..grid.dim()).any(|a| (x[a] - c).abs() > 0.45 * l) {
                edge += e;
            }
        }
        edge / tot
    };
    println!("initial edge fraction: {:.3e}", frame_fraction(&b0, &v0));
    for eps in [0.25f64, 0.0625, 0.015625] {
        let t = cfg.horizon_fraction * cfg.box_length * eps;
        let (b, v) = acoustic_propagate(&b0, &v0, eps, 0.0, t, None).unwrap();
        println!("eps {eps}: edge fraction at T: {:.3e}", frame_fraction(&b, &v));
    }
}
