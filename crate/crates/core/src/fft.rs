//! Cached complex FFT plans and in-place multi-axis transforms.
//!
//! Coefficient convention: `forward` maps grid samples to Fourier-series
//! coefficients (division by `n^dim`), so a pure mode `exp(i k x)` carries a
//! unit coefficient; `inverse` is the unnormalized synthesis.

use crate::grid::Grid;
use crate::C64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<PlanPair> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PlanPair>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Transform every line of `data` along `axis` with the given plan.
fn transform_axis(data: &mut [C64], grid: &Grid, axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let len = grid.len();
    debug_assert_eq!(data.len(), len);

    // stride between consecutive entries of a line along `axis`
    let stride = n.pow((dim - 1 - axis) as u32);
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len().max(n)];

    if stride == 1 {
        for chunk in data.chunks_exact_mut(n) {
            fft.process_with_scratch(chunk, &mut scratch);
        }
        return;
    }

    let mut line = vec![C64::new(0.0, 0.0); n];
    let block = stride * n;
    for base in (0..len).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[start + i * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i, value) in line.iter().enumerate() {
                data[start + i * stride] = *value;
            }
        }
    }
}

/// Physical samples -> Fourier coefficients (normalized by `n^dim`).
pub fn forward(data: &mut [C64], grid: &Grid) {
    let pair = plans(grid.points_per_axis());
    for axis in 0..grid.dim() {
        transform_axis(data, grid, axis, &pair.forward);
    }
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Fourier coefficients -> physical samples.
pub fn inverse(data: &mut [C64], grid: &Grid) {
    let pair = plans(grid.points_per_axis());
    for axis in 0..grid.dim() {
        transform_axis(data, grid, axis, &pair.inverse);
    }
}
