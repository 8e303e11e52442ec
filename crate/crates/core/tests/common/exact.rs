//! Explosion times of the closed-form solution, judged on the grid plus a
//! hand-written bridge correction inside each step.

use blowup_lab::monte_carlo::rng::{path_rng, unit_uniform, StreamPurpose};
use blowup_lab::monte_carlo::{exact_solution_path, sample_wiener, PathGrid};
use blowup_lab::ModelParams;

/// Index of the first step `k` (ending at grid point `k`) on which the path
/// crosses, judging grid points by `clearance <= 0` and the inside of each
/// step by the bridge probability `exp(-2 d_{k-1} d_k / dt)`.
pub fn corrected_crossing(clearance: &[f64], dt: f64, seed: u64, idx: u64) -> Option<usize> {
    let mut rng = path_rng(seed, StreamPurpose::Uniform, idx);
    let u = unit_uniform(&mut rng);
    let mut survival = 1.0;
    for k in 1..clearance.len() {
        let (d0, d1) = (clearance[k - 1], clearance[k]);
        if d1 <= 0.0 {
            return Some(k);
        }
        survival *= 1.0 - (-2.0 * d0 * d1 / dt).exp();
        if survival < 1.0 - u {
            return Some(k);
        }
    }
    None
}

/// Bridge-corrected explosion times of the closed-form solution with
/// constant initial value, in W units `d = base / (c2 (p - 1))`.
pub fn exact_taus(initial: f64, params: &ModelParams, t_end: f64, dt: f64, n: u64, seed: u64) -> Vec<f64> {
    let grid = PathGrid::new(t_end, dt).unwrap();
    let q = params.p() - 1.0;
    (0..n)
        .map(|i| {
            let w = sample_wiener(&grid, seed, i);
            let (values, _) = exact_solution_path(initial, &w, params).unwrap();
            let clearance: Vec<f64> = values
                .iter()
                .map(|v| match v.finite() {
                    Some(l) => l.powf(-q) / (params.c2() * q),
                    None => 0.0,
                })
                .collect();
            match corrected_crossing(&clearance, grid.dt(), seed, i) {
                Some(k) => grid.time(k) - 0.5 * grid.dt(),
                None => f64::INFINITY,
            }
        })
        .collect()
}
