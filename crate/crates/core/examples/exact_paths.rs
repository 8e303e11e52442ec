//! A handful of solution paths from the closed form, with their explosion
//! times.

use blowup_lab::monte_carlo::{exact_solution_path, sample_wiener, PathGrid};
use blowup_lab::{InitialCondition, ModelParams};

fn main() -> blowup_lab::Result<()> {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0)?;
    let g = InitialCondition::exponential(1.0, 1.0)?;
    let grid = PathGrid::new(3.0, 1e-3)?;
    for path in 0..8 {
        let w = sample_wiener(&grid, 2024, path);
        // The initial value is read off the path at the anticipation time.
        let w_t = w.values()[(params.anticipation_time() / grid.dt()).round() as usize];
        let initial = g.eval(w_t);
        let (values, record) = exact_solution_path(initial, &w, &params)?;
        let last = values.iter().rev().find_map(|v| v.finite()).unwrap_or(initial);
        if record.exploded {
            println!("path {path}: I = {initial:.4}, explodes at {:.4} (last value {last:.3e})", record.tau_estimate);
        } else {
            println!("path {path}: I = {initial:.4}, finite on [0, 3], L_3 = {last:.4}");
        }
    }
    Ok(())
}
