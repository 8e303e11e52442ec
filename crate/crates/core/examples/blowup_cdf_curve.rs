//! Distribution function of the explosion time when the initial value is
//! `exp(W_T)`, with the quadrature error of every point.

use blowup_lab::{blowup_cdf_curve, InitialCondition, ModelParams, QuadratureConfig};

fn main() -> blowup_lab::Result<()> {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0)?;
    let g = InitialCondition::exponential(1.0, 1.0)?;
    let grid: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
    println!("{:>6} {:>14} {:>9} {:>10}", "r", "P(tau <= r)", "regime", "error");
    for point in blowup_cdf_curve(&grid, &params, &g, &QuadratureConfig::default())? {
        let p = point?;
        println!(
            "{:>6.2} {:>14.10} {:>9} {:>10.2e}",
            p.r,
            p.probability.value(),
            p.regime.label(),
            p.quadrature_error
        );
    }
    Ok(())
}
