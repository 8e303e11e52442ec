//! Analytic explosion-time probabilities against simulation, for a
//! constant and an exponential initial value.

use blowup_lab::monte_carlo::{mc_blowup_cdf_curve, McConfig};
use blowup_lab::{blowup_cdf, InitialCondition, ModelParams, QuadratureConfig};

fn main() -> blowup_lab::Result<()> {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0)?;
    let config = McConfig {
        n_paths: 200_000,
        dt: 1e-2,
        seed: 1,
        bridge_correction: true,
    };
    let grid = [0.5, 1.0, 2.0];
    for g in [InitialCondition::constant(1.0)?, InitialCondition::exponential(1.0, 1.0)?] {
        println!("{g:?}");
        for sim in mc_blowup_cdf_curve(&grid, &params, &g, &config)? {
            let exact = blowup_cdf(sim.r, &params, &g, &QuadratureConfig::default())?;
            let z = (sim.estimate.value() - exact.probability.value()) / sim.std_error;
            println!(
                "  r = {}: analytic {:.6}, simulated {:.6} ± {:.6}, z = {z:+.2}",
                sim.r,
                exact.probability.value(),
                sim.estimate.value(),
                sim.std_error
            );
        }
    }
    Ok(())
}
