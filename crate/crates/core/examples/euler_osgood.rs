//! Adaptive-step Euler scheme for the stochastic Paris law with a constant
//! initial value.

use blowup_lab::monte_carlo::{euler_osgood_outcome, euler_osgood_path, EulerStatus, OsgoodScheme, StepRule};
use blowup_lab::ModelParams;

fn main() -> blowup_lab::Result<()> {
    // Without noise the scheme should approach the ODE blow-up time 1.
    for h in [1e-2, 1e-3, 1e-4] {
        let scheme = OsgoodScheme::new(1.0, 0.0, 2.0, h, StepRule::Proportional)?;
        let out = euler_osgood_outcome(1.0, &scheme, 0, 0, 10.0, 1e6)?;
        println!("deterministic, h = {h:e}: tau = {:.6} after {} steps", out.record.tau_estimate, out.steps);
    }

    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0)?;
    let scheme = OsgoodScheme::from_params(&params, 1e-3, StepRule::Proportional)?;
    let (trajectory, out) = euler_osgood_path(1.0, &scheme, 7, 0, 20.0, 1e6)?;
    println!("one noisy path: {:?} at t = {:.4}, {} points", out.status, out.final_time, trajectory.len());

    let n = 2000;
    let mut taus: Vec<f64> = (0..n)
        .filter_map(|i| {
            let out = euler_osgood_outcome(1.0, &scheme, 7, i, 20.0, 1e6).ok()?;
            (out.status == EulerStatus::Exploded).then_some(out.record.tau_estimate)
        })
        .collect();
    taus.sort_by(f64::total_cmp);
    let q = |level: f64| taus[(level * taus.len() as f64) as usize];
    println!(
        "{} of {n} paths exploded before t = 20; quartiles {:.3} {:.3} {:.3}",
        taus.len(),
        q(0.25),
        q(0.5),
        q(0.75)
    );
    Ok(())
}
