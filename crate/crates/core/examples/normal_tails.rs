//! Normal distribution function deep in the tails, and the Gaussian
//! integral used by the crossing formulas.

use blowup_lab::{gaussian_exp_integral, log_std_normal_cdf, std_normal_cdf};

fn main() -> blowup_lab::Result<()> {
    println!("{:>8} {:>24} {:>22}", "z", "Phi(z)", "ln Phi(z)");
    for z in [-40.0, -20.0, -8.0, -1.0, 0.0, 1.0, 8.0] {
        let p = std_normal_cdf(z)?;
        println!("{z:>8} {:>24.17e} {:>22.15}", p.value(), log_std_normal_cdf(z));
    }

    // ∫_{-∞}^k exp(-(x² + 2x)) dx for a few upper limits.
    for k in [-3.0, 0.0, f64::INFINITY] {
        println!("k = {k:>4}: {:.15}", gaussian_exp_integral(1.0, 2.0, k)?);
    }
    Ok(())
}
