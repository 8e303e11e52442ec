//! Pathwise closed-form solution `L_t = (I^{1-p} - c1(p-1)t - c2(p-1)W_t)^{1/(1-p)}`.

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::paths::WienerPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathValue {
    Finite(f64),
    Exploded,
}

impl PathValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            PathValue::Finite(v) => Some(v),
            PathValue::Exploded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosionRecord {
    pub exploded: bool,
    /// Finite exactly when `exploded`.
    pub tau_estimate: f64,
    /// First grid index at which the path is marked exploded.
    pub crossing_index: Option<usize>,
}

impl ExplosionRecord {
    pub fn survived() -> Self {
        Self {
            exploded: false,
            tau_estimate: f64::INFINITY,
            crossing_index: None,
        }
    }

    pub fn exploded_at(tau: f64, index: Option<usize>) -> Self {
        Self {
            exploded: true,
            tau_estimate: tau,
            crossing_index: index,
        }
    }
}

/// Evaluates the solution along `w` until the base first drops to zero or
/// below; `tau_estimate` interpolates the base linearly between the two
/// bracketing grid points.
pub fn exact_solution_path(
    initial: f64,
    w: &WienerPath,
    params: &ModelParams,
) -> Result<(Vec<PathValue>, ExplosionRecord)> {
    if !(initial > 0.0 && initial.is_finite()) {
        return Err(Error::domain(format!(
            "initial value must be positive and finite, got {initial}"
        )));
    }
    let q = params.p() - 1.0;
    let start = initial.powf(-q);
    let grid = w.grid();
    let mut values = Vec::with_capacity(w.values().len());
    let mut previous = (0.0, start);
    for (k, &wk) in w.values().iter().enumerate() {
        let t = grid.time(k);
        let base = start - params.c1() * q * t - params.c2() * q * wk;
        if base <= 0.0 {
            let (t0, b0) = previous;
            let tau = if k == 0 { 0.0 } else { t0 + (t - t0) * b0 / (b0 - base) };
            values.resize(w.values().len(), PathValue::Exploded);
            return Ok((values, ExplosionRecord::exploded_at(tau, Some(k))));
        }
        values.push(PathValue::Finite(base.powf(-1.0 / q)));
        previous = (t, base);
    }
    Ok((values, ExplosionRecord::survived()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monte_carlo::paths::{sample_wiener, PathGrid};

    #[test]
    fn frozen_path_explodes_at_ode_time() {
        let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let grid = PathGrid::new(2.0, 0.01).unwrap();
        let w = WienerPath::new(grid, vec![0.0; grid.steps() + 1]).unwrap();
        let (values, rec) = exact_solution_path(1.0, &w, &params).unwrap();
        assert!(rec.exploded);
        assert!((rec.tau_estimate - 1.0).abs() < 1e-12);
        // 1/(1 - t) on the grid before t = 1.
        assert!((values[50].finite().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(values[100], PathValue::Exploded);
        assert!(values[99].finite().is_some());
        assert_eq!(rec.crossing_index, Some(100));
    }

    #[test]
    fn inversion_identity_before_explosion() {
        let params = ModelParams::new(0.7, 1.3, 2.5, 1.0).unwrap();
        let grid = PathGrid::new(3.0, 1e-3).unwrap();
        for idx in 0..20 {
            let w = sample_wiener(&grid, 11, idx);
            let initial = 0.8;
            let (values, rec) = exact_solution_path(initial, &w, &params).unwrap();
            let q = params.p() - 1.0;
            let want = initial.powf(-q);
            for (k, v) in values.iter().enumerate() {
                if let Some(l) = v.finite() {
                    let t = grid.time(k);
                    let got = l.powf(-q) + params.c1() * q * t + params.c2() * q * w.values()[k];
                    assert!(((got - want) / want).abs() < 1e-9);
                }
            }
            assert_eq!(rec.exploded, rec.tau_estimate.is_finite());
        }
    }

    #[test]
    fn rejects_nonpositive_initial() {
        let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let grid = PathGrid::new(1.0, 0.1).unwrap();
        let w = sample_wiener(&grid, 0, 0);
        assert!(exact_solution_path(0.0, &w, &params).is_err());
        assert!(exact_solution_path(-1.0, &w, &params).is_err());
    }
}
