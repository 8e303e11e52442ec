//! Uniform time grids and sampled Brownian paths on them.

use crate::error::{Error, Result};

use super::rng::{path_rng, standard_normal, StreamPurpose};

/// Largest number of steps a single path may take.
pub const MAX_GRID_STEPS: f64 = 1e8;

/// The grid `{0, dt, 2dt, ..., t_end}`; the last step is shortened when
/// `t_end` is not a multiple of `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    t_end: f64,
    dt: f64,
    steps: usize,
}

impl PathGrid {
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite() && dt > 0.0 && dt.is_finite()) {
            return Err(Error::domain(format!(
                "path grid needs finite t_end > 0 and dt > 0, got t_end = {t_end}, dt = {dt}"
            )));
        }
        if dt > t_end {
            return Err(Error::Resource(format!("dt = {dt} exceeds t_end = {t_end}")));
        }
        let ratio = t_end / dt;
        if ratio > MAX_GRID_STEPS {
            return Err(Error::Resource(format!(
                "t_end/dt = {ratio:e} exceeds the limit of {MAX_GRID_STEPS:e} steps"
            )));
        }
        // Tolerate representation error so that t_end = k*dt gives k steps.
        let steps = (ratio * (1.0 - 1e-12)).ceil() as usize;
        Ok(Self { t_end, dt, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|k| self.time(k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    grid: PathGrid,
    values: Vec<f64>,
}

impl WienerPath {
    /// `values[k]` is the path at `grid.time(k)`; `values[0]` must be 0.
    pub fn new(grid: PathGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.steps() + 1 {
            return Err(Error::domain(format!(
                "path has {} values for a grid of {} points",
                values.len(),
                grid.steps() + 1
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::domain("Brownian paths start at 0"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

pub fn sample_wiener(grid: &PathGrid, seed: u64, path_index: u64) -> WienerPath {
    let mut rng = path_rng(seed, StreamPurpose::Gaussian, path_index);
    let mut values = Vec::with_capacity(grid.steps() + 1);
    let mut w = 0.0;
    values.push(w);
    for k in 0..grid.steps() {
        let h = grid.time(k + 1) - grid.time(k);
        w += h.sqrt() * standard_normal(&mut rng);
        values.push(w);
    }
    WienerPath {
        grid: *grid,
        values,
    }
}

/// Brownian bridge from 0 to `pin_value` over the whole grid, built as
/// `W_t - (t/T) W_T + (t/T) x` from the free path with the same key.
pub fn sample_pinned_bridge(grid: &PathGrid, pin_value: f64, seed: u64, path_index: u64) -> Result<WienerPath> {
    if !pin_value.is_finite() {
        return Err(Error::domain(format!("pin value must be finite, got {pin_value}")));
    }
    let mut path = sample_wiener(grid, seed, path_index);
    let end = grid.t_end();
    let shift = path.terminal() - pin_value;
    for (k, v) in path.values.iter_mut().enumerate() {
        *v -= grid.time(k) / end * shift;
    }
    let last = path.values.len() - 1;
    path.values[last] = pin_value;
    Ok(path)
}
