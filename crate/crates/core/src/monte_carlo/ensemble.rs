//! Crossing-frequency ensembles for linear barriers, free or pinned, and for
//! the random barrier `R(t, W_T)` of the explosion time.
//!
//! Paths live on the union of the uniform `dt` grid with the requested
//! horizons and the pin time, so every horizon is a grid point. One set of
//! paths serves the whole horizon list. With a pin, `W_T` is drawn first and
//! the path is then generated forward as a Brownian bridge towards it, which
//! lets a path stop at its first crossing.

use rayon::prelude::*;

use crate::barrier::{BridgePin, LinearBarrier};
use crate::error::{Error, Result};
use crate::model::{barrier_intercept, InitialCondition, ModelParams};
use crate::normal::Probability;

use super::rng::{path_rng, standard_normal, unit_uniform, StreamPurpose};

pub const MIN_PATHS: u64 = 100;
/// Lattice points per path, matching the grid guard of [`super::PathGrid`].
pub const MAX_LATTICE_POINTS: f64 = 1e8;
/// `exp(-40)` is below any resolvable crossing frequency.
const BRIDGE_EXPONENT_CUTOFF: f64 = 40.0;
const PATHS_PER_TASK: u64 = 2048;
pub const THREADS_ENV: &str = "BLOWUP_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: u64,
    pub dt: f64,
    pub seed: u64,
    /// Also count crossings between grid points, each step being accepted
    /// with the bridge probability `exp(-2 d_i d_{i+1} / dt)`.
    pub bridge_correction: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: 1e-3,
            seed: 1,
            bridge_correction: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < MIN_PATHS {
            return Err(Error::domain(format!(
                "mc.paths must be at least {MIN_PATHS}, got {}",
                self.n_paths
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain(format!("mc.dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnsembleResult {
    pub r: f64,
    pub estimate: Probability,
    pub crossings: u64,
    pub n_paths: u64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub dt: f64,
}

impl PathEnsembleResult {
    fn from_count(r: f64, crossings: u64, config: &McConfig) -> Result<Self> {
        let n = config.n_paths;
        let p = crossings as f64 / n as f64;
        let std_error = (p * (1.0 - p) / n as f64).sqrt();
        Ok(Self {
            r,
            estimate: Probability::new(p)?,
            crossings,
            n_paths: n,
            std_error,
            ci95: ((p - 1.96 * std_error).max(0.0), (p + 1.96 * std_error).min(1.0)),
            seed: config.seed,
            dt: config.dt,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Conditioning {
    Free,
    /// `W_T ~ N(0, T)`, drawn before the path.
    Sampled { pin_time: f64 },
    Fixed { pin_time: f64, pin_value: f64 },
}

impl Conditioning {
    fn pin_time(&self) -> Option<f64> {
        match *self {
            Conditioning::Free => None,
            Conditioning::Sampled { pin_time } | Conditioning::Fixed { pin_time, .. } => Some(pin_time),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    two_over_h: f64,
    /// Pull towards the pin, `h / (T - t)`; 0 for free steps, 1 on arrival.
    pull: f64,
    sd: f64,
    /// Barrier minus its intercept at the end of the step.
    offset: f64,
}

#[derive(Debug)]
struct Lattice {
    #[allow(dead_code)] // inspected by tests
    times: Vec<f64>,
    steps: Vec<Step>,
    horizon_index: Vec<usize>,
}

fn validate_horizons(horizons: &[f64]) -> Result<()> {
    if horizons.is_empty() {
        return Err(Error::domain("at least one horizon is required"));
    }
    if let Some(r) = horizons.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::domain(format!("horizons must be positive and finite, got {r}")));
    }
    if horizons.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("horizons must be strictly increasing"));
    }
    Ok(())
}

impl Lattice {
    fn new(horizons: &[f64], dt: f64, pin_time: Option<f64>, line: impl Fn(f64) -> f64) -> Result<Self> {
        validate_horizons(horizons)?;
        let t_end = horizons[horizons.len() - 1];
        let ratio = t_end / dt;
        if ratio > MAX_LATTICE_POINTS {
            return Err(Error::Resource(format!(
                "horizon/dt = {ratio:e} exceeds the limit of {MAX_LATTICE_POINTS:e} steps"
            )));
        }
        // (time, exact anchor) pairs; anchors win over nearby grid points.
        let mut points: Vec<(f64, bool)> = Vec::with_capacity(ratio as usize + horizons.len() + 2);
        points.push((0.0, true));
        points.extend(horizons.iter().map(|&r| (r, true)));
        if let Some(t) = pin_time.filter(|&t| t < t_end) {
            points.push((t, true));
        }
        points.extend((1..=ratio.floor() as usize).map(|k| (k as f64 * dt, false)).filter(|p| p.0 < t_end));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let merge_gap = 1e-9 * dt;
        let mut times: Vec<f64> = Vec::with_capacity(points.len());
        let mut last_anchor = false;
        for (t, anchor) in points {
            match times.last_mut() {
                Some(last) if t - *last <= merge_gap => {
                    if anchor && !last_anchor {
                        *last = t;
                        last_anchor = true;
                    }
                }
                _ => {
                    times.push(t);
                    last_anchor = anchor;
                }
            }
        }
        let horizon_index = horizons
            .iter()
            .map(|r| times.partition_point(|t| t < r))
            .collect();
        let steps = times
            .windows(2)
            .map(|w| {
                let h = w[1] - w[0];
                let (pull, sd) = match pin_time {
                    Some(pin) if w[0] < pin => {
                        if w[1] >= pin {
                            (1.0, 0.0)
                        } else {
                            let remaining = pin - w[0];
                            (h / remaining, (h * (remaining - h) / remaining).sqrt())
                        }
                    }
                    _ => (0.0, h.sqrt()),
                };
                Step {
                    two_over_h: 2.0 / h,
                    pull,
                    sd,
                    offset: line(w[1]),
                }
            })
            .collect();
        Ok(Self {
            times,
            steps,
            horizon_index,
        })
    }
}

struct CrossingJob<'a> {
    lattice: &'a Lattice,
    conditioning: Conditioning,
    /// Barrier intercept as a function of the pinned value (`+inf` = never).
    intercept: &'a (dyn Fn(f64) -> f64 + Sync),
    config: McConfig,
}

impl CrossingJob<'_> {
    /// Lattice index at which the path is first counted as crossed.
    fn first_crossing(&self, path_index: u64) -> Option<usize> {
        let seed = self.config.seed;
        let mut rng = path_rng(seed, StreamPurpose::Gaussian, path_index);
        let x = match self.conditioning {
            Conditioning::Free => 0.0,
            Conditioning::Sampled { pin_time } => pin_time.sqrt() * standard_normal(&mut rng),
            Conditioning::Fixed { pin_value, .. } => pin_value,
        };
        let a = (self.intercept)(x);
        if a == f64::INFINITY {
            return None;
        }
        if !(a > 0.0) {
            return Some(0);
        }
        let mut w = 0.0;
        let mut d_prev = a;
        let mut survival = 1.0;
        let mut threshold = None;
        for (k, step) in self.lattice.steps.iter().enumerate() {
            w = if step.pull == 1.0 {
                x
            } else {
                w + step.pull * (x - w) + step.sd * standard_normal(&mut rng)
            };
            let d = a + step.offset - w;
            if d <= 0.0 {
                return Some(k + 1);
            }
            if self.config.bridge_correction {
                let exponent = d_prev * d * step.two_over_h;
                if exponent < BRIDGE_EXPONENT_CUTOFF {
                    survival *= -(-exponent).exp_m1();
                    let v = *threshold.get_or_insert_with(|| {
                        1.0 - unit_uniform(&mut path_rng(seed, StreamPurpose::Uniform, path_index))
                    });
                    if survival < v {
                        return Some(k + 1);
                    }
                }
            }
            d_prev = d;
        }
        None
    }

    /// Cumulative crossing counts at each horizon.
    fn run(&self) -> Result<Vec<u64>> {
        let n = self.config.n_paths;
        let m = self.lattice.horizon_index.len();
        let tasks = n.div_ceil(PATHS_PER_TASK);
        let histogram = in_pool(|| {
            (0..tasks)
                .into_par_iter()
                .map(|task| {
                    let mut local = vec![0u64; m];
                    let end = ((task + 1) * PATHS_PER_TASK).min(n);
                    for i in task * PATHS_PER_TASK..end {
                        if let Some(c) = self.first_crossing(i) {
                            let j = self.lattice.horizon_index.partition_point(|&h| h < c);
                            if j < m {
                                local[j] += 1;
                            }
                        }
                    }
                    local
                })
                .reduce(
                    || vec![0u64; m],
                    |mut acc, part| {
                        acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                        acc
                    },
                )
        })?;
        Ok(histogram
            .iter()
            .scan(0u64, |sum, &c| {
                *sum += c;
                Some(*sum)
            })
            .collect())
    }
}

/// Runs `f` in a pool sized by `BLOWUP_LAB_THREADS`, or the global pool.
fn in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => {
            let threads: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| Error::domain(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Resource(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn run_job(
    horizons: &[f64],
    conditioning: Conditioning,
    intercept: &(dyn Fn(f64) -> f64 + Sync),
    line: impl Fn(f64) -> f64,
    config: &McConfig,
) -> Result<Vec<PathEnsembleResult>> {
    config.validate()?;
    let lattice = Lattice::new(horizons, config.dt, conditioning.pin_time(), line)?;
    let job = CrossingJob {
        lattice: &lattice,
        conditioning,
        intercept,
        config: *config,
    };
    job.run()?
        .into_iter()
        .zip(horizons)
        .map(|(count, &r)| PathEnsembleResult::from_count(r, count, config))
        .collect()
}

/// Frequency of `W_t` reaching `barrier` by each horizon, for a free path or
/// for a bridge pinned at `pin`.
pub fn mc_barrier_crossing(
    barrier: &LinearBarrier,
    horizons: &[f64],
    pin: Option<&BridgePin>,
    config: &McConfig,
) -> Result<Vec<PathEnsembleResult>> {
    let a = barrier.intercept();
    let conditioning = match pin {
        None => Conditioning::Free,
        Some(pin) => Conditioning::Fixed {
            pin_time: pin.time(),
            pin_value: pin.value(),
        },
    };
    let b = *barrier;
    run_job(horizons, conditioning, &move |_| a, move |t| b.value_at(t) - a, config)
}

/// Simulated `P(τ <= r)` with `I = g(W_T)`.
pub fn mc_blowup_cdf(
    r: f64,
    params: &ModelParams,
    g: &InitialCondition,
    config: &McConfig,
) -> Result<PathEnsembleResult> {
    Ok(mc_blowup_cdf_curve(&[r], params, g, config)?[0])
}

/// [`mc_blowup_cdf`] over a strictly increasing grid, sharing one set of
/// paths between all points.
pub fn mc_blowup_cdf_curve(
    r_grid: &[f64],
    params: &ModelParams,
    g: &InitialCondition,
    config: &McConfig,
) -> Result<Vec<PathEnsembleResult>> {
    let intercept = |x: f64| {
        let i = barrier_intercept(x, params, g);
        if i.capped {
            f64::INFINITY
        } else {
            i.value
        }
    };
    let slope = params.barrier_slope();
    run_job(
        r_grid,
        Conditioning::Sampled {
            pin_time: params.anticipation_time(),
        },
        &intercept,
        move |t| -slope * t,
        config,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_paths: u64, dt: f64) -> McConfig {
        McConfig {
            n_paths,
            dt,
            seed: 42,
            bridge_correction: true,
        }
    }

    #[test]
    fn lattice_contains_anchors_exactly() {
        let l = Lattice::new(&[0.3, 0.5, 1.7], 0.1, Some(1.234), |t| t).unwrap();
        for t in [0.0, 0.3, 0.5, 1.234, 1.7] {
            assert!(l.times.contains(&t), "{t}");
        }
        assert_eq!(l.times.len(), 19);
        assert!(l.times.windows(2).all(|w| w[1] - w[0] > 1e-12));
        assert_eq!(l.horizon_index.iter().map(|&i| l.times[i]).collect::<Vec<_>>(), vec![0.3, 0.5, 1.7]);
        let arrive = l.times.iter().position(|&t| t == 1.234).unwrap();
        assert_eq!(l.steps[arrive - 1].pull, 1.0);
        assert_eq!(l.steps[arrive].pull, 0.0);
    }

    #[test]
    fn lattice_guards() {
        assert!(matches!(Lattice::new(&[1e3], 1e-6, None, |t| t), Err(Error::Resource(_))));
        assert!(Lattice::new(&[1.0, 0.5], 0.1, None, |t| t).is_err());
        assert!(Lattice::new(&[], 0.1, None, |t| t).is_err());
        // A horizon shorter than dt is still a lattice point.
        let l = Lattice::new(&[0.01], 0.1, None, |t| t).unwrap();
        assert_eq!(l.times, vec![0.0, 0.01]);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::default().validate().is_ok());
        assert!(cfg(99, 0.1).validate().is_err());
        assert!(cfg(100, 0.0).validate().is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let barrier = LinearBarrier::plus(1.0, 0.5).unwrap();
        let a = mc_barrier_crossing(&barrier, &[0.5, 1.0], None, &cfg(2000, 0.01)).unwrap();
        let b = mc_barrier_crossing(&barrier, &[0.5, 1.0], None, &cfg(2000, 0.01)).unwrap();
        assert_eq!(a, b);
        assert!(a[0].crossings <= a[1].crossings);
    }

    #[test]
    fn result_statistics() {
        let barrier = LinearBarrier::plus(0.5, 0.0).unwrap();
        let res = mc_barrier_crossing(&barrier, &[1.0], None, &cfg(10_000, 0.01)).unwrap()[0];
        let p = res.estimate.value();
        assert_eq!(p, res.crossings as f64 / 10_000.0);
        assert!((res.std_error - (p * (1.0 - p) / 1e4).sqrt()).abs() < 1e-15);
        assert!(res.ci95.0 <= p && p <= res.ci95.1);
        // P(max W >= 0.5 on [0,1]) = 2Φ(-0.5).
        assert!((p - 0.617_075_077_451_974_7).abs() < 4.0 * res.std_error);
    }

    #[test]
    fn correction_only_adds_crossings() {
        let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let g = InitialCondition::constant(1.0).unwrap();
        let mut c = cfg(5000, 0.05);
        let with = mc_blowup_cdf_curve(&[0.5, 1.0, 2.0], &params, &g, &c).unwrap();
        c.bridge_correction = false;
        let without = mc_blowup_cdf_curve(&[0.5, 1.0, 2.0], &params, &g, &c).unwrap();
        for (w, wo) in with.iter().zip(&without) {
            assert!(w.crossings >= wo.crossings);
        }
        assert!(with[0].crossings > without[0].crossings);
    }

    #[test]
    fn tiny_horizon_rarely_crosses() {
        let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let g = InitialCondition::constant(1.0).unwrap();
        let res = mc_blowup_cdf(1e-3, &params, &g, &cfg(1000, 1e-3)).unwrap();
        assert_eq!(res.crossings, 0);
    }

    #[test]
    fn pinned_bridge_reaches_its_pin() {
        // A barrier just above the pin is crossed by every path at the pin time
        // once it has fallen below the pinned value.
        let barrier = LinearBarrier::minus(1.0, 2.0).unwrap();
        let pin = BridgePin::new(1.0, 0.0).unwrap();
        let res = mc_barrier_crossing(&barrier, &[0.2, 1.0], Some(&pin), &cfg(1000, 0.01)).unwrap();
        assert_eq!(res[1].crossings, 1000);
        assert!(res[0].crossings < 1000);
    }

    #[test]
    fn nonpositive_intercept_is_immediate() {
        let barrier = LinearBarrier::plus(0.0, 1.0).unwrap();
        let res = mc_barrier_crossing(&barrier, &[0.1], None, &cfg(100, 0.01)).unwrap();
        assert_eq!(res[0].crossings, 100);
    }
}
