//! Euler–Maruyama for `dX = b(X) dt + σ(X) dW` with step sizes chosen by the
//! Osgood test, so that the accumulated time converges to the blow-up time.
//!
//! `b(x) = c1 x^p + (p c2²/2) x^{2p-1}` and `σ(x) = c2 x^p`, with a
//! deterministic initial value.

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::exact::ExplosionRecord;
use super::rng::{path_rng, standard_normal, StreamPurpose};

pub const MIN_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `T_k = h / b(X_k)`: the drift moves `X` by exactly `h` per step.
    Drift,
    /// `T_k = h X_k / b(X_k)`: the drift moves `X` by the fraction `h`.
    Proportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerStatus {
    Exploded,
    /// Accumulated time reached `t_max` first.
    Survived,
    /// Noise pushed the state to zero or below; the path is censored.
    NonPositiveState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsgoodScheme {
    c1: f64,
    c2: f64,
    p: f64,
    h: f64,
    rule: StepRule,
    max_steps: u64,
}

impl OsgoodScheme {
    /// Unlike [`ModelParams`], `c2 = 0` is allowed.
    pub fn new(c1: f64, c2: f64, p: f64, h: f64, rule: StepRule) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::domain(format!("c1 must be positive, got {c1}")));
        }
        if !(c2 >= 0.0 && c2.is_finite()) {
            return Err(Error::domain(format!("c2 must be non-negative, got {c2}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("p must exceed 1, got {p}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!("h must be positive, got {h}")));
        }
        Ok(Self {
            c1,
            c2,
            p,
            h,
            rule,
            max_steps: 1_000_000_000,
        })
    }

    pub fn from_params(params: &ModelParams, h: f64, rule: StepRule) -> Result<Self> {
        Self::new(params.c1(), params.c2(), params.p(), h, rule)
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rule(&self) -> StepRule {
        self.rule
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerOutcome {
    pub record: ExplosionRecord,
    pub status: EulerStatus,
    pub steps: u64,
    pub final_state: f64,
    pub final_time: f64,
}

fn drive(
    initial: f64,
    scheme: &OsgoodScheme,
    seed: u64,
    path_index: u64,
    t_max: f64,
    blowup_threshold: f64,
    mut visit: impl FnMut(f64, f64),
) -> Result<EulerOutcome> {
    if !(initial > 0.0 && initial.is_finite()) {
        return Err(Error::domain(format!("initial value must be positive, got {initial}")));
    }
    if !(blowup_threshold >= MIN_BLOWUP_THRESHOLD) {
        return Err(Error::domain(format!(
            "blow-up threshold must be at least {MIN_BLOWUP_THRESHOLD:e}, got {blowup_threshold}"
        )));
    }
    if !(t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be positive, got {t_max}")));
    }
    let OsgoodScheme { c1, c2, p, h, rule, max_steps } = *scheme;
    let k2 = 0.5 * p * c2 * c2;
    let q = p - 1.0;
    let mut rng = path_rng(seed, StreamPurpose::Gaussian, path_index);
    let (mut x, mut t) = (initial, 0.0);
    visit(t, x);
    let finish = |status, x, t, steps| {
        let record = match status {
            EulerStatus::Exploded => ExplosionRecord::exploded_at(t, None),
            _ => ExplosionRecord::survived(),
        };
        Ok(EulerOutcome {
            record,
            status,
            steps,
            final_state: x,
            final_time: t,
        })
    };
    for step in 0..max_steps {
        let u = if q == 1.0 { x } else { x.powf(q) };
        // b(x) / x and σ(x) / x.
        let rate = c1 * u + k2 * u * u;
        let tk = match rule {
            StepRule::Drift => h / (x * rate),
            StepRule::Proportional => h / rate,
        };
        if t + tk > t_max {
            return finish(EulerStatus::Survived, x, t, step);
        }
        let mut next = x + tk * x * rate;
        if c2 > 0.0 {
            next += c2 * x * u * tk.sqrt() * standard_normal(&mut rng);
        }
        t += tk;
        if !next.is_finite() || !t.is_finite() {
            return Err(Error::Numeric(format!(
                "Euler state became {next} at step {step}, t = {t}, from x = {x} with T_k = {tk}"
            )));
        }
        x = next;
        visit(t, x);
        if x >= blowup_threshold {
            return finish(EulerStatus::Exploded, x, t, step + 1);
        }
        if x <= 0.0 {
            return finish(EulerStatus::NonPositiveState, x, t, step + 1);
        }
    }
    Err(Error::Resource(format!(
        "Euler path needed more than {max_steps} steps (t = {t}, x = {x})"
    )))
}

/// Runs one path and returns its `(t, X)` trajectory with the outcome.
pub fn euler_osgood_path(
    initial: f64,
    scheme: &OsgoodScheme,
    seed: u64,
    path_index: u64,
    t_max: f64,
    blowup_threshold: f64,
) -> Result<(Vec<(f64, f64)>, EulerOutcome)> {
    let mut trajectory = Vec::new();
    let outcome = drive(initial, scheme, seed, path_index, t_max, blowup_threshold, |t, x| {
        trajectory.push((t, x))
    })?;
    Ok((trajectory, outcome))
}

/// [`euler_osgood_path`] without keeping the trajectory.
pub fn euler_osgood_outcome(
    initial: f64,
    scheme: &OsgoodScheme,
    seed: u64,
    path_index: u64,
    t_max: f64,
    blowup_threshold: f64,
) -> Result<EulerOutcome> {
    drive(initial, scheme, seed, path_index, t_max, blowup_threshold, |_, _| {})
}
