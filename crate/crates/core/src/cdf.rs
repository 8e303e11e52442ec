//! Distribution function of the explosion time `τ` under an anticipating
//! initial condition.
//!
//! `P(τ <= r) = ∫ P(W crosses R(·, x) on [0, r] | W_T = x) φ(0, T)(x) dx`: the
//! conditional probability is a pinned-bridge crossing of a falling line, and
//! the outer integral is computed in the standardised variable `x = √T u` with
//! adaptive Gauss–Kronrod panels split wherever `a(x) = 0` or `g` has a kink.

use crate::barrier::{bridge_crossing, BridgePin, Horizon, LinearBarrier};
use crate::error::{Error, Result};
use crate::model::{a_of_x, barrier_intercept, InitialCondition, ModelParams};
use crate::normal::{phi, std_normal_pdf, Probability};
use crate::quadrature;

/// Sub-intervals scanned per smooth piece when bracketing roots of `a(x)`.
const ROOT_SCAN_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Integration range in standard deviations of `W_T`.
    pub truncation_sigmas: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_refinements: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            truncation_sigmas: 8.0,
            abs_tol: 1e-9,
            max_refinements: 20,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_sigmas >= 4.0 && self.truncation_sigmas.is_finite()) {
            return Err(Error::domain(format!(
                "quad.sigmas must be at least 4, got {}",
                self.truncation_sigmas
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain(format!(
                "quad.tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::domain("quad.max_refinements must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BeforeT,
    AtT,
    AfterT,
}

impl Regime {
    pub fn of(r: f64, anticipation_time: f64) -> Self {
        if r < anticipation_time {
            Regime::BeforeT
        } else if r == anticipation_time {
            Regime::AtT
        } else {
            Regime::AfterT
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::BeforeT => "BEFORE_T",
            Regime::AtT => "AT_T",
            Regime::AfterT => "AFTER_T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub r: f64,
    pub probability: Probability,
    pub regime: Regime,
    pub quadrature_error: f64,
}

/// `P(W_t >= R(t, x) for some t in [0, r] | W_T = x)`.
pub fn conditional_crossing(
    x: f64,
    r: f64,
    params: &ModelParams,
    g: &InitialCondition,
) -> Result<Probability> {
    let intercept = barrier_intercept(x, params, g);
    if intercept.capped {
        return Ok(Probability::ZERO);
    }
    let barrier = LinearBarrier::minus(intercept.value, params.barrier_slope())?;
    let pin = BridgePin::new(params.anticipation_time(), x)?;
    bridge_crossing(&barrier, Horizon::new(r)?, &pin)
}

/// Sorted quadrature breakpoints in the standardised variable `u`: the ends
/// of the truncated range, kinks of `g`, and every bracketed root of `a`.
pub fn integrand_breakpoints(
    params: &ModelParams,
    g: &InitialCondition,
    truncation_sigmas: f64,
) -> Vec<f64> {
    let sd = params.anticipation_time().sqrt();
    let (lo, hi) = (-truncation_sigmas, truncation_sigmas);
    let mut pieces = vec![lo, hi];
    pieces.extend(
        g.breakpoints()
            .into_iter()
            .map(|x| x / sd)
            .filter(|&u| u > lo && u < hi),
    );
    pieces.sort_by(f64::total_cmp);
    pieces.dedup();

    let clearance = |u: f64| a_of_x(sd * u, params, g);
    let mut points = pieces.clone();
    for w in pieces.windows(2) {
        let step = (w[1] - w[0]) / ROOT_SCAN_STEPS as f64;
        let mut left = w[0];
        let mut left_positive = clearance(left) > 0.0;
        for k in 1..=ROOT_SCAN_STEPS {
            let right = if k == ROOT_SCAN_STEPS { w[1] } else { w[0] + step * k as f64 };
            let right_positive = clearance(right) > 0.0;
            if right_positive != left_positive {
                points.push(bisect_sign_change(&clearance, left, right, left_positive));
            }
            left = right;
            left_positive = right_positive;
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Near `r = T` the conditional probability moves from its `r = T` value
/// within a layer, around each root of `a`, whose width in `a` is `T√v`
/// before `T` and `√(r - T)` after it. Extra panel ends on a geometric
/// ladder keep the quadrature nodes from stepping over it.
fn refine_boundary_layers(points: &mut Vec<f64>, r: f64, t: f64) {
    let width = if r < t { t * (1.0 / r - 1.0 / t).sqrt() } else { (r - t).sqrt() };
    let width = width / t.sqrt();
    if !(width > 0.0 && width < 0.25) {
        return;
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    let interior: Vec<f64> = points[1..points.len() - 1].to_vec();
    for centre in interior {
        let mut offset = width / 4.0;
        while offset < 1.0 {
            for u in [centre - offset, centre + offset] {
                if u > lo && u < hi {
                    points.push(u);
                }
            }
            offset *= 4.0;
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
}

fn bisect_sign_change(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, lo_positive: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P(τ <= r)` for `r > 0`.
///
/// The reported error adds the Kronrod estimate and the Gaussian mass
/// outside the truncated range.
pub fn blowup_cdf(
    r: f64,
    params: &ModelParams,
    g: &InitialCondition,
    quad: &QuadratureConfig,
) -> Result<CdfPoint> {
    quad.validate()?;
    if !(r > 0.0) {
        return Err(Error::domain(format!("blow-up CDF needs r > 0, got {r}")));
    }
    let sd = params.anticipation_time().sqrt();
    let mut breakpoints = integrand_breakpoints(params, g, quad.truncation_sigmas);
    refine_boundary_layers(&mut breakpoints, r, params.anticipation_time());
    let tail_mass = 2.0 * phi(-quad.truncation_sigmas);
    let tol = (quad.abs_tol - tail_mass).max(0.5 * quad.abs_tol);
    let outcome = quadrature::integrate(
        |u| Ok(conditional_crossing(sd * u, r, params, g)?.value() * std_normal_pdf(u)),
        &breakpoints,
        tol,
        quad.max_refinements,
    )
    .map_err(|e| match e {
        Error::Convergence {
            best_estimate,
            error_estimate,
        } => Error::Convergence {
            best_estimate,
            error_estimate: error_estimate + tail_mass,
        },
        other => other,
    })?;
    Ok(CdfPoint {
        r,
        probability: Probability::checked(outcome.value, "blowup_cdf")?,
        regime: Regime::of(r, params.anticipation_time()),
        quadrature_error: outcome.error_estimate + tail_mass,
    })
}

/// Pointwise [`blowup_cdf`] over a strictly increasing grid. The outer error
/// rejects the grid itself; per-point failures are kept in place.
pub fn blowup_cdf_curve(
    r_grid: &[f64],
    params: &ModelParams,
    g: &InitialCondition,
    quad: &QuadratureConfig,
) -> Result<Vec<Result<CdfPoint>>> {
    quad.validate()?;
    if r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("r grid must be strictly increasing"));
    }
    Ok(r_grid
        .iter()
        .map(|&r| blowup_cdf(r, params, g, quad))
        .collect())
}
