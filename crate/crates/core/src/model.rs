//! Fatigue-equation constants, the anticipating initial condition `I = g(W_T)`
//! and the random linear barrier they induce on the driving Brownian motion.
//!
//! The crack length explodes exactly when `W_t` reaches
//! `R(t, x) = 1/(c2 (p-1) g(x)^{p-1}) - (c1/c2) t` with `x = W_T`.

use crate::error::{Error, Result};

/// Intercepts above this value are capped; the crossing probability is then 0
/// to working precision.
pub const INTERCEPT_CAP: f64 = 1e300;

/// Constants `c1`, `c2`, `p` of the stochastic Paris law and the time `T`
/// whose Brownian value fixes the initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    c1: f64,
    c2: f64,
    p: f64,
    anticipation_time: f64,
}

impl ModelParams {
    pub fn new(c1: f64, c2: f64, p: f64, anticipation_time: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("c1", c1)?;
        positive("c2", c2)?;
        positive("T", anticipation_time)?;
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::domain(format!(
                "p must exceed 1 (p <= 1 has global solutions), got {p}"
            )));
        }
        Ok(Self {
            c1,
            c2,
            p,
            anticipation_time,
        })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `T`.
    pub fn anticipation_time(&self) -> f64 {
        self.anticipation_time
    }

    /// Rate `c1/c2` at which the barrier falls.
    pub fn barrier_slope(&self) -> f64 {
        self.c1 / self.c2
    }

    /// Drift `c1 x^p + (p c2²/2) x^{2p-1}`.
    pub fn drift(&self, x: f64) -> f64 {
        self.c1 * x.powf(self.p) + 0.5 * self.p * self.c2 * self.c2 * x.powf(2.0 * self.p - 1.0)
    }

    /// Diffusion `c2 x^p`.
    pub fn diffusion(&self, x: f64) -> f64 {
        self.c2 * x.powf(self.p)
    }
}

/// Piecewise-linear positive function given by knots; constant outside.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotTable {
    knots: Vec<(f64, f64)>,
}

impl KnotTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::domain("table initial condition needs at least one knot"));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::domain(format!(
                    "table knots must be strictly increasing in x, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(x, y) in &knots {
            if !x.is_finite() || !(y > 0.0 && y.is_finite()) {
                return Err(Error::domain(format!(
                    "table knot ({x}, {y}) must have finite x and positive finite value"
                )));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 {
            return k[0].1;
        }
        if x >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(kx, _)| kx <= x);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// The positive Borel function `g` with `I = g(W_T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `g(x) = l0`: a deterministic initial crack length.
    Constant { l0: f64 },
    /// `g(x) = scale * exp(rate * x)`.
    Exponential { scale: f64, rate: f64 },
    /// `g(x) = max(slope * x + offset, floor)`.
    AffineClamped { slope: f64, offset: f64, floor: f64 },
    /// Linear interpolation between knots, constant extrapolation.
    Table(KnotTable),
}

impl InitialCondition {
    pub fn constant(l0: f64) -> Result<Self> {
        Self::Constant { l0 }.validated()
    }

    pub fn exponential(scale: f64, rate: f64) -> Result<Self> {
        Self::Exponential { scale, rate }.validated()
    }

    pub fn affine_clamped(slope: f64, offset: f64, floor: f64) -> Result<Self> {
        Self::AffineClamped {
            slope,
            offset,
            floor,
        }
        .validated()
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self::Table(KnotTable::new(knots)?))
    }

    pub fn validated(self) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be finite, got {v}")))
            }
        };
        match &self {
            Self::Constant { l0 } => positive("g.l0", *l0)?,
            Self::Exponential { scale, rate } => {
                positive("g.scale", *scale)?;
                finite("g.rate", *rate)?;
            }
            Self::AffineClamped {
                slope,
                offset,
                floor,
            } => {
                finite("g.slope", *slope)?;
                finite("g.offset", *offset)?;
                positive("g.floor", *floor)?;
            }
            Self::Table(t) => {
                KnotTable::new(t.knots.clone())?;
            }
        }
        Ok(self)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Constant { l0 } => *l0,
            Self::Exponential { scale, rate } => scale * (rate * x).exp(),
            Self::AffineClamped {
                slope,
                offset,
                floor,
            } => (slope * x + offset).max(*floor),
            Self::Table(t) => t.eval(x),
        }
    }

    /// `ln g(x)`, exact in log space for the exponential kind.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { scale, rate } => scale.ln() + rate * x,
            other => other.eval(x).ln(),
        }
    }

    /// Points where `g` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Constant { .. } | Self::Exponential { .. } => Vec::new(),
            Self::AffineClamped {
                slope,
                offset,
                floor,
            } => {
                if *slope != 0.0 {
                    vec![(floor - offset) / slope]
                } else {
                    Vec::new()
                }
            }
            Self::Table(t) => t.knots.iter().map(|k| k.0).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }
}

/// Barrier intercept `R(0, x)`, with a flag when it was capped at
/// [`INTERCEPT_CAP`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intercept {
    pub value: f64,
    pub capped: bool,
}

/// `R(0, x) = 1/(c2 (p-1) g(x)^{p-1})`, evaluated in log space.
pub fn barrier_intercept(x: f64, params: &ModelParams, g: &InitialCondition) -> Intercept {
    let ln_value = -(params.c2 * (params.p - 1.0)).ln() - (params.p - 1.0) * g.ln_eval(x);
    if ln_value > INTERCEPT_CAP.ln() {
        Intercept {
            value: INTERCEPT_CAP,
            capped: true,
        }
    } else {
        Intercept {
            value: ln_value.exp(),
            capped: false,
        }
    }
}

/// `a(x) = R(0, x) - x - c1 T / c2 = R(T, x) - x`: clearance of the barrier over
/// the pinned value at time `T`.
pub fn a_of_x(x: f64, params: &ModelParams, g: &InitialCondition) -> f64 {
    barrier_intercept(x, params, g).value - x - params.barrier_slope() * params.anticipation_time
}
