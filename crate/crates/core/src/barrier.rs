//! Crossing probabilities of linear barriers by a standard Brownian motion,
//! free or pinned at a later time (Brownian bridge).
//!
//! Two sign conventions are in use: the free-motion results are stated for a
//! rising barrier `a + b t` ([`Orientation::Plus`]) and the bridge results for
//! `a - b t` ([`Orientation::Minus`]). [`LinearBarrier::to_plus`] and
//! [`LinearBarrier::to_minus`] convert between them.

use crate::error::{Error, Result};
use crate::normal::{exp_times_phi, phi, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Barrier `intercept + slope * t`.
    Plus,
    /// Barrier `intercept - slope * t`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBarrier {
    intercept: f64,
    slope: f64,
    orientation: Orientation,
}

impl LinearBarrier {
    pub fn new(intercept: f64, slope: f64, orientation: Orientation) -> Result<Self> {
        if !intercept.is_finite() || !slope.is_finite() {
            return Err(Error::domain(format!(
                "barrier intercept and slope must be finite, got ({intercept}, {slope})"
            )));
        }
        Ok(Self {
            intercept,
            slope,
            orientation,
        })
    }

    /// `a + b t`.
    pub fn plus(intercept: f64, slope: f64) -> Result<Self> {
        Self::new(intercept, slope, Orientation::Plus)
    }

    /// `a - b t`.
    pub fn minus(intercept: f64, slope: f64) -> Result<Self> {
        Self::new(intercept, slope, Orientation::Minus)
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Same line written as `a + b t`.
    pub fn to_plus(self) -> Self {
        match self.orientation {
            Orientation::Plus => self,
            Orientation::Minus => Self {
                slope: -self.slope,
                orientation: Orientation::Plus,
                ..self
            },
        }
    }

    /// Same line written as `a - b t`.
    pub fn to_minus(self) -> Self {
        match self.orientation {
            Orientation::Minus => self,
            Orientation::Plus => Self {
                slope: -self.slope,
                orientation: Orientation::Minus,
                ..self
            },
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self.orientation {
            Orientation::Plus => self.intercept + self.slope * t,
            Orientation::Minus => self.intercept - self.slope * t,
        }
    }

    fn expect(&self, orientation: Orientation, op: &str) -> Result<()> {
        if self.orientation == orientation {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{op} expects a {orientation:?} barrier, got {:?}; convert first",
                self.orientation
            )))
        }
    }
}

/// Conditioning `W_T = x` of a Brownian bridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgePin {
    time: f64,
    value: f64,
}

impl BridgePin {
    pub fn new(time: f64, value: f64) -> Result<Self> {
        if !(time > 0.0 && time.is_finite()) {
            return Err(Error::domain(format!("pin time must be positive, got {time}")));
        }
        if !value.is_finite() {
            return Err(Error::domain(format!("pin value must be finite, got {value}")));
        }
        Ok(Self { time, value })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Clearance `a - x - bT` between the barrier at the pin time and the pin value.
    fn clearance(&self, barrier: &LinearBarrier) -> f64 {
        barrier.intercept - self.value - barrier.slope * self.time
    }
}

/// Time horizon `r`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Horizon(f64);

impl Horizon {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("horizon must be positive, got {r}")));
        }
        Ok(Self(r))
    }

    pub fn infinite() -> Self {
        Self(f64::INFINITY)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// `P(W_t >= a + b t for some t >= 0)`: `exp(-2ab)` for `a, b > 0`, otherwise 1.
pub fn bm_crossing_infinite(barrier: &LinearBarrier) -> Result<Probability> {
    barrier.expect(Orientation::Plus, "bm_crossing_infinite")?;
    let (a, b) = (barrier.intercept, barrier.slope);
    if a > 0.0 && b > 0.0 {
        Probability::checked((-2.0 * a * b).exp(), "bm_crossing_infinite")
    } else {
        Ok(Probability::ONE)
    }
}

/// `P(W_t >= a + b t for some t in [0, r])` for finite `r`:
/// `1 - Φ(a/√r + b√r) + exp(-2ab) Φ(b√r - a/√r)` when `a > 0`, otherwise 1.
pub fn bm_crossing_finite(barrier: &LinearBarrier, horizon: Horizon) -> Result<Probability> {
    barrier.expect(Orientation::Plus, "bm_crossing_finite")?;
    if !horizon.is_finite() {
        return Err(Error::domain(
            "bm_crossing_finite needs a finite horizon; use bm_crossing_infinite",
        ));
    }
    let (a, b) = (barrier.intercept, barrier.slope);
    if a <= 0.0 {
        return Ok(Probability::ONE);
    }
    let sr = horizon.0.sqrt();
    let p = phi(-(a / sr + b * sr)) + exp_times_phi(-2.0 * a * b, b * sr - a / sr);
    Probability::checked(p, "bm_crossing_finite")
}

/// Bridge pinned at `W_T = x`, barrier `a - b t` over the whole of `[0, T]`:
/// `exp(-2a(a - x - bT)/T)` when `a > 0` and `a - bT > x`, otherwise 1.
pub fn bridge_crossing_at_pin(barrier: &LinearBarrier, pin: &BridgePin) -> Result<Probability> {
    barrier.expect(Orientation::Minus, "bridge_crossing_at_pin")?;
    let a = barrier.intercept;
    let c = pin.clearance(barrier);
    if a > 0.0 && c > 0.0 {
        Probability::checked((-2.0 * a * c / pin.time).exp(), "bridge_crossing_at_pin")
    } else {
        Ok(Probability::ONE)
    }
}

/// Bridge pinned at `W_T = x`, barrier `a - b t` over `[0, r]` with `r < T`.
///
/// With `v = 1/r - 1/T` and `c = a - x - bT`:
/// `1 - Φ(c/(T√v) + a√v) + exp(-2ac/T) Φ(c/(T√v) - a√v)` when `a > 0`.
pub fn bridge_crossing_before_pin(
    barrier: &LinearBarrier,
    horizon: Horizon,
    pin: &BridgePin,
) -> Result<Probability> {
    barrier.expect(Orientation::Minus, "bridge_crossing_before_pin")?;
    let (r, t_pin) = (horizon.0, pin.time);
    if !(r < t_pin) {
        return Err(Error::domain(format!(
            "bridge_crossing_before_pin needs r < T, got r = {r}, T = {t_pin}"
        )));
    }
    let a = barrier.intercept;
    if a <= 0.0 {
        return Ok(Probability::ONE);
    }
    let c = pin.clearance(barrier);
    // (T - r)/(rT) rather than 1/r - 1/T: no cancellation as r -> T.
    let sv = ((t_pin - r) / (r * t_pin)).sqrt();
    let z = c / (t_pin * sv);
    let p = phi(-(z + a * sv)) + exp_times_phi(-2.0 * a * c / t_pin, z - a * sv);
    Probability::checked(p, "bridge_crossing_before_pin")
}

/// Bridge pinned at `W_T = x`, barrier `a - b t` over `[0, r]` with `r > T`.
///
/// With `c = a - x - bT`, `s = r - T` and `E = exp(2cb)`, the result for
/// `a > 0`, `c > 0` is
/// `P_T [Φ(c/√s - b√s) - E Φ(-b√s - c/√s)] + 1 - Φ(c/√s - b√s) + E Φ(-b√s - c/√s)`
/// where `P_T = exp(-2ac/T)` is the whole-bridge crossing probability.
/// `c <= 0` gives 1, and so does `a <= 0`, since the barrier then starts at or
/// below `W_0 = 0`. An infinite horizon uses the infinite-horizon law on `[T, ∞)`.
pub fn bridge_crossing_after_pin(
    barrier: &LinearBarrier,
    horizon: Horizon,
    pin: &BridgePin,
) -> Result<Probability> {
    barrier.expect(Orientation::Minus, "bridge_crossing_after_pin")?;
    let (r, t_pin) = (horizon.0, pin.time);
    if !(r > t_pin) {
        return Err(Error::domain(format!(
            "bridge_crossing_after_pin needs r > T, got r = {r}, T = {t_pin}"
        )));
    }
    let (a, b) = (barrier.intercept, barrier.slope);
    let c = pin.clearance(barrier);
    if a <= 0.0 || c <= 0.0 {
        return Ok(Probability::ONE);
    }
    let log_whole = -2.0 * a * c / t_pin;
    if !horizon.is_finite() {
        // After T the motion restarts at x facing the line c - b u.
        if b >= 0.0 {
            return Ok(Probability::ONE);
        }
        let missed_both = log_whole.exp_m1() * (2.0 * c * b).exp_m1();
        return Probability::checked(1.0 - missed_both, "bridge_crossing_after_pin");
    }
    let ss = (r - t_pin).sqrt();
    let z_up = c / ss - b * ss;
    let z_down = -b * ss - c / ss;
    let p = exp_times_phi(log_whole, z_up) - exp_times_phi(log_whole + 2.0 * c * b, z_down)
        + phi(-z_up)
        + exp_times_phi(2.0 * c * b, z_down);
    Probability::checked(p, "bridge_crossing_after_pin")
}

/// Regime dispatch for a pinned bridge: `r < T`, `r = T`, `r > T`.
pub fn bridge_crossing(
    barrier: &LinearBarrier,
    horizon: Horizon,
    pin: &BridgePin,
) -> Result<Probability> {
    let r = horizon.0;
    if r < pin.time {
        bridge_crossing_before_pin(barrier, horizon, pin)
    } else if r == pin.time {
        bridge_crossing_at_pin(barrier, pin)
    } else {
        bridge_crossing_after_pin(barrier, horizon, pin)
    }
}
