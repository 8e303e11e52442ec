//! Globally adaptive 15-point Gauss–Kronrod quadrature on a union of panels.
//!
//! The caller supplies breakpoints (kinks or steps of the integrand); each
//! initial panel is refined by bisection, always splitting the panel with the
//! largest `|K15 - G7|` until the summed estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on live panels, independent of the depth limit.
const MAX_PANELS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Kronrod/Gauss pair on `[lo, hi]`; returns `(K15, |K15 - G7|)`.
pub fn gauss_kronrod_15<F>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    Ok((kronrod, (kronrod - gauss).abs()))
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// `breakpoints` must be sorted; zero-width panels are skipped. A panel at
/// depth `max_depth` is never split again. If the tolerance cannot be reached
/// the best estimate is returned inside [`Error::Convergence`].
pub fn integrate<F>(
    mut f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    max_depth: u32,
) -> Result<QuadratureOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    if breakpoints.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    if breakpoints.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("quadrature breakpoints must be sorted"));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }

    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };

    let mut live = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_15(&mut eval, w[0], w[1])?;
            live.push(Panel {
                lo: w[0],
                hi: w[1],
                value,
                error,
                depth: 0,
            });
        }
    }

    let mut running_error: f64 = live.iter().map(|p| p.error).sum();
    loop {
        if running_error <= abs_tol {
            // Re-sum to shed drift from the incremental updates.
            running_error = live.iter().chain(frozen.iter()).map(|p| p.error).sum();
            if running_error <= abs_tol {
                break;
            }
        }
        let worst = match live.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.depth >= max_depth
            || !(mid > worst.lo && mid < worst.hi)
            || live.len() + frozen.len() >= MAX_PANELS
        {
            frozen.push(worst);
            continue;
        }
        let (lv, le) = gauss_kronrod_15(&mut eval, worst.lo, mid)?;
        let (rv, re) = gauss_kronrod_15(&mut eval, mid, worst.hi)?;
        running_error += le + re - worst.error;
        for (lo, hi, value, error) in [(worst.lo, mid, lv, le), (mid, worst.hi, rv, re)] {
            live.push(Panel {
                lo,
                hi,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
    }

    let panels: Vec<Panel> = live.into_iter().chain(frozen).collect();
    let value = panels.iter().map(|p| p.value).sum();
    let error_estimate = panels.iter().map(|p| p.error).sum();
    if error_estimate > abs_tol {
        return Err(Error::Convergence {
            best_estimate: value,
            error_estimate,
        });
    }
    Ok(QuadratureOutcome {
        value,
        error_estimate,
        panels: panels.len(),
        evaluations,
    })
}
