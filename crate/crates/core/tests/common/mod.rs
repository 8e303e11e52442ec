//! Oracles shared by the integration tests. Nothing here calls the library's
//! own special functions; `exact` builds on its path sampler only.

#![allow(dead_code)]

pub mod exact;

use std::f64::consts::PI;

/// Φ(z) from `1/2 + φ(z) Σ z^{2n+1} / (2n+1)!!` (all terms positive for
/// z > 0) and the Laplace continued fraction for the upper tail.
pub fn phi_oracle(z: f64) -> f64 {
    if z.is_infinite() {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    if z.abs() <= 3.0 {
        let density = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        let mut term = z;
        let mut sum = z;
        let mut n = 1.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            term *= z * z / (2.0 * n + 1.0);
            sum += term;
            n += 1.0;
        }
        0.5 + density * sum
    } else if z > 0.0 {
        1.0 - upper_tail(z)
    } else {
        upper_tail(-z)
    }
}

/// `1 - Φ(z)` for z >= 3 by `φ(z) / (z + 1/(z + 2/(z + 3/(z + ...))))`.
pub fn upper_tail(z: f64) -> f64 {
    let ln_density = -0.5 * z * z - 0.5 * (2.0 * PI).ln();
    let mut frac = z;
    for k in (1..=400).rev() {
        frac = z + k as f64 / frac;
    }
    (ln_density - frac.ln()).exp()
}

/// Adaptive Simpson on `[lo, hi]`, started from `pieces` equal panels.
pub fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, pieces: usize, rel_tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn refine(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let h = (hi - lo) / pieces as f64;
    // A crude pass sets the absolute tolerance scale.
    let scale: f64 = (0..=4 * pieces).map(|i| f(lo + i as f64 * h / 4.0).abs()).fold(0.0, f64::max) * (hi - lo);
    (0..pieces)
        .map(|i| {
            let a = lo + i as f64 * h;
            let b = a + h;
            let m = 0.5 * (a + b);
            let (fa, fm, fb) = (f(a), f(m), f(b));
            let whole = h / 6.0 * (fa + 4.0 * fm + fb);
            refine(f, a, b, fa, fm, fb, whole, rel_tol * scale / pieces as f64, 40)
        })
        .sum()
}

/// Reflection-principle value `P(max_{[0,r]} (W_t - b t) >= a)` written out
/// by hand from the oracle Φ.
pub fn free_crossing_oracle(a: f64, b: f64, r: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    let s = r.sqrt();
    phi_oracle(-(a / s + b * s)) + (-2.0 * a * b).exp() * phi_oracle(b * s - a / s)
}

/// `z` for a count against a reference probability.
pub fn z_score(count: u64, n: u64, reference: f64) -> f64 {
    let p = count as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
    (p - reference) / se
}
