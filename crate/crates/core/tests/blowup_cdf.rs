mod common;

use blowup_lab::cdf::conditional_crossing;
use blowup_lab::monte_carlo::{mc_blowup_cdf_curve, McConfig};
use blowup_lab::*;
use common::{free_crossing_oracle, phi_oracle, simpson, z_score};
use proptest::prelude::*;

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// `P(τ <= r)` for constant initial value: the free crossing of
/// `W_t >= A - (c1/c2) t`.
fn constant_oracle(r: f64, params: &ModelParams, l0: f64) -> f64 {
    let big_a = 1.0 / (params.c2() * (params.p() - 1.0) * l0.powf(params.p() - 1.0));
    free_crossing_oracle(big_a, -params.barrier_slope(), r)
}

/// Conditional crossing for `r <= T` written out by hand, integrated against
/// the law of `W_T` with adaptive Simpson.
fn integrated_oracle(r: f64, params: &ModelParams, g: &dyn Fn(f64) -> f64) -> f64 {
    let t = params.anticipation_time();
    let b = params.barrier_slope();
    let conditional = |x: f64| {
        let a = 1.0 / (params.c2() * (params.p() - 1.0) * g(x).powf(params.p() - 1.0));
        let c = a - x - b * t;
        if r >= t {
            return if c <= 0.0 { 1.0 } else { (-2.0 * a * c / t).exp() };
        }
        let v = (1.0 / r - 1.0 / t).sqrt();
        1.0 - phi_oracle(c / (t * v) + a * v)
            + (-2.0 * a * c / t).exp() * phi_oracle(c / (t * v) - a * v)
    };
    let density = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    simpson(&|u| conditional(t.sqrt() * u) * density(u), -9.0, 9.0, 20_000, 1e-12)
}

#[test]
fn regimes_on_a_curve() {
    let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let g = InitialCondition::exponential(1.0, 1.0).unwrap();
    let pts = blowup_cdf_curve(&[0.5, 1.0, 1.5], &params, &g, &quad()).unwrap();
    let labels: Vec<_> = pts.iter().map(|p| p.as_ref().unwrap().regime.label()).collect();
    assert_eq!(labels, ["BEFORE_T", "AT_T", "AFTER_T"]);
    assert!(blowup_cdf_curve(&[1.0, 0.5], &params, &g, &quad()).is_err());
    assert!(blowup_cdf(0.0, &params, &g, &quad()).is_err());
}

#[test]
fn conditional_crossing_limits() {
    let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let g = InitialCondition::constant(1.0).unwrap();
    // a(x) = 1 - x - 1 <= 0 for x >= 0.
    for x in [0.0, 0.5, 3.0] {
        for r in [1.0, 1.5, 10.0] {
            assert_eq!(conditional_crossing(x, r, &params, &g).unwrap().value(), 1.0);
        }
    }
    let at = conditional_crossing(-0.5, 1.0, &params, &g).unwrap().value();
    assert!((at - (-2.0f64 * 1.0 * 0.5).exp()).abs() < 1e-15);
}

#[test]
fn constant_initial_value_reduces_to_free_crossing() {
    let mut worst: f64 = 0.0;
    for l0 in [0.5, 1.0, 2.0] {
        for c1 in [0.5, 1.0] {
            for c2 in [0.5, 1.0] {
                for p in [1.5, 2.0, 3.0] {
                    let params = ModelParams::new(c1, c2, p, 1.0).unwrap();
                    let g = InitialCondition::constant(l0).unwrap();
                    let near_t = [1.0 - 1e-3, 1.0 - 1e-5, 1.0 - 1e-7, 1.0 + 1e-7, 1.0 + 1e-5, 1.0 + 1e-3];
                    for r in (1..=20).map(|k| 0.15 * k as f64).chain(near_t) {
                        let got = blowup_cdf(r, &params, &g, &quad()).unwrap();
                        let want = constant_oracle(r, &params, l0);
                        worst = worst.max((got.probability.value() - want).abs());
                    }
                }
            }
        }
    }
    assert!(worst <= 1e-6, "largest deviation {worst:e}");
}

#[test]
fn non_constant_initial_value_matches_hand_integration() {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0).unwrap();
    let exp_g = InitialCondition::exponential(1.0, 1.0).unwrap();
    let affine = InitialCondition::affine_clamped(0.5, 1.0, 0.2).unwrap();
    for r in [0.25, 0.5, 0.9, 1.0 - 1e-3, 1.0 - 1e-5, 1.0] {
        let got = blowup_cdf(r, &params, &exp_g, &quad()).unwrap().probability.value();
        let want = integrated_oracle(r, &params, &|x: f64| x.exp());
        assert!((got - want).abs() < 1e-8, "exponential r={r}: {got} vs {want}");
        let got = blowup_cdf(r, &params, &affine, &quad()).unwrap().probability.value();
        let want = integrated_oracle(r, &params, &|x: f64| (0.5 * x + 1.0).max(0.2));
        assert!((got - want).abs() < 1e-8, "affine r={r}: {got} vs {want}");
    }
}

#[test]
fn table_matching_other_kinds() {
    let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let flat = InitialCondition::table(vec![(0.0, 1.5)]).unwrap();
    let constant = InitialCondition::constant(1.5).unwrap();
    let line = InitialCondition::table(vec![(-1.6, 0.2), (20.0, 11.0)]).unwrap();
    let affine = InitialCondition::affine_clamped(0.5, 1.0, 0.2).unwrap();
    for r in [0.3, 1.0, 2.5] {
        let a = blowup_cdf(r, &params, &flat, &quad()).unwrap().probability.value();
        let b = blowup_cdf(r, &params, &constant, &quad()).unwrap().probability.value();
        assert!((a - b).abs() < 1e-9);
        // Same function as the affine kind on [-9, 9], the truncated range.
        let a = blowup_cdf(r, &params, &line, &quad()).unwrap().probability.value();
        let b = blowup_cdf(r, &params, &affine, &quad()).unwrap().probability.value();
        assert!((a - b).abs() < 1e-8, "r={r}: {a} vs {b}");
    }
}

#[test]
fn truncation_and_tolerance_do_not_move_results() {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0).unwrap();
    let g = InitialCondition::exponential(1.0, 1.0).unwrap();
    let wide = QuadratureConfig {
        truncation_sigmas: 12.0,
        abs_tol: 0.5e-9,
        ..quad()
    };
    for r in [0.1, 0.5, 1.0, 1.5, 3.0] {
        let base = blowup_cdf(r, &params, &g, &quad()).unwrap();
        let refined = blowup_cdf(r, &params, &g, &wide).unwrap();
        let change = (base.probability.value() - refined.probability.value()).abs();
        assert!(change <= base.quadrature_error, "r={r}: moved {change:e}");
        assert!(change < quad().abs_tol, "r={r}: moved {change:e}");
        assert!(base.quadrature_error <= quad().abs_tol);
    }
}

#[test]
fn small_horizons_vanish() {
    let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let g = InitialCondition::exponential(1.0, 1.0).unwrap();
    let v: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-5]
        .iter()
        .map(|&r| blowup_cdf(r, &params, &g, &quad()).unwrap().probability.value())
        .collect();
    assert!(v.windows(2).all(|w| w[0] > w[1]) && v[3] < 1e-6, "{v:?}");
}

#[test]
fn simulation_agrees_across_regimes() {
    let params = ModelParams::new(1.0, 0.5, 2.0, 1.0).unwrap();
    let config = McConfig {
        n_paths: 1_000_000,
        dt: 1e-2,
        seed: 32,
        bridge_correction: true,
    };
    let grid = [0.5, 1.0, 2.0];
    for g in [
        InitialCondition::constant(1.0).unwrap(),
        InitialCondition::exponential(1.0, 1.0).unwrap(),
    ] {
        let sims = mc_blowup_cdf_curve(&grid, &params, &g, &config).unwrap();
        for sim in sims {
            let exact = blowup_cdf(sim.r, &params, &g, &quad()).unwrap().probability.value();
            let z = z_score(sim.crossings, sim.n_paths, exact);
            assert!(z.abs() <= 3.0, "{g:?} r={}: z = {z}", sim.r);
        }
    }
}

#[test]
fn simulation_after_anticipation_time() {
    let params = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let g = InitialCondition::constant(1.0).unwrap();
    let config = McConfig {
        n_paths: 1_000_000,
        dt: 1e-2,
        seed: 8,
        bridge_correction: true,
    };
    let sim = mc_blowup_cdf_curve(&[2.0], &params, &g, &config).unwrap()[0];
    let exact = blowup_cdf(2.0, &params, &g, &quad()).unwrap().probability.value();
    let z = z_score(sim.crossings, sim.n_paths, exact);
    assert!(z.abs() <= 3.0, "z = {z}");
}

fn model() -> impl Strategy<Value = (ModelParams, InitialCondition)> {
    (0.2f64..2.0, 0.2f64..2.0, 1.2f64..3.5, 0.3f64..3.0, 0.3f64..3.0, -1.0f64..1.0).prop_map(
        |(c1, c2, p, t, scale, rate)| {
            (
                ModelParams::new(c1, c2, p, t).unwrap(),
                InitialCondition::exponential(scale, rate).unwrap(),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn continuous_across_anticipation_time((params, g) in model()) {
        let t = params.anticipation_time();
        let at = blowup_cdf(t, &params, &g, &quad()).unwrap().probability.value();
        let lo = blowup_cdf(t * (1.0 - 1e-7), &params, &g, &quad()).unwrap().probability.value();
        let hi = blowup_cdf(t * (1.0 + 1e-7), &params, &g, &quad()).unwrap().probability.value();
        prop_assert!((lo - at).abs() <= 1e-4, "below: {} vs {}", lo, at);
        prop_assert!((hi - at).abs() <= 1e-4, "above: {} vs {}", hi, at);
    }

    #[test]
    fn bounded_and_nondecreasing((params, g) in model()) {
        let t = params.anticipation_time();
        let grid: Vec<f64> = (1..=12).map(|k| t * k as f64 / 6.0).collect();
        let pts: Vec<f64> = blowup_cdf_curve(&grid, &params, &g, &quad())
            .unwrap()
            .into_iter()
            .map(|p| p.unwrap().probability.value())
            .collect();
        for w in pts.windows(2) {
            prop_assert!(w[1] - w[0] >= -2.0 * quad().abs_tol, "{:?}", pts);
        }
        prop_assert!(pts.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
