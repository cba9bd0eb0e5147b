mod oracles;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use cardylab::conformal::{
    apex_params, cardy_prediction, derivative_ratio, inv_reg_inc_beta, reg_inc_beta, TriangleMapParams,
};

const EXPONENTS: [f64; 5] = [0.25, 1.0 / 3.0, 0.4196, 0.45, 0.5];

#[test]
fn quadrature_oracle_sanity() {
    // Arcsine law: I_w(1/2, 1/2) = (2/π)·asin(√w).
    for w in [0.05f64, 0.25, 0.5, 0.8] {
        let exact = 2.0 / PI * w.sqrt().asin();
        assert!((oracles::inc_beta(w, 0.5) - exact).abs() < 1e-12, "w={w}");
    }
}

#[test]
fn incomplete_beta_matches_quadrature() {
    for a in EXPONENTS {
        for w in [1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.95, 0.999] {
            let got = reg_inc_beta(w, a).unwrap();
            let want = oracles::inc_beta(w, a);
            assert!((got - want).abs() < 1e-11, "a={a} w={w}: {got} vs {want}");
        }
    }
}

#[test]
fn inverse_matches_bisection() {
    for a in EXPONENTS {
        for x in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9] {
            let got = inv_reg_inc_beta(x, a).unwrap();
            let want = oracles::inv_inc_beta(x, a);
            assert!((got - want).abs() < 1e-10, "a={a} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn midpoint_and_arcsine_values() {
    for a in [0.25, 1.0 / 3.0, 0.4196] {
        assert!((reg_inc_beta(0.5, a).unwrap() - 0.5).abs() < 1e-12);
    }
    assert!((reg_inc_beta(0.25, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn inverse_round_trip_at_stated_points() {
    for a in [0.25, 1.0 / 3.0, 0.4196] {
        for x in [0.01, 0.25, 0.9] {
            let w = inv_reg_inc_beta(x, a).unwrap();
            assert!((reg_inc_beta(w, a).unwrap() - x).abs() <= 1e-10, "a={a} x={x}");
        }
    }
}

#[test]
fn derivative_matches_density() {
    let h = 1e-6;
    for kappa in [FRAC_PI_4, FRAC_PI_3, apex_params(2.0).unwrap()] {
        let params = TriangleMapParams::new(kappa).unwrap();
        for w in [0.2, 0.5, 0.8] {
            let numeric = (reg_inc_beta(w + h, params.a).unwrap() - reg_inc_beta(w - h, params.a).unwrap()) / (2.0 * h);
            let analytic = params.derivative(w);
            assert!(((numeric - analytic) / analytic).abs() < 1e-6, "kappa={kappa} w={w}");
        }
    }
}

#[test]
fn golden_conformal_images() {
    let kappa2 = 15f64.sqrt().atan();
    let cases = [(kappa2, 0.283_526_566_416_215_2), (FRAC_PI_4, 0.202_741_802_091_552_2)];
    for (kappa, golden) in cases {
        let oracle = oracles::conformal_x(0.25, kappa);
        assert!((oracle - golden).abs() < 1e-10, "oracle {oracle} vs {golden}");
        let got = cardy_prediction(0.25, kappa).unwrap().big_x;
        assert!((got - oracle).abs() < 1e-10, "library {got} vs oracle {oracle}");
    }
}

#[test]
fn predictions_match_oracle_on_a_grid() {
    for kappa in [0.5, FRAC_PI_4, FRAC_PI_3, 1.2, apex_params(3.0).unwrap()] {
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let got = cardy_prediction(x, kappa).unwrap().big_x;
            let want = oracles::conformal_x(x, kappa);
            assert!((got - want).abs() < 1e-10, "kappa={kappa} x={x}");
        }
    }
}

#[test]
fn equilateral_image_is_identity() {
    for i in 1..100 {
        let x = i as f64 / 100.0;
        assert!((cardy_prediction(x, FRAC_PI_3).unwrap().big_x - x).abs() < 1e-12);
    }
}

fn ratio_spread(kappa: f64) -> (f64, f64) {
    let ratios: Vec<f64> = (1..100)
        .map(|i| derivative_ratio(i as f64 / 100.0, kappa).unwrap())
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    (lo, hi)
}

#[test]
fn derivative_ratio_constant_only_at_equilateral() {
    let (lo, hi) = ratio_spread(FRAC_PI_3);
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    // For κ = π/4 the ratio is proportional to (w(1−w))^{−1/12}, smallest
    // at w = 1/2 and largest at the ends of the grid.
    let (lo, hi) = ratio_spread(FRAC_PI_4);
    let expected = (0.25f64 / (0.01 * 0.99)).powf(1.0 / 12.0);
    assert!((hi / lo - expected).abs() < 1e-12, "{} vs {expected}", hi / lo);
    assert!(hi / lo > 1.1 && (hi / lo - 1.309).abs() < 1e-3);
}
