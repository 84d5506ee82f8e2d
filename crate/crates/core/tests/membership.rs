//! Per-reading models checked against direct evaluation of their formulas.

use antomap_core::geometry::BeamGeometry;
use antomap_core::sensor::*;
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn ap() -> AntonymParams {
    AntonymParams::default()
}

fn geom(d: f64, offset: f64) -> BeamGeometry {
    BeamGeometry { d, offset }
}

// Independent oracles, written straight from the printed formulas.
fn near_oracle(x: f64) -> f64 {
    (1.0 + ((200.0 - x) / 30.0).tanh()) / 2.0
}
fn not_far_oracle(x: f64) -> f64 {
    1.0 - (1.0 + ((x - 300.0) / 30.0).tanh()) / 2.0
}
fn smaller_oracle(d: f64, r: f64) -> f64 {
    1.0 - (1.0 + ((d - r) / 50.0).tanh()) / 2.0
}
fn gamma_oracle(rho: f64, repaired: bool) -> f64 {
    let s = (1.0 + (2.0 * (rho - 1.2)).tanh()) / 2.0;
    if repaired {
        1.0 - s
    } else {
        1.0 + s
    }
}

#[test]
fn confidence_gates() {
    let p = ap();
    assert_eq!(mu_near(200.0, &p), 0.5);
    let v = near_oracle(0.0);
    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-5);
    assert_abs_diff_eq!(mu_near(0.0, &p), v, epsilon = 1e-15);
    let v = near_oracle(500.0);
    assert_abs_diff_eq!(v, 0.0, epsilon = 1e-5);
    assert_abs_diff_eq!(mu_near(500.0, &p), v, epsilon = 1e-15);

    assert_eq!(mu_not_far(300.0, &p), 0.5);
    let v = not_far_oracle(0.0);
    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-5);
    assert_abs_diff_eq!(mu_not_far(0.0, &p), v, epsilon = 1e-15);
    let v = not_far_oracle(600.0);
    assert_abs_diff_eq!(v, 0.0, epsilon = 1e-5);
    assert_abs_diff_eq!(mu_not_far(600.0, &p), v, epsilon = 1e-15);
}

#[test]
fn quantifiers() {
    assert_eq!(mu_some(1.0), 0.0);
    assert_eq!(mu_some(2.0), 0.5);
    assert_eq!(mu_some(7.0), 1.0);
    assert_eq!(mu_several(3.0), 0.0);
    assert_eq!(mu_several(4.0), 0.5);
    assert_eq!(mu_several(12.0), 1.0);
}

#[test]
fn approximation_shapes() {
    let p = ap();
    assert_eq!(mu_approx_d(120.0, 120.0, &p), 1.0);
    assert_abs_diff_eq!(mu_approx_d(135.0, 120.0, &p), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(mu_approx_d(105.0, 120.0, &p), 0.0, epsilon = 1e-15);
    assert_eq!(mu_approx_d(220.0, 120.0, &p), 0.0);

    assert_eq!(mu_approx_a(0.0, &p), 1.0);
    assert_abs_diff_eq!(mu_approx_a(p.delta_alpha, &p), 0.0, epsilon = 1e-15);
    let v = 1.0 - (0.13f64 / 0.2618).powi(2);
    assert_abs_diff_eq!(v, 0.753, epsilon = 5e-4);
    assert_abs_diff_eq!(mu_approx_a(0.13, &p), v, epsilon = 1e-15);

    assert_eq!(mu_smaller(250.0, 250.0, &p), 0.5);
    let v = smaller_oracle(50.0, 250.0);
    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-3);
    assert_abs_diff_eq!(mu_smaller(50.0, 250.0, &p), v, epsilon = 1e-15);
    let v = smaller_oracle(450.0, 250.0);
    assert_abs_diff_eq!(v, 0.0, epsilon = 1e-3);
    assert_abs_diff_eq!(mu_smaller(450.0, 250.0, &p), v, epsilon = 1e-15);
}

#[test]
fn cell_memberships() {
    let p = ap();
    assert_eq!(mu_occup_cell(&geom(100.0, 0.0), 100.0, &p), 1.0);
    assert_abs_diff_eq!(mu_occup_cell(&geom(100.0, p.delta_alpha), 100.0, &p), 0.0, epsilon = 1e-15);
    let v = (1.0 - (7.5f64 / 15.0).powi(2)) * (1.0 - 0.5f64.powi(2));
    assert_abs_diff_eq!(v, 0.5625, epsilon = 1e-12);
    assert_abs_diff_eq!(mu_occup_cell(&geom(107.5, p.delta_alpha / 2.0), 100.0, &p), v, epsilon = 1e-12);

    let v = smaller_oracle(100.0, 300.0);
    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-3);
    assert_abs_diff_eq!(mu_empty_cell(&geom(100.0, 0.0), 300.0, &p), v, epsilon = 1e-15);
    assert_eq!(mu_empty_cell(&geom(100.0, 0.3), 300.0, &p), 0.0);
    assert_eq!(mu_empty_cell(&geom(300.0, 0.0), 300.0, &p), 0.5);
}

#[test]
fn range_and_angle_confidence() {
    assert_eq!(gamma(1.2, 1.2, FormulaMode::Repaired), 0.5);
    assert_eq!(gamma(1.2, 1.2, FormulaMode::AsPrinted), 1.5);
    let v = gamma_oracle(0.0, true);
    assert_abs_diff_eq!(v, 0.99, epsilon = 0.005);
    assert_abs_diff_eq!(gamma(0.0, 1.2, FormulaMode::Repaired), v, epsilon = 1e-15);

    assert_eq!(delta(0.0), 1.0);
    assert_abs_diff_eq!(delta(0.2182), 0.0, epsilon = 1e-15);
    assert_eq!(delta(0.3), 0.0);
}

#[test]
fn occupancy_likelihood() {
    for mode in [FormulaMode::AsPrinted, FormulaMode::Repaired] {
        let p = ProbParams { mode, ..ProbParams::default() };
        assert_eq!(likelihood_occupied(&geom(150.0, 0.0), 100.0, &p), 0.5);
        assert_eq!(likelihood_occupied(&geom(400.0, 0.1), 100.0, &p), 0.5);
    }
    // at the peak the repaired band gives 0.5 + λ(p_O − 0.5); force λ = 1
    let p = ProbParams {
        rho_v: 1e6,
        ..ProbParams::default()
    };
    assert_abs_diff_eq!(gamma(2.0, p.rho_v, p.mode), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(likelihood_occupied(&geom(200.0, 0.0), 200.0, &p), 0.6, epsilon = 1e-12);
    // λ = 0 outside the lobe
    let p = ProbParams::default();
    for d in [10.0, 80.0, 95.0, 100.0, 110.0] {
        assert_eq!(likelihood_occupied(&geom(d, 0.25), 100.0, &p), 0.5);
    }
}

#[test]
fn fuzzy_shapes() {
    let p = FuzzyParams::default();
    assert_eq!(f_occ(100.0, 100.0, &p), 0.65);
    assert_eq!(f_occ(85.0, 100.0, &p), 0.0);
    assert_eq!(f_emp(0.0, 100.0, &p), 0.45);
    assert_eq!(fuzzy_reading_degrees(&geom(100.0, 0.22), 100.0, &p), (0.0, 0.0));
    assert_eq!(fuzzy_reading_degrees(&geom(120.0, 0.0), 100.0, &p), (0.0, 0.0));
    let (o, _) = fuzzy_reading_degrees(&geom(120.0, 0.0), 120.0, &p);
    assert_abs_diff_eq!(o, 0.5 * 0.65, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn memberships_stay_in_unit_interval(d in 0.0f64..800.0, r in 0.0f64..800.0, off in 0.0f64..3.2, x in 0.0f64..50.0) {
        let p = ap();
        let g = geom(d, off);
        for v in [mu_near(r, &p), mu_not_far(r, &p), mu_some(x), mu_several(x), mu_approx_d(d, r, &p),
                  mu_approx_a(off, &p), mu_smaller(d, r, &p), mu_occup_cell(&g, r, &p), mu_empty_cell(&g, r, &p),
                  f_occ(d, r, &FuzzyParams::default()), f_emp(d, r, &FuzzyParams::default())] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for mode in [FormulaMode::AsPrinted, FormulaMode::Repaired] {
            let l = likelihood_occupied(&g, r, &ProbParams { mode, ..ProbParams::default() });
            prop_assert!(l > 0.0 && l < 1.0);
        }
    }

    #[test]
    fn gates_decrease_and_quantifiers_grow(a in 0.0f64..800.0, b in 0.0f64..800.0) {
        let p = ap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(mu_near(lo, &p) >= mu_near(hi, &p));
        prop_assert!(mu_not_far(lo, &p) >= mu_not_far(hi, &p));
        let (lo, hi) = (lo / 40.0, hi / 40.0);
        prop_assert!(mu_some(lo) <= mu_some(hi));
        prop_assert!(mu_several(lo) <= mu_several(hi));
    }

    #[test]
    fn occupied_support_is_an_intersection(d in 0.0f64..400.0, r in 0.0f64..400.0, off in 0.0f64..0.5) {
        let p = ap();
        if mu_occup_cell(&geom(d, off), r, &p) > 0.0 {
            prop_assert!(mu_approx_d(d, r, &p) > 0.0 && mu_approx_a(off, &p) > 0.0);
        }
    }

    #[test]
    fn repaired_likelihood_is_continuous(r in 20.0f64..500.0, off in 0.0f64..0.22, rho in 0.0f64..600.0) {
        let p = ProbParams::default();
        let h = 1e-7;
        let a = likelihood_occupied(&geom(rho, off), r, &p);
        let b = likelihood_occupied(&geom(rho + h, off), r, &p);
        prop_assert!((a - b).abs() < 1e-4);
    }

    #[test]
    fn fuzzy_bands_overlap_only_below_the_reading(rho in 0.0f64..500.0, r in 0.0f64..500.0) {
        let p = FuzzyParams::default();
        if rho >= r {
            prop_assert!(!(f_occ(rho, r, &p) > 0.0 && f_emp(rho, r, &p) > 0.0));
        }
    }
}
