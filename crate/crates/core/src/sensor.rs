//! Per-reading membership and likelihood functions.
//!
//! Antonym and fuzzy shapes work in centimetres. The range-confidence term
//! used by the probabilistic and fuzzy baselines works in metres; conversion
//! happens inside this module.

use crate::error::{Error, Result};
use crate::geometry::BeamGeometry;

/// Parameters of the antonym-based perception model.
#[derive(Debug, Clone, PartialEq)]
pub struct AntonymParams {
    pub delta_r: f64,
    pub delta_alpha: f64,
    pub near_mid: f64,
    pub near_slope: f64,
    pub far_mid: f64,
    pub far_slope: f64,
    pub smaller_slope: f64,
    /// Cells closer than this to the sensor count as "seen from near".
    pub near_threshold: f64,
}

impl Default for AntonymParams {
    fn default() -> Self {
        Self {
            delta_r: 15.0,
            delta_alpha: 0.2618,
            near_mid: 200.0,
            near_slope: 30.0,
            far_mid: 300.0,
            far_slope: 30.0,
            smaller_slope: 50.0,
            near_threshold: 150.0,
        }
    }
}

impl AntonymParams {
    pub fn validate(&self) -> Result<()> {
        positive("antonym params", "delta_r", self.delta_r)?;
        positive("antonym params", "delta_alpha", self.delta_alpha)?;
        positive("antonym params", "near_slope", self.near_slope)?;
        positive("antonym params", "far_slope", self.far_slope)?;
        positive("antonym params", "smaller_slope", self.smaller_slope)?;
        if !(self.near_threshold >= 0.0) {
            return Err(Error::invalid("antonym params", "near_threshold must be >= 0"));
        }
        Ok(())
    }
}

/// How the range-confidence term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaMode {
    /// The formulas exactly as written, clamped only where a probability is required.
    AsPrinted,
    /// Decreasing confidence and a continuous occupancy likelihood.
    #[default]
    Repaired,
}

impl FormulaMode {
    pub fn name(self) -> &'static str {
        match self {
            FormulaMode::AsPrinted => "as-printed",
            FormulaMode::Repaired => "repaired",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "as-printed" => Some(FormulaMode::AsPrinted),
            "repaired" => Some(FormulaMode::Repaired),
            _ => None,
        }
    }
}

/// Parameters of the probabilistic baseline. Lengths in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbParams {
    pub rho_v: f64,
    pub delta_r: f64,
    pub p_o: f64,
    pub p_e: f64,
    pub mode: FormulaMode,
}

impl Default for ProbParams {
    fn default() -> Self {
        Self {
            rho_v: 1.2,
            delta_r: 0.15,
            p_o: 0.6,
            p_e: 0.4,
            mode: FormulaMode::Repaired,
        }
    }
}

impl ProbParams {
    pub fn validate(&self) -> Result<()> {
        positive("prob params", "delta_r", self.delta_r)?;
        if !(self.rho_v.is_finite()) {
            return Err(Error::invalid("prob params", "rho_v must be finite"));
        }
        if !(0.0 < self.p_e && self.p_e < 0.5 && 0.5 < self.p_o && self.p_o < 1.0) {
            return Err(Error::invalid("prob params", "need 0 < p_E < 0.5 < p_O < 1"));
        }
        Ok(())
    }
}

/// Parameters of the independent fuzzy baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyParams {
    pub k_o: f64,
    pub k_e: f64,
    /// Centimetres.
    pub delta_r: f64,
    /// Metres; shared range-confidence term with the probabilistic model.
    pub rho_v: f64,
    pub mode: FormulaMode,
}

impl Default for FuzzyParams {
    fn default() -> Self {
        Self {
            k_o: 0.65,
            k_e: 0.45,
            delta_r: 15.0,
            rho_v: 1.2,
            mode: FormulaMode::Repaired,
        }
    }
}

impl FuzzyParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.k_o && self.k_o <= 1.0 && 0.0 < self.k_e && self.k_e <= 1.0) {
            return Err(Error::invalid("fuzzy params", "need 0 < k_O <= 1 and 0 < k_E <= 1"));
        }
        positive("fuzzy params", "delta_r", self.delta_r)
    }
}

fn positive(what: &'static str, field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{field} must be > 0, got {v}")))
    }
}

// ---------------------------------------------------------------------------
// Antonym model

/// Confidence that an obstacle reading is trustworthy: high for short ranges.
pub fn mu_near(r: f64, p: &AntonymParams) -> f64 {
    (1.0 + ((p.near_mid - r) / p.near_slope).tanh()) / 2.0
}

/// Confidence that an empty-space reading is trustworthy.
pub fn mu_not_far(r: f64, p: &AntonymParams) -> f64 {
    1.0 - (1.0 + ((r - p.far_mid) / p.far_slope).tanh()) / 2.0
}

/// Quantifier "some", over accumulated obstacle evidence.
pub fn mu_some(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else if x <= 3.0 {
        (x - 1.0) / 2.0
    } else {
        1.0
    }
}

/// Quantifier "several", over accumulated empty-space evidence.
pub fn mu_several(x: f64) -> f64 {
    if x <= 3.0 {
        0.0
    } else if x <= 5.0 {
        (x - 3.0) / 2.0
    } else {
        1.0
    }
}

pub fn mu_approx_d(d: f64, r: f64, p: &AntonymParams) -> f64 {
    (1.0 - (d - r).powi(2) / p.delta_r.powi(2)).max(0.0)
}

pub fn mu_approx_a(offset: f64, p: &AntonymParams) -> f64 {
    (1.0 - offset.powi(2) / p.delta_alpha.powi(2)).max(0.0)
}

/// Degree to which distance `d` is smaller than the reading `r`.
pub fn mu_smaller(d: f64, r: f64, p: &AntonymParams) -> f64 {
    1.0 - (1.0 + ((d - r) / p.smaller_slope).tanh()) / 2.0
}

pub fn mu_occup_cell(g: &BeamGeometry, r: f64, p: &AntonymParams) -> f64 {
    mu_approx_d(g.d, r, p) * mu_approx_a(g.offset, p)
}

pub fn mu_empty_cell(g: &BeamGeometry, r: f64, p: &AntonymParams) -> f64 {
    mu_smaller(g.d, r, p) * mu_approx_a(g.offset, p)
}

// ---------------------------------------------------------------------------
// Baselines

/// Range confidence. `rho` and `rho_v` in metres.
///
/// In as-printed mode this lies in `[1, 2]` and grows with distance; the
/// repaired form is its decreasing mirror in `[0, 1]`.
pub fn gamma(rho: f64, rho_v: f64, mode: FormulaMode) -> f64 {
    let step = (1.0 + (2.0 * (rho - rho_v)).tanh()) / 2.0;
    match mode {
        FormulaMode::AsPrinted => 1.0 + step,
        FormulaMode::Repaired => 1.0 - step,
    }
}

/// Half-width of the angular confidence lobe (rad).
pub const DELTA_LOBE: f64 = 0.2182;

/// Angular confidence, a parabola vanishing at `DELTA_LOBE`.
pub fn delta(offset: f64) -> f64 {
    if offset.abs() <= DELTA_LOBE {
        1.0 - (offset / DELTA_LOBE).powi(2)
    } else {
        0.0
    }
}

/// Floor and ceiling applied to likelihoods and cell probabilities.
pub const PROB_EPSILON: f64 = 1e-6;

/// `p[r | cell occupied]` for a cell at `g` given reading `r` (both cm).
pub fn likelihood_occupied(g: &BeamGeometry, r: f64, p: &ProbParams) -> f64 {
    let rho = g.d / 100.0;
    let r = r / 100.0;
    let dr = p.delta_r;
    let lambda = gamma(rho, p.rho_v, p.mode) * delta(g.offset);
    let raw = match p.mode {
        FormulaMode::AsPrinted => {
            let p1 = if rho < r - 2.0 * dr {
                (1.0 - lambda) * 0.5 + lambda * p.p_e
            } else if rho < r - dr {
                (0.5 - p.p_e) * (1.0 - lambda * ((r - rho - dr) / dr).powi(2))
            } else if rho < r + dr {
                lambda * (p.p_o - 0.5) * (1.0 - ((r - rho) / dr).powi(2))
            } else {
                0.5
            };
            let p2 = if rho < r - dr { p.p_e } else { 0.5 };
            // p2 enters as a deviation from the uninformative 0.5
            p1 + p2 - 0.5
        }
        FormulaMode::Repaired => {
            if rho < r - 2.0 * dr {
                0.5 + lambda * (p.p_e - 0.5)
            } else if rho < r - dr {
                0.5 + lambda * (p.p_e - 0.5) * ((r - dr - rho) / dr).powi(2)
            } else if rho < r + dr {
                0.5 + lambda * (p.p_o - 0.5) * (1.0 - ((r - rho) / dr).powi(2))
            } else {
                0.5
            }
        }
    };
    raw.clamp(PROB_EPSILON, 1.0 - PROB_EPSILON)
}

/// Occupied-map shape of the fuzzy baseline (cm).
pub fn f_occ(rho: f64, r: f64, p: &FuzzyParams) -> f64 {
    let dr = p.delta_r;
    if rho < r - dr || rho >= r + dr {
        0.0
    } else {
        p.k_o * (1.0 - ((r - rho) / dr).powi(2))
    }
}

/// Empty-map shape of the fuzzy baseline (cm).
pub fn f_emp(rho: f64, r: f64, p: &FuzzyParams) -> f64 {
    let dr = p.delta_r;
    if rho >= r {
        0.0
    } else if rho < r - dr {
        p.k_e
    } else {
        p.k_e * ((r - rho) / dr).powi(2)
    }
}

/// `(μ_O, μ_E)` contributed by one reading to one cell.
pub fn fuzzy_reading_degrees(g: &BeamGeometry, r: f64, p: &FuzzyParams) -> (f64, f64) {
    let lambda = gamma(g.d / 100.0, p.rho_v, p.mode) * delta(g.offset);
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    (clamp(lambda * f_occ(g.d, r, p)), clamp(lambda * f_emp(g.d, r, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ap() -> AntonymParams {
        AntonymParams::default()
    }

    fn geom(d: f64, offset: f64) -> BeamGeometry {
        BeamGeometry { d, offset }
    }

    #[test]
    fn defaults_validate() {
        ap().validate().unwrap();
        ProbParams::default().validate().unwrap();
        FuzzyParams::default().validate().unwrap();
        let bad = ProbParams { p_e: 0.6, ..ProbParams::default() };
        assert!(bad.validate().is_err());
        let bad = FuzzyParams { k_o: 1.5, ..FuzzyParams::default() };
        assert!(bad.validate().is_err());
        let bad = AntonymParams { near_slope: 0.0, ..ap() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn quantifiers_clamp_past_ten() {
        assert_eq!(mu_some(50.0), 1.0);
        assert_eq!(mu_several(50.0), 1.0);
        assert_eq!(mu_some(0.0), 0.0);
        assert_eq!(mu_several(3.5), 0.25);
    }

    #[test]
    fn approx_shapes_are_clamped_outside_support() {
        assert_eq!(mu_approx_d(0.0, 100.0, &ap()), 0.0);
        assert_eq!(mu_approx_a(1.0, &ap()), 0.0);
        assert_eq!(mu_occup_cell(&geom(100.0, 0.5), 100.0, &ap()), 0.0);
    }

    #[test]
    fn gamma_mode_switch() {
        assert_abs_diff_eq!(gamma(3.0, 1.2, FormulaMode::AsPrinted) + gamma(3.0, 1.2, FormulaMode::Repaired), 2.0, epsilon = 1e-12);
        assert!(gamma(0.3, 1.2, FormulaMode::Repaired) > gamma(2.0, 1.2, FormulaMode::Repaired));
    }

    #[test]
    fn as_printed_likelihood_stays_inside_open_interval() {
        let p = ProbParams { mode: FormulaMode::AsPrinted, ..ProbParams::default() };
        for d in [0.0, 50.0, 90.0, 100.0, 120.0, 300.0] {
            for off in [0.0, 0.1, 0.3] {
                let l = likelihood_occupied(&geom(d, off), 120.0, &p);
                assert!(l > 0.0 && l < 1.0, "{d} {off} {l}");
            }
        }
    }

    #[test]
    fn f_shapes_boundaries() {
        let p = FuzzyParams::default();
        assert_eq!(f_occ(100.0, 100.0, &p), 0.65);
        assert_eq!(f_occ(85.0, 100.0, &p), 0.0);
        assert_eq!(f_occ(115.0, 100.0, &p), 0.0);
        assert_eq!(f_emp(0.0, 100.0, &p), 0.45);
        assert_abs_diff_eq!(f_emp(85.0, 100.0, &p), 0.45, epsilon = 1e-12);
        assert_eq!(f_emp(100.0, 100.0, &p), 0.0);
    }

    #[test]
    fn repaired_likelihood_has_no_jumps_at_branch_boundaries() {
        let p = ProbParams::default();
        for r in [40.0, 120.0, 333.0] {
            for off in [0.0, 0.1] {
                for b in [r - 30.0, r - 15.0, r + 15.0] {
                    let left = likelihood_occupied(&geom(b - 1e-6, off), r, &p);
                    let at = likelihood_occupied(&geom(b, off), r, &p);
                    assert!((left - at).abs() < 1e-6, "jump at r={r} b={b}: {left} vs {at}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn memberships_are_degrees(
            d in 0.0..800.0f64, r in 0.0..700.0f64, off in 0.0..3.2f64, x in 0.0..30.0f64,
        ) {
            let p = ap();
            let g = geom(d, off);
            for v in [
                mu_near(r, &p), mu_not_far(r, &p), mu_some(x), mu_several(x),
                mu_approx_d(d, r, &p), mu_approx_a(off, &p), mu_smaller(d, r, &p),
                mu_occup_cell(&g, r, &p), mu_empty_cell(&g, r, &p), delta(off),
            ] {
                prop_assert!((0.0..=1.0).contains(&v), "{}", v);
            }
            let (o, e) = fuzzy_reading_degrees(&g, r, &FuzzyParams::default());
            prop_assert!((0.0..=1.0).contains(&o) && (0.0..=1.0).contains(&e));
            for mode in [FormulaMode::AsPrinted, FormulaMode::Repaired] {
                let l = likelihood_occupied(&g, r, &ProbParams { mode, ..ProbParams::default() });
                prop_assert!(l > 0.0 && l < 1.0);
            }
        }

        #[test]
        fn confidence_gates_decrease(a in 0.0..700.0f64, b in 0.0..700.0f64) {
            let p = ap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(mu_near(lo, &p) >= mu_near(hi, &p));
            prop_assert!(mu_not_far(lo, &p) >= mu_not_far(hi, &p));
            prop_assert!(mu_some(lo / 50.0) <= mu_some(hi / 50.0));
            prop_assert!(mu_several(lo / 50.0) <= mu_several(hi / 50.0));
        }

        #[test]
        fn occupied_support_is_an_intersection(d in 0.0..400.0f64, r in 0.0..400.0f64, off in 0.0..0.5f64) {
            let p = ap();
            if mu_occup_cell(&geom(d, off), r, &p) > 0.0 {
                prop_assert!(mu_approx_d(d, r, &p) > 0.0 && mu_approx_a(off, &p) > 0.0);
            }
        }

        #[test]
        fn fuzzy_shapes_only_overlap_below_the_reading(rho in 0.0..500.0f64, r in 0.0..500.0f64) {
            let p = FuzzyParams::default();
            if rho >= r {
                prop_assert!(!(f_occ(rho, r, &p) > 0.0 && f_emp(rho, r, &p) > 0.0));
            }
        }
    }
}
