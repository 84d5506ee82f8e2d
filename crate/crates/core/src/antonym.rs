//! Antonym-based fuzzy maps.
//!
//! Occupied and empty are modelled as a pair of antonyms rather than as
//! complements or independent sets. Each reading adds gated evidence to two
//! accumulators; linguistic quantifiers turn the sums into degrees. The
//! contradiction map exposes cells that look both occupied and empty, and a
//! correction pass uses close-range evidence to tell short echoes (false
//! obstacles) from rebounds (false empty space) before the two maps are fused
//! into a single signed map.

use crate::error::Result;
use crate::geometry::{cells_in_cone, same_spec, CellIndex, GridSpec, Pose, RangeTag, ScalarGrid, SensorRing, TraceRecord, SENSOR_COUNT};
use crate::sensor::{mu_empty_cell, mu_near, mu_not_far, mu_occup_cell, mu_several, mu_some, AntonymParams};

/// Łukasiewicz t-norm.
pub fn lukasiewicz(x: f64, y: f64) -> f64 {
    (x + y - 1.0).max(0.0)
}

/// Per-cell evidence sums before quantifiers are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct AntonymAccumulator {
    pub occ_sum: ScalarGrid,
    pub emp_sum: ScalarGrid,
    /// Occupied-looking evidence from readings taken close to the cell.
    pub near_occ: ScalarGrid,
    /// Empty-looking evidence from readings taken close to the cell.
    pub near_emp: ScalarGrid,
    pub params: AntonymParams,
}

impl AntonymAccumulator {
    pub fn new(spec: GridSpec, params: AntonymParams) -> Self {
        let zero = ScalarGrid::filled(spec, RangeTag::NonNegative, 0.0);
        Self {
            occ_sum: zero.clone(),
            emp_sum: zero.clone(),
            near_occ: zero.clone(),
            near_emp: zero,
            params,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.occ_sum.spec()
    }

    /// Adds the evidence of one reading. Max-range readings never add
    /// obstacle evidence.
    pub fn integrate_reading(&mut self, pose: &Pose, sensor: usize, range: f64, ring: &SensorRing) {
        let p = &self.params;
        let saturated = ring.is_max_range(range);
        let occ_gate = if saturated { 0.0 } else { mu_near(range, p) };
        let emp_gate = mu_not_far(range, p);
        let spec = *self.occ_sum.spec();
        let mut cone_ring = ring.clone();
        cone_ring.aperture = p.delta_alpha;
        for cell in cells_in_cone(pose, sensor, &cone_ring, range, p.delta_r, &spec) {
            let g = cell.geometry;
            let occ = if saturated { 0.0 } else { mu_occup_cell(&g, range, p) };
            let emp = mu_empty_cell(&g, range, p);
            self.occ_sum.add(cell.index, occ_gate * occ);
            self.emp_sum.add(cell.index, emp_gate * emp);
            if g.d <= p.near_threshold {
                if g.d < range - p.delta_r {
                    self.near_emp.add(cell.index, emp);
                }
                if (g.d - range).abs() <= p.delta_r {
                    self.near_occ.add(cell.index, occ);
                }
            }
        }
    }

    pub fn integrate_record(&mut self, record: &TraceRecord, ring: &SensorRing) {
        for k in 0..SENSOR_COUNT {
            self.integrate_reading(&record.pose, k, record.ranges[k], ring);
        }
    }

    pub fn occupied_degree(&self, idx: CellIndex) -> f64 {
        mu_some(self.occ_sum.get(idx))
    }

    pub fn empty_degree(&self, idx: CellIndex) -> f64 {
        mu_several(self.emp_sum.get(idx))
    }

    /// Quantified maps, their contradiction and their fusion.
    pub fn render(&self) -> AntonymMaps {
        let occup = self.occ_sum.map(RangeTag::Unit, mu_some);
        let empty = self.emp_sum.map(RangeTag::Unit, mu_several);
        let contra = contradiction_map(&occup, &empty).expect("accumulators share a spec");
        let integ = integrated_map(&occup, &empty).expect("accumulators share a spec");
        AntonymMaps {
            occup,
            empty,
            contra,
            integ,
        }
    }

    /// Second pass resolving contradictory cells with close-range evidence.
    ///
    /// A cell that looks empty from near loses its obstacle evidence (short
    /// echo); one that looks occupied from near loses its empty evidence
    /// (rebound). Ties, including cells never seen from near, are kept.
    pub fn correct_contradictions(&self, contra_threshold: f64) -> AntonymAccumulator {
        let mut out = self.clone();
        for idx in self.spec().indices() {
            let contra = self.occupied_degree(idx).min(self.empty_degree(idx));
            if contra <= contra_threshold {
                continue;
            }
            // one range taken from near is enough to vouch for a cell
            let looks_empty = self.near_emp.get(idx);
            let looks_occupied = self.near_occ.get(idx);
            if looks_empty > looks_occupied {
                out.occ_sum.set(idx, 0.0);
            } else if looks_occupied > looks_empty {
                out.emp_sum.set(idx, 0.0);
            }
        }
        out
    }
}

/// The four rendered antonym grids.
#[derive(Debug, Clone, PartialEq)]
pub struct AntonymMaps {
    pub occup: ScalarGrid,
    pub empty: ScalarGrid,
    pub contra: ScalarGrid,
    pub integ: ScalarGrid,
}

/// Pointwise minimum of the occupied and empty degrees.
pub fn contradiction_map(occup: &ScalarGrid, empty: &ScalarGrid) -> Result<ScalarGrid> {
    occup.zip_map(empty, RangeTag::Unit, f64::min)
}

/// Occupied and not empty: `W(occ, 1 - emp)`.
pub fn occupied_not_empty(occ: f64, emp: f64) -> f64 {
    (occ - emp).max(0.0)
}

/// Empty and not occupied: `W(emp, 1 - occ)`.
pub fn empty_not_occupied(occ: f64, emp: f64) -> f64 {
    (emp - occ).max(0.0)
}

pub fn integrated_value(occ: f64, emp: f64) -> f64 {
    if occ > emp {
        occupied_not_empty(occ, emp)
    } else {
        -empty_not_occupied(occ, emp)
    }
}

/// Signed fusion of the two maps: +1 fully occupied, -1 fully empty.
pub fn integrated_map(occup: &ScalarGrid, empty: &ScalarGrid) -> Result<ScalarGrid> {
    same_spec(occup, empty)?;
    occup.zip_map(empty, RangeTag::Signed, integrated_value)
}

/// Why an integrated cell reads as unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownKind {
    /// Evidence for both states cancels out.
    Contradictory,
    /// No evidence was ever gathered.
    Unexplored,
}

pub fn unknown_kind(acc: &AntonymAccumulator, maps: &AntonymMaps, idx: CellIndex) -> Option<UnknownKind> {
    if maps.integ.get(idx) != 0.0 {
        return None;
    }
    if maps.contra.get(idx) > 0.0 {
        Some(UnknownKind::Contradictory)
    } else if acc.occ_sum.get(idx) == 0.0 && acc.emp_sum.get(idx) == 0.0 {
        Some(UnknownKind::Unexplored)
    } else {
        None
    }
}

/// Accumulates a whole trace.
pub fn accumulate(spec: GridSpec, params: AntonymParams, ring: &SensorRing, trace: &[TraceRecord]) -> AntonymAccumulator {
    let mut acc = AntonymAccumulator::new(spec, params);
    for record in trace {
        acc.integrate_record(record, ring);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use approx::assert_abs_diff_eq;

    fn spec() -> GridSpec {
        GridSpec::new(Point::new(0.0, 0.0), 10.0, 40, 40).unwrap()
    }

    fn single(spec: GridSpec) -> AntonymAccumulator {
        AntonymAccumulator::new(spec, AntonymParams::default())
    }

    #[test]
    fn far_reading_adds_almost_nothing() {
        let ring = SensorRing::default();
        let mut acc = single(spec());
        acc.integrate_reading(&Pose::new(5.0, 205.0, 0.0), 0, 500.0, &ring);
        let max_occ = acc.occ_sum.values().iter().cloned().fold(0.0, f64::max);
        let max_emp = acc.emp_sum.values().iter().cloned().fold(0.0, f64::max);
        assert!(max_occ < 1e-8, "{max_occ}");
        assert!(max_emp < 2e-6, "{max_emp}");
    }

    #[test]
    fn close_reading_on_axis_increment() {
        let ring = SensorRing::default();
        let mut acc = single(spec());
        // sensor at x = 5, cell (20, 10) centre at x = 105 on the axis
        acc.integrate_reading(&Pose::new(5.0, 205.0, 0.0), 0, 100.0, &ring);
        let expected = (1.0 + (100.0f64 / 30.0).tanh()) / 2.0;
        assert_abs_diff_eq!(acc.occ_sum.get(CellIndex::new(20, 10)), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(acc.near_occ.get(CellIndex::new(20, 10)), 1.0, epsilon = 1e-12);
        assert!(acc.near_emp.get(CellIndex::new(20, 5)) > 0.0);
    }

    #[test]
    fn cell_outside_aperture_untouched() {
        let ring = SensorRing::default();
        let mut acc = single(spec());
        acc.integrate_reading(&Pose::new(5.0, 205.0, 0.0), 0, 100.0, &ring);
        // 45° off the axis
        let off = CellIndex::new(27, 7);
        assert_eq!(acc.occ_sum.get(off), 0.0);
        assert_eq!(acc.emp_sum.get(off), 0.0);
    }

    #[test]
    fn max_range_reading_adds_no_obstacle_evidence() {
        let ring = SensorRing::default();
        let mut acc = single(spec());
        acc.integrate_reading(&Pose::new(5.0, 205.0, 0.0), 0, ring.max_range, &ring);
        assert_eq!(acc.occ_sum.sum(), 0.0);
        assert_eq!(acc.near_occ.sum(), 0.0);
        assert!(acc.near_emp.sum() > 0.0);
    }

    fn one_cell(occ: f64, emp: f64, near_occ: f64, near_emp: f64) -> AntonymAccumulator {
        let mut acc = single(GridSpec::new(Point::new(0.0, 0.0), 10.0, 1, 1).unwrap());
        let i = CellIndex::new(0, 0);
        acc.occ_sum.set(i, occ);
        acc.emp_sum.set(i, emp);
        acc.near_occ.set(i, near_occ);
        acc.near_emp.set(i, near_emp);
        acc
    }

    #[test]
    fn render_applies_quantifiers() {
        let i = CellIndex::new(0, 0);
        assert_eq!(one_cell(0.0, 0.0, 0.0, 0.0).render().occup.get(i), 0.0);
        assert_eq!(one_cell(2.0, 0.0, 0.0, 0.0).render().occup.get(i), 0.5);
        assert_eq!(one_cell(0.0, 5.0, 0.0, 0.0).render().empty.get(i), 1.0);
    }

    #[test]
    fn short_echo_is_removed() {
        let i = CellIndex::new(0, 0);
        let fixed = one_cell(4.0, 8.0, 0.0, 6.0).correct_contradictions(0.0);
        assert_eq!(fixed.occ_sum.get(i), 0.0);
        assert_eq!(fixed.emp_sum.get(i), 8.0);
        assert_eq!(fixed.render().integ.get(i), -1.0);
    }

    #[test]
    fn rebound_is_removed() {
        let i = CellIndex::new(0, 0);
        let fixed = one_cell(4.0, 8.0, 3.0, 0.0).correct_contradictions(0.0);
        assert_eq!(fixed.emp_sum.get(i), 0.0);
        assert_eq!(fixed.render().integ.get(i), 1.0);
    }

    #[test]
    fn unresolvable_cells_are_kept() {
        let no_near = one_cell(4.0, 8.0, 0.0, 0.0);
        assert_eq!(no_near.correct_contradictions(0.0), no_near);
        let tie = one_cell(4.0, 8.0, 2.5, 2.5);
        assert_eq!(tie.correct_contradictions(0.0), tie);
        // not contradictory: occupied only
        let clean = one_cell(4.0, 1.0, 0.0, 6.0);
        assert_eq!(clean.correct_contradictions(0.0), clean);
    }

    #[test]
    fn correction_is_idempotent() {
        let acc = one_cell(4.0, 8.0, 0.0, 6.0);
        let once = acc.correct_contradictions(0.0);
        assert_eq!(once.correct_contradictions(0.0), once);
    }

    #[test]
    fn contradiction_and_integration_examples() {
        assert_eq!(integrated_value(0.8, 0.2), 0.8 - 0.2);
        assert_eq!(integrated_value(0.5, 0.5), 0.0);
        assert_eq!(integrated_value(0.0, 1.0), -1.0);
        assert_eq!(0.6f64.min(0.5), 0.5);
        assert_abs_diff_eq!(lukasiewicz(0.8, 1.0 - 0.2), occupied_not_empty(0.8, 0.2), epsilon = 1e-15);
        assert_eq!(lukasiewicz(0.2, 0.3), 0.0);
    }

    #[test]
    fn unknown_cells_are_distinguished() {
        let i = CellIndex::new(0, 0);
        let acc = one_cell(4.0, 8.0, 0.0, 0.0);
        assert_eq!(unknown_kind(&acc, &acc.render(), i), Some(UnknownKind::Contradictory));
        let acc = one_cell(0.0, 0.0, 0.0, 0.0);
        assert_eq!(unknown_kind(&acc, &acc.render(), i), Some(UnknownKind::Unexplored));
        let acc = one_cell(0.5, 1.0, 0.0, 0.0);
        assert_eq!(unknown_kind(&acc, &acc.render(), i), None);
        let acc = one_cell(4.0, 0.0, 0.0, 0.0);
        assert_eq!(unknown_kind(&acc, &acc.render(), i), None);
    }
}
