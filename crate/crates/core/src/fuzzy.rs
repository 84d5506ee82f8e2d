//! Independent fuzzy occupied/empty grids aggregated with the algebraic sum.

use crate::geometry::{cells_in_cone, same_spec, GridSpec, Pose, RangeTag, ScalarGrid, SensorRing, TraceRecord, SENSOR_COUNT};
use crate::error::Result;
use crate::eval::discretize;
use crate::sensor::{fuzzy_reading_degrees, FuzzyParams};

/// Algebraic-sum t-conorm. Rounding is kept from dipping below either
/// argument so that aggregation is exactly monotone.
pub fn algebraic_sum(a: f64, b: f64) -> f64 {
    (a + b - a * b).max(a).max(b).min(1.0)
}

#[derive(Debug, Clone)]
pub struct FuzzyMapSet {
    pub occupied: ScalarGrid,
    pub empty: ScalarGrid,
    pub params: FuzzyParams,
}

impl FuzzyMapSet {
    pub fn new(spec: GridSpec, params: FuzzyParams) -> Self {
        Self {
            occupied: ScalarGrid::filled(spec, RangeTag::Unit, 0.0),
            empty: ScalarGrid::filled(spec, RangeTag::Unit, 0.0),
            params,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.occupied.spec()
    }

    pub fn integrate_reading(&mut self, pose: &Pose, sensor: usize, range: f64, ring: &SensorRing) {
        let saturated = ring.is_max_range(range);
        let spec = *self.spec();
        for cell in cells_in_cone(pose, sensor, ring, range, self.params.delta_r, &spec) {
            let (mut occ, emp) = fuzzy_reading_degrees(&cell.geometry, range, &self.params);
            if saturated {
                occ = 0.0;
            }
            if occ > 0.0 {
                let cur = self.occupied.get(cell.index);
                self.occupied.set(cell.index, algebraic_sum(cur, occ));
            }
            if emp > 0.0 {
                let cur = self.empty.get(cell.index);
                self.empty.set(cell.index, algebraic_sum(cur, emp));
            }
        }
    }

    pub fn update(&mut self, record: &TraceRecord, ring: &SensorRing) {
        for k in 0..SENSOR_COUNT {
            self.integrate_reading(&record.pose, k, record.ranges[k], ring);
        }
    }

    /// Occupied minus empty, in `[-1, 1]`.
    pub fn signed(&self) -> ScalarGrid {
        self.occupied
            .zip_map(&self.empty, RangeTag::Signed, |o, e| o - e)
            .expect("fuzzy maps share a spec")
    }

    /// Ternary map that leaves contradictory and indeterminate cells unknown.
    pub fn safe_map(&self, thresholds: SafeThresholds) -> ScalarGrid {
        discretize(&self.signed(), thresholds.alpha)
    }
}

/// Cut level on `μ_O - μ_E` used by [`FuzzyMapSet::safe_map`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeThresholds {
    pub alpha: f64,
}

impl Default for SafeThresholds {
    fn default() -> Self {
        Self { alpha: 1.0 / 3.0 }
    }
}

pub fn build(spec: GridSpec, params: FuzzyParams, ring: &SensorRing, trace: &[TraceRecord]) -> FuzzyMapSet {
    let mut maps = FuzzyMapSet::new(spec, params);
    for record in trace {
        maps.update(record, ring);
    }
    maps
}

/// Rebuilds a map set from stored grids.
pub fn from_grids(occupied: ScalarGrid, empty: ScalarGrid, params: FuzzyParams) -> Result<FuzzyMapSet> {
    same_spec(&occupied, &empty)?;
    Ok(FuzzyMapSet { occupied, empty, params })
}
