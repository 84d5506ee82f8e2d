//! Probabilistic occupancy grid built by Bayes updates.
//!
//! Cells hold log-odds internally; [`ProbGrid::probabilities`] converts back.
//! Adding log-odds of the likelihood ratio is the Bayes rule with a uniform
//! complementary likelihood `p[r | E] = 1 - p[r | O]`.

use crate::geometry::{cells_in_cone, GridSpec, Pose, RangeTag, ScalarGrid, SensorRing, TraceRecord, SENSOR_COUNT};
use crate::sensor::{likelihood_occupied, ProbParams, PROB_EPSILON};

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn logistic(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

/// Direct Bayes rule for one cell.
pub fn bayes_update(prior: f64, likelihood: f64) -> f64 {
    let num = likelihood * prior;
    num / (num + (1.0 - likelihood) * (1.0 - prior))
}

#[derive(Debug, Clone)]
pub struct ProbGrid {
    log_odds: Vec<f64>,
    spec: GridSpec,
    params: ProbParams,
    bound: f64,
}

impl ProbGrid {
    /// Every cell starts at P = 0.5.
    pub fn new(spec: GridSpec, params: ProbParams) -> Self {
        Self {
            log_odds: vec![0.0; spec.len()],
            spec,
            params,
            bound: logit(1.0 - PROB_EPSILON),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn params(&self) -> &ProbParams {
        &self.params
    }

    /// Applies one cell update with likelihood `l`, keeping P in `[ε, 1-ε]`.
    pub fn update_cell(&mut self, i: usize, l: f64) {
        let l = l.clamp(PROB_EPSILON, 1.0 - PROB_EPSILON);
        let v = &mut self.log_odds[i];
        *v = (*v + logit(l)).clamp(-self.bound, self.bound);
    }

    pub fn probability(&self, i: usize) -> f64 {
        logistic(self.log_odds[i])
    }

    pub fn integrate_reading(&mut self, pose: &Pose, sensor: usize, range: f64, ring: &SensorRing) {
        let saturated = ring.is_max_range(range);
        // cone reach is in cm; params hold metres
        let delta_r = self.params.delta_r * 100.0;
        for cell in cells_in_cone(pose, sensor, ring, range, delta_r, &self.spec) {
            let mut l = likelihood_occupied(&cell.geometry, range, &self.params);
            if saturated {
                // max-range readings only carry free-space evidence
                l = l.min(0.5);
            }
            let i = self.spec.flat(cell.index);
            self.update_cell(i, l);
        }
    }

    /// Applies the twelve readings of `record` in sensor order.
    pub fn update(&mut self, record: &TraceRecord, ring: &SensorRing) {
        for k in 0..SENSOR_COUNT {
            self.integrate_reading(&record.pose, k, record.ranges[k], ring);
        }
    }

    pub fn probabilities(&self) -> ScalarGrid {
        ScalarGrid::from_fn(self.spec, RangeTag::Unit, |idx| self.probability(self.spec.flat(idx)))
    }
}

/// Builds a probabilistic map from a whole trace.
pub fn build(spec: GridSpec, params: ProbParams, ring: &SensorRing, trace: &[TraceRecord]) -> ProbGrid {
    let mut grid = ProbGrid::new(spec, params);
    for record in trace {
        grid.update(record, ring);
    }
    grid
}
