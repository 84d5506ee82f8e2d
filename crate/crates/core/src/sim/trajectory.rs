use crate::error::{Error, Result};
use crate::geometry::{Point, Pose};

/// Default sensing interval along the path (cm).
pub const DEFAULT_STEP: f64 = 50.0;
/// Largest position error a recorded pose may carry (cm).
pub const MAX_JITTER_POS: f64 = 25.0;
/// Largest heading error a recorded pose may carry (rad).
pub const MAX_JITTER_HEADING: f64 = 15.0 * std::f64::consts::PI / 180.0;

/// A polyline route sampled at a fixed arc-length step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<Pose>,
    pub step: f64,
    /// Bound on the recorded position error (cm).
    pub jitter_pos: f64,
    /// Bound on the recorded heading error (rad).
    pub jitter_heading: f64,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Pose>) -> Self {
        Self {
            waypoints,
            step: DEFAULT_STEP,
            jitter_pos: 10.0,
            jitter_heading: 5f64.to_radians(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::invalid("trajectory", "no waypoints"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("trajectory", "step must be > 0"));
        }
        if !(0.0..=MAX_JITTER_POS).contains(&self.jitter_pos) {
            return Err(Error::invalid("trajectory", format!("jitter_pos must be in [0, {MAX_JITTER_POS}] cm")));
        }
        if !(0.0..=MAX_JITTER_HEADING + 1e-12).contains(&self.jitter_heading) {
            return Err(Error::invalid("trajectory", "jitter_heading must be in [0, 15°]"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| w[0].position().distance(w[1].position()))
            .sum()
    }

    /// Poses every `step` along the route, facing the direction of travel.
    /// A route of zero length yields its first waypoint only.
    pub fn sample_poses(&self) -> Vec<Pose> {
        let total = self.length();
        let count = (total / self.step + 1e-9).floor() as usize + 1;
        let segments: Vec<(Point, Point, f64)> = self
            .waypoints
            .windows(2)
            .map(|w| (w[0].position(), w[1].position(), w[0].position().distance(w[1].position())))
            .filter(|s| s.2 > 0.0)
            .collect();
        if segments.is_empty() {
            return vec![self.waypoints[0]];
        }
        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        let mut seg_start = 0.0;
        for i in 0..count {
            let s = (i as f64 * self.step).min(total);
            while seg + 1 < segments.len() && s >= seg_start + segments[seg].2 {
                seg_start += segments[seg].2;
                seg += 1;
            }
            let (a, b, len) = segments[seg];
            let t = ((s - seg_start) / len).clamp(0.0, 1.0);
            let heading = a.bearing_to(b);
            out.push(Pose::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), heading));
        }
        out
    }
}
