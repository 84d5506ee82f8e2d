//! Seeded 2-D sonar simulator standing in for recorded robot runs.

pub mod environment;
pub mod sonar;
pub mod trajectory;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, Pose, SensorRing, TraceRecord, SENSOR_COUNT};

pub use environment::{builtin_environment, builtin_trajectory, reference_map, Environment, Material, Rect, Wall, BUILTIN_NAMES};
pub use sonar::{cast_ray, cast_sonar, EchoClass, Hit, SonarNoise, SonarReading};
pub use trajectory::{Trajectory, DEFAULT_STEP, MAX_JITTER_HEADING, MAX_JITTER_POS};

/// Passers-by: small square obstacles present during some records only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transients {
    /// Fraction of records in which one obstacle appears.
    pub fraction: f64,
    /// Side of the square (cm).
    pub size: f64,
    /// Minimum distance between the robot and the obstacle centre (cm).
    pub clearance: f64,
}

impl Default for Transients {
    fn default() -> Self {
        Self {
            fraction: 0.0,
            size: 30.0,
            clearance: 60.0,
        }
    }
}

impl Transients {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::invalid("transients", "fraction must be in [0, 1]"));
        }
        if !(self.size > 0.0 && self.size.is_finite()) {
            return Err(Error::invalid("transients", "size must be > 0"));
        }
        if !(self.clearance >= 0.0 && self.clearance.is_finite()) {
            return Err(Error::invalid("transients", "clearance must be >= 0"));
        }
        Ok(())
    }
}

/// Generated readings plus the ground truth that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub records: Vec<TraceRecord>,
    /// Per-reading class, parallel to `records`.
    pub tags: Vec<[EchoClass; SENSOR_COUNT]>,
    /// Poses the readings were actually fired from.
    pub true_poses: Vec<Pose>,
}

pub fn generate_trace(env: &Environment, traj: &Trajectory, ring: &SensorRing, noise: &SonarNoise, seed: u64) -> Result<SimTrace> {
    generate_trace_with(env, traj, ring, noise, &Transients::default(), seed)
}

pub fn generate_trace_with(
    env: &Environment,
    traj: &Trajectory,
    ring: &SensorRing,
    noise: &SonarNoise,
    transients: &Transients,
    seed: u64,
) -> Result<SimTrace> {
    env.validate()?;
    traj.validate()?;
    ring.validate()?;
    noise.validate()?;
    transients.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poses = traj.sample_poses();
    let mut out = SimTrace {
        records: Vec::with_capacity(poses.len()),
        tags: Vec::with_capacity(poses.len()),
        true_poses: Vec::with_capacity(poses.len()),
    };
    for (i, truth) in poses.into_iter().enumerate() {
        if !env.bounds.contains(truth.position()) {
            return Err(Error::invalid("trajectory", format!("pose {i} lies outside the environment bounds")));
        }
        let r = traj.jitter_pos * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let dh = traj.jitter_heading * (2.0 * rng.random::<f64>() - 1.0);
        let recorded = Pose::new(truth.x + r * theta.cos(), truth.y + r * theta.sin(), truth.heading + dh);

        let mut walls = env.walls.clone();
        if transients.fraction > 0.0 && rng.random::<f64>() < transients.fraction {
            if let Some(c) = place_transient(env, truth.position(), transients, &mut rng) {
                let h = transients.size / 2.0;
                let corners = [
                    Point::new(c.x - h, c.y - h),
                    Point::new(c.x + h, c.y - h),
                    Point::new(c.x + h, c.y + h),
                    Point::new(c.x - h, c.y + h),
                ];
                for j in 0..4 {
                    walls.push(Wall::new(corners[j], corners[(j + 1) % 4], Material::Diffuse));
                }
            }
        }

        let mut ranges = [0.0; SENSOR_COUNT];
        let mut tags = [EchoClass::Clean; SENSOR_COUNT];
        for k in 0..SENSOR_COUNT {
            let origin = ring.sensor_position(&truth, k);
            let reading = sonar::cast_in(&walls, origin, ring.beam_axis(&truth, k), ring.max_range, noise, &mut rng);
            ranges[k] = reading.range;
            tags[k] = reading.class;
        }
        out.records.push(TraceRecord {
            pose: recorded,
            ranges,
            timestamp_index: i,
        });
        out.tags.push(tags);
        out.true_poses.push(truth);
    }
    Ok(out)
}

fn place_transient(env: &Environment, robot: Point, t: &Transients, rng: &mut impl Rng) -> Option<Point> {
    let h = t.size / 2.0;
    let (b0, b1) = (env.bounds.min, env.bounds.max);
    if b1.x - b0.x <= t.size || b1.y - b0.y <= t.size {
        return None;
    }
    for _ in 0..20 {
        let c = Point::new(rng.random_range(b0.x + h..b1.x - h), rng.random_range(b0.y + h..b1.y - h));
        if c.distance(robot) >= t.clearance + h {
            return Some(c);
        }
    }
    None
}
