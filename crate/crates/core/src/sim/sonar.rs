use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Point, Pose, SensorRing};

use super::environment::{Environment, Material, Wall};

/// Ground-truth class of a simulated reading. Never shown to the mappers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EchoClass {
    Clean,
    /// Longer than the axis distance after a specular bounce.
    Rebound,
    /// Shorter than the axis distance, returned from the edge of the cone.
    ShortEcho,
    MaxRange,
}

impl EchoClass {
    pub fn name(self) -> &'static str {
        match self {
            EchoClass::Clean => "clean",
            EchoClass::Rebound => "rebound",
            EchoClass::ShortEcho => "short-echo",
            EchoClass::MaxRange => "max-range",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "clean" => Some(EchoClass::Clean),
            "rebound" => Some(EchoClass::Rebound),
            "short-echo" => Some(EchoClass::ShortEcho),
            "max-range" => Some(EchoClass::MaxRange),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SonarNoise {
    /// Range resolution (cm).
    pub quantization: f64,
    /// Standard deviation of the additive range noise (cm).
    pub range_sigma: f64,
    /// Rebound probability at grazing incidence on a specular wall.
    pub rebound_p_max: f64,
    /// Incidence below which specular walls always echo back (rad).
    pub rebound_min_incidence: f64,
    /// Let cone-edge rays report their own, shorter distance.
    pub short_echo: bool,
    /// Rays cast across the beam.
    pub rays: usize,
    /// Half-angle covered by the ray fan (rad).
    pub beam_half_angle: f64,
    /// A reading this much shorter than the axis distance counts as a short echo (cm).
    pub short_echo_margin: f64,
}

impl Default for SonarNoise {
    fn default() -> Self {
        Self {
            quantization: 4.0,
            range_sigma: 2.0,
            rebound_p_max: 0.6,
            rebound_min_incidence: 0.2618,
            short_echo: true,
            rays: 9,
            beam_half_angle: 0.2618,
            short_echo_margin: 10.0,
        }
    }
}

impl SonarNoise {
    /// Exact cone-minimum readings: no range noise and no rebounds.
    pub fn noiseless() -> Self {
        Self {
            range_sigma: 0.0,
            rebound_p_max: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.quantization > 0.0 && self.quantization.is_finite()) {
            return Err(Error::invalid("sonar noise", "quantization must be > 0"));
        }
        if !(self.range_sigma >= 0.0 && self.range_sigma.is_finite()) {
            return Err(Error::invalid("sonar noise", "range_sigma must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.rebound_p_max) {
            return Err(Error::invalid("sonar noise", "rebound_p_max must be in [0, 1]"));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.rebound_min_incidence) {
            return Err(Error::invalid("sonar noise", "rebound_min_incidence must be in [0, π/2)"));
        }
        if self.rays == 0 {
            return Err(Error::invalid("sonar noise", "rays must be >= 1"));
        }
        if !(self.beam_half_angle >= 0.0 && self.beam_half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid("sonar noise", "beam_half_angle must be in [0, π/2)"));
        }
        if !(self.short_echo_margin >= 0.0 && self.short_echo_margin.is_finite()) {
            return Err(Error::invalid("sonar noise", "short_echo_margin must be >= 0"));
        }
        Ok(())
    }

    /// Chance that a hit at `incidence` bounces away instead of echoing.
    pub fn rebound_prob(&self, material: Material, incidence: f64) -> f64 {
        if material == Material::Diffuse || incidence <= self.rebound_min_incidence {
            return 0.0;
        }
        let span = std::f64::consts::FRAC_PI_2 - self.rebound_min_incidence;
        (self.rebound_p_max * (incidence - self.rebound_min_incidence) / span).clamp(0.0, self.rebound_p_max)
    }

    /// Ray directions relative to the beam axis, evenly spread over the fan.
    fn fan(&self) -> Vec<f64> {
        if self.rays == 1 {
            return vec![0.0];
        }
        let n = (self.rays - 1) as f64;
        (0..self.rays)
            .map(|i| -self.beam_half_angle + 2.0 * self.beam_half_angle * i as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub distance: f64,
    pub wall: usize,
    pub point: Point,
    /// Angle between the ray and the wall normal.
    pub incidence: f64,
    pub normal: (f64, f64),
}

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Nearest wall hit by the ray `origin + t·(cos θ, sin θ)`, `t > 0`.
pub fn cast_ray(walls: &[Wall], origin: Point, angle: f64, skip: Option<usize>) -> Option<Hit> {
    let (ux, uy) = (angle.cos(), angle.sin());
    let mut best: Option<Hit> = None;
    for (i, w) in walls.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let (ex, ey) = (w.b.x - w.a.x, w.b.y - w.a.y);
        let denom = cross(ux, uy, ex, ey);
        if denom.abs() < 1e-12 {
            continue;
        }
        let (qx, qy) = (w.a.x - origin.x, w.a.y - origin.y);
        let t = cross(qx, qy, ex, ey) / denom;
        let s = cross(qx, qy, ux, uy) / denom;
        // a little slack so rays aimed at a corner do not slip past it
        if t <= 1e-9 || !(-1e-9..=1.0 + 1e-9).contains(&s) {
            continue;
        }
        if best.is_some_and(|b| b.distance <= t) {
            continue;
        }
        let len = ex.hypot(ey);
        let normal = (-ey / len, ex / len);
        let cosi = (ux * normal.0 + uy * normal.1).abs().min(1.0);
        best = Some(Hit {
            distance: t,
            wall: i,
            point: Point::new(origin.x + t * ux, origin.y + t * uy),
            incidence: cosi.acos(),
            normal,
        });
    }
    best
}

/// Length of the single-bounce path the echo travels after hitting `hit`.
fn reflected_length(walls: &[Wall], angle: f64, hit: &Hit, max_range: f64) -> f64 {
    let (ux, uy) = (angle.cos(), angle.sin());
    let dot = ux * hit.normal.0 + uy * hit.normal.1;
    let (rx, ry) = (ux - 2.0 * dot * hit.normal.0, uy - 2.0 * dot * hit.normal.1);
    match cast_ray(walls, hit.point, ry.atan2(rx), Some(hit.wall)) {
        Some(second) => (hit.distance + second.distance).min(max_range),
        None => max_range,
    }
}

/// Offsets from the axis of the corners and nearest points of walls inside
/// the beam, so that small features between fan rays are not missed.
fn feature_offsets(walls: &[Wall], origin: Point, axis: f64, half: f64, max_range: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in walls {
        let (ex, ey) = (w.b.x - w.a.x, w.b.y - w.a.y);
        let t = (((origin.x - w.a.x) * ex + (origin.y - w.a.y) * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
        for p in [w.a, w.b, Point::new(w.a.x + t * ex, w.a.y + t * ey)] {
            let d = origin.distance(p);
            if d == 0.0 || d > max_range {
                continue;
            }
            let off = normalize_angle(origin.bearing_to(p) - axis);
            if off.abs() <= half {
                out.push(off);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonarReading {
    pub range: f64,
    pub class: EchoClass,
    /// Noise-free distance along the beam axis, capped at the max range.
    pub axis_distance: f64,
}

pub(crate) fn cast_in(
    walls: &[Wall],
    origin: Point,
    axis: f64,
    max_range: f64,
    noise: &SonarNoise,
    rng: &mut impl Rng,
) -> SonarReading {
    let rebound_draw: f64 = rng.random();
    let jitter = if noise.range_sigma > 0.0 {
        Normal::new(0.0, noise.range_sigma).expect("sigma validated").sample(rng)
    } else {
        0.0
    };

    let axis_hit = cast_ray(walls, origin, axis, None);
    let axis_distance = axis_hit.map_or(max_range, |h| h.distance.min(max_range));
    let rebound = axis_hit
        .is_some_and(|h| rebound_draw < noise.rebound_prob(walls[h.wall].material, h.incidence));

    let mut fan = if noise.short_echo { noise.fan() } else { vec![0.0] };
    if noise.short_echo {
        fan.extend(feature_offsets(walls, origin, axis, noise.beam_half_angle, max_range));
    }
    let mut nominal = max_range;
    for &da in &fan {
        let angle = axis + da;
        let Some(hit) = cast_ray(walls, origin, angle, None) else {
            continue;
        };
        // a bounce takes the whole beam off every polished surface it meets
        let bounces = rebound && walls[hit.wall].material == Material::Specular;
        let d = if bounces {
            reflected_length(walls, angle, &hit, max_range)
        } else {
            hit.distance
        };
        nominal = nominal.min(d);
    }

    let q = noise.quantization;
    let range = ((nominal + jitter).clamp(0.0, max_range) / q).round() * q;
    let range = range.min(max_range);

    let class = if range >= max_range {
        EchoClass::MaxRange
    } else if rebound && range > axis_distance {
        EchoClass::Rebound
    } else if range < axis_distance - noise.short_echo_margin {
        EchoClass::ShortEcho
    } else {
        EchoClass::Clean
    };
    SonarReading {
        range,
        class,
        axis_distance,
    }
}

/// Fires sensor `k` from `pose` and returns the reading with its true class.
pub fn cast_sonar(
    env: &Environment,
    pose: &Pose,
    k: usize,
    ring: &SensorRing,
    noise: &SonarNoise,
    rng: &mut impl Rng,
) -> Result<SonarReading> {
    if !env.bounds.contains(pose.position()) {
        return Err(Error::invalid(
            "pose",
            format!("({}, {}) lies outside the environment bounds", pose.x, pose.y),
        ));
    }
    let origin = ring.sensor_position(pose, k);
    Ok(cast_in(&env.walls, origin, ring.beam_axis(pose, k), ring.max_range, noise, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::environment::{builtin_environment, Rect};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn box_env(material: Material) -> Environment {
        let w = |a: (f64, f64), b: (f64, f64)| Wall::new(Point::new(a.0, a.1), Point::new(b.0, b.1), material);
        Environment::new(
            "box",
            vec![
                w((0.0, 0.0), (400.0, 0.0)),
                w((400.0, 0.0), (400.0, 400.0)),
                w((400.0, 400.0), (0.0, 400.0)),
                w((0.0, 400.0), (0.0, 0.0)),
            ],
            Rect::new(Point::new(0.0, 0.0), Point::new(400.0, 400.0)),
        )
        .unwrap()
    }

    #[test]
    fn fan_spans_the_beam() {
        let n = SonarNoise::default();
        let fan = n.fan();
        assert_eq!(fan.len(), 9);
        assert_abs_diff_eq!(fan[4], 0.0);
        assert_abs_diff_eq!(fan[0], -0.2618);
        assert_abs_diff_eq!(fan[8], 0.2618);
        assert_eq!(SonarNoise { rays: 1, ..n.clone() }.fan(), vec![0.0]);
        assert_eq!(SonarNoise { rays: 4, ..n }.fan().len(), 4);
    }

    #[test]
    fn perpendicular_diffuse_reading_is_quantized_truth() {
        let env = box_env(Material::Diffuse);
        let ring = SensorRing::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pose = Pose::new(200.0, 150.0, 0.0);
        let noise = SonarNoise {
            short_echo: false,
            ..SonarNoise::noiseless()
        };
        let r = cast_sonar(&env, &pose, 0, &ring, &noise, &mut rng).unwrap();
        assert_eq!(r.range, 200.0);
        assert_eq!(r.class, EchoClass::Clean);
        let pose = Pose::new(201.0, 150.0, 0.0);
        let r = cast_sonar(&env, &pose, 0, &ring, &noise, &mut rng).unwrap();
        assert_eq!(r.range, 200.0);
    }

    #[test]
    fn open_space_gives_max_range() {
        let env = box_env(Material::Diffuse);
        let ring = SensorRing::evenly_spaced(0.2618, 100.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = cast_sonar(&env, &Pose::new(200.0, 200.0, 0.0), 0, &ring, &SonarNoise::default(), &mut rng).unwrap();
        assert_eq!(r.range, 100.0);
        assert_eq!(r.class, EchoClass::MaxRange);
    }

    #[test]
    fn pose_outside_bounds_is_rejected() {
        let env = box_env(Material::Diffuse);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let res = cast_sonar(&env, &Pose::new(-5.0, 10.0, 0.0), 0, &SensorRing::default(), &SonarNoise::default(), &mut rng);
        assert!(res.is_err());
    }

    #[test]
    fn grazing_specular_rebounds_are_longer() {
        let env = box_env(Material::Specular);
        let ring = SensorRing::default();
        let noise = SonarNoise {
            range_sigma: 0.0,
            rebound_p_max: 1.0,
            short_echo: false,
            ..SonarNoise::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // axis meets the bottom wall at 80° from its normal
        let axis = -(10f64.to_radians());
        let pose = Pose::new(50.0, 30.0, axis);
        let mut rebounds = 0;
        for _ in 0..200 {
            let r = cast_sonar(&env, &pose, 0, &ring, &noise, &mut rng).unwrap();
            assert!(r.class != EchoClass::ShortEcho);
            if r.class == EchoClass::Rebound {
                rebounds += 1;
                assert!(r.range > r.axis_distance);
            }
        }
        // probability at 80° is 65/75 with a unit ceiling
        assert!(rebounds > 140, "{rebounds}");
    }

    #[test]
    fn rebound_probability_shape() {
        let n = SonarNoise::default();
        assert_eq!(n.rebound_prob(Material::Diffuse, 1.2), 0.0);
        assert_eq!(n.rebound_prob(Material::Specular, 0.1), 0.0);
        assert_abs_diff_eq!(n.rebound_prob(Material::Specular, std::f64::consts::FRAC_PI_2), 0.6, epsilon = 1e-12);
        assert!(n.rebound_prob(Material::Specular, 0.8) < n.rebound_prob(Material::Specular, 1.0));
    }

    #[test]
    fn cone_edge_returns_short_echo() {
        // the axis runs along a corridor while the cone edge clips a near wall
        let env = box_env(Material::Diffuse);
        let ring = SensorRing::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pose = Pose::new(30.0, 20.0, 0.0);
        let r = cast_sonar(&env, &pose, 0, &ring, &SonarNoise::noiseless(), &mut rng).unwrap();
        assert_eq!(r.class, EchoClass::ShortEcho);
        assert!(r.range < r.axis_distance);
        let axis_only = SonarNoise {
            short_echo: false,
            ..SonarNoise::noiseless()
        };
        let r = cast_sonar(&env, &pose, 0, &ring, &axis_only, &mut rng).unwrap();
        assert_eq!(r.class, EchoClass::Clean);
        assert_eq!(r.range, 372.0);
    }

    #[test]
    fn builtin_corridor_casts() {
        let env = builtin_environment("corridor").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = cast_sonar(&env, &Pose::new(150.0, 1500.0, 0.0), 6, &SensorRing::default(), &SonarNoise::noiseless(), &mut rng).unwrap();
        assert_eq!(r.range, 152.0);
    }
}
