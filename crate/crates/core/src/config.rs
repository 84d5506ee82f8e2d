//! Run configuration as flat `key = value` text.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::eval::Method;
use crate::geometry::{Pose, SensorRing};
use crate::sensor::{AntonymParams, FormulaMode, FuzzyParams, ProbParams};
use crate::sim::{SonarNoise, Transients, BUILTIN_NAMES};

/// Seed used when neither the configuration nor the environment sets one.
pub const DEFAULT_SEED: u64 = 20_090_531;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV_VAR: &str = "ANTOMAP_SEED";

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSource {
    Builtin(String),
    /// Segment-list file.
    File(PathBuf),
}

impl EnvSource {
    pub fn parse(value: &str) -> Self {
        if BUILTIN_NAMES.contains(&value) {
            EnvSource::Builtin(value.to_string())
        } else {
            EnvSource::File(PathBuf::from(value))
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            EnvSource::Builtin(n) => n.clone(),
            EnvSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub environment: EnvSource,
    /// Route override; required for file environments.
    pub waypoints: Option<Vec<Pose>>,
    pub cell_size: f64,
    /// Grid border around the environment bounds (cm).
    pub margin: f64,
    /// Reference-map wall half-width; defaults to the cell size.
    pub wall_halfwidth: Option<f64>,
    pub method: Method,
    pub correction: bool,
    pub contra_threshold: f64,
    pub antonym: AntonymParams,
    pub prob: ProbParams,
    pub fuzzy: FuzzyParams,
    pub ring: SensorRing,
    pub noise: SonarNoise,
    pub transients: Transients,
    pub step: f64,
    pub jitter_pos: f64,
    pub jitter_heading: f64,
    pub seed: u64,
    pub alpha: f64,
    pub sweep_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            environment: EnvSource::Builtin("office".into()),
            waypoints: None,
            cell_size: 10.0,
            margin: 50.0,
            wall_halfwidth: None,
            method: Method::Antonym,
            correction: true,
            contra_threshold: 0.0,
            antonym: AntonymParams::default(),
            prob: ProbParams::default(),
            fuzzy: FuzzyParams::default(),
            ring: SensorRing::default(),
            noise: SonarNoise::default(),
            transients: Transients::default(),
            step: crate::sim::DEFAULT_STEP,
            jitter_pos: 10.0,
            jitter_heading: 5f64.to_radians(),
            seed: DEFAULT_SEED,
            alpha: 1.0 / 3.0,
            sweep_points: 30,
        }
    }
}

fn num(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::invalid("config", format!("{key}: `{value}` is not a number")))
}

fn int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::invalid("config", format!("{key}: `{value}` is not an integer")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::invalid("config", format!("{key}: `{value}` is not a boolean"))),
    }
}

fn mode(key: &str, value: &str) -> Result<FormulaMode> {
    FormulaMode::from_name(value.trim())
        .ok_or_else(|| Error::invalid("config", format!("{key}: expected `as-printed` or `repaired`, got `{value}`")))
}

/// `x y; x y; ...` in centimetres.
fn parse_waypoints(value: &str) -> Result<Vec<Pose>> {
    let mut out = Vec::new();
    for part in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let xy: Vec<&str> = part.split_whitespace().collect();
        if xy.len() != 2 {
            return Err(Error::invalid("config", format!("waypoints: `{part}` is not an `x y` pair")));
        }
        out.push(Pose::new(num("waypoints", xy[0])?, num("waypoints", xy[1])?, 0.0));
    }
    if out.is_empty() {
        return Err(Error::invalid("config", "waypoints: empty list"));
    }
    Ok(out)
}

impl RunConfig {
    /// Every recognised key, in the order [`RunConfig::to_text`] writes them.
    pub const KEYS: &'static [&'static str] = &[
        "environment",
        "waypoints",
        "cell_size",
        "margin",
        "wall_halfwidth",
        "method",
        "correction",
        "contra_threshold",
        "seed",
        "alpha",
        "sweep_points",
        "step",
        "jitter_pos",
        "jitter_heading",
        "antonym.delta_r",
        "antonym.delta_alpha",
        "antonym.near_mid",
        "antonym.near_slope",
        "antonym.far_mid",
        "antonym.far_slope",
        "antonym.smaller_slope",
        "antonym.near_threshold",
        "prob.rho_v",
        "prob.delta_r",
        "prob.p_o",
        "prob.p_e",
        "prob.mode",
        "fuzzy.k_o",
        "fuzzy.k_e",
        "fuzzy.delta_r",
        "fuzzy.rho_v",
        "fuzzy.mode",
        "ring.aperture",
        "ring.max_range",
        "ring.mount_radius",
        "noise.quantization",
        "noise.range_sigma",
        "noise.rebound_p_max",
        "noise.rebound_min_incidence",
        "noise.short_echo",
        "noise.rays",
        "noise.beam_half_angle",
        "noise.short_echo_margin",
        "transients.fraction",
        "transients.size",
        "transients.clearance",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "environment" => self.environment = EnvSource::parse(v),
            "waypoints" => self.waypoints = Some(parse_waypoints(v)?),
            "cell_size" => self.cell_size = num(key, v)?,
            "margin" => self.margin = num(key, v)?,
            "wall_halfwidth" => self.wall_halfwidth = Some(num(key, v)?),
            "method" => self.method = Method::from_name(v)?,
            "correction" => self.correction = boolean(key, v)?,
            "contra_threshold" => self.contra_threshold = num(key, v)?,
            "seed" => self.seed = int(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "sweep_points" => self.sweep_points = int(key, v)?,
            "step" => self.step = num(key, v)?,
            "jitter_pos" => self.jitter_pos = num(key, v)?,
            "jitter_heading" => self.jitter_heading = num(key, v)?,
            "antonym.delta_r" => self.antonym.delta_r = num(key, v)?,
            "antonym.delta_alpha" => self.antonym.delta_alpha = num(key, v)?,
            "antonym.near_mid" => self.antonym.near_mid = num(key, v)?,
            "antonym.near_slope" => self.antonym.near_slope = num(key, v)?,
            "antonym.far_mid" => self.antonym.far_mid = num(key, v)?,
            "antonym.far_slope" => self.antonym.far_slope = num(key, v)?,
            "antonym.smaller_slope" => self.antonym.smaller_slope = num(key, v)?,
            "antonym.near_threshold" => self.antonym.near_threshold = num(key, v)?,
            "prob.rho_v" => self.prob.rho_v = num(key, v)?,
            "prob.delta_r" => self.prob.delta_r = num(key, v)?,
            "prob.p_o" => self.prob.p_o = num(key, v)?,
            "prob.p_e" => self.prob.p_e = num(key, v)?,
            "prob.mode" => self.prob.mode = mode(key, v)?,
            "fuzzy.k_o" => self.fuzzy.k_o = num(key, v)?,
            "fuzzy.k_e" => self.fuzzy.k_e = num(key, v)?,
            "fuzzy.delta_r" => self.fuzzy.delta_r = num(key, v)?,
            "fuzzy.rho_v" => self.fuzzy.rho_v = num(key, v)?,
            "fuzzy.mode" => self.fuzzy.mode = mode(key, v)?,
            "ring.aperture" => self.ring.aperture = num(key, v)?,
            "ring.max_range" => self.ring.max_range = num(key, v)?,
            "ring.mount_radius" => self.ring.mount_radius = num(key, v)?,
            "noise.quantization" => self.noise.quantization = num(key, v)?,
            "noise.range_sigma" => self.noise.range_sigma = num(key, v)?,
            "noise.rebound_p_max" => self.noise.rebound_p_max = num(key, v)?,
            "noise.rebound_min_incidence" => self.noise.rebound_min_incidence = num(key, v)?,
            "noise.short_echo" => self.noise.short_echo = boolean(key, v)?,
            "noise.rays" => self.noise.rays = int(key, v)?,
            "noise.beam_half_angle" => self.noise.beam_half_angle = num(key, v)?,
            "noise.short_echo_margin" => self.noise.short_echo_margin = num(key, v)?,
            "transients.fraction" => self.transients.fraction = num(key, v)?,
            "transients.size" => self.transients.size = num(key, v)?,
            "transients.clearance" => self.transients.clearance = num(key, v)?,
            other => {
                return Err(Error::Unknown {
                    what: "config key",
                    name: other.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid("config", format!("override `{pair}` is not key=value")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Parses configuration text on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected key = value"))?;
            cfg.set(k, v).map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Replaces the seed with `value` when present.
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.seed = int(SEED_ENV_VAR, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(Error::invalid("config", "cell_size must be > 0"));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::invalid("config", "margin must be >= 0"));
        }
        if let Some(h) = self.wall_halfwidth {
            if !(h > 0.0) {
                return Err(Error::invalid("config", "wall_halfwidth must be > 0"));
            }
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::invalid("config", "alpha must be in (0, 1)"));
        }
        if self.sweep_points == 0 {
            return Err(Error::invalid("config", "sweep_points must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.contra_threshold) {
            return Err(Error::invalid("config", "contra_threshold must be in [0, 1)"));
        }
        if matches!(self.environment, EnvSource::File(_)) && self.waypoints.is_none() {
            return Err(Error::invalid("config", "file environments need `waypoints`"));
        }
        self.antonym.validate()?;
        self.prob.validate()?;
        self.fuzzy.validate()?;
        self.ring.validate()?;
        self.noise.validate()?;
        self.transients.validate()?;
        self.trajectory_template().validate()
    }

    /// Trajectory settings applied to whichever route is used.
    pub fn trajectory_template(&self) -> crate::sim::Trajectory {
        let mut t = crate::sim::Trajectory::new(self.waypoints.clone().unwrap_or_else(|| vec![Pose::new(0.0, 0.0, 0.0)]));
        t.step = self.step;
        t.jitter_pos = self.jitter_pos;
        t.jitter_heading = self.jitter_heading;
        t
    }

    pub fn wall_halfwidth(&self) -> f64 {
        self.wall_halfwidth.unwrap_or(self.cell_size)
    }

    /// Writes the full configuration; parsing it back yields an equal value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let env = match &self.environment {
            EnvSource::Builtin(n) => n.clone(),
            EnvSource::File(p) => p.display().to_string(),
        };
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("environment", env);
        if let Some(w) = &self.waypoints {
            kv("waypoints", w.iter().map(|p| format!("{} {}", p.x, p.y)).collect::<Vec<_>>().join("; "));
        }
        kv("cell_size", self.cell_size.to_string());
        kv("margin", self.margin.to_string());
        if let Some(h) = self.wall_halfwidth {
            kv("wall_halfwidth", h.to_string());
        }
        kv("method", self.method.name().into());
        kv("correction", self.correction.to_string());
        kv("contra_threshold", self.contra_threshold.to_string());
        kv("seed", self.seed.to_string());
        kv("alpha", self.alpha.to_string());
        kv("sweep_points", self.sweep_points.to_string());
        kv("step", self.step.to_string());
        kv("jitter_pos", self.jitter_pos.to_string());
        kv("jitter_heading", self.jitter_heading.to_string());
        let a = &self.antonym;
        kv("antonym.delta_r", a.delta_r.to_string());
        kv("antonym.delta_alpha", a.delta_alpha.to_string());
        kv("antonym.near_mid", a.near_mid.to_string());
        kv("antonym.near_slope", a.near_slope.to_string());
        kv("antonym.far_mid", a.far_mid.to_string());
        kv("antonym.far_slope", a.far_slope.to_string());
        kv("antonym.smaller_slope", a.smaller_slope.to_string());
        kv("antonym.near_threshold", a.near_threshold.to_string());
        let p = &self.prob;
        kv("prob.rho_v", p.rho_v.to_string());
        kv("prob.delta_r", p.delta_r.to_string());
        kv("prob.p_o", p.p_o.to_string());
        kv("prob.p_e", p.p_e.to_string());
        kv("prob.mode", p.mode.name().into());
        let f = &self.fuzzy;
        kv("fuzzy.k_o", f.k_o.to_string());
        kv("fuzzy.k_e", f.k_e.to_string());
        kv("fuzzy.delta_r", f.delta_r.to_string());
        kv("fuzzy.rho_v", f.rho_v.to_string());
        kv("fuzzy.mode", f.mode.name().into());
        kv("ring.aperture", self.ring.aperture.to_string());
        kv("ring.max_range", self.ring.max_range.to_string());
        kv("ring.mount_radius", self.ring.mount_radius.to_string());
        let n = &self.noise;
        kv("noise.quantization", n.quantization.to_string());
        kv("noise.range_sigma", n.range_sigma.to_string());
        kv("noise.rebound_p_max", n.rebound_p_max.to_string());
        kv("noise.rebound_min_incidence", n.rebound_min_incidence.to_string());
        kv("noise.short_echo", n.short_echo.to_string());
        kv("noise.rays", n.rays.to_string());
        kv("noise.beam_half_angle", n.beam_half_angle.to_string());
        kv("noise.short_echo_margin", n.short_echo_margin.to_string());
        let t = &self.transients;
        kv("transients.fraction", t.fraction.to_string());
        kv("transients.size", t.size.to_string());
        kv("transients.clearance", t.clearance.to_string());
        s
    }
}
