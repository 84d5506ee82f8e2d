use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point, Pose, RangeTag, ScalarGrid};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Material {
    /// Polished surface; grazing echoes may bounce away.
    Specular,
    Diffuse,
}

impl Material {
    pub fn name(self) -> &'static str {
        match self {
            Material::Specular => "specular",
            Material::Diffuse => "diffuse",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "specular" => Some(Material::Specular),
            "diffuse" => Some(Material::Diffuse),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub a: Point,
    pub b: Point,
    pub material: Material,
}

impl Wall {
    pub fn new(a: Point, b: Point, material: Material) -> Self {
        Self { a, b, material }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        let (ex, ey) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = ex * ex + ey * ey;
        let t = (((p.x - self.a.x) * ex + (p.y - self.a.y) * ey) / len2).clamp(0.0, 1.0);
        p.distance(Point::new(self.a.x + t * ex, self.a.y + t * ey))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }
}

/// A static 2-D world made of wall segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub name: String,
    pub walls: Vec<Wall>,
    /// Extent of the world; its interior is free space unless inside a solid.
    pub bounds: Rect,
    /// Enclosed regions the robot cannot see into, such as a block of rooms.
    pub solids: Vec<Rect>,
}

const BOUNDS_SLACK: f64 = 1e-9;

impl Environment {
    pub fn new(name: impl Into<String>, walls: Vec<Wall>, bounds: Rect) -> Result<Self> {
        let env = Self {
            name: name.into(),
            walls,
            bounds,
            solids: Vec::new(),
        };
        env.validate()?;
        Ok(env)
    }

    /// Environment whose bounds are the bounding box of its walls.
    pub fn from_walls(name: impl Into<String>, walls: Vec<Wall>) -> Result<Self> {
        if walls.is_empty() {
            return Err(Error::invalid("environment", "no walls"));
        }
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for w in &walls {
            for p in [w.a, w.b] {
                min = Point::new(min.x.min(p.x), min.y.min(p.y));
                max = Point::new(max.x.max(p.x), max.y.max(p.y));
            }
        }
        Self::new(name, walls, Rect::new(min, max))
    }

    pub fn with_solids(mut self, solids: Vec<Rect>) -> Result<Self> {
        self.solids = solids;
        self.validate()?;
        Ok(self)
    }

    /// Whether `p` is open floor: inside the bounds and outside every solid.
    pub fn is_free(&self, p: Point) -> bool {
        self.bounds.contains_strictly(p) && !self.solids.iter().any(|s| s.contains(p))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bounds.max.x > self.bounds.min.x && self.bounds.max.y > self.bounds.min.y) {
            return Err(Error::invalid("environment", "bounds have no area"));
        }
        let grown = Rect::new(
            Point::new(self.bounds.min.x - BOUNDS_SLACK, self.bounds.min.y - BOUNDS_SLACK),
            Point::new(self.bounds.max.x + BOUNDS_SLACK, self.bounds.max.y + BOUNDS_SLACK),
        );
        for (i, w) in self.walls.iter().enumerate() {
            if !(w.length() > 0.0) {
                return Err(Error::invalid("environment", format!("wall {i} has zero length")));
            }
            if !grown.contains(w.a) || !grown.contains(w.b) {
                return Err(Error::invalid("environment", format!("wall {i} lies outside the bounds")));
            }
        }
        for (i, s) in self.solids.iter().enumerate() {
            if !(s.max.x > s.min.x && s.max.y > s.min.y) || !grown.contains(s.min) || !grown.contains(s.max) {
                return Err(Error::invalid("environment", format!("solid {i} is empty or outside the bounds")));
            }
        }
        Ok(())
    }

    /// Grid covering the bounds plus `margin` on every side.
    pub fn grid_spec(&self, cell_size: f64, margin: f64) -> Result<GridSpec> {
        GridSpec::covering(self.bounds.min, self.bounds.max, margin, cell_size)
    }
}

fn rect_walls(x0: f64, y0: f64, x1: f64, y1: f64, materials: [Material; 4]) -> Vec<Wall> {
    // bottom, right, top, left
    vec![
        Wall::new(Point::new(x0, y0), Point::new(x1, y0), materials[0]),
        Wall::new(Point::new(x1, y0), Point::new(x1, y1), materials[1]),
        Wall::new(Point::new(x1, y1), Point::new(x0, y1), materials[2]),
        Wall::new(Point::new(x0, y1), Point::new(x0, y0), materials[3]),
    ]
}

/// Names accepted by [`builtin_environment`].
pub const BUILTIN_NAMES: [&str; 3] = ["office", "hall", "corridor"];

/// Office: a 2 × 2.5 m navigable area bounded by polished furniture, except
/// for the upper wall.
fn office() -> Environment {
    use Material::*;
    let walls = rect_walls(0.0, 0.0, 200.0, 250.0, [Specular, Specular, Diffuse, Specular]);
    Environment::new("office", walls, Rect::new(Point::new(0.0, 0.0), Point::new(200.0, 250.0))).expect("valid office")
}

/// Hall: 6 × 8 m, no furniture, walls covered by smooth panels.
fn hall() -> Environment {
    let walls = rect_walls(0.0, 0.0, 600.0, 800.0, [Material::Specular; 4]);
    Environment::new("hall", walls, Rect::new(Point::new(0.0, 0.0), Point::new(600.0, 800.0))).expect("valid hall")
}

/// Corridor: a 3 m wide hallway looping around a block of rooms inside a
/// 10 × 30 m outline, with smooth panels on every wall and columns and benches
/// along the right-hand leg.
fn corridor() -> Environment {
    let mut walls = rect_walls(0.0, 0.0, 1000.0, 3000.0, [Material::Specular; 4]);
    walls.extend(rect_walls(300.0, 300.0, 700.0, 2700.0, [Material::Specular; 4]));
    for i in 0..7 {
        let y = 400.0 + 350.0 * i as f64;
        let (x0, x1) = (930.0, 950.0);
        walls.extend(rect_walls(x0, y, x1, y + 20.0, [Material::Diffuse; 4]));
        if i < 6 {
            // bench front between this column and the next
            walls.push(Wall::new(
                Point::new(920.0, y + 100.0),
                Point::new(920.0, y + 250.0),
                Material::Diffuse,
            ));
        }
    }
    Environment::new("corridor", walls, Rect::new(Point::new(0.0, 0.0), Point::new(1000.0, 3000.0)))
        .and_then(|e| e.with_solids(vec![Rect::new(Point::new(300.0, 300.0), Point::new(700.0, 2700.0))]))
        .expect("valid corridor")
}

pub fn builtin_environment(name: &str) -> Result<Environment> {
    match name {
        "office" => Ok(office()),
        "hall" => Ok(hall()),
        "corridor" => Ok(corridor()),
        _ => Err(Error::Unknown {
            what: "environment",
            name: name.to_string(),
        }),
    }
}

fn waypoints(pts: &[(f64, f64)]) -> Vec<Pose> {
    pts.iter().map(|&(x, y)| Pose::new(x, y, 0.0)).collect()
}

const HALL_ROUTE_SEED: u64 = 8;
const HALL_TRIPS: usize = 6;

/// Default route through a built-in environment, passing walls and corners
/// both close up and from a distance.
pub fn builtin_trajectory(name: &str) -> Result<Trajectory> {
    let pts: Vec<(f64, f64)> = match name {
        "office" => vec![
            (45.0, 45.0),
            (155.0, 45.0),
            (155.0, 205.0),
            (45.0, 205.0),
            (45.0, 45.0),
            (155.0, 205.0),
            (45.0, 205.0),
            (155.0, 45.0),
        ],
        "hall" => {
            // figure eight through the diagonals of a rectangle, then trips to
            // random spots and back to the start
            let start = (100.0, 100.0);
            let mut pts = vec![start, (500.0, 700.0), (500.0, 100.0), (100.0, 700.0), start];
            let mut rng = ChaCha8Rng::seed_from_u64(HALL_ROUTE_SEED);
            for _ in 0..HALL_TRIPS {
                pts.push((rng.random_range(80.0..520.0), rng.random_range(80.0..720.0)));
                pts.push(start);
            }
            pts
        }
        // a lap near the outer wall, then one the other way near the inner block
        "corridor" => vec![
            (100.0, 100.0),
            (900.0, 100.0),
            (900.0, 2900.0),
            (100.0, 2900.0),
            (100.0, 100.0),
            (200.0, 200.0),
            (200.0, 2800.0),
            (800.0, 2800.0),
            (800.0, 200.0),
            (200.0, 200.0),
        ],
        _ => {
            return Err(Error::Unknown {
                what: "environment",
                name: name.to_string(),
            })
        }
    };
    Ok(Trajectory::new(waypoints(&pts)))
}

/// Ternary ground truth: 1 near walls, −1 in the free interior, 0 elsewhere.
pub fn reference_map(env: &Environment, spec: &GridSpec, wall_halfwidth: f64) -> ScalarGrid {
    ScalarGrid::from_fn(*spec, RangeTag::Ternary, |idx| {
        let c = spec.cell_center(idx);
        if env.walls.iter().any(|w| w.distance_to(c) <= wall_halfwidth) {
            1.0
        } else if env.is_free(c) {
            -1.0
        } else {
            0.0
        }
    })
}
