//! World and grid geometry shared by every mapper.
//!
//! Lengths are in centimetres and angles in radians, counter-clockwise from
//! the world +x axis. Grid rows follow +y and columns follow +x; cell `(0, 0)`
//! has its lower-left corner at the grid origin.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Number of sonars on the ring.
pub const SENSOR_COUNT: usize = 12;

/// Default sentinel reported when no echo returns.
pub const DEFAULT_MAX_RANGE: f64 = 600.0;

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing from `self` towards `other`.
    pub fn bearing_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn offset(self, angle: f64, length: f64) -> Point {
        Point::new(self.x + length * angle.cos(), self.y + length * angle.sin())
    }
}

/// Robot pose. The heading is kept normalized to `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One pose plus the twelve sonar ranges fired from it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub pose: Pose,
    pub ranges: [f64; SENSOR_COUNT],
    pub timestamp_index: usize,
}

impl TraceRecord {
    pub fn validate(&self) -> Result<()> {
        for (k, r) in self.ranges.iter().enumerate() {
            if !r.is_finite() || *r < 0.0 {
                return Err(Error::invalid(
                    "trace record",
                    format!("record {}: range d{} = {} is not a non-negative number", self.timestamp_index, k + 1, r),
                ));
            }
        }
        if !(self.pose.x.is_finite() && self.pose.y.is_finite() && self.pose.heading.is_finite()) {
            return Err(Error::invalid(
                "trace record",
                format!("record {}: non-finite pose", self.timestamp_index),
            ));
        }
        Ok(())
    }
}

/// The sonar ring: twelve transducers evenly spaced around the robot.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorRing {
    pub bearing_offsets: [f64; SENSOR_COUNT],
    /// Half-width of the cone used when projecting a reading on the grid.
    pub aperture: f64,
    pub max_range: f64,
    /// Distance of each transducer from the robot centre.
    pub mount_radius: f64,
}

impl Default for SensorRing {
    fn default() -> Self {
        Self::evenly_spaced(0.2618, DEFAULT_MAX_RANGE, 0.0)
    }
}

impl SensorRing {
    pub fn evenly_spaced(aperture: f64, max_range: f64, mount_radius: f64) -> Self {
        let step = TAU / SENSOR_COUNT as f64;
        let mut bearing_offsets = [0.0; SENSOR_COUNT];
        for (k, b) in bearing_offsets.iter_mut().enumerate() {
            *b = normalize_angle(k as f64 * step);
        }
        Self {
            bearing_offsets,
            aperture,
            max_range,
            mount_radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0 && self.aperture.is_finite()) {
            return Err(Error::invalid("sensor ring", "aperture must be > 0"));
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return Err(Error::invalid("sensor ring", "max_range must be > 0"));
        }
        if !(self.mount_radius >= 0.0 && self.mount_radius.is_finite()) {
            return Err(Error::invalid("sensor ring", "mount_radius must be >= 0"));
        }
        Ok(())
    }

    /// World direction of the beam axis of sensor `k`.
    pub fn beam_axis(&self, pose: &Pose, k: usize) -> f64 {
        normalize_angle(pose.heading + self.bearing_offsets[k])
    }

    pub fn sensor_position(&self, pose: &Pose, k: usize) -> Point {
        pose.position().offset(self.beam_axis(pose, k), self.mount_radius)
    }

    pub fn is_max_range(&self, range: f64) -> bool {
        range >= self.max_range
    }
}

/// Grid placement and resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// World position of the lower-left corner of cell `(0, 0)`.
    pub origin: Point,
    pub cell_size: f64,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl GridSpec {
    pub fn new(origin: Point, cell_size: f64, rows: usize, cols: usize) -> Result<Self> {
        let spec = Self {
            origin,
            cell_size,
            rows,
            cols,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Smallest grid with the given cell size covering `[min, max]` grown by `margin`.
    pub fn covering(min: Point, max: Point, margin: f64, cell_size: f64) -> Result<Self> {
        let origin = Point::new(min.x - margin, min.y - margin);
        let width = max.x - min.x + 2.0 * margin;
        let height = max.y - min.y + 2.0 * margin;
        let cols = (width / cell_size).ceil().max(1.0) as usize;
        let rows = (height / cell_size).ceil().max(1.0) as usize;
        Self::new(origin, cell_size, rows, cols)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(Error::invalid("grid", "cell_size must be > 0"));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::invalid("grid", "rows and cols must be >= 1"));
        }
        if !(self.origin.x.is_finite() && self.origin.y.is_finite()) {
            return Err(Error::invalid("grid", "origin must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_center(&self, idx: CellIndex) -> Point {
        Point::new(
            self.origin.x + (idx.col as f64 + 0.5) * self.cell_size,
            self.origin.y + (idx.row as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn flat(&self, idx: CellIndex) -> usize {
        idx.row * self.cols + idx.col
    }

    pub fn unflat(&self, i: usize) -> CellIndex {
        CellIndex::new(i / self.cols, i % self.cols)
    }

    pub fn indices(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.len()).map(|i| self.unflat(i))
    }
}

/// Cell containing `p`, or `None` when `p` is outside the grid rectangle.
///
/// A point on an interior edge belongs to the higher-index cell.
pub fn world_to_cell(p: Point, spec: &GridSpec) -> Option<CellIndex> {
    let col = ((p.x - spec.origin.x) / spec.cell_size).floor();
    let row = ((p.y - spec.origin.y) / spec.cell_size).floor();
    if col < 0.0 || row < 0.0 || !col.is_finite() || !row.is_finite() {
        return None;
    }
    let (row, col) = (row as usize, col as usize);
    (row < spec.rows && col < spec.cols).then_some(CellIndex::new(row, col))
}

/// Which interval a grid's values are constrained to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeTag {
    /// `[0, 1]`
    Unit,
    /// `[-1, 1]`
    Signed,
    /// `{-1, 0, 1}`
    Ternary,
    /// `[0, ∞)`, used by evidence accumulators.
    NonNegative,
}

impl RangeTag {
    pub fn contains(self, v: f64) -> bool {
        match self {
            RangeTag::Unit => (0.0..=1.0).contains(&v),
            RangeTag::Signed => (-1.0..=1.0).contains(&v),
            RangeTag::Ternary => v == -1.0 || v == 0.0 || v == 1.0,
            RangeTag::NonNegative => v >= 0.0 && v.is_finite(),
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            RangeTag::Unit => (0.0, 1.0),
            RangeTag::Signed | RangeTag::Ternary => (-1.0, 1.0),
            RangeTag::NonNegative => (0.0, f64::INFINITY),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RangeTag::Unit => "unit",
            RangeTag::Signed => "signed",
            RangeTag::Ternary => "ternary",
            RangeTag::NonNegative => "nonnegative",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(RangeTag::Unit),
            "signed" => Some(RangeTag::Signed),
            "ternary" => Some(RangeTag::Ternary),
            "nonnegative" => Some(RangeTag::NonNegative),
            _ => None,
        }
    }
}

/// Dense row-major grid of reals with world geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    spec: GridSpec,
    values: Vec<f64>,
    range: RangeTag,
}

impl ScalarGrid {
    pub fn filled(spec: GridSpec, range: RangeTag, value: f64) -> Self {
        debug_assert!(range.contains(value));
        Self {
            spec,
            values: vec![value; spec.len()],
            range,
        }
    }

    pub fn from_values(spec: GridSpec, range: RangeTag, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid(
                "grid",
                format!("expected {} values, got {}", spec.len(), values.len()),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !range.contains(**v)) {
            return Err(Error::invalid(
                "grid",
                format!("cell {} value {} outside {} range", i, v, range.name()),
            ));
        }
        Ok(Self { spec, values, range })
    }

    /// Builds a grid by evaluating `f` at every cell.
    pub fn from_fn(spec: GridSpec, range: RangeTag, mut f: impl FnMut(CellIndex) -> f64) -> Self {
        let values = (0..spec.len())
            .map(|i| {
                let v = f(spec.unflat(i));
                debug_assert!(range.contains(v), "value {v} outside {range:?}");
                v
            })
            .collect();
        Self { spec, values, range }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn range(&self) -> RangeTag {
        self.range
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: CellIndex) -> f64 {
        self.values[self.spec.flat(idx)]
    }

    pub fn set(&mut self, idx: CellIndex, value: f64) {
        debug_assert!(self.range.contains(value), "value {value} outside {:?}", self.range);
        let i = self.spec.flat(idx);
        self.values[i] = value;
    }

    pub fn add(&mut self, idx: CellIndex, delta: f64) {
        let i = self.spec.flat(idx);
        self.values[i] += delta;
    }

    /// Applies `f` cell by cell, producing a grid with a new range tag.
    pub fn map(&self, range: RangeTag, f: impl Fn(f64) -> f64) -> ScalarGrid {
        ScalarGrid::from_fn(self.spec, range, |idx| f(self.get(idx)))
    }

    pub fn zip_map(&self, other: &ScalarGrid, range: RangeTag, f: impl Fn(f64, f64) -> f64) -> Result<ScalarGrid> {
        same_spec(self, other)?;
        Ok(ScalarGrid::from_fn(self.spec, range, |idx| f(self.get(idx), other.get(idx))))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub(crate) fn same_spec(a: &ScalarGrid, b: &ScalarGrid) -> Result<()> {
    if a.spec() != b.spec() {
        return Err(Error::invalid("grid", "grids do not share a GridSpec"));
    }
    Ok(())
}

/// Where a cell sits relative to one sonar beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Sensor-to-cell-centre distance (cm).
    pub d: f64,
    /// Absolute angle between the beam axis and the bearing to the cell.
    pub offset: f64,
}

pub fn beam_geometry(pose: &Pose, sensor: usize, ring: &SensorRing, cell_center: Point) -> BeamGeometry {
    let origin = ring.sensor_position(pose, sensor);
    let d = origin.distance(cell_center);
    if d == 0.0 {
        return BeamGeometry { d, offset: 0.0 };
    }
    let axis = ring.beam_axis(pose, sensor);
    let offset = normalize_angle(origin.bearing_to(cell_center) - axis).abs();
    BeamGeometry { d, offset }
}

/// A cell inside a beam's sector together with its geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCell {
    pub index: CellIndex,
    pub geometry: BeamGeometry,
}

/// Membership predicate of the projected sector.
pub fn in_cone(g: &BeamGeometry, range: f64, delta_r: f64, aperture: f64) -> bool {
    g.d <= range + delta_r && g.offset <= aperture
}

/// In-bounds cells whose centres lie within `range + delta_r` of the sensor
/// and within `ring.aperture` of the beam axis, in row-major order.
pub fn cells_in_cone(
    pose: &Pose,
    sensor: usize,
    ring: &SensorRing,
    range: f64,
    delta_r: f64,
    spec: &GridSpec,
) -> Vec<ConeCell> {
    let origin = ring.sensor_position(pose, sensor);
    let reach = range + delta_r;
    let cs = spec.cell_size;
    // centres within `reach` lie inside this index box
    let lo = |v: f64, o: f64| (((v - reach - o) / cs).floor() - 1.0).max(0.0) as usize;
    let hi = |v: f64, o: f64, n: usize| ((((v + reach - o) / cs).floor() + 1.0).max(-1.0) as isize).min(n as isize - 1);
    let (c0, c1) = (lo(origin.x, spec.origin.x), hi(origin.x, spec.origin.x, spec.cols));
    let (r0, r1) = (lo(origin.y, spec.origin.y), hi(origin.y, spec.origin.y, spec.rows));
    let mut out = Vec::new();
    if c1 < 0 || r1 < 0 {
        return out;
    }
    for row in r0..=r1 as usize {
        for col in c0..=c1 as usize {
            let index = CellIndex::new(row, col);
            let geometry = beam_geometry(pose, sensor, ring, spec.cell_center(index));
            if in_cone(&geometry, range, delta_r, ring.aperture) {
                out.push(ConeCell { index, geometry });
            }
        }
    }
    out
}
