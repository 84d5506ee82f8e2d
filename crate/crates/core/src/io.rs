//! Plain-text file formats: traces, tag sidecars, segment lists and grids.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point, Pose, RangeTag, ScalarGrid, TraceRecord, SENSOR_COUNT};
use crate::sim::{EchoClass, Environment, Material, Wall};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------------------
// traces

const TRACE_FIELDS: usize = 3 + SENSOR_COUNT;

/// One record per line: `x,y,heading,d1,...,d12` (cm, cm, rad, cm).
pub fn parse_trace(text: &str, origin: &str) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != TRACE_FIELDS {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {TRACE_FIELDS} comma-separated numbers, found {}", fields.len()),
            ));
        }
        let mut v = [0.0; TRACE_FIELDS];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(origin, line, format!("`{f}` is not a number")))?;
        }
        let mut ranges = [0.0; SENSOR_COUNT];
        ranges.copy_from_slice(&v[3..]);
        let record = TraceRecord {
            pose: Pose::new(v[0], v[1], v[2]),
            ranges,
            timestamp_index: out.len(),
        };
        record.validate().map_err(|e| Error::parse(origin, line, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

pub fn format_trace(records: &[TraceRecord]) -> String {
    let mut s = String::from("# x_cm,y_cm,heading_rad,d1..d12_cm\n");
    for r in records {
        let _ = write!(s, "{},{},{}", r.pose.x, r.pose.y, r.pose.heading);
        for d in r.ranges {
            let _ = write!(s, ",{d}");
        }
        s.push('\n');
    }
    s
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    parse_trace(&read_text(path)?, &path.display().to_string())
}

pub fn write_trace(path: &Path, records: &[TraceRecord]) -> Result<()> {
    write_text(path, &format_trace(records))
}

/// Ground-truth reading classes, one line of twelve names per record.
pub fn format_tags(tags: &[[EchoClass; SENSOR_COUNT]]) -> String {
    let mut s = String::from("# ground-truth class of each reading\n");
    for row in tags {
        let names: Vec<&str> = row.iter().map(|t| t.name()).collect();
        s.push_str(&names.join(","));
        s.push('\n');
    }
    s
}

pub fn parse_tags(text: &str, origin: &str) -> Result<Vec<[EchoClass; SENSOR_COUNT]>> {
    let mut out = Vec::new();
    for (line, content) in data_lines(text) {
        let names: Vec<&str> = content.split(',').map(str::trim).collect();
        if names.len() != SENSOR_COUNT {
            return Err(Error::parse(origin, line, format!("expected {SENSOR_COUNT} tags, found {}", names.len())));
        }
        let mut row = [EchoClass::Clean; SENSOR_COUNT];
        for (slot, n) in row.iter_mut().zip(&names) {
            *slot = EchoClass::from_name(n).ok_or_else(|| Error::parse(origin, line, format!("unknown tag `{n}`")))?;
        }
        out.push(row);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// environments

/// One wall per line: `x1 y1 x2 y2 material`.
pub fn parse_environment(text: &str, name: &str, origin: &str) -> Result<Environment> {
    let mut walls = Vec::new();
    for (line, content) in data_lines(text) {
        let f: Vec<&str> = content.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::parse(origin, line, format!("expected `x1 y1 x2 y2 material`, found {} fields", f.len())));
        }
        let mut c = [0.0; 4];
        for (slot, s) in c.iter_mut().zip(&f[..4]) {
            *slot = s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(origin, line, format!("`{s}` is not a number")))?;
        }
        let material = Material::from_name(f[4]).ok_or_else(|| Error::parse(origin, line, format!("unknown material `{}`", f[4])))?;
        let wall = Wall::new(Point::new(c[0], c[1]), Point::new(c[2], c[3]), material);
        if !(wall.length() > 0.0) {
            return Err(Error::parse(origin, line, "wall has zero length"));
        }
        walls.push(wall);
    }
    Environment::from_walls(name, walls)
}

pub fn format_environment(env: &Environment) -> String {
    let mut s = String::from("# x1 y1 x2 y2 material\n");
    for w in &env.walls {
        let _ = writeln!(s, "{} {} {} {} {}", w.a.x, w.a.y, w.b.x, w.b.y, w.material.name());
    }
    s
}

pub fn read_environment(path: &Path) -> Result<Environment> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "environment".into());
    parse_environment(&read_text(path)?, &name, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// grids

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Pgm,
    Ppm,
}

impl MapFormat {
    pub const ALL: [MapFormat; 3] = [MapFormat::Csv, MapFormat::Pgm, MapFormat::Ppm];

    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::Csv => "csv",
            MapFormat::Pgm => "pgm",
            MapFormat::Ppm => "ppm",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(MapFormat::Csv),
            "pgm" => Ok(MapFormat::Pgm),
            "ppm" => Ok(MapFormat::Ppm),
            _ => Err(Error::Unknown {
                what: "map format",
                name: name.to_string(),
            }),
        }
    }
}

/// Raw values, row 0 (lowest `y`) first, after a geometry header line.
pub fn grid_to_csv(grid: &ScalarGrid) -> String {
    let spec = grid.spec();
    let mut s = format!(
        "# origin_x={},origin_y={},cell_size={},rows={},cols={},range={}\n",
        spec.origin.x,
        spec.origin.y,
        spec.cell_size,
        spec.rows,
        spec.cols,
        grid.range().name()
    );
    for row in grid.values().chunks(spec.cols) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn grid_from_csv(text: &str, origin: &str) -> Result<ScalarGrid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(origin, 1, "empty grid file"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(origin, 1, "missing `#` geometry header"))?;
    let mut fields = std::collections::HashMap::new();
    for kv in header.split(',') {
        let (k, v) = kv
            .trim()
            .split_once('=')
            .ok_or_else(|| Error::parse(origin, 1, format!("bad header field `{kv}`")))?;
        fields.insert(k.trim(), v.trim());
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::parse(origin, 1, format!("header lacks `{k}`")));
    let real = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::parse(origin, 1, format!("bad `{k}`"))) };
    let count = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::parse(origin, 1, format!("bad `{k}`"))) };
    let range = RangeTag::from_name(get("range")?).ok_or_else(|| Error::parse(origin, 1, "unknown range tag"))?;
    let spec = GridSpec::new(Point::new(real("origin_x")?, real("origin_y")?), real("cell_size")?, count("rows")?, count("cols")?)?;

    let mut values = Vec::with_capacity(spec.len());
    let mut rows = 0;
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != spec.cols {
            return Err(Error::parse(origin, i + 1, format!("expected {} values, found {}", spec.cols, row.len())));
        }
        for v in row {
            values.push(v.trim().parse::<f64>().map_err(|_| Error::parse(origin, i + 1, format!("`{v}` is not a number")))?);
        }
        rows += 1;
    }
    if rows != spec.rows {
        return Err(Error::parse(origin, 1, format!("header says {} rows, found {rows}", spec.rows)));
    }
    ScalarGrid::from_values(spec, range, values)
}

/// Value range used for image scaling.
fn display_bounds(grid: &ScalarGrid) -> (f64, f64) {
    match grid.range() {
        RangeTag::NonNegative => {
            let hi = grid.values().iter().cloned().fold(0.0, f64::max);
            (0.0, if hi > 0.0 { hi } else { 1.0 })
        }
        r => r.bounds(),
    }
}

fn normalized(grid: &ScalarGrid, v: f64) -> f64 {
    let (lo, hi) = display_bounds(grid);
    ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Image rows from the top (highest `y`) down.
fn image_rows(grid: &ScalarGrid) -> impl Iterator<Item = &[f64]> {
    grid.values().chunks(grid.spec().cols).rev()
}

/// ASCII 8-bit grayscale, black at the low end of the grid's range.
pub fn grid_to_pgm(grid: &ScalarGrid) -> String {
    let spec = grid.spec();
    let mut s = format!("P2\n{} {}\n255\n", spec.cols, spec.rows);
    for row in image_rows(grid) {
        let px: Vec<String> = row.iter().map(|&v| ((normalized(grid, v) * 255.0).round() as u8).to_string()).collect();
        s.push_str(&px.join(" "));
        s.push('\n');
    }
    s
}

/// Colour of a signed value: blue at −1, green at 0, red at +1.
pub fn signed_color(v: f64) -> [u8; 3] {
    let v = v.clamp(-1.0, 1.0);
    let c = |x: f64| (x * 255.0).round() as u8;
    if v < 0.0 {
        let t = v + 1.0;
        [0, c(t), c(1.0 - t)]
    } else {
        [c(v), c(1.0 - v), 0]
    }
}

/// ASCII colour image; non-signed grids are first stretched onto [−1, 1].
pub fn grid_to_ppm(grid: &ScalarGrid) -> String {
    let spec = grid.spec();
    let signed = matches!(grid.range(), RangeTag::Signed | RangeTag::Ternary);
    let mut s = format!("P3\n{} {}\n255\n", spec.cols, spec.rows);
    for row in image_rows(grid) {
        let px: Vec<String> = row
            .iter()
            .map(|&v| {
                let sv = if signed { v } else { 2.0 * normalized(grid, v) - 1.0 };
                let [r, g, b] = signed_color(sv);
                format!("{r} {g} {b}")
            })
            .collect();
        s.push_str(&px.join("  "));
        s.push('\n');
    }
    s
}

pub fn render_map(grid: &ScalarGrid, format: MapFormat) -> String {
    match format {
        MapFormat::Csv => grid_to_csv(grid),
        MapFormat::Pgm => grid_to_pgm(grid),
        MapFormat::Ppm => grid_to_ppm(grid),
    }
}

pub fn export_map(grid: &ScalarGrid, format: MapFormat, path: &Path) -> Result<()> {
    write_text(path, &render_map(grid, format))
}

pub fn read_grid(path: &Path) -> Result<ScalarGrid> {
    grid_from_csv(&read_text(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_line() -> &'static str {
        "10,20,0.5,100,200,300,400,500,600,100,200,300,400,500,600"
    }

    #[test]
    fn fifteen_fields_make_one_record() {
        let recs = parse_trace(&format!("# comment\n{}\n", sample_line()), "t").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].pose.heading, 0.5);
        assert_eq!(recs[0].ranges[11], 600.0);
    }

    #[test]
    fn short_line_names_its_number() {
        let text = format!("{}\n\n10,20,0.5,1,2,3,4,5,6,7,8,9,10,11\n", sample_line());
        let err = parse_trace(&text, "run.trace").unwrap_err();
        assert!(err.to_string().starts_with("run.trace:3:"), "{err}");
        let err = parse_trace("1,2,3,4,5,6,7,8,9,10,11,12,13,14,x", "t").unwrap_err();
        assert!(err.to_string().contains("not a number"));
        assert!(parse_trace("1,2,3,4,5,6,7,8,9,10,11,12,13,14,-1", "t").is_err());
    }

    #[test]
    fn environment_round_trip() {
        let env = crate::sim::builtin_environment("corridor").unwrap();
        let back = parse_environment(&format_environment(&env), "corridor", "c").unwrap();
        assert_eq!(back.walls, env.walls);
        assert_eq!(back.bounds, env.bounds);
        assert!(parse_environment("0 0 1 1 glass", "x", "x").is_err());
        assert!(parse_environment("0 0 1", "x", "x").is_err());
    }

    #[test]
    fn tags_round_trip() {
        let mut row = [EchoClass::Clean; SENSOR_COUNT];
        row[3] = EchoClass::Rebound;
        row[7] = EchoClass::ShortEcho;
        row[11] = EchoClass::MaxRange;
        let tags = vec![row, [EchoClass::Clean; SENSOR_COUNT]];
        assert_eq!(parse_tags(&format_tags(&tags), "t").unwrap(), tags);
    }

    fn signed_sample() -> ScalarGrid {
        let spec = GridSpec::new(Point::new(-5.0, 2.5), 10.0, 2, 3).unwrap();
        ScalarGrid::from_values(spec, RangeTag::Signed, vec![-1.0, 0.0, 1.0, 0.25, -0.125, 1.0 / 3.0]).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let g = signed_sample();
        let back = grid_from_csv(&grid_to_csv(&g), "g").unwrap();
        assert_eq!(back.spec(), g.spec());
        assert_eq!(back.range(), g.range());
        for (a, b) in back.values().iter().zip(g.values()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn colours_follow_the_sign() {
        assert_eq!(signed_color(-1.0), [0, 0, 255]);
        assert_eq!(signed_color(0.0), [0, 255, 0]);
        assert_eq!(signed_color(1.0), [255, 0, 0]);
        assert_eq!(signed_color(0.5), [128, 128, 0]);
        let ppm = grid_to_ppm(&signed_sample());
        let lines: Vec<&str> = ppm.lines().collect();
        assert_eq!(lines[0], "P3");
        assert_eq!(lines[1], "3 2");
        // bottom image row is grid row 0
        assert!(lines[4].starts_with("0 0 255  0 255 0  255 0 0"));
    }

    #[test]
    fn pgm_is_linear_in_range() {
        let pgm = grid_to_pgm(&signed_sample());
        let lines: Vec<&str> = pgm.lines().collect();
        assert_eq!(lines[0], "P2");
        assert_eq!(lines[4], "0 128 255");
    }
}
