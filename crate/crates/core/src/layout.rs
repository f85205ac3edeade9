//! Positioned menus and hit-testing.
//!
//! Coordinates are menu-local centimetres with x to the right and y down.
//! Circular menus are centred on the origin; angles are measured in degrees
//! clockwise from 12 o'clock. Grid menus are centred on the origin too, so
//! the reserved center cell sits where a circular menu's center region would.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, GeometryConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Point at `radius` from `center` in direction `angle_deg`
    /// (clockwise from 12 o'clock, y down).
    pub fn polar(center: Point, angle_deg: f64, radius: f64) -> Point {
        let a = angle_deg.to_radians();
        Point::new(center.x + radius * a.sin(), center.y - radius * a.cos())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Clockwise angle of `p` around `center` from 12 o'clock, in `[0, 360)`.
pub fn bearing_deg(center: Point, p: Point) -> f64 {
    let d = p - center;
    let a = d.x.atan2(-d.y).to_degrees();
    let a = if a < 0.0 { a + 360.0 } else { a };
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Dwell,
    Crossing,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Dwell => "dwell",
            Technique::Crossing => "crossing",
        }
    }
}

impl std::fmt::Display for Technique {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Technique {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dwell" => Ok(Technique::Dwell),
            "crossing" => Ok(Technique::Crossing),
            other => Err(domain(format!("unknown technique {other:?}"))),
        }
    }
}

/// The 26 latin letters in alphabetical order.
pub fn alphabet() -> Vec<String> {
    ('A'..='Z').map(String::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub label: String,
    pub start_angle_deg: f64,
    pub end_angle_deg: f64,
}

impl Slice {
    pub fn bisector_deg(&self) -> f64 {
        (self.start_angle_deg + self.end_angle_deg) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscTarget {
    pub label: String,
    pub center: Point,
    pub radius_cm: f64,
}

impl DiscTarget {
    pub fn contains(&self, p: Point) -> bool {
        p.distance(self.center) <= self.radius_cm
    }
}

/// Crossing pie menu: slices inside `inner_radius_cm`, an invisible crossing
/// band just outside it and one disc target per slice beyond the band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularMenuLayout {
    pub center: Point,
    pub inner_radius_cm: f64,
    pub band_width_cm: f64,
    pub slices: Vec<Slice>,
    pub disc_targets: Vec<DiscTarget>,
    pub center_region_radius_cm: f64,
}

/// Builds a circular crossing menu sized from `geometry`. `band_width_cm`
/// defaults to the comfortable object size.
pub fn build_circular_layout(
    items: &[String],
    geometry: &GeometryConfig,
    band_width_cm: Option<f64>,
) -> Result<CircularMenuLayout> {
    geometry.validate()?;
    let obj = geometry.obj_size_cm()?;
    CircularMenuLayout::new(items, obj, band_width_cm.unwrap_or(obj))
}

impl CircularMenuLayout {
    /// Builds the layout for a given object size; the radius comes from
    /// [`geometry::crossing_menu_radius`].
    pub fn new(items: &[String], obj_size_cm: f64, band_width_cm: f64) -> Result<Self> {
        let radius = geometry::crossing_menu_radius(obj_size_cm, items.len())?;
        Self::with_radius(items, obj_size_cm, radius, band_width_cm)
    }

    /// Builds the layout on an explicit radius. Fails when the radius cannot
    /// hold the items at the given object size; the slice-count formula
    /// undercounts by one, so one extra slice is tolerated.
    pub fn with_radius(
        items: &[String],
        obj_size_cm: f64,
        radius_cm: f64,
        band_width_cm: f64,
    ) -> Result<Self> {
        if items.is_empty() {
            return Err(domain("a menu needs at least one item"));
        }
        if !(band_width_cm.is_finite() && band_width_cm > 0.0) {
            return Err(domain(format!("band width must be > 0, got {band_width_cm}")));
        }
        let limit = if obj_size_cm > 4.0 * radius_cm {
            0
        } else {
            geometry::max_slices(radius_cm, obj_size_cm)? + 1
        };
        if items.len() > limit {
            return Err(Error::Capacity { items: items.len(), limit });
        }

        let n = items.len() as f64;
        let width = 360.0 / n;
        let slices: Vec<Slice> = items
            .iter()
            .enumerate()
            .map(|(i, label)| Slice {
                label: label.clone(),
                start_angle_deg: i as f64 * width,
                end_angle_deg: (i + 1) as f64 * width,
            })
            .collect();
        let disc_radius = obj_size_cm / 2.0;
        let disc_distance = radius_cm + band_width_cm + disc_radius;
        let disc_targets = slices
            .iter()
            .map(|s| DiscTarget {
                label: s.label.clone(),
                center: Point::polar(Point::ORIGIN, s.bisector_deg(), disc_distance),
                radius_cm: disc_radius,
            })
            .collect();

        Ok(Self {
            center: Point::ORIGIN,
            inner_radius_cm: radius_cm,
            band_width_cm,
            slices,
            disc_targets,
            center_region_radius_cm: obj_size_cm.min(radius_cm / 2.0),
        })
    }

    pub fn slice_width_deg(&self) -> f64 {
        360.0 / self.slices.len() as f64
    }

    pub fn slice_index_at(&self, angle_deg: f64) -> usize {
        let idx = (angle_deg / self.slice_width_deg()).floor() as usize;
        idx.min(self.slices.len() - 1)
    }

    pub fn slice_index(&self, label: &str) -> Option<usize> {
        self.slices.iter().position(|s| s.label == label)
    }

    /// Centroid of the visible part of a slice: the annular sector between
    /// the center region and the inner radius.
    pub fn slice_centroid(&self, index: usize) -> Point {
        let s = &self.slices[index];
        let (r0, r1) = (self.center_region_radius_cm, self.inner_radius_cm);
        let half = (s.end_angle_deg - s.start_angle_deg).to_radians() / 2.0;
        let radial = 2.0 / 3.0 * (r1.powi(3) - r0.powi(3)) / (r1 * r1 - r0 * r0);
        let shrink = if half >= std::f64::consts::PI { 0.0 } else { half.sin() / half };
        Point::polar(self.center, s.bisector_deg(), radial * shrink)
    }

    pub fn hit_test(&self, p: Point) -> Region {
        let r = p.distance(self.center);
        if r < self.center_region_radius_cm {
            return Region::CenterRegion;
        }
        let outer = self.inner_radius_cm + self.band_width_cm;
        if r >= outer {
            return Region::Outside;
        }
        let label = self.slices[self.slice_index_at(bearing_deg(self.center, p))].label.clone();
        if r < self.inner_radius_cm {
            Region::SliceInterior(label)
        } else {
            Region::CrossingBand(label)
        }
    }

    /// Label of the slice through which the directed segment `p0 -> p1`
    /// leaves the closed inner disk, if it does.
    ///
    /// The segment must end strictly outside the disk. Jumps that skip the
    /// whole band still count, as do segments that start outside, pass
    /// through the disk and leave it again.
    pub fn segment_crossing(&self, p0: Point, p1: Point) -> Option<String> {
        let radius = self.inner_radius_cm;
        let d = p1 - p0;
        let a = d.dot(d);
        if a == 0.0 {
            return None;
        }
        let q0 = p0 - self.center;
        let q1 = p1 - self.center;
        if q1.dot(q1) <= radius * radius {
            return None;
        }
        let b = 2.0 * q0.dot(d);
        let c = q0.dot(q0) - radius * radius;
        let disc = b * b - 4.0 * a * c;
        let exit_t = if c <= 0.0 {
            (-b + disc.max(0.0).sqrt()) / (2.0 * a)
        } else {
            if disc <= 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let t_in = (-b - sq) / (2.0 * a);
            if !(0.0..1.0).contains(&t_in) {
                return None;
            }
            (-b + sq) / (2.0 * a)
        };
        let exit = p0 + d * exit_t.clamp(0.0, 1.0);
        let idx = self.slice_index_at(bearing_deg(self.center, exit));
        Some(self.slices[idx].label.clone())
    }

    /// Index of the disc target containing `p`, if any.
    pub fn disc_target_at(&self, p: Point) -> Option<usize> {
        self.disc_targets.iter().position(|d| d.contains(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "content", content = "label", rename_all = "snake_case")]
pub enum CellContent {
    Item(String),
    /// Reserved text slot showing the current prescription.
    Center,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(flatten)]
    pub content: CellContent,
    pub row: usize,
    pub col: usize,
    pub rect: Rect,
}

/// Dwell grid with `cols = 3 * rows` square cells and one reserved center
/// cell. Cells are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMenuLayout {
    pub origin: Point,
    pub cell_size_cm: f64,
    pub cols: usize,
    pub rows: usize,
    pub cells: Vec<Cell>,
    pub center_cell: usize,
}

pub fn build_grid_layout(items: &[String], geometry: &GeometryConfig) -> Result<GridMenuLayout> {
    geometry.validate()?;
    GridMenuLayout::new(items, geometry.obj_size_cm()?)
}

impl GridMenuLayout {
    pub fn new(items: &[String], cell_size_cm: f64) -> Result<Self> {
        if items.is_empty() {
            return Err(domain("a menu needs at least one item"));
        }
        let (width, height) = geometry::grid_dims(cell_size_cm, items.len())?;
        let rows = geometry::grid_rows(items.len());
        let cols = 3 * rows;
        let origin = Point::new(-width / 2.0, -height / 2.0);
        let center_cell = (rows / 2) * cols + cols / 2;

        let mut labels = items.iter();
        let cells = (0..rows * cols)
            .map(|i| {
                let (row, col) = (i / cols, i % cols);
                let content = if i == center_cell {
                    CellContent::Center
                } else {
                    labels.next().map_or(CellContent::Empty, |l| CellContent::Item(l.clone()))
                };
                Cell {
                    content,
                    row,
                    col,
                    rect: Rect {
                        x: origin.x + col as f64 * cell_size_cm,
                        y: origin.y + row as f64 * cell_size_cm,
                        w: cell_size_cm,
                        h: cell_size_cm,
                    },
                }
            })
            .collect();

        Ok(Self { origin, cell_size_cm, cols, rows, cells, center_cell })
    }

    pub fn width_cm(&self) -> f64 {
        self.cols as f64 * self.cell_size_cm
    }

    pub fn height_cm(&self) -> f64 {
        self.rows as f64 * self.cell_size_cm
    }

    pub fn cell_of(&self, label: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| matches!(&c.content, CellContent::Item(l) if l == label))
    }

    /// Index of the cell containing `p`. Shared edges belong to the
    /// lower-index cell; the grid's outer boundary is inclusive.
    pub fn cell_index_at(&self, p: Point) -> Option<usize> {
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        if !(0.0..=self.width_cm()).contains(&dx) || !(0.0..=self.height_cm()).contains(&dy) {
            return None;
        }
        let index_along = |d: f64, n: usize| {
            if d <= 0.0 {
                0
            } else {
                ((d / self.cell_size_cm).ceil() as usize).saturating_sub(1).min(n - 1)
            }
        };
        Some(index_along(dy, self.rows) * self.cols + index_along(dx, self.cols))
    }

    pub fn hit_test(&self, p: Point) -> Region {
        match self.cell_index_at(p).map(|i| &self.cells[i].content) {
            Some(CellContent::Item(l)) => Region::Cell(l.clone()),
            Some(CellContent::Center) => Region::CenterCell,
            Some(CellContent::Empty) | None => Region::NoHit,
        }
    }
}

/// What lies under a gaze point. Exactly one region applies to any point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "region", content = "label", rename_all = "snake_case")]
pub enum Region {
    SliceInterior(String),
    CrossingBand(String),
    Outside,
    CenterRegion,
    Cell(String),
    CenterCell,
    NoHit,
}

impl Region {
    pub fn is_center(&self) -> bool {
        matches!(self, Region::CenterRegion | Region::CenterCell)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MenuLayout {
    Circular(CircularMenuLayout),
    Grid(GridMenuLayout),
}

impl MenuLayout {
    /// Builds the menu matching `technique`: a grid for dwell, a pie for
    /// crossing.
    pub fn build(technique: Technique, items: &[String], geometry: &GeometryConfig) -> Result<Self> {
        Ok(match technique {
            Technique::Dwell => MenuLayout::Grid(build_grid_layout(items, geometry)?),
            Technique::Crossing => MenuLayout::Circular(build_circular_layout(items, geometry, None)?),
        })
    }

    pub fn technique(&self) -> Technique {
        match self {
            MenuLayout::Circular(_) => Technique::Crossing,
            MenuLayout::Grid(_) => Technique::Dwell,
        }
    }

    pub fn hit_test(&self, p: Point) -> Region {
        match self {
            MenuLayout::Circular(c) => c.hit_test(p),
            MenuLayout::Grid(g) => g.hit_test(p),
        }
    }

    /// Resting point between selections.
    pub fn home(&self) -> Point {
        match self {
            MenuLayout::Circular(c) => c.center,
            MenuLayout::Grid(g) => g.cells[g.center_cell].rect.center(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            MenuLayout::Circular(c) => c.slices.iter().map(|s| s.label.clone()).collect(),
            MenuLayout::Grid(g) => g
                .cells
                .iter()
                .filter_map(|c| match &c.content {
                    CellContent::Item(l) => Some(l.clone()),
                    _ => None,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}
