//! Menu capacity geometry.
//!
//! Every size used by the layouts is derived here from a handful of physical
//! parameters: glyph height, viewing distance and the tracker's angular
//! uncertainty. Public functions take and return degrees; trigonometry runs
//! in radians internally.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Number of glyph heights spanned by one selectable container when the
/// margin around the glyph equals the glyph itself.
const CONTAINER_GLYPHS: f64 = 3.0;

/// Slack used when flooring ratios that are integral in exact arithmetic
/// (e.g. 11.7 / 1.3) but land just below the integer in binary floating point.
const FLOOR_SLACK: f64 = 1e-9;

fn floor_count(x: f64) -> usize {
    (x + FLOOR_SLACK).floor().max(0.0) as usize
}

fn check_finite_non_negative(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(domain(format!("{name} must be finite and non-negative, got {v}")));
    }
    Ok(())
}

/// Physical parameters feeding every capacity formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Letter glyph height.
    pub char_size_cm: f64,
    /// Margin on each side of a glyph, in glyph heights.
    pub margin_factor: f64,
    /// Distance at which the object size is evaluated.
    pub viewing_distance_cm: f64,
    pub tracker_uncertainty_deg: f64,
    /// Comfortable reading distance range; its midpoint is the distance at
    /// which the comfortable vision angle is evaluated.
    pub comfortable_distance_range_cm: (f64, f64),
    /// Object sizes are floored to a multiple of this step (0 disables).
    pub obj_size_step_cm: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            char_size_cm: 0.45,
            margin_factor: 1.0,
            viewing_distance_cm: 55.0,
            tracker_uncertainty_deg: 1.3,
            comfortable_distance_range_cm: (50.0, 63.5),
            obj_size_step_cm: 0.01,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.char_size_cm.is_finite() && self.char_size_cm > 0.0) {
            return Err(domain("char_size_cm must be > 0"));
        }
        if !(self.viewing_distance_cm.is_finite() && self.viewing_distance_cm > 0.0) {
            return Err(domain("viewing_distance_cm must be > 0"));
        }
        if !(self.tracker_uncertainty_deg.is_finite() && self.tracker_uncertainty_deg > 0.0) {
            return Err(domain("tracker_uncertainty_deg must be > 0"));
        }
        check_finite_non_negative("margin_factor", self.margin_factor)?;
        check_finite_non_negative("obj_size_step_cm", self.obj_size_step_cm)?;
        let (low, high) = self.comfortable_distance_range_cm;
        if !(low.is_finite() && high.is_finite() && low > 0.0 && low < high) {
            return Err(domain(format!(
                "comfortable distance range must satisfy 0 < low < high, got ({low}, {high})"
            )));
        }
        Ok(())
    }

    pub fn reading_distance_cm(&self) -> f64 {
        let (low, high) = self.comfortable_distance_range_cm;
        (low + high) / 2.0
    }

    /// Glyph plus its margins.
    pub fn container_size_cm(&self) -> f64 {
        self.char_size_cm * (1.0 + 2.0 * self.margin_factor)
    }

    /// Angle subtended by one container at the comfortable reading distance.
    pub fn comfortable_angle_deg(&self) -> Result<f64> {
        subtended_angle_deg(self.container_size_cm(), self.reading_distance_cm())
    }

    /// Smallest comfortable object at the viewing distance, floored to
    /// `obj_size_step_cm`.
    pub fn obj_size_cm(&self) -> Result<f64> {
        let raw = min_object_size(self.comfortable_angle_deg()?, self.viewing_distance_cm)?;
        Ok(quantize_down(raw, self.obj_size_step_cm))
    }

    /// Full capacity table for a menu of `n_items` entries.
    pub fn capacity(&self, n_items: usize) -> Result<CapacityResult> {
        self.validate()?;
        let vision_angle_deg = self.comfortable_angle_deg()?;
        let obj_size_cm = self.obj_size_cm()?;
        let crossing_radius_cm = crossing_menu_radius(obj_size_cm, n_items)?;
        let max_slices = max_slices(crossing_radius_cm, obj_size_cm)?;
        let (grid_width_cm, grid_height_cm) = grid_dims(obj_size_cm, n_items)?;
        let grid_capacity = max_grid_elements(grid_width_cm, obj_size_cm)?;
        Ok(CapacityResult {
            n_items,
            vision_angle_deg,
            obj_size_cm,
            crossing_radius_cm,
            max_slices,
            grid_width_cm,
            grid_height_cm,
            grid_capacity,
            usable: vision_angle_deg >= self.tracker_uncertainty_deg,
        })
    }
}

fn quantize_down(value: f64, step: f64) -> f64 {
    if step <= 0.0 {
        return value;
    }
    let steps = (value / step + FLOOR_SLACK).floor();
    // Round the product so 130 * 0.01 prints as 1.3 rather than 1.3000000000000003.
    (steps * step * 1e9).round() / 1e9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub n_items: usize,
    pub vision_angle_deg: f64,
    pub obj_size_cm: f64,
    pub crossing_radius_cm: f64,
    /// Slices of `obj_size_cm` that fit a circle of `crossing_radius_cm`.
    pub max_slices: usize,
    pub grid_width_cm: f64,
    pub grid_height_cm: f64,
    /// Grid cells, including the reserved center slot.
    pub grid_capacity: usize,
    /// The comfortable vision angle is at least the tracker's uncertainty.
    pub usable: bool,
}

fn subtended_angle_deg(size_cm: f64, distance_cm: f64) -> Result<f64> {
    check_finite_non_negative("size", size_cm)?;
    check_finite_non_negative("distance", distance_cm)?;
    if distance_cm == 0.0 {
        return Err(domain("reading distance must be > 0"));
    }
    Ok((2.0 * ((size_cm / 2.0) / distance_cm).atan()).to_degrees())
}

/// Comfortable-reading visual angle of a character container (three glyph
/// heights) seen from `reading_distance_cm`.
pub fn vision_angle(char_size_cm: f64, reading_distance_cm: f64) -> Result<f64> {
    check_finite_non_negative("char_size_cm", char_size_cm)?;
    subtended_angle_deg(CONTAINER_GLYPHS * char_size_cm, reading_distance_cm)
}

/// Chord subtended by `angle_deg` at `distance_cm`.
pub fn min_object_size(angle_deg: f64, distance_cm: f64) -> Result<f64> {
    check_finite_non_negative("angle_deg", angle_deg)?;
    check_finite_non_negative("distance_cm", distance_cm)?;
    if angle_deg >= 180.0 {
        return Err(domain(format!("angle must be below 180 degrees, got {angle_deg}")));
    }
    Ok(2.0 * distance_cm * (angle_deg.to_radians() / 2.0).tan())
}

/// Radius of a circular menu whose `n_items` slices each fit an object of
/// `obj_size_cm`.
///
/// The formula's tangent argument reaches its pole at 90 degrees for a single
/// item; one item is therefore sized like two (radius `obj_size_cm / 4`).
pub fn crossing_menu_radius(obj_size_cm: f64, n_items: usize) -> Result<f64> {
    if n_items == 0 {
        return Err(domain("a menu needs at least one item"));
    }
    if !(obj_size_cm.is_finite() && obj_size_cm > 0.0) {
        return Err(domain(format!("obj_size_cm must be > 0, got {obj_size_cm}")));
    }
    let n = n_items.max(2) as f64;
    let quarter_slice = (360.0 / (4.0 * n)).to_radians();
    Ok(obj_size_cm / (4.0 * quarter_slice.tan()))
}

/// Number of slices of `obj_size_cm` that fit on a circle of `radius_cm`,
/// evaluated through the arc-length chain literally (the doubled angle
/// included).
pub fn max_slices(radius_cm: f64, obj_size_cm: f64) -> Result<usize> {
    check_finite_non_negative("obj_size_cm", obj_size_cm)?;
    if !(radius_cm.is_finite() && radius_cm > 0.0) {
        return Err(domain(format!("radius_cm must be > 0, got {radius_cm}")));
    }
    let ratio = (obj_size_cm / 2.0) / (radius_cm * 2.0);
    if ratio > 1.0 + FLOOR_SLACK {
        return Err(domain(format!(
            "object larger than menu: {obj_size_cm} cm does not fit radius {radius_cm} cm"
        )));
    }
    let theta_deg = (2.0 * ratio.min(1.0).asin()).to_degrees();
    if theta_deg == 0.0 {
        return Err(domain("object size must be > 0 to count slices"));
    }
    let perimeter = 2.0 * std::f64::consts::PI * radius_cm;
    let arc_length = perimeter / 360.0 * 2.0 * theta_deg;
    Ok(floor_count(perimeter / arc_length))
}

/// Cells of the widest 3:1 grid of square `obj_size_cm` cells fitting
/// `width_cm`.
pub fn max_grid_elements(width_cm: f64, obj_size_cm: f64) -> Result<usize> {
    check_finite_non_negative("width_cm", width_cm)?;
    if !(obj_size_cm.is_finite() && obj_size_cm > 0.0) {
        return Err(domain(format!("obj_size_cm must be > 0, got {obj_size_cm}")));
    }
    let cols = floor_count(width_cm / obj_size_cm);
    Ok(cols * (cols / 3))
}

/// Rows of the smallest 3:1 grid holding `n_items` plus the center slot.
pub fn grid_rows(n_items: usize) -> usize {
    let needed = n_items + 1;
    let mut rows = 1;
    while 3 * rows * rows < needed {
        rows += 1;
    }
    rows
}

/// Width and height of the smallest 3:1 grid holding `n_items` plus the
/// reserved center slot.
pub fn grid_dims(obj_size_cm: f64, n_items: usize) -> Result<(f64, f64)> {
    if n_items == 0 {
        return Err(domain("a menu needs at least one item"));
    }
    if !(obj_size_cm.is_finite() && obj_size_cm > 0.0) {
        return Err(domain(format!("obj_size_cm must be > 0, got {obj_size_cm}")));
    }
    let rows = grid_rows(n_items) as f64;
    Ok((3.0 * rows * obj_size_cm, rows * obj_size_cm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vision_angle_values() {
        assert_abs_diff_eq!(vision_angle(0.45, 56.75).unwrap(), 1.36, epsilon = 0.01);
        assert_eq!(vision_angle(0.0, 56.75).unwrap(), 0.0);
        assert_abs_diff_eq!(vision_angle(0.45, 38.1).unwrap(), 2.03, epsilon = 0.01);
    }

    #[test]
    fn vision_angle_rejects_bad_input() {
        assert!(vision_angle(-0.1, 50.0).is_err());
        assert!(vision_angle(0.45, f64::NAN).is_err());
        assert!(vision_angle(0.45, 0.0).is_err());
        assert!(vision_angle(f64::INFINITY, 50.0).is_err());
    }

    #[test]
    fn min_object_size_values() {
        assert_abs_diff_eq!(min_object_size(1.36, 55.0).unwrap(), 1.31, epsilon = 0.01);
        assert_eq!(min_object_size(12.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(min_object_size(1.3, 60.0).unwrap(), 1.36, epsilon = 0.01);
        assert!(min_object_size(180.0, 10.0).is_err());
    }

    #[test]
    fn crossing_radius_values() {
        assert_abs_diff_eq!(crossing_menu_radius(1.30, 26).unwrap(), 5.37, epsilon = 0.01);
        assert_abs_diff_eq!(crossing_menu_radius(1.31, 26).unwrap(), 5.41, epsilon = 0.01);
        assert_abs_diff_eq!(crossing_menu_radius(2.0, 1).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(crossing_menu_radius(2.0, 2).unwrap(), 0.5, epsilon = 1e-12);
        assert!(crossing_menu_radius(1.3, 0).is_err());
        assert!(crossing_menu_radius(0.0, 3).is_err());
    }

    #[test]
    fn max_slices_values() {
        assert_eq!(max_slices(5.37, 1.3056).unwrap(), 25);
        assert_eq!(max_slices(2.5, 10.0).unwrap(), 1);
        assert_eq!(max_slices(10.0, 1.0).unwrap(), 62);
        assert!(max_slices(1.0, 4.5).is_err());
    }

    #[test]
    fn grid_values() {
        assert_eq!(max_grid_elements(11.7, 1.3).unwrap(), 27);
        assert_eq!(max_grid_elements(1.0, 1.3).unwrap(), 0);
        assert_eq!(max_grid_elements(12.0, 1.3).unwrap(), 27);

        let (w, h) = grid_dims(1.30, 26).unwrap();
        assert_abs_diff_eq!(w, 11.7, epsilon = 1e-9);
        assert_abs_diff_eq!(h, 3.9, epsilon = 1e-9);
        assert_eq!(grid_dims(1.0, 2).unwrap(), (3.0, 1.0));
        let (w, h) = grid_dims(1.30, 35).unwrap();
        assert_abs_diff_eq!(w, 15.6, epsilon = 1e-9);
        assert_abs_diff_eq!(h, 5.2, epsilon = 1e-9);
        assert!(grid_dims(1.3, 0).is_err());
    }

    #[test]
    fn default_config_reproduces_menu_sizes() {
        let cap = GeometryConfig::default().capacity(26).unwrap();
        assert_abs_diff_eq!(cap.vision_angle_deg, 1.36, epsilon = 0.01);
        assert_eq!(cap.obj_size_cm, 1.3);
        assert_abs_diff_eq!(cap.crossing_radius_cm, 5.37, epsilon = 0.01);
        assert_abs_diff_eq!(cap.grid_width_cm, 11.7, epsilon = 1e-9);
        assert_abs_diff_eq!(cap.grid_height_cm, 3.9, epsilon = 1e-9);
        assert_eq!(cap.grid_capacity, 27);
        assert!(cap.usable);
    }

    #[test]
    fn small_glyphs_are_flagged_unusable() {
        let cfg = GeometryConfig { char_size_cm: 0.3, ..Default::default() };
        assert!(!cfg.capacity(26).unwrap().usable);
    }

    #[test]
    fn config_validation() {
        let cfg = GeometryConfig { comfortable_distance_range_cm: (60.0, 50.0), ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = GeometryConfig { tracker_uncertainty_deg: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn monotonicity() {
        let mut prev = 0.0;
        for i in 1..50 {
            let a = vision_angle(i as f64 * 0.05, 56.75).unwrap();
            assert!(a > prev);
            prev = a;
        }
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let a = vision_angle(0.45, 20.0 + i as f64).unwrap();
            assert!(a < prev);
            prev = a;
        }
        assert!(min_object_size(1.2, 55.0).unwrap() < min_object_size(1.3, 55.0).unwrap());
        assert!(min_object_size(1.3, 50.0).unwrap() < min_object_size(1.3, 55.0).unwrap());
    }

    #[test]
    fn grid_dims_always_fit() {
        for n in 1..200 {
            for obj in [0.7, 1.0, 1.3, 2.0] {
                let (w, h) = grid_dims(obj, n).unwrap();
                assert!((w - 3.0 * h).abs() < 1e-9);
                assert!(max_grid_elements(w, obj).unwrap() > n, "n={n} obj={obj}");
            }
        }
    }
}
