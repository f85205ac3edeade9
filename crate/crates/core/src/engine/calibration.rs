use serde::{Deserialize, Serialize};

use super::GazeSample;
use crate::error::{domain, Result};
use crate::layout::Point;

/// Number of calibration points: the four screen corners and the center.
pub const CALIBRATION_POINTS: usize = 5;

/// A measured calibration point: where the target was drawn and where the
/// tracker reported the gaze while the user looked at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPair {
    pub target: Point,
    pub gaze: Point,
}

/// Global offset correction: the mean of `target - gaze` over the measured
/// points, added to every sample.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub pairs: Vec<CalibrationPair>,
    pub correction: Point,
}

impl CalibrationModel {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn apply(&self, sample: GazeSample) -> GazeSample {
        GazeSample {
            x_cm: sample.x_cm + self.correction.x,
            y_cm: sample.y_cm + self.correction.y,
            ..sample
        }
    }
}

pub fn fit_calibration(pairs: &[CalibrationPair]) -> Result<CalibrationModel> {
    if pairs.len() != CALIBRATION_POINTS {
        return Err(domain(format!(
            "calibration needs exactly {CALIBRATION_POINTS} points, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|p| ![p.target.x, p.target.y, p.gaze.x, p.gaze.y].iter().all(|v| v.is_finite())) {
        return Err(domain("calibration points must be finite"));
    }
    let sum = pairs.iter().fold(Point::ORIGIN, |acc, p| acc + (p.target - p.gaze));
    Ok(CalibrationModel {
        pairs: pairs.to_vec(),
        correction: sum * (1.0 / pairs.len() as f64),
    })
}
