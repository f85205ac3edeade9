//! Streaming gaze processing: calibration, blink filtering and the dwell and
//! crossing selection state machines.

pub mod blink;
pub mod calibration;
mod state;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use blink::{filter_blinks, BlinkConfig, BlinkFilter};
pub use calibration::{fit_calibration, CalibrationModel, CalibrationPair};
pub use state::EngineState;

use crate::error::{domain, Error, Result};
use crate::layout::{MenuLayout, Point, Region, Technique};

/// One tracker reading in menu-local centimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t_ms: f64,
    pub x_cm: f64,
    pub y_cm: f64,
    /// The tracker found the eyes.
    pub valid: bool,
}

impl GazeSample {
    pub fn new(t_ms: f64, p: Point) -> Self {
        Self { t_ms, x_cm: p.x, y_cm: p.y, valid: true }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x_cm, self.y_cm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub dwell_ms: f64,
    pub blink_filter_enabled: bool,
    pub blink_max_duration_ms: f64,
    pub blink_dip_min_cm: f64,
    pub blink_return_tolerance_cm: f64,
    /// Invalid samples outside a blink reset the engine once the tracker has
    /// been silent this long.
    pub sample_gap_timeout_ms: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            dwell_ms: 500.0,
            blink_filter_enabled: true,
            blink_max_duration_ms: 400.0,
            blink_dip_min_cm: 4.0,
            blink_return_tolerance_cm: 1.0,
            sample_gap_timeout_ms: 100.0,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dwell_ms", self.dwell_ms),
            ("blink_max_duration_ms", self.blink_max_duration_ms),
            ("blink_dip_min_cm", self.blink_dip_min_cm),
            ("blink_return_tolerance_cm", self.blink_return_tolerance_cm),
            ("sample_gap_timeout_ms", self.sample_gap_timeout_ms),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn blink(&self) -> BlinkConfig {
        BlinkConfig {
            max_duration_ms: self.blink_max_duration_ms,
            dip_min_cm: self.blink_dip_min_cm,
            return_tolerance_cm: self.blink_return_tolerance_cm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    Enter { region: Region },
    Exit { region: Region },
    DwellProgress { label: String, fraction: f64 },
    Activation { label: String, technique: Technique },
    BlinkStart,
    BlinkEnd,
    CenterReached,
    /// Gaze landed on a crossing menu's disc target. Informational only.
    TargetReached { label: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeEvent {
    pub t_ms: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl GazeEvent {
    pub fn activation(&self) -> Option<&str> {
        match &self.kind {
            EventKind::Activation { label, .. } => Some(label),
            _ => None,
        }
    }
}

/// Full per-session pipeline: calibration, then blink filtering, then the
/// selection state machine for the layout's technique.
///
/// One engine serves one session. It is `Send` but must be driven by a
/// single caller at a time.
#[derive(Debug, Clone)]
pub struct GazeEngine {
    config: EngineConfig,
    layout: Arc<MenuLayout>,
    calibration: CalibrationModel,
    filter: Option<BlinkFilter>,
    state: EngineState,
    last_pushed_ms: Option<f64>,
}

impl GazeEngine {
    pub fn new(layout: Arc<MenuLayout>, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let filter = config.blink_filter_enabled.then(|| BlinkFilter::new(config.blink()));
        Ok(Self {
            config,
            layout,
            calibration: CalibrationModel::identity(),
            filter,
            state: EngineState::default(),
            last_pushed_ms: None,
        })
    }

    pub fn layout(&self) -> &MenuLayout {
        &self.layout
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn set_calibration(&mut self, model: CalibrationModel) {
        self.calibration = model;
    }

    pub fn push(&mut self, sample: GazeSample) -> Result<Vec<GazeEvent>> {
        if !sample.t_ms.is_finite() {
            return Err(Error::Stream(format!("non-finite timestamp {}", sample.t_ms)));
        }
        if let Some(last) = self.last_pushed_ms {
            if sample.t_ms <= last {
                return Err(Error::Stream(format!(
                    "timestamp {} does not follow {}",
                    sample.t_ms, last
                )));
            }
        }
        self.last_pushed_ms = Some(sample.t_ms);
        let sample = self.calibration.apply(sample);
        let released = match &mut self.filter {
            Some(f) => f.push(sample),
            None => vec![(sample, false)],
        };
        self.step_all(released)
    }

    /// Flushes samples still held by the blink filter.
    pub fn finish(&mut self) -> Result<Vec<GazeEvent>> {
        let released = self.filter.as_mut().map(BlinkFilter::finish).unwrap_or_default();
        self.step_all(released)
    }

    fn step_all(&mut self, released: Vec<(GazeSample, bool)>) -> Result<Vec<GazeEvent>> {
        let mut events = Vec::new();
        for (s, in_blink) in released {
            events.extend(self.state.step(&self.layout, &self.config, &s, in_blink)?);
        }
        Ok(events)
    }

    /// Runs a whole recorded stream through a fresh engine.
    pub fn run(
        layout: Arc<MenuLayout>,
        config: EngineConfig,
        samples: &[GazeSample],
    ) -> Result<Vec<GazeEvent>> {
        let mut engine = Self::new(layout, config)?;
        let mut events = Vec::new();
        for &s in samples {
            events.extend(engine.push(s)?);
        }
        events.extend(engine.finish()?);
        Ok(events)
    }
}
