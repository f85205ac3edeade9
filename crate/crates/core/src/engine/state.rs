use super::{EngineConfig, EventKind, GazeEvent, GazeSample};
use crate::error::{Error, Result};
use crate::layout::{MenuLayout, Point, Region, Technique};

/// Slack for comparing accumulated timestamps; sample clocks built as
/// `k * period` land a few ulps short of exact multiples.
const TIME_EPS_MS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
struct DwellTrack {
    label: String,
    entered_ms: f64,
    last_ms: f64,
    /// Time excluded from the accumulation (blinks inside the cell).
    frozen_ms: f64,
}

/// Selection state for one session. Samples must already be calibrated and
/// tagged by the blink filter.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineState {
    last_ms: Option<f64>,
    last_valid_ms: Option<f64>,
    region: Option<Region>,
    prev_point: Option<Point>,
    /// Crossing refractory flag: cleared by an activation, set again once
    /// the gaze is back inside the inner disk.
    armed: bool,
    dwell: Option<DwellTrack>,
    /// Dwell refractory: the activated cell, until the gaze leaves it.
    dwell_lockout: Option<String>,
    disc: Option<usize>,
    in_blink: bool,
    resumed_from_blink: bool,
}

impl Default for EngineState {
    fn default() -> Self {
        Self {
            last_ms: None,
            last_valid_ms: None,
            region: None,
            prev_point: None,
            armed: true,
            dwell: None,
            dwell_lockout: None,
            disc: None,
            in_blink: false,
            resumed_from_blink: false,
        }
    }
}

impl EngineState {
    pub fn region(&self) -> Option<&Region> {
        self.region.as_ref()
    }

    pub fn step(
        &mut self,
        layout: &MenuLayout,
        config: &EngineConfig,
        sample: &GazeSample,
        in_blink: bool,
    ) -> Result<Vec<GazeEvent>> {
        let t = sample.t_ms;
        if let Some(last) = self.last_ms {
            if t <= last {
                return Err(Error::Stream(format!("timestamp {t} does not follow {last}")));
            }
        }
        self.last_ms = Some(t);

        let mut events = Vec::new();
        let mut emit = |kind| events.push(GazeEvent { t_ms: t, kind });

        if in_blink {
            if !self.in_blink {
                self.in_blink = true;
                emit(EventKind::BlinkStart);
            }
            return Ok(events);
        }
        if self.in_blink {
            self.in_blink = false;
            self.resumed_from_blink = true;
            emit(EventKind::BlinkEnd);
        }

        if !sample.valid {
            let silent_for = self.last_valid_ms.map(|v| t - v);
            if silent_for.is_some_and(|d| d > config.sample_gap_timeout_ms) {
                if let Some(region) = self.region.take() {
                    emit(EventKind::Exit { region });
                }
                self.prev_point = None;
                self.armed = true;
                self.dwell = None;
                self.dwell_lockout = None;
                self.disc = None;
                self.resumed_from_blink = false;
                self.last_valid_ms = None;
            }
            return Ok(events);
        }
        self.last_valid_ms = Some(t);
        let resumed = std::mem::take(&mut self.resumed_from_blink);

        let p = sample.point();
        let region = layout.hit_test(p);

        if let MenuLayout::Circular(menu) = layout {
            if self.armed {
                if let Some(label) = self.prev_point.and_then(|prev| menu.segment_crossing(prev, p)) {
                    self.armed = false;
                    emit(EventKind::Activation { label, technique: Technique::Crossing });
                }
            }
            if matches!(region, Region::SliceInterior(_) | Region::CenterRegion) {
                self.armed = true;
            }
            let disc = menu.disc_target_at(p);
            if let Some(i) = disc.filter(|&i| self.disc != Some(i)) {
                emit(EventKind::TargetReached { label: menu.disc_targets[i].label.clone() });
            }
            self.disc = disc;
        }
        self.prev_point = Some(p);

        let changed = self.region.as_ref() != Some(&region);
        if changed {
            if let Some(old) = self.region.take() {
                emit(EventKind::Exit { region: old });
            }
            emit(EventKind::Enter { region: region.clone() });
            if region.is_center() {
                emit(EventKind::CenterReached);
            }
            self.region = Some(region.clone());
        }

        if matches!(layout, MenuLayout::Grid(_)) {
            match &region {
                Region::Cell(label) if changed => {
                    self.dwell_lockout = None;
                    self.dwell = Some(DwellTrack {
                        label: label.clone(),
                        entered_ms: t,
                        last_ms: t,
                        frozen_ms: 0.0,
                    });
                }
                Region::Cell(label) => {
                    if self.dwell_lockout.as_deref() != Some(label.as_str()) {
                        if let Some(track) = &mut self.dwell {
                            if resumed {
                                track.frozen_ms += t - track.last_ms;
                            }
                            track.last_ms = t;
                            let elapsed = t - track.entered_ms - track.frozen_ms;
                            let done = elapsed >= config.dwell_ms - TIME_EPS_MS;
                            let fraction = if done { 1.0 } else { elapsed / config.dwell_ms };
                            emit(EventKind::DwellProgress { label: label.clone(), fraction });
                            if done {
                                self.dwell = None;
                                self.dwell_lockout = Some(label.clone());
                                emit(EventKind::Activation {
                                    label: label.clone(),
                                    technique: Technique::Dwell,
                                });
                            }
                        }
                    }
                }
                _ => {
                    self.dwell = None;
                    self.dwell_lockout = None;
                }
            }
        }

        Ok(events)
    }
}
