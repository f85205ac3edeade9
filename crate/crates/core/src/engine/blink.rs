//! Blink artifact detection.
//!
//! Two artifact shapes are recognised: short runs of samples the tracker
//! flagged invalid, and V-shaped downward excursions that come back to the
//! pre-dip position. An excursion whose core was flagged invalid may instead
//! end anywhere above the dip threshold, since the eye can move while the
//! lid is closed. Both need lookahead, so the filter buffers a candidate
//! window for at most `max_duration_ms` before releasing it.

use super::GazeSample;
use crate::layout::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlinkConfig {
    pub max_duration_ms: f64,
    /// Minimum downward jump (y grows downward) that opens a dip candidate.
    pub dip_min_cm: f64,
    /// How close to the pre-dip position the gaze must come back.
    pub return_tolerance_cm: f64,
}

impl Default for BlinkConfig {
    fn default() -> Self {
        Self { max_duration_ms: 400.0, dip_min_cm: 4.0, return_tolerance_cm: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CandidateKind {
    Gap,
    Dip,
}

#[derive(Debug, Clone)]
struct Candidate {
    kind: CandidateKind,
    start_ms: f64,
    baseline: Option<Point>,
    buffered: Vec<GazeSample>,
    saw_invalid: bool,
}

/// Streaming blink detector. Every pushed sample is eventually released
/// exactly once, in order, tagged with whether it belongs to a blink.
#[derive(Debug, Clone)]
pub struct BlinkFilter {
    config: BlinkConfig,
    baseline: Option<Point>,
    pending: Option<Candidate>,
    /// Inside an invalid run already too long to be a blink.
    lost: bool,
}

impl BlinkFilter {
    pub fn new(config: BlinkConfig) -> Self {
        Self { config, baseline: None, pending: None, lost: false }
    }

    pub fn push(&mut self, sample: GazeSample) -> Vec<(GazeSample, bool)> {
        let mut out = Vec::new();
        self.feed(sample, &mut out);
        out
    }

    /// Releases whatever is still buffered. An unresolved candidate at the
    /// end of a stream is not a blink.
    pub fn finish(&mut self) -> Vec<(GazeSample, bool)> {
        let mut out = Vec::new();
        if let Some(c) = self.pending.take() {
            self.release(c.buffered, false, &mut out);
        }
        out
    }

    fn is_dip(&self, baseline: Option<Point>, s: &GazeSample) -> bool {
        s.valid && baseline.is_some_and(|b| s.y_cm - b.y >= self.config.dip_min_cm)
    }

    fn has_returned(&self, baseline: Option<Point>, s: &GazeSample) -> bool {
        s.valid && baseline.is_some_and(|b| s.point().distance(b) <= self.config.return_tolerance_cm)
    }

    fn release(&mut self, samples: Vec<GazeSample>, in_blink: bool, out: &mut Vec<(GazeSample, bool)>) {
        for s in samples {
            if !in_blink && s.valid {
                self.baseline = Some(s.point());
            }
            out.push((s, in_blink));
        }
    }

    fn feed(&mut self, s: GazeSample, out: &mut Vec<(GazeSample, bool)>) {
        if let Some(mut c) = self.pending.take() {
            if s.t_ms - c.start_ms > self.config.max_duration_ms {
                self.lost = c.kind == CandidateKind::Gap && !s.valid;
                self.release(c.buffered, false, out);
            } else {
                c.saw_invalid |= !s.valid;
                match c.kind {
                    CandidateKind::Gap if !s.valid => {
                        c.buffered.push(s);
                        self.pending = Some(c);
                        return;
                    }
                    CandidateKind::Gap if self.is_dip(c.baseline, &s) => {
                        c.kind = CandidateKind::Dip;
                        c.buffered.push(s);
                        self.pending = Some(c);
                        return;
                    }
                    CandidateKind::Gap => self.release(c.buffered, true, out),
                    CandidateKind::Dip
                        if self.has_returned(c.baseline, &s)
                            || (c.saw_invalid && s.valid && !self.is_dip(c.baseline, &s)) =>
                    {
                        self.release(c.buffered, true, out)
                    }
                    CandidateKind::Dip => {
                        c.buffered.push(s);
                        self.pending = Some(c);
                        return;
                    }
                }
            }
        }

        if self.lost {
            if !s.valid {
                out.push((s, false));
                return;
            }
            self.lost = false;
        }
        let kind = if !s.valid {
            Some(CandidateKind::Gap)
        } else if self.is_dip(self.baseline, &s) {
            Some(CandidateKind::Dip)
        } else {
            None
        };
        match kind {
            Some(kind) => {
                self.pending = Some(Candidate {
                    kind,
                    start_ms: s.t_ms,
                    baseline: self.baseline,
                    buffered: vec![s],
                    saw_invalid: !s.valid,
                })
            }
            None => self.release(vec![s], false, out),
        }
    }
}

/// Offline convenience: tags a whole recorded stream.
pub fn filter_blinks(samples: &[GazeSample], config: BlinkConfig) -> Vec<(GazeSample, bool)> {
    let mut filter = BlinkFilter::new(config);
    let mut out: Vec<_> = samples.iter().flat_map(|&s| filter.push(s)).collect();
    out.extend(filter.finish());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixation(from_ms: u32, to_ms: u32, x: f64, y: f64) -> Vec<GazeSample> {
        (from_ms..to_ms)
            .step_by(10)
            .map(|t| GazeSample { t_ms: t as f64, x_cm: x, y_cm: y, valid: true })
            .collect()
    }

    fn flags(tagged: &[(GazeSample, bool)]) -> Vec<bool> {
        tagged.iter().map(|(_, b)| *b).collect()
    }

    #[test]
    fn smooth_fixation_is_untouched() {
        let s = fixation(0, 1000, 1.0, -4.0);
        let out = filter_blinks(&s, BlinkConfig::default());
        assert_eq!(out.len(), s.len());
        assert!(flags(&out).iter().all(|b| !b));
    }

    #[test]
    fn v_dip_is_marked() {
        let mut s = fixation(0, 300, 0.0, -4.0);
        s.extend(fixation(300, 420, 0.0, 4.0));
        s.extend(fixation(420, 800, 0.0, -4.0));
        let out = filter_blinks(&s, BlinkConfig::default());
        assert_eq!(out.iter().map(|(s, _)| s.t_ms).collect::<Vec<_>>(), s.iter().map(|s| s.t_ms).collect::<Vec<_>>());
        for (sample, blink) in &out {
            assert_eq!(*blink, (300.0..420.0).contains(&sample.t_ms), "t={}", sample.t_ms);
        }
    }

    #[test]
    fn short_invalid_run_is_a_blink() {
        let mut s = fixation(0, 1000, 2.0, 2.0);
        for x in s.iter_mut().filter(|x| (400.0..550.0).contains(&x.t_ms)) {
            x.valid = false;
        }
        let out = filter_blinks(&s, BlinkConfig::default());
        for (sample, blink) in &out {
            assert_eq!(*blink, !sample.valid);
        }
    }

    #[test]
    fn long_invalid_run_is_tracker_loss() {
        let mut s = fixation(0, 1500, 2.0, 2.0);
        for x in s.iter_mut().filter(|x| (400.0..1000.0).contains(&x.t_ms)) {
            x.valid = false;
        }
        let out = filter_blinks(&s, BlinkConfig::default());
        assert!(flags(&out).iter().all(|b| !b));
        assert_eq!(out.len(), s.len());
    }

    #[test]
    fn downward_move_that_stays_is_not_a_blink() {
        let mut s = fixation(0, 300, 0.0, -4.0);
        s.extend(fixation(300, 1200, 0.0, 3.0));
        let out = filter_blinks(&s, BlinkConfig::default());
        assert!(flags(&out).iter().all(|b| !b));
        assert_eq!(out.len(), s.len());
    }

    #[test]
    fn dip_with_invalid_middle() {
        let mut s = fixation(0, 300, 0.0, 0.0);
        let mut dip = fixation(300, 420, 0.0, 6.0);
        for x in dip.iter_mut().skip(4).take(4) {
            x.valid = false;
        }
        s.extend(dip);
        s.extend(fixation(420, 700, 0.1, 0.0));
        let out = filter_blinks(&s, BlinkConfig::default());
        for (sample, blink) in &out {
            assert_eq!(*blink, (300.0..420.0).contains(&sample.t_ms), "t={}", sample.t_ms);
        }
    }

    #[test]
    fn blink_that_lands_elsewhere() {
        let mut s = fixation(0, 300, 0.0, 0.0);
        let mut dip = fixation(300, 420, 0.0, 6.0);
        for x in dip.iter_mut().skip(4).take(4) {
            x.valid = false;
        }
        s.extend(dip);
        s.extend(fixation(420, 700, -3.0, 2.5));
        let out = filter_blinks(&s, BlinkConfig::default());
        for (sample, blink) in &out {
            assert_eq!(*blink, (300.0..420.0).contains(&sample.t_ms), "t={}", sample.t_ms);
        }

        // without an invalid core the same shape is a real movement
        let mut s = fixation(0, 300, 0.0, 0.0);
        s.extend(fixation(300, 420, 0.0, 6.0));
        s.extend(fixation(420, 700, -3.0, 2.5));
        assert!(filter_blinks(&s, BlinkConfig::default()).iter().all(|(_, b)| !b));
    }

    #[test]
    fn trailing_candidate_released_on_finish() {
        let mut s = fixation(0, 200, 0.0, 0.0);
        s.extend(fixation(200, 260, 0.0, 6.0));
        let mut f = BlinkFilter::new(BlinkConfig::default());
        let mut out: Vec<_> = s.iter().flat_map(|&x| f.push(x)).collect();
        assert_eq!(out.len(), 20);
        out.extend(f.finish());
        assert_eq!(out.len(), s.len());
        assert!(flags(&out).iter().all(|b| !b));
    }
}
