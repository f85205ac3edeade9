//! Synthetic gaze: fixations with jitter, minimum-jerk saccades, blink
//! artifacts, and a scripted agent that performs menu tasks.
//!
//! None of the profile defaults are measured human parameters. They are
//! engineering choices giving plausible timings: a linear amplitude/duration
//! law for saccades, lognormal search times and Poisson blinks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::{EngineConfig, GazeEngine, GazeEvent, GazeSample};
use crate::error::{domain, Result};
use crate::experiment::{reduce, SessionLog, TaskScript, TrialRecord};
use crate::layout::{MenuLayout, Point};

const BLINK_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    /// Saccade duration floor.
    pub saccade_base_ms: f64,
    pub saccade_ms_per_deg: f64,
    /// Used to convert on-screen amplitudes to visual angle.
    pub viewing_distance_cm: f64,
    pub fixation_jitter_sd_cm: f64,
    pub reaction_ms: f64,
    pub search_median_ms: f64,
    /// Log-scale spread of the search time; 0 makes it deterministic.
    pub search_log_sd: f64,
    pub blink_rate_hz: f64,
    pub blink_duration_ms: f64,
    pub blink_depth_cm: f64,
    pub sample_rate_hz: f64,
    /// Extra hold past the dwell time before leaving a cell.
    pub dwell_margin_ms: f64,
    /// Look at the disc target this long after a crossing.
    pub target_hold_ms: f64,
    /// Rest at home after the last trial.
    pub tail_ms: f64,
    pub rng_seed: u64,
}

impl Default for AgentProfile {
    fn default() -> Self {
        Self {
            saccade_base_ms: 20.0,
            saccade_ms_per_deg: 2.0,
            viewing_distance_cm: 55.0,
            fixation_jitter_sd_cm: 0.15,
            reaction_ms: 200.0,
            search_median_ms: 800.0,
            search_log_sd: 0.5,
            blink_rate_hz: 0.2,
            blink_duration_ms: 120.0,
            blink_depth_cm: 6.0,
            sample_rate_hz: 90.0,
            dwell_margin_ms: 80.0,
            target_hold_ms: 150.0,
            tail_ms: 500.0,
            rng_seed: 0,
        }
    }
}

impl AgentProfile {
    /// No jitter, no blinks, deterministic search time.
    pub fn perfect() -> Self {
        Self { fixation_jitter_sd_cm: 0.0, search_log_sd: 0.0, blink_rate_hz: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("saccade_base_ms", self.saccade_base_ms),
            ("viewing_distance_cm", self.viewing_distance_cm),
            ("search_median_ms", self.search_median_ms),
            ("blink_duration_ms", self.blink_duration_ms),
            ("blink_depth_cm", self.blink_depth_cm),
            ("sample_rate_hz", self.sample_rate_hz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("saccade_ms_per_deg", self.saccade_ms_per_deg),
            ("fixation_jitter_sd_cm", self.fixation_jitter_sd_cm),
            ("reaction_ms", self.reaction_ms),
            ("search_log_sd", self.search_log_sd),
            ("blink_rate_hz", self.blink_rate_hz),
            ("dwell_margin_ms", self.dwell_margin_ms),
            ("target_hold_ms", self.target_hold_ms),
            ("tail_ms", self.tail_ms),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn sample_period_ms(&self) -> f64 {
        1000.0 / self.sample_rate_hz
    }

    pub fn amplitude_deg(&self, amplitude_cm: f64) -> f64 {
        (2.0 * (amplitude_cm / 2.0 / self.viewing_distance_cm).atan()).to_degrees()
    }

    pub fn saccade_duration_ms(&self, amplitude_cm: f64) -> f64 {
        self.saccade_base_ms + self.saccade_ms_per_deg * self.amplitude_deg(amplitude_cm)
    }

    /// Number of samples a saccade of this amplitude spans, endpoints
    /// included.
    pub fn saccade_samples(&self, amplitude_cm: f64) -> usize {
        let intervals = (self.saccade_duration_ms(amplitude_cm) / self.sample_period_ms()).ceil() as usize;
        intervals.max(1) + 1
    }
}

/// Minimum-jerk position profile, `s(0) = 0`, `s(1) = 1`.
pub fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// What the agent meant to do and when.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub label: String,
    pub start_ms: f64,
    pub end_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStream {
    pub samples: Vec<GazeSample>,
    pub ground_truth: Vec<GroundTruth>,
}

/// Appends samples on a fixed clock: sample `k` is at `k * 1000 / rate` ms.
#[derive(Debug, Clone)]
pub struct StreamBuilder {
    profile: AgentProfile,
    rng: ChaCha8Rng,
    jitter: Option<Normal<f64>>,
    samples: Vec<GazeSample>,
    next_index: u64,
}

impl StreamBuilder {
    pub fn new(profile: &AgentProfile) -> Result<Self> {
        profile.validate()?;
        let jitter = (profile.fixation_jitter_sd_cm > 0.0)
            .then(|| Normal::new(0.0, profile.fixation_jitter_sd_cm).expect("sd validated"));
        Ok(Self {
            profile: profile.clone(),
            rng: ChaCha8Rng::seed_from_u64(profile.rng_seed),
            jitter,
            samples: Vec::new(),
            next_index: 0,
        })
    }

    pub fn now_ms(&self) -> f64 {
        self.next_index as f64 * 1000.0 / self.profile.sample_rate_hz
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn emit(&mut self, p: Point) {
        let (dx, dy) = match self.jitter {
            Some(n) => (n.sample(&mut self.rng), n.sample(&mut self.rng)),
            None => (0.0, 0.0),
        };
        let t_ms = self.now_ms();
        self.samples.push(GazeSample { t_ms, x_cm: p.x + dx, y_cm: p.y + dy, valid: true });
        self.next_index += 1;
    }

    /// Holds `center` for `duration_ms`, one sample per clock tick.
    pub fn fixation(&mut self, center: Point, duration_ms: f64) {
        let n = (duration_ms * self.profile.sample_rate_hz / 1000.0).round() as usize;
        for _ in 0..n {
            self.emit(center);
        }
    }

    /// Minimum-jerk movement; the first sample is at `from`, the last at `to`.
    pub fn saccade(&mut self, from: Point, to: Point) {
        let n = self.profile.saccade_samples(from.distance(to));
        for i in 0..n {
            let s = min_jerk(i as f64 / (n - 1) as f64);
            self.emit(from + (to - from) * s);
        }
    }

    pub fn into_samples(self) -> Vec<GazeSample> {
        self.samples
    }
}

pub fn gen_fixation(center: Point, duration_ms: f64, profile: &AgentProfile) -> Result<Vec<GazeSample>> {
    if duration_ms.is_nan() || duration_ms <= 0.0 {
        return Err(domain("fixation duration must be > 0"));
    }
    let mut b = StreamBuilder::new(profile)?;
    b.fixation(center, duration_ms);
    Ok(b.into_samples())
}

pub fn gen_saccade(from: Point, to: Point, profile: &AgentProfile) -> Result<Vec<GazeSample>> {
    if from == to {
        return Err(domain("saccade endpoints must differ"));
    }
    let mut b = StreamBuilder::new(profile)?;
    b.saccade(from, to);
    Ok(b.into_samples())
}

/// Overwrites `blink_duration_ms` of samples from `at_ms` with a blink
/// artifact: a sharp downward excursion of `blink_depth_cm` whose middle
/// third the tracker reports as invalid. The window is clamped to the
/// stream.
pub fn inject_blink(samples: &mut [GazeSample], at_ms: f64, profile: &AgentProfile) {
    let Some(first) = samples.first() else { return };
    let start_ms = at_ms.max(first.t_ms);
    let end_ms = start_ms + profile.blink_duration_ms;
    let start = samples.partition_point(|s| s.t_ms < start_ms);
    let end = samples.partition_point(|s| s.t_ms < end_ms);
    if start >= end {
        return;
    }
    let base = samples[start.saturating_sub(1)].point();
    let m = end - start;
    for (i, s) in samples[start..end].iter_mut().enumerate() {
        let frac = if m > 1 { i as f64 / (m - 1) as f64 } else { 0.5 };
        let depth = profile.blink_depth_cm * (0.75 + 0.25 * (std::f64::consts::PI * frac).sin());
        s.x_cm = base.x;
        s.y_cm = base.y + depth;
        s.valid = !(m / 3..m - m / 3).contains(&i) || m < 3;
    }
}

/// Blink onsets of a Poisson process over `[0, span_ms)`, kept at least one
/// blink duration plus 200 ms apart.
pub fn blink_onsets(profile: &AgentProfile, span_ms: f64) -> Vec<f64> {
    if profile.blink_rate_hz <= 0.0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.rng_seed);
    rng.set_stream(BLINK_STREAM);
    let gap = Exp::new(profile.blink_rate_hz / 1000.0).expect("rate validated");
    let min_spacing = profile.blink_duration_ms + 200.0;
    let mut out: Vec<f64> = Vec::new();
    let mut t = 0.0;
    loop {
        t += gap.sample(&mut rng);
        if t >= span_ms {
            break;
        }
        if out.last().is_none_or(|&last| t - last >= min_spacing) {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentRun {
    pub stream: SyntheticStream,
    pub events: Vec<GazeEvent>,
    pub onsets_ms: Vec<f64>,
    pub blink_onsets_ms: Vec<f64>,
    pub records: Vec<TrialRecord>,
}

const BLINK_PLANNING_HORIZON_MS: f64 = 1.0e7;

/// Extends a dwell hold starting at `start_ms` by the blink time falling
/// inside it, the way a user keeps looking until the selection fires.
fn hold_through_blinks(start_ms: f64, base_ms: f64, blinks: &[f64], profile: &AgentProfile) -> f64 {
    let mut hold = base_ms;
    loop {
        let end = start_ms + hold;
        let covered: f64 = blinks
            .iter()
            .map(|&b| ((b + profile.blink_duration_ms).min(end) - b.max(start_ms)).max(0.0))
            .sum();
        let next = base_ms + covered;
        if next <= hold {
            return hold;
        }
        hold = next;
    }
}

/// Synthesises the gaze of an agent performing `task` on `layout`. Returns
/// the stream and the prescription onsets. Dwell targets are held for
/// `dwell_ms` plus the profile's margin, longer if a blink interrupts.
pub fn synthesize_task(
    task: &TaskScript,
    layout: &MenuLayout,
    profile: &AgentProfile,
    dwell_ms: f64,
) -> Result<(SyntheticStream, Vec<f64>)> {
    if task.technique != layout.technique() {
        return Err(domain(format!(
            "task is for {} but the layout is a {} menu",
            task.technique,
            layout.technique()
        )));
    }
    let search = LogNormal::new(profile.search_median_ms.ln(), profile.search_log_sd)
        .map_err(|e| domain(format!("search time distribution: {e}")))?;
    let mut b = StreamBuilder::new(profile)?;
    let home = layout.home();
    // the onset sequence is prefix-stable, so planning against a long
    // horizon and truncating later gives the blinks `blink_onsets` reports
    let planned_blinks = blink_onsets(profile, BLINK_PLANNING_HORIZON_MS);
    let mut onsets = Vec::with_capacity(task.len());
    let mut truth = Vec::with_capacity(task.len());

    for p in &task.trials {
        let onset = b.now_ms();
        onsets.push(onset);
        let search_ms = if profile.search_log_sd > 0.0 {
            search.sample(b.rng())
        } else {
            profile.search_median_ms
        };
        b.fixation(home, profile.reaction_ms + search_ms);

        let leave_at = match layout {
            MenuLayout::Grid(g) => {
                let target = g
                    .cell_of(&p.label)
                    .ok_or_else(|| domain(format!("label {:?} is not in the menu", p.label)))?
                    .rect
                    .center();
                b.saccade(home, target);
                let hold = hold_through_blinks(b.now_ms(), dwell_ms + profile.dwell_margin_ms, &planned_blinks, profile);
                b.fixation(target, hold);
                let leave = b.now_ms();
                b.saccade(target, home);
                leave
            }
            MenuLayout::Circular(c) => {
                let k = c
                    .slice_index(&p.label)
                    .ok_or_else(|| domain(format!("label {:?} is not in the menu", p.label)))?;
                let centroid = c.slice_centroid(k);
                let disc = c.disc_targets[k].center;
                b.saccade(home, centroid);
                b.saccade(centroid, disc);
                b.fixation(disc, profile.target_hold_ms);
                let leave = b.now_ms();
                b.saccade(disc, home);
                leave
            }
        };
        truth.push(GroundTruth { label: p.label.clone(), start_ms: onset, end_ms: leave_at });
    }
    b.fixation(home, profile.tail_ms);

    let mut samples = b.into_samples();
    let span = samples.last().map_or(0.0, |s| s.t_ms);
    for &at in planned_blinks.iter().take_while(|&&at| at < span) {
        inject_blink(&mut samples, at, profile);
    }
    Ok((SyntheticStream { samples, ground_truth: truth }, onsets))
}

/// Runs the agent on `task`, feeds the stream through a fresh engine and
/// reduces the events to trial records.
pub fn run_agent(
    task: &TaskScript,
    layout: Arc<MenuLayout>,
    profile: &AgentProfile,
    engine: &EngineConfig,
    user: &str,
) -> Result<AgentRun> {
    let (stream, onsets) = synthesize_task(task, &layout, profile, engine.dwell_ms)?;

    let events = GazeEngine::run(layout, engine.clone(), &stream.samples)?;
    let records = reduce(SessionLog { user, script: task, onsets_ms: &onsets }, &events)?;
    let blink_onsets_ms = blink_onsets(profile, stream.samples.last().map_or(0.0, |s| s.t_ms));
    Ok(AgentRun { stream, events, onsets_ms: onsets, blink_onsets_ms, records })
}

/// Activations that no intended action accounts for. Each intended action
/// absorbs at most one activation of its label inside its window.
pub fn unintended_activations(events: &[GazeEvent], truth: &[GroundTruth]) -> usize {
    let mut used = vec![false; truth.len()];
    let mut count = 0;
    for e in events {
        let Some(label) = e.activation() else { continue };
        let hit = truth.iter().enumerate().position(|(i, g)| {
            !used[i] && g.label == label && e.t_ms >= g.start_ms && e.t_ms <= g.end_ms
        });
        match hit {
            Some(i) => used[i] = true,
            None => count += 1,
        }
    }
    count
}

/// Uniform point in the open disk of radius `r` around `center`.
pub fn random_point_in_disk<R: Rng>(rng: &mut R, center: Point, r: f64) -> Point {
    let radius = r * rng.random::<f64>().sqrt();
    let angle = rng.random::<f64>() * 360.0;
    Point::polar(center, angle, radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{filter_blinks, EventKind};
    use crate::geometry::GeometryConfig;
    use crate::layout::{alphabet, Technique};

    const PERIOD_90: f64 = 1000.0 / 90.0;

    #[test]
    fn fixation_is_on_the_sample_clock() {
        let c = Point::new(1.5, -2.0);
        let s = gen_fixation(c, 500.0, &AgentProfile::perfect()).unwrap();
        assert_eq!(s.len(), 45);
        for (k, x) in s.iter().enumerate() {
            assert_eq!(x.t_ms, k as f64 * 1000.0 / 90.0);
            assert_eq!(x.point(), c);
            assert!(x.valid);
        }
        assert!(gen_fixation(c, 0.0, &AgentProfile::perfect()).is_err());
    }

    #[test]
    fn jitter_is_seeded() {
        let p = AgentProfile { rng_seed: 7, ..AgentProfile::default() };
        let a = gen_fixation(Point::ORIGIN, 300.0, &p).unwrap();
        assert_eq!(a, gen_fixation(Point::ORIGIN, 300.0, &p).unwrap());
        let q = AgentProfile { rng_seed: 8, ..p };
        assert_ne!(a, gen_fixation(Point::ORIGIN, 300.0, &q).unwrap());
        let mean_x = a.iter().map(|s| s.x_cm).sum::<f64>() / a.len() as f64;
        assert!(mean_x.abs() < 0.1);
    }

    #[test]
    fn saccade_duration_follows_amplitude() {
        let p = AgentProfile::perfect();
        // 10 cm at 55 cm: 2·atan(5/55) = 10.389 deg, 20 + 2·10.389 = 40.78 ms
        assert!((p.saccade_duration_ms(10.0) - 40.778).abs() < 1e-3);
        let s = gen_saccade(Point::ORIGIN, Point::new(10.0, 0.0), &p).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s[3].t_ms < 40.778 && s[4].t_ms >= 40.778);
        let tiny = gen_saccade(Point::ORIGIN, Point::new(1e-9, 0.0), &p).unwrap();
        assert!(tiny.len() >= 2);
        assert!(gen_saccade(Point::ORIGIN, Point::ORIGIN, &p).is_err());
    }

    #[test]
    fn saccade_stays_on_the_chord() {
        let from = Point::new(-3.0, 1.0);
        let to = Point::new(4.0, -5.0);
        let s = gen_saccade(from, to, &AgentProfile::perfect()).unwrap();
        assert_eq!(s.first().unwrap().point(), from);
        assert_eq!(s.last().unwrap().point(), to);
        let d = to - from;
        let mut last = -1.0;
        for x in &s {
            let v = x.point() - from;
            assert!((v.x * d.y - v.y * d.x).abs() < 1e-9);
            let along = v.dot(d) / d.dot(d);
            assert!(along >= last);
            last = along;
        }
        assert_eq!(min_jerk(0.5), 0.5);
    }

    #[test]
    fn injected_blinks_are_filtered() {
        let p = AgentProfile { rng_seed: 3, ..AgentProfile::default() };
        let mut s = gen_fixation(Point::new(0.0, -2.0), 4000.0, &p).unwrap();
        inject_blink(&mut s, 500.0, &p);
        inject_blink(&mut s, 2500.0, &p);
        let tagged = filter_blinks(&s, EngineConfig::default().blink());
        let window: Vec<bool> = tagged
            .iter()
            .filter(|(x, _)| (500.0..620.0).contains(&x.t_ms) || (2500.0..2620.0).contains(&x.t_ms))
            .map(|&(_, b)| b)
            .collect();
        let hit = window.iter().filter(|&&b| b).count();
        assert!(hit as f64 >= 0.95 * window.len() as f64, "{hit}/{}", window.len());
        assert!(tagged.iter().filter(|(x, _)| x.t_ms < 480.0).all(|&(_, b)| !b));

        let layout = Arc::new(MenuLayout::build(Technique::Dwell, &alphabet(), &GeometryConfig::default()).unwrap());
        let events = GazeEngine::run(layout, EngineConfig::default(), &s).unwrap();
        let starts = events.iter().filter(|e| e.kind == EventKind::BlinkStart).count();
        let ends = events.iter().filter(|e| e.kind == EventKind::BlinkEnd).count();
        assert_eq!((starts, ends), (2, 2));
    }

    #[test]
    fn blink_window_is_clamped() {
        let p = AgentProfile::perfect();
        let mut s = gen_fixation(Point::ORIGIN, 200.0, &p).unwrap();
        inject_blink(&mut s, -50.0, &p);
        assert!(s[0].y_cm > 4.0);
        assert!(s.iter().filter(|x| x.t_ms >= 120.0).all(|x| x.y_cm == 0.0));
        inject_blink(&mut s, 185.0, &p);
        assert!(s.last().unwrap().y_cm > 4.0);
        let mut empty: Vec<GazeSample> = Vec::new();
        inject_blink(&mut empty, 0.0, &p);
    }

    #[test]
    fn blink_onsets_are_spaced_and_seeded() {
        let p = AgentProfile { blink_rate_hz: 2.0, rng_seed: 11, ..AgentProfile::default() };
        let a = blink_onsets(&p, 60_000.0);
        assert_eq!(a, blink_onsets(&p, 60_000.0));
        assert!(a.windows(2).all(|w| w[1] - w[0] >= p.blink_duration_ms + 200.0));
        assert!(a.iter().all(|&t| (0.0..60_000.0).contains(&t)));
        assert!(blink_onsets(&AgentProfile::perfect(), 60_000.0).is_empty());
    }

    #[test]
    fn perfect_dwell_timing_decomposes() {
        let p = AgentProfile::perfect();
        let layout = Arc::new(MenuLayout::build(Technique::Dwell, &alphabet(), &GeometryConfig::default()).unwrap());
        let script = TaskScript::custom(Technique::Dwell, &["A".to_string()]);
        let run = run_agent(&script, layout.clone(), &p, &EngineConfig::default(), "t").unwrap();
        let r = &run.records[0];
        assert!(!r.error);
        let MenuLayout::Grid(g) = layout.as_ref() else { unreachable!() };
        let amplitude = g.cell_of("A").unwrap().rect.center().norm();
        let n = p.saccade_samples(amplitude);
        let search = p.reaction_ms + p.search_median_ms;
        let act = r.activation_time_ms.unwrap();
        assert!(act >= search + 500.0, "{act}");
        assert!(act <= search + (n - 1) as f64 * PERIOD_90 + 500.0 + PERIOD_90, "{act}");
        assert!(r.return_time_ms.unwrap() > 0.0);
    }

    #[test]
    fn perfect_crossing_run_has_no_errors() {
        let p = AgentProfile::perfect();
        let layout =
            Arc::new(MenuLayout::build(Technique::Crossing, &alphabet(), &GeometryConfig::default()).unwrap());
        let script = TaskScript::custom(Technique::Crossing, &alphabet());
        let run = run_agent(&script, layout, &p, &EngineConfig::default(), "t").unwrap();
        assert_eq!(run.records.len(), 26);
        assert!(run.records.iter().all(|r| !r.error && r.activated.as_deref() == Some(&r.prescription)));
        assert_eq!(unintended_activations(&run.events, &run.stream.ground_truth), 0);
    }

    #[test]
    fn mismatched_layout_is_rejected() {
        let layout = MenuLayout::build(Technique::Dwell, &alphabet(), &GeometryConfig::default()).unwrap();
        let script = TaskScript::custom(Technique::Crossing, &["A".to_string()]);
        assert!(synthesize_task(&script, &layout, &AgentProfile::perfect(), 500.0).is_err());
    }

    #[test]
    fn disk_points_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = Point::new(2.0, 3.0);
        for _ in 0..1000 {
            assert!(random_point_in_disk(&mut rng, c, 0.5).distance(c) < 0.5);
        }
    }
}
