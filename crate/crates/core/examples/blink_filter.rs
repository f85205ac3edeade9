//! A blink seen by the tracker as a downward dip, with and without the
//! blink filter. Unfiltered, the dip sweeps across the bottom of the
//! crossing menu and selects a letter nobody looked at.
//!
//! ```sh
//! cargo run --example blink_filter
//! ```

use std::sync::Arc;

use gaze_pie::engine::{filter_blinks, EventKind};
use gaze_pie::geometry::GeometryConfig;
use gaze_pie::layout::{alphabet, MenuLayout, Point, Technique};
use gaze_pie::simulator::{gen_fixation, inject_blink, AgentProfile};
use gaze_pie::{EngineConfig, GazeEngine};

fn main() -> gaze_pie::Result<()> {
    let profile = AgentProfile { rng_seed: 4, ..AgentProfile::default() };
    let mut samples = gen_fixation(Point::new(0.0, 1.2), 1500.0, &profile)?;
    inject_blink(&mut samples, 600.0, &profile);

    let tagged = filter_blinks(&samples, EngineConfig::default().blink());
    for (s, blink) in tagged.iter().filter(|(s, _)| (560.0..760.0).contains(&s.t_ms)) {
        println!("{:>7.1} ms  y={:>5.2}  valid={:<5}  blink={}", s.t_ms, s.y_cm, s.valid, blink);
    }

    let layout = Arc::new(MenuLayout::build(Technique::Crossing, &alphabet(), &GeometryConfig::default())?);
    for enabled in [false, true] {
        let config = EngineConfig { blink_filter_enabled: enabled, ..Default::default() };
        let events = GazeEngine::run(layout.clone(), config, &samples)?;
        let selected: Vec<&str> = events.iter().filter_map(|e| e.activation()).collect();
        let blinks = events.iter().filter(|e| e.kind == EventKind::BlinkStart).count();
        println!("filter {:<3}: activations {:?}, blinks {}", if enabled { "on" } else { "off" }, selected, blinks);
    }
    Ok(())
}
