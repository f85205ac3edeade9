//! Simulated participant: two Search-and-Select blocks per technique,
//! reduced to trial records and summarised.
//!
//! ```sh
//! cargo run --example simulate_blocks -- 7
//! ```

use std::sync::Arc;

use gaze_pie::experiment::{make_search_select_script, summarize, Grouping};
use gaze_pie::geometry::GeometryConfig;
use gaze_pie::layout::{alphabet, MenuLayout, Technique};
use gaze_pie::simulator::{run_agent, AgentProfile};
use gaze_pie::EngineConfig;

fn main() -> gaze_pie::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let mut records = Vec::new();
    for technique in [Technique::Dwell, Technique::Crossing] {
        let layout = Arc::new(MenuLayout::build(technique, &alphabet(), &GeometryConfig::default())?);
        for block in 1..=2 {
            let script = make_search_select_script(seed, technique, block);
            let profile = AgentProfile { rng_seed: seed * 10 + u64::from(block), ..AgentProfile::default() };
            let run = run_agent(&script, layout.clone(), &profile, &EngineConfig::default(), "agent")?;
            let errors = run.records.iter().filter(|r| r.error).count();
            println!(
                "{technique:<8} block {block}: {} trials, {errors} errors, {} blinks, {:.1} s of gaze",
                run.records.len(),
                run.blink_onsets_ms.len(),
                run.stream.samples.last().map_or(0.0, |s| s.t_ms) / 1000.0
            );
            records.extend(run.records);
        }
    }

    let stats = summarize(&records, Grouping::PerBlock);
    for g in &stats.groups {
        println!(
            "{:<8} block {}: activation median {:>6.0} ms (IQR {:>4.0}), n={}",
            g.technique,
            g.block.unwrap_or(0),
            g.activation.median_ms,
            g.activation.iqr_ms,
            g.activation.n
        );
    }
    for l in &stats.learning_rates {
        println!("{:<8} learning rate block {}->{}: {:.2}%", l.technique, l.from_block, l.to_block, l.rate_pct);
    }
    for r in &stats.ratios {
        println!("crossing / dwell activation time: {:.2}", r.crossing_over_dwell);
    }
    Ok(())
}
