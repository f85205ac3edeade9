//! Writes trial records to CSV, reads them back and prints the summary CSV,
//! as `gazepie stats` would.
//!
//! ```sh
//! cargo run --example stats_report
//! ```

use gaze_pie::experiment::{summarize, Grouping, TrialRecord};
use gaze_pie::io::{read_trials, write_stats, write_trials};
use gaze_pie::layout::Technique;

fn trial(technique: Technique, block: u32, trial: usize, activation: Option<f64>, warmup: bool) -> TrialRecord {
    TrialRecord {
        user: "p01".into(),
        technique,
        block,
        trial,
        prescription: "K".into(),
        shown_ms: 4000.0 * trial as f64,
        activated: activation.map(|_| "K".into()),
        activated_ms: activation.map(|a| 4000.0 * trial as f64 + a),
        activation_time_ms: activation,
        return_time_ms: activation.map(|_| 180.0 + trial as f64),
        error: activation.is_none(),
        warmup,
    }
}

fn main() -> gaze_pie::Result<()> {
    let mut records = Vec::new();
    for (technique, base) in [(Technique::Dwell, 2100.0), (Technique::Crossing, 1500.0)] {
        for block in 1..=2 {
            let speedup = if block == 2 { 0.85 } else { 1.0 };
            for i in 1..=8 {
                let activation = (i != 5).then_some((base + 40.0 * i as f64) * speedup);
                records.push(trial(technique, block, i, activation, i == 1));
            }
        }
    }

    let mut csv = Vec::new();
    write_trials(&mut csv, &records)?;
    println!("{}", String::from_utf8_lossy(&csv).lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("...\n");

    let parsed = read_trials(csv.as_slice())?;
    let stats = summarize(&parsed, Grouping::PerBlock);
    write_stats(std::io::stdout().lock(), &stats)?;
    for w in &stats.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
