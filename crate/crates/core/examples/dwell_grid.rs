//! Dwell-time selection on the letter grid, including progress feedback
//! and a glance that leaves too early.
//!
//! ```sh
//! cargo run --example dwell_grid
//! ```

use std::sync::Arc;

use gaze_pie::engine::EventKind;
use gaze_pie::geometry::GeometryConfig;
use gaze_pie::layout::{alphabet, CellContent, MenuLayout, Point, Technique};
use gaze_pie::{EngineConfig, GazeEngine, GazeSample};

fn main() -> gaze_pie::Result<()> {
    let layout = MenuLayout::build(Technique::Dwell, &alphabet(), &GeometryConfig::default())?;
    let MenuLayout::Grid(grid) = &layout else { unreachable!() };
    println!("{} x {} grid, {:.1} x {:.1} cm", grid.rows, grid.cols, grid.width_cm(), grid.height_cm());
    for row in 0..grid.rows {
        let line: String = grid.cells[row * grid.cols..(row + 1) * grid.cols]
            .iter()
            .map(|c| match &c.content {
                CellContent::Item(l) => format!(" {l} "),
                CellContent::Center => " + ".to_string(),
                CellContent::Empty => " . ".to_string(),
            })
            .collect();
        println!("  {line}");
    }

    let at = |label: &str| grid.cell_of(label).expect("letter on grid").rect.center();
    // 300 ms on B (too short), then 700 ms on W
    let mut samples = Vec::new();
    let mut t = 0.0;
    for (p, ms) in [(Point::ORIGIN, 200.0), (at("B"), 300.0), (at("W"), 700.0), (Point::ORIGIN, 200.0)] {
        let end = t + ms;
        while t < end {
            samples.push(GazeSample::new(t, p));
            t += 1000.0 / 60.0;
        }
    }
    let events = GazeEngine::run(Arc::new(layout.clone()), EngineConfig::default(), &samples)?;
    for e in &events {
        match &e.kind {
            EventKind::DwellProgress { label, fraction } => {
                println!("{:>6.0} ms    {label} {:<20} {:>3.0}%", e.t_ms, "#".repeat((fraction * 20.0) as usize), fraction * 100.0)
            }
            kind => println!("{:>6.0} ms  {kind:?}", e.t_ms),
        }
    }
    Ok(())
}
