//! Builds the 26-letter crossing menu, prints its layout and replays one
//! glance: rest in the middle, look at `R`, cross out to its disc target and
//! come back.
//!
//! ```sh
//! cargo run --example crossing_menu
//! ```

use std::sync::Arc;

use gaze_pie::geometry::GeometryConfig;
use gaze_pie::layout::{alphabet, MenuLayout, Point, Technique};
use gaze_pie::{EngineConfig, GazeEngine, GazeSample};

fn main() -> gaze_pie::Result<()> {
    let layout = MenuLayout::build(Technique::Crossing, &alphabet(), &GeometryConfig::default())?;
    let MenuLayout::Circular(menu) = &layout else { unreachable!() };
    println!(
        "inner radius {:.2} cm, crossing band {:.2} cm, {} slices of {:.2} deg",
        menu.inner_radius_cm,
        menu.band_width_cm,
        menu.slices.len(),
        menu.slice_width_deg()
    );
    for probe in [Point::ORIGIN, Point::new(0.0, -3.0), Point::new(0.0, -5.8), Point::new(0.0, -9.0)] {
        println!("  hit_test({:>5.1}, {:>5.1}) = {:?}", probe.x, probe.y, layout.hit_test(probe));
    }

    let r = menu.slice_index("R").expect("R is on the menu");
    let path = [
        Point::ORIGIN,
        menu.slice_centroid(r),
        menu.disc_targets[r].center,
        menu.disc_targets[r].center,
        Point::ORIGIN,
    ];
    let samples: Vec<GazeSample> =
        path.iter().enumerate().map(|(i, &p)| GazeSample::new(i as f64 * 100.0, p)).collect();
    for e in GazeEngine::run(Arc::new(layout), EngineConfig::default(), &samples)? {
        println!("{:>6.0} ms  {:?}", e.t_ms, e.kind);
    }
    Ok(())
}
