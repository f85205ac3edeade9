//! Capacity table: how many items fit a crossing menu and a dwell grid at
//! different viewing distances and glyph sizes.
//!
//! ```sh
//! cargo run --example geometry_capacity
//! ```

use gaze_pie::geometry::GeometryConfig;

fn main() -> gaze_pie::Result<()> {
    println!("{:>8} {:>8} {:>9} {:>9} {:>10} {:>8} {:>12} {:>6}", "dist", "glyph", "angle", "obj", "radius", "slices", "grid", "usable");
    for distance in [45.0, 55.0, 65.0] {
        for char_size in [0.35, 0.45, 0.6] {
            let cfg = GeometryConfig { viewing_distance_cm: distance, char_size_cm: char_size, ..Default::default() };
            let cap = cfg.capacity(26)?;
            println!(
                "{:>6.0}cm {:>6.2}cm {:>7.2}deg {:>7.2}cm {:>8.2}cm {:>8} {:>5.1}x{:<4.1}cm {:>6}",
                distance,
                char_size,
                cap.vision_angle_deg,
                cap.obj_size_cm,
                cap.crossing_radius_cm,
                cap.max_slices,
                cap.grid_width_cm,
                cap.grid_height_cm,
                cap.usable
            );
        }
    }
    Ok(())
}
