//! Live session over TCP: starts a server on an ephemeral port, connects as
//! a client, calibrates, streams a simulated glance in pixels and prints
//! every reply.
//!
//! ```sh
//! cargo run --example session_client
//! ```

use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, TcpStream};
use std::thread;

use gaze_pie::geometry::GeometryConfig;
use gaze_pie::layout::{alphabet, MenuLayout, Technique};
use gaze_pie::service::Server;

const PX_PER_CM: f64 = 37.8;

fn main() -> gaze_pie::Result<()> {
    let server = Server::bind("127.0.0.1:0")?;
    let addr = server.local_addr()?;
    thread::spawn(move || server.run());

    let layout = MenuLayout::build(Technique::Crossing, &alphabet(), &GeometryConfig::default())?;
    let MenuLayout::Circular(menu) = &layout else { unreachable!() };
    let k = menu.slice_index("K").expect("K is on the menu");
    let centroid = menu.slice_centroid(k);
    let disc = menu.disc_targets[k].center;

    let stream = TcpStream::connect(addr)?;
    let reader = BufReader::new(stream.try_clone()?);
    let printer = thread::spawn(move || {
        for line in reader.lines().map_while(Result::ok) {
            let shown = if line.len() > 110 { format!("{}...", &line[..110]) } else { line };
            println!("<- {shown}");
        }
    });

    let send = |line: String| -> std::io::Result<()> {
        println!("-> {line}");
        writeln!(&stream, "{line}")
    };
    send(format!(r#"{{"type":"hello","technique":"crossing","px_per_cm":{PX_PER_CM}}}"#))?;
    // the tracker reads 4 px left of every calibration target
    let pairs: Vec<String> = [(0.0, 0.0), (-150.0, -150.0), (150.0, -150.0), (-150.0, 150.0), (150.0, 150.0)]
        .iter()
        .map(|(x, y)| format!(r#"{{"target":[{x},{y}],"gaze":[{},{y}]}}"#, x - 4.0))
        .collect();
    send(format!(r#"{{"type":"calibrate","pairs":[{}]}}"#, pairs.join(",")))?;
    for (i, p) in [gaze_pie::layout::Point::ORIGIN, centroid, disc].iter().enumerate() {
        let (x, y) = (p.x * PX_PER_CM - 4.0, p.y * PX_PER_CM);
        send(format!(r#"{{"type":"sample","t":{},"x":{x:.1},"y":{y:.1}}}"#, i * 100))?;
    }
    stream.shutdown(Shutdown::Write)?;
    printer.join().expect("printer thread");
    Ok(())
}
