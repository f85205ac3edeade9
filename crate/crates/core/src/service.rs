//! Line-delimited JSON session protocol and a TCP server speaking it.
//!
//! Each connection is one session. The client opens with `hello`, receives
//! the menu layout (in cm), then streams `sample` messages whose coordinates
//! are menu-local pixels; the session answers with `event` messages. When
//! the client closes its write side the session flushes pending events and
//! closes the connection.
//!
//! ```text
//! -> {"type":"hello","technique":"crossing","px_per_cm":37.8}
//! <- {"type":"layout","kind":"circular","center":{"x":0.0,"y":0.0},...}
//! -> {"type":"sample","t":0,"x":12.5,"y":-3.0}
//! <- {"type":"event","t_ms":0.0,"event":"enter","region":{"region":"center_region"}}
//! ```

use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::engine::{fit_calibration, CalibrationPair, EngineConfig, GazeEngine, GazeEvent, GazeSample};
use crate::error::{Error, Result};
use crate::geometry::GeometryConfig;
use crate::layout::{alphabet, MenuLayout, Point, Technique};

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WirePair {
    pub target: [f64; 2],
    pub gaze: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Inbound {
    Hello {
        technique: Technique,
        #[serde(default)]
        items: Option<Vec<String>>,
        #[serde(default)]
        distance_cm: Option<f64>,
        px_per_cm: f64,
        #[serde(default)]
        dwell_ms: Option<f64>,
        #[serde(default)]
        blink_filter: Option<bool>,
    },
    Sample {
        t: f64,
        x: f64,
        y: f64,
        #[serde(default = "default_true")]
        valid: bool,
    },
    Calibrate {
        pairs: Vec<WirePair>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outbound {
    Layout(MenuLayout),
    Event(GazeEvent),
    Calibrated { correction_cm: Point },
    Error { message: String },
}

impl Outbound {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("outbound messages always serialize")
    }
}

fn error(message: impl Into<String>) -> Outbound {
    Outbound::Error { message: message.into() }
}

/// Protocol state of one connection, independent of the transport.
#[derive(Debug, Default)]
pub struct Session {
    px_per_cm: f64,
    engine: Option<GazeEngine>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Handles one inbound line. Bad input yields an `error` message and
    /// leaves the session usable.
    pub fn handle_line(&mut self, line: &str) -> Vec<Outbound> {
        let line = line.trim();
        if line.is_empty() {
            return Vec::new();
        }
        let msg: Inbound = match serde_json::from_str(line) {
            Ok(m) => m,
            Err(e) => return vec![error(format!("bad message: {e}"))],
        };
        match self.handle(msg) {
            Ok(out) => out,
            Err(e) => vec![error(e.to_string())],
        }
    }

    pub fn handle(&mut self, msg: Inbound) -> Result<Vec<Outbound>> {
        match msg {
            Inbound::Hello { technique, items, distance_cm, px_per_cm, dwell_ms, blink_filter } => {
                if !(px_per_cm.is_finite() && px_per_cm > 0.0) {
                    return Err(Error::Protocol(format!("px_per_cm must be > 0, got {px_per_cm}")));
                }
                let mut geometry = GeometryConfig::default();
                if let Some(d) = distance_cm {
                    geometry.viewing_distance_cm = d;
                }
                let items = items.unwrap_or_else(alphabet);
                let layout = MenuLayout::build(technique, &items, &geometry)?;
                let mut config = EngineConfig::default();
                if let Some(d) = dwell_ms {
                    config.dwell_ms = d;
                }
                if let Some(f) = blink_filter {
                    config.blink_filter_enabled = f;
                }
                self.engine = Some(GazeEngine::new(Arc::new(layout.clone()), config)?);
                self.px_per_cm = px_per_cm;
                Ok(vec![Outbound::Layout(layout)])
            }
            Inbound::Sample { t, x, y, valid } => {
                let px = self.px_per_cm;
                let engine = self.engine_mut()?;
                let sample = GazeSample { t_ms: t, x_cm: x / px, y_cm: y / px, valid };
                Ok(engine.push(sample)?.into_iter().map(Outbound::Event).collect())
            }
            Inbound::Calibrate { pairs } => {
                let px = self.px_per_cm;
                let engine = self.engine_mut()?;
                let pairs: Vec<CalibrationPair> = pairs
                    .iter()
                    .map(|p| CalibrationPair {
                        target: Point::new(p.target[0] / px, p.target[1] / px),
                        gaze: Point::new(p.gaze[0] / px, p.gaze[1] / px),
                    })
                    .collect();
                let model = fit_calibration(&pairs)?;
                let correction_cm = model.correction;
                engine.set_calibration(model);
                Ok(vec![Outbound::Calibrated { correction_cm }])
            }
        }
    }

    /// Flushes samples still buffered by the blink filter.
    pub fn finish(&mut self) -> Vec<Outbound> {
        match self.engine.as_mut().map(GazeEngine::finish) {
            Some(Ok(events)) => events.into_iter().map(Outbound::Event).collect(),
            Some(Err(e)) => vec![error(e.to_string())],
            None => Vec::new(),
        }
    }

    fn engine_mut(&mut self) -> Result<&mut GazeEngine> {
        self.engine
            .as_mut()
            .ok_or_else(|| Error::Protocol("send hello before samples or calibration".into()))
    }
}

/// Drives one session over any line-oriented transport until EOF.
pub fn run_session<R: BufRead, W: Write>(mut reader: R, mut writer: W) -> std::io::Result<()> {
    let mut session = Session::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        let out = match std::str::from_utf8(&buf) {
            Ok(line) => session.handle_line(line),
            Err(_) => vec![error("message is not valid UTF-8")],
        };
        for msg in out {
            writeln!(writer, "{}", msg.to_line())?;
        }
        writer.flush()?;
    }
    for msg in session.finish() {
        writeln!(writer, "{}", msg.to_line())?;
    }
    writer.flush()
}

/// TCP front end: one thread and one independent session per connection.
pub struct Server {
    listener: TcpListener,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A) -> Result<Self> {
        Ok(Self { listener: TcpListener::bind(addr)? })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections forever.
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            thread::spawn(move || {
                if let Err(e) = handle_connection(stream) {
                    eprintln!("session ended with error: {e}");
                }
            });
        }
        Ok(())
    }
}

fn handle_connection(stream: TcpStream) -> std::io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    run_session(reader, &stream)?;
    stream.shutdown(std::net::Shutdown::Both)
}

/// Serves sessions on `127.0.0.1:port` until the process exits.
pub fn serve(port: u16) -> Result<()> {
    let server = Server::bind(("127.0.0.1", port))?;
    eprintln!("listening on {}", server.local_addr()?);
    server.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EventKind;

    fn hello(technique: &str) -> String {
        format!(r#"{{"type":"hello","technique":"{technique}","px_per_cm":10}}"#)
    }

    #[test]
    fn hello_returns_layout() {
        let mut s = Session::new();
        let out = s.handle_line(&hello("crossing"));
        match &out[..] {
            [Outbound::Layout(MenuLayout::Circular(c))] => assert_eq!(c.slices.len(), 26),
            other => panic!("unexpected {other:?}"),
        }
        let v: serde_json::Value = serde_json::from_str(&out[0].to_line()).unwrap();
        assert_eq!(v["type"], "layout");
        assert_eq!(v["kind"], "circular");
    }

    #[test]
    fn garbage_keeps_session_alive() {
        let mut s = Session::new();
        s.handle_line(&hello("dwell"));
        for bad in ["not json", r#"{"type":"dance"}"#, r#"{"type":"sample","t":"x"}"#] {
            let out = s.handle_line(bad);
            assert!(matches!(&out[..], [Outbound::Error { .. }]), "{bad}");
        }
        let out = s.handle_line(r#"{"type":"sample","t":0,"x":0,"y":0}"#);
        assert!(out.iter().any(|m| matches!(m, Outbound::Event(e) if e.kind == EventKind::CenterReached)));
    }

    #[test]
    fn samples_before_hello_are_rejected() {
        let mut s = Session::new();
        let out = s.handle_line(r#"{"type":"sample","t":0,"x":0,"y":0}"#);
        assert!(matches!(&out[..], [Outbound::Error { .. }]));
    }

    #[test]
    fn stale_sample_reports_error() {
        let mut s = Session::new();
        s.handle_line(&hello("dwell"));
        s.handle_line(r#"{"type":"sample","t":10,"x":0,"y":0}"#);
        let out = s.handle_line(r#"{"type":"sample","t":10,"x":0,"y":0}"#);
        assert!(matches!(&out[..], [Outbound::Error { .. }]));
    }

    #[test]
    fn calibration_converts_pixels() {
        let mut s = Session::new();
        s.handle_line(&hello("dwell"));
        let pairs: Vec<String> = (0..5)
            .map(|i| format!(r#"{{"target":[{i},0],"gaze":[{},0]}}"#, i + 10))
            .collect();
        let out = s.handle_line(&format!(r#"{{"type":"calibrate","pairs":[{}]}}"#, pairs.join(",")));
        assert_eq!(out, vec![Outbound::Calibrated { correction_cm: Point::new(-1.0, 0.0) }]);
        let out = s.handle_line(r#"{"type":"calibrate","pairs":[]}"#);
        assert!(matches!(&out[..], [Outbound::Error { .. }]));
    }

    #[test]
    fn run_session_over_buffers() {
        let mut input = format!("{}\n", hello("crossing")).into_bytes();
        input.extend_from_slice(b"\xff\n{\"type\":\"sample\",\"t\":0,\"x\":0,\"y\":0}\n");
        let mut out = Vec::new();
        run_session(input.as_slice(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with(r#"{"type":"layout""#));
        assert!(lines[1].contains("not valid UTF-8"));
        assert!(lines[2].contains("\"event\":\"enter\""));
    }
}
