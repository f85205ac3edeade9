//! Gaze-operated menus: crossing pie menus versus dwell-time grids.
//!
//! The crate sizes both menu kinds from physical viewing parameters
//! ([`geometry`]), lays them out and hit-tests them ([`layout`]), turns
//! timestamped gaze samples into selection events ([`engine`]), generates
//! synthetic gaze for scripted tasks ([`simulator`]), reduces sessions to
//! per-trial metrics ([`experiment`]) and exposes everything through a
//! line-delimited JSON session service and a small CLI ([`service`], [`cli`]).

pub mod cli;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod layout;
pub mod service;
pub mod simulator;

pub use engine::{EngineConfig, EventKind, GazeEngine, GazeEvent, GazeSample};
pub use error::{Error, Result};
pub use geometry::GeometryConfig;
pub use layout::{MenuLayout, Point, Region, Technique};
