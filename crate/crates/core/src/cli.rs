//! Command-line front end. The `gazepie` binary is a thin wrapper over
//! [`run`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::experiment::{
    default_pairs, make_search_select_script, make_selection_script, summarize, Grouping, TaskScript,
    TrialRecord, DEFAULT_BLOCKS,
};
use crate::geometry::GeometryConfig;
use crate::io;
use crate::layout::{alphabet, MenuLayout, Technique};
use crate::service;
use crate::simulator::{run_agent, AgentProfile};

#[derive(Debug, Parser)]
#[command(name = "gazepie", version, about = "Crossing pie menus versus dwell grids for gaze input")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the capacity table for a viewing configuration.
    Geometry(GeometryArgs),
    /// Run simulated task sessions and write samples, events, trials and stats.
    Simulate(SimulateArgs),
    /// Summarise trial CSV files.
    Stats(StatsArgs),
    /// Serve live sessions over line-delimited JSON on localhost.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 26)]
    pub items: usize,
    /// Viewing distance in cm.
    #[arg(long, default_value_t = 55.0)]
    pub distance: f64,
    /// Glyph height in cm.
    #[arg(long = "char-size", default_value_t = 0.45)]
    pub char_size: f64,
    /// Tracker uncertainty in degrees.
    #[arg(long, default_value_t = 1.3)]
    pub uncertainty: f64,
}

impl GeometryArgs {
    pub fn config(&self) -> GeometryConfig {
        GeometryConfig {
            char_size_cm: self.char_size,
            viewing_distance_cm: self.distance,
            tracker_uncertainty_deg: self.uncertainty,
            ..GeometryConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MenuChoice {
    Dwell,
    Crossing,
    Both,
}

impl MenuChoice {
    fn techniques(self) -> Vec<Technique> {
        match self {
            MenuChoice::Dwell => vec![Technique::Dwell],
            MenuChoice::Crossing => vec![Technique::Crossing],
            MenuChoice::Both => vec![Technique::Dwell, Technique::Crossing],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskChoice {
    SearchSelect,
    Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileChoice {
    /// Jittered fixations and lognormal search times.
    Default,
    /// No jitter, no blinks, fixed search time.
    Perfect,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = MenuChoice::Both)]
    pub menu: MenuChoice,
    #[arg(long, value_enum, default_value_t = TaskChoice::SearchSelect)]
    pub task: TaskChoice,
    #[arg(long, default_value_t = DEFAULT_BLOCKS)]
    pub blocks: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub blinks: Switch,
    /// Blink rate used when blinks are on.
    #[arg(long = "blink-rate", default_value_t = 0.2)]
    pub blink_rate: f64,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub filter: Switch,
    #[arg(long, value_enum, default_value_t = ProfileChoice::Default)]
    pub profile: ProfileChoice,
    #[arg(long, default_value_t = 500.0)]
    pub dwell: f64,
    #[arg(long, default_value = "sim-out")]
    pub out: PathBuf,
}

impl Default for SimulateArgs {
    fn default() -> Self {
        Self {
            menu: MenuChoice::Both,
            task: TaskChoice::SearchSelect,
            blocks: DEFAULT_BLOCKS,
            seed: 42,
            blinks: Switch::Off,
            blink_rate: 0.2,
            filter: Switch::On,
            profile: ProfileChoice::Default,
            dwell: 500.0,
            out: PathBuf::from("sim-out"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    pub port: u16,
}

/// Parses nothing; dispatches an already parsed command. Returns the process
/// exit code.
pub fn run(cli: Cli) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = match cli.command {
        Command::Geometry(a) => cmd_geometry(&a, &mut stdout.lock()).map(|ok| if ok { 0 } else { 2 }),
        Command::Simulate(a) => cmd_simulate(&a, &mut stdout.lock()).map(|_| 0),
        Command::Stats(a) => cmd_stats(&a.files, &mut stdout.lock(), &mut stderr.lock()).map(|_| 0),
        Command::Serve(a) => service::serve(a.port).map(|_| 0),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        1
    })
}

pub const GEOMETRY_CSV_HEADER: &str =
    "items,vision_angle_deg,obj_size_cm,crossing_radius_cm,max_slices,grid_width_cm,grid_height_cm,grid_capacity,usable";

/// Prints the capacity table. Returns `false` when the configuration is
/// unusable: the comfortable angle is below the tracker's uncertainty or
/// the items do not fit.
pub fn cmd_geometry<W: Write>(args: &GeometryArgs, out: &mut W) -> Result<bool> {
    let cfg = args.config();
    let cap = cfg.capacity(args.items)?;
    let fits = args.items <= cap.max_slices + 1 && args.items < cap.grid_capacity;
    writeln!(out, "items                 {}", cap.n_items)?;
    writeln!(out, "vision angle          {:.2} deg (tracker {:.2} deg)", cap.vision_angle_deg, cfg.tracker_uncertainty_deg)?;
    writeln!(out, "object size           {:.2} cm", cap.obj_size_cm)?;
    writeln!(out, "crossing menu radius  {:.2} cm", cap.crossing_radius_cm)?;
    writeln!(out, "max slices            {}", cap.max_slices)?;
    writeln!(out, "dwell grid            {:.1} x {:.1} cm ({} cells)", cap.grid_width_cm, cap.grid_height_cm, cap.grid_capacity)?;
    if !cap.usable {
        writeln!(out, "UNUSABLE: comfortable vision angle is below the tracker uncertainty")?;
    }
    if !fits {
        writeln!(out, "UNUSABLE: {} items exceed the menu capacity", cap.n_items)?;
    }
    writeln!(out)?;
    writeln!(out, "{GEOMETRY_CSV_HEADER}")?;
    writeln!(
        out,
        "{},{:.2},{:.2},{:.2},{},{:.2},{:.2},{},{}",
        cap.n_items,
        cap.vision_angle_deg,
        cap.obj_size_cm,
        cap.crossing_radius_cm,
        cap.max_slices,
        cap.grid_width_cm,
        cap.grid_height_cm,
        cap.grid_capacity,
        u8::from(cap.usable && fits)
    )?;
    Ok(cap.usable && fits)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Per-run seed so blocks and techniques draw independent streams.
fn session_seed(seed: u64, technique: Technique, block: u32) -> u64 {
    let t = match technique {
        Technique::Dwell => 0,
        Technique::Crossing => 1,
    };
    seed.wrapping_mul(1_000_003) ^ (u64::from(block) << 8) ^ t
}

pub fn build_script(task: TaskChoice, seed: u64, technique: Technique, block: u32) -> Result<TaskScript> {
    Ok(match task {
        TaskChoice::SearchSelect => make_search_select_script(seed, technique, block),
        TaskChoice::Selection => make_selection_script(&default_pairs(), technique)?.with_block(block),
    })
}

/// Summary of one simulate run, also printed to `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub records: Vec<TrialRecord>,
    pub files: Vec<PathBuf>,
}

impl SimulateReport {
    pub fn errors(&self) -> usize {
        self.records.iter().filter(|r| r.error).count()
    }
}

pub fn cmd_simulate<W: Write>(args: &SimulateArgs, out: &mut W) -> Result<SimulateReport> {
    std::fs::create_dir_all(&args.out)?;
    let mut profile = match args.profile {
        ProfileChoice::Default => AgentProfile::default(),
        ProfileChoice::Perfect => AgentProfile::perfect(),
    };
    profile.blink_rate_hz = match args.blinks {
        Switch::On => args.blink_rate,
        Switch::Off => 0.0,
    };
    let engine = EngineConfig {
        dwell_ms: args.dwell,
        blink_filter_enabled: args.filter == Switch::On,
        ..EngineConfig::default()
    };
    let geometry = GeometryConfig::default();

    let mut records = Vec::new();
    let mut files = Vec::new();
    for technique in args.menu.techniques() {
        let layout = Arc::new(MenuLayout::build(technique, &alphabet(), &geometry)?);
        for block in 1..=args.blocks {
            let script = build_script(args.task, args.seed, technique, block)?;
            let profile = AgentProfile { rng_seed: session_seed(args.seed, technique, block), ..profile.clone() };
            let run = run_agent(&script, layout.clone(), &profile, &engine, "sim")?;

            let stem = format!("{technique}_block{block}");
            let samples_path = args.out.join(format!("{stem}_samples.csv"));
            let events_path = args.out.join(format!("{stem}_events.jsonl"));
            let mut w = create(&samples_path)?;
            io::write_samples(&mut w, &run.stream.samples)?;
            w.flush()?;
            let mut w = create(&events_path)?;
            io::write_event_log(&mut w, &run.events)?;
            w.flush()?;

            let errors = run.records.iter().filter(|r| r.error).count();
            writeln!(
                out,
                "{technique} block {block}: {} trials, {errors} errors, {} samples",
                run.records.len(),
                run.stream.samples.len()
            )?;
            files.extend([samples_path, events_path]);
            records.extend(run.records);
        }
    }

    let trials_path = args.out.join("trials.csv");
    let mut trials_csv = Vec::new();
    io::write_trials(&mut trials_csv, &records)?;
    std::fs::write(&trials_path, &trials_csv)?;
    // statistics from the records as stored, so `stats trials.csv` agrees
    let stored = io::read_trials(trials_csv.as_slice())?;
    let stats_path = args.out.join("stats.csv");
    let mut w = create(&stats_path)?;
    io::write_stats(&mut w, &summarize(&stored, Grouping::PerBlock))?;
    w.flush()?;
    files.extend([trials_path, stats_path]);
    writeln!(out, "wrote {} files to {}", files.len(), args.out.display())?;
    Ok(SimulateReport { records, files })
}

/// Reads trial CSVs and prints grouped statistics. Returns the warnings that
/// were written to `err`.
pub fn cmd_stats<W: Write, E: Write>(paths: &[PathBuf], out: &mut W, err: &mut E) -> Result<Vec<String>> {
    let mut records = Vec::new();
    for path in paths {
        let file = File::open(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let parsed = io::read_trials(BufReader::new(file)).map_err(|e| match e {
            Error::Csv { line, message } => Error::Csv { line, message: format!("{}: {message}", path.display()) },
            other => other,
        })?;
        records.extend(parsed);
    }
    let mut warnings = Vec::new();
    if records.is_empty() {
        warnings.push("no trial records found".to_string());
    } else {
        let stats = summarize(&records, Grouping::PerBlock);
        io::write_stats(&mut *out, &stats)?;
        warnings.extend(stats.warnings);
    }
    for w in &warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(warnings)
}
