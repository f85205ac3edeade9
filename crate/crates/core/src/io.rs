//! File formats: sample CSV, trial-record CSV, summary CSV and the JSON-lines
//! event log. All text is UTF-8 with LF line endings.

use std::io::{BufRead, Write};

use crate::engine::{GazeEvent, GazeSample};
use crate::error::{domain, Error, Result};
use crate::experiment::{SummaryStats, TrialRecord};
use crate::layout::Technique;
use crate::service::Outbound;

pub const SAMPLE_HEADER: &str = "t_ms,x_cm,y_cm,valid";
pub const TRIAL_HEADER: &str =
    "user,technique,block,trial,prescription,shown_ms,activated,activated_ms,activation_time_ms,return_time_ms,error,warmup";
pub const STATS_HEADER: &str = "kind,user,technique,block,metric,n,mean_ms,median_ms,iqr_ms,value";

fn csv_err(line: usize, message: impl Into<String>) -> Error {
    Error::Csv { line, message: message.into() }
}

fn check_field(name: &str, v: &str) -> Result<()> {
    if v.contains([',', '\n', '\r', '"']) {
        return Err(domain(format!("{name} {v:?} cannot be written to CSV")));
    }
    Ok(())
}

/// Numbers use the shortest representation that parses back to the same
/// `f64`, so a written stream replays bit-for-bit.
pub fn write_samples<W: Write>(mut w: W, samples: &[GazeSample]) -> Result<()> {
    writeln!(w, "{SAMPLE_HEADER}")?;
    for s in samples {
        writeln!(w, "{},{},{},{}", s.t_ms, s.x_cm, s.y_cm, u8::from(s.valid))?;
    }
    Ok(())
}

pub fn read_samples<R: BufRead>(r: R) -> Result<Vec<GazeSample>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if n == 1 {
            if line != SAMPLE_HEADER {
                return Err(csv_err(n, format!("expected header {SAMPLE_HEADER:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(csv_err(n, format!("expected 4 fields, found {}", f.len())));
        }
        let num = |s: &str, name: &str| s.parse::<f64>().map_err(|_| csv_err(n, format!("bad {name} {s:?}")));
        let valid = match f[3] {
            "1" => true,
            "0" => false,
            other => return Err(csv_err(n, format!("bad valid flag {other:?}"))),
        };
        out.push(GazeSample { t_ms: num(f[0], "t_ms")?, x_cm: num(f[1], "x_cm")?, y_cm: num(f[2], "y_cm")?, valid });
    }
    Ok(out)
}

fn ms(v: f64) -> String {
    format!("{}", v.max(0.0).round() as u64)
}

fn opt_ms(v: Option<f64>) -> String {
    v.map(ms).unwrap_or_default()
}

pub fn write_trials<W: Write>(mut w: W, records: &[TrialRecord]) -> Result<()> {
    writeln!(w, "{TRIAL_HEADER}")?;
    for r in records {
        check_field("user", &r.user)?;
        check_field("prescription", &r.prescription)?;
        if let Some(a) = &r.activated {
            check_field("label", a)?;
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.user,
            r.technique,
            r.block,
            r.trial,
            r.prescription,
            ms(r.shown_ms),
            r.activated.as_deref().unwrap_or(""),
            opt_ms(r.activated_ms),
            opt_ms(r.activation_time_ms),
            opt_ms(r.return_time_ms),
            u8::from(r.error),
            u8::from(r.warmup),
        )?;
    }
    Ok(())
}

/// Parses a trial CSV. Errors name the 1-based line.
pub fn read_trials<R: BufRead>(r: R) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if n == 1 {
            if line != TRIAL_HEADER {
                return Err(csv_err(n, "expected trial header"));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(csv_err(n, format!("expected 12 fields, found {}", f.len())));
        }
        let int = |s: &str, name: &str| s.parse::<u64>().map_err(|_| csv_err(n, format!("bad {name} {s:?}")));
        let opt = |s: &str, name: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                int(s, name).map(|v| Some(v as f64))
            }
        };
        let flag = |s: &str, name: &str| match s {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(csv_err(n, format!("bad {name} flag {other:?}"))),
        };
        let technique: Technique = f[1].parse().map_err(|_| csv_err(n, format!("bad technique {:?}", f[1])))?;
        out.push(TrialRecord {
            user: f[0].to_string(),
            technique,
            block: u32::try_from(int(f[2], "block")?).map_err(|_| csv_err(n, "block out of range"))?,
            trial: int(f[3], "trial")? as usize,
            prescription: f[4].to_string(),
            shown_ms: int(f[5], "shown_ms")? as f64,
            activated: (!f[6].is_empty()).then(|| f[6].to_string()),
            activated_ms: opt(f[7], "activated_ms")?,
            activation_time_ms: opt(f[8], "activation_time_ms")?,
            return_time_ms: opt(f[9], "return_time_ms")?,
            error: flag(f[10], "error")?,
            warmup: flag(f[11], "warmup")?,
        });
    }
    Ok(out)
}

pub fn write_stats<W: Write>(mut w: W, stats: &SummaryStats) -> Result<()> {
    writeln!(w, "{STATS_HEADER}")?;
    for g in &stats.groups {
        let block = g.block.map(|b| b.to_string()).unwrap_or_default();
        let metrics = [("activation_time", Some(g.activation)), ("return_time", g.return_time)];
        for (metric, m) in metrics {
            let Some(m) = m else { continue };
            writeln!(
                w,
                "group,{},{},{},{},{},{:.2},{:.2},{:.2},",
                g.user, g.technique, block, metric, m.n, m.mean_ms, m.median_ms, m.iqr_ms
            )?;
        }
    }
    for l in &stats.learning_rates {
        writeln!(
            w,
            "learning_rate,{},{},{}-{},activation_time,,,,,{:.2}",
            l.user, l.technique, l.from_block, l.to_block, l.rate_pct
        )?;
    }
    for r in &stats.ratios {
        writeln!(w, "ratio,{},crossing/dwell,,activation_time,,,,,{:.2}", r.user, r.crossing_over_dwell)?;
    }
    Ok(())
}

/// One event as it appears in the event log and on the session wire.
pub fn event_line(event: &GazeEvent) -> Result<String> {
    Ok(serde_json::to_string(&Outbound::Event(event.clone()))?)
}

pub fn write_event_log<W: Write>(mut w: W, events: &[GazeEvent]) -> Result<()> {
    for e in events {
        writeln!(w, "{}", event_line(e)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EventKind;
    use crate::experiment::{summarize, Grouping};

    fn record(block: u32, act: Option<f64>) -> TrialRecord {
        TrialRecord {
            user: "p1".into(),
            technique: Technique::Crossing,
            block,
            trial: 4,
            prescription: "Q".into(),
            shown_ms: 1234.4,
            activated: act.map(|_| "Q".into()),
            activated_ms: act.map(|a| a + 1234.4),
            activation_time_ms: act,
            return_time_ms: None,
            error: act.is_none(),
            warmup: false,
        }
    }

    #[test]
    fn trial_csv_layout() {
        let mut buf = Vec::new();
        write_trials(&mut buf, &[record(1, Some(800.6)), record(2, None)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], TRIAL_HEADER);
        assert_eq!(lines[1], "p1,crossing,1,4,Q,1234,Q,2035,801,,0,0");
        assert_eq!(lines[2], "p1,crossing,2,4,Q,1234,,,,,1,0");
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn trial_csv_errors_name_lines() {
        let text = format!("{TRIAL_HEADER}\np1,crossing,1,4,Q,1234,Q,2035,801,,0,0\np1,pointing,1,4,Q,1,,,,,1,0\n");
        let err = read_trials(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
        let err = read_trials("nope\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 1, .. }));
        let err = read_trials(format!("{TRIAL_HEADER}\na,b\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 2, .. }));
        assert!(read_trials("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn commas_in_fields_are_rejected() {
        let mut r = record(1, Some(10.0));
        r.user = "a,b".into();
        assert!(write_trials(Vec::new(), &[r]).is_err());
    }

    #[test]
    fn samples_roundtrip_exactly() {
        let s = vec![
            GazeSample { t_ms: 1000.0 / 90.0, x_cm: 0.1 + 0.2, y_cm: -5.373_000_000_1, valid: true },
            GazeSample { t_ms: 200.0 / 9.0, x_cm: 1e-17, y_cm: 3.0, valid: false },
        ];
        let mut buf = Vec::new();
        write_samples(&mut buf, &s).unwrap();
        assert_eq!(read_samples(buf.as_slice()).unwrap(), s);
        assert!(matches!(
            read_samples(format!("{SAMPLE_HEADER}\n1,2,3,yes\n").as_bytes()),
            Err(Error::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn stats_csv_layout() {
        let mut recs: Vec<TrialRecord> = (0..3).map(|_| record(1, Some(2000.0))).collect();
        recs.extend((0..3).map(|_| record(2, Some(1600.0))));
        let stats = summarize(&recs, Grouping::PerBlock);
        let mut buf = Vec::new();
        write_stats(&mut buf, &stats).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(STATS_HEADER));
        assert!(text.contains("group,p1,crossing,1,activation_time,3,2000.00,2000.00,0.00,\n"));
        assert!(text.contains("learning_rate,p1,crossing,1-2,activation_time,,,,,20.00\n"));
    }

    #[test]
    fn event_line_shape() {
        let e = GazeEvent { t_ms: 5.0, kind: EventKind::CenterReached };
        assert_eq!(event_line(&e).unwrap(), r#"{"type":"event","t_ms":5.0,"event":"center_reached"}"#);
    }
}
