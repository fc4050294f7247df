use std::io::{Read, Write};

use serde::Deserialize;

use super::{AliasRules, EventLog, InteractionEvent, RecordError, SourceKind};
use crate::error::{Error, Result};

const EVENT_HEADER: [&str; 4] = ["actor", "object", "timestamp", "weight"];

#[derive(Deserialize)]
struct RawEvent {
    actor: String,
    object: String,
    timestamp: i64,
    weight: f64,
}

fn line_of(pos: Option<&csv::Position>) -> usize {
    pos.map_or(0, |p| p.line() as usize)
}

/// Reads an event CSV with header `actor,object,timestamp,weight`. Bad rows
/// are collected as record errors; a wrong header fails the whole read.
pub fn read_event_csv<R: Read>(input: R, kind: SourceKind) -> Result<EventLog> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.is_empty() {
        return Ok(EventLog::new(kind, Vec::new()));
    }
    if header.iter().collect::<Vec<_>>() != EVENT_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", EVENT_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut log = EventLog::new(kind, Vec::new());
    for rec in rdr.records() {
        let row = rec.and_then(|rec| {
            let line = line_of(rec.position());
            rec.deserialize::<RawEvent>(Some(&header)).map(|r| (line, r))
        });
        match row {
            Ok((line, r)) => {
                if r.actor.is_empty() {
                    log.errors.push(RecordError { line, message: "empty actor".into() });
                } else if !(r.weight >= 0.0 && r.weight.is_finite()) {
                    log.errors.push(RecordError {
                        line,
                        message: format!("weight {} must be finite and non-negative", r.weight),
                    });
                } else {
                    log.events.push(InteractionEvent {
                        actor: r.actor,
                        object: r.object,
                        timestamp: r.timestamp,
                        weight: r.weight,
                    });
                }
            }
            Err(e) => log.errors.push(RecordError {
                line: line_of(e.position()),
                message: e.to_string(),
            }),
        }
    }
    Ok(log)
}

pub fn write_event_csv<W: Write>(log: &EventLog, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(EVENT_HEADER)?;
    for e in &log.events {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads alias rules from a two-column CSV with header `raw,canonical`.
pub fn read_alias_csv<R: Read>(input: R) -> Result<AliasRules> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["raw", "canonical"] {
        return Err(Error::Parse {
            line: 1,
            message: "alias file must have header raw,canonical".into(),
        });
    }
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                line: line_of(rec.position()),
                message: "alias rows need exactly two fields".into(),
            });
        }
        pairs.push((rec[0].to_string(), rec[1].to_string()));
    }
    AliasRules::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let log = EventLog::new(
            SourceKind::Artifact,
            vec![
                InteractionEvent { actor: "a, b".into(), object: "f\"1".into(), timestamp: 3, weight: 1.5 },
                InteractionEvent { actor: "c".into(), object: "g".into(), timestamp: -4, weight: 0.0 },
            ],
        );
        let mut buf = Vec::new();
        write_event_csv(&log, &mut buf).unwrap();
        let back = read_event_csv(buf.as_slice(), SourceKind::Artifact).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn bad_rows_are_reported_with_lines() {
        let text = "actor,object,timestamp,weight\na,f,1,2\nb,f,notatime,1\nc,f,3,-1\n";
        let log = read_event_csv(text.as_bytes(), SourceKind::Artifact).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log.errors.len(), 2);
        assert_eq!(log.errors[0].line, 3);
    }

    #[test]
    fn wrong_header_fails() {
        assert!(read_event_csv("who,what\n".as_bytes(), SourceKind::Artifact).is_err());
        assert!(read_event_csv("".as_bytes(), SourceKind::Artifact).unwrap().is_empty());
    }

    #[test]
    fn alias_file() {
        let rules = read_alias_csv("raw,canonical\n\"A <a@x>\",A\n".as_bytes()).unwrap();
        assert_eq!(rules.resolve("A <a@x>"), "a");
    }
}
