use super::{EventLog, InteractionEvent, RecordError, SourceKind};

#[derive(Default)]
struct Header {
    line: usize,
    author: Option<String>,
    timestamp: Option<i64>,
    problem: Option<RecordError>,
}

impl Header {
    fn resolve(&mut self) -> Result<(String, i64), RecordError> {
        if let Some(p) = &self.problem {
            return Err(p.clone());
        }
        match (&self.author, self.timestamp) {
            (Some(a), Some(t)) => Ok((a.clone(), t)),
            (None, _) => Err(RecordError {
                line: self.line,
                message: "commit header has no Author line".into(),
            }),
            (_, None) => Err(RecordError {
                line: self.line,
                message: "commit header has no Date line".into(),
            }),
        }
    }
}

fn parse_count(field: &str) -> Option<u64> {
    if field == "-" {
        Some(0)
    } else {
        field.parse().ok()
    }
}

/// Parses `git log --numstat --date=unix` output. Each `added<TAB>deleted<TAB>path`
/// line becomes one event for the commit author with weight `added + deleted`;
/// binary files (`-`) weigh 0. Commits with a malformed header are skipped and
/// reported in [`EventLog::errors`].
pub fn parse_numstat_log(text: &str) -> EventLog {
    let mut log = EventLog::new(SourceKind::Artifact, Vec::new());
    let mut header: Option<Header> = None;
    // a bad header is reported once, not once per file line
    let mut reported = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix("commit ") {
            if rest.trim().is_empty() {
                log.errors.push(RecordError {
                    line: line_no,
                    message: "commit line without hash".into(),
                });
            }
            header = Some(Header {
                line: line_no,
                ..Header::default()
            });
            reported = false;
            continue;
        }
        if line.trim().is_empty() || line.starts_with("    ") {
            continue;
        }
        let Some(h) = header.as_mut() else {
            log.errors.push(RecordError {
                line: line_no,
                message: "content before the first commit line".into(),
            });
            continue;
        };
        if let Some(author) = line.strip_prefix("Author:") {
            let author = author.trim();
            if author.is_empty() {
                h.problem.get_or_insert(RecordError {
                    line: line_no,
                    message: "empty author".into(),
                });
            } else {
                h.author = Some(author.to_string());
            }
            continue;
        }
        if let Some(date) = line.strip_prefix("Date:") {
            match date.split_whitespace().next().map(str::parse::<i64>) {
                Some(Ok(t)) => h.timestamp = Some(t),
                _ => {
                    h.problem.get_or_insert(RecordError {
                        line: line_no,
                        message: format!("date {:?} is not a unix timestamp", date.trim()),
                    });
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        if fields.len() != 3 {
            if line.contains(": ") && !line.contains('\t') {
                // other header fields such as Merge:
                continue;
            }
            log.errors.push(RecordError {
                line: line_no,
                message: format!("unrecognised line {line:?}"),
            });
            continue;
        }
        let (added, deleted) = match (parse_count(fields[0]), parse_count(fields[1])) {
            (Some(a), Some(d)) => (a, d),
            _ => {
                log.errors.push(RecordError {
                    line: line_no,
                    message: format!("bad line counts {:?} {:?}", fields[0], fields[1]),
                });
                continue;
            }
        };
        match h.resolve() {
            Ok((actor, timestamp)) => log.events.push(InteractionEvent {
                actor,
                object: fields[2].to_string(),
                timestamp,
                weight: (added + deleted) as f64,
            }),
            Err(e) => {
                if !reported {
                    log.errors.push(e);
                    reported = true;
                }
            }
        }
    }
    log
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_COMMITS: &str = "\
commit 1111111111111111111111111111111111111111
Author: Alice <alice@example.org>
Date:   1700000000

    first change

3\t2\tsrc/f1.rs
-\t-\tassets/logo.png

commit 2222222222222222222222222222222222222222
Merge: aaaa bbbb
Author: Bob <bob@example.org>
Date:   1700000600

    second change

1\t0\tsrc/f1.rs
";

    #[test]
    fn one_event_per_file_line() {
        let log = parse_numstat_log(TWO_COMMITS);
        assert!(log.errors.is_empty(), "{:?}", log.errors);
        assert_eq!(log.len(), 3);
        assert_eq!(log.events[0].weight, 5.0);
        assert_eq!(log.events[0].actor, "Alice <alice@example.org>");
        assert_eq!(log.events[1].weight, 0.0);
        assert_eq!(log.events[2].object, "src/f1.rs");
        assert_eq!(log.events[2].timestamp, 1_700_000_600);
        assert_ne!(log.events[0].timestamp, log.events[2].timestamp);
    }

    #[test]
    fn empty_input() {
        let log = parse_numstat_log("");
        assert!(log.is_empty() && log.errors.is_empty());
    }

    #[test]
    fn bad_header_skips_commit_and_continues() {
        let text = "\
commit 1
Author: Alice <a@x>
Date:   yesterday

1\t1\ta
2\t2\tb
commit 2
Author: Bob <b@x>
Date: 5

4\t0\tc
";
        let log = parse_numstat_log(text);
        assert_eq!(log.len(), 1);
        assert_eq!(log.events[0].object, "c");
        assert_eq!(log.errors.len(), 1);
        assert_eq!(log.errors[0].line, 3);
    }

    #[test]
    fn missing_author_is_reported_at_commit_line() {
        let log = parse_numstat_log("commit 9\nDate: 10\n\n1\t1\tx\n");
        assert!(log.is_empty());
        assert_eq!(log.errors[0].line, 1);
    }

    #[test]
    fn bad_counts_are_record_errors() {
        let log = parse_numstat_log("commit 9\nAuthor: A\nDate: 10\n\nx\t1\tf\n2\t1\tg\n");
        assert_eq!(log.len(), 1);
        assert_eq!(log.errors[0].line, 5);
    }
}
