//! Event logs from version-control history or generic CSV, name
//! normalisation, sliding windows, and projection to multi-edge networks.

mod csv_io;
mod normalize;
mod numstat;
mod project;
mod window;

pub use csv_io::{read_alias_csv, read_event_csv, write_event_csv};
pub use normalize::{normalize_ids, AliasRules};
pub use numstat::parse_numstat_log;
pub use project::{direct_network, network_from_events, project_to_multiedge, BipartiteEdge, BipartiteGraph};
pub use window::{window_events, Window, WindowInterval, WindowSpec};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub actor: String,
    /// Co-edited artifact, or the counterparty for [`SourceKind::Actor`] logs.
    pub object: String,
    /// Seconds since the epoch.
    pub timestamp: i64,
    pub weight: f64,
}

/// What the `object` of an event refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    #[default]
    Artifact,
    Actor,
}

impl std::str::FromStr for SourceKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "artifact" => Ok(Self::Artifact),
            "actor" => Ok(Self::Actor),
            other => Err(crate::Error::Config(format!(
                "unknown source kind {other:?} (expected artifact or actor)"
            ))),
        }
    }
}

/// A record that could not be parsed; the remaining input is still read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EventLog {
    pub kind: SourceKind,
    pub events: Vec<InteractionEvent>,
    pub errors: Vec<RecordError>,
}

impl EventLog {
    pub fn new(kind: SourceKind, events: Vec<InteractionEvent>) -> Self {
        Self {
            kind,
            events,
            errors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Distinct actor ids in sorted order.
    pub fn actors(&self) -> Vec<String> {
        let mut a: Vec<String> = self.events.iter().map(|e| e.actor.clone()).collect();
        a.sort();
        a.dedup();
        a
    }
}
