use serde::{Deserialize, Serialize};

use super::{EventLog, InteractionEvent};
use crate::error::{Error, Result};

/// Sliding window parameters, all in seconds. `delta_t` of `None` pairs
/// every co-editor of an artifact regardless of time distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub width: u64,
    pub step: u64,
    pub delta_t: Option<u64>,
}

impl WindowSpec {
    pub fn new(width: u64, step: u64, delta_t: Option<u64>) -> Result<Self> {
        let spec = Self { width, step, delta_t };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::Config("window width must be positive".into()));
        }
        if self.step == 0 || self.step > self.width {
            return Err(Error::Config(format!(
                "window step must satisfy 0 < step <= width, got step {} width {}",
                self.step, self.width
            )));
        }
        Ok(())
    }
}

/// Half-open interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInterval {
    pub start: i64,
    pub end: i64,
    /// The window reaches past the last observed timestamp.
    pub partial: bool,
}

impl WindowInterval {
    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub interval: WindowInterval,
    pub events: Vec<InteractionEvent>,
}

/// Cuts the log into windows `[min + k·step, min + k·step + width)` for
/// every start up to the last timestamp. Events land in every window that
/// contains them, in their original order.
pub fn window_events(log: &EventLog, spec: &WindowSpec) -> Result<Vec<Window>> {
    spec.validate()?;
    if log.is_empty() {
        return Err(Error::InvalidInput("no events".into()));
    }
    let min = log.events.iter().map(|e| e.timestamp).min().unwrap_or(0);
    let max = log.events.iter().map(|e| e.timestamp).max().unwrap_or(0);
    let (width, step) = (spec.width as i64, spec.step as i64);
    let mut order: Vec<usize> = (0..log.len()).collect();
    order.sort_by_key(|&k| (log.events[k].timestamp, k));
    let times: Vec<i64> = order.iter().map(|&k| log.events[k].timestamp).collect();

    let mut out = Vec::new();
    let mut start = min;
    while start <= max {
        let end = start.saturating_add(width);
        let lo = times.partition_point(|&t| t < start);
        let hi = times.partition_point(|&t| t < end);
        let mut idx: Vec<usize> = order[lo..hi].to_vec();
        idx.sort_unstable();
        out.push(Window {
            interval: WindowInterval {
                start,
                end,
                partial: end > max.saturating_add(1),
            },
            events: idx.into_iter().map(|k| log.events[k].clone()).collect(),
        });
        start = start.saturating_add(step);
    }
    Ok(out)
}
