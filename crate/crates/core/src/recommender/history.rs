//! Accept/reject history and its append-only event log.
//!
//! The log is JSON Lines, one [`FeedbackEvent`] per line:
//!
//! ```text
//! {"timestamp":"2020-01-15T10:02:11Z","participant":"P1","requirement_id":"R3","stem":"bro","object_code":"A10","action":"accept"}
//! ```
//!
//! Replaying a log reproduces the store exactly, since the store only holds
//! per-pair counters.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scoring::AssocBounds;

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("persisting feedback event: {0}")]
    Persistence(#[source] io::Error),
    #[error("event log line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("event timestamp {got} is earlier than the previous event ({previous})")]
    NonMonotonic { previous: DateTime<Utc>, got: DateTime<Utc> },
    #[error("event has an empty {0}")]
    EmptyField(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackAction {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub timestamp: DateTime<Utc>,
    pub participant: String,
    pub requirement_id: String,
    pub stem: String,
    pub object_code: String,
    pub action: FeedbackAction,
}

impl FeedbackEvent {
    pub fn validate(&self) -> Result<(), HistoryError> {
        if self.stem.is_empty() {
            return Err(HistoryError::EmptyField("stem"));
        }
        if self.object_code.is_empty() {
            return Err(HistoryError::EmptyField("object_code"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub accepts: u64,
    pub rejects: u64,
}

/// Per (noun stem, object code) accept and reject counters.
///
/// `f_assoc` of a pair is its accept count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistoryStore {
    pairs: BTreeMap<(String, String), PairCounts>,
}

impl HistoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self, stem: &str, code: &str) -> Option<PairCounts> {
        self.pairs.get(&(stem.to_string(), code.to_string())).copied()
    }

    pub fn f_assoc(&self, stem: &str, code: &str) -> u64 {
        self.counts(stem, code).map_or(0, |c| c.accepts)
    }

    /// Min and max of `f_assoc` over every stored pair; `None` when empty.
    pub fn bounds(&self) -> Option<AssocBounds> {
        let mut it = self.pairs.values().map(|c| c.accepts);
        let first = it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(AssocBounds { min, max })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, PairCounts)> {
        self.pairs.iter().map(|((s, c), n)| (s.as_str(), c.as_str(), *n))
    }

    /// Applies `event` in memory only.
    pub fn apply(&mut self, event: &FeedbackEvent) {
        let entry = self.pairs.entry((event.stem.clone(), event.object_code.clone())).or_default();
        match event.action {
            FeedbackAction::Accept => entry.accepts += 1,
            FeedbackAction::Reject => entry.rejects += 1,
        }
    }

    /// Persists `event` to `log`, then applies it. The store is untouched
    /// when the log write fails.
    pub fn record_feedback<L: EventSink + ?Sized>(
        &mut self,
        event: &FeedbackEvent,
        log: &mut L,
    ) -> Result<(), HistoryError> {
        event.validate()?;
        log.append(event)?;
        self.apply(event);
        Ok(())
    }

    pub fn replay<'a, I: IntoIterator<Item = &'a FeedbackEvent>>(events: I) -> Self {
        let mut store = Self::new();
        for e in events {
            store.apply(e);
        }
        store
    }
}

/// Destination for feedback events.
pub trait EventSink {
    fn append(&mut self, event: &FeedbackEvent) -> Result<(), HistoryError>;
}

/// Keeps events in memory; used by tests and batch runs without a log file.
#[derive(Debug, Default, Clone)]
pub struct MemoryLog {
    pub events: Vec<FeedbackEvent>,
}

impl EventSink for MemoryLog {
    fn append(&mut self, event: &FeedbackEvent) -> Result<(), HistoryError> {
        check_monotonic(self.events.last().map(|e| e.timestamp), event.timestamp)?;
        self.events.push(event.clone());
        Ok(())
    }
}

fn check_monotonic(previous: Option<DateTime<Utc>>, got: DateTime<Utc>) -> Result<(), HistoryError> {
    match previous {
        Some(previous) if got < previous => Err(HistoryError::NonMonotonic { previous, got }),
        _ => Ok(()),
    }
}

/// Append-only JSON Lines file, flushed and synced after every event.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    last: Option<DateTime<Utc>>,
}

impl EventLog {
    /// Opens (creating if needed) the log at `path` and returns it with the
    /// events already stored there.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Vec<FeedbackEvent>), HistoryError> {
        let path = path.as_ref().to_path_buf();
        let events = if path.exists() { read_events(BufReader::new(File::open(&path)?))? } else { Vec::new() };
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        let last = events.last().map(|e| e.timestamp);
        Ok((Self { path, file, last }, events))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn last_timestamp(&self) -> Option<DateTime<Utc>> {
        self.last
    }
}

impl EventSink for EventLog {
    fn append(&mut self, event: &FeedbackEvent) -> Result<(), HistoryError> {
        check_monotonic(self.last, event.timestamp)?;
        let mut line = serde_json::to_vec(event).map_err(|e| HistoryError::Persistence(e.into()))?;
        line.push(b'\n');
        self.file.write_all(&line).and_then(|_| self.file.sync_data()).map_err(HistoryError::Persistence)?;
        self.last = Some(event.timestamp);
        Ok(())
    }
}

/// Parses a JSON Lines event log, checking timestamp order.
pub fn read_events<R: BufRead>(reader: R) -> Result<Vec<FeedbackEvent>, HistoryError> {
    let mut events: Vec<FeedbackEvent> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: FeedbackEvent =
            serde_json::from_str(&line).map_err(|e| HistoryError::Malformed { line: i + 1, message: e.to_string() })?;
        event.validate().map_err(|e| HistoryError::Malformed { line: i + 1, message: e.to_string() })?;
        check_monotonic(events.last().map(|e| e.timestamp), event.timestamp)?;
        events.push(event);
    }
    Ok(events)
}
