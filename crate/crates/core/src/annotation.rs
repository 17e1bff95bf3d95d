//! Requirements, annotation records and their persistence.
//!
//! # Requirements file
//!
//! JSON Lines, one `{"id": "...", "text": "..."}` object per line, in task
//! order.
//!
//! # Dataset export
//!
//! UTF-8 CSV with the header
//!
//! ```text
//! format_version,participant,treatment,requirement_id,duration_s,conf_correct,conf_complete,associations
//! ```
//!
//! Standard CSV quoting applies to every field. `associations` is a
//! `;`-separated list of `stem:code` or `stem@position:code` entries, where
//! `position` is the 1-based term position. Inside a stem or code the
//! characters `%`, `;`, `:` and `@` are percent-encoded (`%25`, `%3B`,
//! `%3A`, `%40`).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DATASET_FORMAT_VERSION: u32 = 1;

const DATASET_HEADER: [&str; 8] = [
    "format_version",
    "participant",
    "treatment",
    "requirement_id",
    "duration_s",
    "conf_correct",
    "conf_complete",
    "associations",
];

const ASSOC_ESCAPE: &AsciiSet = &CONTROLS.add(b'%').add(b';').add(b':').add(b'@');

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("line {line}: duplicate requirement id `{id}`")]
    DuplicateRequirement { id: String, line: usize },
    #[error("line {line}: requirement `{id}` has empty text")]
    EmptyRequirement { id: String, line: usize },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("confidence {0} is outside the scale -2..=2")]
    ConfidenceRange(i64),
    #[error("duration {0} s is negative or not finite")]
    Duration(f64),
    #[error("unknown requirement id `{0}`")]
    UnknownRequirement(String),
    #[error("participant `{participant}` already completed requirement `{requirement}`")]
    AlreadyCompleted { participant: String, requirement: String },
    #[error("participant `{participant}` is in treatment {existing}, record says {got}")]
    TreatmentMismatch { participant: String, existing: Treatment, got: Treatment },
    #[error("invalid association `{0}`")]
    Association(String),
    #[error("unsupported dataset format version {0}")]
    Version(u32),
    #[error("persisting annotation record: {0}")]
    Persistence(#[source] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub text: String,
}

impl Requirement {
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }

    /// 1-based position of the whitespace-separated term containing the
    /// byte offset, or `None` when the offset is not inside a term.
    pub fn term_position(&self, offset: usize) -> Option<u32> {
        let mut position = 0;
        let mut in_term = false;
        for (i, c) in self.text.char_indices() {
            if c.is_whitespace() {
                in_term = false;
            } else if !in_term {
                in_term = true;
                position += 1;
            }
            if i == offset {
                return in_term.then_some(position);
            }
        }
        None
    }
}

/// Reads a requirements file (JSON Lines, see the module docs).
pub fn import_requirements<R: BufRead>(reader: R) -> Result<Vec<Requirement>, AnnotationError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let req: Requirement =
            serde_json::from_str(&line).map_err(|e| AnnotationError::Malformed { line: n, message: e.to_string() })?;
        if req.text.trim().is_empty() {
            return Err(AnnotationError::EmptyRequirement { id: req.id, line: n });
        }
        if !seen.insert(req.id.clone()) {
            return Err(AnnotationError::DuplicateRequirement { id: req.id, line: n });
        }
        out.push(req);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Treatment {
    Ccr,
    Search,
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Treatment::Ccr => "ccr",
            Treatment::Search => "search",
        })
    }
}

impl FromStr for Treatment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ccr" => Ok(Treatment::Ccr),
            "search" => Ok(Treatment::Search),
            other => Err(format!("unknown treatment `{other}` (expected ccr or search)")),
        }
    }
}

/// A point on the five-point self-report scale, −2..=+2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Confidence(i8);

impl Confidence {
    pub fn new(value: i64) -> Result<Self, AnnotationError> {
        if (-2..=2).contains(&value) {
            Ok(Self(value as i8))
        } else {
            Err(AnnotationError::ConfidenceRange(value))
        }
    }

    pub fn get(self) -> i8 {
        self.0
    }
}

impl TryFrom<i64> for Confidence {
    type Error = AnnotationError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Confidence> for i64 {
    fn from(c: Confidence) -> i64 {
        i64::from(c.0)
    }
}

/// A term of a requirement linked to a taxonomy object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Association {
    pub stem: String,
    /// 1-based term position in the requirement, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<u32>,
    pub code: String,
}

impl fmt::Display for Association {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", utf8_percent_encode(&self.stem, ASSOC_ESCAPE))?;
        if let Some(p) = self.position {
            write!(f, "@{p}")?;
        }
        write!(f, ":{}", utf8_percent_encode(&self.code, ASSOC_ESCAPE))
    }
}

impl FromStr for Association {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AnnotationError::Association(s.to_string());
        let (term, code) = s.split_once(':').ok_or_else(bad)?;
        let (stem, position) = match term.split_once('@') {
            Some((stem, pos)) => (stem, Some(pos.parse::<u32>().map_err(|_| bad())?)),
            None => (term, None),
        };
        let decode = |x: &str| percent_decode_str(x).decode_utf8().map(|c| c.into_owned()).map_err(|_| bad());
        let (stem, code) = (decode(stem)?, decode(code)?);
        if stem.is_empty() || code.is_empty() {
            return Err(bad());
        }
        Ok(Self { stem, position, code })
    }
}

pub fn format_associations(assocs: &[Association]) -> String {
    assocs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

pub fn parse_associations(s: &str) -> Result<Vec<Association>, AnnotationError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub participant: String,
    pub treatment: Treatment,
    pub requirement_id: String,
    pub duration_seconds: f64,
    pub conf_correct: Confidence,
    pub conf_complete: Confidence,
    #[serde(default)]
    pub associations: Vec<Association>,
}

impl AnnotationRecord {
    pub fn validate(&self) -> Result<(), AnnotationError> {
        if !self.duration_seconds.is_finite() || self.duration_seconds < 0.0 {
            return Err(AnnotationError::Duration(self.duration_seconds));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub participant: String,
    pub treatment: Treatment,
    pub completed: Vec<String>,
    pub started_at: Option<DateTime<Utc>>,
    pub updated_at: Option<DateTime<Utc>>,
}

/// Requirement set plus the append-only list of annotation records.
///
/// When opened on a file, every acknowledged record has been written and
/// synced as one JSON line before [`AnnotationStore::append_record`]
/// returns.
#[derive(Debug)]
pub struct AnnotationStore {
    requirements: Vec<Requirement>,
    by_id: HashMap<String, usize>,
    records: Vec<AnnotationRecord>,
    sessions: BTreeMap<String, Session>,
    log: Option<File>,
}

impl AnnotationStore {
    pub fn in_memory(requirements: Vec<Requirement>) -> Self {
        let by_id = requirements.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        Self { requirements, by_id, records: Vec::new(), sessions: BTreeMap::new(), log: None }
    }

    /// Opens a store backed by a JSON Lines record file, replaying any
    /// records it already holds.
    pub fn open(requirements: Vec<Requirement>, path: impl AsRef<Path>) -> Result<Self, AnnotationError> {
        let path = path.as_ref();
        let mut store = Self::in_memory(requirements);
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: AnnotationRecord = serde_json::from_str(&line)
                    .map_err(|e| AnnotationError::Malformed { line: i + 1, message: e.to_string() })?;
                store.admit(record, None)?;
            }
        }
        store.log = Some(OpenOptions::new().create(true).append(true).open(path)?);
        Ok(store)
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.by_id.get(id).map(|&i| &self.requirements[i])
    }

    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    pub fn session(&self, participant: &str) -> Option<&Session> {
        self.sessions.get(participant)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    /// Registers a participant without a record yet, fixing its treatment.
    pub fn register(
        &mut self,
        participant: &str,
        treatment: Treatment,
        now: DateTime<Utc>,
    ) -> Result<&Session, AnnotationError> {
        let session = self.sessions.entry(participant.to_string()).or_insert_with(|| Session {
            participant: participant.to_string(),
            treatment,
            completed: Vec::new(),
            started_at: Some(now),
            updated_at: Some(now),
        });
        if session.treatment != treatment {
            return Err(AnnotationError::TreatmentMismatch {
                participant: participant.to_string(),
                existing: session.treatment,
                got: treatment,
            });
        }
        Ok(session)
    }

    fn check(&self, record: &AnnotationRecord) -> Result<(), AnnotationError> {
        record.validate()?;
        if !self.by_id.contains_key(&record.requirement_id) {
            return Err(AnnotationError::UnknownRequirement(record.requirement_id.clone()));
        }
        if let Some(session) = self.sessions.get(&record.participant) {
            if session.treatment != record.treatment {
                return Err(AnnotationError::TreatmentMismatch {
                    participant: record.participant.clone(),
                    existing: session.treatment,
                    got: record.treatment,
                });
            }
            if session.completed.contains(&record.requirement_id) {
                return Err(AnnotationError::AlreadyCompleted {
                    participant: record.participant.clone(),
                    requirement: record.requirement_id.clone(),
                });
            }
        }
        Ok(())
    }

    fn admit(&mut self, record: AnnotationRecord, now: Option<DateTime<Utc>>) -> Result<(), AnnotationError> {
        self.check(&record)?;
        let session = self.sessions.entry(record.participant.clone()).or_insert_with(|| Session {
            participant: record.participant.clone(),
            treatment: record.treatment,
            completed: Vec::new(),
            started_at: now,
            updated_at: now,
        });
        session.completed.push(record.requirement_id.clone());
        if now.is_some() {
            session.updated_at = now;
        }
        self.records.push(record);
        Ok(())
    }

    /// Validates, persists and stores `record`.
    pub fn append_record(&mut self, record: AnnotationRecord) -> Result<(), AnnotationError> {
        self.check(&record)?;
        if let Some(file) = self.log.as_mut() {
            let mut line = serde_json::to_vec(&record).map_err(|e| AnnotationError::Persistence(e.into()))?;
            line.push(b'\n');
            file.write_all(&line).and_then(|_| file.sync_data()).map_err(AnnotationError::Persistence)?;
        }
        self.admit(record, Some(Utc::now()))
    }

    /// Records matching `filter` (all when `None`), in append order.
    pub fn filtered(&self, filter: Option<Treatment>) -> Vec<AnnotationRecord> {
        self.records.iter().filter(|r| filter.is_none_or(|t| r.treatment == t)).cloned().collect()
    }

    pub fn export_dataset(&self, filter: Option<Treatment>) -> Result<String, AnnotationError> {
        let mut buf = Vec::new();
        write_dataset(&self.filtered(filter), &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

pub fn write_dataset<W: Write>(records: &[AnnotationRecord], out: W) -> Result<(), AnnotationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DATASET_HEADER)?;
    for r in records {
        w.write_record([
            DATASET_FORMAT_VERSION.to_string(),
            r.participant.clone(),
            r.treatment.to_string(),
            r.requirement_id.clone(),
            r.duration_seconds.to_string(),
            r.conf_correct.get().to_string(),
            r.conf_complete.get().to_string(),
            format_associations(&r.associations),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a dataset export back into records.
pub fn import_dataset<R: io::Read>(input: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(DATASET_HEADER.iter().copied()) {
        return Err(AnnotationError::Malformed {
            line: 1,
            message: format!("expected header `{}`", DATASET_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |what: &str| AnnotationError::Malformed { line, message: what.to_string() };
        let version: u32 = row[0].parse().map_err(|_| bad("format_version"))?;
        if version != DATASET_FORMAT_VERSION {
            return Err(AnnotationError::Version(version));
        }
        let conf = |s: &str| -> Result<Confidence, AnnotationError> {
            Confidence::new(s.parse::<i64>().map_err(|_| bad("confidence"))?)
        };
        let record = AnnotationRecord {
            participant: row[1].to_string(),
            treatment: row[2].parse().map_err(|e: String| bad(&e))?,
            requirement_id: row[3].to_string(),
            duration_seconds: row[4].parse().map_err(|_| bad("duration_s"))?,
            conf_correct: conf(&row[5])?,
            conf_complete: conf(&row[6])?,
            associations: parse_associations(&row[7])?,
        };
        record.validate()?;
        out.push(record);
    }
    Ok(out)
}
