use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use anyhow::{ensure, Context};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use taxotrace_core::analysis::{load_judgments, JudgmentRecord, ReportOptions};
use taxotrace_core::annotation::{import_requirements, AnnotationStore, Association, Requirement, Treatment};
use taxotrace_core::embeddings::{load_embeddings, EmbeddingStore};
use taxotrace_core::recommender::{EventLog, EventSink, HistoryStore, MemoryLog, Recommender, RecommenderConfig};
use taxotrace_core::taxonomy::{load_taxonomy, NounIndex, Taxonomy};
use taxotrace_core::textproc::{Analyzer, AnalyzerConfig};

pub const ANNOTATIONS_FILE: &str = "annotations.jsonl";
pub const FEEDBACK_FILE: &str = "feedback.jsonl";

/// Behaviour flags of a running service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub analyzer: AnalyzerConfig,
    pub recommender: RecommenderConfig,
    pub report: ReportOptions,
    pub search_limit: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            analyzer: AnalyzerConfig::default(),
            recommender: RecommenderConfig::default(),
            report: ReportOptions::default(),
            search_limit: 20,
        }
    }
}

/// Input files of `serve`. Without `data_dir` everything stays in memory.
#[derive(Debug, Clone, Default)]
pub struct ServiceFiles {
    pub taxonomy: PathBuf,
    pub requirements: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub judgments: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
}

/// The task a session currently has open.
#[derive(Debug, Clone)]
pub struct OpenTask {
    pub requirement_id: String,
    pub opened_at: DateTime<Utc>,
    pub clock: Instant,
    /// (stem, code) pairs decided during this task.
    pub decided: BTreeSet<(String, String)>,
    pub accepted: Vec<Association>,
}

#[derive(Debug, Clone)]
pub struct SessionState {
    pub token: String,
    pub participant: String,
    pub treatment: Treatment,
    /// Index of the next requirement in the global order.
    pub next: usize,
    pub open: Option<OpenTask>,
}

/// Mutable stores, either in memory or replayed from a data directory.
pub struct Stores {
    pub annotations: AnnotationStore,
    pub history: HistoryStore,
    pub sink: Box<dyn EventSink + Send + Sync>,
    pub last_event: Option<DateTime<Utc>>,
}

impl Stores {
    pub fn in_memory(requirements: Vec<Requirement>) -> Self {
        Self {
            annotations: AnnotationStore::in_memory(requirements),
            history: HistoryStore::new(),
            sink: Box::new(MemoryLog::default()),
            last_event: None,
        }
    }

    pub fn open(requirements: Vec<Requirement>, dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let annotations = AnnotationStore::open(requirements, dir.join(ANNOTATIONS_FILE))?;
        let (log, events) = EventLog::open(dir.join(FEEDBACK_FILE))?;
        Ok(Self {
            annotations,
            history: HistoryStore::replay(&events),
            last_event: log.last_timestamp(),
            sink: Box::new(log),
        })
    }
}

pub struct History {
    pub store: HistoryStore,
    pub sink: Box<dyn EventSink + Send + Sync>,
    pub last: Option<DateTime<Utc>>,
}

/// Shared service state. The recommender and taxonomy are immutable; the
/// history has a single writer; each session is locked on its own.
pub struct AppState {
    pub config: ServiceConfig,
    pub taxonomy: Taxonomy,
    /// Global task order shared by every session.
    pub requirements: Vec<Requirement>,
    pub recommender: Recommender,
    pub judgments: Option<Vec<JudgmentRecord>>,
    pub history: RwLock<History>,
    pub annotations: Mutex<AnnotationStore>,
    pub sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
    /// Serialises session creation so treatment balancing sees every
    /// participant.
    pub registration: Mutex<()>,
}

impl AppState {
    pub fn new(
        config: ServiceConfig,
        taxonomy: Taxonomy,
        embeddings: EmbeddingStore,
        stores: Stores,
        judgments: Option<Vec<JudgmentRecord>>,
    ) -> anyhow::Result<Self> {
        let analyzer = Analyzer::new(config.analyzer.clone())?;
        let index = NounIndex::build(&taxonomy, &analyzer);
        let recommender = Recommender::new(index, embeddings, analyzer, config.recommender.clone())?;
        Ok(Self {
            config,
            taxonomy,
            requirements: stores.annotations.requirements().to_vec(),
            recommender,
            judgments,
            history: RwLock::new(History { store: stores.history, sink: stores.sink, last: stores.last_event }),
            annotations: Mutex::new(stores.annotations),
            sessions: RwLock::new(HashMap::new()),
            registration: Mutex::new(()),
        })
    }

    /// Loads every input file and replays persisted records and feedback.
    pub fn load(config: ServiceConfig, files: &ServiceFiles) -> anyhow::Result<Self> {
        let taxonomy = load_taxonomy(open(&files.taxonomy)?)
            .with_context(|| format!("loading taxonomy {}", files.taxonomy.display()))?;
        let requirements = import_requirements(open(&files.requirements)?)
            .with_context(|| format!("loading requirements {}", files.requirements.display()))?;
        ensure!(!requirements.is_empty(), "requirement file {} is empty", files.requirements.display());
        let embeddings = match &files.embeddings {
            Some(p) => load_embeddings(open(p)?).with_context(|| format!("loading embeddings {}", p.display()))?,
            None => EmbeddingStore::empty(),
        };
        let judgments = match &files.judgments {
            Some(p) => Some(load_judgments(open(p)?).with_context(|| format!("loading judgments {}", p.display()))?),
            None => None,
        };
        let stores = match &files.data_dir {
            Some(dir) => Stores::open(requirements, dir)?,
            None => Stores::in_memory(requirements),
        };
        Self::new(config, taxonomy, embeddings, stores, judgments)
    }

    pub fn session(&self, token: &str) -> Option<Arc<Mutex<SessionState>>> {
        self.sessions.read().expect("session table poisoned").get(token).cloned()
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}
