//! Trace-link recommender for linking natural-language requirements to the
//! objects of a domain taxonomy, together with the toolkit used to analyse
//! annotation experiments run against it.
//!
//! The crate is organised bottom-up:
//!
//! - [`textproc`] turns text into stemmed noun occurrences (tokenizer,
//!   stemmer, stopwords, dictionary decompounder).
//! - [`taxonomy`] loads and validates the taxonomy and builds the
//!   stem → objects inverted index.
//! - [`embeddings`] is a plain word-vector store with cosine and top-k
//!   proxy queries.
//! - [`recommender`] holds the three predictors, confidence aggregation,
//!   ranking and the accept/reject history.
//! - [`annotation`] persists requirements and annotation records and
//!   exports them as a tabular dataset.
//! - [`analysis`] computes the experiment metrics and Mann-Whitney U tests.
//! - [`wire`] contains the JSON bodies shared by the HTTP service and its
//!   client.

pub mod analysis;
pub mod annotation;
pub mod embeddings;
pub mod recommender;
pub mod taxonomy;
pub mod textproc;
pub mod wire;

pub use annotation::{AnnotationRecord, AnnotationStore, Association, Confidence, Requirement, Treatment};
pub use embeddings::EmbeddingStore;
pub use recommender::{
    FeedbackAction, FeedbackEvent, HistoryStore, Recommender, RecommenderConfig, SimilarityMode, Suggestion,
};
pub use taxonomy::{NounIndex, Taxonomy, TaxonomyObject};
pub use textproc::{Analyzer, AnalyzerConfig, NounOccurrence};
