//! Ranking recommender: exact-match, semantic-similarity and history
//! predictors aggregated into a confidence score per (noun, object) pair.

mod history;
mod scoring;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::Requirement;
use crate::embeddings::EmbeddingStore;
use crate::taxonomy::NounIndex;
use crate::textproc::{Analyzer, NounOccurrence, Vocabulary};

pub use history::{
    read_events, EventLog, EventSink, FeedbackAction, FeedbackEvent, HistoryError, HistoryStore, MemoryLog, PairCounts,
};
pub use scoring::{
    combine_confidence, minmax_scaled, p_exact, p_history_from_counts, p_similarity, AssocBounds, Score, SimilarityMode,
};

#[derive(Debug, Error)]
pub enum RecommenderError {
    #[error("{0} must be at least 1")]
    ZeroFrequency(&'static str),
    #[error("proxy cosine {0} is not positive")]
    NonPositiveCosine(f64),
    #[error("no predictor produced a score")]
    NoPredictor,
    #[error("invalid recommender config: {0}")]
    Config(String),
}

/// Relative weights of the three predictors. Must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub exact: f64,
    pub similarity: f64,
    pub history: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { exact: 1.0 / 3.0, similarity: 1.0 / 3.0, history: 1.0 / 3.0 }
    }
}

impl Weights {
    /// Scales non-negative raw weights so they sum to 1.
    pub fn normalized(exact: f64, similarity: f64, history: f64) -> Result<Self, RecommenderError> {
        let total = exact + similarity + history;
        if total.is_nan() || total <= 0.0 || [exact, similarity, history].iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(RecommenderError::Config("weights must be non-negative with a positive sum".into()));
        }
        Ok(Self { exact: exact / total, similarity: similarity / total, history: history / total })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecommenderConfig {
    pub k_proxies: usize,
    /// Rejections after which a pair is suppressed.
    pub rejection_threshold: u32,
    pub similarity_mode: SimilarityMode,
    pub weights: Weights,
    /// Proxies need a cosine strictly above this value.
    pub min_proxy_cosine: f64,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        Self {
            k_proxies: 10,
            rejection_threshold: 5,
            similarity_mode: SimilarityMode::ProseConsistent,
            weights: Weights::default(),
            min_proxy_cosine: 0.0,
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<(), RecommenderError> {
        let w = &self.weights;
        let ws = [w.exact, w.similarity, w.history];
        if ws.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(RecommenderError::Config("weights must be finite and non-negative".into()));
        }
        if (ws.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(RecommenderError::Config("weights must sum to 1".into()));
        }
        if self.k_proxies == 0 {
            return Err(RecommenderError::Config("k_proxies must be at least 1".into()));
        }
        if self.rejection_threshold == 0 {
            return Err(RecommenderError::Config("rejection_threshold must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.min_proxy_cosine) {
            return Err(RecommenderError::Config("min_proxy_cosine must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Exact,
    Similarity,
    History,
}

/// The proxy word that produced a similarity hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyHit {
    pub word: String,
    pub cosine: f64,
    pub f_proxy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub predictors: Vec<Predictor>,
    pub f_noun: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proxy: Option<ProxyHit>,
}

/// One ranked (noun occurrence, taxonomy object) recommendation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub requirement_id: String,
    pub occurrence: NounOccurrence,
    pub object_code: String,
    pub p_exact: Option<f64>,
    pub p_similarity: Option<f64>,
    pub p_history: Option<f64>,
    pub confidence: f64,
    pub provenance: Provenance,
}

impl Suggestion {
    pub fn stem(&self) -> &str {
        &self.occurrence.stem
    }

    /// Confidence re-derived from the stored components.
    pub fn recompute(&self, weights: &Weights) -> f64 {
        combine_confidence(self.p_exact.into(), self.p_similarity.into(), self.p_history.into(), weights)
            .ok()
            .flatten()
            .unwrap_or(0.0)
    }
}

#[derive(Default)]
struct Candidate {
    exact: Option<f64>,
    similarity: Option<(f64, ProxyHit)>,
}

/// Immutable scoring context: index, embeddings, analyzer and config.
#[derive(Debug, Clone)]
pub struct Recommender {
    index: NounIndex,
    embeddings: EmbeddingStore,
    analyzer: Analyzer,
    config: RecommenderConfig,
    vocabulary: Vocabulary,
}

impl Recommender {
    pub fn new(
        index: NounIndex,
        embeddings: EmbeddingStore,
        analyzer: Analyzer,
        config: RecommenderConfig,
    ) -> Result<Self, RecommenderError> {
        config.validate()?;
        let mut vocabulary: Vocabulary = index.stems().map(str::to_string).collect();
        vocabulary.extend(embeddings.words().map(|w| analyzer.stem(w)));
        Ok(Self { index, embeddings, analyzer, config, vocabulary })
    }

    pub fn index(&self) -> &NounIndex {
        &self.index
    }

    pub fn embeddings(&self) -> &EmbeddingStore {
        &self.embeddings
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn config(&self) -> &RecommenderConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn nouns(&self, text: &str) -> Vec<NounOccurrence> {
        self.analyzer.analyze(text, &self.vocabulary)
    }

    fn embedding_word(&self, occ: &NounOccurrence) -> Option<String> {
        [occ.surface.clone(), occ.surface.to_lowercase(), occ.stem.clone()]
            .into_iter()
            .find(|w| self.embeddings.contains(w))
    }

    /// Ranked suggestions for `requirement` given a history snapshot.
    pub fn suggest(&self, requirement: &Requirement, history: &HistoryStore) -> Vec<Suggestion> {
        let occurrences = self.nouns(&requirement.text);
        let bounds = history.bounds();
        let mut out = Vec::new();

        for occ in &occurrences {
            let mut candidates: BTreeMap<String, Candidate> = BTreeMap::new();
            let f_noun = self.index.f_noun(&occ.stem);
            if f_noun > 0 {
                let exact = p_exact(f_noun).expect("f_noun checked");
                for code in self.index.objects(&occ.stem).into_iter().flatten() {
                    candidates.entry(code.clone()).or_default().exact = Some(exact);
                }
            }
            self.similarity_candidates(occ, &mut candidates);

            for (code, cand) in candidates {
                let history_score = match history.counts(&occ.stem, &code) {
                    Some(c) if c.rejects >= u64::from(self.config.rejection_threshold) => Score::Suppressed,
                    Some(c) if f_noun > 0 => {
                        let b = bounds.expect("non-empty history has bounds");
                        p_history_from_counts(c.accepts, c.rejects, b, f_noun, self.config.rejection_threshold)
                            .expect("f_noun checked")
                    }
                    _ => Score::Absent,
                };
                let (similarity, proxy) = match cand.similarity {
                    Some((s, hit)) => (Some(s), Some(hit)),
                    None => (None, None),
                };
                let Ok(Some(confidence)) =
                    combine_confidence(cand.exact.into(), similarity.into(), history_score, &self.config.weights)
                else {
                    continue;
                };
                let mut predictors = Vec::new();
                if cand.exact.is_some() {
                    predictors.push(Predictor::Exact);
                }
                if similarity.is_some() {
                    predictors.push(Predictor::Similarity);
                }
                if history_score.value().is_some() {
                    predictors.push(Predictor::History);
                }
                out.push(Suggestion {
                    requirement_id: requirement.id.clone(),
                    occurrence: occ.clone(),
                    object_code: code,
                    p_exact: cand.exact,
                    p_similarity: similarity,
                    p_history: history_score.value(),
                    confidence,
                    provenance: Provenance { predictors, f_noun, proxy },
                });
            }
        }

        out.sort_by(|a, b| {
            b.confidence
                .total_cmp(&a.confidence)
                .then_with(|| a.object_code.cmp(&b.object_code))
                .then(a.occurrence.start.cmp(&b.occurrence.start))
        });
        out
    }

    fn similarity_candidates(&self, occ: &NounOccurrence, candidates: &mut BTreeMap<String, Candidate>) {
        let Some(word) = self.embedding_word(occ) else {
            return;
        };
        let Ok(proxies) = self.embeddings.top_k_proxies(&word, self.config.k_proxies) else {
            return;
        };
        for (proxy, cosine) in proxies {
            if cosine <= self.config.min_proxy_cosine {
                continue;
            }
            let proxy_stem = self.analyzer.stem(&proxy);
            if proxy_stem == occ.stem {
                continue;
            }
            let Some(codes) = self.index.objects(&proxy_stem) else {
                continue;
            };
            let f_proxy = codes.len();
            let Ok(score) = p_similarity(cosine, f_proxy, self.config.similarity_mode) else {
                continue;
            };
            for code in codes {
                let cand = candidates.entry(code.clone()).or_default();
                if cand.similarity.as_ref().is_none_or(|(best, _)| score > *best) {
                    cand.similarity = Some((score, ProxyHit { word: proxy.clone(), cosine, f_proxy }));
                }
            }
        }
    }
}
