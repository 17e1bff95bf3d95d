//! Predictor formulas and confidence aggregation.

use serde::{Deserialize, Serialize};

use super::{RecommenderError, Weights};

/// Value of one predictor slot for a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    /// Predictor did not fire; contributes 0 to the weighted sum.
    Absent,
    Value(f64),
    /// Rejected too often (the −∞ score); removes the candidate.
    Suppressed,
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl From<Option<f64>> for Score {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Score::Absent, Score::Value)
    }
}

/// Which form of the semantic similarity predictor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMode {
    /// `cos / f_proxy`: higher for more similar, rarer proxies; in (0, 1].
    #[default]
    ProseConsistent,
    /// `1 / (f_proxy · cos)`, exactly as printed; exceeds 1 for cos < 1.
    Literal,
}

/// Exact-match predictor: `1 / f_noun`.
pub fn p_exact(f_noun: usize) -> Result<f64, RecommenderError> {
    if f_noun == 0 {
        return Err(RecommenderError::ZeroFrequency("f_noun"));
    }
    Ok(1.0 / f_noun as f64)
}

/// Semantic similarity predictor for a proxy with cosine `cos` that appears
/// in `f_proxy` taxonomy objects.
pub fn p_similarity(cos: f64, f_proxy: usize, mode: SimilarityMode) -> Result<f64, RecommenderError> {
    if f_proxy == 0 {
        return Err(RecommenderError::ZeroFrequency("f_proxy"));
    }
    if cos.is_nan() || cos <= 0.0 {
        return Err(RecommenderError::NonPositiveCosine(cos));
    }
    let f = f_proxy as f64;
    Ok(match mode {
        SimilarityMode::ProseConsistent => cos / f,
        SimilarityMode::Literal => 1.0 / (f * cos),
    })
}

/// Global min/max of `f_assoc` over the history store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssocBounds {
    pub min: u64,
    pub max: u64,
}

/// Min-max scales `f_assoc`. Zero associations always scale to 0; a
/// degenerate range (`min == max`) scales positive counts to 1.
pub fn minmax_scaled(f_assoc: u64, bounds: AssocBounds) -> f64 {
    if f_assoc == 0 {
        return 0.0;
    }
    if bounds.max <= bounds.min {
        return 1.0;
    }
    let clamped = f_assoc.clamp(bounds.min, bounds.max);
    (clamped - bounds.min) as f64 / (bounds.max - bounds.min) as f64
}

/// History predictor from raw counts.
pub fn p_history_from_counts(
    accepts: u64,
    rejects: u64,
    bounds: AssocBounds,
    f_noun: usize,
    rejection_threshold: u32,
) -> Result<Score, RecommenderError> {
    if f_noun == 0 {
        return Err(RecommenderError::ZeroFrequency("f_noun"));
    }
    if rejects >= u64::from(rejection_threshold) {
        return Ok(Score::Suppressed);
    }
    Ok(Score::Value(minmax_scaled(accepts, bounds) / f_noun as f64))
}

/// Weighted sum of the three slots; absent slots contribute 0.
///
/// `None` means the candidate is suppressed.
pub fn combine_confidence(
    exact: Score,
    similarity: Score,
    history: Score,
    weights: &Weights,
) -> Result<Option<f64>, RecommenderError> {
    let slots = [(exact, weights.exact), (similarity, weights.similarity), (history, weights.history)];
    if slots.iter().any(|(s, _)| *s == Score::Suppressed) {
        return Ok(None);
    }
    if slots.iter().all(|(s, _)| *s == Score::Absent) {
        return Err(RecommenderError::NoPredictor);
    }
    Ok(Some(slots.iter().map(|(s, w)| s.value().unwrap_or(0.0) * w).sum()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-9;

    #[test]
    fn exact_match() {
        assert_eq!(p_exact(1).unwrap(), 1.0);
        assert!((p_exact(4).unwrap() - 0.25).abs() < EPS);
        assert!(p_exact(0).is_err());
    }

    #[test]
    fn similarity_modes() {
        use SimilarityMode::*;
        assert_eq!(p_similarity(1.0, 1, ProseConsistent).unwrap(), 1.0);
        assert!((p_similarity(0.8, 4, ProseConsistent).unwrap() - 0.2).abs() < EPS);
        let literal = p_similarity(0.5, 1, Literal).unwrap();
        assert!((literal - 2.0).abs() < EPS);
        assert!(literal > 1.0);
        assert!(p_similarity(0.0, 1, ProseConsistent).is_err());
        assert!(p_similarity(-0.3, 1, Literal).is_err());
        assert!(p_similarity(0.5, 0, Literal).is_err());
    }

    #[test]
    fn history_scaling() {
        let b = AssocBounds { min: 1, max: 5 };
        assert_eq!(p_history_from_counts(0, 5, b, 1, 5).unwrap(), Score::Suppressed);
        let s = p_history_from_counts(3, 0, b, 2, 5).unwrap().value().unwrap();
        assert!((s - 0.25).abs() < EPS);
        let single = AssocBounds { min: 1, max: 1 };
        assert_eq!(p_history_from_counts(1, 0, single, 1, 5).unwrap(), Score::Value(1.0));
        assert_eq!(p_history_from_counts(0, 2, AssocBounds { min: 0, max: 0 }, 1, 5).unwrap(), Score::Value(0.0));
        assert!(p_history_from_counts(1, 0, b, 0, 5).is_err());
    }

    #[test]
    fn aggregation() {
        let w = Weights::default();
        let all = combine_confidence(Score::Value(1.0), Score::Value(1.0), Score::Value(1.0), &w).unwrap();
        assert!((all.unwrap() - 1.0).abs() < EPS);
        let mixed = combine_confidence(Score::Value(0.25), Score::Value(0.2), Score::Value(0.0), &w).unwrap();
        assert!((mixed.unwrap() - 0.15).abs() < EPS);
        let absent = combine_confidence(Score::Value(0.25), Score::Value(0.2), Score::Absent, &w).unwrap();
        assert_eq!(absent, mixed);
        assert_eq!(combine_confidence(Score::Value(0.9), Score::Value(0.9), Score::Suppressed, &w).unwrap(), None);
        assert!(combine_confidence(Score::Absent, Score::Absent, Score::Absent, &w).is_err());
    }
}
