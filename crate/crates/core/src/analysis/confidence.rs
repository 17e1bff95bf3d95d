use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::annotation::AnnotationRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceKind {
    /// Correctness of the made associations (M5).
    Correct,
    /// Completeness of the made associations (M4).
    Complete,
}

impl ConfidenceKind {
    pub fn value(self, record: &AnnotationRecord) -> i8 {
        match self {
            ConfidenceKind::Correct => record.conf_correct.get(),
            ConfidenceKind::Complete => record.conf_complete.get(),
        }
    }
}

/// Shares of low (−2, −1), neutral (0) and high (+1, +2) answers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceShares {
    pub low: f64,
    pub neutral: f64,
    pub high: f64,
    pub count: usize,
}

pub fn shares(values: &[i8]) -> Result<ConfidenceShares, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyGroup("confidence values".into()));
    }
    let n = values.len() as f64;
    let count = |pred: fn(i8) -> bool| values.iter().filter(|v| pred(**v)).count() as f64 / n;
    Ok(ConfidenceShares {
        low: count(|v| v < 0),
        neutral: count(|v| v == 0),
        high: count(|v| v > 0),
        count: values.len(),
    })
}

pub fn confidence_distribution(
    records: &[AnnotationRecord],
    which: ConfidenceKind,
) -> Result<ConfidenceShares, AnalysisError> {
    let values: Vec<i8> = records.iter().map(|r| which.value(r)).collect();
    shares(&values)
}
