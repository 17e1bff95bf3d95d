use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::annotation::{AnnotationRecord, Treatment};

/// Standard median: the middle order statistic, or the mean of the two
/// middle ones for an even count.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub values: Vec<f64>,
    pub median: f64,
    pub count: usize,
}

pub fn summarize(group: impl Into<String>, values: Vec<f64>) -> Result<GroupSummary, AnalysisError> {
    let group = group.into();
    let median = median(&values).ok_or_else(|| AnalysisError::EmptyGroup(group.clone()))?;
    Ok(GroupSummary { group, count: values.len(), values, median })
}

/// Duration values (in record order) of the given treatment.
pub fn durations(records: &[AnnotationRecord], treatment: Treatment) -> Vec<f64> {
    records.iter().filter(|r| r.treatment == treatment).map(|r| r.duration_seconds).collect()
}

/// Per-treatment duration summaries (ccr first). Both groups must be
/// non-empty.
pub fn duration_summary(records: &[AnnotationRecord]) -> Result<Vec<GroupSummary>, AnalysisError> {
    [Treatment::Ccr, Treatment::Search].into_iter().map(|t| summarize(t.to_string(), durations(records, t))).collect()
}
