//! Within-group consistency (M3): association vectors and their mean
//! pairwise cosine.
//!
//! A participant's annotation of one requirement is a row of labels, one per
//! term position, with label 1 meaning "no object". In one-hot mode every
//! position expands to indicator components over the labels observed at
//! that position, so two rows have cosine `matching positions / positions`
//! regardless of how object codes map to label numbers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::annotation::AnnotationRecord;

pub const NO_OBJECT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    #[default]
    OneHot,
    /// Raw label numbers as components.
    NumericCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationVector {
    pub requirement_id: String,
    pub participant: String,
    pub mode: EncodingMode,
    pub components: Vec<f64>,
}

/// Encodes label rows (one per participant, same length) jointly.
pub fn encode_vectors(
    requirement_id: &str,
    rows: &[(String, Vec<u32>)],
    mode: EncodingMode,
) -> Result<Vec<AssociationVector>, AnalysisError> {
    let Some((_, first)) = rows.first() else {
        return Ok(Vec::new());
    };
    let terms = first.len();
    if let Some((p, row)) = rows.iter().find(|(_, r)| r.len() != terms) {
        return Err(AnalysisError::TermCount {
            requirement: requirement_id.to_string(),
            participant: p.clone(),
            expected: terms,
            found: row.len(),
        });
    }
    let alphabets: Vec<Vec<u32>> = (0..terms)
        .map(|t| {
            let set: BTreeSet<u32> = rows.iter().map(|(_, r)| r[t]).collect();
            set.into_iter().collect()
        })
        .collect();
    Ok(rows
        .iter()
        .map(|(participant, row)| {
            let components = match mode {
                EncodingMode::NumericCode => row.iter().map(|&l| f64::from(l)).collect(),
                EncodingMode::OneHot => alphabets
                    .iter()
                    .zip(row)
                    .flat_map(|(alphabet, label)| alphabet.iter().map(move |a| if a == label { 1.0 } else { 0.0 }))
                    .collect(),
            };
            AssociationVector {
                requirement_id: requirement_id.to_string(),
                participant: participant.clone(),
                mode,
                components,
            }
        })
        .collect())
}

pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (na > 0.0 && nb > 0.0).then(|| (dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Mean cosine over all unordered pairs of vectors.
pub fn consistency(vectors: &[AssociationVector]) -> Result<f64, AnalysisError> {
    if vectors.len() < 2 {
        return Err(AnalysisError::TooFewVectors(vectors.len()));
    }
    let mode = vectors[0].mode;
    let dim = vectors[0].components.len();
    if vectors.iter().any(|v| v.mode != mode) {
        return Err(AnalysisError::MixedEncodings);
    }
    if vectors.iter().any(|v| v.components.len() != dim) {
        return Err(AnalysisError::DimensionMismatch);
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            sum += cosine(&vectors[i].components, &vectors[j].components)
                .ok_or_else(|| AnalysisError::ZeroVector(vectors[i].participant.clone()))?;
            pairs += 1;
        }
    }
    Ok(sum / pairs as f64)
}

/// A term of a requirement: its 1-based position, or its stem when the
/// record carries no position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKey {
    Position(u32),
    Stem(String),
}

/// Builds label rows for one requirement from annotation records.
///
/// Terms are positions `1..=term_count` (when given) plus every term any
/// record annotated. Object codes are numbered from 2 in code order; several
/// codes on one term form one combined label.
pub fn label_rows(records: &[&AnnotationRecord], term_count: Option<usize>) -> Vec<(String, Vec<u32>)> {
    let mut terms: BTreeSet<TermKey> = (1..=term_count.unwrap_or(0) as u32).map(TermKey::Position).collect();
    let mut assigned: Vec<BTreeMap<TermKey, BTreeSet<&str>>> = Vec::new();
    for r in records {
        let mut map: BTreeMap<TermKey, BTreeSet<&str>> = BTreeMap::new();
        for a in &r.associations {
            let key = a.position.map_or_else(|| TermKey::Stem(a.stem.clone()), TermKey::Position);
            terms.insert(key.clone());
            map.entry(key).or_default().insert(a.code.as_str());
        }
        assigned.push(map);
    }
    let combined = |codes: &BTreeSet<&str>| codes.iter().copied().collect::<Vec<_>>().join("|");
    let labels: BTreeSet<String> = assigned.iter().flat_map(|m| m.values().map(combined)).collect();
    let label_of: BTreeMap<String, u32> = labels.into_iter().zip(2..).collect();
    records
        .iter()
        .zip(&assigned)
        .map(|(r, map)| {
            let row = terms.iter().map(|t| map.get(t).map_or(NO_OBJECT, |codes| label_of[&combined(codes)])).collect();
            (r.participant.clone(), row)
        })
        .collect()
}
