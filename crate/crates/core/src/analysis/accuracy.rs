//! Expert judgments (M2) and inter-rater agreement.
//!
//! Each expert distributes exactly 10 points over the association instances
//! made for a requirement. The judgment file is CSV with the header
//! `format_version,expert,requirement_id,association,points`; `association`
//! uses the same `stem[@position]:code` encoding as the dataset export.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

pub const POINTS_PER_REQUIREMENT: u32 = 10;
const JUDGMENT_HEADER: [&str; 5] = ["format_version", "expert", "requirement_id", "association", "points"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub expert: String,
    pub requirement_id: String,
    /// Association key → points.
    pub points: BTreeMap<String, u32>,
}

impl JudgmentRecord {
    pub fn total(&self) -> u32 {
        self.points.values().sum()
    }
}

/// Reads a judgment CSV, grouping rows by (expert, requirement) in first-seen
/// order.
pub fn load_judgments<R: Read>(input: R) -> Result<Vec<JudgmentRecord>, AnalysisError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(JUDGMENT_HEADER.iter().copied()) {
        return Err(AnalysisError::Malformed {
            line: 1,
            message: format!("expected header `{}`", JUDGMENT_HEADER.join(",")),
        });
    }
    let mut out: Vec<JudgmentRecord> = Vec::new();
    let mut slot: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |m: &str| AnalysisError::Malformed { line, message: m.to_string() };
        if row[0].parse::<u32>().map_err(|_| bad("format_version"))? != 1 {
            return Err(bad("unsupported format_version"));
        }
        let points: u32 = row[4].parse().map_err(|_| bad("points must be a non-negative integer"))?;
        let key = (row[1].to_string(), row[2].to_string());
        let idx = *slot.entry(key.clone()).or_insert_with(|| {
            out.push(JudgmentRecord { expert: key.0, requirement_id: key.1, points: BTreeMap::new() });
            out.len() - 1
        });
        if out[idx].points.insert(row[3].to_string(), points).is_some() {
            return Err(bad("association judged twice by the same expert"));
        }
    }
    Ok(out)
}

pub fn write_judgments<W: std::io::Write>(judgments: &[JudgmentRecord], out: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(JUDGMENT_HEADER)?;
    for j in judgments {
        for (assoc, points) in &j.points {
            w.write_record(["1", &j.expert, &j.requirement_id, assoc, &points.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Checks the 10-point constraint and the expert count per requirement.
pub fn validate_judgments(judgments: &[JudgmentRecord], experts: usize) -> Result<(), AnalysisError> {
    let mut by_req: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for j in judgments {
        if j.total() != POINTS_PER_REQUIREMENT {
            return Err(AnalysisError::PointSum {
                expert: j.expert.clone(),
                requirement: j.requirement_id.clone(),
                total: j.total(),
            });
        }
        if !by_req.entry(&j.requirement_id).or_default().insert(&j.expert) {
            return Err(AnalysisError::DuplicateJudgment {
                expert: j.expert.clone(),
                requirement: j.requirement_id.clone(),
            });
        }
    }
    for (req, set) in by_req {
        if set.len() != experts {
            return Err(AnalysisError::ExpertCount {
                requirement: req.to_string(),
                expected: experts,
                found: set.len(),
            });
        }
    }
    Ok(())
}

/// Mean expert points per association, grouped by requirement. An
/// association an expert did not list counts as 0 points from that expert.
pub fn accuracy_scores(
    judgments: &[JudgmentRecord],
    experts: usize,
) -> Result<BTreeMap<String, BTreeMap<String, f64>>, AnalysisError> {
    validate_judgments(judgments, experts)?;
    let mut sums: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    for j in judgments {
        let req = sums.entry(j.requirement_id.clone()).or_default();
        for (assoc, p) in &j.points {
            *req.entry(assoc.clone()).or_default() += p;
        }
    }
    Ok(sums
        .into_iter()
        .map(|(req, assocs)| {
            let means = assocs.into_iter().map(|(a, s)| (a, f64::from(s) / experts as f64)).collect();
            (req, means)
        })
        .collect())
}

/// Counts of absolute point differences between two experts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementBuckets {
    pub diff_0: usize,
    pub diff_1: usize,
    pub diff_2: usize,
    pub diff_3: usize,
    pub diff_over_3: usize,
}

impl AgreementBuckets {
    pub fn add(&mut self, a: u32, b: u32) {
        match a.abs_diff(b) {
            0 => self.diff_0 += 1,
            1 => self.diff_1 += 1,
            2 => self.diff_2 += 1,
            3 => self.diff_3 += 1,
            _ => self.diff_over_3 += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.diff_0 + self.diff_1 + self.diff_2 + self.diff_3 + self.diff_over_3
    }
}

/// Buckets the per-association differences of exactly two experts, who
/// must have judged the same associations for every requirement.
pub fn agreement_buckets(judgments: &[JudgmentRecord]) -> Result<AgreementBuckets, AnalysisError> {
    let experts: BTreeSet<&str> = judgments.iter().map(|j| j.expert.as_str()).collect();
    if experts.len() != 2 {
        return Err(AnalysisError::ExpertCount { requirement: "*".into(), expected: 2, found: experts.len() });
    }
    let mut by_req: BTreeMap<&str, Vec<&JudgmentRecord>> = BTreeMap::new();
    for j in judgments {
        by_req.entry(&j.requirement_id).or_default().push(j);
    }
    let mut buckets = AgreementBuckets::default();
    for (req, js) in by_req {
        let [a, b] = js.as_slice() else {
            return Err(AnalysisError::ExpertCount { requirement: req.to_string(), expected: 2, found: js.len() });
        };
        if a.points.keys().ne(b.points.keys()) {
            return Err(AnalysisError::MismatchedAssociations(req.to_string()));
        }
        for (pa, pb) in a.points.values().zip(b.points.values()) {
            buckets.add(*pa, *pb);
        }
    }
    Ok(buckets)
}
